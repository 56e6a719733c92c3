use crate::error::{invalid, Result};

/// The complete graph `K_p` on vertices `0..p` with the cyclic length metric.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProblemInstance {
    p: usize,
    divisors: Vec<usize>,
}

impl ProblemInstance {
    pub fn new(p: usize) -> Result<Self> {
        if p < 2 {
            return Err(invalid(format!("p must be at least 2, got {p}")));
        }
        Ok(Self { p, divisors: divisors_of(p) })
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    /// All divisors of `p`, ascending, including 1 and `p`.
    pub fn divisors(&self) -> &[usize] {
        &self.divisors
    }

    /// Largest canonical edge length, `floor(p / 2)`.
    #[inline]
    pub fn max_length(&self) -> usize {
        self.p / 2
    }

    /// The instance one vertex larger.
    pub fn next(&self) -> Self {
        Self { p: self.p + 1, divisors: divisors_of(self.p + 1) }
    }

    pub fn cyclic_length(&self, x: usize, y: usize) -> Result<usize> {
        if x >= self.p || y >= self.p {
            return Err(invalid(format!("vertex out of range for p={}: ({x}, {y})", self.p)));
        }
        if x == y {
            return Err(invalid(format!("cyclic length undefined for equal vertices ({x}, {x})")));
        }
        Ok(raw_cyclic_length(x, y, self.p))
    }
}

/// Unchecked cyclic length; callers guarantee `x, y < p`.
#[inline]
pub(crate) fn raw_cyclic_length(x: usize, y: usize, p: usize) -> usize {
    let d = x.abs_diff(y);
    d.min(p - d)
}

fn divisors_of(p: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= p {
        if p.is_multiple_of(d) {
            small.push(d);
            if d * d != p {
                large.push(p / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
