use std::fmt;

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::error::{invalid, Error, Result};
use crate::instance::ProblemInstance;

/// A multiset of canonical cyclic lengths for a fixed modulus.
///
/// Multiplicities are stored densely by length; a zero entry means the
/// length is absent. The total multiplicity is always `p - 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HopMultiset {
    p: usize,
    // index 0 unused, so counts[len] is the multiplicity of `len`
    counts: Vec<usize>,
}

impl HopMultiset {
    /// Builds a multiset from `(length, multiplicity)` pairs. Zero
    /// multiplicities are ignored; repeated lengths accumulate.
    pub fn from_counts<I>(inst: &ProblemInstance, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut counts = vec![0; inst.max_length() + 1];
        for (len, mult) in pairs {
            if mult == 0 {
                continue;
            }
            if len == 0 || len > inst.max_length() {
                return Err(invalid(format!(
                    "length {len} outside 1..={} for p={}",
                    inst.max_length(),
                    inst.p()
                )));
            }
            counts[len] += mult;
        }
        Self::from_dense(inst.p(), counts)
    }

    /// Builds a multiset from a flat list of lengths such as `[1, 1, 2, 3]`.
    pub fn from_lengths(inst: &ProblemInstance, lengths: &[usize]) -> Result<Self> {
        Self::from_counts(inst, lengths.iter().map(|&l| (l, 1)))
    }

    pub(crate) fn from_dense(p: usize, counts: Vec<usize>) -> Result<Self> {
        debug_assert_eq!(counts.len(), p / 2 + 1);
        let total: usize = counts.iter().sum();
        if total != p - 1 {
            return Err(invalid(format!(
                "multiset for p={p} must have total multiplicity {}, got {total}",
                p - 1
            )));
        }
        Ok(Self { p, counts })
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn count(&self, len: usize) -> usize {
        self.counts.get(len).copied().unwrap_or(0)
    }

    /// Dense multiplicity table indexed by length (index 0 is always 0).
    pub fn dense_counts(&self) -> &[usize] {
        &self.counts
    }

    /// Total multiplicity, always `p - 1`.
    pub fn total(&self) -> usize {
        self.p - 1
    }

    /// Present `(length, multiplicity)` pairs in ascending length order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts.iter().enumerate().filter(|&(_, &c)| c > 0).map(|(l, &c)| (l, c))
    }

    /// Lengths present in the multiset, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.iter().map(|(l, _)| l).collect()
    }

    /// Number of distinct lengths.
    pub fn support_size(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// The sorted element list, e.g. `[1, 1, 2, 3]`.
    pub fn to_lengths(&self) -> Vec<usize> {
        self.iter().flat_map(|(l, c)| std::iter::repeat_n(l, c)).collect()
    }

    pub(crate) fn check_instance(&self, inst: &ProblemInstance) -> Result<()> {
        if self.p != inst.p() {
            return Err(Error::ModulusMismatch { expected: inst.p(), found: self.p });
        }
        Ok(())
    }

    /// L1 distance between multiplicity tables of the same modulus.
    pub fn l1_distance(&self, other: &HopMultiset) -> Result<usize> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch { expected: self.p, found: other.p });
        }
        Ok(self.counts.iter().zip(&other.counts).map(|(a, b)| a.abs_diff(*b)).sum())
    }
}

impl fmt::Debug for HopMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HopMultiset(p={}, ", self.p)?;
        f.debug_map().entries(self.iter()).finish()?;
        f.write_str(")")
    }
}

impl Serialize for HopMultiset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.support_size()))?;
        for (len, mult) in self.iter() {
            map.serialize_entry(&len.to_string(), &mult)?;
        }
        map.end()
    }
}

/// True iff for every divisor `d` of `p`, at most `p - d` elements of the
/// multiset are multiples of `d`.
pub fn divisor_condition(ms: &HopMultiset, inst: &ProblemInstance) -> Result<bool> {
    ms.check_instance(inst)?;
    Ok(divisor_condition_dense(ms.dense_counts(), inst))
}

pub(crate) fn divisor_condition_dense(counts: &[usize], inst: &ProblemInstance) -> bool {
    let p = inst.p();
    inst.divisors().iter().all(|&d| {
        let multiples: usize = counts.iter().skip(d).step_by(d).sum();
        multiples <= p - d
    })
}

/// Non-increasing tuple of multiplicities of the distinct lengths of a multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct FrequencyPartition(Vec<usize>);

impl FrequencyPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid("frequency partition must have at least one part"));
        }
        if parts.contains(&0) {
            return Err(invalid(format!("frequency partition parts must be positive: {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid(format!("frequency partition must be non-increasing: {parts:?}")));
        }
        Ok(Self(parts))
    }

    pub(crate) fn new_unchecked(parts: Vec<usize>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        Self(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Number of distinct lengths the partition describes.
    pub fn num_parts(&self) -> usize {
        self.0.len()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// Checks `sum = p - 1` and at most `floor(p / 2)` parts.
    pub fn validate_for(&self, inst: &ProblemInstance) -> Result<()> {
        if self.sum() != inst.p() - 1 {
            return Err(invalid(format!(
                "FP {:?} sums to {}, expected {} for p={}",
                self.0,
                self.sum(),
                inst.p() - 1,
                inst.p()
            )));
        }
        if self.num_parts() > inst.max_length() {
            return Err(invalid(format!(
                "FP {:?} has {} parts, more than floor(p/2)={}",
                self.0,
                self.num_parts(),
                inst.max_length()
            )));
        }
        Ok(())
    }
}

/// Renders as a Python tuple: `(30,)`, `(29, 1)`.
impl fmt::Display for FrequencyPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, part) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{part}")?;
        }
        if self.0.len() == 1 {
            f.write_str(",")?;
        }
        f.write_str(")")
    }
}

pub fn fp_of_multiset(ms: &HopMultiset) -> FrequencyPartition {
    let mut parts: Vec<usize> = ms.iter().map(|(_, c)| c).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    FrequencyPartition::new_unchecked(parts)
}
