//! Enumeration of frequency partitions and hop multisets.
//!
//! Both streams are lazy and deterministic, so a worker can rebuild a
//! stream and skip to any item index to resume or split a run.

use crate::error::{Error, Result};
use crate::instance::{gcd, ProblemInstance};
use crate::multiset::{divisor_condition_dense, FrequencyPartition, HopMultiset};

/// Partitions of `p - 1` into at most `floor(p / 2)` parts, in
/// lexicographic descending order starting from `(p - 1,)`.
#[derive(Debug, Clone)]
pub struct FpStream {
    max_parts: usize,
    next: Option<Vec<usize>>,
}

pub fn generate_fps(inst: &ProblemInstance) -> FpStream {
    FpStream { max_parts: inst.max_length(), next: Some(vec![inst.p() - 1]) }
}

impl FpStream {
    /// Lexicographic successor of `parts` among partitions with at most
    /// `max_parts` parts, or `None` if `parts` is the last one.
    fn successor(parts: &[usize], max_parts: usize) -> Option<Vec<usize>> {
        // Decrement the rightmost part that can be decremented while the
        // tail still fits in the remaining slots with parts no larger.
        let mut tail = 0;
        for i in (0..parts.len()).rev() {
            tail += parts[i];
            if parts[i] == 1 {
                continue;
            }
            let cap = parts[i] - 1;
            let rest = tail - cap;
            let slots = max_parts - i - 1;
            if rest > cap * slots {
                continue;
            }
            let mut next = Vec::with_capacity(i + 1 + rest.div_ceil(cap));
            next.extend_from_slice(&parts[..i]);
            next.push(cap);
            let mut left = rest;
            while left > 0 {
                let part = left.min(cap);
                next.push(part);
                left -= part;
            }
            return Some(next);
        }
        None
    }
}

impl Iterator for FpStream {
    type Item = FrequencyPartition;

    fn next(&mut self) -> Option<FrequencyPartition> {
        let current = self.next.take()?;
        self.next = Self::successor(&current, self.max_parts);
        Some(FrequencyPartition::new_unchecked(current))
    }
}

impl std::iter::FusedIterator for FpStream {}

/// Default assignment of a partition to lengths: the i-th largest
/// multiplicity goes to length i. Returns a dense table indexed by length.
pub fn default_assignment(fp: &FrequencyPartition) -> Vec<usize> {
    let mut counts = vec![0; fp.num_parts() + 1];
    counts[1..].copy_from_slice(fp.parts());
    counts
}

/// One concrete multiset per frequency partition.
///
/// Uses the default assignment when it passes the divisor condition;
/// otherwise scans K-subsets of lengths in ascending lexicographic order,
/// giving the multiplicities (descending) to the chosen lengths (ascending).
pub fn representative_multiset(
    fp: &FrequencyPartition,
    inst: &ProblemInstance,
) -> Result<HopMultiset> {
    fp.validate_for(inst)?;
    let m = inst.max_length();
    let k = fp.num_parts();

    let mut counts = default_assignment(fp);
    counts.resize(m + 1, 0);
    if divisor_condition_dense(&counts, inst) {
        return HopMultiset::from_dense(inst.p(), counts);
    }

    let mut subset: Vec<usize> = (1..=k).collect();
    // the first subset is the default assignment, already rejected
    while advance_subset(&mut subset, m) {
        counts.iter_mut().for_each(|c| *c = 0);
        for (&len, &mult) in subset.iter().zip(fp.parts()) {
            counts[len] = mult;
        }
        if divisor_condition_dense(&counts, inst) {
            return HopMultiset::from_dense(inst.p(), counts);
        }
    }
    Err(Error::RepresentativeNotFound { fp: fp.parts().to_vec(), p: inst.p() })
}

/// Next ascending K-subset of `1..=m` in lexicographic order.
fn advance_subset(subset: &mut [usize], m: usize) -> bool {
    let k = subset.len();
    for i in (0..k).rev() {
        if subset[i] < m - (k - 1 - i) {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultisetFilter {
    None,
    DivisorCondition,
    /// Support restricted to lengths coprime to `p`.
    Coprime,
}

/// Size-`(p - 1)` multisets over an alphabet of lengths, ascending
/// lexicographic on the sorted element list.
#[derive(Debug, Clone)]
pub struct MultisetStream {
    inst: ProblemInstance,
    filter: MultisetFilter,
    alphabet: Vec<usize>,
    // non-decreasing indices into `alphabet`; None once exhausted
    state: Option<Vec<usize>>,
}

impl MultisetStream {
    fn new(inst: &ProblemInstance, filter: MultisetFilter) -> Self {
        let m = inst.max_length();
        let alphabet: Vec<usize> = match filter {
            MultisetFilter::Coprime => (1..=m).filter(|&k| gcd(k, inst.p()) == 1).collect(),
            _ => (1..=m).collect(),
        };
        Self { inst: inst.clone(), filter, alphabet, state: Some(vec![0; inst.p() - 1]) }
    }

    pub fn filter(&self) -> MultisetFilter {
        self.filter
    }

    /// Lengths the stream draws from.
    pub fn alphabet(&self) -> &[usize] {
        &self.alphabet
    }

    fn advance(state: &mut [usize], top: usize) -> bool {
        for i in (0..state.len()).rev() {
            if state[i] < top {
                let v = state[i] + 1;
                state[i..].iter_mut().for_each(|s| *s = v);
                return true;
            }
        }
        false
    }

    fn dense(&self, state: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.inst.max_length() + 1];
        for &i in state {
            counts[self.alphabet[i]] += 1;
        }
        counts
    }
}

impl Iterator for MultisetStream {
    type Item = HopMultiset;

    fn next(&mut self) -> Option<HopMultiset> {
        let top = self.alphabet.len() - 1;
        loop {
            let mut state = self.state.take()?;
            let counts = self.dense(&state);
            if Self::advance(&mut state, top) {
                self.state = Some(state);
            }
            if self.filter == MultisetFilter::DivisorCondition
                && !divisor_condition_dense(&counts, &self.inst)
            {
                continue;
            }
            return Some(
                HopMultiset::from_dense(self.inst.p(), counts).expect("stream yields size p-1"),
            );
        }
    }
}

impl std::iter::FusedIterator for MultisetStream {}

/// All size-`(p - 1)` multisets over `1..=floor(p/2)`, optionally filtered.
pub fn enumerate_multisets(inst: &ProblemInstance, filter: MultisetFilter) -> MultisetStream {
    MultisetStream::new(inst, filter)
}

/// All size-`(p - 1)` multisets whose support is coprime to `p`.
pub fn enumerate_coprime_multisets(inst: &ProblemInstance) -> MultisetStream {
    MultisetStream::new(inst, MultisetFilter::Coprime)
}
