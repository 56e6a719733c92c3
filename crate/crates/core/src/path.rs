use crate::error::{invalid, Error, Result};
use crate::instance::{raw_cyclic_length, ProblemInstance};
use crate::multiset::HopMultiset;

/// A permutation of `0..p` read as a Hamiltonian path in `K_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct HamiltonianPath(Vec<usize>);

impl HamiltonianPath {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        let p = vertices.len();
        if p < 2 {
            return Err(invalid(format!("path must visit at least 2 vertices, got {p}")));
        }
        let mut seen = vec![false; p];
        for &v in &vertices {
            if v >= p {
                return Err(invalid(format!("vertex {v} out of range for p={p}")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(invalid(format!("vertex {v} visited twice")));
            }
        }
        Ok(Self(vertices))
    }

    pub(crate) fn new_unchecked(vertices: Vec<usize>) -> Self {
        Self(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Number of vertices, which is the modulus the path belongs to.
    pub fn p(&self) -> usize {
        self.0.len()
    }

    pub fn into_vertices(self) -> Vec<usize> {
        self.0
    }

    /// Consecutive cyclic lengths under modulus `p`, in path order.
    pub fn hop_sequence(&self, inst: &ProblemInstance) -> Result<Vec<usize>> {
        self.check_instance(inst)?;
        Ok(hops_under(&self.0, inst.p()))
    }

    fn check_instance(&self, inst: &ProblemInstance) -> Result<()> {
        if self.p() != inst.p() {
            return Err(Error::ModulusMismatch { expected: inst.p(), found: self.p() });
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn hops_under(vertices: &[usize], p: usize) -> Vec<usize> {
    vertices.windows(2).map(|w| raw_cyclic_length(w[0], w[1], p)).collect()
}

pub fn path_hop_lengths(path: &HamiltonianPath, inst: &ProblemInstance) -> Result<HopMultiset> {
    path.check_instance(inst)?;
    let mut counts = vec![0; inst.max_length() + 1];
    for w in path.0.windows(2) {
        counts[raw_cyclic_length(w[0], w[1], inst.p())] += 1;
    }
    HopMultiset::from_dense(inst.p(), counts)
}

/// True iff the path's hop lengths equal `target` exactly.
pub fn validate_realization(
    path: &HamiltonianPath,
    target: &HopMultiset,
    inst: &ProblemInstance,
) -> bool {
    if target.p() != inst.p() {
        return false;
    }
    match path_hop_lengths(path, inst) {
        Ok(actual) => actual == *target,
        Err(_) => false,
    }
}
