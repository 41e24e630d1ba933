//! Multiparty pure-state LOCC protocol simulator with entropy and
//! relative-entropy-of-entanglement ledgers.
//!
//! The model: the global state stays pure and known to all parties; local
//! operations are unitaries and complete ideal measurements (ancillas, when
//! needed, are pre-tensored into the party dimensions); classical
//! communication is the globally shared outcome record on every branch.
//! Ledgers compare subsystem entropies and pairwise E_r before and after a
//! measurement event, and the reversibility report checks the necessary
//! conditions for asymptotic interconvertibility: equal subsystem (and
//! cluster) entropies and equal pairwise E_r.

use crate::entangle::{relative_entropy_of_entanglement, ErConfig};
use crate::opalg::{self, C64, ComplexMatrix, ComplexVector, partial_trace};
use crate::states::{self, entropy, DensityOperator};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

/// Measurement branches below this probability are dropped; the dropped mass
/// is reported alongside the surviving children.
pub const BRANCH_PRUNE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoccError {
    #[error("state vector norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("party index {0} out of range for {1} parties")]
    BadParty(usize, usize),
    #[error("operator is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("measurement basis is not orthonormal (defect {0:.3e})")]
    NotOrthonormal(f64),
    #[error("party structures differ: {0}")]
    StructureMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    State(#[from] states::StateError),
    #[error(transparent)]
    Matrix(#[from] opalg::MatrixError),
    #[error(transparent)]
    Entangle(#[from] crate::entangle::EntangleError),
}

pub type Result<T> = core::result::Result<T, LoccError>;

/// Pure global state shared by several parties.
#[derive(Debug, Clone)]
pub struct MultipartyState {
    dims: Vec<usize>,
    amplitudes: ComplexVector,
    labels: Vec<String>,
}

impl MultipartyState {
    pub fn new(dims: Vec<usize>, amplitudes: ComplexVector) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != amplitudes.dim() {
            return Err(LoccError::DimensionMismatch(format!(
                "party dims multiply to {}, vector is {}",
                total,
                amplitudes.dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(LoccError::NotNormalized(norm));
        }
        let labels = (0..dims.len())
            .map(|i| {
                let c = (b'A' + (i % 26) as u8) as char;
                let mut s = String::new();
                s.push(c);
                s
            })
            .collect();
        Ok(Self {
            dims,
            amplitudes,
            labels,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        if labels.len() == self.dims.len() {
            self.labels = labels;
        }
        self
    }

    /// (|0…0⟩ + |1…1⟩)/√2 on the given number of qubits.
    pub fn cat_state(parties: usize) -> Self {
        let dim = 1usize << parties;
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let mut v = ComplexVector::zeros(dim);
        v[0] = C64::new(h, 0.0);
        v[dim - 1] = C64::new(h, 0.0);
        Self::new(alloc::vec![2; parties], v).expect("cat state is normalized")
    }

    /// The three-qubit GHZ state (|000⟩ + |111⟩)/√2.
    pub fn ghz() -> Self {
        Self::cat_state(3)
    }

    /// The two-qubit EPR pair (|00⟩ + |11⟩)/√2.
    pub fn epr() -> Self {
        Self::cat_state(2)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// Reduced state of a set of parties.
    pub fn marginal(&self, parties: &[usize]) -> Result<DensityOperator> {
        for &p in parties {
            if p >= self.dims.len() {
                return Err(LoccError::BadParty(p, self.dims.len()));
            }
        }
        let proj = self.amplitudes.projector();
        let m = partial_trace(&proj, &self.dims, parties)?;
        Ok(DensityOperator::new(m)?)
    }

    pub fn subsystem_entropy(&self, parties: &[usize]) -> Result<f64> {
        Ok(entropy(&self.marginal(parties)?))
    }

    /// E_r of the bipartition between two single parties' marginal.
    pub fn pair_er(&self, pair: (usize, usize), config: &ErConfig) -> Result<f64> {
        let marg = self.marginal(&[pair.0, pair.1])?;
        let (lo, hi) = if pair.0 <= pair.1 {
            (pair.0, pair.1)
        } else {
            (pair.1, pair.0)
        };
        let dims = (self.dims[lo], self.dims[hi]);
        Ok(relative_entropy_of_entanglement(&marg, dims, config)?.value)
    }

    /// Tensor product of two states with the same party structure, regrouped
    /// so each party holds its factors from both copies.
    pub fn tensor_with(&self, other: &MultipartyState) -> Result<MultipartyState> {
        if self.dims.len() != other.dims.len() {
            return Err(LoccError::StructureMismatch(format!(
                "{} parties against {}",
                self.dims.len(),
                other.dims.len()
            )));
        }
        let p = self.dims.len();
        let new_dims: Vec<usize> = (0..p).map(|i| self.dims[i] * other.dims[i]).collect();
        let total: usize = new_dims.iter().product();
        let mut out = ComplexVector::zeros(total);
        for x in 0..self.amplitudes.dim() {
            let ax = self.amplitudes[x];
            if ax.norm_sqr() == 0.0 {
                continue;
            }
            let xd = decompose(x, &self.dims);
            for y in 0..other.amplitudes.dim() {
                let ay = other.amplitudes[y];
                if ay.norm_sqr() == 0.0 {
                    continue;
                }
                let yd = decompose(y, &other.dims);
                let mut idx = 0usize;
                for i in 0..p {
                    idx = idx * new_dims[i] + (xd[i] * other.dims[i] + yd[i]);
                }
                out[idx] = ax * ay;
            }
        }
        MultipartyState::new(new_dims, out)
    }

    /// Builds a multiparty state from a flat qubit register and an assignment
    /// of each qubit (big-endian order) to a party.
    pub fn from_qubit_assignment(
        amplitudes: &ComplexVector,
        party_of_qubit: &[usize],
        parties: usize,
    ) -> Result<MultipartyState> {
        let n = party_of_qubit.len();
        if amplitudes.dim() != (1usize << n) {
            return Err(LoccError::DimensionMismatch(format!(
                "{} qubits for vector dim {}",
                n,
                amplitudes.dim()
            )));
        }
        let mut counts = alloc::vec![0usize; parties];
        for &p in party_of_qubit {
            if p >= parties {
                return Err(LoccError::BadParty(p, parties));
            }
            counts[p] += 1;
        }
        let dims: Vec<usize> = counts.iter().map(|&c| 1usize << c).collect();
        let mut out = ComplexVector::zeros(1usize << n);
        for x in 0..amplitudes.dim() {
            let a = amplitudes[x];
            if a.norm_sqr() == 0.0 {
                continue;
            }
            // Qubit q holds bit (n−1−q) of x; regroup per party in qubit order.
            let mut local = alloc::vec![0usize; parties];
            for q in 0..n {
                let bit = (x >> (n - 1 - q)) & 1;
                local[party_of_qubit[q]] = (local[party_of_qubit[q]] << 1) | bit;
            }
            let mut idx = 0usize;
            for p in 0..parties {
                idx = idx * dims[p] + local[p];
            }
            out[idx] = a;
        }
        MultipartyState::new(dims, out)
    }
}

fn decompose(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = alloc::vec![0usize; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = idx % dims[i];
        idx /= dims[i];
    }
    out
}

/// A branch of the protocol tree: global pure state, cumulative probability,
/// and the shared classical record of (party, operation id, outcome).
#[derive(Debug, Clone)]
pub struct ProtocolNode {
    pub state: MultipartyState,
    pub probability: f64,
    pub record: Vec<RecordEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordEntry {
    pub party: usize,
    pub op_id: usize,
    pub outcome: usize,
}

impl ProtocolNode {
    pub fn root(state: MultipartyState) -> Self {
        Self {
            state,
            probability: 1.0,
            record: Vec::new(),
        }
    }
}

/// Applies an operator on one party's factor of the global vector.
fn apply_on_party(
    state: &MultipartyState,
    party: usize,
    op: &ComplexMatrix,
) -> Result<ComplexVector> {
    let dims = state.dims();
    if party >= dims.len() {
        return Err(LoccError::BadParty(party, dims.len()));
    }
    let dp = dims[party];
    if op.rows() != dp || op.cols() != dp {
        return Err(LoccError::DimensionMismatch(format!(
            "operator {}x{} on party of dim {}",
            op.rows(),
            op.cols(),
            dp
        )));
    }
    let after: usize = dims[party + 1..].iter().product();
    let before: usize = dims[..party].iter().product();
    let mut out = ComplexVector::zeros(state.amplitudes.dim());
    for pre in 0..before {
        for post in 0..after {
            let base = pre * dp * after + post;
            for r in 0..dp {
                let mut acc = C64::new(0.0, 0.0);
                for s in 0..dp {
                    acc += op[(r, s)] * state.amplitudes[base + s * after];
                }
                out[base + r * after] = acc;
            }
        }
    }
    Ok(out)
}

/// Local unitary on one party: one child, same probability, all subsystem
/// entropies unchanged.
pub fn local_unitary(node: &ProtocolNode, party: usize, u: &ComplexMatrix) -> Result<ProtocolNode> {
    let defect = u
        .adjoint()
        .mul(u)
        .max_abs_diff(&ComplexMatrix::identity(u.rows()));
    if defect > 1e-9 {
        return Err(LoccError::NotUnitary(defect));
    }
    let amplitudes = apply_on_party(&node.state, party, u)?;
    let mut record = node.record.clone();
    record.push(RecordEntry {
        party,
        op_id: node.record.len(),
        outcome: 0,
    });
    Ok(ProtocolNode {
        state: MultipartyState::new(node.state.dims().to_vec(), amplitudes)?,
        probability: node.probability,
        record,
    })
}

/// Children of a complete ideal measurement, plus any pruned branch mass.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub children: Vec<ProtocolNode>,
    pub pruned_mass: f64,
}

/// Complete ideal measurement of one party in an orthonormal basis. Each
/// outcome collapses that party onto a basis vector; children below the
/// pruning threshold are dropped into `pruned_mass`.
pub fn local_measure(
    node: &ProtocolNode,
    party: usize,
    basis: &[ComplexVector],
) -> Result<MeasurementOutcome> {
    let dims = node.state.dims();
    if party >= dims.len() {
        return Err(LoccError::BadParty(party, dims.len()));
    }
    let dp = dims[party];
    if basis.len() != dp || basis.iter().any(|v| v.dim() != dp) {
        return Err(LoccError::DimensionMismatch(format!(
            "basis of {} vectors on party of dim {}",
            basis.len(),
            dp
        )));
    }
    let mut worst = 0.0f64;
    for i in 0..dp {
        for j in 0..dp {
            let want = if i == j { 1.0 } else { 0.0 };
            let got = basis[i].inner(&basis[j]);
            worst = worst.max(libm::hypot(got.re - want, got.im));
        }
    }
    if worst > 1e-9 {
        return Err(LoccError::NotOrthonormal(worst));
    }

    let mut children = Vec::new();
    let mut pruned_mass = 0.0;
    for (k, b) in basis.iter().enumerate() {
        let proj = b.projector();
        let collapsed = apply_on_party(&node.state, party, &proj)?;
        let weight = collapsed.norm_sqr();
        if weight < BRANCH_PRUNE_TOL {
            pruned_mass += weight * node.probability;
            continue;
        }
        let mut record = node.record.clone();
        record.push(RecordEntry {
            party,
            op_id: node.record.len(),
            outcome: k,
        });
        children.push(ProtocolNode {
            state: MultipartyState::new(
                dims.to_vec(),
                collapsed.scale(C64::new(1.0 / libm::sqrt(weight), 0.0)),
            )?,
            probability: node.probability * weight,
            record,
        });
    }
    Ok(MeasurementOutcome {
        children,
        pruned_mass,
    })
}

/// Entropy of a party set before a measurement event and its branch average
/// after.
#[derive(Debug, Clone, Copy)]
pub struct EntropyLedger {
    pub before: f64,
    pub after_avg: f64,
}

pub fn entropy_ledger(
    parent: &ProtocolNode,
    children: &[ProtocolNode],
    parties: &[usize],
) -> Result<EntropyLedger> {
    let before = parent.state.subsystem_entropy(parties)?;
    let mut after_avg = 0.0;
    for child in children {
        let w = child.probability / parent.probability;
        after_avg += w * child.state.subsystem_entropy(parties)?;
    }
    Ok(EntropyLedger { before, after_avg })
}

/// E_r of a pair before a remote measurement, its branch average after, and
/// the average entropy drop of the measured party; the average E_r increase
/// never exceeds that entropy drop.
#[derive(Debug, Clone, Copy)]
pub struct ErLedger {
    pub before: f64,
    pub after_avg: f64,
    pub entropy_drop: f64,
}

pub fn er_ledger(
    parent: &ProtocolNode,
    children: &[ProtocolNode],
    pair: (usize, usize),
    config: &ErConfig,
) -> Result<ErLedger> {
    let measured = children
        .first()
        .and_then(|c| c.record.last())
        .map(|r| r.party)
        .ok_or_else(|| LoccError::StructureMismatch("no measurement children".into()))?;
    let before = parent.state.pair_er(pair, config)?;
    let s_before = parent.state.subsystem_entropy(&[measured])?;
    let mut after_avg = 0.0;
    let mut s_after = 0.0;
    for child in children {
        let w = child.probability / parent.probability;
        after_avg += w * child.state.pair_er(pair, config)?;
        s_after += w * child.state.subsystem_entropy(&[measured])?;
    }
    Ok(ErLedger {
        before,
        after_avg,
        entropy_drop: s_before - s_after,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReversibilityVerdict {
    /// Necessary conditions hold; reversibility is not thereby established.
    Consistent,
    Incompatible,
}

#[derive(Debug, Clone)]
pub struct ReversibilityReport {
    pub verdict: ReversibilityVerdict,
    /// Worst |S₁ − S₂| over all nonempty proper party subsets.
    pub worst_entropy_diff: f64,
    /// Worst |E_r,₁ − E_r,₂| over all party pairs.
    pub worst_er_diff: f64,
    /// (subset, S for the first state, S for the second).
    pub entropy_table: Vec<(Vec<usize>, f64, f64)>,
    /// (pair, E_r for the first state, E_r for the second).
    pub er_table: Vec<((usize, usize), f64, f64)>,
    pub tolerance: f64,
}

/// Checks the necessary conditions for reversible interconversion: identical
/// subsystem and cluster entropies and identical pairwise E_r, within
/// `tolerance` (5e-3 by default, reflecting solver precision). The verdict is
/// only ever a refutation; matching tables never certify convertibility.
pub fn reversibility_necessary_conditions(
    s1: &MultipartyState,
    s2: &MultipartyState,
    config: &ErConfig,
    tolerance: f64,
) -> Result<ReversibilityReport> {
    if s1.dims() != s2.dims() {
        return Err(LoccError::StructureMismatch(format!(
            "dims {:?} against {:?}",
            s1.dims(),
            s2.dims()
        )));
    }
    let p = s1.party_count();
    let mut entropy_table = Vec::new();
    let mut worst_entropy_diff = 0.0f64;
    // All nonempty proper subsets of parties.
    for mask in 1..((1usize << p) - 1) {
        let subset: Vec<usize> = (0..p).filter(|i| mask & (1 << i) != 0).collect();
        let a = s1.subsystem_entropy(&subset)?;
        let b = s2.subsystem_entropy(&subset)?;
        worst_entropy_diff = worst_entropy_diff.max((a - b).abs());
        entropy_table.push((subset, a, b));
    }

    let mut er_table = Vec::new();
    let mut worst_er_diff = 0.0f64;
    for i in 0..p {
        for j in (i + 1)..p {
            let a = s1.pair_er((i, j), config)?;
            let b = s2.pair_er((i, j), config)?;
            worst_er_diff = worst_er_diff.max((a - b).abs());
            er_table.push(((i, j), a, b));
        }
    }

    let verdict = if worst_entropy_diff > tolerance || worst_er_diff > tolerance {
        ReversibilityVerdict::Incompatible
    } else {
        ReversibilityVerdict::Consistent
    };
    Ok(ReversibilityReport {
        verdict,
        worst_entropy_diff,
        worst_er_diff,
        entropy_table,
        er_table,
        tolerance,
    })
}

/// The ± basis {(|0⟩+|1⟩)/√2, (|0⟩−|1⟩)/√2}.
pub fn plus_minus_basis() -> Vec<ComplexVector> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    alloc::vec![
        ComplexVector::from_real(&[h, h]),
        ComplexVector::from_real(&[h, -h]),
    ]
}

/// Computational basis of a given dimension.
pub fn computational_basis(dim: usize) -> Vec<ComplexVector> {
    (0..dim).map(|k| ComplexVector::basis_state(dim, k)).collect()
}
