//! Density operators and the entropy / relative-entropy algebra on them:
//! validation, von Neumann entropy, relative entropy with support handling,
//! joint convexity, Donald's identity, purification, seeded random states.
//!
//! All entropies are in bits. Relative entropy is +∞ exactly when the first
//! argument carries more than `SUPPORT_TOL` weight outside the support of the
//! second; the infinity is an ordinary value that propagates through sums,
//! not an error.

use crate::opalg::{self, ComplexMatrix, ComplexVector, Spectrum, EIG_CLIP, HERMITIAN_TOL};
use crate::rng::SplitMix64;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

/// Weight of ρ outside supp σ above which D(ρ‖σ) is reported as +∞.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Unit-trace tolerance for state validation.
pub const TRACE_TOL: f64 = 1e-9;
/// Largest eigenvalue at or above 1 − PURITY_TOL marks a state as pure.
pub const PURITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.6e})")]
    NotPositive(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rank {rank} invalid for dimension {dim}")]
    BadRank { dim: usize, rank: usize },
    #[error("probabilities sum to {0}, expected 1")]
    BadProbabilities(f64),
    #[error("state is not pure (max eigenvalue {0})")]
    NotPure(f64),
    #[error(transparent)]
    Matrix(#[from] opalg::MatrixError),
}

pub type Result<T> = core::result::Result<T, StateError>;

/// Relative-entropy value in bits; +∞ is first-class and propagates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelEntValue(f64);

impl RelEntValue {
    pub const INFINITE: RelEntValue = RelEntValue(f64::INFINITY);

    pub fn finite(bits: f64) -> Self {
        // Tiny negative drift is numerical noise around D = 0.
        RelEntValue(if bits < 0.0 { bits.max(-1e-9).max(0.0) } else { bits })
    }

    pub fn bits(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl core::fmt::Display for RelEntValue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.0.is_finite() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "inf")
        }
    }
}

/// Positive unit-trace Hermitian matrix with cached spectrum.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    dim: usize,
    matrix: ComplexMatrix,
    spectrum: Spectrum,
}

impl DensityOperator {
    /// Validates and wraps a candidate density matrix, caching its spectrum.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(StateError::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(StateError::TraceNotOne(tr.re));
        }
        let mut spectrum = opalg::eigh(&matrix)?;
        let min = spectrum.min_eigenvalue();
        if min < -EIG_CLIP {
            return Err(StateError::NotPositive(min));
        }
        for lambda in spectrum.eigenvalues.iter_mut() {
            if *lambda < 0.0 {
                *lambda = 0.0;
            }
        }
        Ok(Self {
            dim: matrix.rows(),
            matrix,
            spectrum,
        })
    }

    /// |ψ⟩⟨ψ| for a normalized vector.
    pub fn from_pure(psi: &ComplexVector) -> Result<Self> {
        Self::new(psi.normalized().projector())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64))
            .expect("maximally mixed state is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Cached eigensystem; eigenvalues ascending and clipped to [0, 1].
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn is_pure(&self) -> bool {
        self.spectrum.max_eigenvalue() >= 1.0 - PURITY_TOL
    }

    /// Dominant eigenvector; the state vector when `is_pure`.
    pub fn dominant_eigenvector(&self) -> ComplexVector {
        self.spectrum.eigenvectors.column(self.dim - 1)
    }

    /// Convex mixture (1−w)·self + w·other.
    pub fn mix(&self, other: &DensityOperator, w: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(StateError::DimensionMismatch(format!(
                "mix of dims {} and {}",
                self.dim, other.dim
            )));
        }
        Self::new(
            self.matrix
                .scale_re(1.0 - w)
                .add(&other.matrix.scale_re(w)),
        )
    }
}

/// Probabilities paired with density operators on a shared space.
#[derive(Debug, Clone)]
pub struct WeightedStates {
    probs: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl WeightedStates {
    pub fn new(probs: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if probs.len() != states.len() {
            return Err(StateError::DimensionMismatch(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL || probs.iter().any(|&p| p < 0.0) {
            return Err(StateError::BadProbabilities(total));
        }
        if let Some(first) = states.first() {
            let dim = first.dim();
            if states.iter().any(|s| s.dim() != dim) {
                return Err(StateError::DimensionMismatch(
                    "ensemble states differ in dimension".into(),
                ));
            }
        }
        Ok(Self { probs, states })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.dim())
    }

    /// Ensemble average Σ p_k ρ_k.
    pub fn mean(&self) -> DensityOperator {
        let dim = self.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (p, s) in self.probs.iter().zip(&self.states) {
            acc = acc.add(&s.matrix().scale_re(*p));
        }
        DensityOperator::new(acc).expect("mixture of valid states is valid")
    }

    /// Pure-state decomposition of ρ obtained by mixing its eigenvectors
    /// through the rows of a unitary: |w_j⟩ ∝ Σ_i U_ji √λ_i |v_i⟩.
    ///
    /// Every unitary yields a decomposition with the same average ρ; the
    /// identity recovers the eigendecomposition.
    pub fn pure_decomposition(rho: &DensityOperator, mixing: &ComplexMatrix) -> Result<Self> {
        let d = rho.dim();
        if mixing.rows() < d || mixing.cols() < d {
            return Err(StateError::DimensionMismatch(format!(
                "mixing unitary {}x{} too small for dim {}",
                mixing.rows(),
                mixing.cols(),
                d
            )));
        }
        let spec = rho.spectrum();
        let mut probs = Vec::new();
        let mut states = Vec::new();
        for j in 0..mixing.rows() {
            let mut w = ComplexVector::zeros(d);
            for i in 0..d {
                let root = libm::sqrt(spec.eigenvalues[i].max(0.0));
                if root == 0.0 {
                    continue;
                }
                let coeff = mixing[(j, i)] * root;
                let col = spec.eigenvectors.column(i);
                w = w.add(&col.scale(coeff));
            }
            let p = w.norm_sqr();
            if p < 1e-14 {
                continue;
            }
            probs.push(p);
            states.push(DensityOperator::from_pure(&w.normalized())?);
        }
        // Row-unitarity makes the probabilities sum to one up to rounding.
        let total: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= total;
        }
        Self::new(probs, states)
    }

    /// The eigendecomposition of ρ as a pure-state ensemble.
    pub fn eigen_decomposition(rho: &DensityOperator) -> Result<Self> {
        Self::pure_decomposition(rho, &ComplexMatrix::identity(rho.dim()))
    }
}

/// Shannon entropy of a nonnegative sequence in bits, with 0·log 0 = 0.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * libm::log2(p))
        .sum()
}

/// Von Neumann entropy S(ρ) = −Tr ρ log₂ ρ in bits.
pub fn entropy(rho: &DensityOperator) -> f64 {
    shannon_entropy(rho.eigenvalues())
}

/// Quantum relative entropy D(ρ‖σ) = Tr ρ log₂ ρ − Tr ρ log₂ σ.
///
/// Evaluated in the two eigenbases. Returns +∞ exactly when ρ places more
/// than `SUPPORT_TOL` weight on the kernel of σ.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<RelEntValue> {
    if rho.dim() != sigma.dim() {
        return Err(StateError::DimensionMismatch(format!(
            "relative entropy of dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let d = rho.dim();
    let rspec = rho.spectrum();
    let sspec = sigma.spectrum();

    // Overlap weights |⟨v_i|w_j⟩|² between the two eigenbases.
    let cross = rspec.eigenvectors.adjoint().mul(&sspec.eigenvectors);

    let mut kernel_mass = 0.0;
    let mut cross_term = 0.0;
    for j in 0..d {
        let mu = sspec.eigenvalues[j];
        if mu <= EIG_CLIP {
            for i in 0..d {
                kernel_mass += rspec.eigenvalues[i] * cross[(i, j)].norm_sqr();
            }
        } else {
            let log_mu = libm::log2(mu);
            for i in 0..d {
                let li = rspec.eigenvalues[i];
                if li > 0.0 {
                    cross_term += li * cross[(i, j)].norm_sqr() * log_mu;
                }
            }
        }
    }
    if kernel_mass > SUPPORT_TOL {
        return Ok(RelEntValue::INFINITE);
    }
    let self_term: f64 = rho
        .eigenvalues()
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l * libm::log2(l))
        .sum();
    Ok(RelEntValue::finite(self_term - cross_term))
}

/// Checks joint convexity of D on a pair of argument pairs at mixing
/// probability p, within 1e-8.
pub fn joint_convexity_check(
    pair1: (&DensityOperator, &DensityOperator),
    pair2: (&DensityOperator, &DensityOperator),
    p: f64,
) -> Result<bool> {
    let mixed_rho = pair2.0.mix(pair1.0, p)?;
    let mixed_sigma = pair2.1.mix(pair1.1, p)?;
    let lhs = relative_entropy(&mixed_rho, &mixed_sigma)?;
    let d1 = relative_entropy(pair1.0, pair1.1)?;
    let d2 = relative_entropy(pair2.0, pair2.1)?;
    let rhs = p * d1.bits() + (1.0 - p) * d2.bits();
    if !rhs.is_finite() {
        return Ok(true);
    }
    Ok(lhs.bits() <= rhs + 1e-8)
}

/// The three pieces of Donald's identity
/// Σ p_k D(ρ_k‖σ) = Σ p_k D(ρ_k‖ρ̄) + D(ρ̄‖σ).
#[derive(Debug, Clone, Copy)]
pub struct DonaldDecomposition {
    /// Σ p_k D(ρ_k‖σ); infinite when any support condition fails.
    pub lhs: RelEntValue,
    /// Σ p_k D(ρ_k‖ρ̄); always finite.
    pub avg_to_mean: f64,
    /// D(ρ̄‖σ).
    pub mean_to_sigma: RelEntValue,
}

/// Evaluates both sides of Donald's identity for an ensemble and a reference
/// state. A support violation shows up as an infinite left side, not a fault.
pub fn donald_decompose(
    ens: &WeightedStates,
    sigma: &DensityOperator,
) -> Result<DonaldDecomposition> {
    let mean = ens.mean();
    let mut lhs = 0.0f64;
    let mut avg_to_mean = 0.0f64;
    for (p, state) in ens.probs().iter().zip(ens.states()) {
        if *p == 0.0 {
            continue;
        }
        lhs += p * relative_entropy(state, sigma)?.bits();
        avg_to_mean += p * relative_entropy(state, &mean)?.bits();
    }
    Ok(DonaldDecomposition {
        lhs: RelEntValue::finite(lhs),
        avg_to_mean,
        mean_to_sigma: relative_entropy(&mean, sigma)?,
    })
}

/// Purification Σ √λ_i |v_i⟩ ⊗ |i⟩ of ρ on H ⊗ H; tracing out the second
/// (ancilla) factor recovers ρ.
pub fn purify(rho: &DensityOperator) -> ComplexVector {
    let d = rho.dim();
    let spec = rho.spectrum();
    let mut out = ComplexVector::zeros(d * d);
    for i in 0..d {
        let root = libm::sqrt(spec.eigenvalues[i].max(0.0));
        if root == 0.0 {
            continue;
        }
        for r in 0..d {
            out[r * d + i] = spec.eigenvectors[(r, i)] * root;
        }
    }
    out
}

/// Reproducible random state of exact rank `rank` on dimension `dim`.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    if rank == 0 || rank > dim {
        return Err(StateError::BadRank { dim, rank });
    }
    let mut rng = SplitMix64::new(seed);
    DensityOperator::new(crate::rng::random_density_matrix(dim, rank, &mut rng))
}

/// Random state drawn from an existing stream.
pub fn random_density_from(dim: usize, rank: usize, rng: &mut SplitMix64) -> DensityOperator {
    DensityOperator::new(crate::rng::random_density_matrix(dim, rank, rng))
        .expect("generated state is valid")
}
