//! Completely positive trace-preserving maps in Kraus form, their Stinespring
//! dilations, complementary (environment) outputs, products and composition,
//! a small standard-channel zoo, and a multi-start minimum-output-entropy
//! search.
//!
//! The Kraus list is the single source of truth; the dilation is derived with
//! environment dimension equal to the number of Kraus operators. Any dilation
//! serves, because the quantities built on the environment output (its
//! entropy, the Holevo quantity of environment ensembles) do not depend on
//! the choice.

use crate::opalg::{self, C64, ComplexMatrix, ComplexVector, tensor};
use crate::rng::SplitMix64;
use crate::states::{self, DensityOperator};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

/// ‖ΣK†K − I‖_max tolerance for trace preservation.
pub const TRACE_PRESERVING_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("Kraus operators do not preserve trace (defect {0:.3e})")]
    NotTracePreserving(f64),
    #[error("channel needs at least one Kraus operator")]
    EmptyKraus,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parameter {0} outside [0, 1]")]
    BadParameter(f64),
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error(transparent)]
    State(#[from] states::StateError),
    #[error(transparent)]
    Matrix(#[from] opalg::MatrixError),
}

pub type Result<T> = core::result::Result<T, ChannelError>;

/// Trace-preserving completely positive map in Kraus form.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(ChannelError::EmptyKraus)?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        if kraus
            .iter()
            .any(|k| k.rows() != out_dim || k.cols() != in_dim)
        {
            return Err(ChannelError::DimensionMismatch(
                "Kraus operators differ in shape".into(),
            ));
        }
        let mut gram = ComplexMatrix::zeros(in_dim, in_dim);
        for k in &kraus {
            gram = gram.add(&k.adjoint().mul(k));
        }
        let defect = gram.max_abs_diff(&ComplexMatrix::identity(in_dim));
        if defect > TRACE_PRESERVING_TOL {
            return Err(ChannelError::NotTracePreserving(defect));
        }
        Ok(Self {
            in_dim,
            out_dim,
            kraus,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Environment dimension of the derived dilation.
    pub fn env_dim(&self) -> usize {
        self.kraus.len()
    }

    /// ℰ(ρ) = Σ K_i ρ K_i†.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.in_dim {
            return Err(ChannelError::DimensionMismatch(format!(
                "input dim {} for channel expecting {}",
                rho.dim(),
                self.in_dim
            )));
        }
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out = out.add(&k.mul(rho.matrix()).mul(&k.adjoint()));
        }
        Ok(DensityOperator::new(out)?)
    }

    /// Action on a raw Hermitian matrix, without state validation.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out = out.add(&k.mul(m).mul(&k.adjoint()));
        }
        out
    }

    /// Stinespring isometry V|ψ⟩ = Σ_i (K_i|ψ⟩) ⊗ |i⟩ with the system factor
    /// first and the environment factor second.
    pub fn dilate(&self) -> DilatedChannel {
        let env = self.env_dim();
        let mut v = ComplexMatrix::zeros(self.out_dim * env, self.in_dim);
        for (e, k) in self.kraus.iter().enumerate() {
            for q in 0..self.out_dim {
                for j in 0..self.in_dim {
                    v[(q * env + e, j)] = k[(q, j)];
                }
            }
        }
        DilatedChannel {
            base: self.clone(),
            isometry: v,
        }
    }

    /// Complementary output Tr_Q V ρ V†.
    pub fn environment_output(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.in_dim {
            return Err(ChannelError::DimensionMismatch(format!(
                "input dim {} for channel expecting {}",
                rho.dim(),
                self.in_dim
            )));
        }
        // ρ^E_{ef} = Tr(K_e ρ K_f†), avoiding the full dilated matrix.
        let env = self.env_dim();
        let mut out = ComplexMatrix::zeros(env, env);
        let pre: Vec<ComplexMatrix> = self.kraus.iter().map(|k| k.mul(rho.matrix())).collect();
        for e in 0..env {
            for f in 0..env {
                out[(e, f)] = pre[e].trace_prod(&self.kraus[f].adjoint());
            }
        }
        Ok(DensityOperator::new(out)?)
    }

    /// Product channel a ⊗ b with Kraus set {K_i ⊗ L_j}.
    pub fn product(a: &QuantumChannel, b: &QuantumChannel) -> QuantumChannel {
        let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
        for ka in &a.kraus {
            for kb in &b.kraus {
                kraus.push(tensor(ka, kb));
            }
        }
        QuantumChannel {
            in_dim: a.in_dim * b.in_dim,
            out_dim: a.out_dim * b.out_dim,
            kraus,
        }
    }

    /// Composition `after ∘ self`: this channel first, then `after`.
    pub fn then(&self, after: &QuantumChannel) -> Result<QuantumChannel> {
        if after.in_dim != self.out_dim {
            return Err(ChannelError::DimensionMismatch(format!(
                "cannot compose: output dim {} feeds input dim {}",
                self.out_dim, after.in_dim
            )));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * after.kraus.len());
        for l in &after.kraus {
            for k in &self.kraus {
                kraus.push(l.mul(k));
            }
        }
        Ok(QuantumChannel {
            in_dim: self.in_dim,
            out_dim: after.out_dim,
            kraus,
        })
    }
}

/// A channel together with its Stinespring isometry.
#[derive(Debug, Clone)]
pub struct DilatedChannel {
    pub base: QuantumChannel,
    pub isometry: ComplexMatrix,
}

impl DilatedChannel {
    /// V ρ V† on the joint system ⊗ environment space.
    pub fn joint_output(&self, rho: &DensityOperator) -> ComplexMatrix {
        self.isometry.mul(rho.matrix()).mul(&self.isometry.adjoint())
    }

    /// Tr_E V ρ V†, which must agree with the base channel.
    pub fn main_output(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let joint = self.joint_output(rho);
        let m = opalg::partial_trace(&joint, &[self.base.out_dim, self.base.env_dim()], &[0])?;
        Ok(DensityOperator::new(m)?)
    }

    /// Tr_Q V ρ V†.
    pub fn env_output(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let joint = self.joint_output(rho);
        let m = opalg::partial_trace(&joint, &[self.base.out_dim, self.base.env_dim()], &[1])?;
        Ok(DensityOperator::new(m)?)
    }
}

/// The standard channel families used across tests and experiments.
#[derive(Debug, Clone)]
pub enum StandardKind {
    Identity,
    /// ρ → (1−p)ρ + p·I/d.
    Depolarizing(f64),
    /// ρ → (1−λ)ρ + λ·diag(ρ) in the computational basis.
    Dephasing(f64),
    /// Conjugation by a fixed unitary.
    Unitary(ComplexMatrix),
}

pub fn standard_channel(kind: &StandardKind, dim: usize) -> Result<QuantumChannel> {
    match kind {
        StandardKind::Identity => QuantumChannel::new(alloc::vec![ComplexMatrix::identity(dim)]),
        StandardKind::Depolarizing(p) => {
            if !(0.0..=1.0).contains(p) {
                return Err(ChannelError::BadParameter(*p));
            }
            let mut kraus = Vec::new();
            if *p < 1.0 {
                kraus.push(ComplexMatrix::identity(dim).scale_re(libm::sqrt(1.0 - p)));
            }
            if *p > 0.0 {
                let w = libm::sqrt(p / dim as f64);
                for i in 0..dim {
                    for j in 0..dim {
                        let mut k = ComplexMatrix::zeros(dim, dim);
                        k[(i, j)] = C64::new(w, 0.0);
                        kraus.push(k);
                    }
                }
            }
            QuantumChannel::new(kraus)
        }
        StandardKind::Dephasing(l) => {
            if !(0.0..=1.0).contains(l) {
                return Err(ChannelError::BadParameter(*l));
            }
            let mut kraus = Vec::new();
            if *l < 1.0 {
                kraus.push(ComplexMatrix::identity(dim).scale_re(libm::sqrt(1.0 - l)));
            }
            if *l > 0.0 {
                let w = libm::sqrt(*l);
                for i in 0..dim {
                    let mut k = ComplexMatrix::zeros(dim, dim);
                    k[(i, i)] = C64::new(w, 0.0);
                    kraus.push(k);
                }
            }
            QuantumChannel::new(kraus)
        }
        StandardKind::Unitary(u) => {
            if u.rows() != dim || u.cols() != dim {
                return Err(ChannelError::DimensionMismatch(format!(
                    "unitary is {}x{}, channel dim {}",
                    u.rows(),
                    u.cols(),
                    dim
                )));
            }
            let defect = u.adjoint().mul(u).max_abs_diff(&ComplexMatrix::identity(dim));
            if defect > 1e-9 {
                return Err(ChannelError::NotUnitary(defect));
            }
            QuantumChannel::new(alloc::vec![u.clone()])
        }
    }
}

/// Result of the minimum-output-entropy search.
#[derive(Debug, Clone)]
pub struct MinOutputEntropy {
    /// Best (lowest) output entropy found, in bits; an upper bound on the
    /// true minimum.
    pub bits: f64,
    /// Pure input achieving it.
    pub argmin: DensityOperator,
}

/// Multi-start projected gradient descent of S(ℰ(|ψ⟩⟨ψ|)) over pure inputs.
///
/// Heuristic: returns the best local minimum found across `restarts` seeded
/// starts, 200 iterations each with step halving.
pub fn min_output_entropy(ch: &QuantumChannel, restarts: usize, seed: u64) -> MinOutputEntropy {
    let d = ch.in_dim();
    let mut rng = SplitMix64::new(seed);
    let mut best_bits = f64::INFINITY;
    let mut best_input = ComplexVector::basis_state(d, 0);

    let out_entropy = |psi: &ComplexVector| -> f64 {
        let rho = psi.projector();
        let out = ch.apply_matrix(&rho);
        let spec = opalg::eigh(&out).expect("channel output is Hermitian");
        states::shannon_entropy(
            &spec
                .eigenvalues
                .iter()
                .map(|&x| x.max(0.0))
                .collect::<Vec<_>>(),
        )
    };

    // Entropy gradient through the channel: ∇_ψ̄ S = −ℰ*(log₂ ρ_out + I/ln 2)|ψ⟩,
    // with eigenvalues floored to keep the logarithm finite near pure outputs.
    let gradient = |psi: &ComplexVector| -> ComplexVector {
        let rho = psi.projector();
        let out = ch.apply_matrix(&rho);
        let spec = opalg::eigh(&out).expect("channel output is Hermitian");
        let inv_ln2 = 1.0 / core::f64::consts::LN_2;
        let weight = spec.apply_fn(|x| libm::log2(x.max(1e-18)) + inv_ln2);
        let mut back = ComplexMatrix::zeros(d, d);
        for k in ch.kraus() {
            back = back.add(&k.adjoint().mul(&weight).mul(k));
        }
        back.mul_vec(psi).scale(C64::new(-1.0, 0.0))
    };

    for r in 0..restarts.max(1) {
        let mut stream = rng.fork(r as u64);
        let mut psi = if r == 0 {
            ComplexVector::basis_state(d, 0)
        } else {
            crate::rng::random_pure_state(d, &mut stream)
        };
        let mut value = out_entropy(&psi);
        let mut step = 0.5;
        for _ in 0..200 {
            let g = gradient(&psi);
            // Tangent projection keeps the update on the unit sphere.
            let radial = psi.inner(&g);
            let tangent = g.sub(&psi.scale(radial));
            if tangent.norm() < 1e-12 {
                break;
            }
            let mut advanced = false;
            while step > 1e-12 {
                let cand = psi.add(&tangent.scale(C64::new(step, 0.0))).normalized();
                let cand_value = out_entropy(&cand);
                if cand_value < value - 1e-14 {
                    psi = cand;
                    value = cand_value;
                    step *= 1.5;
                    advanced = true;
                    break;
                }
                step *= 0.5;
            }
            if !advanced {
                break;
            }
        }
        if value < best_bits {
            best_bits = value;
            best_input = psi;
        }
    }

    MinOutputEntropy {
        bits: best_bits,
        argmin: DensityOperator::from_pure(&best_input).expect("pure input is valid"),
    }
}
