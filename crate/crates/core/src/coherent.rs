//! Coherent information and entanglement transmission: entanglement fidelity,
//! average fidelity, I^Q = S(ρ^Q) − S(ρ^{RQ}) with its environment form, the
//! identity I^Q = χ^Q − χ^E over pure input decompositions, maximization of
//! I^Q over inputs with a distance-difference certificate, and the quantum
//! data-processing check.
//!
//! A transmission setup fixes a channel together with an input state and a
//! purifying reference system R (held first in the RQ ordering). Both F_e and
//! I^Q come out independent of which purification is chosen; tests exercise
//! that invariance explicitly.

use crate::capacity::{holevo_chi, SignalEnsemble};
use crate::channels::{self, QuantumChannel};
use crate::opalg::{self, C64, ComplexMatrix, ComplexVector};
use crate::rng::SplitMix64;
use crate::states::{self, entropy, relative_entropy, DensityOperator, WeightedStates};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoherentError {
    #[error("state is not pure (max eigenvalue {0})")]
    NotPure(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    State(#[from] states::StateError),
    #[error(transparent)]
    Matrix(#[from] opalg::MatrixError),
    #[error(transparent)]
    Channel(#[from] channels::ChannelError),
}

pub type Result<T> = core::result::Result<T, CoherentError>;

/// Channel, input state, and a purifying reference: the joint system RQ
/// starts in the pure state `reference` with Tr_R |Ψ⟩⟨Ψ| = input.
#[derive(Debug, Clone)]
pub struct TransmissionSetup {
    channel: QuantumChannel,
    input: DensityOperator,
    reference: ComplexVector,
}

impl TransmissionSetup {
    /// Canonical purification Σ √λ_i |i^R⟩|v_i^Q⟩.
    pub fn new(channel: QuantumChannel, input: DensityOperator) -> Result<Self> {
        if input.dim() != channel.in_dim() {
            return Err(CoherentError::DimensionMismatch(format!(
                "input dim {} for channel expecting {}",
                input.dim(),
                channel.in_dim()
            )));
        }
        let d = input.dim();
        let spec = input.spectrum();
        let mut reference = ComplexVector::zeros(d * d);
        for i in 0..d {
            let root = libm::sqrt(spec.eigenvalues[i].max(0.0));
            if root == 0.0 {
                continue;
            }
            for q in 0..d {
                // R index i, Q index q.
                reference[i * d + q] = spec.eigenvectors[(q, i)] * root;
            }
        }
        Ok(Self {
            channel,
            input,
            reference,
        })
    }

    /// Same input, alternative purification (U_R ⊗ I)|Ψ⟩.
    pub fn rotated_reference(&self, u_r: &ComplexMatrix) -> Result<Self> {
        let d = self.input.dim();
        if u_r.rows() != d || u_r.cols() != d {
            return Err(CoherentError::DimensionMismatch(format!(
                "reference rotation is {}x{} for dim {}",
                u_r.rows(),
                u_r.cols(),
                d
            )));
        }
        let big = opalg::tensor(u_r, &ComplexMatrix::identity(d));
        Ok(Self {
            channel: self.channel.clone(),
            input: self.input.clone(),
            reference: big.mul_vec(&self.reference),
        })
    }

    pub fn channel(&self) -> &QuantumChannel {
        &self.channel
    }

    pub fn input(&self) -> &DensityOperator {
        &self.input
    }

    pub fn reference(&self) -> &ComplexVector {
        &self.reference
    }

    /// ρ^{RQ} = (I ⊗ ℰ)(|Ψ⟩⟨Ψ|).
    pub fn joint_output(&self) -> Result<ComplexMatrix> {
        let d = self.input.dim();
        let out_dim = self.channel.out_dim();
        let mut rho = ComplexMatrix::zeros(d * out_dim, d * out_dim);
        let identity = ComplexMatrix::identity(d);
        for k in self.channel.kraus() {
            let ext = opalg::tensor(&identity, k);
            let phi = ext.mul_vec(&self.reference);
            rho = rho.add(&phi.projector());
        }
        Ok(rho)
    }
}

/// F_e = ⟨Ψ|ρ^{RQ}|Ψ⟩: how well the channel preserves entanglement with the
/// reference. Depends only on the channel and the input state.
pub fn entanglement_fidelity(setup: &TransmissionSetup) -> Result<f64> {
    let rho_rq = setup.joint_output()?;
    let f = rho_rq.quad_form(setup.reference()).re;
    Ok(f.clamp(0.0, 1.0))
}

/// F̄ = Σ p_k ⟨φ_k|ℰ(|φ_k⟩⟨φ_k|)|φ_k⟩ for a pure-state input ensemble.
pub fn average_fidelity(ens: &WeightedStates, ch: &QuantumChannel) -> Result<f64> {
    let mut total = 0.0;
    for (p, rho) in ens.probs().iter().zip(ens.states()) {
        if !rho.is_pure() {
            return Err(CoherentError::NotPure(rho.spectrum().max_eigenvalue()));
        }
        let psi = rho.dominant_eigenvector();
        let out = ch.apply(rho)?;
        total += p * out.matrix().quad_form(&psi).re.clamp(0.0, 1.0);
    }
    Ok(total)
}

/// I^Q = S(ρ^Q) − S(ρ^{RQ}).
pub fn coherent_information(setup: &TransmissionSetup) -> Result<f64> {
    let out = setup.channel.apply(&setup.input)?;
    let rho_rq = setup.joint_output()?;
    let joint = DensityOperator::new(rho_rq)?;
    Ok(entropy(&out) - entropy(&joint))
}

/// I^Q in its complementary form S(ρ^Q) − S(ρ^E); agrees with the RQ form
/// because RQE stays pure under the dilated evolution.
pub fn coherent_information_env_form(
    ch: &QuantumChannel,
    input: &DensityOperator,
) -> Result<f64> {
    let out = ch.apply(input)?;
    let env = ch.environment_output(input)?;
    Ok(entropy(&out) - entropy(&env))
}

/// The pieces of the identity I^Q = χ^Q − χ^E for a pure-state decomposition
/// of the channel input.
#[derive(Debug, Clone, Copy)]
pub struct ChiDifference {
    pub iq: f64,
    pub chi_q: f64,
    pub chi_e: f64,
}

/// Evaluates χ of the output ensemble and of the environment-output ensemble
/// for a pure-state input decomposition. Their difference equals the coherent
/// information of the average input and is decomposition-independent, even
/// though χ^Q and χ^E separately are not.
pub fn chi_difference_identity(
    ens: &WeightedStates,
    ch: &QuantumChannel,
) -> Result<ChiDifference> {
    let mut outputs = Vec::with_capacity(ens.len());
    let mut env_outputs = Vec::with_capacity(ens.len());
    for rho in ens.states() {
        if !rho.is_pure() {
            return Err(CoherentError::NotPure(rho.spectrum().max_eigenvalue()));
        }
        outputs.push(ch.apply(rho)?);
        env_outputs.push(ch.environment_output(rho)?);
    }
    let probs = ens.probs().to_vec();
    let chi_q = holevo_chi(&SignalEnsemble::new(probs.clone(), outputs).map_err(boxed_cap)?);
    let chi_e = holevo_chi(&SignalEnsemble::new(probs, env_outputs).map_err(boxed_cap)?);

    let setup = TransmissionSetup::new(ch.clone(), ens.mean())?;
    let iq = coherent_information(&setup)?;
    Ok(ChiDifference { iq, chi_q, chi_e })
}

fn boxed_cap(e: crate::capacity::CapacityError) -> CoherentError {
    CoherentError::DimensionMismatch(format!("{e}"))
}

/// Certificate for a claimed maximizer of I^Q: over pure probes ω in the
/// support of the argmax, D(ω^Q‖ρ^Q) − D(ω^E‖ρ^E) never exceeds the maximum,
/// and support members sit at it (the equal-distance analogue).
#[derive(Debug, Clone)]
pub struct DistDiffCertificate {
    pub iq_max: f64,
    /// max over probes of (difference − iq_max).
    pub max_violation: f64,
    /// max over support eigenvectors of |difference − iq_max|.
    pub support_spread: f64,
    /// Probes dropped because one of the two distances was infinite.
    pub skipped_probes: usize,
    pub probe_count: usize,
}

#[derive(Debug, Clone)]
pub struct CoherentMaxConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Central finite-difference step on the factor parameters.
    pub fd_step: f64,
    /// Certificate probes beyond the argmax eigenbasis.
    pub certificate_probes: usize,
    /// Equality tolerance in the certificate.
    pub certificate_tol: f64,
    pub seed: u64,
}

impl Default for CoherentMaxConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 300,
            fd_step: 1e-5,
            certificate_probes: 200,
            certificate_tol: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoherentMaxResult {
    pub iq_max: f64,
    pub argmax: DensityOperator,
    pub certificate: DistDiffCertificate,
    pub converged: bool,
}

/// Multi-start ascent of I^Q over input density operators, parameterized by
/// a square-root factor ρ = AA†/Tr(AA†) with central finite-difference
/// gradients and step halving. Returns the best input found with its
/// distance-difference certificate.
pub fn maximize_coherent_information(
    ch: &QuantumChannel,
    config: &CoherentMaxConfig,
) -> Result<CoherentMaxResult> {
    let d = ch.in_dim();
    let n_params = 2 * d * d;
    let mut rng = SplitMix64::new(config.seed);

    let assemble = |params: &[f64]| -> DensityOperator {
        let a = ComplexMatrix::from_fn(d, d, |i, j| {
            let k = 2 * (i * d + j);
            C64::new(params[k], params[k + 1])
        });
        let w = a.mul(&a.adjoint());
        let tr = w.trace().re;
        if tr <= 1e-300 {
            return DensityOperator::maximally_mixed(d);
        }
        DensityOperator::new(w.scale_re(1.0 / tr)).unwrap_or_else(|_| {
            DensityOperator::maximally_mixed(d)
        })
    };
    let objective = |params: &[f64]| -> f64 {
        coherent_information_env_form(ch, &assemble(params)).unwrap_or(f64::NEG_INFINITY)
    };

    let mut best_value = f64::NEG_INFINITY;
    let mut best_params: Vec<f64> = Vec::new();
    let mut converged = false;

    for r in 0..config.restarts.max(1) {
        let mut stream = rng.fork(r as u64);
        let mut params: Vec<f64> = if r == 0 {
            // Maximally mixed start: A = I.
            let mut p = alloc::vec![0.0; n_params];
            for i in 0..d {
                p[2 * (i * d + i)] = 1.0;
            }
            p
        } else {
            (0..n_params).map(|_| stream.next_gaussian()).collect()
        };
        let mut value = objective(&params);
        let mut step = 0.1;
        let mut iters_without_gain = 0;
        for _ in 0..config.max_iters {
            // Central finite differences.
            let mut grad = alloc::vec![0.0; n_params];
            for k in 0..n_params {
                let saved = params[k];
                params[k] = saved + config.fd_step;
                let plus = objective(&params);
                params[k] = saved - config.fd_step;
                let minus = objective(&params);
                params[k] = saved;
                grad[k] = (plus - minus) / (2.0 * config.fd_step);
            }
            let norm: f64 = libm::sqrt(grad.iter().map(|g| g * g).sum());
            if norm < 1e-12 {
                break;
            }
            let mut advanced = false;
            while step > 1e-12 {
                let cand: Vec<f64> = params
                    .iter()
                    .zip(&grad)
                    .map(|(p, g)| p + step * g / norm)
                    .collect();
                let cand_value = objective(&cand);
                if cand_value > value + 1e-14 {
                    params = cand;
                    value = cand_value;
                    step *= 1.5;
                    advanced = true;
                    break;
                }
                step *= 0.5;
            }
            if !advanced {
                iters_without_gain += 1;
                if iters_without_gain > 3 {
                    converged = true;
                    break;
                }
                step = 0.1;
            } else {
                iters_without_gain = 0;
            }
        }
        if value > best_value {
            best_value = value;
            best_params = params;
        }
    }

    let argmax = assemble(&best_params);
    let certificate = certify_distance_difference(ch, &argmax, best_value, config)?;
    Ok(CoherentMaxResult {
        iq_max: best_value,
        argmax,
        certificate,
        converged,
    })
}

/// Builds the distance-difference certificate for a claimed maximizer.
pub fn certify_distance_difference(
    ch: &QuantumChannel,
    argmax: &DensityOperator,
    iq_max: f64,
    config: &CoherentMaxConfig,
) -> Result<DistDiffCertificate> {
    let d = argmax.dim();
    let rho_q = ch.apply(argmax)?;
    let rho_e = ch.environment_output(argmax)?;
    let spec = argmax.spectrum();

    // Support basis: eigenvectors with non-negligible weight.
    let support: Vec<(usize, ComplexVector)> = (0..d)
        .filter(|&i| spec.eigenvalues[i] > 1e-9)
        .map(|i| (i, spec.eigenvectors.column(i)))
        .collect();

    let difference = |psi: &ComplexVector| -> Result<Option<f64>> {
        let probe = DensityOperator::from_pure(psi)?;
        let dq = relative_entropy(&ch.apply(&probe)?, &rho_q)?;
        let de = relative_entropy(&ch.environment_output(&probe)?, &rho_e)?;
        if !dq.is_finite() || !de.is_finite() {
            return Ok(None);
        }
        Ok(Some(dq.bits() - de.bits()))
    };

    let mut max_violation = f64::NEG_INFINITY;
    let mut support_spread = 0.0f64;
    let mut skipped = 0;
    let mut count = 0;

    for (_, v) in &support {
        count += 1;
        match difference(v)? {
            Some(diff) => {
                max_violation = max_violation.max(diff - iq_max);
                support_spread = support_spread.max((diff - iq_max).abs());
            }
            None => skipped += 1,
        }
    }

    // Random pure states inside the support span.
    let mut rng = SplitMix64::new(config.seed ^ 0xd15d);
    for _ in 0..config.certificate_probes {
        if support.is_empty() {
            break;
        }
        let mut psi = ComplexVector::zeros(d);
        for (_, v) in &support {
            psi = psi.add(&v.scale(rng.next_c64_gaussian()));
        }
        if psi.norm() < 1e-9 {
            continue;
        }
        let psi = psi.normalized();
        count += 1;
        match difference(&psi)? {
            Some(diff) => max_violation = max_violation.max(diff - iq_max),
            None => skipped += 1,
        }
    }

    Ok(DistDiffCertificate {
        iq_max,
        max_violation: if max_violation == f64::NEG_INFINITY {
            0.0
        } else {
            max_violation
        },
        support_spread,
        skipped_probes: skipped,
        probe_count: count,
    })
}

/// True iff post-processing by a second channel does not increase the
/// coherent information: I^Q(ch2 ∘ ch1, ρ) ≤ I^Q(ch1, ρ) + 1e-8.
pub fn data_processing_check(
    ch1: &QuantumChannel,
    ch2: &QuantumChannel,
    input: &DensityOperator,
) -> Result<bool> {
    let composed = ch1.then(ch2)?;
    let before = coherent_information_env_form(ch1, input)?;
    let after = coherent_information_env_form(&composed, input)?;
    Ok(after <= before + 1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{standard_channel, StandardKind};
    use crate::rng::random_unitary;
    use crate::states::random_density_from;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |i, j| {
            if i != j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    fn zoo() -> Vec<QuantumChannel> {
        alloc::vec![
            standard_channel(&StandardKind::Identity, 2).unwrap(),
            standard_channel(&StandardKind::Depolarizing(0.5), 2).unwrap(),
            standard_channel(&StandardKind::Dephasing(0.5), 2).unwrap(),
            standard_channel(&StandardKind::Unitary(pauli_x()), 2).unwrap(),
        ]
    }

    #[test]
    fn entanglement_fidelity_identity_channel() {
        let ch = standard_channel(&StandardKind::Identity, 2).unwrap();
        let setup = TransmissionSetup::new(ch, DensityOperator::maximally_mixed(2)).unwrap();
        assert!((entanglement_fidelity(&setup).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entanglement_fidelity_fully_depolarizing_is_quarter() {
        let ch = standard_channel(&StandardKind::Depolarizing(1.0), 2).unwrap();
        let setup = TransmissionSetup::new(ch, DensityOperator::maximally_mixed(2)).unwrap();
        assert!((entanglement_fidelity(&setup).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn entanglement_fidelity_bit_flip_is_zero() {
        let ch = standard_channel(&StandardKind::Unitary(pauli_x()), 2).unwrap();
        let setup = TransmissionSetup::new(ch, DensityOperator::maximally_mixed(2)).unwrap();
        assert!(entanglement_fidelity(&setup).unwrap() < 1e-12);
    }

    #[test]
    fn entanglement_fidelity_purification_invariance() {
        let mut rng = SplitMix64::new(3);
        for ch in zoo() {
            let rho = random_density_from(2, 2, &mut rng);
            let setup = TransmissionSetup::new(ch, rho).unwrap();
            let u = random_unitary(2, &mut rng);
            let rotated = setup.rotated_reference(&u).unwrap();
            let f1 = entanglement_fidelity(&setup).unwrap();
            let f2 = entanglement_fidelity(&rotated).unwrap();
            assert!((f1 - f2).abs() < 1e-9, "F_e depends on purification");
            let i1 = coherent_information(&setup).unwrap();
            let i2 = coherent_information(&rotated).unwrap();
            assert!((i1 - i2).abs() < 1e-9, "I^Q depends on purification");
        }
    }

    #[test]
    fn average_fidelity_known_channels() {
        let basis = WeightedStates::new(
            alloc::vec![0.5, 0.5],
            alloc::vec![
                DensityOperator::from_pure(&ComplexVector::basis_state(2, 0)).unwrap(),
                DensityOperator::from_pure(&ComplexVector::basis_state(2, 1)).unwrap(),
            ],
        )
        .unwrap();

        let id = standard_channel(&StandardKind::Identity, 2).unwrap();
        assert!((average_fidelity(&basis, &id).unwrap() - 1.0).abs() < 1e-12);

        let dep = standard_channel(&StandardKind::Depolarizing(1.0), 2).unwrap();
        assert!((average_fidelity(&basis, &dep).unwrap() - 0.5).abs() < 1e-12);

        let deph = standard_channel(&StandardKind::Dephasing(1.0), 2).unwrap();
        assert!((average_fidelity(&basis, &deph).unwrap() - 1.0).abs() < 1e-12);

        // Mixed states are rejected.
        let mixed = WeightedStates::new(
            alloc::vec![1.0],
            alloc::vec![DensityOperator::maximally_mixed(2)],
        )
        .unwrap();
        assert!(matches!(
            average_fidelity(&mixed, &id),
            Err(CoherentError::NotPure(_))
        ));
    }

    #[test]
    fn coherent_information_known_values() {
        let id = standard_channel(&StandardKind::Identity, 2).unwrap();
        let setup = TransmissionSetup::new(id, DensityOperator::maximally_mixed(2)).unwrap();
        assert!((coherent_information(&setup).unwrap() - 1.0).abs() < 1e-10);

        let dep = standard_channel(&StandardKind::Depolarizing(1.0), 2).unwrap();
        let setup = TransmissionSetup::new(dep, DensityOperator::maximally_mixed(2)).unwrap();
        assert!((coherent_information(&setup).unwrap() + 1.0).abs() < 1e-10);

        // Pure input: S(ρ^Q) = S(ρ^E), so I^Q = 0.
        let deph = standard_channel(&StandardKind::Dephasing(0.7), 2).unwrap();
        let plus = DensityOperator::from_pure(&ComplexVector::from_real(&[1.0, 1.0])).unwrap();
        let setup = TransmissionSetup::new(deph, plus).unwrap();
        assert!(coherent_information(&setup).unwrap().abs() < 1e-9);
    }

    #[test]
    fn rq_and_env_forms_agree() {
        let mut rng = SplitMix64::new(5);
        for ch in zoo() {
            for _ in 0..10 {
                let rho = random_density_from(2, 2, &mut rng);
                let setup = TransmissionSetup::new(ch.clone(), rho.clone()).unwrap();
                let a = coherent_information(&setup).unwrap();
                let b = coherent_information_env_form(&ch, &rho).unwrap();
                assert!((a - b).abs() < 1e-8, "RQ form {a} vs env form {b}");
            }
        }
    }

    #[test]
    fn chi_difference_identity_on_identity_channel() {
        let ch = standard_channel(&StandardKind::Identity, 2).unwrap();
        let rho = DensityOperator::maximally_mixed(2);
        let ens = WeightedStates::eigen_decomposition(&rho).unwrap();
        let r = chi_difference_identity(&ens, &ch).unwrap();
        assert!(r.chi_e.abs() < 1e-10, "identity channel leaks nothing");
        assert!((r.iq - r.chi_q).abs() < 1e-8);
    }

    #[test]
    fn chi_difference_is_decomposition_independent() {
        let deph = standard_channel(&StandardKind::Dephasing(0.5), 2).unwrap();
        let rho = DensityOperator::maximally_mixed(2);
        // Basis {0,1} vs basis {+,−} decompositions of I/2.
        let eig = WeightedStates::eigen_decomposition(&rho).unwrap();
        let h = 1.0 / libm::sqrt(2.0);
        let hadamard = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == 1 && j == 1 {
                C64::new(-h, 0.0)
            } else {
                C64::new(h, 0.0)
            }
        });
        let rotated = WeightedStates::pure_decomposition(&rho, &hadamard).unwrap();

        let a = chi_difference_identity(&eig, &deph).unwrap();
        let b = chi_difference_identity(&rotated, &deph).unwrap();
        assert!(
            ((a.chi_q - a.chi_e) - (b.chi_q - b.chi_e)).abs() < 1e-8,
            "difference not invariant: {} vs {}",
            a.chi_q - a.chi_e,
            b.chi_q - b.chi_e
        );
        // The individual χ values do differ between these decompositions.
        assert!((a.chi_q - b.chi_q).abs() > 1e-3);
    }

    #[test]
    fn chi_difference_identity_holds_across_zoo_and_decompositions() {
        let mut rng = SplitMix64::new(7);
        for ch in zoo() {
            for _ in 0..5 {
                let rho = random_density_from(2, 2, &mut rng);
                for trial in 0..2 {
                    let ens = if trial == 0 {
                        WeightedStates::eigen_decomposition(&rho).unwrap()
                    } else {
                        let u = random_unitary(3, &mut rng);
                        WeightedStates::pure_decomposition(&rho, &u).unwrap()
                    };
                    let r = chi_difference_identity(&ens, &ch).unwrap();
                    assert!(
                        (r.iq - (r.chi_q - r.chi_e)).abs() < 1e-8,
                        "identity residual {}",
                        (r.iq - (r.chi_q - r.chi_e)).abs()
                    );
                }
            }
        }
    }

    #[test]
    fn maximize_identity_channel_reaches_one_bit() {
        let ch = standard_channel(&StandardKind::Identity, 2).unwrap();
        let config = CoherentMaxConfig {
            restarts: 6,
            ..CoherentMaxConfig::default()
        };
        let r = maximize_coherent_information(&ch, &config).unwrap();
        assert!((r.iq_max - 1.0).abs() < 1e-6, "iq {}", r.iq_max);
        assert!(
            r.argmax
                .matrix()
                .max_abs_diff(DensityOperator::maximally_mixed(2).matrix())
                < 1e-3
        );
        assert!(r.certificate.max_violation < 1e-4);
    }

    #[test]
    fn maximize_unitary_channel_reaches_log_d() {
        let ch = standard_channel(&StandardKind::Unitary(pauli_x()), 2).unwrap();
        let config = CoherentMaxConfig {
            restarts: 6,
            ..CoherentMaxConfig::default()
        };
        let r = maximize_coherent_information(&ch, &config).unwrap();
        assert!((r.iq_max - 1.0).abs() < 1e-6, "iq {}", r.iq_max);
    }

    #[test]
    fn maximize_dephasing_matches_diagonal_scan() {
        let ch = standard_channel(&StandardKind::Dephasing(0.5), 2).unwrap();
        let r = maximize_coherent_information(&ch, &CoherentMaxConfig::default()).unwrap();

        // Brute-force scan over diagonal inputs diag(q, 1−q).
        let mut best = f64::NEG_INFINITY;
        for k in 0..=1000 {
            let q = k as f64 / 1000.0;
            let rho = DensityOperator::new(ComplexMatrix::diag(&[q, 1.0 - q])).unwrap();
            best = best.max(coherent_information_env_form(&ch, &rho).unwrap());
        }
        assert!(
            (r.iq_max - best).abs() < 1e-4,
            "optimizer {} vs scan {}",
            r.iq_max,
            best
        );
        assert!(r.certificate.max_violation < 1e-3);
        assert!(r.certificate.support_spread < 1e-3);
    }

    #[test]
    fn data_processing_identity_is_equality() {
        let mut rng = SplitMix64::new(9);
        let ch = standard_channel(&StandardKind::Dephasing(0.3), 2).unwrap();
        let id = standard_channel(&StandardKind::Identity, 2).unwrap();
        let rho = random_density_from(2, 2, &mut rng);
        let before = coherent_information_env_form(&ch, &rho).unwrap();
        let after = coherent_information_env_form(&ch.then(&id).unwrap(), &rho).unwrap();
        assert!((before - after).abs() < 1e-10);
        assert!(data_processing_check(&ch, &id, &rho).unwrap());
    }

    #[test]
    fn data_processing_never_increases_iq() {
        let mut rng = SplitMix64::new(11);
        let mut cases = 0;
        for ch1 in zoo() {
            for ch2 in zoo() {
                for _ in 0..13 {
                    let rho = random_density_from(2, 2, &mut rng);
                    assert!(
                        data_processing_check(&ch1, &ch2, &rho).unwrap(),
                        "data processing increased I^Q"
                    );
                    cases += 1;
                }
            }
        }
        assert!(cases >= 200);
    }

    #[test]
    fn high_entanglement_fidelity_forces_high_average_fidelity() {
        let mut rng = SplitMix64::new(13);
        // Channels near the identity have F_e near 1; every pure-state
        // ensemble with the same average then shows F̄ near 1.
        for eps in [0.0, 1e-7] {
            let ch = standard_channel(&StandardKind::Depolarizing(eps), 2).unwrap();
            let rho = random_density_from(2, 2, &mut rng);
            let setup = TransmissionSetup::new(ch.clone(), rho.clone()).unwrap();
            let fe = entanglement_fidelity(&setup).unwrap();
            assert!(fe >= 1.0 - 1e-6);
            for _ in 0..5 {
                let u = random_unitary(3, &mut rng);
                let ens = WeightedStates::pure_decomposition(&rho, &u).unwrap();
                let fbar = average_fidelity(&ens, &ch).unwrap();
                assert!(fbar >= 1.0 - 1e-5, "F̄ = {fbar} with F_e = {fe}");
            }
        }
    }
}
