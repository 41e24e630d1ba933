//! Cross-module identities: checks that tie several subsystems together on
//! one object, complementing the per-module unit suites.

use qrelent_core::capacity::{
    additivity_experiment, channel_probe_outputs, chi_star_minimax, holevo_chi, optimize_ensemble,
    AdditivityConfig, MinimaxConfig, OptimizerConfig, SignalEnsemble,
};
use qrelent_core::channels::{min_output_entropy, standard_channel, QuantumChannel, StandardKind};
use qrelent_core::coherent::{chi_difference_identity, coherent_information, TransmissionSetup};
use qrelent_core::cost::{free_energy_gap, thermal_state, ThermalModel};
use qrelent_core::distinguish::exponent_trend;
use qrelent_core::entangle::{er_pure, relative_entropy_of_entanglement, ErConfig};
use qrelent_core::locc::MultipartyState;
use qrelent_core::opalg::{matrix_log2, ComplexMatrix, ComplexVector};
use qrelent_core::qcode::{average_length, mismatch_cost, shannon_fano_lengths, ZefCode};
use qrelent_core::rng::SplitMix64;
use qrelent_core::states::{
    entropy, purify, random_density_from, relative_entropy, DensityOperator, WeightedStates,
};

/// The channel's best χ, the minimax bound, and the coherent-information
/// maximum all live in the band fixed by the paper's inequalities.
#[test]
fn chi_star_routes_agree_across_the_zoo() {
    for kind in [
        StandardKind::Identity,
        StandardKind::Depolarizing(0.4),
        StandardKind::Dephasing(0.6),
    ] {
        let ch = standard_channel(&kind, 2).unwrap();
        let probes = channel_probe_outputs(&ch, 300, 0).unwrap();
        let opt = optimize_ensemble(&probes, &OptimizerConfig::default()).unwrap();
        let minimax =
            chi_star_minimax(&probes, opt.ensemble.average(), &MinimaxConfig::default()).unwrap();
        assert!(
            (opt.certificate.chi_star - minimax.value).abs() < 1e-3,
            "{kind:?}: optimizer {} vs minimax {}",
            opt.certificate.chi_star,
            minimax.value
        );
        assert!(opt.certificate.chi_star <= 1.0 + 1e-9);
    }
}

/// Additivity experiment on a pair of equally depolarizing channels: the
/// search over entangled inputs does not beat the product ensemble.
#[test]
fn depolarizing_pair_additivity_gap_is_negligible() {
    let dep = standard_channel(&StandardKind::Depolarizing(0.3), 2).unwrap();
    let config = AdditivityConfig {
        factor_grid: 200,
        entangled_probes: 600,
        seed: 5,
        ..AdditivityConfig::default()
    };
    let report = additivity_experiment(&dep, &dep, &config).unwrap();
    assert!(
        report.gap.abs() <= 1e-3,
        "gap {} for the depolarizing pair",
        report.gap
    );
    assert!((report.chi_a - report.chi_b).abs() < 1e-9);
}

/// Purification, channel dilation and the coherent-information forms close a
/// loop: S(ρ^RQ) computed through the purification equals S(ρ^E) from the
/// Kraus environment, for any input.
#[test]
fn purification_and_dilation_entropies_close() {
    let mut rng = SplitMix64::new(11);
    let ch = standard_channel(&StandardKind::Depolarizing(0.35), 2).unwrap();
    for _ in 0..20 {
        let rho = random_density_from(2, 2, &mut rng);
        let setup = TransmissionSetup::new(ch.clone(), rho.clone()).unwrap();
        let joint = DensityOperator::new(setup.joint_output().unwrap()).unwrap();
        let env = ch.environment_output(&rho).unwrap();
        assert!((entropy(&joint) - entropy(&env)).abs() < 1e-9);
        let iq = coherent_information(&setup).unwrap();
        assert!(iq <= entropy(&rho) + 1e-9, "I^Q above the input entropy");
    }
}

/// The χ-difference identity evaluated through an explicitly constructed
/// ensemble matches the Stein target of distinguishing channel outputs.
#[test]
fn ensemble_identities_compose() {
    let mut rng = SplitMix64::new(13);
    let ch = standard_channel(&StandardKind::Dephasing(0.5), 2).unwrap();
    let rho = random_density_from(2, 2, &mut rng);
    let ens = WeightedStates::eigen_decomposition(&rho).unwrap();
    let r = chi_difference_identity(&ens, &ch).unwrap();

    // χ^Q = Σ p D(out_k ‖ out_mean) re-derived from scratch.
    let outputs: Vec<DensityOperator> =
        ens.states().iter().map(|s| ch.apply(s).unwrap()).collect();
    let signal = SignalEnsemble::new(ens.probs().to_vec(), outputs).unwrap();
    let direct: f64 = signal
        .probs()
        .iter()
        .zip(signal.outputs())
        .map(|(p, s)| p * relative_entropy(s, signal.average()).unwrap().bits())
        .sum();
    assert!((holevo_chi(&signal) - direct).abs() < 1e-8);
    assert!((r.chi_q - direct).abs() < 1e-8);
}

/// Thermodynamics meets coding: the free-energy gap of preparing the wrong
/// state against a Gibbs bath and the mismatch cost of compressing with the
/// wrong code are the same relative entropy.
#[test]
fn free_energy_gap_equals_mismatch_cost_for_matching_spectra() {
    // Bath whose Gibbs state has populations (1/2, 1/4, 1/4).
    let e = std::f64::consts::LN_2; // βE = ln 2 per step at kT = 1
    let h = ComplexMatrix::diag(&[0.0, e, e]);
    let tm = ThermalModel::natural(h).unwrap();
    let gibbs = thermal_state(&tm).unwrap().state;
    let pops: Vec<f64> = (0..3).map(|i| gibbs.matrix()[(i, i)].re).collect();
    assert!((pops[0] - 0.5).abs() < 1e-12);

    let rho = DensityOperator::new(ComplexMatrix::diag(&[0.75, 0.125, 0.125])).unwrap();
    let gap_bits = free_energy_gap(&rho, &tm).unwrap() / std::f64::consts::LN_2; // kT ln2 = ln 2

    let code = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
    let cost = mismatch_cost(&rho, &code).unwrap();
    assert!(
        (gap_bits - cost).abs() < 1e-9,
        "thermal gap {gap_bits} vs coding mismatch {cost}"
    );
}

/// A source compressed with a code designed from its own spectrum pays only
/// the sub-qubit Shannon-Fano rounding, and the ledger sees exactly that.
#[test]
fn self_designed_codes_cost_less_than_one_extra_qubit() {
    let mut rng = SplitMix64::new(17);
    for _ in 0..30 {
        let dim = 2 + rng.next_range(7);
        let rho = random_density_from(dim, dim, &mut rng);
        let code = shannon_fano_lengths(&rho).unwrap();
        let weights: Vec<f64> = rho
            .eigenvalues()
            .iter()
            .rev()
            .copied()
            .filter(|&x| x > 0.0)
            .collect();
        let coords = DensityOperator::new(ComplexMatrix::diag(&weights)).unwrap();
        let ledger = average_length(&code, &coords).unwrap();
        assert!(ledger.divergence - ledger.log2_kraft < 1.0 + 1e-9);
        assert!(ledger.mean_length < entropy(&rho) + 1.0 + 1e-9);
    }
}

/// E_r of a purified mixed state against the marginal entropy: purification
/// raises a d-dimensional state to a pure bipartite state whose entanglement
/// is exactly the original entropy.
#[test]
fn purification_entanglement_equals_entropy() {
    let mut rng = SplitMix64::new(19);
    for trial in 0..5 {
        let rho = random_density_from(2, 2, &mut rng);
        let psi = purify(&rho);
        let oracle = er_pure(&psi, (2, 2)).unwrap();
        assert!((oracle - entropy(&rho)).abs() < 1e-10);

        let pure = DensityOperator::from_pure(&psi).unwrap();
        let solved =
            relative_entropy_of_entanglement(&pure, (2, 2), &ErConfig::quick(trial)).unwrap();
        assert!((solved.value - oracle).abs() < 2e-3);
    }
}

/// log₂ of a tensor power is the Kronecker sum, which is what makes Stein
/// exponents per copy equal to the single-copy relative entropy.
#[test]
fn log_of_power_and_stein_target_agree() {
    let rho = DensityOperator::new(ComplexMatrix::diag(&[0.8, 0.2])).unwrap();
    let sigma = DensityOperator::new(ComplexMatrix::diag(&[0.35, 0.65])).unwrap();
    let d1 = relative_entropy(&rho, &sigma).unwrap().bits();

    // Two-copy relative entropy is exactly twice the single-copy value.
    let rho2 = DensityOperator::new(qrelent_core::opalg::tensor(rho.matrix(), rho.matrix()))
        .unwrap();
    let sigma2 =
        DensityOperator::new(qrelent_core::opalg::tensor(sigma.matrix(), sigma.matrix())).unwrap();
    let d2 = relative_entropy(&rho2, &sigma2).unwrap().bits();
    assert!((d2 - 2.0 * d1).abs() < 1e-10);

    let report = exponent_trend(&rho, &sigma, 8, 0.05).unwrap();
    assert!((report.target.bits() - d1).abs() < 1e-12);
    // log₂(σ⊗σ) = log₂σ ⊕ log₂σ.
    let log1 = matrix_log2(sigma.matrix()).unwrap();
    let id = ComplexMatrix::identity(2);
    let kron_sum = qrelent_core::opalg::tensor(&log1, &id)
        .add(&qrelent_core::opalg::tensor(&id, &log1));
    let log2 = matrix_log2(sigma2.matrix()).unwrap();
    assert!(log2.max_abs_diff(&kron_sum) < 1e-9);
}

/// Minimum-output entropy of the product of a channel with the identity is
/// the channel's own minimum, the half-noisy special case.
#[test]
fn half_noisy_min_output_entropy_is_flat() {
    let id = standard_channel(&StandardKind::Identity, 2).unwrap();
    let dep = standard_channel(&StandardKind::Depolarizing(0.5), 2).unwrap();
    let prod = QuantumChannel::product(&id, &dep);
    let single = min_output_entropy(&dep, 16, 3).bits;
    let joint = min_output_entropy(&prod, 16, 3).bits;
    assert!(
        (joint - single).abs() < 1e-6,
        "product minimum {joint} vs factor minimum {single}"
    );
}

/// The cat-state ladder: GHZ marginals, their coding ledger, and their
/// discrimination target line up across modules.
#[test]
fn ghz_marginal_threads_through_modules() {
    let ghz = MultipartyState::ghz();
    let bc = ghz.marginal(&[1, 2]).unwrap();
    assert!((entropy(&bc) - 1.0).abs() < 1e-10);

    // Its eigen-spectrum (1/2, 1/2) codes at one qubit per letter.
    let code = shannon_fano_lengths(&bc).unwrap();
    assert_eq!(code.lengths(), &[1, 1]);

    // And it is one bit of relative entropy away from the uniform state.
    let uniform = DensityOperator::maximally_mixed(4);
    let d = relative_entropy(&bc, &uniform).unwrap().bits();
    assert!((d - 1.0).abs() < 1e-10);

    // Pure-state discrimination against it is perfect.
    let zero = DensityOperator::from_pure(&ComplexVector::basis_state(4, 1)).unwrap();
    let beta = qrelent_core::distinguish::stein_error(&zero, &bc, 2, 0.05).unwrap();
    assert_eq!(beta, 0.0);
}
