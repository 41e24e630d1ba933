//! Cost-constrained signaling: bits-per-unit-cost bounds built on a zero-cost
//! state, thermal equilibrium states, and the free-energy / relative-entropy
//! identity F₁ − F₀ = kT ln2 · D(ρ₁‖ρ₀).
//!
//! Units: Boltzmann's constant and the temperature both default to 1; all
//! results are covariant in them. Entropies stay in bits, so the natural
//! logarithm only ever appears inside the factor k·T·ln 2.

use crate::capacity::{holevo_chi, SignalEnsemble};
use crate::opalg::{self, ComplexMatrix, HERMITIAN_TOL};
use crate::states::{self, entropy, relative_entropy, DensityOperator};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostError {
    #[error("cost {0} must be strictly positive")]
    NonPositiveCost(f64),
    #[error("mix weights sum to {0}, expected 1")]
    BadWeights(f64),
    #[error("mixing probability {0} outside (0, 1)")]
    BadMixingProbability(f64),
    #[error("temperature and Boltzmann constant must be positive, got T={t}, k={k}")]
    BadThermalParameters { t: f64, k: f64 },
    #[error("Hamiltonian is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    State(#[from] states::StateError),
    #[error(transparent)]
    Matrix(#[from] opalg::MatrixError),
    #[error(transparent)]
    Capacity(#[from] alloc::boxed::Box<crate::capacity::CapacityError>),
}

impl From<crate::capacity::CapacityError> for CostError {
    fn from(e: crate::capacity::CapacityError) -> Self {
        CostError::Capacity(alloc::boxed::Box::new(e))
    }
}

pub type Result<T> = core::result::Result<T, CostError>;

/// A zero-cost state plus costly alternatives with their production costs
/// and relative mix weights.
#[derive(Debug, Clone)]
pub struct CostedStates {
    zero_cost: DensityOperator,
    states: Vec<DensityOperator>,
    costs: Vec<f64>,
    weights: Vec<f64>,
}

impl CostedStates {
    pub fn new(
        zero_cost: DensityOperator,
        states: Vec<DensityOperator>,
        costs: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if states.len() != costs.len() || states.len() != weights.len() {
            return Err(CostError::DimensionMismatch(format!(
                "{} states, {} costs, {} weights",
                states.len(),
                costs.len(),
                weights.len()
            )));
        }
        if let Some(&c) = costs.iter().find(|&&c| c <= 0.0) {
            return Err(CostError::NonPositiveCost(c));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 || weights.iter().any(|&q| q < 0.0) {
            return Err(CostError::BadWeights(total));
        }
        if states.iter().any(|s| s.dim() != zero_cost.dim()) {
            return Err(CostError::DimensionMismatch(
                "costly states differ in dimension from the zero-cost state".into(),
            ));
        }
        Ok(Self {
            zero_cost,
            states,
            costs,
            weights,
        })
    }

    pub fn single(zero_cost: DensityOperator, state: DensityOperator, cost: f64) -> Result<Self> {
        Self::new(
            zero_cost,
            alloc::vec![state],
            alloc::vec![cost],
            alloc::vec![1.0],
        )
    }

    pub fn zero_cost(&self) -> &DensityOperator {
        &self.zero_cost
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// χ, average cost and their ratio for the ensemble that uses the costly
/// states a fraction η of the time, together with the relative-entropy
/// sandwich bounds on χ.
#[derive(Debug, Clone, Copy)]
pub struct ChiCostReport {
    pub chi: f64,
    pub avg_cost: f64,
    pub ratio: f64,
    /// η·Σ q_k D(ρ_k‖ρ̄).
    pub lower: f64,
    /// η·Σ q_k D(ρ_k‖ρ₀); +∞ on support escape.
    pub upper: f64,
}

/// Builds the ensemble {(1−η) → ρ₀, η·q_k → ρ_k} and reports χ, the average
/// cost c = η Σ q_k c_k, and χ/c, sandwiched by the relative-entropy bounds.
pub fn chi_cost_ratio(cs: &CostedStates, eta: f64) -> Result<ChiCostReport> {
    if !(0.0..1.0).contains(&eta) || eta == 0.0 {
        return Err(CostError::BadMixingProbability(eta));
    }
    let mut probs = alloc::vec![1.0 - eta];
    let mut members = alloc::vec![cs.zero_cost.clone()];
    for (q, s) in cs.weights.iter().zip(&cs.states) {
        probs.push(eta * q);
        members.push(s.clone());
    }
    let ens = SignalEnsemble::new(probs, members)?;
    let chi = holevo_chi(&ens);

    let mut lower = 0.0;
    let mut upper = 0.0;
    for (q, s) in cs.weights.iter().zip(&cs.states) {
        lower += q * relative_entropy(s, ens.average())?.bits();
        upper += q * relative_entropy(s, &cs.zero_cost)?.bits();
    }
    lower *= eta;
    upper *= eta;

    let avg_cost: f64 = eta
        * cs.weights
            .iter()
            .zip(&cs.costs)
            .map(|(q, c)| q * c)
            .sum::<f64>();
    Ok(ChiCostReport {
        chi,
        avg_cost,
        ratio: if avg_cost > 0.0 { chi / avg_cost } else { 0.0 },
        lower,
        upper,
    })
}

/// sup over ensembles of χ per unit cost: max_k D(ρ_k‖ρ₀)/c_k, achieved in
/// the rare-use limit of the single most efficient state.
pub fn sup_cost_effectiveness(cs: &CostedStates) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (k, (s, c)) in cs.states.iter().zip(&cs.costs).enumerate() {
        let d = relative_entropy(s, &cs.zero_cost)
            .map(|v| v.bits())
            .unwrap_or(f64::INFINITY);
        let ratio = d / c;
        if ratio > best.0 {
            best = (ratio, k);
        }
    }
    best
}

/// Hamiltonian with a heat bath: the data defining thermal equilibrium.
#[derive(Debug, Clone)]
pub struct ThermalModel {
    hamiltonian: ComplexMatrix,
    temperature: f64,
    boltzmann: f64,
}

impl ThermalModel {
    pub fn new(hamiltonian: ComplexMatrix, temperature: f64, boltzmann: f64) -> Result<Self> {
        let defect = hamiltonian.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(CostError::NotHermitian(defect));
        }
        if temperature <= 0.0 || boltzmann <= 0.0 {
            return Err(CostError::BadThermalParameters {
                t: temperature,
                k: boltzmann,
            });
        }
        Ok(Self {
            hamiltonian,
            temperature,
            boltzmann,
        })
    }

    /// Natural units: k = 1, T = 1.
    pub fn natural(hamiltonian: ComplexMatrix) -> Result<Self> {
        Self::new(hamiltonian, 1.0, 1.0)
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn boltzmann(&self) -> f64 {
        self.boltzmann
    }

    /// 1/kT.
    pub fn beta(&self) -> f64 {
        1.0 / (self.boltzmann * self.temperature)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }
}

/// Gibbs state with its log-partition function.
#[derive(Debug, Clone)]
pub struct ThermalState {
    pub state: DensityOperator,
    /// log₂ Z where Z = Tr e^{−βH}.
    pub log2_partition: f64,
}

/// ρ₀ = e^{−βH}/Z, exponentiated in the eigenbasis of H with the spectrum
/// shifted by its minimum for numerical stability.
pub fn thermal_state(tm: &ThermalModel) -> Result<ThermalState> {
    let spec = opalg::eigh(&tm.hamiltonian)?;
    let beta = tm.beta();
    let e_min = spec.min_eigenvalue();
    let weights: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|&e| libm::exp(-beta * (e - e_min)))
        .collect();
    let z_shifted: f64 = weights.iter().sum();
    let mut idx = 0;
    let matrix = spec.apply_fn(|_| {
        let w = weights[idx] / z_shifted;
        idx += 1;
        w
    });
    let log2_partition = libm::log2(z_shifted) - beta * e_min / core::f64::consts::LN_2;
    Ok(ThermalState {
        state: DensityOperator::new(matrix)?,
        log2_partition,
    })
}

/// F = Tr ρH − T·k·ln2·S(ρ), with S in bits.
pub fn free_energy(rho: &DensityOperator, tm: &ThermalModel) -> Result<f64> {
    if rho.dim() != tm.dim() {
        return Err(CostError::DimensionMismatch(format!(
            "state dim {} against Hamiltonian dim {}",
            rho.dim(),
            tm.dim()
        )));
    }
    let energy = rho.matrix().trace_prod(&tm.hamiltonian).re;
    Ok(energy - tm.temperature * tm.boltzmann * core::f64::consts::LN_2 * entropy(rho))
}

/// Equilibrium free energy F₀ = −kT ln2 · log₂ Z.
pub fn equilibrium_free_energy(tm: &ThermalModel) -> Result<f64> {
    let ts = thermal_state(tm)?;
    Ok(-tm.boltzmann * tm.temperature * core::f64::consts::LN_2 * ts.log2_partition)
}

/// Thermodynamic cost of preparing ρ₁ against the bath:
/// F₁ − F₀ = kT ln2 · D(ρ₁‖ρ₀), evaluated through the relative entropy.
/// Infinite only at the T → 0 edge where ρ₀ loses full rank.
pub fn free_energy_gap(rho1: &DensityOperator, tm: &ThermalModel) -> Result<f64> {
    if rho1.dim() != tm.dim() {
        return Err(CostError::DimensionMismatch(format!(
            "state dim {} against Hamiltonian dim {}",
            rho1.dim(),
            tm.dim()
        )));
    }
    let rho0 = thermal_state(tm)?.state;
    let d = relative_entropy(rho1, &rho0)?;
    Ok(tm.boltzmann * tm.temperature * core::f64::consts::LN_2 * d.bits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::ComplexVector;
    use crate::rng::SplitMix64;
    use crate::states::random_density_from;

    fn basis_pure(dim: usize, k: usize) -> DensityOperator {
        DensityOperator::from_pure(&ComplexVector::basis_state(dim, k)).unwrap()
    }

    #[test]
    fn zero_cost_state_reused_gives_zero_chi() {
        let rho0 = DensityOperator::maximally_mixed(2);
        let cs = CostedStates::single(rho0.clone(), rho0, 1.0).unwrap();
        let r = chi_cost_ratio(&cs, 0.5).unwrap();
        assert!(r.chi < 1e-12);
        assert!(r.ratio < 1e-12);
    }

    #[test]
    fn rare_use_ratio_approaches_relative_entropy() {
        let cs =
            CostedStates::single(DensityOperator::maximally_mixed(2), basis_pure(2, 0), 1.0)
                .unwrap();
        let r = chi_cost_ratio(&cs, 0.01).unwrap();
        // D(|0⟩⟨0| ‖ I/2) = 1; at η = 0.01 the ratio is within 5%.
        assert!((r.ratio - 1.0).abs() < 0.05, "ratio {}", r.ratio);
        assert!((r.upper / 0.01 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn support_escape_makes_the_upper_bound_infinite() {
        let cs = CostedStates::single(basis_pure(2, 0), basis_pure(2, 1), 1.0).unwrap();
        let r = chi_cost_ratio(&cs, 0.25).unwrap();
        assert!(r.upper.is_infinite());
        assert!(r.chi.is_finite());
    }

    #[test]
    fn sandwich_holds_on_random_instances() {
        let mut rng = SplitMix64::new(17);
        for trial in 0..500 {
            let dim = 2 + (trial % 2);
            let rho0 = random_density_from(dim, dim, &mut rng);
            let rho1 = random_density_from(dim, dim, &mut rng);
            let eta = 0.05 + 0.9 * rng.next_f64();
            let cs = CostedStates::single(rho0, rho1, 0.5 + rng.next_f64()).unwrap();
            let r = chi_cost_ratio(&cs, eta).unwrap();
            assert!(
                r.lower - 1e-8 <= r.chi && r.chi <= r.upper + 1e-8,
                "sandwich failed at trial {trial}: {} {} {}",
                r.lower,
                r.chi,
                r.upper
            );
        }
    }

    #[test]
    fn sup_cost_effectiveness_picks_the_best_ratio() {
        let mut rng = SplitMix64::new(19);
        let rho0 = DensityOperator::maximally_mixed(2);

        let single = CostedStates::single(rho0.clone(), basis_pure(2, 0), 2.0).unwrap();
        let (bound, k) = sup_cost_effectiveness(&single);
        assert_eq!(k, 0);
        assert!((bound - 0.5).abs() < 1e-10);

        // Brute-force comparison on random families.
        for _ in 0..50 {
            let states: Vec<_> = (0..3)
                .map(|_| random_density_from(2, 2, &mut rng))
                .collect();
            let costs: Vec<f64> = (0..3).map(|_| 0.5 + rng.next_f64()).collect();
            let cs = CostedStates::new(
                rho0.clone(),
                states.clone(),
                costs.clone(),
                alloc::vec![0.3, 0.3, 0.4],
            )
            .unwrap();
            let (bound, k) = sup_cost_effectiveness(&cs);
            let mut expect = (f64::NEG_INFINITY, 0);
            for i in 0..3 {
                let r = relative_entropy(&states[i], &rho0).unwrap().bits() / costs[i];
                if r > expect.0 {
                    expect = (r, i);
                }
            }
            assert_eq!(k, expect.1);
            assert!((bound - expect.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sup_is_approached_from_below_as_eta_shrinks() {
        let cs =
            CostedStates::single(DensityOperator::maximally_mixed(2), basis_pure(2, 0), 1.0)
                .unwrap();
        let (bound, _) = sup_cost_effectiveness(&cs);
        let mut last = f64::NEG_INFINITY;
        for eta in [0.1, 0.01, 0.001] {
            let r = chi_cost_ratio(&cs, eta).unwrap();
            assert!(r.ratio <= bound + 1e-9);
            assert!(r.ratio >= last - 1e-9, "not monotone at η={eta}");
            last = r.ratio;
        }
        assert!(bound - last < 0.01);
    }

    #[test]
    fn ratio_of_sums_is_bounded_by_max_ratio() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..200 {
            let n = 2 + rng.next_range(6);
            let a: Vec<f64> = (0..n).map(|_| rng.next_f64() + 1e-6).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.next_f64() + 1e-6).collect();
            let lhs = a.iter().sum::<f64>() / b.iter().sum::<f64>();
            let rhs = a
                .iter()
                .zip(&b)
                .map(|(x, y)| x / y)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(lhs <= rhs + 1e-12);
        }
    }

    #[test]
    fn thermal_state_of_zero_hamiltonian_is_maximally_mixed() {
        let tm = ThermalModel::natural(ComplexMatrix::zeros(3, 3)).unwrap();
        let ts = thermal_state(&tm).unwrap();
        assert!(
            ts.state
                .matrix()
                .max_abs_diff(DensityOperator::maximally_mixed(3).matrix())
                < 1e-12
        );
        assert!((ts.log2_partition - libm::log2(3.0)).abs() < 1e-12);
    }

    #[test]
    fn hot_limit_approaches_maximally_mixed() {
        let h = ComplexMatrix::diag(&[0.0, 1.0]);
        // βE_max = 1e-4.
        let tm = ThermalModel::new(h, 1e4, 1.0).unwrap();
        let ts = thermal_state(&tm).unwrap();
        assert!(
            ts.state
                .matrix()
                .max_abs_diff(DensityOperator::maximally_mixed(2).matrix())
                <= 1e-3
        );
    }

    #[test]
    fn qubit_gibbs_populations() {
        // βE = ln 2 gives populations (2/3, 1/3).
        let h = ComplexMatrix::diag(&[0.0, 1.0]);
        let tm = ThermalModel::new(h, 1.0 / core::f64::consts::LN_2, 1.0).unwrap();
        let ts = thermal_state(&tm).unwrap();
        let m = ts.state.matrix();
        assert!((m[(0, 0)].re - 2.0 / 3.0).abs() < 1e-10);
        assert!((m[(1, 1)].re - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn equilibrium_free_energy_matches_log_partition() {
        let h = ComplexMatrix::diag(&[0.0, 0.7, 1.3]);
        let tm = ThermalModel::new(h, 1.4, 1.0).unwrap();
        let ts = thermal_state(&tm).unwrap();
        let f0 = free_energy(&ts.state, &tm).unwrap();
        let expect = equilibrium_free_energy(&tm).unwrap();
        assert!((f0 - expect).abs() < 1e-9, "{f0} vs {expect}");
    }

    #[test]
    fn pure_ground_state_has_zero_free_energy() {
        let h = ComplexMatrix::diag(&[0.0, 1.0]);
        let tm = ThermalModel::natural(h).unwrap();
        let f = free_energy(&basis_pure(2, 0), &tm).unwrap();
        assert!(f.abs() < 1e-12);
    }

    #[test]
    fn free_energy_gap_identity() {
        let mut rng = SplitMix64::new(29);
        for trial in 0..100 {
            let dim = 2 + (trial % 2);
            let g = ComplexMatrix::from_fn(dim, dim, |_, _| rng.next_c64_gaussian());
            let h = g.add(&g.adjoint()).scale_re(0.5);
            let tm = ThermalModel::new(h, 0.5 + rng.next_f64(), 1.0).unwrap();
            let rho1 = random_density_from(dim, dim, &mut rng);

            let via_relent = free_energy_gap(&rho1, &tm).unwrap();
            let f1 = free_energy(&rho1, &tm).unwrap();
            let f0 = free_energy(&thermal_state(&tm).unwrap().state, &tm).unwrap();
            let direct = f1 - f0;
            let scale = direct.abs().max(1.0);
            assert!(
                (via_relent - direct).abs() / scale < 1e-8,
                "identity failed at trial {trial}: {via_relent} vs {direct}"
            );
            // Equilibrium is the free-energy minimum.
            assert!(f1 >= f0 - 1e-9);
        }
    }

    #[test]
    fn gap_vanishes_at_equilibrium() {
        let h = ComplexMatrix::diag(&[0.0, 0.4]);
        let tm = ThermalModel::natural(h).unwrap();
        let rho0 = thermal_state(&tm).unwrap().state;
        assert!(free_energy_gap(&rho0, &tm).unwrap().abs() < 1e-10);
    }

    #[test]
    fn bits_per_free_energy_bounded_by_inverse_kt_ln2() {
        let mut rng = SplitMix64::new(31);
        let h = ComplexMatrix::diag(&[0.0, 1.0]);
        let tm = ThermalModel::new(h, 0.8, 1.2).unwrap();
        let kt_ln2 = tm.boltzmann() * tm.temperature() * core::f64::consts::LN_2;
        let rho0 = thermal_state(&tm).unwrap().state;

        for _ in 0..100 {
            let rho1 = random_density_from(2, 2, &mut rng);
            let eta = 0.01 + 0.5 * rng.next_f64();
            let cs = CostedStates::single(rho0.clone(), rho1.clone(), 1.0).unwrap();
            let chi = chi_cost_ratio(&cs, eta).unwrap().chi;
            let f = eta * free_energy_gap(&rho1, &tm).unwrap();
            if f > 1e-12 {
                assert!(chi / f <= 1.0 / kt_ln2 + 1e-8);
            }
        }
    }

    #[test]
    fn bits_per_free_energy_saturates_in_the_rare_limit() {
        let h = ComplexMatrix::diag(&[0.0, 1.0]);
        let tm = ThermalModel::natural(h).unwrap();
        let kt_ln2 = core::f64::consts::LN_2;
        let rho0 = thermal_state(&tm).unwrap().state;
        let rho1 = basis_pure(2, 0);

        let eta = 1e-3;
        let cs = CostedStates::single(rho0, rho1.clone(), 1.0).unwrap();
        let chi = chi_cost_ratio(&cs, eta).unwrap().chi;
        let f = eta * free_energy_gap(&rho1, &tm).unwrap();
        assert!(chi / f >= 0.99 / kt_ln2, "ratio {} too far", chi / f);
    }

    #[test]
    fn constructor_validation() {
        let rho0 = DensityOperator::maximally_mixed(2);
        assert!(matches!(
            CostedStates::single(rho0.clone(), basis_pure(2, 0), 0.0),
            Err(CostError::NonPositiveCost(_))
        ));
        assert!(matches!(
            ThermalModel::new(ComplexMatrix::zeros(2, 2), -1.0, 1.0),
            Err(CostError::BadThermalParameters { .. })
        ));
        let skew = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 1 {
                crate::opalg::C64::new(0.0, 1.0)
            } else {
                crate::opalg::C64::new(0.0, 0.0)
            }
        });
        assert!(matches!(
            ThermalModel::natural(skew),
            Err(CostError::NotHermitian(_))
        ));
    }
}
