//! Holevo quantity χ, accessible-information bookkeeping, optimal signal
//! ensembles with maximal-distance certificates, the minimax form of χ*, and
//! additivity experiments on product channels.
//!
//! The ensemble optimizer alternates a multiplicative probability update
//! p_a ← p_a·2^{D(ρ_a‖ρ̄)}/Z over a working set with a support-point search
//! that merges in the probe state of largest relative-entropy distance
//! whenever that distance exceeds the current χ. An ensemble is optimal
//! exactly when no available output is further from the average than χ, so
//! the returned certificate reports the worst probe violation and the spread
//! of member distances.

use crate::channels::QuantumChannel;
use crate::opalg::{self, C64, ComplexMatrix, ComplexVector, tensor, EIG_CLIP};
use crate::rng::{random_pure_state, SplitMix64};
use crate::states::{
    self, entropy, relative_entropy, shannon_entropy, DensityOperator, WeightedStates, SUPPORT_TOL,
};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

/// Members below this probability are pruned from working ensembles and
/// excluded from equal-distance checks.
pub const PROBABILITY_FLOOR: f64 = 1e-9;
/// A probe is merged into the working set when its distance exceeds χ by this.
pub const SUPPORT_ADD_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("probability table sums to {0}, expected 1")]
    NotNormalized(f64),
    #[error("POVM invalid: {0}")]
    NotPovm(String),
    #[error("mixing probability {0} outside (0, 1)")]
    BadMixingProbability(f64),
    #[error("product dimension {0} exceeds the desk-scale cap {1}")]
    DimensionTooLarge(usize, usize),
    #[error("probe set is empty")]
    EmptyProbeSet,
    #[error(transparent)]
    State(#[from] states::StateError),
    #[error(transparent)]
    Matrix(#[from] opalg::MatrixError),
    #[error(transparent)]
    Channel(#[from] crate::channels::ChannelError),
}

pub type Result<T> = core::result::Result<T, CapacityError>;

/// Signal ensemble: probabilities, post-channel output states, the cached
/// average state, and optionally the input states that produced the outputs.
#[derive(Debug, Clone)]
pub struct SignalEnsemble {
    probs: Vec<f64>,
    inputs: Option<Vec<DensityOperator>>,
    outputs: Vec<DensityOperator>,
    average: DensityOperator,
}

impl SignalEnsemble {
    pub fn new(probs: Vec<f64>, outputs: Vec<DensityOperator>) -> Result<Self> {
        let weighted = WeightedStates::new(probs, outputs)?;
        let average = weighted.mean();
        let (probs, outputs) = (weighted.probs().to_vec(), weighted.states().to_vec());
        Ok(Self {
            probs,
            inputs: None,
            outputs,
            average,
        })
    }

    pub fn with_inputs(
        probs: Vec<f64>,
        inputs: Vec<DensityOperator>,
        outputs: Vec<DensityOperator>,
    ) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(CapacityError::DimensionMismatch(format!(
                "{} inputs for {} outputs",
                inputs.len(),
                outputs.len()
            )));
        }
        let mut ens = Self::new(probs, outputs)?;
        ens.inputs = Some(inputs);
        Ok(ens)
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

    pub fn outputs(&self) -> &[DensityOperator] {
        &self.outputs
    }

    pub fn inputs(&self) -> Option<&[DensityOperator]> {
        self.inputs.as_deref()
    }

    /// Ensemble average ρ̄.
    pub fn average(&self) -> &DensityOperator {
        &self.average
    }

    pub fn dim(&self) -> usize {
        self.average.dim()
    }

    pub fn as_weighted(&self) -> WeightedStates {
        WeightedStates::new(self.probs.clone(), self.outputs.clone())
            .expect("ensemble data already validated")
    }
}

/// χ = S(ρ̄) − Σ p_a S(ρ_a), clamped to be nonnegative.
pub fn holevo_chi(ens: &SignalEnsemble) -> f64 {
    let mut chi = entropy(ens.average());
    for (p, s) in ens.probs.iter().zip(&ens.outputs) {
        chi -= p * entropy(s);
    }
    chi.max(0.0)
}

/// Positive operators summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| CapacityError::NotPovm("no elements".into()))?;
        let dim = first.rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &elements {
            if e.rows() != dim || e.cols() != dim {
                return Err(CapacityError::NotPovm(
                    "elements differ in dimension".into(),
                ));
            }
            let spec = opalg::eigh(e).map_err(|err| CapacityError::NotPovm(format!("{err}")))?;
            if spec.min_eigenvalue() < -1e-10 {
                return Err(CapacityError::NotPovm(format!(
                    "element has eigenvalue {:.3e}",
                    spec.min_eigenvalue()
                )));
            }
            sum = sum.add(e);
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if defect > 1e-9 {
            return Err(CapacityError::NotPovm(format!(
                "elements sum to identity with defect {defect:.3e}"
            )));
        }
        Ok(Self { elements })
    }

    /// Projective measurement onto an orthonormal basis.
    pub fn from_basis(basis: &[ComplexVector]) -> Result<Self> {
        Self::new(basis.iter().map(|v| v.projector()).collect())
    }

    /// Random POVM: Ginibre positives whitened by the inverse square root of
    /// their sum.
    pub fn random(dim: usize, outcomes: usize, rng: &mut SplitMix64) -> Result<Self> {
        let raw: Vec<ComplexMatrix> = (0..outcomes)
            .map(|_| {
                let g = ComplexMatrix::from_fn(dim, dim, |_, _| rng.next_c64_gaussian());
                g.mul(&g.adjoint())
            })
            .collect();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for m in &raw {
            sum = sum.add(m);
        }
        let whiten = opalg::matrix_func(&sum, |x| {
            if x > 1e-14 {
                1.0 / libm::sqrt(x)
            } else {
                0.0
            }
        })?;
        Self::new(raw.iter().map(|m| whiten.mul(m).mul(&whiten)).collect())
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements.first().map_or(0, |e| e.rows())
    }
}

/// Joint distribution P(a, b) = p_a·Tr(ρ_a E_b), stored row-major by signal.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    table: Vec<f64>,
    n_signals: usize,
    n_outcomes: usize,
}

impl JointDistribution {
    pub fn from_table(table: Vec<f64>, n_signals: usize, n_outcomes: usize) -> Result<Self> {
        if table.len() != n_signals * n_outcomes {
            return Err(CapacityError::DimensionMismatch(format!(
                "table of {} entries for {}x{}",
                table.len(),
                n_signals,
                n_outcomes
            )));
        }
        Ok(Self {
            table,
            n_signals,
            n_outcomes,
        })
    }

    pub fn entry(&self, a: usize, b: usize) -> f64 {
        self.table[a * self.n_outcomes + b]
    }

    pub fn n_signals(&self) -> usize {
        self.n_signals
    }

    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    pub fn row_sum(&self, a: usize) -> f64 {
        (0..self.n_outcomes).map(|b| self.entry(a, b)).sum()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }
}

/// Measurement statistics of an ensemble under a POVM.
pub fn joint_distribution(ens: &SignalEnsemble, povm: &Povm) -> Result<JointDistribution> {
    if povm.dim() != ens.dim() {
        return Err(CapacityError::DimensionMismatch(format!(
            "POVM dim {} on ensemble dim {}",
            povm.dim(),
            ens.dim()
        )));
    }
    let mut table = Vec::with_capacity(ens.len() * povm.len());
    for (p, rho) in ens.probs.iter().zip(&ens.outputs) {
        for e in povm.elements() {
            let cond = rho.matrix().trace_prod(e).re;
            if cond < -1e-12 {
                return Err(CapacityError::NotPovm(format!(
                    "negative outcome probability {cond:.3e}"
                )));
            }
            table.push(p * cond.max(0.0));
        }
    }
    JointDistribution::from_table(table, ens.len(), povm.len())
}

/// I(A:B) = H(A) + H(B) − H(A,B) in bits.
pub fn mutual_information(joint: &JointDistribution) -> Result<f64> {
    let total: f64 = joint.table.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(CapacityError::NotNormalized(total));
    }
    if joint.table.iter().any(|&x| x < -1e-12) {
        return Err(CapacityError::NotNormalized(total));
    }
    let mut pa = alloc::vec![0.0; joint.n_signals];
    let mut pb = alloc::vec![0.0; joint.n_outcomes];
    for a in 0..joint.n_signals {
        for b in 0..joint.n_outcomes {
            let x = joint.entry(a, b).max(0.0);
            pa[a] += x;
            pb[b] += x;
        }
    }
    let clamped: Vec<f64> = joint.table.iter().map(|&x| x.max(0.0)).collect();
    let mi = shannon_entropy(&pa) + shannon_entropy(&pb) - shannon_entropy(&clamped);
    Ok(mi.max(0.0))
}

/// Bounds on Δχ when mixing a new state ω into an ensemble at weight η.
#[derive(Debug, Clone, Copy)]
pub struct DeltaChiBounds {
    /// η·(D(ω‖ρ̄′) − χ).
    pub lower: f64,
    /// η·(D(ω‖ρ̄) − χ); +∞ when ω escapes the support of ρ̄.
    pub upper: f64,
    /// χ(modified) − χ(original).
    pub actual: f64,
}

/// Evaluates both bounds and the actual change of χ for the modified
/// ensemble {(η, ω)} ∪ {((1−η)p_a, ρ_a)}.
pub fn delta_chi_bounds(
    ens: &SignalEnsemble,
    omega: &DensityOperator,
    eta: f64,
) -> Result<DeltaChiBounds> {
    if !(0.0..1.0).contains(&eta) || eta == 0.0 {
        return Err(CapacityError::BadMixingProbability(eta));
    }
    if omega.dim() != ens.dim() {
        return Err(CapacityError::DimensionMismatch(format!(
            "mixing state dim {} into ensemble dim {}",
            omega.dim(),
            ens.dim()
        )));
    }
    let chi = holevo_chi(ens);

    let mut probs: Vec<f64> = ens.probs.iter().map(|p| p * (1.0 - eta)).collect();
    let mut outputs = ens.outputs.clone();
    probs.push(eta);
    outputs.push(omega.clone());
    let modified = SignalEnsemble::new(probs, outputs)?;
    let actual = holevo_chi(&modified) - chi;

    let lower = eta * (relative_entropy(omega, modified.average())?.bits() - chi);
    let upper = eta * (relative_entropy(omega, ens.average())?.bits() - chi);
    Ok(DeltaChiBounds {
        lower,
        upper,
        actual,
    })
}

/// Optimality certificate for a signal ensemble against a probe grid.
#[derive(Debug, Clone)]
pub struct OptimalityCertificate {
    /// χ of the certified ensemble.
    pub chi_star: f64,
    /// max over probes of D(ω‖ρ̄) − χ; ≤ 0 (up to tolerance) iff optimal.
    pub max_distance_violation: f64,
    /// max over support members of |D(ρ_a‖ρ̄) − χ|.
    pub equal_distance_spread: f64,
    /// False when some probe escapes the support of ρ̄ entirely.
    pub support_ok: bool,
    pub grid_size: usize,
}

/// Relative-entropy distances from a fixed reference state, evaluated with
/// one shared eigendecomposition of the reference.
struct DistanceEvaluator {
    log_ref: ComplexMatrix,
    kernel: Option<ComplexMatrix>,
}

impl DistanceEvaluator {
    fn new(reference: &DensityOperator) -> Self {
        let spec = reference.spectrum();
        let log_ref = spec.apply_fn(|x| if x > EIG_CLIP { libm::log2(x) } else { 0.0 });
        let has_kernel = spec.eigenvalues.iter().any(|&x| x <= EIG_CLIP);
        let kernel = if has_kernel {
            Some(spec.apply_fn(|x| if x <= EIG_CLIP { 1.0 } else { 0.0 }))
        } else {
            None
        };
        Self { log_ref, kernel }
    }

    /// D(ω‖ref) given S(ω); +∞ on support escape.
    fn distance(&self, omega: &DensityOperator, omega_entropy: f64) -> f64 {
        if let Some(kernel) = &self.kernel {
            if omega.matrix().trace_prod(kernel).re > SUPPORT_TOL {
                return f64::INFINITY;
            }
        }
        let cross = omega.matrix().trace_prod(&self.log_ref).re;
        (-omega_entropy - cross).max(0.0)
    }
}

/// Maximal-distance and equal-distance report for an ensemble over probes.
pub fn certify(ens: &SignalEnsemble, probes: &[DensityOperator]) -> OptimalityCertificate {
    let chi = holevo_chi(ens);
    let eval = DistanceEvaluator::new(ens.average());

    let mut violation = f64::NEG_INFINITY;
    let mut support_ok = true;
    for omega in probes {
        let d = eval.distance(omega, entropy(omega));
        if d.is_infinite() {
            support_ok = false;
            violation = f64::INFINITY;
        } else {
            violation = violation.max(d - chi);
        }
    }

    let mut spread = 0.0f64;
    for (p, rho) in ens.probs.iter().zip(&ens.outputs) {
        if *p <= PROBABILITY_FLOOR {
            continue;
        }
        let d = eval.distance(rho, entropy(rho));
        spread = spread.max((d - chi).abs());
    }

    OptimalityCertificate {
        chi_star: chi,
        max_distance_violation: violation,
        equal_distance_spread: spread,
        support_ok,
        grid_size: probes.len(),
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub max_sweeps: usize,
    /// Per-sweep χ gain below which a sweep counts as stalled. The default
    /// runs the multiplicative update essentially to its floating-point
    /// fixed point; the certificate violation scales like the square root
    /// of the remaining suboptimality, so a loose stop here would cost six
    /// digits of certificate quality.
    pub gain_tol: f64,
    /// Consecutive stalled sweeps (with no support additions) to stop after.
    pub stall_window: usize,
    /// Working-set cap; defaults to dim².
    pub working_cap: Option<usize>,
    /// Warm-start working set as (probe index, probability) pairs.
    pub warm_start: Option<Vec<(usize, f64)>>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_sweeps: 10_000,
            gain_tol: 1e-14,
            stall_window: 5,
            working_cap: None,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizedEnsemble {
    pub ensemble: SignalEnsemble,
    pub certificate: OptimalityCertificate,
    pub sweeps: usize,
    pub converged: bool,
    /// χ after each sweep; non-decreasing by construction.
    pub chi_trace: Vec<f64>,
}

/// Maximizes χ over ensembles drawn from a probe set of available outputs.
///
/// The candidate outputs must cover the available set densely enough for the
/// certificate to be meaningful; for a channel use [`channel_probe_outputs`].
/// The working set never exceeds dim² members, matching the guarantee that
/// some optimal ensemble needs at most that many signal states.
pub fn optimize_ensemble(
    probes: &[DensityOperator],
    config: &OptimizerConfig,
) -> Result<OptimizedEnsemble> {
    if probes.is_empty() {
        return Err(CapacityError::EmptyProbeSet);
    }
    let dim = probes[0].dim();
    if probes.iter().any(|p| p.dim() != dim) {
        return Err(CapacityError::DimensionMismatch(
            "probe states differ in dimension".into(),
        ));
    }
    let cap = config.working_cap.unwrap_or(dim * dim).max(2);
    let probe_entropy: Vec<f64> = probes.iter().map(entropy).collect();

    // Working set: (probe index, probability).
    let mut work: Vec<(usize, f64)> = match &config.warm_start {
        Some(start) => {
            let total: f64 = start.iter().map(|(_, p)| p).sum();
            start.iter().map(|&(i, p)| (i, p / total)).collect()
        }
        None => {
            let count = cap.min(probes.len());
            let stride = (probes.len() / count).max(1);
            (0..count)
                .map(|k| ((k * stride) % probes.len(), 1.0 / count as f64))
                .collect()
        }
    };

    let build_ensemble = |work: &[(usize, f64)]| -> Result<SignalEnsemble> {
        SignalEnsemble::new(
            work.iter().map(|&(_, p)| p).collect(),
            work.iter().map(|&(i, _)| probes[i].clone()).collect(),
        )
    };

    let mut chi_trace = Vec::new();
    let mut last_chi = -1.0f64;
    let mut converged = false;
    let mut sweeps = 0;
    let mut stalled = 0;

    while sweeps < config.max_sweeps {
        sweeps += 1;
        let ens = build_ensemble(&work)?;
        let eval = DistanceEvaluator::new(ens.average());
        let chi = holevo_chi(&ens);

        // Multiplicative update over the working set.
        let distances: Vec<f64> = work
            .iter()
            .map(|&(i, _)| eval.distance(&probes[i], probe_entropy[i]))
            .collect();
        let mut norm = 0.0;
        for ((_, p), d) in work.iter_mut().zip(&distances) {
            *p *= libm::exp2(d - chi); // shift by χ to keep the scale tame
            norm += *p;
        }
        for (_, p) in work.iter_mut() {
            *p /= norm;
        }
        work.retain(|&(_, p)| p > PROBABILITY_FLOOR);
        let total: f64 = work.iter().map(|&(_, p)| p).sum();
        for (_, p) in work.iter_mut() {
            *p /= total;
        }

        // Support-point search over the probe grid.
        let ens = build_ensemble(&work)?;
        let eval = DistanceEvaluator::new(ens.average());
        let chi_now = holevo_chi(&ens);
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for (i, omega) in probes.iter().enumerate() {
            if work.iter().any(|&(w, _)| w == i) {
                continue;
            }
            let d = eval.distance(omega, probe_entropy[i]);
            if d > best.0 {
                best = (d, i);
            }
        }
        let mut added = false;
        if best.1 != usize::MAX && best.0 > chi_now + SUPPORT_ADD_TOL {
            // Insert at the largest halving weight that still increases χ.
            // When the set is full, eviction of the lowest-probability
            // member (ties to the lowest index) is part of the same
            // candidate move, so the sweep stays monotone.
            let mut base: Vec<(usize, f64)> = work.clone();
            if base.len() >= cap {
                let evict = base
                    .iter()
                    .enumerate()
                    .min_by(|(ai, (_, ap)), (bi, (_, bp))| {
                        ap.partial_cmp(bp)
                            .unwrap_or(core::cmp::Ordering::Equal)
                            .then(ai.cmp(bi))
                    })
                    .map(|(slot, _)| slot)
                    .expect("working set nonempty");
                base.remove(evict);
                let total: f64 = base.iter().map(|&(_, p)| p).sum();
                for (_, p) in base.iter_mut() {
                    *p /= total;
                }
            }
            let mut eta = 0.5;
            while eta > 1e-9 {
                let mut cand: Vec<(usize, f64)> =
                    base.iter().map(|&(i, p)| (i, p * (1.0 - eta))).collect();
                cand.push((best.1, eta));
                let cand_ens = build_ensemble(&cand)?;
                if holevo_chi(&cand_ens) > chi_now + 1e-14 {
                    work = cand;
                    added = true;
                    break;
                }
                eta *= 0.5;
            }
        }

        let ens = build_ensemble(&work)?;
        let chi_end = holevo_chi(&ens);
        chi_trace.push(chi_end);
        let gain = chi_end - last_chi;
        // Multiplicative updates and the transactional support moves are
        // individually monotone; only floor pruning can nibble at χ.
        debug_assert!(
            sweeps == 1 || gain >= -1e-8,
            "χ decreased by {gain:e} within a sweep"
        );
        last_chi = chi_end;
        if !added && sweeps > 1 && gain.abs() <= config.gain_tol {
            stalled += 1;
            if stalled >= config.stall_window {
                converged = true;
                break;
            }
        } else {
            stalled = 0;
        }
    }

    let ensemble = build_ensemble(&work)?;
    let certificate = certify(&ensemble, probes);
    Ok(OptimizedEnsemble {
        ensemble,
        certificate,
        sweeps,
        converged,
        chi_trace,
    })
}

/// Deterministic covering of the Bloch sphere by `n` pure qubit inputs.
pub fn fibonacci_qubit_states(n: usize) -> Vec<ComplexVector> {
    let golden_angle = core::f64::consts::PI * (3.0 - libm::sqrt(5.0));
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let theta = libm::acos(z.clamp(-1.0, 1.0));
            let phi = golden_angle * i as f64;
            ComplexVector::new(alloc::vec![
                C64::new(libm::cos(theta / 2.0), 0.0),
                C64::new(libm::cos(phi), libm::sin(phi)) * libm::sin(theta / 2.0),
            ])
        })
        .collect()
}

/// The six Bloch-axis pure states ±x, ±y, ±z.
pub fn cardinal_qubit_states() -> Vec<ComplexVector> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    alloc::vec![
        ComplexVector::basis_state(2, 0),
        ComplexVector::basis_state(2, 1),
        ComplexVector::from_real(&[h, h]),
        ComplexVector::from_real(&[h, -h]),
        ComplexVector::new(alloc::vec![C64::new(h, 0.0), C64::new(0.0, h)]),
        ComplexVector::new(alloc::vec![C64::new(h, 0.0), C64::new(0.0, -h)]),
    ]
}

/// Probe outputs for a channel: images of a deterministic Bloch-sphere grid
/// (plus the exact cardinal states, which the spiral grid never hits) for
/// qubit inputs, seeded random pure inputs otherwise. The extreme points of
/// the available output set are exactly the images of pure inputs.
pub fn channel_probe_outputs(
    ch: &QuantumChannel,
    grid_size: usize,
    seed: u64,
) -> Result<Vec<DensityOperator>> {
    let inputs: Vec<ComplexVector> = if ch.in_dim() == 2 {
        let mut v = fibonacci_qubit_states(grid_size.saturating_sub(6));
        v.extend(cardinal_qubit_states());
        v
    } else {
        let mut rng = SplitMix64::new(seed);
        (0..grid_size)
            .map(|_| random_pure_state(ch.in_dim(), &mut rng))
            .collect()
    };
    inputs
        .iter()
        .map(|psi| Ok(ch.apply(&DensityOperator::from_pure(psi)?)?))
        .collect()
}

#[derive(Debug, Clone)]
pub struct MinimaxConfig {
    pub max_iters: usize,
    pub improve_tol: f64,
}

impl Default for MinimaxConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            improve_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimaxResult {
    /// min over σ of max over probes of D(ω‖σ), as approximated.
    pub value: f64,
    pub sigma: DensityOperator,
    pub iterations: usize,
}

/// Approximates χ* = min_σ max_ω D(ω‖σ) over the probe set by descent from
/// a starting reference state (typically the optimized ensemble average).
pub fn chi_star_minimax(
    probes: &[DensityOperator],
    start: &DensityOperator,
    config: &MinimaxConfig,
) -> Result<MinimaxResult> {
    if probes.is_empty() {
        return Err(CapacityError::EmptyProbeSet);
    }
    let probe_entropy: Vec<f64> = probes.iter().map(entropy).collect();
    let worst = |sigma: &DensityOperator| -> (f64, usize) {
        let eval = DistanceEvaluator::new(sigma);
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, omega) in probes.iter().enumerate() {
            let d = eval.distance(omega, probe_entropy[i]);
            if d > best.0 {
                best = (d, i);
            }
        }
        best
    };

    let mut sigma = start.clone();
    let (mut value, mut arg) = worst(&sigma);
    let mut iterations = 0;
    while iterations < config.max_iters {
        iterations += 1;
        // Frank-Wolfe style step toward the worst probe.
        let mut improved = false;
        let mut t = 0.5;
        while t > 1e-10 {
            let cand = sigma.mix(&probes[arg], t)?;
            let (cand_value, cand_arg) = worst(&cand);
            if cand_value < value - config.improve_tol {
                sigma = cand;
                value = cand_value;
                arg = cand_arg;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(MinimaxResult {
        value,
        sigma,
        iterations,
    })
}

#[derive(Debug, Clone)]
pub struct AdditivityConfig {
    /// Probe grid per factor channel.
    pub factor_grid: usize,
    /// Seeded random entangled pure inputs for the joint channel.
    pub entangled_probes: usize,
    /// Per-factor probes carried into the product grid.
    pub product_grid_per_side: usize,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
}

impl Default for AdditivityConfig {
    fn default() -> Self {
        Self {
            factor_grid: 400,
            entangled_probes: 2000,
            product_grid_per_side: 24,
            seed: 0,
            optimizer: OptimizerConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdditivityReport {
    pub chi_a: f64,
    pub chi_b: f64,
    pub chi_ab: f64,
    /// χ^{AB*}_found − (χ^{A*} + χ^{B*}); must not be meaningfully negative.
    pub gap: f64,
    pub certificate_ab: OptimalityCertificate,
    pub converged: bool,
}

/// Compares the best joint-channel χ found (entangled inputs allowed) with
/// the sum of the factor optima. The joint optimization is seeded with the
/// product of the factor-optimal ensembles, so the reported χ^{AB*} is always
/// at least their sum up to optimizer tolerance; any positive gap would be
/// evidence against additivity and is only ever reported, never asserted.
pub fn additivity_experiment(
    a: &QuantumChannel,
    b: &QuantumChannel,
    config: &AdditivityConfig,
) -> Result<AdditivityReport> {
    let joint_in = a.in_dim() * b.in_dim();
    if joint_in > 16 {
        return Err(CapacityError::DimensionTooLarge(joint_in, 16));
    }

    let probes_a = channel_probe_outputs(a, config.factor_grid, config.seed)?;
    let probes_b = channel_probe_outputs(b, config.factor_grid, config.seed ^ 0x5eed)?;
    let opt_a = optimize_ensemble(&probes_a, &config.optimizer)?;
    let opt_b = optimize_ensemble(&probes_b, &config.optimizer)?;
    let chi_a = opt_a.certificate.chi_star;
    let chi_b = opt_b.certificate.chi_star;

    // Product probes: factor-optimal support points plus a thinned factor
    // grid on each side.
    let side_states = |opt: &OptimizedEnsemble, probes: &[DensityOperator]| {
        let mut side: Vec<DensityOperator> = opt.ensemble.outputs().to_vec();
        let stride = (probes.len() / config.product_grid_per_side).max(1);
        side.extend(probes.iter().step_by(stride).cloned());
        side
    };
    let side_a = side_states(&opt_a, &probes_a);
    let side_b = side_states(&opt_b, &probes_b);

    let mut probes_ab: Vec<DensityOperator> = Vec::new();
    for sa in &side_a {
        for sb in &side_b {
            probes_ab.push(DensityOperator::new(tensor(sa.matrix(), sb.matrix()))?);
        }
    }
    // Warm start: the product of the factor-optimal ensembles.
    let mut warm = Vec::new();
    for (i, pa) in opt_a.ensemble.probs().iter().enumerate() {
        for (j, pb) in opt_b.ensemble.probs().iter().enumerate() {
            warm.push((i * side_b.len() + j, pa * pb));
        }
    }
    // Entangled candidates.
    let joint = QuantumChannel::product(a, b);
    let mut rng = SplitMix64::new(config.seed.wrapping_add(17));
    for _ in 0..config.entangled_probes {
        let psi = random_pure_state(joint_in, &mut rng);
        probes_ab.push(joint.apply(&DensityOperator::from_pure(&psi)?)?);
    }

    let mut joint_config = config.optimizer.clone();
    joint_config.warm_start = Some(warm);
    let opt_ab = optimize_ensemble(&probes_ab, &joint_config)?;
    let chi_ab = opt_ab.certificate.chi_star;

    Ok(AdditivityReport {
        chi_a,
        chi_b,
        chi_ab,
        gap: chi_ab - (chi_a + chi_b),
        certificate_ab: opt_ab.certificate,
        converged: opt_a.converged && opt_b.converged && opt_ab.converged,
    })
}
