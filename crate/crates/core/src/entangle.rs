//! Relative entropy of entanglement for small bipartite systems:
//! E_r(ρ) = min over separable σ of D(ρ‖σ), minimized over an explicit
//! ansatz σ = Σ_j q_j |a_j⟩⟨a_j| ⊗ |b_j⟩⟨b_j|.
//!
//! The ansatz size is capped at (d_A·d_B)² terms. Weights live behind a
//! softmax, factors are normalized complex vectors, and the descent uses the
//! exact gradient of Tr ρ log₂ σ (the divided-difference derivative of the
//! logarithm in σ's eigenbasis) with backtracking line search. Restarts are
//! seeded; the first two starts are deterministic Schmidt-structured guesses
//! that are exact for pure inputs. The returned value is always an upper
//! bound on the true E_r: it is the best exact D(ρ‖σ) over every separable σ
//! the search evaluated.

use crate::opalg::{self, C64, ComplexMatrix, ComplexVector, partial_trace};
use crate::rng::SplitMix64;
use crate::states::{self, entropy, relative_entropy, DensityOperator, WeightedStates};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntangleError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bipartite dimension {0} exceeds the desk-scale cap 16")]
    DimensionTooLarge(usize),
    #[error("decomposition member is not pure (max eigenvalue {0})")]
    BadDecomposition(f64),
    #[error(transparent)]
    State(#[from] states::StateError),
    #[error(transparent)]
    Matrix(#[from] opalg::MatrixError),
}

pub type Result<T> = core::result::Result<T, EntangleError>;

/// Mixture of pure product states: the separable candidate σ.
#[derive(Debug, Clone)]
pub struct SeparableAnsatz {
    dims: (usize, usize),
    weights: Vec<f64>,
    factors: Vec<(ComplexVector, ComplexVector)>,
}

impl SeparableAnsatz {
    pub fn new(
        dims: (usize, usize),
        weights: Vec<f64>,
        factors: Vec<(ComplexVector, ComplexVector)>,
    ) -> Result<Self> {
        if weights.len() != factors.len() {
            return Err(EntangleError::DimensionMismatch(format!(
                "{} weights for {} factor pairs",
                weights.len(),
                factors.len()
            )));
        }
        for (a, b) in &factors {
            if a.dim() != dims.0 || b.dim() != dims.1 {
                return Err(EntangleError::DimensionMismatch(format!(
                    "factor dims ({}, {}) against ({}, {})",
                    a.dim(),
                    b.dim(),
                    dims.0,
                    dims.1
                )));
            }
        }
        Ok(Self {
            dims,
            weights,
            factors,
        })
    }

    pub fn term_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn factors(&self) -> &[(ComplexVector, ComplexVector)] {
        &self.factors
    }

    /// σ = Σ q_j |a_j b_j⟩⟨a_j b_j| as a raw matrix.
    pub fn assemble_matrix(&self) -> ComplexMatrix {
        let d = self.dims.0 * self.dims.1;
        let mut m = ComplexMatrix::zeros(d, d);
        for (q, (a, b)) in self.weights.iter().zip(&self.factors) {
            if *q <= 0.0 {
                continue;
            }
            let prod = a.normalized().tensor(&b.normalized());
            m = m.add(&prod.projector().scale_re(*q));
        }
        m
    }

    pub fn assemble(&self) -> Result<DensityOperator> {
        Ok(DensityOperator::new(self.assemble_matrix())?)
    }
}

#[derive(Debug, Clone)]
pub struct ErConfig {
    /// Ansatz terms; defaults to (d_A·d_B)².
    pub terms: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    /// Restart stops when the objective improves by less than this over
    /// `converge_window` iterations.
    pub converge_tol: f64,
    pub converge_window: usize,
    /// The whole search stops early once the best value drops to this.
    pub early_exit: f64,
    pub seed: u64,
}

impl Default for ErConfig {
    fn default() -> Self {
        Self {
            terms: None,
            restarts: 64,
            max_iters: 5000,
            converge_tol: 1e-7,
            converge_window: 50,
            early_exit: 1e-9,
            seed: 0,
        }
    }
}

impl ErConfig {
    /// Cheaper profile used when many solves feed a tolerance of a few 1e-3.
    pub fn quick(seed: u64) -> Self {
        Self {
            restarts: 6,
            max_iters: 1000,
            converge_tol: 1e-6,
            converge_window: 40,
            early_exit: 5e-4,
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct ErResult {
    /// Best upper bound found for E_r, in bits.
    pub value: f64,
    pub argmin: SeparableAnsatz,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Exact oracle for pure inputs: E_r(|ψ⟩) = S(Tr_B |ψ⟩⟨ψ|). Kept independent
/// of the ansatz search so it can falsify it.
pub fn er_pure(psi: &ComplexVector, dims: (usize, usize)) -> Result<f64> {
    if psi.dim() != dims.0 * dims.1 {
        return Err(EntangleError::DimensionMismatch(format!(
            "vector dim {} for dims {}x{}",
            psi.dim(),
            dims.0,
            dims.1
        )));
    }
    let proj = psi.normalized().projector();
    let marg = partial_trace(&proj, &[dims.0, dims.1], &[0])?;
    Ok(entropy(&DensityOperator::new(marg)?))
}

/// Σ_k p_k S(ρ_k^A) over a pure-state decomposition: an upper bound on E_r
/// through the entanglement of formation.
pub fn er_ensemble_bound(ens: &WeightedStates, dims: (usize, usize)) -> Result<f64> {
    let mut bound = 0.0;
    for (p, rho) in ens.probs().iter().zip(ens.states()) {
        if !rho.is_pure() {
            return Err(EntangleError::BadDecomposition(
                rho.spectrum().max_eigenvalue(),
            ));
        }
        bound += p * er_pure(&rho.dominant_eigenvector(), dims)?;
    }
    Ok(bound)
}

/// Schmidt decomposition of a bipartite vector: (coefficients descending,
/// A-factors, B-factors).
fn schmidt(psi: &ComplexVector, dims: (usize, usize)) -> Vec<(f64, ComplexVector, ComplexVector)> {
    let (da, db) = dims;
    // ρ^A = M M† with M the dA×dB reshape of ψ.
    let m = ComplexMatrix::from_fn(da, db, |i, j| psi[i * db + j]);
    let rho_a = m.mul(&m.adjoint());
    let spec = opalg::eigh(&rho_a).expect("reshaped Gram matrix is Hermitian");
    let mut out = Vec::new();
    for i in (0..da).rev() {
        let lambda = spec.eigenvalues[i].max(0.0);
        if lambda <= 1e-14 {
            continue;
        }
        let a = spec.eigenvectors.column(i);
        // b = M† a / √λ.
        let b = m.adjoint().mul_vec(&a).scale(C64::new(
            1.0 / libm::sqrt(lambda),
            0.0,
        ));
        out.push((lambda, a, b.normalized()));
    }
    out
}

/// Internal optimizer state: softmax logits plus normalized factor pairs.
struct AnsatzParams {
    logits: Vec<f64>,
    factors: Vec<(ComplexVector, ComplexVector)>,
}

impl AnsatzParams {
    fn weights(&self) -> Vec<f64> {
        let cap = self
            .logits
            .iter()
            .fold(f64::NEG_INFINITY, |acc, &x| acc.max(x));
        let raw: Vec<f64> = self.logits.iter().map(|&x| libm::exp(x - cap)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / total).collect()
    }

    fn assemble(&self, dims: (usize, usize)) -> ComplexMatrix {
        let d = dims.0 * dims.1;
        let mut m = ComplexMatrix::zeros(d, d);
        for (q, (a, b)) in self.weights().iter().zip(&self.factors) {
            let prod = a.tensor(b);
            let v = prod.as_slice();
            for i in 0..d {
                let qi = v[i] * *q;
                for j in 0..d {
                    m[(i, j)] += qi * v[j].conj();
                }
            }
        }
        m
    }

    fn to_ansatz(&self, dims: (usize, usize)) -> SeparableAnsatz {
        SeparableAnsatz {
            dims,
            weights: self.weights(),
            factors: self.factors.clone(),
        }
    }
}

/// (I ⊗ b)† G (I ⊗ b): the A-side contraction of G against |b⟩⟨b|.
fn contract_b(g: &ComplexMatrix, b: &ComplexVector, dims: (usize, usize)) -> ComplexMatrix {
    let (da, db) = dims;
    let mut out = ComplexMatrix::zeros(da, da);
    for x in 0..da {
        for y in 0..da {
            let mut acc = C64::new(0.0, 0.0);
            for u in 0..db {
                let gu = b[u].conj();
                for v in 0..db {
                    acc += gu * g[(x * db + u, y * db + v)] * b[v];
                }
            }
            out[(x, y)] = acc;
        }
    }
    out
}

/// (a ⊗ I)† G (a ⊗ I): the B-side contraction of G against |a⟩⟨a|.
fn contract_a(g: &ComplexMatrix, a: &ComplexVector, dims: (usize, usize)) -> ComplexMatrix {
    let (da, db) = dims;
    let mut out = ComplexMatrix::zeros(db, db);
    for u in 0..db {
        for v in 0..db {
            let mut acc = C64::new(0.0, 0.0);
            for x in 0..da {
                let gx = a[x].conj();
                for y in 0..da {
                    acc += gx * g[(x * db + u, y * db + v)] * a[y];
                }
            }
            out[(u, v)] = acc;
        }
    }
    out
}

/// Heuristic minimization of D(ρ‖σ) over the separable ansatz.
///
/// The reported value is an upper bound on E_r certified by the returned σ;
/// for pure ρ it lands on the subsystem entropy, which is the exact value.
pub fn relative_entropy_of_entanglement(
    rho: &DensityOperator,
    dims: (usize, usize),
    config: &ErConfig,
) -> Result<ErResult> {
    let d = dims.0 * dims.1;
    if d != rho.dim() {
        return Err(EntangleError::DimensionMismatch(format!(
            "state dim {} for dims {}x{}",
            rho.dim(),
            dims.0,
            dims.1
        )));
    }
    if d > 16 {
        return Err(EntangleError::DimensionTooLarge(d));
    }
    let terms = config.terms.unwrap_or(d * d).max(2);
    let ridge = 1e-9;
    let neg_entropy = -entropy(rho);

    // Exact certified value of a candidate: D against σ itself if finite,
    // else against the barely-smoothed (still separable) mixture.
    let certify = |params: &AnsatzParams| -> Result<(f64, SeparableAnsatz)> {
        let ansatz = params.to_ansatz(dims);
        let sigma = ansatz.assemble()?;
        let exact = relative_entropy(rho, &sigma)?;
        if exact.is_finite() {
            return Ok((exact.bits(), ansatz));
        }
        let mixed = sigma.mix(&DensityOperator::maximally_mixed(d), 1e-9)?;
        let fallback = relative_entropy(rho, &mixed)?;
        Ok((fallback.bits(), ansatz))
    };

    // Ridged objective used inside the descent.
    let objective = |params: &AnsatzParams| -> f64 {
        let sigma = params.assemble(dims);
        let smoothed = sigma
            .scale_re(1.0 - ridge)
            .add(&ComplexMatrix::identity(d).scale_re(ridge / d as f64));
        let spec = opalg::eigh(&smoothed).expect("ansatz matrix is Hermitian");
        let cross = rho.spectrum().eigenvectors.adjoint().mul(&spec.eigenvectors);
        let mut acc = 0.0;
        for j in 0..d {
            let mu = spec.eigenvalues[j].max(1e-300);
            let log_mu = libm::log2(mu);
            for i in 0..d {
                let li = rho.eigenvalues()[i];
                if li > 0.0 {
                    acc += li * cross[(i, j)].norm_sqr() * log_mu;
                }
            }
        }
        neg_entropy - acc
    };

    // Derivative matrix of Tr ρ log₂ σ at the (ridged) σ: divided differences
    // of log₂ across the spectrum, conjugated back out of the eigenbasis.
    let log_derivative = |params: &AnsatzParams| -> ComplexMatrix {
        let sigma = params.assemble(dims);
        let smoothed = sigma
            .scale_re(1.0 - ridge)
            .add(&ComplexMatrix::identity(d).scale_re(ridge / d as f64));
        let spec = opalg::eigh(&smoothed).expect("ansatz matrix is Hermitian");
        let w = &spec.eigenvectors;
        let rho_tilde = w.adjoint().mul(rho.matrix()).mul(w);
        let mut g_tilde = ComplexMatrix::zeros(d, d);
        for mm in 0..d {
            for nn in 0..d {
                let x = spec.eigenvalues[mm].max(1e-300);
                let y = spec.eigenvalues[nn].max(1e-300);
                let k = if (x - y).abs() > 1e-12 * x.max(y) {
                    (libm::log2(x) - libm::log2(y)) / (x - y)
                } else {
                    1.0 / (0.5 * (x + y) * core::f64::consts::LN_2)
                };
                g_tilde[(mm, nn)] = rho_tilde[(mm, nn)] * k;
            }
        }
        let g = w.mul(&g_tilde).mul(&w.adjoint());
        g.add(&g.adjoint()).scale_re(0.5)
    };

    // Best product direction: maximizes ⟨a⊗b|G|a⊗b⟩ by alternating
    // top-eigenvector rounds, from a few starts.
    let best_product = |g: &ComplexMatrix,
                        hint: Option<&(ComplexVector, ComplexVector)>,
                        stream: &mut SplitMix64|
     -> (f64, ComplexVector, ComplexVector) {
        let mut best = (f64::NEG_INFINITY, ComplexVector::zeros(dims.0), ComplexVector::zeros(dims.1));
        for init in 0..3 {
            let mut b = match (init, hint) {
                (0, Some((_, hb))) => hb.clone(),
                _ => crate::rng::random_pure_state(dims.1, stream),
            };
            let mut a = ComplexVector::zeros(dims.0);
            for _ in 0..12 {
                let ga = contract_b(g, &b, dims);
                let sa = opalg::eigh(&ga).expect("contraction is Hermitian");
                a = sa.eigenvectors.column(dims.0 - 1);
                let gb = contract_a(g, &a, dims);
                let sb = opalg::eigh(&gb).expect("contraction is Hermitian");
                b = sb.eigenvectors.column(dims.1 - 1);
            }
            let score = g.quad_form(&a.tensor(&b)).re;
            if score > best.0 {
                best = (score, a, b);
            }
        }
        best
    };

    // Frank-Wolfe style support move: mix the best product direction into σ,
    // replacing the lightest ansatz slot, if a halving line search accepts.
    let support_move = |params: &AnsatzParams,
                        value: f64,
                        objective: &dyn Fn(&AnsatzParams) -> f64,
                        stream: &mut SplitMix64|
     -> Option<(AnsatzParams, f64)> {
        let g = log_derivative(params);
        let weights = params.weights();
        let lightest = weights
            .iter()
            .enumerate()
            .min_by(|(_, x), (_, y)| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal))
            .map(|(i, _)| i)?;
        let (_, a, b) = best_product(&g, params.factors.first(), stream);
        let mut t = 0.5;
        while t > 1e-10 {
            let mut new_weights: Vec<f64> = weights.iter().map(|q| q * (1.0 - t)).collect();
            new_weights[lightest] += t;
            let mut factors = params.factors.clone();
            factors[lightest] = (a.clone(), b.clone());
            let cand = AnsatzParams {
                logits: new_weights
                    .iter()
                    .map(|q| libm::log(q.max(1e-13)).clamp(-30.0, 30.0))
                    .collect(),
                factors,
            };
            let cand_value = objective(&cand);
            if cand_value < value - 1e-14 {
                return Some((cand, cand_value));
            }
            t *= 0.5;
        }
        None
    };

    // Exact gradient of the ridged objective.
    let gradient = |params: &AnsatzParams| -> (Vec<f64>, Vec<(ComplexVector, ComplexVector)>) {
        let weights = params.weights();
        let g = log_derivative(params);

        // Logit gradient: ∂f/∂w_j = −q_j (g_j − ḡ) with g_j = Tr(G P_j).
        let mut g_vals = Vec::with_capacity(params.factors.len());
        for (a, b) in &params.factors {
            let prod = a.tensor(b);
            g_vals.push(g.quad_form(&prod).re);
        }
        let g_bar: f64 = weights.iter().zip(&g_vals).map(|(q, v)| q * v).sum();
        let logit_grad: Vec<f64> = weights
            .iter()
            .zip(&g_vals)
            .map(|(q, v)| -q * (v - g_bar))
            .collect();

        // Factor gradients via partial contractions of G.
        let mut factor_grad = Vec::with_capacity(params.factors.len());
        for (q, (a, b)) in weights.iter().zip(&params.factors) {
            let ma = contract_b(&g, b, dims);
            let mb = contract_a(&g, a, dims);
            let mut ga = ma.mul_vec(a).scale(C64::new(-q, 0.0));
            let mut gb = mb.mul_vec(b).scale(C64::new(-q, 0.0));
            // Tangent projection on the unit sphere.
            let ra = a.inner(&ga);
            ga = ga.sub(&a.scale(ra));
            let rb = b.inner(&gb);
            gb = gb.sub(&b.scale(rb));
            factor_grad.push((ga, gb));
        }
        (logit_grad, factor_grad)
    };

    let mut rng = SplitMix64::new(config.seed);
    let mut best: Option<(f64, SeparableAnsatz)> = None;
    let mut restarts_used = 0;
    let mut converged = false;

    let spec = rho.spectrum();
    for r in 0..config.restarts.max(1) {
        restarts_used = r + 1;
        let mut stream = rng.fork(r as u64);

        // Deterministic Schmidt-structured starts first, then random ones.
        let mut logits = alloc::vec![-20.0; terms];
        let mut factors: Vec<(ComplexVector, ComplexVector)> = (0..terms)
            .map(|_| {
                (
                    crate::rng::random_pure_state(dims.0, &mut stream),
                    crate::rng::random_pure_state(dims.1, &mut stream),
                )
            })
            .collect();
        match r {
            0 => {
                // Schmidt terms of the dominant eigenvector; exact for pure ρ.
                let top = spec.eigenvectors.column(d - 1);
                for (slot, (lambda, a, b)) in schmidt(&top, dims).into_iter().enumerate() {
                    if slot >= terms {
                        break;
                    }
                    logits[slot] = libm::log(lambda.max(1e-12));
                    factors[slot] = (a, b);
                }
            }
            1 => {
                // Schmidt mixture: every eigenvector contributes its full
                // Schmidt-diagonal product decomposition, weighted by its
                // eigenvalue. Lands exactly on the closest separable state
                // for classically correlated inputs.
                let mut slot = 0;
                for i in (0..d).rev() {
                    let lambda = spec.eigenvalues[i];
                    if lambda <= 1e-9 {
                        continue;
                    }
                    let v = spec.eigenvectors.column(i);
                    for (coeff, a, b) in schmidt(&v, dims) {
                        if slot >= terms {
                            break;
                        }
                        logits[slot] = libm::log((lambda * coeff).max(1e-12));
                        factors[slot] = (a, b);
                        slot += 1;
                    }
                }
            }
            _ => {
                for l in logits.iter_mut() {
                    *l = stream.next_gaussian();
                }
            }
        }

        let mut params = AnsatzParams { logits, factors };
        let mut value = objective(&params);
        let mut window_anchor = value;
        let mut since_anchor = 0;
        let mut step = 0.25;
        let mut stalled = false;

        for iter in 0..config.max_iters {
            let (lg, fg) = gradient(&params);
            let mut scale: f64 = lg.iter().map(|x| x * x).sum();
            for (ga, gb) in &fg {
                scale += ga.norm_sqr() + gb.norm_sqr();
            }
            let scale = libm::sqrt(scale);
            if scale < 1e-13 {
                stalled = true;
                break;
            }
            let mut advanced = false;
            while step > 1e-13 {
                let cand = AnsatzParams {
                    logits: params
                        .logits
                        .iter()
                        .zip(&lg)
                        .map(|(x, gx)| (x - step * gx / scale).clamp(-30.0, 30.0))
                        .collect(),
                    factors: params
                        .factors
                        .iter()
                        .zip(&fg)
                        .map(|((a, b), (ga, gb))| {
                            (
                                a.sub(&ga.scale(C64::new(step / scale, 0.0))).normalized(),
                                b.sub(&gb.scale(C64::new(step / scale, 0.0))).normalized(),
                            )
                        })
                        .collect(),
                };
                let cand_value = objective(&cand);
                if cand_value < value - 1e-15 {
                    params = cand;
                    value = cand_value;
                    step *= 1.4;
                    advanced = true;
                    break;
                }
                step *= 0.5;
            }
            // Periodically, and whenever plain descent runs out, rotate the
            // lightest ansatz slot toward the best product direction.
            if !advanced || (iter + 1) % 25 == 0 {
                if let Some((cand, cand_value)) =
                    support_move(&params, value, &objective, &mut stream)
                {
                    params = cand;
                    value = cand_value;
                    step = step.max(1e-3);
                    advanced = true;
                }
            }
            if !advanced {
                stalled = true;
                break;
            }
            since_anchor += 1;
            if since_anchor >= config.converge_window {
                if window_anchor - value < config.converge_tol {
                    stalled = true;
                    break;
                }
                window_anchor = value;
                since_anchor = 0;
            }
        }

        let (certified, ansatz) = certify(&params)?;
        let better = best.as_ref().map_or(true, |(v, _)| certified < *v);
        if better {
            if stalled {
                converged = true;
            }
            best = Some((certified, ansatz));
        }
        if best.as_ref().is_some_and(|(v, _)| *v <= config.early_exit) {
            break;
        }
    }

    let (value, argmin) = best.expect("at least one restart ran");
    Ok(ErResult {
        value: value.max(0.0),
        argmin,
        restarts_used,
        converged,
    })
}
