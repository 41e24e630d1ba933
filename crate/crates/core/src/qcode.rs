//! Indeterminate-length quantum coding on zero-extended-form (zef) registers:
//! length observables, the quantum Kraft sum Tr 2^{−Λ}, the average-length
//! ledger l̄ = S(ρ) + D(ρ‖ω) − log₂K, mismatch costs for codes designed for
//! the wrong state, Shannon-Fano length assignment, and condensation packing.
//!
//! A zef codeword of length l occupies the first l qubits of an n-qubit
//! register with |0⟩'s after. Codeword bases here are computational-aligned:
//! each basis codeword is one computational payload followed by zeros, so
//! condensation is a basis permutation (general codeword bases compose a
//! basis rotation with that permutation). Density operators over the code are
//! expressed in codeword coordinates (k×k for k codewords); register-space
//! operators are projected in, with the off-subspace mass policed.
//!
//! The register convention is big-endian: qubit 1 is the most significant
//! bit of the basis index, so a payload x of length l sits at index
//! x·2^{n−l}.

use crate::opalg::{self, C64, ComplexMatrix, ComplexVector};
use crate::states::{self, entropy, relative_entropy, DensityOperator};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

/// Packing is capped at this many total qubits (dense vectors of 2^14).
pub const MAX_PACKED_QUBITS: usize = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcodeError {
    #[error("codeword length {0} outside 1..=62")]
    BadLength(usize),
    #[error("state has weight {0:.3e} outside the zef codeword subspace")]
    SupportViolation(f64),
    #[error("code is not length-optimizing (Kraft sum {0})")]
    NotLengthOptimizing(f64),
    #[error("input is not a length eigenstate (best length weight {0})")]
    NotLengthEigenstate(f64),
    #[error("packing {0} qubits exceeds the cap of {MAX_PACKED_QUBITS}")]
    RegisterTooLarge(usize),
    #[error("code has no materialized codeword basis (Kraft sum exceeds 1)")]
    NoBasis,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    State(#[from] states::StateError),
    #[error(transparent)]
    Matrix(#[from] opalg::MatrixError),
}

pub type Result<T> = core::result::Result<T, QcodeError>;

/// An indeterminate-length code over an n-qubit register: one integer length
/// per codeword, and (when the Kraft sum permits) an orthonormal zef codeword
/// basis realized as prefix-free computational payloads.
#[derive(Debug, Clone)]
pub struct ZefCode {
    register_len: usize,
    lengths: Vec<usize>,
    /// Payload bit patterns per codeword, present iff the Kraft sum is ≤ 1.
    payloads: Option<Vec<u64>>,
}

impl ZefCode {
    /// Builds a code from its codeword lengths. Lengths with Kraft sum ≤ 1
    /// get a prefix-free computational payload assignment; larger sums still
    /// describe a length profile (for Kraft bookkeeping) but cannot be
    /// materialized as orthonormal zef codewords.
    pub fn from_lengths(lengths: &[usize]) -> Result<Self> {
        if let Some(&l) = lengths.iter().find(|&&l| l == 0 || l > 62) {
            return Err(QcodeError::BadLength(l));
        }
        let register_len = lengths.iter().copied().max().unwrap_or(1);
        let kraft: f64 = lengths.iter().map(|&l| libm::exp2(-(l as f64))).sum();
        let payloads = if kraft <= 1.0 + 1e-12 {
            // Stable shortest-first assignment; the standard counter walk
            // yields a prefix-free set whenever the Kraft sum permits one.
            let mut order: Vec<usize> = (0..lengths.len()).collect();
            order.sort_by_key(|&i| lengths[i]);
            let mut assigned = alloc::vec![0u64; lengths.len()];
            let mut code: u64 = 0;
            let mut prev_len = lengths[order[0]];
            for (pos, &i) in order.iter().enumerate() {
                if pos > 0 {
                    code = (code + 1) << (lengths[i] - prev_len);
                }
                assigned[i] = code;
                prev_len = lengths[i];
            }
            Some(assigned)
        } else {
            None
        };
        Ok(Self {
            register_len,
            lengths: lengths.to_vec(),
            payloads,
        })
    }

    pub fn register_len(&self) -> usize {
        self.register_len
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn codeword_count(&self) -> usize {
        self.lengths.len()
    }

    /// Register dimension 2^n.
    pub fn register_dim(&self) -> usize {
        1usize << self.register_len
    }

    /// The k-th codeword as a register vector |payload⟩|0…0⟩.
    pub fn codeword(&self, k: usize) -> Result<ComplexVector> {
        let payloads = self.payloads.as_ref().ok_or(QcodeError::NoBasis)?;
        let idx = (payloads[k] as usize) << (self.register_len - self.lengths[k]);
        Ok(ComplexVector::basis_state(self.register_dim(), idx))
    }

    pub fn has_basis(&self) -> bool {
        self.payloads.is_some()
    }

    /// Tr 2^{−Λ} restricted to the zef subspace: exactly Σ_k 2^{−l_k}.
    pub fn kraft_sum(&self) -> f64 {
        self.lengths
            .iter()
            .map(|&l| libm::exp2(-(l as f64)))
            .sum()
    }

    /// Condensability requires the Kraft sum to stay at or below one.
    pub fn is_condensable(&self) -> bool {
        self.kraft_sum() <= 1.0 + 1e-12
    }

    pub fn length_observable(&self) -> LengthObservable {
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for (k, &l) in self.lengths.iter().enumerate() {
            match groups.iter_mut().find(|(gl, _)| *gl == l) {
                Some((_, members)) => members.push(k),
                None => groups.push((l, alloc::vec![k])),
            }
        }
        groups.sort_by_key(|&(l, _)| l);
        LengthObservable {
            register_len: self.register_len,
            groups,
        }
    }
}

/// The length observable Λ as its projector family: for each integer length
/// l, the set of codeword indices spanning Π_l. Off the zef subspace the
/// observable is undefined (the "infinite length" slot), which shows up as
/// missing weight rather than an infinite eigenvalue.
#[derive(Debug, Clone)]
pub struct LengthObservable {
    register_len: usize,
    groups: Vec<(usize, Vec<usize>)>,
}

impl LengthObservable {
    pub fn register_len(&self) -> usize {
        self.register_len
    }

    pub fn groups(&self) -> &[(usize, Vec<usize>)] {
        &self.groups
    }

    /// ⟨Λ⟩ for a state in codeword coordinates.
    pub fn expected_length(&self, rho_coords: &DensityOperator) -> f64 {
        let mut acc = 0.0;
        for (l, members) in &self.groups {
            for &k in members {
                acc += *l as f64 * rho_coords.matrix()[(k, k)].re;
            }
        }
        acc
    }
}

/// ω = (1/K)·2^{−Λ} on the zef subspace, diagonal in the codeword basis.
pub fn implied_omega(code: &ZefCode) -> Result<DensityOperator> {
    let k_sum = code.kraft_sum();
    let weights: Vec<f64> = code
        .lengths
        .iter()
        .map(|&l| libm::exp2(-(l as f64)) / k_sum)
        .collect();
    Ok(DensityOperator::new(ComplexMatrix::diag(&weights))?)
}

/// The average-length ledger: l̄ together with the pieces of
/// l̄ = S(ρ) + D(ρ‖ω) − log₂ K.
#[derive(Debug, Clone, Copy)]
pub struct AverageLengthReport {
    pub mean_length: f64,
    pub entropy: f64,
    /// D(ρ‖ω) in bits; the mismatch term.
    pub divergence: f64,
    pub log2_kraft: f64,
}

/// Accepts a source state either in codeword coordinates (k×k) or on the
/// full register (2^n×2^n, projected onto the codeword span with the
/// off-subspace mass checked against 1e-9).
pub fn codeword_coordinates(code: &ZefCode, rho: &DensityOperator) -> Result<DensityOperator> {
    let k = code.codeword_count();
    if rho.dim() == k {
        return Ok(rho.clone());
    }
    if rho.dim() != code.register_dim() {
        return Err(QcodeError::DimensionMismatch(format!(
            "state dim {} matches neither {} codewords nor register dim {}",
            rho.dim(),
            k,
            code.register_dim()
        )));
    }
    let mut coords = ComplexMatrix::zeros(k, k);
    let codewords: Vec<ComplexVector> = (0..k)
        .map(|i| code.codeword(i))
        .collect::<Result<_>>()?;
    for a in 0..k {
        let mapped = rho.matrix().mul_vec(&codewords[a]);
        for b in 0..k {
            coords[(b, a)] = codewords[b].inner(&mapped);
        }
    }
    let mass = coords.trace().re;
    if mass < 1.0 - 1e-9 {
        return Err(QcodeError::SupportViolation(1.0 - mass));
    }
    Ok(DensityOperator::new(coords)?)
}

/// l̄ = Tr ρΛ with its ledger decomposition.
pub fn average_length(code: &ZefCode, rho: &DensityOperator) -> Result<AverageLengthReport> {
    let coords = codeword_coordinates(code, rho)?;
    let omega = implied_omega(code)?;
    let mean_length = code.length_observable().expected_length(&coords);
    let s = entropy(&coords);
    let d = relative_entropy(&coords, &omega)?.bits();
    Ok(AverageLengthReport {
        mean_length,
        entropy: s,
        divergence: d,
        log2_kraft: libm::log2(code.kraft_sum()),
    })
}

/// Extra qubits per codeword paid for compressing ρ with a code that is
/// length-optimizing for some other state ω: exactly D(ρ‖ω).
pub fn mismatch_cost(rho: &DensityOperator, code: &ZefCode) -> Result<f64> {
    let kraft = code.kraft_sum();
    if (kraft - 1.0).abs() > 1e-9 {
        return Err(QcodeError::NotLengthOptimizing(kraft));
    }
    let coords = codeword_coordinates(code, rho)?;
    let omega = implied_omega(code)?;
    Ok(relative_entropy(&coords, &omega)?.bits())
}

/// Shannon-Fano length assignment for the spectrum of ρ: the k-th codeword
/// (in descending-eigenvalue order) gets length ⌈−log₂ λ_k⌉. Zero eigenvalues
/// get no codeword; the code covers the support of ρ. The Kraft sum never
/// exceeds one and the average length overshoots S(ρ) by less than a qubit.
pub fn shannon_fano_lengths(rho: &DensityOperator) -> Result<ZefCode> {
    let mut lengths = Vec::new();
    for &lambda in rho.eigenvalues().iter().rev() {
        if lambda <= 0.0 {
            continue;
        }
        let raw = -libm::log2(lambda);
        // Nudge before the ceiling so dyadic spectra map exactly.
        let l = libm::ceil(raw - 1e-12).max(1.0) as usize;
        lengths.push(l.min(62));
    }
    ZefCode::from_lengths(&lengths)
}

/// Source eigenbasis paired with [`shannon_fano_lengths`]: the register
/// codeword for the k-th descending eigenvector of ρ.
pub fn source_eigenbasis(rho: &DensityOperator) -> Vec<ComplexVector> {
    let spec = rho.spectrum();
    let d = rho.dim();
    (0..d)
        .rev()
        .filter(|&i| spec.eigenvalues[i] > 0.0)
        .map(|i| spec.eigenvectors.column(i))
        .collect()
}

/// A packed string of codewords: the payloads concatenated into the first
/// `total_length` qubits of an N·n register, zeros after.
#[derive(Debug, Clone)]
pub struct Condensed {
    pub packed: ComplexVector,
    pub lengths: Vec<usize>,
    pub total_length: usize,
}

/// Measures the length of a register vector against the code's observable:
/// the weight must concentrate on a single length within 1e-9.
pub fn measure_length(code: &ZefCode, input: &ComplexVector) -> Result<usize> {
    if input.dim() != code.register_dim() {
        return Err(QcodeError::DimensionMismatch(format!(
            "input dim {} for register dim {}",
            input.dim(),
            code.register_dim()
        )));
    }
    let observable = code.length_observable();
    let mut best = (0.0f64, 0usize);
    for (l, members) in observable.groups() {
        let mut weight = 0.0;
        for &k in members {
            let c = code.codeword(k)?;
            weight += c.inner(input).norm_sqr();
        }
        if weight > best.0 {
            best = (weight, *l);
        }
    }
    if (best.0 - input.norm_sqr()).abs() > 1e-9 {
        return Err(QcodeError::NotLengthEigenstate(best.0));
    }
    Ok(best.1)
}

/// Packs N zef registers, each a length eigenstate, into one zef string of
/// N·n qubits with payload length L = l₁+…+l_N. The map permutes basis
/// states, hence acts unitarily on the spanned space; [`uncondense`] inverts
/// it exactly on basis states.
pub fn condense(code: &ZefCode, inputs: &[ComplexVector]) -> Result<Condensed> {
    let n = code.register_len();
    let total_qubits = n * inputs.len();
    if total_qubits > MAX_PACKED_QUBITS {
        return Err(QcodeError::RegisterTooLarge(total_qubits));
    }
    let lengths: Vec<usize> = inputs
        .iter()
        .map(|v| measure_length(code, v))
        .collect::<Result<_>>()?;
    let total_length: usize = lengths.iter().sum();

    // Payload amplitudes of each register: index x at register slot x·2^{n−l}.
    let payloads: Vec<Vec<C64>> = inputs
        .iter()
        .zip(&lengths)
        .map(|(v, &l)| {
            (0..(1usize << l))
                .map(|x| v[x << (n - l)])
                .collect::<Vec<C64>>()
        })
        .collect();

    let mut packed = ComplexVector::zeros(1usize << total_qubits);
    let mut combo = alloc::vec![0usize; inputs.len()];
    loop {
        let mut amp = C64::new(1.0, 0.0);
        let mut idx: usize = 0;
        for (slot, &x) in combo.iter().enumerate() {
            amp *= payloads[slot][x];
            idx = (idx << lengths[slot]) | x;
        }
        if amp.norm_sqr() > 0.0 {
            packed[idx << (total_qubits - total_length)] = amp;
        }
        // Advance the mixed-radix counter over payload indices.
        let mut slot = inputs.len();
        loop {
            if slot == 0 {
                return Ok(Condensed {
                    packed,
                    lengths,
                    total_length,
                });
            }
            slot -= 1;
            combo[slot] += 1;
            if combo[slot] < (1usize << lengths[slot]) {
                break;
            }
            combo[slot] = 0;
        }
    }
}

/// Unpacks a condensed basis state back into its zef registers.
pub fn uncondense(code: &ZefCode, condensed: &Condensed) -> Result<Vec<ComplexVector>> {
    let n = code.register_len();
    let total_qubits = n * condensed.lengths.len();
    let total_length: usize = condensed.lengths.iter().sum();

    // Locate the single occupied basis slot.
    let mut support: Vec<(usize, C64)> = Vec::new();
    for i in 0..condensed.packed.dim() {
        let a = condensed.packed[i];
        if a.norm_sqr() > 1e-18 {
            support.push((i, a));
        }
    }
    if support.len() != 1 {
        return Err(QcodeError::NotLengthEigenstate(support.len() as f64));
    }
    let (idx, amp) = support[0];
    let mut payload_bits = idx >> (total_qubits - total_length);

    let mut out: Vec<ComplexVector> = Vec::with_capacity(condensed.lengths.len());
    for &l in condensed.lengths.iter().rev() {
        let x = payload_bits & ((1usize << l) - 1);
        payload_bits >>= l;
        let mut reg = ComplexVector::zeros(code.register_dim());
        reg[x << (n - l)] = C64::new(1.0, 0.0);
        out.push(reg);
    }
    out.reverse();
    // Carry the global amplitude on the first register.
    if let Some(first) = out.first_mut() {
        *first = first.scale(amp);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::states::random_density_from;

    #[test]
    fn kraft_sums_and_condensability() {
        let c = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        assert!((c.kraft_sum() - 1.0).abs() < 1e-15);
        assert!(c.is_condensable());

        let c = ZefCode::from_lengths(&[1, 1, 1]).unwrap();
        assert!((c.kraft_sum() - 1.5).abs() < 1e-15);
        assert!(!c.is_condensable());
        assert!(!c.has_basis());

        let c = ZefCode::from_lengths(&[2, 2, 2, 2]).unwrap();
        assert!((c.kraft_sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kraft_sum_matches_projector_rank_trace() {
        let code = ZefCode::from_lengths(&[1, 3, 3, 4, 4]).unwrap();
        let observable = code.length_observable();
        let via_ranks: f64 = observable
            .groups()
            .iter()
            .map(|(l, members)| members.len() as f64 * libm::exp2(-(*l as f64)))
            .sum();
        assert_eq!(via_ranks, code.kraft_sum());
    }

    #[test]
    fn codewords_are_orthonormal_zef_vectors() {
        let code = ZefCode::from_lengths(&[1, 2, 3, 3]).unwrap();
        let n = code.register_len();
        assert_eq!(n, 3);
        for i in 0..code.codeword_count() {
            let ci = code.codeword(i).unwrap();
            assert!((ci.norm() - 1.0).abs() < 1e-15);
            // Trailing qubits are |0⟩: the support index is divisible by
            // 2^(n−l).
            let support: Vec<usize> =
                (0..ci.dim()).filter(|&x| ci[x].norm_sqr() > 0.0).collect();
            assert_eq!(support.len(), 1);
            assert_eq!(support[0] % (1usize << (n - code.lengths()[i])), 0);
            for j in 0..i {
                let cj = code.codeword(j).unwrap();
                assert!(cj.inner(&ci).norm_sqr() < 1e-24);
            }
        }
    }

    #[test]
    fn implied_omega_known_cases() {
        let c = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        let omega = implied_omega(&c).unwrap();
        assert!(
            omega
                .matrix()
                .max_abs_diff(&ComplexMatrix::diag(&[0.5, 0.25, 0.25]))
                < 1e-12
        );

        let c = ZefCode::from_lengths(&[3, 3, 3, 3]).unwrap();
        let omega = implied_omega(&c).unwrap();
        assert!(
            omega
                .matrix()
                .max_abs_diff(DensityOperator::maximally_mixed(4).matrix())
                < 1e-12
        );

        let c = ZefCode::from_lengths(&[1, 3, 3]).unwrap();
        let omega = implied_omega(&c).unwrap();
        let expect = ComplexMatrix::diag(&[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]);
        assert!(omega.matrix().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn average_length_matches_entropy_for_matched_code() {
        let code = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        let rho = DensityOperator::new(ComplexMatrix::diag(&[0.5, 0.25, 0.25])).unwrap();
        let r = average_length(&code, &rho).unwrap();
        assert!((r.mean_length - 1.5).abs() < 1e-12);
        assert!((r.entropy - 1.5).abs() < 1e-12);
        assert!(r.divergence < 1e-12);
        assert!(r.log2_kraft.abs() < 1e-12);
    }

    #[test]
    fn average_length_of_a_single_codeword() {
        let code = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        let rho = DensityOperator::new(ComplexMatrix::diag(&[0.0, 1.0, 0.0])).unwrap();
        let r = average_length(&code, &rho).unwrap();
        assert!((r.mean_length - 2.0).abs() < 1e-12);
        assert!(r.entropy.abs() < 1e-12);
    }

    #[test]
    fn ledger_closes_on_random_codes_and_states() {
        let mut rng = SplitMix64::new(41);
        for trial in 0..200 {
            // Random length profile with Kraft sum ≤ 1.
            let mut lengths = Vec::new();
            let mut kraft = 0.0;
            for _ in 0..(2 + rng.next_range(5)) {
                let l = 1 + rng.next_range(5);
                let w = libm::exp2(-(l as f64));
                if kraft + w <= 1.0 + 1e-15 {
                    lengths.push(l);
                    kraft += w;
                }
            }
            if lengths.len() < 2 {
                continue;
            }
            let code = ZefCode::from_lengths(&lengths).unwrap();
            let k = code.codeword_count();
            let rho = random_density_from(k, k, &mut rng);
            let r = average_length(&code, &rho).unwrap();
            let residual =
                (r.mean_length - (r.entropy + r.divergence - r.log2_kraft)).abs();
            assert!(
                residual < 1e-8,
                "ledger residual {residual:.2e} at trial {trial}"
            );
            assert!(r.mean_length >= r.entropy - 1e-8, "l̄ ≥ S violated");
        }
    }

    #[test]
    fn mean_length_equals_entropy_only_for_matched_state() {
        let code = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        let omega = implied_omega(&code).unwrap();
        let r = average_length(&code, &omega).unwrap();
        assert!((r.mean_length - r.entropy).abs() < 1e-12);

        let other = DensityOperator::new(ComplexMatrix::diag(&[0.7, 0.2, 0.1])).unwrap();
        let r = average_length(&code, &other).unwrap();
        assert!(r.mean_length > r.entropy + 1e-3);
    }

    #[test]
    fn mismatch_cost_examples() {
        let code = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        let omega = implied_omega(&code).unwrap();
        assert!(mismatch_cost(&omega, &code).unwrap() < 1e-12);

        let rho = DensityOperator::new(ComplexMatrix::diag(&[0.75, 0.125, 0.125])).unwrap();
        let cost = mismatch_cost(&rho, &code).unwrap();
        assert!((cost - 0.18872187554086717).abs() < 1e-9, "cost {cost}");
        // Equals l̄ − S for a length-optimizing code.
        let r = average_length(&code, &rho).unwrap();
        assert!((cost - (r.mean_length - r.entropy)).abs() < 1e-8);

        let bad = ZefCode::from_lengths(&[2, 2, 2]).unwrap();
        assert!(matches!(
            mismatch_cost(&rho, &bad),
            Err(QcodeError::NotLengthOptimizing(_))
        ));
    }

    #[test]
    fn off_diagonal_mismatch_exceeds_classical_kl() {
        let code = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        // Coherences between codewords of different implied weights.
        let m = ComplexMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => C64::new(0.6, 0.0),
            (1, 1) => C64::new(0.25, 0.0),
            (2, 2) => C64::new(0.15, 0.0),
            (0, 1) | (1, 0) => C64::new(0.2, 0.0),
            _ => C64::new(0.0, 0.0),
        });
        let rho = DensityOperator::new(m).unwrap();
        let quantum = mismatch_cost(&rho, &code).unwrap();
        let classical = {
            let p = [0.6, 0.25, 0.15];
            let q = [0.5, 0.25, 0.25];
            p.iter()
                .zip(&q)
                .map(|(&pi, &qi)| pi * libm::log2(pi / qi))
                .sum::<f64>()
        };
        assert!(
            quantum > classical + 1e-6,
            "quantum {quantum} vs classical {classical}"
        );
    }

    #[test]
    fn shannon_fano_dyadic_spectrum_is_exact() {
        let rho = DensityOperator::new(ComplexMatrix::diag(&[0.5, 0.25, 0.25])).unwrap();
        let code = shannon_fano_lengths(&rho).unwrap();
        let mut lengths = code.lengths().to_vec();
        lengths.sort_unstable();
        assert_eq!(lengths, alloc::vec![1, 2, 2]);
        let coords = DensityOperator::new(ComplexMatrix::diag(&[0.5, 0.25, 0.25])).unwrap();
        let r = average_length(&code, &coords).unwrap();
        assert!((r.mean_length - r.entropy).abs() < 1e-12);
        assert!((r.mean_length - 1.5).abs() < 1e-12);
    }

    #[test]
    fn shannon_fano_non_dyadic() {
        let rho = DensityOperator::new(ComplexMatrix::diag(&[0.9, 0.1])).unwrap();
        let code = shannon_fano_lengths(&rho).unwrap();
        assert_eq!(code.lengths(), &[1, 4]);
        let coords = DensityOperator::new(ComplexMatrix::diag(&[0.9, 0.1])).unwrap();
        let r = average_length(&code, &coords).unwrap();
        assert!((r.mean_length - 1.3).abs() < 1e-12);
    }

    #[test]
    fn shannon_fano_maximally_mixed() {
        let rho = DensityOperator::maximally_mixed(4);
        let code = shannon_fano_lengths(&rho).unwrap();
        assert_eq!(code.lengths(), &[2, 2, 2, 2]);
    }

    #[test]
    fn shannon_fano_is_within_one_qubit_of_entropy() {
        let mut rng = SplitMix64::new(43);
        for _ in 0..100 {
            let dim = 2 + rng.next_range(7);
            let rho = random_density_from(dim, dim, &mut rng);
            let code = shannon_fano_lengths(&rho).unwrap();
            assert!(code.kraft_sum() <= 1.0 + 1e-12);
            // Codewords follow the descending spectrum.
            let weights: Vec<f64> = rho
                .eigenvalues()
                .iter()
                .rev()
                .copied()
                .filter(|&x| x > 0.0)
                .collect();
            let coords = DensityOperator::new(ComplexMatrix::diag(&weights)).unwrap();
            let r = average_length(&code, &coords).unwrap();
            assert!(r.mean_length <= r.entropy + 1.0 + 1e-9);
            assert!(r.mean_length >= r.entropy - 1e-9);
        }
    }

    #[test]
    fn condense_two_short_codewords() {
        let code = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        let a = code.codeword(0).unwrap();
        let packed = condense(&code, &[a.clone(), a.clone()]).unwrap();
        assert_eq!(packed.total_length, 2);
        // The payload occupies the first two of four qubits, zeros after:
        // the support index is divisible by 2^(4−2).
        let support: Vec<usize> = (0..packed.packed.dim())
            .filter(|&x| packed.packed[x].norm_sqr() > 0.0)
            .collect();
        assert_eq!(support.len(), 1);
        assert_eq!(support[0] % 4, 0);
    }

    #[test]
    fn condense_single_register_is_identity() {
        let code = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        let v = code.codeword(1).unwrap();
        let packed = condense(&code, core::slice::from_ref(&v)).unwrap();
        assert_eq!(packed.total_length, 2);
        for i in 0..v.dim() {
            assert!((packed.packed[i] - v[i]).norm_sqr() < 1e-24);
        }
    }

    #[test]
    fn condense_round_trip_on_basis_states() {
        let code = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        let inputs = [
            code.codeword(0).unwrap(),
            code.codeword(2).unwrap(),
            code.codeword(0).unwrap(),
        ];
        let packed = condense(&code, &inputs).unwrap();
        assert_eq!(packed.total_length, 1 + 2 + 1);
        let back = uncondense(&code, &packed).unwrap();
        assert_eq!(back.len(), 3);
        for (orig, rec) in inputs.iter().zip(&back) {
            for i in 0..orig.dim() {
                assert!(
                    (orig[i] - rec[i]).norm_sqr() < 1e-24,
                    "round trip differs at {i}"
                );
            }
        }
    }

    #[test]
    fn condense_preserves_inner_products_on_same_length_profiles() {
        let mut rng = SplitMix64::new(47);
        let code = ZefCode::from_lengths(&[2, 2, 2, 2]).unwrap();
        for _ in 0..20 {
            // Random superpositions of the four (all length-2) codewords.
            let make = |rng: &mut SplitMix64| {
                let mut v = ComplexVector::zeros(code.register_dim());
                for k in 0..4 {
                    v = v.add(&code.codeword(k).unwrap().scale(rng.next_c64_gaussian()));
                }
                v.normalized()
            };
            let u = make(&mut rng);
            let w = make(&mut rng);
            let pu = condense(&code, &[u.clone(), u.clone()]);
            let pw = condense(&code, &[w.clone(), w.clone()]);
            let (pu, pw) = (pu.unwrap(), pw.unwrap());
            let lhs = pu.packed.inner(&pw.packed);
            let want = u.inner(&w) * u.inner(&w);
            assert!((lhs - want).norm_sqr() < 1e-18);
        }
    }

    #[test]
    fn condense_input_validation() {
        let code = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        // A superposition across lengths is not a length eigenstate.
        let mixed = code
            .codeword(0)
            .unwrap()
            .add(&code.codeword(1).unwrap())
            .normalized();
        assert!(matches!(
            condense(&code, &[mixed]),
            Err(QcodeError::NotLengthEigenstate(_))
        ));

        // 8 registers of 2 qubits exceed the packing cap.
        let v = code.codeword(0).unwrap();
        let many: Vec<ComplexVector> = (0..8).map(|_| v.clone()).collect();
        assert!(matches!(
            condense(&code, &many),
            Err(QcodeError::RegisterTooLarge(16))
        ));
    }

    #[test]
    fn register_state_support_is_policed() {
        let code = ZefCode::from_lengths(&[1, 2, 2]).unwrap();
        // The prefix walk assigns payloads {0·, 10, 11}; register slot |01⟩
        // (index 1) is outside the codeword span.
        let mut v = ComplexVector::zeros(4);
        v[1] = C64::new(1.0, 0.0);
        let rho = DensityOperator::from_pure(&v).unwrap();
        assert!(matches!(
            average_length(&code, &rho),
            Err(QcodeError::SupportViolation(_))
        ));

        // A register state supported on actual codewords projects cleanly.
        let ok = DensityOperator::from_pure(&code.codeword(2).unwrap()).unwrap();
        let r = average_length(&code, &ok).unwrap();
        assert!((r.mean_length - 2.0).abs() < 1e-12);
    }
}
