//! Typed report structures emitted by the CLI. Every report serializes to
//! JSON and parses back under the same schema; values that can be infinite
//! (relative entropies) are carried as a finite flag plus an optional number
//! so the JSON stays standard.

use crate::schema::{MatrixJson, StateJson};
use qrelent_core::capacity::{OptimalityCertificate, OptimizedEnsemble};
use qrelent_core::states::RelEntValue;
use serde::{Deserialize, Serialize};

/// A possibly-infinite quantity in bits.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct BitsJson {
    pub finite: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<f64>,
}

impl BitsJson {
    pub fn from_rel_ent(v: RelEntValue) -> Self {
        if v.is_finite() {
            Self {
                finite: true,
                bits: Some(v.bits()),
            }
        } else {
            Self {
                finite: false,
                bits: None,
            }
        }
    }

    pub fn from_f64(v: f64) -> Self {
        Self {
            finite: v.is_finite(),
            bits: v.is_finite().then_some(v),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntropyReport {
    #[serde(rename = "S")]
    pub entropy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelentReport {
    #[serde(rename = "D")]
    pub divergence: BitsJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DonaldReport {
    pub lhs: BitsJson,
    pub avg_to_mean: f64,
    pub mean_to_sigma: BitsJson,
    /// |lhs − (avg_to_mean + mean_to_sigma)| when all parts are finite.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChiReport {
    pub chi: f64,
    pub average_entropy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    pub chi_star: f64,
    pub max_distance_violation: BitsJson,
    pub equal_distance_spread: f64,
    pub support_ok: bool,
    pub grid_size: usize,
}

impl CertificateJson {
    pub fn from_certificate(c: &OptimalityCertificate) -> Self {
        Self {
            chi_star: c.chi_star,
            max_distance_violation: BitsJson::from_f64(c.max_distance_violation),
            equal_distance_spread: c.equal_distance_spread,
            support_ok: c.support_ok,
            grid_size: c.grid_size,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub probs: Vec<f64>,
    pub outputs: Vec<StateJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChiStarReport {
    pub chi_star: f64,
    pub certificate: CertificateJson,
    pub ensemble: EnsembleReport,
    pub sweeps: usize,
    pub converged: bool,
    /// χ at the end of every sweep, thinned to at most 200 samples.
    pub iteration_trace: Vec<f64>,
    pub minimax_value: Option<f64>,
}

impl ChiStarReport {
    pub fn from_optimized(opt: &OptimizedEnsemble, minimax_value: Option<f64>) -> Self {
        let trace = if opt.chi_trace.len() > 200 {
            let stride = opt.chi_trace.len().div_ceil(200);
            opt.chi_trace.iter().copied().step_by(stride).collect()
        } else {
            opt.chi_trace.clone()
        };
        Self {
            chi_star: opt.certificate.chi_star,
            certificate: CertificateJson::from_certificate(&opt.certificate),
            ensemble: EnsembleReport {
                probs: opt.ensemble.probs().to_vec(),
                outputs: opt
                    .ensemble
                    .outputs()
                    .iter()
                    .map(StateJson::from_density)
                    .collect(),
            },
            sweeps: opt.sweeps,
            converged: opt.converged,
            iteration_trace: trace,
            minimax_value,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdditivityReportJson {
    pub chi_a: f64,
    pub chi_b: f64,
    pub chi_ab: f64,
    pub gap: f64,
    pub certificate_ab: CertificateJson,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThermoReport {
    pub temperature: f64,
    pub boltzmann: f64,
    pub log2_partition: f64,
    pub equilibrium_free_energy: f64,
    pub thermal_state: StateJson,
    /// Present when a probe state was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_free_energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_energy_gap: Option<BitsJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherentReport {
    pub coherent_information: f64,
    pub entanglement_fidelity: f64,
    pub input: StateJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherentMaxReport {
    pub iq_max: f64,
    pub argmax: StateJson,
    pub max_violation: f64,
    pub support_spread: f64,
    pub skipped_probes: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QcodeReport {
    pub lengths: Vec<usize>,
    pub register_len: usize,
    pub kraft_sum: f64,
    pub condensable: bool,
    pub mean_length: f64,
    #[serde(rename = "S")]
    pub entropy: f64,
    #[serde(rename = "D")]
    pub divergence: f64,
    pub log2_kraft: f64,
    /// mean_length − (S + D − log2 K).
    pub ledger_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErReport {
    pub value: f64,
    pub dims: (usize, usize),
    pub terms: usize,
    pub restarts_used: usize,
    pub converged: bool,
    pub certificate_sigma: StateJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecordJson {
    pub party: usize,
    pub op_id: usize,
    pub outcome: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchReport {
    pub record: Vec<RecordJson>,
    pub probability: f64,
    pub single_party_entropies: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerReport {
    pub step: usize,
    pub measured_party: usize,
    pub target: Vec<usize>,
    pub entropy_before: f64,
    pub entropy_after_avg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub er_pair: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub er_before: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub er_after_avg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_drop: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoccReport {
    pub dims: Vec<usize>,
    pub branches: Vec<BranchReport>,
    pub ledgers: Vec<LedgerReport>,
    pub pruned_mass: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteinRow {
    pub n: usize,
    pub beta: f64,
    pub exponent: BitsJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteinReportJson {
    pub alpha: f64,
    pub target: BitsJson,
    pub rows: Vec<SteinRow>,
    pub alpha_sensitivity: Vec<(f64, Vec<BitsJson>)>,
    pub trend_ok: bool,
}

impl SteinReportJson {
    pub fn from_report(r: &qrelent_core::distinguish::SteinReport) -> Self {
        Self {
            alpha: r.alpha,
            target: BitsJson::from_rel_ent(r.target),
            rows: r
                .n_values
                .iter()
                .zip(r.betas.iter().zip(&r.exponents))
                .map(|(&n, (&beta, &exponent))| SteinRow {
                    n,
                    beta,
                    exponent: BitsJson::from_f64(exponent),
                })
                .collect(),
            alpha_sensitivity: r
                .alpha_sensitivity
                .iter()
                .map(|(a, seq)| (*a, seq.iter().map(|&e| BitsJson::from_f64(e)).collect()))
                .collect(),
            trend_ok: r.trend_ok,
        }
    }

    /// CSV rows: n,beta,exponent per line with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,beta,exponent\n");
        for row in &self.rows {
            let e = row
                .exponent
                .bits
                .map(|x| x.to_string())
                .unwrap_or_else(|| "inf".into());
            out.push_str(&format!("{},{},{}\n", row.n, row.beta, e));
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionLine {
    pub id: usize,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemoReport {
    pub seed: u64,
    pub lines: Vec<CriterionLine>,
    pub all_pass: bool,
}

/// A vector report reuses the matrix layout with one column.
pub fn vector_json(v: &qrelent_core::opalg::ComplexVector) -> MatrixJson {
    MatrixJson {
        rows: v.dim(),
        cols: 1,
        data: v.as_slice().iter().map(|c| [c.re, c.im]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_json_encodes_infinity_as_standard_json() {
        let inf = BitsJson::from_rel_ent(RelEntValue::INFINITE);
        let text = serde_json::to_string(&inf).unwrap();
        assert_eq!(text, r#"{"finite":false}"#);
        let back: BitsJson = serde_json::from_str(&text).unwrap();
        assert!(!back.finite);

        let fin = BitsJson::from_f64(1.5);
        let text = serde_json::to_string(&fin).unwrap();
        let back: BitsJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.bits, Some(1.5));
    }

    #[test]
    fn entropy_report_uses_the_s_key() {
        let text = serde_json::to_string(&EntropyReport { entropy: 1.0 }).unwrap();
        assert_eq!(text, r#"{"S":1.0}"#);
    }
}
