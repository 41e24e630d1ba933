//! `qrelent`: experiment front end for the relative-entropy toolkit.
//!
//! Subcommands load JSON inputs (matrix/state/channel/ensemble/protocol
//! schemas from the library crate), dispatch into `qrelent-core`, and emit
//! machine-readable reports on standard output: JSON by default, CSV where
//! it makes sense. Exit codes: 0 success, 1 internal failure (including
//! failed demo criteria), 2 bad input.

use clap::{Parser, Subcommand};
use qrelent::accept;
use qrelent::report::*;
use qrelent::schema::{self, parse_dims, SchemaError};
use qrelent_core::capacity::{
    additivity_experiment, channel_probe_outputs, chi_star_minimax, holevo_chi, optimize_ensemble,
    AdditivityConfig, MinimaxConfig, OptimizerConfig, SignalEnsemble,
};
use qrelent_core::coherent::{
    coherent_information, entanglement_fidelity, maximize_coherent_information, CoherentMaxConfig,
    TransmissionSetup,
};
use qrelent_core::cost::{
    equilibrium_free_energy, free_energy, free_energy_gap, thermal_state, ThermalModel,
};
use qrelent_core::distinguish::exponent_trend;
use qrelent_core::entangle::{relative_entropy_of_entanglement, ErConfig};
use qrelent_core::locc::{
    entropy_ledger, er_ledger, local_measure, local_unitary, plus_minus_basis, MultipartyState,
    ProtocolNode,
};
use qrelent_core::qcode::{average_length, codeword_coordinates, shannon_fano_lengths};
use qrelent_core::states::{donald_decompose, entropy, relative_entropy, DensityOperator};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qrelent", version, about = "Relative-entropy experiments on density operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Von Neumann entropy of a state in bits.
    Entropy {
        #[arg(long)]
        state: PathBuf,
    },
    /// Relative entropy D(rho || sigma) in bits.
    Relent {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
    },
    /// Both sides of Donald's identity for an ensemble and a reference state.
    Donald {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
    },
    /// Holevo quantity of a signal ensemble.
    Chi {
        #[arg(long)]
        ensemble: PathBuf,
    },
    /// Optimal signal ensemble of a channel with its maximal-distance
    /// certificate and the minimax cross-check.
    ChiStar {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, default_value_t = 400)]
        grid: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the full JSON report (always on; kept for interface parity).
        #[arg(long)]
        json: bool,
    },
    /// Additivity experiment for a product of two channels.
    Additivity {
        #[arg(long)]
        channel_a: PathBuf,
        #[arg(long)]
        channel_b: PathBuf,
        #[arg(long, default_value_t = 400)]
        grid: usize,
        #[arg(long, default_value_t = 2000)]
        entangled: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Thermal state, free energies, and the free-energy/relative-entropy gap.
    Thermo {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long = "kT", default_value_t = 1.0)]
        kt: f64,
        #[arg(long, default_value_t = 1.0)]
        boltzmann: f64,
        /// Probe state rho_1 for the gap F1 − F0.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Coherent information of a channel at an input, or its maximization.
    Coherent {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, conflicts_with = "maximize")]
        input: Option<PathBuf>,
        #[arg(long)]
        maximize: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Indeterminate-length coding ledger for a source state.
    Qcode {
        #[arg(long)]
        rho: PathBuf,
        /// Design the code for this state instead of rho itself.
        #[arg(long)]
        design_for: Option<PathBuf>,
    },
    /// Relative entropy of entanglement of a bipartite state.
    Er {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an LOCC protocol script and emit the branch tree with ledgers.
    Locc {
        #[arg(long, conflicts_with_all = ["demo"])]
        state: Option<PathBuf>,
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        protocol: Option<PathBuf>,
        /// Built-in demonstration; currently "ghz-to-epr".
        #[arg(long)]
        demo: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Stein-regime discrimination exponents.
    Stein {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Emit CSV rows instead of the JSON report.
        #[arg(long)]
        csv: bool,
    },
    /// Run the demo suite: one pass/fail line per acceptance criterion.
    Demo {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the JSON report instead of the line-per-criterion text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn internal_err(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn emit_json<T: serde::Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(internal_err)?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Entropy { state } => {
            let rho = schema::load_density(&state)?;
            emit_json(&EntropyReport {
                entropy: entropy(&rho),
            })
        }
        Command::Relent { rho, sigma } => {
            let r = schema::load_density(&rho)?;
            let s = schema::load_density(&sigma)?;
            let d = relative_entropy(&r, &s).map_err(input_err)?;
            emit_json(&RelentReport {
                divergence: BitsJson::from_rel_ent(d),
            })
        }
        Command::Donald { ensemble, sigma } => {
            let ens = schema::load_ensemble(&ensemble)?;
            let s = schema::load_density(&sigma)?;
            let d = donald_decompose(&ens, &s).map_err(input_err)?;
            let residual = (d.lhs.is_finite() && d.mean_to_sigma.is_finite())
                .then(|| (d.lhs.bits() - (d.avg_to_mean + d.mean_to_sigma.bits())).abs());
            emit_json(&DonaldReport {
                lhs: BitsJson::from_rel_ent(d.lhs),
                avg_to_mean: d.avg_to_mean,
                mean_to_sigma: BitsJson::from_rel_ent(d.mean_to_sigma),
                residual,
            })
        }
        Command::Chi { ensemble } => {
            let ens = schema::load_ensemble(&ensemble)?;
            let signal = SignalEnsemble::new(ens.probs().to_vec(), ens.states().to_vec())
                .map_err(input_err)?;
            emit_json(&ChiReport {
                chi: holevo_chi(&signal),
                average_entropy: entropy(signal.average()),
            })
        }
        Command::ChiStar {
            channel,
            grid,
            tol,
            seed,
            json: _,
        } => {
            let ch = schema::load_channel(&channel)?;
            let probes = channel_probe_outputs(&ch, grid, seed).map_err(input_err)?;
            let opt =
                optimize_ensemble(&probes, &OptimizerConfig::default()).map_err(internal_err)?;
            let minimax = chi_star_minimax(&probes, opt.ensemble.average(), &MinimaxConfig::default())
                .map_err(internal_err)?;
            let report = ChiStarReport::from_optimized(&opt, Some(minimax.value));
            emit_json(&report)?;
            if opt.certificate.max_distance_violation > tol {
                return Err(CliError::Internal(format!(
                    "certificate violation {} exceeds --tol {}",
                    opt.certificate.max_distance_violation, tol
                )));
            }
            Ok(())
        }
        Command::Additivity {
            channel_a,
            channel_b,
            grid,
            entangled,
            seed,
        } => {
            let a = schema::load_channel(&channel_a)?;
            let b = schema::load_channel(&channel_b)?;
            let config = AdditivityConfig {
                factor_grid: grid,
                entangled_probes: entangled,
                seed,
                ..AdditivityConfig::default()
            };
            let report = additivity_experiment(&a, &b, &config).map_err(input_err)?;
            emit_json(&AdditivityReportJson {
                chi_a: report.chi_a,
                chi_b: report.chi_b,
                chi_ab: report.chi_ab,
                gap: report.gap,
                certificate_ab: CertificateJson::from_certificate(&report.certificate_ab),
                converged: report.converged,
            })
        }
        Command::Thermo {
            hamiltonian,
            kt,
            boltzmann,
            state,
        } => {
            let h = schema::load_matrix(&hamiltonian)?;
            let temperature = kt / boltzmann;
            let tm = ThermalModel::new(h, temperature, boltzmann).map_err(input_err)?;
            let ts = thermal_state(&tm).map_err(internal_err)?;
            let f0 = equilibrium_free_energy(&tm).map_err(internal_err)?;
            let mut report = ThermoReport {
                temperature,
                boltzmann,
                log2_partition: ts.log2_partition,
                equilibrium_free_energy: f0,
                thermal_state: qrelent::schema::StateJson::from_density(&ts.state),
                state_free_energy: None,
                free_energy_gap: None,
                gap_residual: None,
            };
            if let Some(path) = state {
                let rho1 = schema::load_density(&path)?;
                let f1 = free_energy(&rho1, &tm).map_err(input_err)?;
                let gap = free_energy_gap(&rho1, &tm).map_err(input_err)?;
                report.state_free_energy = Some(f1);
                report.free_energy_gap = Some(BitsJson::from_f64(gap));
                if gap.is_finite() {
                    report.gap_residual = Some((gap - (f1 - f0)).abs());
                }
            }
            emit_json(&report)
        }
        Command::Coherent {
            channel,
            input,
            maximize,
            seed,
        } => {
            let ch = schema::load_channel(&channel)?;
            if maximize {
                let config = CoherentMaxConfig {
                    seed,
                    ..CoherentMaxConfig::default()
                };
                let r = maximize_coherent_information(&ch, &config).map_err(internal_err)?;
                emit_json(&CoherentMaxReport {
                    iq_max: r.iq_max,
                    argmax: qrelent::schema::StateJson::from_density(&r.argmax),
                    max_violation: r.certificate.max_violation,
                    support_spread: r.certificate.support_spread,
                    skipped_probes: r.certificate.skipped_probes,
                    converged: r.converged,
                })
            } else {
                let path = input.ok_or_else(|| {
                    CliError::Input("coherent needs --input FILE or --maximize".into())
                })?;
                let rho = schema::load_density(&path)?;
                let setup = TransmissionSetup::new(ch, rho.clone()).map_err(input_err)?;
                emit_json(&CoherentReport {
                    coherent_information: coherent_information(&setup).map_err(internal_err)?,
                    entanglement_fidelity: entanglement_fidelity(&setup).map_err(internal_err)?,
                    input: qrelent::schema::StateJson::from_density(&rho),
                })
            }
        }
        Command::Qcode { rho, design_for } => {
            let source = schema::load_density(&rho)?;
            let design_target = match &design_for {
                Some(path) => schema::load_density(path)?,
                None => source.clone(),
            };
            let code = shannon_fano_lengths(&design_target).map_err(input_err)?;
            // Express the source in the design target's descending eigenbasis.
            let coords = if source.dim() == design_target.dim() {
                let spec = design_target.spectrum();
                let k = code.codeword_count();
                let d = design_target.dim();
                let basis: Vec<_> = (0..d)
                    .rev()
                    .filter(|&i| spec.eigenvalues[i] > 0.0)
                    .map(|i| spec.eigenvectors.column(i))
                    .collect();
                let mut m = qrelent_core::opalg::ComplexMatrix::zeros(k, k);
                for a in 0..k {
                    let mapped = source.matrix().mul_vec(&basis[a]);
                    for b in 0..k {
                        m[(b, a)] = basis[b].inner(&mapped);
                    }
                }
                let mass = m.trace().re;
                if mass < 1.0 - 1e-9 {
                    return Err(CliError::Input(format!(
                        "source state has weight {:.3e} outside the design support",
                        1.0 - mass
                    )));
                }
                DensityOperator::new(m).map_err(input_err)?
            } else {
                codeword_coordinates(&code, &source).map_err(input_err)?
            };
            let ledger = average_length(&code, &coords).map_err(input_err)?;
            emit_json(&QcodeReport {
                lengths: code.lengths().to_vec(),
                register_len: code.register_len(),
                kraft_sum: code.kraft_sum(),
                condensable: code.is_condensable(),
                mean_length: ledger.mean_length,
                entropy: ledger.entropy,
                divergence: ledger.divergence,
                log2_kraft: ledger.log2_kraft,
                ledger_residual: (ledger.mean_length
                    - (ledger.entropy + ledger.divergence - ledger.log2_kraft))
                    .abs(),
            })
        }
        Command::Er {
            state,
            dims,
            restarts,
            seed,
        } => {
            let dims = parse_dims(&dims).map_err(CliError::Input)?;
            if dims.len() != 2 {
                return Err(CliError::Input(format!(
                    "--dims must name two factors, got {dims:?}"
                )));
            }
            let rho = schema::load_density(&state)?;
            let config = ErConfig {
                restarts,
                seed,
                ..ErConfig::default()
            };
            let r = relative_entropy_of_entanglement(&rho, (dims[0], dims[1]), &config)
                .map_err(input_err)?;
            let sigma = r.argmin.assemble().map_err(internal_err)?;
            emit_json(&ErReport {
                value: r.value,
                dims: (dims[0], dims[1]),
                terms: r.argmin.term_count(),
                restarts_used: r.restarts_used,
                converged: r.converged,
                certificate_sigma: qrelent::schema::StateJson::from_density(&sigma),
            })
        }
        Command::Locc {
            state,
            dims,
            protocol,
            demo,
            seed,
        } => {
            if let Some(name) = demo {
                if name != "ghz-to-epr" {
                    return Err(CliError::Input(format!("unknown locc demo {name:?}")));
                }
                return run_ghz_demo(seed);
            }
            let (state, dims, protocol) = match (state, dims, protocol) {
                (Some(s), Some(d), Some(p)) => (s, d, p),
                _ => {
                    return Err(CliError::Input(
                        "locc needs --state, --dims and --protocol (or --demo)".into(),
                    ))
                }
            };
            let dims = parse_dims(&dims).map_err(CliError::Input)?;
            let amplitudes = schema::load_vector(&state)?;
            let root_state = MultipartyState::new(dims, amplitudes).map_err(input_err)?;
            let steps = schema::load_protocol(&protocol)?;
            run_protocol(root_state, &steps, seed)
        }
        Command::Stein {
            rho,
            sigma,
            nmax,
            alpha,
            csv,
        } => {
            let r = schema::load_density(&rho)?;
            let s = schema::load_density(&sigma)?;
            let report = exponent_trend(&r, &s, nmax, alpha).map_err(input_err)?;
            let json = SteinReportJson::from_report(&report);
            if csv {
                print!("{}", json.to_csv());
                Ok(())
            } else {
                emit_json(&json)
            }
        }
        Command::Demo { seed, json } => {
            let report = accept::demo_report(seed);
            if json {
                emit_json(&report)?;
            } else {
                for line in &report.lines {
                    println!(
                        "{} criterion {:2} ({}): {}",
                        if line.pass { "PASS" } else { "FAIL" },
                        line.id,
                        line.name,
                        line.detail
                    );
                }
            }
            if report.all_pass {
                Ok(())
            } else {
                Err(CliError::Internal("demo criteria failed".into()))
            }
        }
    }
}

fn run_protocol(
    root_state: MultipartyState,
    steps: &[qrelent::schema::ProtocolStepJson],
    seed: u64,
) -> Result<(), CliError> {
    use qrelent::schema::ProtocolStepJson;

    let dims = root_state.dims().to_vec();
    let parties = dims.len();
    let mut frontier = vec![ProtocolNode::root(root_state)];
    let mut ledgers = Vec::new();
    let mut pruned = 0.0;

    for (step_idx, step) in steps.iter().enumerate() {
        match step {
            ProtocolStepJson::Unitary { party, matrix } => {
                let u = matrix.to_matrix("protocol")?;
                frontier = frontier
                    .iter()
                    .map(|node| local_unitary(node, *party, &u))
                    .collect::<Result<_, _>>()
                    .map_err(input_err)?;
            }
            ProtocolStepJson::Measure { party, basis } => {
                let basis: Vec<_> = basis
                    .iter()
                    .map(|b| b.to_vector("protocol"))
                    .collect::<Result<_, _>>()?;
                let mut next = Vec::new();
                for node in &frontier {
                    let outcome = local_measure(node, *party, &basis).map_err(input_err)?;
                    pruned += outcome.pruned_mass;

                    // Ledger per unmeasured party, plus the E_r ledger for
                    // the complementary pair when there are three parties.
                    for target in 0..parties {
                        if target == *party {
                            continue;
                        }
                        let el = entropy_ledger(node, &outcome.children, &[target])
                            .map_err(internal_err)?;
                        ledgers.push(LedgerReport {
                            step: step_idx,
                            measured_party: *party,
                            target: vec![target],
                            entropy_before: el.before,
                            entropy_after_avg: el.after_avg,
                            er_pair: None,
                            er_before: None,
                            er_after_avg: None,
                            entropy_drop: None,
                        });
                    }
                    if parties == 3 {
                        let pair: Vec<usize> = (0..3).filter(|p| p != party).collect();
                        let pair = (pair[0], pair[1]);
                        let er = er_ledger(
                            node,
                            &outcome.children,
                            pair,
                            &ErConfig::quick(seed ^ step_idx as u64),
                        )
                        .map_err(internal_err)?;
                        let el = entropy_ledger(node, &outcome.children, &[pair.0, pair.1])
                            .map_err(internal_err)?;
                        ledgers.push(LedgerReport {
                            step: step_idx,
                            measured_party: *party,
                            target: vec![pair.0, pair.1],
                            entropy_before: el.before,
                            entropy_after_avg: el.after_avg,
                            er_pair: Some(pair),
                            er_before: Some(er.before),
                            er_after_avg: Some(er.after_avg),
                            entropy_drop: Some(er.entropy_drop),
                        });
                    }
                    next.extend(outcome.children);
                }
                frontier = next;
            }
        }
    }

    let branches = frontier
        .iter()
        .map(|node| {
            let entropies = (0..parties)
                .map(|p| node.state.subsystem_entropy(&[p]))
                .collect::<Result<Vec<_>, _>>()
                .map_err(internal_err)?;
            Ok(BranchReport {
                record: node
                    .record
                    .iter()
                    .map(|r| RecordJson {
                        party: r.party,
                        op_id: r.op_id,
                        outcome: r.outcome,
                    })
                    .collect(),
                probability: node.probability,
                single_party_entropies: entropies,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    emit_json(&LoccReport {
        dims,
        branches,
        ledgers,
        pruned_mass: pruned,
    })
}

fn run_ghz_demo(seed: u64) -> Result<(), CliError> {
    let root = ProtocolNode::root(MultipartyState::ghz());
    let outcome = local_measure(&root, 0, &plus_minus_basis()).map_err(internal_err)?;
    let er = er_ledger(&root, &outcome.children, (1, 2), &ErConfig::quick(seed))
        .map_err(internal_err)?;
    let el = entropy_ledger(&root, &outcome.children, &[1, 2]).map_err(internal_err)?;
    let branches = outcome
        .children
        .iter()
        .map(|node| BranchReport {
            record: node
                .record
                .iter()
                .map(|r| RecordJson {
                    party: r.party,
                    op_id: r.op_id,
                    outcome: r.outcome,
                })
                .collect(),
            probability: node.probability,
            single_party_entropies: (0..3)
                .map(|p| node.state.subsystem_entropy(&[p]).unwrap())
                .collect(),
        })
        .collect();
    emit_json(&LoccReport {
        dims: vec![2, 2, 2],
        branches,
        ledgers: vec![LedgerReport {
            step: 0,
            measured_party: 0,
            target: vec![1, 2],
            entropy_before: el.before,
            entropy_after_avg: el.after_avg,
            er_pair: Some((1, 2)),
            er_before: Some(er.before),
            er_after_avg: Some(er.after_avg),
            entropy_drop: Some(er.entropy_drop),
        }],
        pruned_mass: outcome.pruned_mass,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(message)) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
