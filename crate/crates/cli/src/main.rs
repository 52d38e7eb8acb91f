//! Command-line front end for the experiment drivers.

mod parse;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rearrange_core::generators::GeneratorSpec;
use rearrange_core::lab::{
    compute_c, dyadic_taus, eta_bound_experiment, experiment_search, extraction_demo,
    invariant_suite, stable_tail_experiment, transfer_growth_experiment, Comparison,
    EtaBoundConfig, EtaBoundKind, ExperimentReport, ExtractionConfig, InvariantConfig,
    InvariantGroup, SequenceKind, StableTailConfig, TransferConfig, GAMMA_AGREEMENT_TOL,
};
use rearrange_core::subspaces::{eta_profile, BudgetRule, SearchConfig};
use rearrange_core::{Error, GridFunction, SpaceSpec};

#[derive(Parser, Debug)]
#[command(name = "rearrange-lab", version, about = "Experiments on rearrangement-invariant norms and subspace growth")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Grid size 2^k; each experiment has its own default when omitted (16 for grid-level commands).
    #[arg(long, global = true)]
    grid_log2: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random restarts of the coefficient search.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Comma list of τ values or `dyadic:k` for 2^-k..2^-1.
    #[arg(long, global = true, value_parser = parse::tau_grid)]
    tau_grid: Option<parse::Floats>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StarKind {
    Rademacher,
    Stable,
    Control,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sequence {
    DeltaSystem,
    NestedSpikes,
    DisjointBlocks,
    NestedTail,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Rule {
    ExactSet,
    WorstCase,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// η profile of a generated span on the τ grid.
    Eta {
        /// rademacher:n, stable:p:n[:seed], weighted:p:r:n, blocks:n, nested-tail:n, indicator:tau or JSON.
        #[arg(long, value_parser = parse::family, default_value = "rademacher:4")]
        family: rearrange_core::generators::Family,
    },
    /// Lower growth of η* for Rademacher or stable spans, or the constant control.
    EtaStar {
        #[arg(long, value_enum, default_value_t = StarKind::Rademacher)]
        kind: StarKind,
        /// Number of generators (default 12 for Rademacher, 4 for stable).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1.5)]
        p: f64,
    },
    /// Norms of a function in a list of spaces.
    Norms {
        /// Grid function in the grid CSV form (`n_cells=N` then one value per line); defaults to the first generator of --family.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_parser = parse::family, default_value = "nested-tail:1")]
        family: rearrange_core::generators::Family,
        /// l1, linf, lp:p, lorentz:a, marcinkiewicz:a[:ac], orlicz[:ac] or JSON; repeatable.
        #[arg(long = "space")]
        spaces: Vec<String>,
    },
    /// Empirical tail of normalized stable sums against C(p)λ^-p.
    StableTail {
        #[arg(long, default_value_t = 1.5)]
        p: f64,
        #[arg(long, default_value_t = 1024)]
        terms: usize,
        #[arg(long, default_value_t = 64)]
        seeds: usize,
        #[arg(long, value_parser = parse::float_list)]
        lambdas: Option<parse::Floats>,
    },
    /// L_s and L_q against L_1 on weighted Rademacher spans.
    Transfer {
        #[arg(long, default_value_t = 1.25)]
        p: f64,
        #[arg(long, default_value_t = 1.75)]
        r: f64,
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long)]
        no_controls: bool,
    },
    /// Almost disjoint extraction demo.
    Extract {
        #[arg(long, value_enum, default_value_t = Sequence::DeltaSystem)]
        sequence: Sequence,
        #[arg(long, default_value_t = 8)]
        len: usize,
        /// Overrides the default space of the sequence.
        #[arg(long)]
        space: Option<String>,
        #[arg(long, value_enum, default_value_t = Rule::ExactSet)]
        rule: Rule,
    },
    /// Randomized invariant suite.
    Invariants {
        #[arg(long, value_delimiter = ',')]
        groups: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        functions: usize,
    },
    /// The stable tail constant C(p) and its truncated-integral variant.
    Cp {
        #[arg(long, default_value_t = 1.5)]
        p: f64,
    },
}

/// Configuration problems exit with 2, failed runs with 1.
enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Validation(_) | Error::Parse(_) | Error::Dimension { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Run(e.to_string()),
        }
    }
}

fn search(common: &Common, base: SearchConfig) -> SearchConfig {
    SearchConfig {
        seed: common.seed,
        n_restarts: common.restarts.unwrap_or(base.n_restarts),
        ..base
    }
}

fn n_cells(common: &Common, default_log2: u32) -> Result<usize, Failure> {
    let k = common.grid_log2.unwrap_or(default_log2);
    if k > 30 {
        return Err(Failure::Config(format!("--grid-log2 {k} exceeds 30")));
    }
    Ok(1usize << k)
}

fn group(name: &str) -> Result<InvariantGroup, Failure> {
    serde_json::from_value(serde_json::Value::String(name.replace('-', "_")))
        .map_err(|_| Failure::Config(format!("unknown invariant group {name:?}")))
}

fn run(cli: &Cli) -> Result<ExperimentReport, Failure> {
    let c = &cli.common;
    let started = Instant::now();
    Ok(match &cli.command {
        Command::Eta { family } => {
            let spec = GeneratorSpec::new(family.clone(), n_cells(c, 16)?);
            let span = spec.build()?;
            let mut taus = c.tau_grid.clone().map(|f| f.0).unwrap_or_else(|| dyadic_taus(1, 10));
            taus.sort_by(f64::total_cmp);
            let cfg = search(c, experiment_search(c.seed));
            let prof = eta_profile(&span, &taus, &cfg)?;
            let mut r = ExperimentReport::new(
                "eta",
                &serde_json::json!({ "generator": spec, "taus": taus, "search": cfg }),
            );
            r.curve("eta", "tau", prof.taus.clone(), prof.eta.clone());
            r.curve("search_spread", "tau", prof.taus.clone(), prof.spread.clone());
            let v = prof.bound_violations(1e-12);
            r.check("profile_bound_violations", v.len() as f64, Comparison::AtMost, 0.0);
            for w in span.warnings() {
                r.note(w.clone());
            }
            r.finish(started)
        }
        Command::EtaStar { kind, n, p } => {
            let mut cfg = match kind {
                StarKind::Rademacher => EtaBoundConfig::rademacher(n.unwrap_or(12)),
                StarKind::Stable => {
                    let mut cfg = EtaBoundConfig::stable(*p, c.seed);
                    if let (Some(n), EtaBoundKind::Stable { n: m, .. }) = (n, &mut cfg.kind) {
                        *m = *n;
                    }
                    cfg
                }
                StarKind::Control => EtaBoundConfig::control(1 << 10),
            };
            if c.grid_log2.is_some() {
                cfg.n_cells = n_cells(c, 0)?;
            }
            if let Some(t) = &c.tau_grid {
                cfg.taus = t.0.clone();
            }
            cfg.search = search(c, cfg.search);
            eta_bound_experiment(&cfg)?
        }
        Command::Norms { input, family, spaces } => {
            let n = n_cells(c, 16)?;
            let x = match input {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
                    GridFunction::from_csv(&text)?
                }
                None => GeneratorSpec::new(family.clone(), n).build()?.generators()[0].clone(),
            };
            let names = if spaces.is_empty() {
                vec!["l1".into(), "lp:2".into(), "linf".into(), "lorentz:0.5".into(), "marcinkiewicz:0.5".into(), "orlicz".into()]
            } else {
                spaces.clone()
            };
            let specs = names
                .iter()
                .map(|s| parse::space(s, x.n_cells()).map_err(Failure::Config))
                .collect::<Result<Vec<SpaceSpec>, _>>()?;
            let mut r = ExperimentReport::new(
                "norms",
                &serde_json::json!({ "spaces": names, "n_cells": x.n_cells(), "input": input }),
            );
            for (name, s) in names.iter().zip(&specs) {
                r.fit(&format!("norm[{name}]"), s.norm(&x)?, 0.0);
                r.fit(&format!("normalized_norm[{name}]"), s.normalized_norm(&x)?, 0.0);
            }
            r.finish(started)
        }
        Command::StableTail { p, terms, seeds, lambdas } => {
            let mut cfg = StableTailConfig {
                p: *p,
                n_terms: *terms,
                n_seeds: *seeds,
                n_cells: n_cells(c, 16)?,
                seed: c.seed,
                ..StableTailConfig::default()
            };
            if let Some(l) = lambdas {
                cfg.lambdas = l.0.clone();
            }
            stable_tail_experiment(&cfg)?
        }
        Command::Transfer { p, r, n_min, n_max, no_controls } => {
            let base = TransferConfig::default();
            let cfg = TransferConfig {
                p: *p,
                r: *r,
                n_min: *n_min,
                n_max: *n_max,
                n_cells: n_cells(c, base.n_cells.trailing_zeros())?,
                search: search(c, experiment_search(c.seed)),
                controls: !no_controls,
                ..base
            };
            transfer_growth_experiment(&cfg)?
        }
        Command::Extract { sequence, len, space, rule } => {
            let n = n_cells(c, 16)?;
            let kind = match sequence {
                Sequence::DeltaSystem => SequenceKind::DeltaSystem { len: *len },
                Sequence::NestedSpikes => SequenceKind::NestedSpikes { len: *len },
                Sequence::DisjointBlocks => SequenceKind::DisjointBlocks { len: *len },
                Sequence::NestedTail => SequenceKind::NestedTail { len: *len },
            };
            let mut cfg = ExtractionConfig::for_sequence(kind, n)?;
            if let Some(s) = space {
                cfg.space = parse::space(s, n).map_err(Failure::Config)?;
            }
            cfg.rule = match rule {
                Rule::ExactSet => BudgetRule::ExactSet,
                Rule::WorstCase => BudgetRule::WorstCase,
            };
            extraction_demo(&cfg)?
        }
        Command::Invariants { groups, functions } => {
            let mut cfg = InvariantConfig {
                seed: c.seed,
                n_functions: *functions,
                ..InvariantConfig::default()
            };
            if !groups.is_empty() {
                cfg.groups = groups.iter().map(|g| group(g)).collect::<Result<_, _>>()?;
            }
            invariant_suite(&cfg)?
        }
        Command::Cp { p } => {
            let k = compute_c(*p)?;
            let mut r = ExperimentReport::new("cp", &serde_json::json!({ "p": p }));
            r.fit("c_inf", k.c, 0.0);
            r.fit("c_gamma", k.c_gamma, 0.0);
            r.fit("c_unit", k.c_unit, 0.0);
            r.check("gamma_agreement", k.agreement, Comparison::AtMost, GAMMA_AGREEMENT_TOL);
            r.report_only("c_unit_over_c_inf", k.c_unit / k.c, Comparison::Above, 2.0);
            r.finish(started)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Run(msg)) => {
            eprintln!("run failed: {msg}");
            return ExitCode::from(1);
        }
    };
    let text = match cli.common.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => {
            // A closed pipe (`| head`) is not an error worth a panic.
            let mut out = std::io::stdout().lock();
            if let Err(e) = writeln!(out, "{text}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("cannot write report: {e}");
                    return ExitCode::from(1);
                }
            }
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
