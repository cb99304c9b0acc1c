//! `udn`: maximal overgroups, base sizes, fixed point ratios and uniform
//! domination numbers of permutation groups.
//!
//! Exit codes: 0 success, 1 certificate rejected, 2 inconclusive within the
//! given budget or caps, 3 input error.

mod cache;
mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use udn_core::base::Strategy;
use udn_core::group::{DEFAULT_DEGREE_CAP, DEFAULT_ENUM_CAP, DEFAULT_NODE_BUDGET};
use udn_core::overgroups::DEFAULT_BUDGET;
use udn_core::{Error, Mode};

use crate::cache::{Cache, Outcome};
use crate::commands::{BaseTarget, Loaded};
use crate::config::{Format, RunConfig};
use crate::report::Report;

#[derive(Parser)]
#[command(name = "udn", version, about = "Maximal overgroups, bases and uniform domination of permutation groups")]
struct Cli {
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Climb samples per sampler in estimated mode.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Largest group or subgroup enumerated element by element.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUM_CAP)]
    cap: u64,
    /// Largest coset action built explicitly.
    #[arg(long, global = true, default_value_t = DEFAULT_DEGREE_CAP)]
    degree_cap: u64,
    /// Node limit for exact base search and tuple limit for refutations.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    nodes: u64,
    /// Random tuples tried per search.
    #[arg(long, global = true, default_value_t = 2000)]
    trials: u64,
    #[arg(long, global = true, default_value = "certified")]
    mode: Mode,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for cached results; caching is off without it.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Recorded in reports; computations are sequential.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

/// Groups are given as `alt 7`, `sym 5`, `psl2 9`, `A7`, `L2(9)`,
/// `file PATH` or a bundled name (`m11`, `m12`, `m22`, `m23`, `j1`).
#[derive(Subcommand)]
enum Command {
    /// Degree, order and class table.
    Info { group: String },
    /// mu(G), the least number of maximal overgroups of an element.
    Mu { group: String },
    /// Maximal subgroups containing an element.
    Overgroups {
        group: String,
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        class: Option<usize>,
    },
    /// Base size of the natural action, an action on k-subsets, or the coset
    /// actions on the maximal overgroups of an element.
    Base {
        group: String,
        #[arg(long)]
        kset: Option<usize>,
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        class: Option<usize>,
        #[arg(long, default_value = "exact")]
        strategy: Strategy,
    },
    /// Fixed point ratios on the cosets of each maximal overgroup of an
    /// element, or on k-subsets.
    Fpr {
        group: String,
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        class: Option<usize>,
        #[arg(long)]
        kset: Option<usize>,
    },
    /// Probabilistic bounds Q^(G, s, c) for c = 1..c-max.
    Qhat {
        group: String,
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        class: Option<usize>,
        #[arg(long, default_value_t = 8)]
        c_max: usize,
        /// Also sweep the class of s for exact non-generation probabilities.
        #[arg(long)]
        exact: bool,
    },
    /// Bracket for the uniform domination number.
    Gamma {
        group: String,
        #[arg(long, default_value_t = 8)]
        c_max: usize,
    },
    /// Random search for a total dominating set of conjugates.
    TdsSearch {
        group: String,
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        class: Option<usize>,
        #[arg(long)]
        size: usize,
        /// Write the certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a certificate written by tds-search.
    TdsVerify { group: String, certificate: PathBuf },
    /// Arithmetic predicates for A_n.
    AltTheory { n: u64 },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } | Error::DegreeCapExceeded { .. } => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let config = RunConfig {
        seed: cli.seed,
        enum_cap: cli.cap,
        degree_cap: cli.degree_cap,
        node_budget: cli.nodes,
        climb_budget: cli.budget,
        trials: cli.trials,
        mode: cli.mode,
        workers: cli.workers,
        cache_dir: cli.cache_dir.clone(),
        format: cli.format,
    };
    if config.enum_cap == 0 || config.degree_cap == 0 || config.node_budget == 0 || config.trials == 0 {
        return Err(Error::Invalid("caps and budgets must be positive".into()));
    }
    let cache = Cache::new(config.cache_dir.clone());
    let (name, params, loaded, outcome): (&str, serde_json::Value, Option<Loaded>, Outcome) = match &cli.command {
        Command::Info { group } => {
            let l = Loaded::load(group, &config)?;
            let o = commands::info(&l, &cache, &config)?;
            ("info", json!({ "group": group }), Some(l), o)
        }
        Command::Mu { group } => {
            let l = Loaded::load(group, &config)?;
            let o = commands::mu_cmd(&l, &cache, &config)?;
            ("mu", json!({ "group": group }), Some(l), o)
        }
        Command::Overgroups { group, element, class } => {
            let l = Loaded::load(group, &config)?;
            let s = commands::pick_element(&l.group, element.as_deref(), *class)?;
            let o = commands::overgroups_cmd(&l, &cache, &config, &s)?;
            ("overgroups", json!({ "group": group, "element": s.to_string() }), Some(l), o)
        }
        Command::Base {
            group,
            kset,
            element,
            class,
            strategy,
        } => {
            let l = Loaded::load(group, &config)?;
            let s = if element.is_some() || class.is_some() {
                Some(commands::pick_element(&l.group, element.as_deref(), *class)?)
            } else {
                None
            };
            let target = match (kset, &s) {
                (Some(k), None) => BaseTarget::Ksets(*k),
                (None, Some(s)) => BaseTarget::CosetsOfOvergroups(s),
                (None, None) => BaseTarget::Natural,
                _ => return Err(Error::Invalid("--kset and an element are exclusive".into())),
            };
            let o = commands::base_cmd(&l, &cache, &config, target, *strategy)?;
            let params = json!({ "group": group, "kset": kset, "element": s.map(|x| x.to_string()), "strategy": strategy });
            ("base", params, Some(l), o)
        }
        Command::Fpr {
            group,
            element,
            class,
            kset,
        } => {
            let l = Loaded::load(group, &config)?;
            let s = if element.is_some() || class.is_some() {
                Some(commands::pick_element(&l.group, element.as_deref(), *class)?)
            } else {
                None
            };
            let o = commands::fpr_cmd(&l, &cache, &config, s.as_ref(), *kset)?;
            let params = json!({ "group": group, "element": s.map(|x| x.to_string()), "kset": kset });
            ("fpr", params, Some(l), o)
        }
        Command::Qhat {
            group,
            element,
            class,
            c_max,
            exact,
        } => {
            let l = Loaded::load(group, &config)?;
            let s = commands::pick_element(&l.group, element.as_deref(), *class)?;
            let o = commands::qhat_cmd(&l, &cache, &config, &s, *c_max, *exact)?;
            let params = json!({ "group": group, "element": s.to_string(), "c_max": c_max, "exact": exact });
            ("qhat", params, Some(l), o)
        }
        Command::Gamma { group, c_max } => {
            let l = Loaded::load(group, &config)?;
            let o = commands::gamma_cmd(&l, &cache, &config, *c_max)?;
            ("gamma", json!({ "group": group, "c_max": c_max }), Some(l), o)
        }
        Command::TdsSearch {
            group,
            element,
            class,
            size,
            out,
        } => {
            let l = Loaded::load(group, &config)?;
            let s = commands::pick_element(&l.group, element.as_deref(), *class)?;
            let o = commands::tds_search(&l, &config, &s, *size)?;
            if let (Some(path), false) = (out, o.result["certificate"].is_null()) {
                let text = serde_json::to_string_pretty(&o.result["certificate"])? + "\n";
                std::fs::write(path, text).map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
            }
            ("tds-search", json!({ "group": group, "element": s.to_string(), "size": size }), Some(l), o)
        }
        Command::TdsVerify { group, certificate } => {
            let l = Loaded::load(group, &config)?;
            let o = commands::tds_verify(&l, certificate, &config)?;
            let params = json!({ "group": group, "certificate": certificate.display().to_string() });
            ("tds-verify", params, Some(l), o)
        }
        Command::AltTheory { n } => ("alt-theory", json!({ "n": n }), None, commands::alt_theory_cmd(*n)?),
    };
    let digest = config.digest(name, &params);
    let mode = serde_json::to_value(config.mode)?.as_str().unwrap_or_default().to_string();
    let report = Report::new(name, loaded.as_ref().map(|l| l.header()), digest, config.seed, mode, &outcome);
    print!("{}", report.render(config.format));
    Ok(if name == "tds-verify" && outcome.result["valid"] == json!(false) {
        1
    } else if outcome.inconclusive {
        2
    } else {
        0
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
