//! Command-line front end.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::jets::{prolong, Flavor};
use crate::poly::{vars, MultiPoly};
use crate::ring::IntegerRing;
use crate::runner::{parse_config, run, RunConfig};

// Closed pipes (e.g. `| head`) end output quietly instead of panicking.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser, Debug)]
#[command(name = "deltaflow", version, about = "Arithmetic flows, Frobenius lifts and their verification")]
pub struct Cli {
    #[command(flatten)]
    pub opts: RunOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct RunOpts {
    /// Comma-separated odd primes
    #[arg(long, global = true)]
    pub p: Option<String>,
    #[arg(long, global = true)]
    pub prec: Option<u32>,
    /// Euler parameters `a1,a2,a3` or `random:k`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Fibers `c1:c2,...` or `sample:k`
    #[arg(long, global = true)]
    pub c: Option<String>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the JSON report here
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated checks or groups (`all`, `euler`, `lax`, `classical`, ...)
    #[arg(long, global = true)]
    pub checks: Option<String>,
    /// Plain-text `key=value` config file; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Debug: perturb the gauged Euler flow so verification must fail
    #[arg(long, global = true)]
    pub perturb: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run every check
    Selftest,
    /// Run the checks selected by the config file or --checks
    Run,
    /// Arithmetic Euler flow
    Euler {
        #[command(subcommand)]
        action: EulerAction,
    },
    /// Hasse invariant: symbolic form and cross-check
    Hasse,
    /// Point counts: a_p against the Hasse invariant
    Ap,
    /// Arithmetic Lax lifts
    Lax {
        #[command(subcommand)]
        action: VerifyAction,
    },
    /// Jet spaces
    Jet {
        #[command(subcommand)]
        action: JetAction,
    },
    /// Classical Euler, Poisson and Lax identities
    Classical {
        #[command(subcommand)]
        action: VerifyAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum EulerAction {
    Build,
    Verify,
}

#[derive(Subcommand, Debug)]
pub enum VerifyAction {
    Verify,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FlavorArg {
    Classical,
    Arithmetic,
}

#[derive(Subcommand, Debug)]
pub enum JetAction {
    /// Print the prolongation of a polynomial
    Prolong {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, value_enum, default_value_t = FlavorArg::Arithmetic)]
        flavor: FlavorArg,
    },
}

fn default_checks(cmd: &Command) -> Option<&'static str> {
    Some(match cmd {
        Command::Selftest => "all",
        Command::Run => return None,
        Command::Euler { action: EulerAction::Build } => "euler.build",
        Command::Euler { action: EulerAction::Verify } => "euler.verify",
        Command::Hasse => "hasse",
        Command::Ap => "ap",
        Command::Lax { .. } => "lax",
        Command::Classical { .. } => "classical",
        Command::Jet { .. } => return None,
    })
}

/// Merge config file, subcommand defaults and flag overrides.
pub fn build_config(cmd: &Command, opts: &RunOpts) -> Result<RunConfig> {
    let mut cfg = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if opts.config.is_none() || cfg.checks.is_empty() {
        if let Some(c) = default_checks(cmd) {
            cfg.set("checks", c)?;
        }
    }
    let flags: [(&str, Option<String>); 8] = [
        ("p", opts.p.clone()),
        ("prec", opts.prec.map(|v| v.to_string())),
        ("a", opts.a.clone()),
        ("c", opts.c.clone()),
        ("samples", opts.samples.map(|v| v.to_string())),
        ("seed", opts.seed.map(|v| v.to_string())),
        ("out", opts.out.as_ref().map(|v| v.display().to_string())),
        ("checks", opts.checks.clone()),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    if opts.perturb {
        cfg.perturb = true;
    }
    cfg.normalize()
}

fn jet_prolong(poly: &str, order: usize, flavor: FlavorArg, opts: &RunOpts) -> Result<i32> {
    let mut names: Vec<String> = Vec::new();
    for tok in poly.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
        if tok.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && !names.contains(&tok.to_string()) {
            names.push(tok.to_string());
        }
    }
    names.sort();
    let f = MultiPoly::parse(IntegerRing, vars(&names), poly)?;
    let flavor = match flavor {
        FlavorArg::Classical => Flavor::Classical,
        FlavorArg::Arithmetic => {
            let p = match &opts.p {
                Some(s) => s
                    .split(',')
                    .next()
                    .unwrap()
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("malformed prime {s:?}")))?,
                None => 5,
            };
            Flavor::Arithmetic { p }
        }
    };
    let pres = prolong(&f, order, flavor)?;
    out!("{pres}");
    if let Some(out) = &opts.out {
        let doc = serde_json::json!({
            "flavor": format!("{:?}", pres.flavor),
            "order": pres.order,
            "variables": pres.vars.iter().collect::<Vec<_>>(),
            "relations": pres.relations.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        });
        std::fs::write(out, serde_json::to_string_pretty(&doc).unwrap())
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(0)
}

/// Run a parsed command line; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Jet {
            action: JetAction::Prolong { poly, order, flavor },
        } => jet_prolong(poly, *order, *flavor, &cli.opts),
        cmd => build_config(cmd, &cli.opts).and_then(|cfg| {
            let report = run(&cfg)?;
            for r in &report.checks {
                let status = format!("{:?}", r.status).to_uppercase();
                let params = if r.params.as_object().is_some_and(|m| m.is_empty()) {
                    String::new()
                } else {
                    format!(" {}", r.params)
                };
                outln!("{status:5} {}{params} ({:.0} ms) {}", r.id, r.elapsed_ms, r.detail);
                if let Some(w) = &r.witness {
                    outln!("      witness: {w}");
                }
            }
            let s = &report.summary;
            outln!("{} checks: {} pass, {} fail, {} skip, {} error", s.total, s.pass, s.fail, s.skip, s.error);
            if let Some(out) = &cfg.out {
                std::fs::write(out, report.to_json())
                    .map_err(|e| Error::Config(format!("cannot write {}: {e}", out.display())))?;
            }
            Ok(report.exit_code())
        }),
    };
    match result {
        Ok(code) => code,
        Err(e @ (Error::Config(_) | Error::Parse(_) | Error::NotOddPrime(_) | Error::VariableMismatch(_))) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("internal error: {e}");
            3
        }
    }
}
