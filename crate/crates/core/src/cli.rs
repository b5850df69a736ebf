//! The `plonka` command line. Exit codes: 0 on success, 1 when a property
//! or precondition fails, 2 on malformed input.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::builders::{
    complex_algebra_bounded, example_fig1, group_antichain, pz2, two_component_sum, DEFAULT_MONOID_BOUND,
};
use crate::enumerate::{property_sweep, Dedupe, SweepConfig};
use crate::error::Error;
use crate::format::{AlgebraFile, MonoidFile, SystemFile};
use crate::order_sum::compose_residuated;
use crate::plonka::{decompose, Decomposition};
use crate::poset::FinitePoset;
use crate::residuated::{verify_residuated_poset, HCondition, ResiduatedPoset};
use crate::signature::Algebra;
use crate::table::Table;

#[derive(Debug, Parser)]
#[command(name = "plonka", version, about = "Finite residuated posets and their Płonka sum decompositions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    Fig1,
    Pz2,
    Sum2,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify an algebra file and report balance, H1–H6, and components.
    Check {
        /// Algebra file, or `-` for stdin.
        path: PathBuf,
    },
    /// Split an algebra into components and transition maps.
    Decompose {
        path: PathBuf,
        /// Write the system file here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a DOT diagram with one cluster per component.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Build the algebra of a system file.
    Compose {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The complex algebra of a monoid file.
    Complex {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MONOID_BOUND)]
        max_monoid: usize,
    },
    /// Print a built-in example as an algebra file.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a property on every enumerated algebra up to a size.
    Sweep {
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        property: String,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        up_to_iso: bool,
        /// Skip the H4–H6 precondition of decompose (harness self-test).
        #[arg(long, hide = true)]
        planted_bug: bool,
        /// Write the counterexample here, if one is found.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Malformed(_) | Error::UnknownLabel(_) | Error::CycleError { .. } | Error::Io(_) => 2,
            Error::UnknownProperty(_) | Error::SizeBound { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn read_input(path: &Path, stdin: &mut dyn Read) -> Result<String, Failure> {
    let mut text = String::new();
    if path == Path::new("-") {
        stdin.read_to_string(&mut text).map_err(Error::from)?;
    } else {
        text = std::fs::read_to_string(path).map_err(Error::from)?;
    }
    Ok(text)
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(Error::from)?;
    Ok(())
}

/// Writes `text` to `out` when given, otherwise to stdout.
fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> CmdResult {
    match out {
        Some(p) => write_file(p, text),
        None => {
            writeln!(stdout, "{text}").map_err(Error::from)?;
            Ok(())
        }
    }
}

/// Parses, verifies, and returns the algebra; a failed verification is
/// printed and reported with exit code 1.
fn load_algebra(text: &str, stdout: &mut dyn Write) -> Result<(String, ResiduatedPoset), Failure> {
    let file = AlgebraFile::from_json(text)?;
    let raw = file.to_raw()?;
    let report = verify_residuated_poset(&raw);
    if !report.ok() {
        let _ = write!(stdout, "{report}");
        let c = report.first_failure().expect("failing report");
        return Err(Failure {
            code: 1,
            message: format!("not a residuated poset: {}", c.name),
        });
    }
    Ok((file.name.clone(), ResiduatedPoset::from_raw(raw)?))
}

fn set(a: &ResiduatedPoset, elems: &[usize]) -> String {
    format!("{{{}}}", a.labels_of(elems).join(", "))
}

/// Balance, H1–H6, positive idempotents, and components when they exist.
fn structure_report(a: &ResiduatedPoset) -> String {
    let mut s = String::new();
    let balanced = a.is_balanced();
    let _ = writeln!(s, "balanced: {}", balanced.verdict);
    if !balanced.agree() {
        let _ = writeln!(s, "  warning: the nine balanced conditions disagree");
    }
    for k in HCondition::ALL {
        let h = a.check_h(k);
        match h.witness {
            None => {
                let _ = writeln!(s, "{k}: true");
            }
            Some((x, y)) => {
                let _ = writeln!(s, "{k}: false at ({}, {})", a.label(x), a.label(y));
            }
        }
    }
    match a.positive_idempotents() {
        Ok(idp) => {
            let _ = writeln!(s, "Idp: {}", set(a, &idp));
        }
        Err(e) => {
            let _ = writeln!(s, "Idp: {e}");
        }
    }
    let _ = writeln!(s, "integrally closed: {}", a.is_integrally_closed());
    match a.require_component_closure().and_then(|_| a.component_partition()) {
        Ok(part) => {
            let _ = writeln!(s, "components:");
            for (p, class) in part.idp.iter().zip(&part.classes) {
                let _ = writeln!(s, "  A_{} = {}", a.label(*p), set(a, class));
            }
        }
        Err(e) => {
            let _ = writeln!(s, "components: unavailable ({e})");
        }
    }
    s
}

fn cmd_check(path: &Path, stdin: &mut dyn Read, stdout: &mut dyn Write) -> CmdResult {
    let text = read_input(path, stdin)?;
    let (name, a) = load_algebra(&text, stdout)?;
    let mut s = format!("{name}: residuated poset with {} elements\n", a.len());
    s.push_str(&structure_report(&a));
    write!(stdout, "{s}").map_err(Error::from)?;
    Ok(())
}

fn map_tables(a: &ResiduatedPoset, d: &Decomposition) -> String {
    let mut s = String::new();
    let sys = &d.system;
    for (p, q) in sys.index.arrows().into_iter().filter(|&(p, q)| p != q) {
        let (lp, lq) = (&sys.index.labels[p], &sys.index.labels[q]);
        let _ = writeln!(s, "  {lp} ≤ {lq}:");
        for (x, &member) in d.members[p].iter().enumerate() {
            let phi = d.members[q][sys.phi[&(p, q)][x]];
            let psi = d.members[q][sys.psi[&(p, q)][x]];
            let _ = writeln!(
                s,
                "    {:>4}  φ ↦ {:<4}  ψ ↦ {}",
                a.label(member),
                a.label(phi),
                a.label(psi)
            );
        }
    }
    s
}

/// The order's Hasse diagram with one cluster per component.
pub fn decomposition_dot(a: &ResiduatedPoset, d: &Decomposition) -> String {
    let mut s = String::from("digraph \"decomposition\" {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    for (c, members) in d.members.iter().enumerate() {
        let _ = writeln!(s, "  subgraph \"cluster_{c}\" {{");
        let _ = writeln!(s, "    label=\"A_{}\";", d.system.index.labels[c]);
        for &m in members {
            let _ = writeln!(s, "    n{m} [label=\"{}\"];", a.label(m).replace('"', "\\\""));
        }
        s.push_str("  }\n");
    }
    for (x, y) in a.poset().hasse() {
        let _ = writeln!(s, "  n{x} -> n{y};");
    }
    s.push_str("}\n");
    s
}

fn cmd_decompose(
    path: &Path,
    out: &Option<PathBuf>,
    dot: &Option<PathBuf>,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> CmdResult {
    let text = read_input(path, stdin)?;
    let (name, a) = load_algebra(&text, stdout)?;
    let mut s = format!("{name}: residuated poset with {} elements\n", a.len());
    s.push_str(&structure_report(&a));
    let result = decompose(&a);
    let d = match result {
        Ok(d) => d,
        Err(e) => {
            write!(stdout, "{s}").map_err(Error::from)?;
            return Err(e.into());
        }
    };
    let _ = writeln!(s, "decomposition: {} components", d.members.len());
    let _ = writeln!(s, "index join table:");
    let idx = &d.system.index;
    for p in 0..idx.len() {
        let row: Vec<&str> = (0..idx.len()).map(|q| idx.labels[idx.join(p, q)].as_str()).collect();
        let _ = writeln!(s, "  {:>4} | {}", idx.labels[p], row.join(" "));
    }
    let _ = writeln!(s, "maps:");
    s.push_str(&map_tables(&a, &d));
    write!(stdout, "{s}").map_err(Error::from)?;
    if let Some(p) = out {
        write_file(p, &SystemFile::from_system(&d.system).to_json())?;
    }
    if let Some(p) = dot {
        write_file(p, &decomposition_dot(&a, &d))?;
    }
    Ok(())
}

/// Drops the `p.` prefix when the local labels are already distinct.
fn plain_labels(a: &ResiduatedPoset, prefixes: &[String]) -> ResiduatedPoset {
    let labels: Vec<String> = (0..a.len())
        .map(|e| {
            let l = a.label(e);
            prefixes
                .iter()
                .find_map(|p| l.strip_prefix(&format!("{p}.")))
                .unwrap_or(l)
                .to_string()
        })
        .collect();
    let mut seen = std::collections::HashSet::new();
    if labels.iter().all(|l| seen.insert(l.clone())) {
        a.with_labels(labels).unwrap_or_else(|_| a.clone())
    } else {
        a.clone()
    }
}

fn cmd_compose(path: &Path, out: &Option<PathBuf>, stdin: &mut dyn Read, stdout: &mut dyn Write) -> CmdResult {
    let text = read_input(path, stdin)?;
    let sys = SystemFile::from_json(&text)?.to_system()?;
    let a = compose_residuated(&sys)?;
    let a = plain_labels(&a, &sys.index.labels);
    let file = AlgebraFile::from_algebra("composed", &a, false);
    emit(out, &file.to_json(), stdout)
}

fn cmd_complex(path: &Path, out: &Option<PathBuf>, max: usize, stdin: &mut dyn Read, stdout: &mut dyn Write) -> CmdResult {
    let text = read_input(path, stdin)?;
    let file = MonoidFile::from_json(&text)?;
    let m = file.to_monoid()?;
    let a = complex_algebra_bounded(&m, max)?;
    emit(out, &AlgebraFile::from_algebra(format!("P({})", file.name), &a, false).to_json(), stdout)
}

/// `Z₂ ⊎ 3` over `1 < 2`: the 2-element group below a 3-element chain, with
/// `φ` constant at the top of the chain and `ψ` constant at its middle.
pub fn example_sum2() -> ResiduatedPoset {
    let chain = FinitePoset::chain(vec!["⊥".into(), "m".into(), "⊤".into()]).expect("chain");
    let three = ResiduatedPoset::new(chain, 2, Table::from_fn(3, |x, y| x.min(y))).expect("meet chain is residuated");
    two_component_sum(&group_antichain(2).expect("Z₂"), &three, 1)
        .expect("the sum satisfies the composition hypotheses")
        .algebra
}

fn cmd_example(name: ExampleName, out: &Option<PathBuf>, stdout: &mut dyn Write) -> CmdResult {
    let (label, a) = match name {
        ExampleName::Fig1 => ("fig1", example_fig1()),
        ExampleName::Pz2 => ("pz2", pz2()),
        ExampleName::Sum2 => ("sum2", example_sum2()),
    };
    emit(out, &AlgebraFile::from_algebra(label, &a, false).to_json(), stdout)
}

fn cmd_sweep(cfg: SweepConfig, out: &Option<PathBuf>, stdout: &mut dyn Write) -> CmdResult {
    let outcome = property_sweep(&cfg)?;
    writeln!(stdout, "{outcome}").map_err(Error::from)?;
    match &outcome.counterexample {
        None => Ok(()),
        Some(c) => {
            if let Some(p) = out {
                write_file(p, &serde_json::to_string_pretty(&c.instance).map_err(Error::from)?)?;
            }
            Err(Failure {
                code: 1,
                message: format!("{} has a counterexample", cfg.property),
            })
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run(args: &[String], stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    let result = match &cli.command {
        Command::Check { path } => cmd_check(path, stdin, stdout),
        Command::Decompose { path, out, dot } => cmd_decompose(path, out, dot, stdin, stdout),
        Command::Compose { path, out } => cmd_compose(path, out, stdin, stdout),
        Command::Complex { path, out, max_monoid } => cmd_complex(path, out, *max_monoid, stdin, stdout),
        Command::Example { name, out } => cmd_example(*name, out, stdout),
        Command::Sweep {
            max_size,
            property,
            budget,
            up_to_iso,
            planted_bug,
            out,
        } => {
            let cfg = SweepConfig {
                max_size: *max_size,
                property: property.clone(),
                budget: *budget,
                dedupe: if *up_to_iso {
                    Dedupe::UpToIsomorphism
                } else {
                    Dedupe::Labeled
                },
                planted_bug: *planted_bug,
            };
            cmd_sweep(cfg, out, stdout)
        }
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
