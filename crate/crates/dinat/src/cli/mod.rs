//! Command-line front end. Exit codes: 0 success, 1 negative verdict,
//! 2 bad input.

pub mod document;
pub mod render;
pub mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::dinat::{hcompose, missing_dinaturality, witness, DinatError, Transformation, WitnessTrace};
use crate::finset_oracle::{check_prediction, HexagonReport};
use crate::petri::is_component_acyclic;
use document::{Document, DocumentError, Loaded};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dinat", version, about = "Compose dinatural transformations and find where composites stay dinatural")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Vertical composite: SECOND after FIRST.
    Compose {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Substitutes FIRST into variable --var of SECOND.
    Hcomp {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        var: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reports, per component, whether dinaturality is guaranteed.
    Check {
        doc: PathBuf,
        #[arg(long)]
        component: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Prints the chain of dinaturality steps proving a component.
    Witness {
        doc: PathBuf,
        #[arg(long, default_value_t = 1)]
        component: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Writes the graph as Graphviz DOT.
    Render {
        doc: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Brute-forces the claimed dinaturality over small finite sets.
    Oracle {
        doc: PathBuf,
        #[arg(long, default_value_t = crate::finset_oracle::DEFAULT_MAX_SIZE)]
        max_size: usize,
    },
    /// Runs the built-in corpus of worked examples.
    Selftest {
        #[arg(long)]
        list: bool,
        /// Read fixtures from this directory instead of the built-in copies.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, code: i32, msg: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "error: {msg}");
        code
    }
}

fn write_output(io: &mut Io, out: Option<&Path>, text: &str) -> i32 {
    match out {
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => EXIT_OK,
            Err(e) => io.fail(EXIT_INPUT, format!("cannot write {}: {e}", path.display())),
        },
        None => {
            let _ = io.out.write_all(text.as_bytes());
            EXIT_OK
        }
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Command::Compose { first, second, out } => with_docs(&mut io, &[&first, &second], |io, docs| match document::compose_loaded(&docs[0], &docs[1]) {
            Ok(c) => write_output(io, out.as_deref(), &document::to_json(&c.document)),
            Err(e) => io.fail(EXIT_INPUT, e),
        }),
        Command::Hcomp { first, second, var, out } => with_docs(&mut io, &[&first, &second], |io, docs| {
            match hcompose(&docs[0].transformation, &docs[1].transformation, var) {
                Ok(t) => {
                    let doc = document::to_document(&t, Vec::new(), None);
                    write_output(io, out.as_deref(), &document::to_json(&doc))
                }
                Err(e) => io.fail(EXIT_INPUT, e),
            }
        }),
        Command::Check { doc, component, format } => with_docs(&mut io, &[&doc], |io, docs| cmd_check(io, &docs[0], component, format)),
        Command::Witness { doc, component, format } => with_docs(&mut io, &[&doc], |io, docs| cmd_witness(io, &docs[0], component, format)),
        Command::Render { doc, out } => with_docs(&mut io, &[&doc], |io, docs| {
            write_output(io, out.as_deref(), &render::to_dot(&docs[0].transformation))
        }),
        Command::Oracle { doc, max_size } => with_docs(&mut io, &[&doc], |io, docs| cmd_oracle(io, &docs[0], max_size)),
        Command::Selftest { list, fixtures } => selftest::run(io.out, io.err, list, fixtures.as_deref()),
    }
}

fn with_docs(io: &mut Io, paths: &[&PathBuf], f: impl FnOnce(&mut Io, Vec<Loaded>) -> i32) -> i32 {
    let mut docs = Vec::new();
    for p in paths {
        match document::read(p) {
            Ok(d) => docs.push(d),
            Err(e) => return io.fail(EXIT_INPUT, format!("{}: {e}", p.display())),
        }
    }
    f(io, docs)
}

/// Verdict for one component of a transformation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentReport {
    pub component: usize,
    pub acyclic: bool,
    pub guaranteed: bool,
    /// Constituent variables inside the component not known to be dinatural.
    pub missing: Vec<(usize, String, usize)>,
}

impl ComponentReport {
    pub fn line(&self) -> String {
        let x = self.component;
        if !self.acyclic {
            format!("component {x}: CYCLIC, no guarantee")
        } else if self.guaranteed {
            format!("component {x}: acyclic, guaranteed dinatural")
        } else {
            let list: Vec<String> = self.missing.iter().map(|(c, n, v)| format!("{n} (constituent {c}) in variable {v}")).collect();
            format!("component {x}: acyclic, no guarantee (not known dinatural: {})", list.join(", "))
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "component": self.component,
            "acyclic": self.acyclic,
            "delta": self.guaranteed as u8,
            "missing": self.missing.iter().map(|(c, n, v)| json!({"constituent": c, "name": n, "variable": v})).collect::<Vec<_>>(),
        })
    }
}

/// Component `x` (1-based) of `t`.
pub fn component_report(t: &Transformation, x: usize) -> Result<ComponentReport, DinatError> {
    let missing = missing_dinaturality(t, x)?;
    let g = t.graph().cospan();
    let c = &g.components()[x - 1];
    Ok(ComponentReport {
        component: x,
        acyclic: is_component_acyclic(g.net(), c),
        guaranteed: t.delta()[x - 1],
        missing,
    })
}

pub fn witness_json(w: &WitnessTrace) -> serde_json::Value {
    let one = |ps: &[usize]| ps.iter().map(|p| p + 1).collect::<Vec<_>>();
    json!({
        "component": w.component,
        "initial": one(&w.initial),
        "steps": w.steps.iter().map(|s| json!({
            "constituent": s.constituent_index,
            "name": s.constituent_name,
            "variable": s.variable_index,
            "transition": s.transition_id + 1,
        })).collect::<Vec<_>>(),
        "terminal": one(&w.terminal),
    })
}

fn cmd_check(io: &mut Io, doc: &Loaded, component: Option<usize>, format: Format) -> i32 {
    let t = &doc.transformation;
    let n = t.graph().cospan().num_components();
    let wanted: Vec<usize> = match component {
        Some(x) if x == 0 || x > n => {
            return io.fail(EXIT_INPUT, format!("component {x} is outside 1..={n}"));
        }
        Some(x) => vec![x],
        None => (1..=n).collect(),
    };
    let mut reports = Vec::new();
    for x in wanted {
        match component_report(t, x) {
            Ok(r) => reports.push(r),
            Err(e) => return io.fail(EXIT_INPUT, e),
        }
    }
    match format {
        Format::Text => {
            for r in &reports {
                let _ = writeln!(io.out, "{}", r.line());
            }
        }
        Format::Json => {
            let v: Vec<_> = reports.iter().map(ComponentReport::to_json).collect();
            let _ = writeln!(io.out, "{}", serde_json::to_string_pretty(&v).unwrap());
        }
    }
    if reports.iter().all(|r| r.guaranteed) {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn cmd_witness(io: &mut Io, doc: &Loaded, component: usize, format: Format) -> i32 {
    let t = &doc.transformation;
    match witness(t, component) {
        Ok(w) => {
            match format {
                Format::Text => {
                    for line in w.lines() {
                        let _ = writeln!(io.out, "{line}");
                    }
                }
                Format::Json => {
                    let _ = writeln!(io.out, "{}", serde_json::to_string_pretty(&witness_json(&w)).unwrap());
                }
            }
            EXIT_OK
        }
        Err(e @ (DinatError::ComponentCyclic { .. } | DinatError::MissingDinaturality { .. })) => io.fail(EXIT_NEGATIVE, e),
        Err(e) => io.fail(EXIT_INPUT, e),
    }
}

fn cmd_oracle(io: &mut Io, doc: &Loaded, max_size: usize) -> i32 {
    let ct = match doc.semantics() {
        Ok(Some(ct)) => ct,
        Ok(None) => return io.fail(EXIT_INPUT, format!("{} has no semantics attached", doc.document.name)),
        Err(e) => return io.fail(EXIT_INPUT, e),
    };
    let report = match check_prediction(&doc.transformation, &ct, max_size) {
        Ok(r) => r,
        Err(e) => return io.fail(EXIT_INPUT, e),
    };
    for (i, r) in &report.checked {
        let _ = match r {
            HexagonReport::Pass { checked } => writeln!(io.out, "variable {i}: pass ({checked} hexagons, sizes up to {max_size})"),
            HexagonReport::Fail { objects, f, upper, lower, .. } => {
                let others: Vec<String> = objects
                    .iter()
                    .enumerate()
                    .filter(|&(v, _)| v + 1 != *i)
                    .map(|(v, k)| format!("x{}={k}", v + 1))
                    .collect();
                let fixed = if others.is_empty() {
                    String::new()
                } else {
                    format!(" with {}", others.join(", "))
                };
                writeln!(
                    io.out,
                    "variable {i}: FAIL for f = {:?}: {} -> {}{fixed}; upper leg {:?}, lower leg {:?}",
                    f.table, f.dom, f.cod, upper.table, lower.table
                )
            }
        };
    }
    for i in &report.no_guarantee {
        let _ = writeln!(io.out, "variable {i}: no guarantee claimed, not checked");
    }
    if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

/// Loads a document from JSON text; errors are input errors.
pub fn load_document(text: &str) -> Result<Loaded, DocumentError> {
    document::parse(text)
}

pub fn serialize(doc: &Document) -> String {
    document::to_json(doc)
}
