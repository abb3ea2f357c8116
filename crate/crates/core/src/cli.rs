//! The `qcat` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebras::{em_compare, evaluate_algebras, report, AlgebraConfig};
use crate::corpus;
use crate::error::{Error, Result};
use crate::fincat::{CategorySpec, FinCategory, DEFAULT_MORPHISM_CAP};
use crate::limits::{
    algebra_tower, closure_suite, creation_suite, empty, has_limits_of_shape, ClosureInstance,
    ClosureKind, Status, DEFAULT_CHECK_DIM,
};
use crate::monad::Monad;
use crate::squiggle::{enumerate_cells, enumerate_squiggles, Level, Squiggle};
use crate::sset::{mapping_space, nerve, standard_simplex, SMap, SSet, DEFAULT_SIMPLEX_CAP};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INAPPLICABLE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_CAP: i32 = 4;
pub const EXIT_NO_STABILIZATION: i32 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "qcat",
    version,
    about = "Quasi-categories, squiggles and monad algebras at desk scale"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall-clock timings (makes reports non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify, enumerate or draw squiggles.
    #[command(subcommand)]
    Squiggle(SquiggleCmd),
    /// Compute the algebras of a monad and compare with Eilenberg-Moore.
    Algebras(AlgebrasArgs),
    /// Run a verification suite.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// The bundled example files.
    #[command(subcommand)]
    Examples(ExamplesCmd),
}

#[derive(Subcommand, Debug)]
pub enum SquiggleCmd {
    Classify {
        /// Comma-separated levels, e.g. 6,2,5,3,4,0,6,1,3,0
        sequence: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        json: bool,
    },
    Enumerate {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        dim: usize,
        /// Only the cells of the weight (dimension up to `--dim`).
        #[arg(long)]
        cells: bool,
        #[arg(long)]
        json: bool,
    },
    Render {
        sequence: String,
        #[arg(long)]
        dim: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Bounds {
    /// Largest cell width.
    #[arg(long, default_value_t = 9)]
    pub width: usize,
    /// Largest simplicial degree.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Largest cell dimension.
    #[arg(long, default_value_t = 3)]
    pub cell_dim: usize,
    /// Cap on tower elements per degree.
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: usize,
}

impl Bounds {
    fn config(&self, cells: Option<usize>) -> Result<AlgebraConfig> {
        if self.width == 0 || self.cell_dim == 0 {
            return Err(Error::Schema("bounds must be positive".into()));
        }
        Ok(AlgebraConfig {
            width_max: self.width,
            cell_dim_max: self.cell_dim,
            degree_max: self.dim,
            element_cap: self.cap,
            cell_limit: cells,
        })
    }
}

#[derive(Args, Debug)]
pub struct AlgebrasArgs {
    /// Monad file (or the name of a bundled one).
    pub monad: String,
    #[command(flatten)]
    pub bounds: Bounds,
    /// Stop the tower after this many cells.
    #[arg(long)]
    pub cells: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Products,
    Pullback,
    Tower,
    Idempotent,
    Cotensor,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Creation of terminal objects, limits and colimits by the forgetful map.
    Creation {
        monad: String,
        /// Diagram shape: a bundled category, a file, `empty` or `delta1`.
        #[arg(long, default_value = "discrete2")]
        shape: String,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long, default_value_t = DEFAULT_CHECK_DIM)]
        check_dim: usize,
    },
    /// Closure of terminal objects under a limit construction.
    Closure {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Categories (products, pullback, cotensor) or a monad (tower, idempotent).
        inputs: Vec<String>,
        /// Cotensor shape.
        #[arg(long, default_value = "delta1")]
        shape: String,
        /// Pullback only: use an isofibration that does not preserve the terminal object.
        #[arg(long)]
        break_top: bool,
        #[arg(long, default_value_t = DEFAULT_CHECK_DIM)]
        check_dim: usize,
    },
    /// Limits of every diagram of a shape in a category.
    Limits {
        category: String,
        #[arg(long, default_value = "discrete2")]
        shape: String,
        #[arg(long, default_value_t = DEFAULT_CHECK_DIM)]
        check_dim: usize,
    },
    /// Monad laws and the Eilenberg-Moore comparison.
    Em {
        monad: String,
        #[command(flatten)]
        bounds: Bounds,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExamplesCmd {
    List,
    /// Write bundled files into `--dir` (all of them without names).
    Emit {
        names: Vec<String>,
        #[arg(long, default_value = "examples")]
        dir: PathBuf,
    },
}

/// What a command produced: a report and the exit code it implies.
pub struct Outcome {
    pub code: i32,
    pub report: Value,
    /// Plain-text output, printed instead of the report when present.
    pub text: Option<String>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeCap { .. } => EXIT_CAP,
        Error::NoStabilization(_) => EXIT_NO_STABILIZATION,
        _ => EXIT_USAGE,
    }
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Inapplicable => EXIT_INAPPLICABLE,
    }
}

fn status_word(code: i32) -> &'static str {
    match code {
        EXIT_PASS => "pass",
        EXIT_FAIL => "fail",
        EXIT_INAPPLICABLE => "inapplicable",
        EXIT_CAP => "size-cap",
        EXIT_NO_STABILIZATION => "no-stabilization",
        _ => "error",
    }
}

fn read_input(arg: &str) -> Result<(String, Option<PathBuf>)> {
    let p = Path::new(arg);
    if p.is_file() {
        return Ok((
            std::fs::read_to_string(p)?,
            p.parent().map(Path::to_path_buf),
        ));
    }
    corpus::get(arg)
        .map(|t| (t.to_string(), None))
        .ok_or_else(|| {
            Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{arg}: no such file or bundled example"),
            ))
        })
}

pub fn load_monad(arg: &str) -> Result<Arc<Monad>> {
    let (text, dir) = read_input(arg)?;
    Ok(Arc::new(Monad::from_json_str(
        &text,
        dir.as_deref(),
        DEFAULT_MORPHISM_CAP,
    )?))
}

pub fn load_category(arg: &str) -> Result<Arc<FinCategory>> {
    let (text, _) = read_input(arg)?;
    let spec: CategorySpec =
        serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{arg}: {e}")))?;
    Ok(Arc::new(spec.build(DEFAULT_MORPHISM_CAP)?))
}

/// A diagram shape: `empty`, `delta1`, or a category whose nerve is used.
pub fn load_shape(arg: &str, bound: usize) -> Result<Arc<SSet>> {
    Ok(Arc::new(match arg {
        "empty" => empty(bound),
        "delta1" => standard_simplex(1, bound).with_name("D1"),
        _ => nerve(&load_category(arg)?, bound, DEFAULT_SIMPLEX_CAP)?,
    }))
}

fn parse_levels(s: &str) -> Result<Vec<Level>> {
    s.trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<Level>()
                .map_err(|_| Error::Schema(format!("not a level: {t:?}")))
        })
        .collect()
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let started = Instant::now();
    let mut out = match &cli.command {
        Command::Squiggle(c) => squiggle(c)?,
        Command::Algebras(a) => algebras(a)?,
        Command::Verify(v) => verify(v)?,
        Command::Examples(e) => examples(e)?,
    };
    if let Value::Object(m) = &mut out.report {
        m.insert("tool".into(), json!("qcat"));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.entry("status").or_insert(json!(status_word(out.code)));
        if cli.timing {
            m.insert("seconds".into(), json!(started.elapsed().as_secs_f64()));
        }
    }
    Ok(out)
}

fn squiggle(c: &SquiggleCmd) -> Result<Outcome> {
    match c {
        SquiggleCmd::Classify {
            sequence,
            dim,
            json,
        } => {
            let s = Squiggle::new(*dim, parse_levels(sequence)?)?;
            let cl = s.classify();
            let text = (!json).then(|| {
                let kind = if s == Squiggle::u() { "u, " } else { "" };
                format!(
                    "{s}: {kind}{}, {}, {}width {}\n",
                    if cl.nondegenerate {
                        "nondegenerate"
                    } else {
                        "degenerate"
                    },
                    if cl.atomic { "atomic" } else { "non-atomic" },
                    if cl.in_delta_plus_image {
                        "in the image of Δ₊, "
                    } else {
                        ""
                    },
                    cl.width
                )
            });
            Ok(Outcome {
                code: EXIT_PASS,
                report: json!({ "command": "squiggle classify", "classification": cl }),
                text,
            })
        }
        SquiggleCmd::Enumerate {
            width,
            dim,
            cells,
            json,
        } => {
            let list: Vec<Squiggle> = if *cells {
                enumerate_cells(*width, *dim)
            } else {
                enumerate_squiggles(*dim, *width)
            };
            let text = (!json).then(|| {
                let mut t: String = list.iter().map(|s| format!("{s}\n")).collect();
                t.push_str(&format!(
                    "{} {}\n",
                    list.len(),
                    if *cells { "cells" } else { "squiggles" }
                ));
                t
            });
            let seqs: Vec<String> = list.iter().map(|s| s.to_string()).collect();
            Ok(Outcome {
                code: EXIT_PASS,
                report: json!({ "command": "squiggle enumerate", "width": width, "dim": dim, "cells": cells, "count": seqs.len(), "squiggles": seqs }),
                text,
            })
        }
        SquiggleCmd::Render { sequence, dim } => {
            let s = Squiggle::new(*dim, parse_levels(sequence)?)?;
            let text = format!("{}\n{s}\n", s.render());
            Ok(Outcome {
                code: EXIT_PASS,
                report: json!({ "command": "squiggle render", "sequence": s.to_string() }),
                text: Some(text),
            })
        }
    }
}

fn algebras(a: &AlgebrasArgs) -> Result<Outcome> {
    let m = load_monad(&a.monad)?;
    let cfg = a.bounds.config(a.cells)?;
    let res = evaluate_algebras(&m, &cfg)?;
    let rep = report(&res)?;
    let code = if !res.stabilized && a.cells.is_none() {
        EXIT_NO_STABILIZATION
    } else {
        status_code(Status::from_bool(rep.em_compare.iso))
    };
    let mut v = serde_json::to_value(&rep)?;
    v["command"] = json!("algebras");
    v["em_compare_verdict"] = json!(if rep.em_compare.iso {
        "iso"
    } else {
        "mismatch"
    });
    Ok(Outcome {
        code,
        report: v,
        text: None,
    })
}

fn to_value<T: Serialize>(command: &str, r: &T, status: Status) -> Result<Outcome> {
    let mut v = serde_json::to_value(r)?;
    v["command"] = json!(command);
    v["status"] = json!(status);
    Ok(Outcome {
        code: status_code(status),
        report: v,
        text: None,
    })
}

fn verify(v: &VerifyCmd) -> Result<Outcome> {
    match v {
        VerifyCmd::Creation {
            monad,
            shape,
            bounds,
            check_dim,
        } => {
            let m = load_monad(monad)?;
            let x = load_shape(shape, bounds.dim)?;
            let r = creation_suite(&m, &x, &bounds.config(None)?, *check_dim)?;
            let mut out = to_value("verify creation", &r, r.status)?;
            out.report["config"] = json!(bounds.config(None)?);
            Ok(out)
        }
        VerifyCmd::Closure {
            kind,
            inputs,
            shape,
            break_top,
            check_dim,
        } => {
            let need = |n: usize| -> Result<()> {
                if inputs.len() < n {
                    return Err(Error::Schema(format!("{kind:?} needs {n} input(s)")));
                }
                Ok(())
            };
            let bound = DEFAULT_CHECK_DIM.max(*check_dim);
            let cat_nerve = |s: &str| -> Result<Arc<SSet>> {
                Ok(Arc::new(nerve(
                    &load_category(s)?,
                    bound,
                    DEFAULT_SIMPLEX_CAP,
                )?))
            };
            let instance = match kind {
                Kind::Products => {
                    need(1)?;
                    ClosureInstance::Products(
                        inputs.iter().map(|s| cat_nerve(s)).collect::<Result<_>>()?,
                    )
                }
                Kind::Cotensor => {
                    need(1)?;
                    ClosureInstance::Cotensor {
                        a: cat_nerve(&inputs[0])?,
                        x: load_shape(shape, bound)?,
                    }
                }
                Kind::Pullback => {
                    // p = ev_1: A^{Δ¹} → A pulled back along the inclusion of a terminal object
                    need(1)?;
                    let a = cat_nerve(&inputs[0])?;
                    let d1 = Arc::new(standard_simplex(1, bound));
                    let arrows = mapping_space(&d1, &a, bound, DEFAULT_SIMPLEX_CAP)?;
                    let top = crate::limits::terminal_vertices(&a, *check_dim)
                        .first()
                        .copied()
                        .ok_or_else(|| {
                            Error::Invalid(format!("{} has no terminal object", inputs[0]))
                        })?;
                    let pt = Arc::new(standard_simplex(0, bound));
                    let f = SMap::constant(pt, a.clone(), top);
                    let p = if *break_top {
                        SMap::constant(a.clone(), a.clone(), 0)
                    } else {
                        arrows.ev(1)
                    };
                    ClosureInstance::Pullback { p, f }
                }
                Kind::Tower => {
                    need(1)?;
                    let m = load_monad(&inputs[0])?;
                    let cfg = AlgebraConfig {
                        degree_max: bound,
                        ..Default::default()
                    };
                    let cx = crate::algebras::build_cell_complex(7, cfg.cell_dim_max)?;
                    let cuts: Vec<usize> = cx
                        .width_classes()
                        .iter()
                        .map(|(_, r)| r.start)
                        .chain([cx.len()])
                        .take(3)
                        .collect();
                    algebra_tower(&m, &cuts, &cfg)?
                }
                Kind::Idempotent => {
                    need(1)?;
                    let m = load_monad(&inputs[0])?;
                    let a = Arc::new(nerve(m.base(), bound, DEFAULT_SIMPLEX_CAP)?);
                    ClosureInstance::Idempotent(SMap::of_functor(m.functor(), a.clone(), a)?)
                }
            };
            let r = closure_suite(&instance, *check_dim)?;
            debug_assert_eq!(r.kind, kind_of(*kind));
            to_value("verify closure", &r, r.status)
        }
        VerifyCmd::Limits {
            category,
            shape,
            check_dim,
        } => {
            let a = Arc::new(nerve(
                &load_category(category)?,
                (*check_dim).max(1),
                DEFAULT_SIMPLEX_CAP,
            )?);
            let x = load_shape(shape, a.bound())?;
            let r = has_limits_of_shape(&a, &x, *check_dim)?;
            to_value("verify limits", &r, Status::from_bool(r.all_exist))
        }
        VerifyCmd::Em { monad, bounds } => {
            let m = load_monad(monad)?;
            let laws = m.check_laws();
            if !laws.valid {
                return to_value("verify em", &json!({ "laws": laws }), Status::Inapplicable);
            }
            let res = evaluate_algebras(&m, &bounds.config(None)?)?;
            if !res.stabilized {
                return Err(Error::NoStabilization(format!(
                    "{} within width {}",
                    m.name(),
                    bounds.width
                )));
            }
            let c = em_compare(&res)?;
            to_value(
                "verify em",
                &json!({ "laws": laws, "em_compare": c }),
                Status::from_bool(c.iso),
            )
        }
    }
}

fn kind_of(k: Kind) -> ClosureKind {
    match k {
        Kind::Products => ClosureKind::Products,
        Kind::Pullback => ClosureKind::Pullback,
        Kind::Tower => ClosureKind::Tower,
        Kind::Idempotent => ClosureKind::Idempotent,
        Kind::Cotensor => ClosureKind::Cotensor,
    }
}

fn examples(e: &ExamplesCmd) -> Result<Outcome> {
    match e {
        ExamplesCmd::List => {
            let text = corpus::ENTRIES
                .iter()
                .map(|e| {
                    format!(
                        "{:<18} {:<9} {}\n",
                        e.name,
                        format!("{:?}", e.kind).to_lowercase(),
                        e.summary
                    )
                })
                .collect();
            let names: Vec<&str> = corpus::ENTRIES.iter().map(|e| e.name).collect();
            Ok(Outcome {
                code: EXIT_PASS,
                report: json!({ "command": "examples list", "examples": names }),
                text: Some(text),
            })
        }
        ExamplesCmd::Emit { names, dir } => {
            let chosen: Vec<&corpus::Entry> = if names.is_empty() {
                corpus::ENTRIES.iter().collect()
            } else {
                names
                    .iter()
                    .map(|n| {
                        corpus::entry(n)
                            .ok_or_else(|| Error::Index(format!("no bundled example {n}")))
                    })
                    .collect::<Result<_>>()?
            };
            std::fs::create_dir_all(dir)?;
            let mut written = Vec::new();
            for e in chosen {
                let p = dir.join(format!("{}.json", e.name));
                std::fs::write(&p, e.text)?;
                written.push(p.display().to_string());
            }
            Ok(Outcome {
                code: EXIT_PASS,
                report: json!({ "command": "examples emit", "written": written }),
                text: None,
            })
        }
    }
}

/// Parses arguments, runs, writes the report and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    let (code, report, text) = match run(&cli) {
        Ok(o) => (o.code, o.report, o.text),
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("qcat: {e}");
            let report = json!({
                "tool": "qcat",
                "version": env!("CARGO_PKG_VERSION"),
                "status": status_word(code),
                "error": e.to_string(),
            });
            (code, report, None)
        }
    };
    let body = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &body) {
                eprintln!("qcat: cannot write {}: {e}", p.display());
                return EXIT_USAGE;
            }
            if let Some(t) = text {
                print!("{t}");
            }
        }
        None => print!("{}", text.unwrap_or(body)),
    }
    code
}
