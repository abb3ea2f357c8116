//! Acceptance criteria, one line each. Exits non-zero if any fails.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use qcat::algebras::{
    ablation, build_cell_complex, em_compare, evaluate_algebras, AlgebraConfig, EmMismatch,
};
use qcat::corpus;
use qcat::limits::{
    algebra_tower, closure_suite, creation_suite, terminal_vertices, unfilled_sphere,
    ClosureInstance, ClosureReport, Status,
};
use qcat::monad::Monad;
use qcat::squiggle::{attach, enumerate_cells, enumerate_squiggles, Squiggle, Target};
use qcat::sset::{mapping_space, nerve, standard_simplex, SMap, SSet, DEFAULT_SIMPLEX_CAP};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn nerve_of(name: &str) -> Arc<SSet> {
    Arc::new(
        nerve(
            &Arc::new(corpus::category(name).unwrap()),
            3,
            DEFAULT_SIMPLEX_CAP,
        )
        .unwrap(),
    )
}

fn squiggle_identities() -> Outcome {
    let mut checked = 0usize;
    for dim in 0..=4 {
        for s in enumerate_squiggles(dim, 7) {
            let d = |x: &Squiggle, i: usize| x.face(i).map_err(e);
            let sd = |x: &Squiggle, i: usize| x.degeneracy(i).map_err(e);
            let n = dim;
            for j in 0..=n {
                for i in 0..j {
                    if n >= 2 {
                        ensure(d(&d(&s, j)?, i)? == d(&d(&s, i)?, j - 1)?, || {
                            format!("d{i}d{j} on {s}")
                        })?;
                    }
                }
                let sj = sd(&s, j)?;
                ensure(d(&sj, j)? == s && d(&sj, j + 1)? == s, || {
                    format!("d{j}s{j} or d{}s{j} on {s}", j + 1)
                })?;
                for i in 0..j {
                    ensure(d(&sj, i)? == sd(&d(&s, i)?, j - 1)?, || {
                        format!("d{i}s{j} on {s}")
                    })?;
                }
                for i in j + 2..=n + 1 {
                    ensure(d(&sj, i)? == sd(&d(&s, i - 1)?, j)?, || {
                        format!("d{i}s{j} on {s}")
                    })?;
                }
                for i in 0..=j {
                    ensure(sd(&sj, i)? == sd(&sd(&s, i)?, j + 1)?, || {
                        format!("s{i}s{j} on {s}")
                    })?;
                }
            }
            checked += 1;
        }
    }
    let sq = |dim, v: &[u8]| Squiggle::new(dim, v.to_vec()).map_err(e);
    let a = sq(5, &[6, 2, 5, 3, 4, 0, 6, 1, 3, 0])?.classify();
    ensure(a.nondegenerate && !a.atomic, || {
        "first example should be nondegenerate and non-atomic".into()
    })?;
    let b = sq(3, &[4, 2, 4, 0, 2, 1, 4, 0])?.classify();
    ensure(!b.nondegenerate && b.in_delta_plus_image, || {
        "second example should be degenerate and in the image".into()
    })?;
    let c = sq(5, &[6, 2, 5, 3, 4, 0, 5, 1, 3, 0])?.classify();
    ensure(c.nondegenerate && c.atomic, || {
        "third example should be atomic and nondegenerate".into()
    })?;
    Ok(format!("{checked} squiggles, 3 examples"))
}

fn key_fact() -> Outcome {
    // every cell of width at most 9, in any dimension
    let cells = enumerate_cells(9, 8);
    let index: HashMap<Squiggle, usize> = cells
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let mut faces = 0;
    for (k, c) in cells.iter().enumerate() {
        ensure(c.final_vertex() == Squiggle::u(), || {
            format!("{c} ends at {}", c.final_vertex())
        })?;
        for (i, a) in attach(c, &index).map_err(e)?.iter().enumerate() {
            if let Target::Cell(t) = a.target {
                ensure(t < k, || {
                    format!("face {i} of {c} needs the later cell {}", cells[t])
                })?;
            }
            faces += 1;
        }
    }
    let cx = build_cell_complex(9, 3).map_err(e)?;
    ensure(cx.violations().is_empty(), || cx.violations().join("; "))?;
    Ok(format!("{} cells, {faces} faces", cells.len()))
}

fn em_comparison() -> Outcome {
    let names = [
        "identity-chain2",
        "identity-diamond",
        "identity-bz2",
        "chain-closure",
        "diamond-closure",
        "chain4-closure",
        "grid6-closure",
        "z2-twist",
    ];
    let cfg = AlgebraConfig::default();
    let mut out = Vec::new();
    for name in names {
        let m = corpus::monad(name).map_err(e)?;
        let res = evaluate_algebras(&m, &cfg).map_err(e)?;
        ensure(res.stabilized, || format!("{name} did not stabilize"))?;
        let c = em_compare(&res).map_err(e)?;
        ensure(c.iso && c.algebra_counts == c.em_counts, || {
            format!(
                "{name}: {:?} vs {:?} ({:?})",
                c.algebra_counts, c.em_counts, c.mismatch
            )
        })?;
        out.push(format!("{name} {:?}", c.em_counts));
    }
    Ok(out.join(", "))
}

fn terminal_creation() -> Outcome {
    let cfg = AlgebraConfig::default();
    let mut done = Vec::new();
    for entry in corpus::monads() {
        let m = corpus::monad(entry.name).map_err(e)?;
        let base = m.base();
        let Some(top) = base.objects().find(|&o| base.is_terminal_object(o)) else {
            continue;
        };
        let res = evaluate_algebras(&m, &cfg).map_err(e)?;
        let lifts: Vec<u32> = (0..res.algebras.count(0) as u32)
            .filter(|&v| res.forget.at(0, v) == top)
            .collect();
        ensure(!lifts.is_empty(), || {
            format!("{}: nothing over the top", entry.name)
        })?;
        let term = lifts
            .iter()
            .find(|&&v| unfilled_sphere(&res.algebras, v, 3).is_none());
        ensure(term.is_some(), || {
            format!("{}: no lift over the top is terminal", entry.name)
        })?;
        done.push(entry.name);
    }
    ensure(done.len() >= 5, || {
        format!("only {} monads with a top", done.len())
    })?;
    Ok(done.join(", "))
}

fn meets_created() -> Outcome {
    let m = corpus::monad("diamond-closure").map_err(e)?;
    let r = creation_suite(&m, &nerve_of("discrete2"), &AlgebraConfig::default(), 3).map_err(e)?;
    let cx = r
        .limit_preservation
        .counterexample
        .clone()
        .unwrap_or_default();
    ensure(!r.limit_preservation.preserves, || {
        "t preserves binary meets".into()
    })?;
    ensure(
        cx.contains("[x,y]") && cx.contains("t(lim) = bot") && cx.contains("lim(t) = x"),
        || format!("unexpected counterexample {cx}"),
    )?;
    ensure(r.limits.status == Status::Pass, || {
        format!("{:?}", r.limits.checks.iter().find(|c| !c.ok))
    })?;
    Ok(format!("{} diagrams, {cx}", r.limits.checks.len()))
}

fn closure_pass(r: &ClosureReport) -> Result<(), String> {
    let bad = r.preconditions.iter().chain(&r.checks).find(|c| !c.ok);
    ensure(r.status == Status::Pass, || {
        format!("{:?}: {:?}", r.kind, bad)
    })
}

fn pullback(a: &Arc<SSet>, break_top: bool) -> Result<ClosureReport, String> {
    let d1 = Arc::new(standard_simplex(1, 3));
    let arrows = mapping_space(&d1, a, 3, DEFAULT_SIMPLEX_CAP).map_err(e)?;
    let top = *terminal_vertices(a, 3)
        .first()
        .ok_or("no terminal object")?;
    let f = SMap::constant(Arc::new(standard_simplex(0, 3)), a.clone(), top);
    let p = if break_top {
        SMap::constant(a.clone(), a.clone(), 0)
    } else {
        arrows.ev(1)
    };
    closure_suite(&ClosureInstance::Pullback { p, f }, 3).map_err(e)
}

fn closure_suites() -> Outcome {
    let (c2, c3, d) = (nerve_of("chain2"), nerve_of("chain3"), nerve_of("diamond"));
    closure_pass(
        &closure_suite(&ClosureInstance::Products(vec![c2.clone(), c3.clone()]), 3).map_err(e)?,
    )?;
    closure_pass(
        &closure_suite(&ClosureInstance::Products(vec![d.clone(), c2.clone()]), 3).map_err(e)?,
    )?;
    for a in [&c3, &d] {
        closure_pass(&pullback(a, false)?)?;
    }
    let cfg = AlgebraConfig {
        width_max: 7,
        ..Default::default()
    };
    let cx = build_cell_complex(7, 3).map_err(e)?;
    let cuts: Vec<usize> = cx
        .width_classes()
        .iter()
        .map(|(_, r)| r.start)
        .chain([cx.len()])
        .take(3)
        .collect();
    for name in ["chain-closure", "diamond-closure"] {
        let m = corpus::monad(name).map_err(e)?;
        closure_pass(&closure_suite(&algebra_tower(&m, &cuts, &cfg).map_err(e)?, 3).map_err(e)?)?;
        let a = Arc::new(nerve(m.base(), 3, DEFAULT_SIMPLEX_CAP).map_err(e)?);
        let t = SMap::of_functor(m.functor(), a.clone(), a).map_err(e)?;
        closure_pass(&closure_suite(&ClosureInstance::Idempotent(t), 3).map_err(e)?)?;
    }
    let d1 = Arc::new(standard_simplex(1, 3));
    for (a, top) in [(&c3, "c"), (&d, "top")] {
        let r = closure_suite(
            &ClosureInstance::Cotensor {
                a: a.clone(),
                x: d1.clone(),
            },
            3,
        )
        .map_err(e)?;
        closure_pass(&r)?;
        let want = format!("[{top},{top}]");
        ensure(r.terminal == vec![want.clone()], || {
            format!("cotensor terminal {:?}, expected {want}", r.terminal)
        })?;
    }
    Ok(format!(
        "products, pullback, tower {cuts:?}, idempotent, cotensor"
    ))
}

fn joins_created() -> Outcome {
    let m = corpus::monad("chain-closure").map_err(e)?;
    let r = creation_suite(&m, &nerve_of("discrete2"), &AlgebraConfig::default(), 3).map_err(e)?;
    ensure(r.colimit_preservation.preserves, || {
        format!(
            "t does not preserve joins: {:?}",
            r.colimit_preservation.counterexample
        )
    })?;
    ensure(r.colimits.status == Status::Pass, || {
        format!("{:?}", r.colimits.checks.iter().find(|c| !c.ok))
    })?;
    Ok(format!("{} diagrams", r.colimits.checks.len()))
}

fn negative_controls() -> Outcome {
    let cfg = AlgebraConfig {
        width_max: 5,
        ..Default::default()
    };
    let mut notes = Vec::new();
    for name in ["chain-closure", "z2-twist"] {
        let m: Arc<Monad> = corpus::monad(name).map_err(e)?;
        let a = ablation(&m, &cfg, 19).map_err(e)?;
        let k = a
            .cells_needed
            .ok_or_else(|| format!("{name} never matched"))?;
        let short = a
            .one_short
            .ok_or_else(|| format!("{name} matched with no cells"))?;
        ensure(!short.iso, || format!("{name} matched one cell short"))?;
        let why = match short.mismatch {
            Some(EmMismatch::NoStructureCell) => "no structure cell",
            Some(EmMismatch::NotAnAlgebra { .. }) => "not an algebra",
            _ => "other",
        };
        notes.push(format!("{name} {k} cells, {} breaks ({why})", k - 1));
    }
    let r = pullback(&nerve_of("chain3"), true)?;
    ensure(r.status == Status::Inapplicable, || {
        format!("broken pullback gave {:?}", r.status)
    })?;
    notes.push("pullback without top inapplicable".into());
    Ok(notes.join(", "))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, Option<u64>);
    let criteria: [Criterion; 8] = [
        (
            "squiggle simplicial identities",
            squiggle_identities,
            Some(10),
        ),
        (
            "cells end at u and attach to earlier cells",
            key_fact,
            Some(30),
        ),
        ("algebras match Eilenberg-Moore", em_comparison, Some(300)),
        ("terminal objects are created", terminal_creation, None),
        (
            "diamond meets created, not preserved",
            meets_created,
            Some(60),
        ),
        ("closure suites", closure_suites, None),
        ("chain joins created via opposites", joins_created, None),
        ("negative controls", negative_controls, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let res = match (res, limit) {
            (Ok(_), Some(s)) if took > Duration::from_secs(*s) => {
                Err(format!("took {:.1}s, limit {s}s", took.as_secs_f64()))
            }
            (r, _) => r,
        };
        match res {
            Ok(detail) => println!(
                "PASS {} {name}: {detail} ({:.1}s)",
                i + 1,
                took.as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} ({:.1}s)", i + 1, took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
