//! Terminal objects, commas, absolute right liftings and limits of a shape,
//! plus the closure and creation suites built from them.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebras::{evaluate_algebras, tower_projection, AlgebraConfig, AlgebraResult};
use crate::error::{cap_check, Error, Result};
use crate::monad::Monad;
use crate::sset::{
    equalizer, is_quasi_category, isofibration_failure, mapping_space, nerve,
    product_with_projections, pullback, sphere_maps, standard_simplex, Idx, MappingSpace, SMap,
    SSet, DEFAULT_SIMPLEX_CAP,
};

pub const DEFAULT_CHECK_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inapplicable,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Inapplicable, _) | (_, Status::Inapplicable) => Status::Inapplicable,
            _ => Status::Pass,
        }
    }
}

/// An empty simplicial set truncated at `bound`.
pub fn empty(bound: usize) -> SSet {
    SSet::from_tables(
        "0",
        bound,
        vec![0; bound + 1],
        vec![Vec::new(); bound + 1],
        vec![Vec::new(); bound + 1],
        Vec::new(),
    )
    .expect("empty tables are consistent")
}

/// A sphere of dimension `n` with final vertex `v` and no filler, as its
/// faces. Checks dimensions `1..=d` (and the bound).
pub fn unfilled_sphere(a: &SSet, v: Idx, d: usize) -> Option<(usize, Vec<Idx>)> {
    for n in 1..=d.min(a.bound()) {
        let mut bad = None;
        sphere_maps(a, n, None, Some(v), &mut |faces| {
            if a.with_faces(n, faces).is_empty() {
                bad = Some(faces.to_vec());
                return false;
            }
            true
        });
        if let Some(f) = bad {
            return Some((n, f));
        }
    }
    None
}

fn ensure_quasi_category(a: &SSet, d: usize) -> Result<()> {
    if !is_quasi_category(a, d) {
        return Err(Error::Invalid(format!(
            "{} is not a quasi-category",
            a.name()
        )));
    }
    Ok(())
}

/// Every sphere of dimension `≤ d` whose final vertex is `v` fills.
pub fn is_terminal(a: &SSet, v: Idx, d: usize) -> Result<bool> {
    ensure_quasi_category(a, d)?;
    Ok(unfilled_sphere(a, v, d).is_none())
}

pub fn is_initial(a: &SSet, v: Idx, d: usize) -> Result<bool> {
    is_terminal(&a.opposite(), v, d)
}

/// All terminal vertices, without the quasi-category check.
pub fn terminal_vertices(a: &SSet, d: usize) -> Vec<Idx> {
    (0..a.count(0) as Idx)
        .filter(|&v| unfilled_sphere(a, v, d).is_none())
        .collect()
}

/// `f ↓ g` as the pullback of `B × C` against `A^{Δ¹} → A × A`.
#[derive(Debug)]
pub struct CommaResult {
    pub space: Arc<SSet>,
    pub p0: SMap,
    pub p1: SMap,
    /// The structure edge of each simplex, as a simplex of `A^{Δ¹}`.
    pub arrow: SMap,
    pub arrows: Arc<MappingSpace>,
    index: Vec<HashMap<[Idx; 3], Idx>>,
}

impl CommaResult {
    pub fn find(&self, n: usize, b: Idx, arrow: Idx, c: Idx) -> Option<Idx> {
        self.index[n].get(&[b, arrow, c]).copied()
    }
}

/// `A^{Δ¹}` with its two evaluations, shared by every comma into `A`.
#[derive(Debug, Clone)]
pub struct Arrows {
    pub space: Arc<MappingSpace>,
    ev0: SMap,
    ev1: SMap,
}

impl Arrows {
    pub fn new(a: &Arc<SSet>, bound: usize, cap: usize) -> Result<Self> {
        let d1 = Arc::new(standard_simplex(1, bound));
        let space = Arc::new(mapping_space(&d1, a, bound, cap)?);
        Ok(Arrows {
            ev0: space.ev(0),
            ev1: space.ev(1),
            space,
        })
    }

    pub fn target(&self) -> &Arc<SSet> {
        self.space.target()
    }
}

pub fn comma(f: &SMap, g: &SMap, cap: usize) -> Result<CommaResult> {
    let arrows = Arrows::new(f.cod(), f.bound().min(g.bound()), cap)?;
    comma_with(&arrows, f, g, cap)
}

/// [`comma`] against a precomputed arrow space of the common codomain.
pub fn comma_with(arrows: &Arrows, f: &SMap, g: &SMap, cap: usize) -> Result<CommaResult> {
    if **f.cod() != **g.cod() || **f.cod() != **arrows.target() {
        return Err(Error::Invalid(
            "comma of maps with different codomains".into(),
        ));
    }
    let (b, c) = (f.dom().clone(), g.dom().clone());
    let sp = arrows.space.space().clone();
    let bound = f.bound().min(g.bound()).min(sp.bound());
    let (ev0, ev1) = (&arrows.ev0, &arrows.ev1);
    let mut levels: Vec<Vec<[Idx; 3]>> = Vec::with_capacity(bound + 1);
    let mut total = 0;
    for n in 0..=bound {
        let mut over_b: HashMap<Idx, Vec<Idx>> = HashMap::new();
        for x in 0..b.count(n) as Idx {
            over_b.entry(f.at(n, x)).or_default().push(x);
        }
        let mut over_c: HashMap<Idx, Vec<Idx>> = HashMap::new();
        for y in 0..c.count(n) as Idx {
            over_c.entry(g.at(n, y)).or_default().push(y);
        }
        let mut level = Vec::new();
        for al in 0..sp.count(n) as Idx {
            let (Some(xs), Some(ys)) = (over_b.get(&ev0.at(n, al)), over_c.get(&ev1.at(n, al)))
            else {
                continue;
            };
            for &x in xs {
                for &y in ys {
                    level.push([x, al, y]);
                }
            }
        }
        total += level.len();
        cap_check("simplices of a comma", total, cap)?;
        levels.push(level);
    }
    let face = |n: usize, k: &[Idx; 3], i: usize| {
        [b.face(n, k[0], i), sp.face(n, k[1], i), c.face(n, k[2], i)]
    };
    let degen = |n: usize, k: &[Idx; 3], i: usize| {
        [
            b.degen(n, k[0], i),
            sp.degen(n, k[1], i),
            c.degen(n, k[2], i),
        ]
    };
    let labels = levels[0]
        .iter()
        .map(|k| {
            format!(
                "({},{},{})",
                b.vertex_label(k[0]),
                sp.vertex_label(k[1]),
                c.vertex_label(k[2])
            )
        })
        .collect();
    let name = format!("{}|{}", b.name(), c.name());
    let (space, index) = SSet::from_keys(&name, bound, &levels, face, degen, labels, cap)?;
    let space = Arc::new(space);
    let proj = |j: usize| -> Vec<Vec<Idx>> {
        levels
            .iter()
            .map(|l| l.iter().map(|k| k[j]).collect())
            .collect()
    };
    Ok(CommaResult {
        p0: SMap::new(space.clone(), b, proj(0))?,
        arrow: SMap::new(space.clone(), sp, proj(1))?,
        p1: SMap::new(space.clone(), c, proj(2))?,
        space,
        arrows: arrows.space.clone(),
        index,
    })
}

/// The map `v ↓_u w: f↓g → f'↓g'` induced by `u: A → A'`, `v: B → B'`,
/// `w: C → C'` with `f'v = uf` and `g'w = ug`.
pub fn comma_map(
    from: &CommaResult,
    to: &CommaResult,
    u: &SMap,
    v: &SMap,
    w: &SMap,
) -> Result<SMap> {
    let arr = from.arrows.postcompose(u, &to.arrows)?;
    comma_map_along(from, to, &arr, v, w)
}

/// [`comma_map`] with `u ∘ -` on arrow spaces already computed.
pub fn comma_map_along(
    from: &CommaResult,
    to: &CommaResult,
    arr: &SMap,
    v: &SMap,
    w: &SMap,
) -> Result<SMap> {
    let b = from.space.bound().min(to.space.bound());
    let mut table = Vec::with_capacity(b + 1);
    for n in 0..=b {
        let row = (0..from.space.count(n) as Idx)
            .map(|x| {
                let (pb, pa, pc) = (from.p0.at(n, x), from.arrow.at(n, x), from.p1.at(n, x));
                to.find(n, v.at(n, pb), arr.at(n, pa), w.at(n, pc))
                    .ok_or_else(|| Error::Invalid("the squares do not commute".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    SMap::new(from.space.clone(), to.space.clone(), table)
}

fn point(bound: usize) -> Arc<SSet> {
    Arc::new(standard_simplex(0, bound))
}

/// `f ↓ c` for a vertex `c` of the codomain.
pub fn comma_at(arrows: &Arrows, f: &SMap, c: Idx, cap: usize) -> Result<CommaResult> {
    let g = SMap::constant(point(f.bound()), f.cod().clone(), c);
    comma_with(arrows, f, &g, cap)
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftingWitness {
    pub vertex: Idx,
    pub label: String,
    /// The terminal object of `f ↓ gc`.
    pub terminal: String,
    /// Its image `ℓc` in `B`.
    pub lift: Idx,
    pub lift_label: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftingCertificate {
    pub witnesses: Vec<LiftingWitness>,
}

impl LiftingCertificate {
    pub fn lift(&self, c: Idx) -> Option<Idx> {
        self.witnesses
            .iter()
            .find(|w| w.vertex == c)
            .map(|w| w.lift)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Lifting {
    Certificate(LiftingCertificate),
    Refusal {
        vertex: Idx,
        label: String,
        reason: String,
    },
}

impl Lifting {
    pub fn certificate(&self) -> Option<&LiftingCertificate> {
        match self {
            Lifting::Certificate(c) => Some(c),
            Lifting::Refusal { .. } => None,
        }
    }
}

/// Searches `f ↓ gc` for a terminal object at every vertex `c` of `C`.
pub fn absolute_right_lifting(f: &SMap, g: &SMap, d: usize) -> Result<Lifting> {
    absolute_right_lifting_with(
        &Arrows::new(f.cod(), f.bound(), DEFAULT_SIMPLEX_CAP)?,
        f,
        g,
        d,
    )
}

pub fn absolute_right_lifting_with(
    arrows: &Arrows,
    f: &SMap,
    g: &SMap,
    d: usize,
) -> Result<Lifting> {
    let (c, b) = (g.dom(), f.dom());
    let mut witnesses = Vec::new();
    for y in 0..c.count(0) as Idx {
        let cm = comma_at(arrows, f, g.at(0, y), DEFAULT_SIMPLEX_CAP)?;
        let label = c.vertex_label(y).to_string();
        if cm.space.count(0) == 0 {
            return Ok(Lifting::Refusal {
                vertex: y,
                label,
                reason: "the comma is empty".into(),
            });
        }
        match terminal_vertices(&cm.space, d).first() {
            Some(&t) => {
                let lift = cm.p0.at(0, t);
                witnesses.push(LiftingWitness {
                    vertex: y,
                    label,
                    terminal: cm.space.vertex_label(t).to_string(),
                    lift,
                    lift_label: b.vertex_label(lift).to_string(),
                });
            }
            None => {
                return Ok(Lifting::Refusal {
                    vertex: y,
                    label,
                    reason: "the comma has no terminal object".into(),
                })
            }
        }
    }
    Ok(Lifting::Certificate(LiftingCertificate { witnesses }))
}

/// A pair `f: B → A`, `g: C → A`.
#[derive(Clone, Debug)]
pub struct LiftingProblem {
    pub f: SMap,
    pub g: SMap,
}

/// Maps from one lifting problem to another.
#[derive(Clone, Debug)]
pub struct ProblemMap {
    pub u: SMap,
    pub v: SMap,
    pub w: SMap,
}

#[derive(Clone, Debug, Serialize)]
pub struct RightExactReport {
    pub status: Status,
    pub counterexample: Option<String>,
}

/// For each vertex `c`, the induced comma map carries the terminal object of
/// `f↓gc` to a terminal object of `f'↓g'wc`.
pub fn right_exact_check(
    p: &LiftingProblem,
    q: &LiftingProblem,
    m: &ProblemMap,
    d: usize,
) -> Result<RightExactReport> {
    let commutes =
        |a: &SMap, b: &SMap, c: &SMap, e: &SMap| -> Result<bool> { Ok(a.then(b)? == c.then(e)?) };
    if !commutes(&m.v, &q.f, &p.f, &m.u)? || !commutes(&m.w, &q.g, &p.g, &m.u)? {
        return Err(Error::Invalid(
            "the transformation squares do not commute".into(),
        ));
    }
    let pa = Arrows::new(p.f.cod(), p.f.bound(), DEFAULT_SIMPLEX_CAP)?;
    let qa = if **q.f.cod() == **p.f.cod() {
        pa.clone()
    } else {
        Arrows::new(q.f.cod(), q.f.bound(), DEFAULT_SIMPLEX_CAP)?
    };
    let (Lifting::Certificate(_), Lifting::Certificate(_)) = (
        absolute_right_lifting_with(&pa, &p.f, &p.g, d)?,
        absolute_right_lifting_with(&qa, &q.f, &q.g, d)?,
    ) else {
        return Ok(RightExactReport {
            status: Status::Inapplicable,
            counterexample: Some("a lifting is missing".into()),
        });
    };
    let c = p.g.dom();
    let arr = pa.space.postcompose(&m.u, &qa.space)?;
    for y in 0..c.count(0) as Idx {
        let from = comma_at(&pa, &p.f, p.g.at(0, y), DEFAULT_SIMPLEX_CAP)?;
        let wy = m.w.at(0, y);
        let to = comma_at(&qa, &q.f, q.g.at(0, wy), DEFAULT_SIMPLEX_CAP)?;
        let pt = SMap::constant(from.p1.cod().clone(), to.p1.cod().clone(), 0);
        let map = comma_map_along(&from, &to, &arr, &m.v, &pt)?;
        let t = terminal_vertices(&from.space, d)[0];
        let image = map.at(0, t);
        if unfilled_sphere(&to.space, image, d).is_some() {
            return Ok(RightExactReport {
                status: Status::Fail,
                counterexample: Some(format!(
                    "at {}: {} goes to {}, which is not terminal",
                    c.vertex_label(y),
                    from.space.vertex_label(t),
                    to.space.vertex_label(image)
                )),
            });
        }
    }
    Ok(RightExactReport {
        status: Status::Pass,
        counterexample: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagramLimit {
    pub diagram: String,
    /// Apex of a limit cone.
    pub limit: Option<String>,
    #[serde(skip)]
    pub apex: Option<Idx>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitsReport {
    pub all_exist: bool,
    pub diagrams: Vec<DiagramLimit>,
}

/// Limits of every diagram `X → A`, through the constant-diagram map.
pub fn has_limits_of_shape(a: &Arc<SSet>, x: &Arc<SSet>, d: usize) -> Result<LimitsReport> {
    ensure_quasi_category(a, d)?;
    let ax = mapping_space(x, a, a.bound(), DEFAULT_SIMPLEX_CAP)?;
    let diag = ax.constant_map();
    let arrows = Arrows::new(ax.space(), diag.bound(), DEFAULT_SIMPLEX_CAP)?;
    let mut diagrams = Vec::new();
    for gv in 0..ax.space().count(0) as Idx {
        let cm = comma_at(&arrows, &diag, gv, DEFAULT_SIMPLEX_CAP)?;
        let apex = terminal_vertices(&cm.space, d)
            .first()
            .map(|&t| cm.p0.at(0, t));
        diagrams.push(DiagramLimit {
            diagram: ax.space().vertex_label(gv).to_string(),
            limit: apex.map(|v| a.vertex_label(v).to_string()),
            apex,
        });
    }
    Ok(LimitsReport {
        all_exist: diagrams.iter().all(|g| g.apex.is_some()),
        diagrams,
    })
}

/// A check with its outcome, as reported.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, detail: Option<String>) -> Self {
        Check {
            name: name.into(),
            ok,
            detail,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureKind {
    Products,
    Pullback,
    Tower,
    Idempotent,
    Cotensor,
}

impl std::str::FromStr for ClosureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "products" => ClosureKind::Products,
            "pullback" => ClosureKind::Pullback,
            "tower" => ClosureKind::Tower,
            "idempotent" => ClosureKind::Idempotent,
            "cotensor" => ClosureKind::Cotensor,
            _ => return Err(Error::Schema(format!("unknown closure kind {s}"))),
        })
    }
}

pub enum ClosureInstance {
    Products(Vec<Arc<SSet>>),
    /// An isofibration `p: E → B` and a map `f: A → B`.
    Pullback {
        p: SMap,
        f: SMap,
    },
    /// `maps[k]: E_{k+1} → E_k`.
    Tower(Vec<SMap>),
    Idempotent(SMap),
    Cotensor {
        a: Arc<SSet>,
        x: Arc<SSet>,
    },
}

impl ClosureInstance {
    pub fn kind(&self) -> ClosureKind {
        match self {
            ClosureInstance::Products(_) => ClosureKind::Products,
            ClosureInstance::Pullback { .. } => ClosureKind::Pullback,
            ClosureInstance::Tower(_) => ClosureKind::Tower,
            ClosureInstance::Idempotent(_) => ClosureKind::Idempotent,
            ClosureInstance::Cotensor { .. } => ClosureKind::Cotensor,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub kind: ClosureKind,
    pub status: Status,
    pub preconditions: Vec<Check>,
    pub checks: Vec<Check>,
    /// Terminal objects of the limit.
    pub terminal: Vec<String>,
}

fn preserves_terminals(f: &SMap, d: usize) -> Check {
    let (a, b) = (f.dom(), f.cod());
    let bad = terminal_vertices(a, d)
        .into_iter()
        .find(|&t| unfilled_sphere(b, f.at(0, t), d).is_some());
    Check::new(
        format!("{} -> {} preserves terminal objects", a.name(), b.name()),
        bad.is_none(),
        bad.map(|t| {
            format!(
                "{} goes to {}",
                a.vertex_label(t),
                b.vertex_label(f.at(0, t))
            )
        }),
    )
}

/// The bounded isofibration check is exact only between nerves; say so otherwise.
fn isofibration_check(name: String, p: &SMap, d: usize) -> Check {
    let fail = isofibration_failure(p, d);
    let ok = fail.is_none();
    let detail = fail.or_else(|| {
        (!(p.dom().is_nerve() && p.cod().is_nerve()))
            .then(|| format!("checked up to dimension {d}; exact only between nerves"))
    });
    Check::new(name, ok, detail)
}

fn has_terminal(a: &SSet, d: usize) -> Check {
    let q = is_quasi_category(a, d);
    let t = if q {
        terminal_vertices(a, d)
    } else {
        Vec::new()
    };
    let detail = if !q {
        Some("not a quasi-category".to_string())
    } else {
        t.first().map(|&v| a.vertex_label(v).to_string())
    };
    Check::new(
        format!("{} has a terminal object", a.name()),
        q && !t.is_empty(),
        detail,
    )
}

/// Terminal objects of a limit `L` with projections `p_j`:
/// (i) some vertex is pointwise terminal, (ii) every pointwise terminal
/// vertex is terminal, and the projections preserve terminal objects.
fn limit_scheme(l: &SSet, projections: &[SMap], d: usize) -> (Vec<Check>, Vec<String>) {
    let pointwise: Vec<Idx> = (0..l.count(0) as Idx)
        .filter(|&v| {
            projections
                .iter()
                .all(|p| unfilled_sphere(p.cod(), p.at(0, v), d).is_none())
        })
        .collect();
    let terminal = terminal_vertices(l, d);
    let mut checks = vec![Check::new(
        "a pointwise terminal vertex exists",
        !pointwise.is_empty(),
        pointwise.first().map(|&v| l.vertex_label(v).to_string()),
    )];
    let bad = pointwise.iter().find(|v| !terminal.contains(v));
    checks.push(Check::new(
        "every pointwise terminal vertex is terminal",
        bad.is_none(),
        bad.map(|&v| l.vertex_label(v).to_string()),
    ));
    for p in projections {
        checks.push(preserves_terminals(p, d));
    }
    (
        checks,
        terminal
            .iter()
            .map(|&v| l.vertex_label(v).to_string())
            .collect(),
    )
}

/// Checks that a limit of objects with terminal objects along maps that
/// preserve them has a terminal object preserved by the projections.
pub fn closure_suite(instance: &ClosureInstance, d: usize) -> Result<ClosureReport> {
    let kind = instance.kind();
    let mut pre = Vec::new();
    let (limit, projections): (Arc<SSet>, Vec<SMap>) = match instance {
        ClosureInstance::Products(factors) => {
            for f in factors {
                pre.push(has_terminal(f, d));
            }
            let mut acc: Option<(Arc<SSet>, Vec<SMap>)> = None;
            for f in factors {
                acc = Some(match acc {
                    None => (f.clone(), vec![SMap::identity(f.clone())]),
                    Some((p, projs)) => {
                        let (q, q0, q1) =
                            product_with_projections(&p, f, p.bound().min(f.bound()))?;
                        let mut next = projs
                            .iter()
                            .map(|pr| q0.then(pr))
                            .collect::<Result<Vec<_>>>()?;
                        next.push(q1);
                        (q, next)
                    }
                });
            }
            acc.ok_or_else(|| Error::Invalid("empty product".into()))?
        }
        ClosureInstance::Pullback { p, f } => {
            pre.push(isofibration_check("p is an isofibration".into(), p, d));
            for s in [p.dom(), p.cod(), f.dom()] {
                pre.push(has_terminal(s, d));
            }
            pre.push(preserves_terminals(p, d));
            pre.push(preserves_terminals(f, d));
            if pre.iter().all(|c| c.ok) {
                let (l, q0, q1) = pullback(p, f)?;
                (l, vec![q0, q1])
            } else {
                (p.dom().clone(), Vec::new())
            }
        }
        ClosureInstance::Tower(maps) => {
            let mut projs: Vec<SMap> = Vec::new();
            let top = maps
                .last()
                .ok_or_else(|| Error::Invalid("empty tower".into()))?
                .dom()
                .clone();
            for (k, m) in maps.iter().enumerate() {
                pre.push(isofibration_check(
                    format!("stage {k} is an isofibration"),
                    m,
                    d,
                ));
                pre.push(has_terminal(m.cod(), d));
                pre.push(preserves_terminals(m, d));
            }
            pre.push(has_terminal(&top, d));
            let mut cur = SMap::identity(top.clone());
            for m in maps.iter().rev() {
                cur = cur.then(m)?;
                projs.push(cur.clone());
            }
            (top, projs)
        }
        ClosureInstance::Idempotent(e) => {
            let a = e.dom().clone();
            pre.push(Check::new("e is idempotent", e.then(e)? == *e, None));
            pre.push(has_terminal(&a, d));
            pre.push(preserves_terminals(e, d));
            let (r, inc) = equalizer(e, &SMap::identity(a.clone()))?;
            let table = (0..=e.bound())
                .map(|n| {
                    (0..a.count(n) as Idx)
                        .map(|x| inc_index(&inc, n, e.at(n, x)))
                        .collect()
                })
                .collect::<Option<Vec<Vec<Idx>>>>()
                .ok_or_else(|| Error::Invalid("e does not land in its fixed points".into()))?;
            let ret = SMap::new(a, r.clone(), table)?;
            pre.push(preserves_terminals(&ret, d));
            (r, vec![inc])
        }
        ClosureInstance::Cotensor { a, x } => {
            pre.push(has_terminal(a, d));
            let ax = mapping_space(x, a, a.bound(), DEFAULT_SIMPLEX_CAP)?;
            let evs: Vec<SMap> = (0..x.count(0) as Idx).map(|v| ax.ev(v)).collect();
            let sp = ax.space().clone();
            let t = terminal_vertices(a, d);
            let diag = ax.constant_map();
            let (mut checks, terminal) = limit_scheme(&sp, &evs, d);
            let tl = terminal_vertices(&sp, d);
            let constant =
                !tl.is_empty() && tl.iter().all(|&v| t.iter().any(|&s| diag.at(0, s) == v));
            checks.push(Check::new(
                "the terminal object is the constant diagram at a terminal object",
                constant,
                t.first()
                    .map(|&s| sp.vertex_label(diag.at(0, s)).to_string()),
            ));
            let status = status_of(&pre, &checks);
            return Ok(ClosureReport {
                kind,
                status,
                preconditions: pre,
                checks,
                terminal,
            });
        }
    };
    if pre.iter().any(|c| !c.ok) {
        return Ok(ClosureReport {
            kind,
            status: Status::Inapplicable,
            preconditions: pre,
            checks: Vec::new(),
            terminal: Vec::new(),
        });
    }
    let (checks, terminal) = limit_scheme(&limit, &projections, d);
    let status = status_of(&pre, &checks);
    Ok(ClosureReport {
        kind,
        status,
        preconditions: pre,
        checks,
        terminal,
    })
}

fn inc_index(inc: &SMap, n: usize, x: Idx) -> Option<Idx> {
    (0..inc.dom().count(n) as Idx).find(|&r| inc.at(n, r) == x)
}

fn status_of(pre: &[Check], checks: &[Check]) -> Status {
    if pre.iter().any(|c| !c.ok) {
        Status::Inapplicable
    } else {
        Status::from_bool(checks.iter().all(|c| c.ok))
    }
}

/// The tower of algebra approximations cut at the given cell counts, as a
/// closure instance.
pub fn algebra_tower(
    monad: &Arc<Monad>,
    cuts: &[usize],
    config: &AlgebraConfig,
) -> Result<ClosureInstance> {
    let runs: Vec<AlgebraResult> = cuts
        .iter()
        .map(|&k| {
            evaluate_algebras(
                monad,
                &AlgebraConfig {
                    cell_limit: Some(k),
                    ..config.clone()
                },
            )
        })
        .collect::<Result<_>>()?;
    let maps = runs
        .windows(2)
        .map(|w| tower_projection(&w[1], &w[0]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosureInstance::Tower(maps))
}

/// Does `t` carry limits of `X`-diagrams in the base to limits?
#[derive(Clone, Debug, Serialize)]
pub struct Preservation {
    pub preserves: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CreationPart {
    pub status: Status,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CreationReport {
    pub monad: String,
    pub shape: String,
    pub status: Status,
    pub stabilized: bool,
    pub terminal: CreationPart,
    pub limits: CreationPart,
    pub limit_preservation: Preservation,
    pub colimits: CreationPart,
    pub colimit_preservation: Preservation,
}

fn preservation(a: &Arc<SSet>, t: &SMap, x: &Arc<SSet>, d: usize) -> Result<Preservation> {
    let ax = mapping_space(x, a, a.bound(), DEFAULT_SIMPLEX_CAP)?;
    let tx = ax.postcompose(t, &ax)?;
    let lim = has_limits_of_shape(a, x, d)?;
    for (gv, dl) in lim.diagrams.iter().enumerate() {
        let Some(l) = dl.apex else { continue };
        let tg = tx.at(0, gv as Idx);
        let Some(tl) = lim.diagrams[tg as usize].apex else {
            return Ok(Preservation {
                preserves: false,
                counterexample: Some(format!("t{} has no limit", dl.diagram)),
            });
        };
        let tlim = t.at(0, l);
        // limits in a quasi-category are only unique up to isomorphism
        if tlim != tl && !isomorphic_vertices(a, tlim, tl) {
            return Ok(Preservation {
                preserves: false,
                counterexample: Some(format!(
                    "diagram {}: t(lim) = {} but lim(t) = {}",
                    dl.diagram,
                    a.vertex_label(tlim),
                    a.vertex_label(tl)
                )),
            });
        }
    }
    Ok(Preservation {
        preserves: true,
        counterexample: None,
    })
}

fn isomorphic_vertices(a: &SSet, x: Idx, y: Idx) -> bool {
    a.bound() >= 1
        && (0..a.count(1) as Idx).any(|e| {
            a.face(1, e, 1) == x && a.face(1, e, 0) == y && crate::sset::is_invertible_edge(a, e)
        })
}

/// Limits of shape `X` in `A[t]` versus in `A`: every diagram upstairs has a
/// limit whose image is a limit of the image diagram.
fn creation_of_limits(
    alg: &Arc<SSet>,
    base: &Arc<SSet>,
    u: &SMap,
    x: &Arc<SSet>,
    d: usize,
) -> Result<CreationPart> {
    let ax_up = mapping_space(x, alg, alg.bound(), DEFAULT_SIMPLEX_CAP)?;
    let ax_dn = mapping_space(x, base, base.bound(), DEFAULT_SIMPLEX_CAP)?;
    let ux = ax_up.postcompose(u, &ax_dn)?;
    let (c_up, c_dn) = (ax_up.constant_map(), ax_dn.constant_map());
    let (ar_up, ar_dn) = (
        Arrows::new(ax_up.space(), c_up.bound(), DEFAULT_SIMPLEX_CAP)?,
        Arrows::new(ax_dn.space(), c_dn.bound(), DEFAULT_SIMPLEX_CAP)?,
    );
    let arr = ar_up.space.postcompose(&ux, &ar_dn.space)?;
    let mut checks = Vec::new();
    for gv in 0..ax_up.space().count(0) as Idx {
        let dn = comma_at(&ar_dn, &c_dn, ux.at(0, gv), DEFAULT_SIMPLEX_CAP)?;
        if terminal_vertices(&dn.space, d).is_empty() {
            continue;
        }
        let up = comma_at(&ar_up, &c_up, gv, DEFAULT_SIMPLEX_CAP)?;
        let label = ax_up.space().vertex_label(gv).to_string();
        let Some(&t) = terminal_vertices(&up.space, d).first() else {
            checks.push(Check::new(
                format!("diagram {label} has a limit"),
                false,
                None,
            ));
            continue;
        };
        let pt = SMap::constant(up.p1.cod().clone(), dn.p1.cod().clone(), 0);
        let m = comma_map_along(&up, &dn, &arr, u, &pt)?;
        let image = m.at(0, t);
        let ok = unfilled_sphere(&dn.space, image, d).is_none();
        checks.push(Check::new(
            format!("diagram {label} has a limit over one in the base"),
            ok,
            Some(format!(
                "{} over {}",
                alg.vertex_label(up.p0.at(0, t)),
                base.vertex_label(u.at(0, up.p0.at(0, t)))
            )),
        ));
    }
    let status = Status::from_bool(checks.iter().all(|c| c.ok));
    Ok(CreationPart { status, checks })
}

/// Creation of terminal objects, of limits of shape `X`, and (when `t`
/// preserves them) of colimits of shape `X` by `u^t`.
pub fn creation_suite(
    monad: &Arc<Monad>,
    shape: &Arc<SSet>,
    config: &AlgebraConfig,
    d: usize,
) -> Result<CreationReport> {
    let res = evaluate_algebras(monad, config)?;
    if !res.stabilized {
        return Err(Error::NoStabilization(format!(
            "{} did not stabilize within width {}",
            monad.name(),
            config.width_max
        )));
    }
    let (alg, base, u) = (res.algebras.clone(), res.base.clone(), res.forget.clone());
    let mut tchecks = Vec::new();
    for t in terminal_vertices(&base, d) {
        let lifts: Vec<Idx> = (0..alg.count(0) as Idx)
            .filter(|&v| u.at(0, v) == t)
            .collect();
        let term: Vec<Idx> = lifts
            .iter()
            .copied()
            .filter(|&v| unfilled_sphere(&alg, v, d).is_none())
            .collect();
        tchecks.push(Check::new(
            format!(
                "terminal {} lifts to a terminal object",
                base.vertex_label(t)
            ),
            !term.is_empty(),
            term.first().map(|&v| alg.vertex_label(v).to_string()),
        ));
    }
    let terminal = CreationPart {
        status: Status::from_bool(!tchecks.is_empty() && tchecks.iter().all(|c| c.ok)),
        checks: tchecks,
    };
    let big = Arc::new(nerve(monad.base(), base.bound(), DEFAULT_SIMPLEX_CAP)?);
    let tmap = SMap::of_functor(monad.functor(), big.clone(), big.clone())?;
    let limit_preservation = preservation(&big, &tmap, shape, d)?;
    let limits = creation_of_limits(&alg, &base, &u, shape, d)?;
    let (alg_op, base_op) = (Arc::new(alg.opposite()), Arc::new(base.opposite()));
    let big_op = Arc::new(big.opposite());
    let shape_op = Arc::new(shape.opposite());
    let colimit_preservation = preservation(
        &big_op,
        &tmap.opposite_between(big_op.clone(), big_op.clone()),
        &shape_op,
        d,
    )?;
    let colimits = if colimit_preservation.preserves {
        creation_of_limits(
            &alg_op,
            &base_op,
            &u.opposite_between(alg_op.clone(), base_op.clone()),
            &shape_op,
            d,
        )?
    } else {
        CreationPart {
            status: Status::Inapplicable,
            checks: Vec::new(),
        }
    };
    let status =
        terminal
            .status
            .and(limits.status)
            .and(if colimits.status == Status::Inapplicable {
                Status::Pass
            } else {
                colimits.status
            });
    Ok(CreationReport {
        monad: monad.name().to_string(),
        shape: shape.name().to_string(),
        status,
        stabilized: res.stabilized,
        terminal,
        limits,
        limit_preservation,
        colimits,
        colimit_preservation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fincat::{FinCategory, Functor};

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

    fn discrete2() -> Arc<SSet> {
        nerve_of("discrete2")
    }

    #[test]
    fn terminal_in_simplices_and_posets() {
        let d2 = standard_simplex(2, 3);
        assert!(is_terminal(&d2, 2, 3).unwrap());
        assert!(!is_terminal(&d2, 1, 3).unwrap());
        assert!(is_initial(&d2, 0, 3).unwrap());
        let (b, _) = crate::sset::boundary(1, 1).unwrap();
        assert!(!is_terminal(&b, 0, 3).unwrap());
        assert!(!is_terminal(&b, 1, 3).unwrap());
        let d = nerve_of("diamond");
        let v = |s: &str| d.find_vertex(s).unwrap();
        assert!(is_terminal(&d, v("top"), 3).unwrap());
        assert!(!is_terminal(&d, v("x"), 3).unwrap());
        assert!(is_initial(&d, v("bot"), 3).unwrap());
        let e = discrete2();
        assert!((0..2).all(|v| !is_initial(&e, v, 3).unwrap()));
    }

    #[test]
    fn commas_of_vertices() {
        let a = nerve_of("chain3");
        let pt = point(3);
        for (x, y) in [(0, 2), (2, 0), (1, 1)] {
            let f = SMap::constant(pt.clone(), a.clone(), x);
            let g = SMap::constant(pt.clone(), a.clone(), y);
            let c = comma(&f, &g, DEFAULT_SIMPLEX_CAP).unwrap();
            assert_eq!(
                c.space.counts(),
                if x <= y { vec![1; 4] } else { vec![0; 4] }
            );
        }
        let b = nerve_of("chain2");
        let id = SMap::identity(b.clone());
        assert_eq!(
            comma(&id, &id, DEFAULT_SIMPLEX_CAP).unwrap().space.count(0),
            3
        );
    }

    #[test]
    fn liftings() {
        let a = nerve_of("diamond");
        let id = SMap::identity(a.clone());
        let cert = absolute_right_lifting(&id, &id, 3).unwrap();
        let cert = cert.certificate().unwrap();
        assert!((0..4).all(|c| cert.lift(c) == Some(c)));
        let pt = point(3);
        let x = SMap::constant(pt.clone(), a.clone(), a.find_vertex("x").unwrap());
        let y = SMap::constant(pt.clone(), a.clone(), a.find_vertex("y").unwrap());
        assert!(matches!(
            absolute_right_lifting(&x, &y, 3).unwrap(),
            Lifting::Refusal { .. }
        ));
    }

    #[test]
    fn binary_limits() {
        let d = nerve_of("diamond");
        let r = has_limits_of_shape(&d, &discrete2(), 3).unwrap();
        assert!(r.all_exist);
        let x = d.find_vertex("x").unwrap();
        let y = d.find_vertex("y").unwrap();
        let xy = r.diagrams.iter().find(|g| g.diagram == "[x,y]").unwrap();
        assert_eq!(xy.apex, Some(d.find_vertex("bot").unwrap()));
        assert!(x != y);
        assert!(
            !has_limits_of_shape(&discrete2(), &discrete2(), 3)
                .unwrap()
                .all_exist
        );
        let none = Arc::new(empty(3));
        assert!(has_limits_of_shape(&d, &none, 3).unwrap().all_exist);
        assert!(
            !has_limits_of_shape(&discrete2(), &none, 3)
                .unwrap()
                .all_exist
        );
    }

    #[test]
    fn right_exactness() {
        let d = nerve_of("diamond");
        let x = discrete2();
        let dx = Arc::new(mapping_space(&x, &d, 3, DEFAULT_SIMPLEX_CAP).unwrap());
        let p = LiftingProblem {
            f: dx.constant_map(),
            g: SMap::identity(dx.space().clone()),
        };
        let same = ProblemMap {
            u: SMap::identity(dx.space().clone()),
            v: SMap::identity(d.clone()),
            w: SMap::identity(dx.space().clone()),
        };
        assert_eq!(
            right_exact_check(&p, &p, &same, 3).unwrap().status,
            Status::Pass
        );
        let m = corpus::monad("diamond-closure").unwrap();
        let t = SMap::of_functor(m.functor(), d.clone(), d.clone()).unwrap();
        let tx = dx.postcompose(&t, &dx).unwrap();
        let broken = ProblemMap {
            u: tx.clone(),
            v: t,
            w: tx,
        };
        let r = right_exact_check(&p, &p, &broken, 3).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn closure_kinds() {
        let (c2, c3) = (nerve_of("chain2"), nerve_of("chain3"));
        let r = closure_suite(&ClosureInstance::Products(vec![c2.clone(), c3.clone()]), 3).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.terminal, vec!["(b,c)"]);
        let r = closure_suite(
            &ClosureInstance::Cotensor {
                a: c3.clone(),
                x: Arc::new(standard_simplex(1, 3)),
            },
            3,
        )
        .unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        assert_eq!(r.terminal, vec!["[c,c]"]);
        let arrows = mapping_space(
            &Arc::new(standard_simplex(1, 3)),
            &c2,
            3,
            DEFAULT_SIMPLEX_CAP,
        )
        .unwrap();
        let f = SMap::of_functor(
            &Functor::from_object_map(
                Arc::new(corpus::category("chain3").unwrap()),
                Arc::new(corpus::category("chain2").unwrap()),
                vec![0, 0, 1],
            )
            .unwrap(),
            c3.clone(),
            c2.clone(),
        )
        .unwrap();
        let r = closure_suite(
            &ClosureInstance::Pullback {
                p: arrows.ev(1),
                f: f.clone(),
            },
            3,
        )
        .unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        let low = SMap::constant(c2.clone(), c2.clone(), 0);
        let r = closure_suite(&ClosureInstance::Pullback { p: low, f }, 3).unwrap();
        assert_eq!(r.status, Status::Inapplicable);
        let m = corpus::monad("chain-closure").unwrap();
        let a = nerve_of("chain3");
        let t = SMap::of_functor(m.functor(), a.clone(), a).unwrap();
        assert_eq!(
            closure_suite(&ClosureInstance::Idempotent(t), 3)
                .unwrap()
                .status,
            Status::Pass
        );
        let cfg = AlgebraConfig {
            width_max: 5,
            ..Default::default()
        };
        let tower = algebra_tower(&m, &[0, 2, 19], &cfg).unwrap();
        assert_eq!(closure_suite(&tower, 3).unwrap().status, Status::Pass);
    }

    #[test]
    fn meets_are_created_but_not_preserved() {
        let m = corpus::monad("diamond-closure").unwrap();
        let cfg = AlgebraConfig {
            width_max: 7,
            ..Default::default()
        };
        let r = creation_suite(&m, &discrete2(), &cfg, 3).unwrap();
        assert_eq!(r.terminal.status, Status::Pass);
        assert_eq!(r.limits.status, Status::Pass, "{r:?}");
        assert!(!r.limit_preservation.preserves);
    }

    #[test]
    fn joins_on_a_chain() {
        let m = corpus::monad("chain-closure").unwrap();
        let cfg = AlgebraConfig {
            width_max: 7,
            ..Default::default()
        };
        let r = creation_suite(&m, &discrete2(), &cfg, 3).unwrap();
        assert!(r.colimit_preservation.preserves);
        assert_eq!(r.colimits.status, Status::Pass, "{r:?}");
        assert_eq!(r.status, Status::Pass);
        let _ = FinCategory::terminal();
    }
}
