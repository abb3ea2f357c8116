//! Algebras for a monad as the limit of a tower: one pullback per cell of
//! the weight, evaluated degreewise on the nerve of the base category.
//!
//! An n-simplex at level k is a base n-simplex plus, for each of the first k
//! cells `a_j` of dimension `m_j`, a functor `[n] × [m_j] → C` stored as its
//! values on every pair `p ≤ q` of the grid. Each face of a cell pins the
//! corresponding face of the grid to an action translate of an earlier
//! component; what is left free is chosen subject to functoriality.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{cap_check, Error, Result};
use crate::fincat::{FinCategory, MorId, ObjId};
use crate::monad::{EmCategory, HCAction, Monad, MonadMap};
use crate::ordinal::OrdMap;
use crate::squiggle::{attach, enumerate_cells, FaceAttachment, Squiggle, Target};
use crate::sset::{nerve, nerve_simplex, Idx, SMap, SSet, DEFAULT_SIMPLEX_CAP};

const NONE: u32 = u32::MAX;

/// The cells of the weight in order, with the attaching data of each face.
#[derive(Clone, Debug, Serialize)]
pub struct CellComplex {
    pub width_max: usize,
    pub dim_max: usize,
    pub cells: Vec<Squiggle>,
    pub attachments: Vec<Vec<FaceAttachment>>,
}

impl CellComplex {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Index ranges of cells sharing a width, in order.
    pub fn width_classes(&self) -> Vec<(usize, std::ops::Range<usize>)> {
        let mut out: Vec<(usize, std::ops::Range<usize>)> = Vec::new();
        for (k, c) in self.cells.iter().enumerate() {
            match out.last_mut() {
                Some((w, r)) if *w == c.width() => r.end = k + 1,
                _ => out.push((c.width(), k..k + 1)),
            }
        }
        out
    }

    pub fn position(&self, cell: &Squiggle) -> Option<usize> {
        self.cells.iter().position(|c| c == cell)
    }

    /// Every failure of the structural invariants: cells of dimension ≥ 1,
    /// final vertex `u`, faces attached to `u` or strictly earlier cells.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (k, (c, atts)) in self.cells.iter().zip(&self.attachments).enumerate() {
            if c.dim() == 0 {
                v.push(format!("cell {k} {c} has dimension 0"));
            }
            if c.final_vertex() != Squiggle::u() {
                v.push(format!(
                    "cell {k} {c} has final vertex {}",
                    c.final_vertex()
                ));
            }
            for (i, a) in atts.iter().enumerate() {
                if let Target::Cell(j) = a.target {
                    if j >= k {
                        v.push(format!("face {i} of cell {k} {c} attaches to cell {j}"));
                    }
                }
            }
        }
        v
    }
}

/// Enumerates the cells up to the given width and dimension and attaches them.
pub fn build_cell_complex(width_max: usize, dim_max: usize) -> Result<CellComplex> {
    let cells = enumerate_cells(width_max, dim_max);
    let index: HashMap<Squiggle, usize> = cells
        .iter()
        .enumerate()
        .map(|(k, c)| (c.clone(), k))
        .collect();
    let attachments = cells
        .iter()
        .map(|c| attach(c, &index))
        .collect::<Result<Vec<_>>>()?;
    let cx = CellComplex {
        width_max,
        dim_max,
        cells,
        attachments,
    };
    if let Some(v) = cx.violations().into_iter().next() {
        return Err(Error::Invalid(v));
    }
    Ok(cx)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraConfig {
    /// Largest cell width.
    pub width_max: usize,
    /// Largest cell dimension.
    pub cell_dim_max: usize,
    /// Degrees of the result are `0..=degree_max`.
    pub degree_max: usize,
    /// Cap on the elements of one degree at one level.
    pub element_cap: usize,
    /// Use only the first this-many cells.
    pub cell_limit: Option<usize>,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        AlgebraConfig {
            width_max: 9,
            cell_dim_max: 3,
            degree_max: 3,
            element_cap: 1_000_000,
            cell_limit: None,
        }
    }
}

/// Cardinalities of one degree along the tower.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeTrace {
    pub degree: usize,
    /// `counts[k]` is the number of elements after `k` cells.
    pub counts: Vec<usize>,
    /// For each width class in order, whether forgetting its cells is a
    /// bijection.
    pub classes: Vec<(usize, bool)>,
    /// Width of the last class that changed anything; every wider class is
    /// a bijection.
    pub last_change: Option<usize>,
}

#[derive(Clone, Debug)]
struct Elem {
    base: Idx,
    edges: Vec<MorId>,
    comps: Vec<Vec<MorId>>,
    origin: u32,
}

/// Vertices `(a, b)` of `[n] × [m]` and all pairs `p ≤ q`.
#[derive(Clone, Debug)]
struct Grid {
    m: usize,
    pairs: Vec<(usize, usize)>,
    idx: Vec<u32>,
}

impl Grid {
    fn new(n: usize, m: usize) -> Self {
        let w = m + 1;
        let nv = (n + 1) * w;
        let mut pairs = Vec::new();
        let mut idx = vec![NONE; nv * nv];
        for p in 0..nv {
            for q in 0..nv {
                if p / w <= q / w && p % w <= q % w {
                    idx[p * nv + q] = pairs.len() as u32;
                    pairs.push((p, q));
                }
            }
        }
        Grid { m, pairs, idx }
    }

    fn nv(&self) -> usize {
        (self.idx.len() as f64).sqrt() as usize
    }

    fn v(&self, a: usize, b: usize) -> usize {
        a * (self.m + 1) + b
    }

    fn ab(&self, p: usize) -> (usize, usize) {
        (p / (self.m + 1), p % (self.m + 1))
    }

    fn pair(&self, p: usize, q: usize) -> usize {
        self.idx[p * self.nv() + q] as usize
    }
}

struct PreparedFace {
    target: Target,
    theta: Vec<u32>,
    coface: Vec<usize>,
    /// Interned edge action for `b ≤ b'` in the face, at `b * m + b'`.
    alpha: Vec<u32>,
}

struct PreparedCell {
    m: usize,
    faces: Vec<PreparedFace>,
}

struct Engine {
    cat: Arc<FinCategory>,
    act: HCAction,
    alphas: Vec<OrdMap>,
    memo: Vec<u32>,
    cells: Vec<PreparedCell>,
    grids: Vec<Vec<Grid>>,
}

impl Engine {
    fn new(monad: Arc<Monad>, cx: &CellComplex, used: usize, degree_max: usize) -> Self {
        let mut alphas: Vec<OrdMap> = Vec::new();
        let mut alpha_id: HashMap<OrdMap, u32> = HashMap::new();
        let mut cells = Vec::with_capacity(used);
        for (c, atts) in cx.cells.iter().zip(&cx.attachments).take(used) {
            let m = c.dim();
            let faces = atts
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let mut alpha = vec![NONE; m * m];
                    for b in 0..m {
                        for b2 in b..m {
                            let al = a.translate.edge_map(b, b2);
                            let id = *alpha_id.entry(al.clone()).or_insert_with(|| {
                                alphas.push(al);
                                alphas.len() as u32 - 1
                            });
                            alpha[b * m + b2] = id;
                        }
                    }
                    PreparedFace {
                        target: a.target,
                        theta: a.theta.clone(),
                        coface: (0..=m).filter(|&j| j != i).collect(),
                        alpha,
                    }
                })
                .collect();
            cells.push(PreparedCell { m, faces });
        }
        let mdim = cx.dim_max.max(1);
        let grids = (0..=degree_max)
            .map(|n| (0..=mdim).map(|m| Grid::new(n, m)).collect())
            .collect();
        let cat = monad.base().clone();
        let memo = vec![NONE; alphas.len() * cat.morphism_count()];
        Engine {
            act: HCAction::new(monad),
            cat,
            alphas,
            memo,
            cells,
            grids,
        }
    }

    fn act_edge(&mut self, alpha: u32, f: MorId) -> MorId {
        let slot = alpha as usize * self.cat.morphism_count() + f as usize;
        if self.memo[slot] == NONE {
            self.memo[slot] = self.act.act_edge(&self.alphas[alpha as usize], f);
        }
        self.memo[slot]
    }

    fn comp_dim(&self, k: usize) -> usize {
        self.cells[k].m
    }

    /// Every value of cell `k`'s grid that extends `el`.
    fn extend(&mut self, n: usize, el: &Elem, k: usize) -> Vec<Vec<MorId>> {
        let m = self.cells[k].m;
        let npairs = self.grids[n][m].pairs.len();
        let mut vals = vec![NONE; npairs];
        for fi in 0..self.cells[k].faces.len() {
            let fpairs = self.grids[n][m - 1].pairs.len();
            for pi in 0..fpairs {
                let (alpha, dst, src) = {
                    let fg = &self.grids[n][m - 1];
                    let g = &self.grids[n][m];
                    let face = &self.cells[k].faces[fi];
                    let (p, q) = fg.pairs[pi];
                    let ((a, b), (a2, b2)) = (fg.ab(p), fg.ab(q));
                    let src = match face.target {
                        Target::Unit => el.edges[a * (n + 1) + a2],
                        Target::Cell(j) => {
                            let tg = &self.grids[n][self.cells[j].m];
                            let (tb, tb2) = (face.theta[b] as usize, face.theta[b2] as usize);
                            el.comps[j][tg.pair(tg.v(a, tb), tg.v(a2, tb2))]
                        }
                    };
                    let dst = g.pair(g.v(a, face.coface[b]), g.v(a2, face.coface[b2]));
                    (face.alpha[b * m + b2], dst, src)
                };
                let v = self.act_edge(alpha, src);
                if vals[dst] == NONE {
                    vals[dst] = v;
                } else if vals[dst] != v {
                    return Vec::new();
                }
            }
        }
        let g = &self.grids[n][m];
        let cat = &self.cat;
        if m == 1 {
            let obj =
                |vals: &[MorId], a: usize, b: usize| cat.src(vals[g.pair(g.v(a, b), g.v(a, b))]);
            let row =
                |vals: &[MorId], b: usize, a: usize, a2: usize| vals[g.pair(g.v(a, b), g.v(a2, b))];
            let mut out = Vec::new();
            let mut vert = vec![NONE; n + 1];
            fn go(
                a: usize,
                n: usize,
                cat: &FinCategory,
                vals: &[MorId],
                vert: &mut Vec<MorId>,
                obj: &dyn Fn(&[MorId], usize, usize) -> ObjId,
                row: &dyn Fn(&[MorId], usize, usize, usize) -> MorId,
                out: &mut Vec<Vec<MorId>>,
            ) {
                if a > n {
                    out.push(vert.clone());
                    return;
                }
                for &h in cat.hom(obj(vals, a, 0), obj(vals, a, 1)) {
                    if a > 0
                        && cat.compose(h, row(vals, 0, a - 1, a))
                            != cat.compose(row(vals, 1, a - 1, a), vert[a - 1])
                    {
                        continue;
                    }
                    vert[a] = h;
                    go(a + 1, n, cat, vals, vert, obj, row, out);
                }
            }
            go(0, n, cat, &vals, &mut vert, &obj, &row, &mut out);
            return out
                .into_iter()
                .filter_map(|vs| {
                    let mut full = vals.clone();
                    for a in 0..=n {
                        for a2 in a..=n {
                            full[g.pair(g.v(a, 0), g.v(a2, 1))] =
                                cat.comp(row(&vals, 1, a, a2), vs[a]);
                        }
                    }
                    is_functor(g, cat, &full).then_some(full)
                })
                .collect();
        }
        if vals.contains(&NONE) || !is_functor(g, cat, &vals) {
            return Vec::new();
        }
        vec![vals]
    }

    /// Reindexes every component along `f: [n2] → [n]` in the first coordinate.
    fn reindex(&self, n: usize, n2: usize, comps: &[u32], f: &dyn Fn(usize) -> usize) -> Vec<u32> {
        let mut out = Vec::new();
        let mut off = 0;
        for c in &self.cells {
            let (old, new) = (&self.grids[n][c.m], &self.grids[n2][c.m]);
            for &(p, q) in &new.pairs {
                let ((a, b), (a2, b2)) = (new.ab(p), new.ab(q));
                out.push(comps[off + old.pair(old.v(f(a), b), old.v(f(a2), b2))]);
            }
            off += old.pairs.len();
        }
        out
    }
}

fn is_functor(g: &Grid, cat: &FinCategory, vals: &[MorId]) -> bool {
    let nv = g.nv();
    for &(p, q) in &g.pairs {
        let f = vals[g.pair(p, q)];
        for r in q..nv {
            let i = g.idx[q * nv + r];
            if i == NONE {
                continue;
            }
            if cat.compose(vals[i as usize], f) != Some(vals[g.pair(p, r)]) {
                return false;
            }
        }
    }
    true
}

/// The stabilized tower: the simplicial set of algebras with its forgetful map.
#[derive(Clone, Debug)]
pub struct AlgebraResult {
    pub monad: Arc<Monad>,
    pub config: AlgebraConfig,
    pub complex: Arc<CellComplex>,
    /// Number of cells actually used.
    pub cells_used: usize,
    pub base: Arc<SSet>,
    pub algebras: Arc<SSet>,
    /// The forgetful map `u^t`.
    pub forget: SMap,
    pub traces: Vec<DegreeTrace>,
    /// The last two width classes changed nothing in any degree.
    pub stabilized: bool,
    keys: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, Idx>>,
}

impl AlgebraResult {
    /// Component `k` of an n-simplex, as its values on grid pairs.
    pub fn component(&self, n: usize, x: Idx, k: usize) -> &[u32] {
        let key = &self.keys[n][x as usize];
        let mut off = 1;
        for j in 0..k {
            off += Grid::new(n, self.complex.cells[j].dim()).pairs.len();
        }
        let len = Grid::new(n, self.complex.cells[k].dim()).pairs.len();
        &key[off..off + len]
    }

    pub fn key(&self, n: usize, x: Idx) -> &[u32] {
        &self.keys[n][x as usize]
    }

    pub fn find(&self, n: usize, key: &[u32]) -> Option<Idx> {
        self.index[n].get(key).copied()
    }

    /// The structure map of an algebra vertex, read off the first cell.
    pub fn structure_map(&self, v: Idx) -> Option<MorId> {
        let k = self.complex.position(&first_cell())?;
        if k >= self.cells_used {
            return None;
        }
        let g = Grid::new(0, 1);
        Some(self.component(0, v, k)[g.pair(g.v(0, 0), g.v(0, 1))])
    }

    pub fn counts(&self) -> Vec<usize> {
        self.algebras.counts().to_vec()
    }
}

fn first_cell() -> Squiggle {
    Squiggle::new(1, vec![2, 0, 1, 0]).expect("valid squiggle")
}

/// Runs the tower for every degree up to `config.degree_max` and assembles
/// the result as a simplicial set.
pub fn evaluate_algebras(monad: &Arc<Monad>, config: &AlgebraConfig) -> Result<AlgebraResult> {
    monad.ensure_valid()?;
    let cx = Arc::new(build_cell_complex(config.width_max, config.cell_dim_max)?);
    evaluate_with(monad, &cx, config)
}

pub fn evaluate_with(
    monad: &Arc<Monad>,
    cx: &Arc<CellComplex>,
    config: &AlgebraConfig,
) -> Result<AlgebraResult> {
    let used = config.cell_limit.map_or(cx.len(), |l| l.min(cx.len()));
    let dmax = config.degree_max;
    let base = Arc::new(nerve(monad.base(), dmax, DEFAULT_SIMPLEX_CAP)?);
    let mut engine = Engine::new(monad.clone(), cx, used, dmax);
    let mut traces = Vec::new();
    let mut levels: Vec<Vec<Elem>> = Vec::new();
    let class_ranges: Vec<(usize, std::ops::Range<usize>)> = cx
        .width_classes()
        .into_iter()
        .filter(|(_, r)| r.start < used)
        .map(|(w, r)| (w, r.start..r.end.min(used)))
        .collect();
    for n in 0..=dmax {
        let mut elems: Vec<Elem> = (0..base.count(n) as Idx)
            .map(|x| {
                let mut edges = vec![NONE; (n + 1) * (n + 1)];
                for a in 0..=n {
                    for a2 in a..=n {
                        edges[a * (n + 1) + a2] = base.edge(n, x, a, a2);
                    }
                }
                Elem {
                    base: x,
                    edges,
                    comps: Vec::with_capacity(used),
                    origin: 0,
                }
            })
            .collect();
        let mut counts = vec![elems.len()];
        let mut classes = Vec::new();
        for (w, range) in &class_ranges {
            for (i, e) in elems.iter_mut().enumerate() {
                e.origin = i as u32;
            }
            let before = elems.len();
            for k in range.clone() {
                let mut next = Vec::with_capacity(elems.len());
                for mut el in elems.drain(..) {
                    let mut ext = engine.extend(n, &el, k);
                    if ext.len() == 1 {
                        el.comps.push(ext.pop().expect("one extension"));
                        next.push(el);
                    } else {
                        for g in ext {
                            let mut e2 = el.clone();
                            e2.comps.push(g);
                            next.push(e2);
                        }
                    }
                    cap_check(
                        &format!("algebra simplices of degree {n}"),
                        next.len(),
                        config.element_cap,
                    )?;
                }
                elems = next;
                counts.push(elems.len());
            }
            let mut hits = vec![0u32; before];
            for e in &elems {
                hits[e.origin as usize] += 1;
            }
            classes.push((*w, hits.iter().all(|&h| h == 1)));
        }
        let last_change = classes.iter().rev().find(|c| !c.1).map(|c| c.0);
        traces.push(DegreeTrace {
            degree: n,
            counts,
            classes,
            last_change,
        });
        levels.push(elems);
    }
    let complete = cx
        .width_classes()
        .iter()
        .filter(|(_, r)| r.end <= used)
        .count();
    let stabilized = complete >= 2
        && traces
            .iter()
            .all(|t| t.classes[complete - 2..complete].iter().all(|c| c.1));
    let key_levels: Vec<Vec<Vec<u32>>> = levels
        .iter()
        .map(|l| {
            l.iter()
                .map(|e| {
                    let mut k = vec![e.base];
                    for c in &e.comps {
                        k.extend_from_slice(c);
                    }
                    k
                })
                .collect()
        })
        .collect();
    let eng = &engine;
    let b = &base;
    let face = |n: usize, key: &Vec<u32>, i: usize| -> Vec<u32> {
        let mut k = vec![b.face(n, key[0], i)];
        k.extend(eng.reindex(n, n - 1, &key[1..], &|a| if a < i { a } else { a + 1 }));
        k
    };
    let degen = |n: usize, key: &Vec<u32>, i: usize| -> Vec<u32> {
        let mut k = vec![b.degen(n, key[0], i)];
        k.extend(eng.reindex(n, n + 1, &key[1..], &|a| if a <= i { a } else { a - 1 }));
        k
    };
    let labels: Vec<String> = key_levels[0]
        .iter()
        .map(|k| {
            let c = monad.base();
            let obj = c.object_name(k[0]);
            match cx.position(&first_cell()).filter(|&p| p < used) {
                Some(p) => {
                    let off: usize = (0..p)
                        .map(|j| engine.grids[0][engine.comp_dim(j)].pairs.len())
                        .sum();
                    let g = &engine.grids[0][1];
                    let h = k[1 + off + g.pair(g.v(0, 0), g.v(0, 1))];
                    format!("({obj},{})", c.morphism_name(h))
                }
                None => obj.to_string(),
            }
        })
        .collect();
    let name = format!("{}[t]", base.name());
    let (alg, index) = SSet::from_keys(
        &name,
        dmax,
        &key_levels,
        face,
        degen,
        labels,
        DEFAULT_SIMPLEX_CAP,
    )
    .map_err(|e| Error::Invalid(format!("tower levels are not closed under faces: {e}")))?;
    let alg = Arc::new(alg);
    let table = key_levels
        .iter()
        .map(|l| l.iter().map(|k| k[0]).collect())
        .collect();
    let forget = SMap::new(alg.clone(), base.clone(), table)?;
    Ok(AlgebraResult {
        monad: monad.clone(),
        config: config.clone(),
        complex: cx.clone(),
        cells_used: used,
        base,
        algebras: alg,
        forget,
        traces,
        stabilized,
        keys: key_levels,
        index,
    })
}

/// The projection from a longer tower run to a shorter one: forget the
/// components of the extra cells.
pub fn tower_projection(hi: &AlgebraResult, lo: &AlgebraResult) -> Result<SMap> {
    if lo.cells_used > hi.cells_used
        || lo.complex.cells[..lo.cells_used] != hi.complex.cells[..lo.cells_used]
    {
        return Err(Error::Invalid(
            "projection needs a shorter run of the same cells".into(),
        ));
    }
    let b = hi.algebras.bound().min(lo.algebras.bound());
    let mut table = Vec::with_capacity(b + 1);
    for n in 0..=b {
        let len: usize = 1
            + (0..lo.cells_used)
                .map(|j| Grid::new(n, hi.complex.cells[j].dim()).pairs.len())
                .sum::<usize>();
        let row = (0..hi.algebras.count(n) as Idx)
            .map(|x| {
                lo.find(n, &hi.key(n, x)[..len])
                    .ok_or_else(|| Error::Invalid("projection leaves the shorter tower".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    SMap::new(hi.algebras.clone(), lo.algebras.clone(), table)
}

/// Why a comparison with the Eilenberg–Moore nerve failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmMismatch {
    /// The tower never saw the cell carrying the structure map.
    NoStructureCell,
    /// A vertex whose structure map is not an algebra.
    NotAnAlgebra {
        vertex: String,
    },
    NotSimplicial {
        detail: String,
    },
    NotInjective {
        degree: usize,
        first: Idx,
        second: Idx,
    },
    NotSurjective {
        degree: usize,
        missing: Idx,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct EmComparison {
    pub iso: bool,
    pub algebra_counts: Vec<usize>,
    pub em_counts: Vec<usize>,
    pub mismatch: Option<EmMismatch>,
    #[serde(skip)]
    pub map: Option<SMap>,
    #[serde(skip)]
    pub em: Option<Arc<SSet>>,
}

/// Compares `A[t]` with the nerve of the Eilenberg–Moore category.
pub fn em_compare(res: &AlgebraResult) -> Result<EmComparison> {
    let em: EmCategory = res.monad.em_category()?;
    let dmax = res.algebras.bound();
    let ncat = em.category.clone();
    let nem = Arc::new(nerve(&ncat, dmax, DEFAULT_SIMPLEX_CAP)?);
    let alg = &res.algebras;
    let mut out = EmComparison {
        iso: false,
        algebra_counts: alg.counts().to_vec(),
        em_counts: nem.counts().to_vec(),
        mismatch: None,
        map: None,
        em: Some(nem.clone()),
    };
    let cat = res.monad.base();
    let mut verts = Vec::with_capacity(alg.count(0));
    for v in 0..alg.count(0) as Idx {
        let Some(h) = res.structure_map(v) else {
            out.mismatch = Some(EmMismatch::NoStructureCell);
            return Ok(out);
        };
        let c = res.forget.at(0, v);
        match em.find_algebra(c, h) {
            Some(a) => verts.push(a),
            None => {
                out.mismatch = Some(EmMismatch::NotAnAlgebra {
                    vertex: format!("({},{})", cat.object_name(c), cat.morphism_name(h)),
                });
                return Ok(out);
            }
        }
    }
    let mut table = vec![verts];
    for n in 1..=dmax {
        let mut row = Vec::with_capacity(alg.count(n));
        for x in 0..alg.count(n) as Idx {
            let vs: Vec<ObjId> = (0..=n)
                .map(|j| table[0][alg.vertex(n, x, j) as usize])
                .collect();
            let bx = res.forget.at(n, x);
            let mut spine = Vec::with_capacity(n);
            for j in 0..n {
                let f = res.base.edge(n, bx, j, j + 1);
                let lift = ncat
                    .hom(vs[j], vs[j + 1])
                    .iter()
                    .copied()
                    .find(|&e| em.forgetful.mor(e) == f);
                match lift {
                    Some(e) => spine.push(e),
                    None => {
                        out.mismatch = Some(EmMismatch::NotSimplicial {
                            detail: format!(
                                "edge {} of a {n}-simplex is not an algebra map",
                                cat.morphism_name(f)
                            ),
                        });
                        return Ok(out);
                    }
                }
            }
            let Some(y) = nerve_simplex(&nem, &spine) else {
                out.mismatch = Some(EmMismatch::NotSimplicial {
                    detail: format!("no {n}-simplex with the lifted spine"),
                });
                return Ok(out);
            };
            row.push(y);
        }
        table.push(row);
    }
    let map = match SMap::new(alg.clone(), nem.clone(), table) {
        Ok(m) => m,
        Err(e) => {
            out.mismatch = Some(EmMismatch::NotSimplicial {
                detail: e.to_string(),
            });
            return Ok(out);
        }
    };
    for n in 0..=dmax {
        let mut seen: HashMap<Idx, Idx> = HashMap::new();
        for x in 0..alg.count(n) as Idx {
            if let Some(&first) = seen.get(&map.at(n, x)) {
                out.mismatch = Some(EmMismatch::NotInjective {
                    degree: n,
                    first,
                    second: x,
                });
                out.map = Some(map);
                return Ok(out);
            }
            seen.insert(map.at(n, x), x);
        }
        if let Some(missing) = (0..nem.count(n) as Idx).find(|y| !seen.contains_key(y)) {
            out.mismatch = Some(EmMismatch::NotSurjective { degree: n, missing });
            out.map = Some(map);
            return Ok(out);
        }
    }
    out.iso = true;
    out.map = Some(map);
    Ok(out)
}

/// Sensitivity of the comparison to the length of the tower.
#[derive(Clone, Debug, Serialize)]
pub struct Ablation {
    /// Fewest cells for which the comparison is an isomorphism.
    pub cells_needed: Option<usize>,
    /// The comparison with one cell fewer.
    pub one_short: Option<EmComparison>,
}

/// Finds the shortest tower (up to `max_cells`) that already matches the
/// Eilenberg–Moore nerve and reruns with one cell fewer.
pub fn ablation(monad: &Arc<Monad>, config: &AlgebraConfig, max_cells: usize) -> Result<Ablation> {
    let cx = Arc::new(build_cell_complex(config.width_max, config.cell_dim_max)?);
    let mut prev: Option<EmComparison> = None;
    for k in 0..=max_cells.min(cx.len()) {
        let cfg = AlgebraConfig {
            cell_limit: Some(k),
            ..config.clone()
        };
        let cmp = em_compare(&evaluate_with(monad, &cx, &cfg)?)?;
        if cmp.iso {
            return Ok(Ablation {
                cells_needed: Some(k),
                one_short: prev,
            });
        }
        prev = Some(cmp);
    }
    Ok(Ablation {
        cells_needed: None,
        one_short: prev,
    })
}

/// `f[t]`: a strict monad map acting on every component.
pub fn induced_map(f: &MonadMap, a: &AlgebraResult, b: &AlgebraResult) -> Result<SMap> {
    if a.complex.cells[..a.cells_used] != b.complex.cells[..b.cells_used] {
        return Err(Error::Invalid("both towers must use the same cells".into()));
    }
    if let Some(v) = f.violations().first() {
        return Err(Error::Invalid(format!("not a monad map: {v}")));
    }
    let fun = &f.functor;
    let dmax = a.algebras.bound().min(b.algebras.bound());
    let mut table = Vec::with_capacity(dmax + 1);
    for n in 0..=dmax {
        let mut row = Vec::with_capacity(a.algebras.count(n));
        for x in 0..a.algebras.count(n) as Idx {
            let key = a.key(n, x);
            let bx = key[0];
            let fb = if n == 0 {
                fun.ob(bx)
            } else {
                let spine: Vec<MorId> = (0..n)
                    .map(|j| fun.mor(a.base.edge(n, bx, j, j + 1)))
                    .collect();
                nerve_simplex(&b.base, &spine)
                    .ok_or_else(|| Error::Invalid("image of a base simplex is missing".into()))?
            };
            let mut img = vec![fb];
            img.extend(key[1..].iter().map(|&m| fun.mor(m)));
            row.push(b.find(n, &img).ok_or_else(|| {
                Error::Invalid(format!("image of a {n}-simplex is not an algebra simplex"))
            })?);
        }
        table.push(row);
    }
    SMap::new(a.algebras.clone(), b.algebras.clone(), table)
}

/// Serializable summary of a run.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub monad: String,
    pub config: AlgebraConfig,
    pub cells: usize,
    pub width_classes: Vec<(usize, usize)>,
    pub counts: Vec<usize>,
    pub vertices: Vec<String>,
    pub traces: Vec<DegreeTrace>,
    pub stabilized: bool,
    pub note: &'static str,
    pub em_compare: EmComparison,
}

pub const STABILIZATION_NOTE: &str =
    "stabilization is detected empirically: forgetting each of the last two width classes is a bijection in every degree";

pub fn report(res: &AlgebraResult) -> Result<AlgebraReport> {
    Ok(AlgebraReport {
        monad: res.monad.name().to_string(),
        config: res.config.clone(),
        cells: res.cells_used,
        width_classes: res
            .complex
            .width_classes()
            .into_iter()
            .map(|(w, r)| (w, r.len()))
            .collect(),
        counts: res.counts(),
        vertices: res.algebras.labels().to_vec(),
        traces: res.traces.clone(),
        stabilized: res.stabilized,
        note: STABILIZATION_NOTE,
        em_compare: em_compare(res)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn small() -> AlgebraConfig {
        AlgebraConfig {
            width_max: 5,
            degree_max: 2,
            ..Default::default()
        }
    }

    #[test]
    fn first_cells() {
        let cx = build_cell_complex(3, 1).unwrap();
        assert_eq!(cx.cells, vec![first_cell()]);
        assert!(cx.attachments[0].iter().all(|a| a.target == Target::Unit));
        assert_eq!(build_cell_complex(3, 3).unwrap().len(), 2);
    }

    #[test]
    fn identity_monad_gives_the_base() {
        let m = corpus::monad("identity-chain2").unwrap();
        let r = evaluate_algebras(&m, &small()).unwrap();
        assert!(r.forget.is_iso());
        assert!(em_compare(&r).unwrap().iso);
    }

    #[test]
    fn chain_closure() {
        let m = corpus::monad("chain-closure").unwrap();
        let r = evaluate_algebras(&m, &small()).unwrap();
        assert_eq!(r.algebras.count(0), 2);
        assert!(em_compare(&r).unwrap().iso);
    }

    #[test]
    fn twist_needs_the_unit_cell() {
        let m = corpus::monad("z2-twist").unwrap();
        let a = ablation(&m, &small(), 4).unwrap();
        assert_eq!(a.cells_needed, Some(2));
        assert!(!a.one_short.unwrap().iso);
    }
}
