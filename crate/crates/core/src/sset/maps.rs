use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::Functor;

use super::{Idx, SSet, SimplexRef, NONE};

/// A simplicial map, stored degreewise up to the smaller of the two bounds.
#[derive(Clone, Debug)]
pub struct SMap {
    dom: Arc<SSet>,
    cod: Arc<SSet>,
    table: Vec<Vec<Idx>>,
}

impl PartialEq for SMap {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && *self.dom == *other.dom && *self.cod == *other.cod
    }
}

impl SMap {
    pub fn new(dom: Arc<SSet>, cod: Arc<SSet>, table: Vec<Vec<Idx>>) -> Result<Self> {
        let m = SMap { dom, cod, table };
        if let Some(v) = m.violations().into_iter().next() {
            return Err(Error::Invalid(v));
        }
        Ok(m)
    }

    pub(crate) fn new_unchecked(dom: Arc<SSet>, cod: Arc<SSet>, table: Vec<Vec<Idx>>) -> Self {
        SMap { dom, cod, table }
    }

    pub fn identity(x: Arc<SSet>) -> Self {
        let table = (0..=x.bound())
            .map(|n| (0..x.count(n) as Idx).collect())
            .collect();
        SMap {
            dom: x.clone(),
            cod: x,
            table,
        }
    }

    /// Extends an assignment on nondegenerate simplices (in the order of
    /// [`SSet::nondegenerate`]) to every simplex.
    pub fn from_generators(dom: Arc<SSet>, cod: Arc<SSet>, images: &[Vec<Idx>]) -> Result<Self> {
        let b = dom.bound().min(cod.bound());
        let mut table: Vec<Vec<Idx>> = (0..=b).map(|n| vec![NONE; dom.count(n)]).collect();
        for n in 0..=b {
            for (k, &x) in dom.nondegenerate(n).iter().enumerate() {
                let img = *images.get(n).and_then(|v| v.get(k)).ok_or_else(|| {
                    Error::Invalid(format!("no image for generator {k} in degree {n}"))
                })?;
                if img as usize >= cod.count(n) {
                    return Err(Error::Invalid(format!(
                        "image of generator {k} in degree {n} out of range"
                    )));
                }
                table[n][x as usize] = img;
            }
            for y in 0..dom.count(n) as Idx {
                if let Some((i, x)) = dom.root(n, y) {
                    table[n][y as usize] = cod.degen(n - 1, table[n - 1][x as usize], i);
                }
            }
        }
        Self::new(dom, cod, table)
    }

    /// Sends everything to the degenerate simplices on one vertex.
    pub fn constant(dom: Arc<SSet>, cod: Arc<SSet>, v: Idx) -> Self {
        let b = dom.bound().min(cod.bound());
        let table = (0..=b)
            .map(|n| vec![cod.constant(v, n); dom.count(n)])
            .collect();
        SMap { dom, cod, table }
    }

    /// The map of nerves induced by a functor; both sets must be nerves of
    /// the functor's domain and codomain.
    pub fn of_functor(f: &Functor, dom: Arc<SSet>, cod: Arc<SSet>) -> Result<Self> {
        let b = dom.bound().min(cod.bound());
        let mut table: Vec<Vec<Idx>> = Vec::with_capacity(b + 1);
        table.push((0..dom.count(0) as Idx).map(|o| f.ob(o)).collect());
        if b >= 1 {
            table.push((0..dom.count(1) as Idx).map(|m| f.mor(m)).collect());
        }
        for n in 2..=b {
            let mut row = Vec::with_capacity(dom.count(n));
            for x in 0..dom.count(n) as Idx {
                let faces: Vec<Idx> = dom
                    .faces_of(n, x)
                    .iter()
                    .map(|&y| table[n - 1][y as usize])
                    .collect();
                let c = cod.with_faces(n, &faces);
                if c.len() != 1 {
                    return Err(Error::Invalid("codomain is not a nerve".into()));
                }
                row.push(c[0]);
            }
            table.push(row);
        }
        Self::new(dom, cod, table)
    }

    pub fn dom(&self) -> &Arc<SSet> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<SSet> {
        &self.cod
    }

    pub fn bound(&self) -> usize {
        self.table.len() - 1
    }

    pub fn at(&self, n: usize, x: Idx) -> Idx {
        self.table[n][x as usize]
    }

    pub fn table(&self) -> &[Vec<Idx>] {
        &self.table
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let b = self.dom.bound().min(self.cod.bound());
        if self.table.len() != b + 1 {
            v.push(format!(
                "map table covers {} degrees, expected {}",
                self.table.len(),
                b + 1
            ));
            return v;
        }
        for n in 0..=b {
            if self.table[n].len() != self.dom.count(n)
                || self.table[n]
                    .iter()
                    .any(|&y| y as usize >= self.cod.count(n))
            {
                v.push(format!("degree {n}: table has the wrong shape"));
                return v;
            }
        }
        for n in 0..=b {
            for x in 0..self.dom.count(n) as Idx {
                let fx = self.at(n, x);
                if n > 0 {
                    for i in 0..=n {
                        if self.at(n - 1, self.dom.face(n, x, i)) != self.cod.face(n, fx, i) {
                            v.push(format!(
                                "does not commute with d{i} on simplex {x} of degree {n}"
                            ));
                        }
                    }
                }
                if n < b {
                    for i in 0..=n {
                        if self.at(n + 1, self.dom.degen(n, x, i)) != self.cod.degen(n, fx, i) {
                            v.push(format!(
                                "does not commute with s{i} on simplex {x} of degree {n}"
                            ));
                        }
                    }
                }
            }
        }
        v
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &SMap) -> Result<SMap> {
        if !Arc::ptr_eq(&self.cod, &g.dom) && *self.cod != *g.dom {
            return Err(Error::Invalid("maps are not composable".into()));
        }
        let b = self.bound().min(g.bound());
        let table = (0..=b)
            .map(|n| self.table[n].iter().map(|&y| g.at(n, y)).collect())
            .collect();
        Ok(SMap {
            dom: self.dom.clone(),
            cod: g.cod.clone(),
            table,
        })
    }

    pub fn is_mono(&self) -> bool {
        self.table.iter().enumerate().all(|(n, row)| {
            let mut seen = vec![false; self.cod.count(n)];
            row.iter()
                .all(|&y| !std::mem::replace(&mut seen[y as usize], true))
        })
    }

    pub fn is_epi(&self) -> bool {
        self.table.iter().enumerate().all(|(n, row)| {
            let mut seen = vec![false; self.cod.count(n)];
            for &y in row {
                seen[y as usize] = true;
            }
            seen.into_iter().all(|s| s)
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }

    pub fn opposite(&self) -> SMap {
        SMap {
            dom: Arc::new(self.dom.opposite()),
            cod: Arc::new(self.cod.opposite()),
            table: self.table.clone(),
        }
    }

    /// Same table against opposites that were already built.
    pub fn opposite_between(&self, dom_op: Arc<SSet>, cod_op: Arc<SSet>) -> SMap {
        SMap {
            dom: dom_op,
            cod: cod_op,
            table: self.table.clone(),
        }
    }

    /// Generator images in normal form.
    pub fn assignment(&self) -> Vec<Vec<SimplexRef>> {
        (0..=self.bound())
            .map(|n| {
                self.dom
                    .nondegenerate(n)
                    .iter()
                    .map(|&x| self.cod.simplex_ref(n, self.at(n, x)))
                    .collect()
            })
            .collect()
    }
}

/// Backtracking search for simplicial maps `K → A`.
///
/// Nondegenerate simplices of `K` are visited so that each comes right after
/// the last of its vertices; candidates in degree ≥ 1 are looked up from the
/// images of their faces.
#[derive(Clone, Debug)]
pub struct SearchPlan {
    top: usize,
    order: Vec<(usize, Idx)>,
    pos: Vec<Vec<u32>>,
}

#[derive(Default)]
pub struct SearchOptions<'a> {
    pub pins: HashMap<(usize, Idx), Idx>,
    pub injective: bool,
    pub vertex_ok: Option<&'a dyn Fn(Idx, Idx) -> bool>,
}

impl SearchPlan {
    pub fn new(k: &SSet, top: usize) -> Self {
        let top = top.min(k.bound());
        let mut order: Vec<(usize, usize, Idx)> = Vec::new();
        for n in 0..=top {
            for &x in k.nondegenerate(n) {
                let last = (0..=n).map(|j| k.vertex(n, x, j)).max().unwrap_or(0) as usize;
                order.push((last, n, x));
            }
        }
        order.sort_unstable();
        let mut pos: Vec<Vec<u32>> = (0..=top).map(|n| vec![NONE; k.count(n)]).collect();
        for (p, &(_, n, x)) in order.iter().enumerate() {
            pos[n][x as usize] = p as u32;
        }
        SearchPlan {
            top,
            order: order.into_iter().map(|(_, n, x)| (n, x)).collect(),
            pos,
        }
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[(usize, Idx)] {
        &self.order
    }

    pub fn position(&self, n: usize, x: Idx) -> Option<usize> {
        let p = self.pos[n][x as usize];
        (p != NONE).then_some(p as usize)
    }

    /// Image of any simplex of `K` under the map whose generator images are `img`.
    pub fn eval(&self, k: &SSet, a: &SSet, img: &[Idx], n: usize, y: Idx) -> Idx {
        let p = self.pos[n][y as usize];
        if p != NONE {
            return img[p as usize];
        }
        let (i, x) = k.root(n, y).expect("degenerate simplex has a root");
        a.degen(n - 1, self.eval(k, a, img, n - 1, x), i)
    }

    pub fn full_table(&self, k: &SSet, a: &SSet, img: &[Idx]) -> Vec<Vec<Idx>> {
        (0..=self.top)
            .map(|n| {
                (0..k.count(n) as Idx)
                    .map(|y| self.eval(k, a, img, n, y))
                    .collect()
            })
            .collect()
    }

    /// Calls `visit` on every map; stops early when it returns `false`.
    pub fn run(
        &self,
        k: &SSet,
        a: &SSet,
        opts: &SearchOptions<'_>,
        visit: &mut dyn FnMut(&[Idx]) -> bool,
    ) {
        let mut img = vec![NONE; self.order.len()];
        let mut used: Vec<Vec<bool>> = if opts.injective {
            (0..=self.top.min(a.bound()))
                .map(|n| vec![false; a.count(n)])
                .collect()
        } else {
            Vec::new()
        };
        if self.top > a.bound() {
            return;
        }
        self.step(0, k, a, opts, &mut img, &mut used, visit);
    }

    #[allow(clippy::too_many_arguments)]
    fn step(
        &self,
        p: usize,
        k: &SSet,
        a: &SSet,
        opts: &SearchOptions<'_>,
        img: &mut Vec<Idx>,
        used: &mut Vec<Vec<bool>>,
        visit: &mut dyn FnMut(&[Idx]) -> bool,
    ) -> bool {
        if p == self.order.len() {
            return visit(img);
        }
        let (n, x) = self.order[p];
        let pin = opts.pins.get(&(n, x)).copied();
        let buf: Vec<Idx>;
        let cands: &[Idx] = if n == 0 {
            match pin {
                Some(v) => {
                    buf = vec![v];
                    &buf
                }
                None => {
                    buf = (0..a.count(0) as Idx).collect();
                    &buf
                }
            }
        } else {
            let faces: Vec<Idx> = k
                .faces_of(n, x)
                .iter()
                .map(|&f| self.eval(k, a, img, n - 1, f))
                .collect();
            let c = a.with_faces(n, &faces);
            match pin {
                Some(v) => {
                    buf = if c.contains(&v) { vec![v] } else { Vec::new() };
                    &buf
                }
                None => c,
            }
        };
        for &c in cands {
            if n == 0 {
                if let Some(ok) = opts.vertex_ok {
                    if !ok(x, c) {
                        continue;
                    }
                }
            }
            if opts.injective {
                if !a.is_nondegenerate(n, c) || used[n][c as usize] {
                    continue;
                }
                used[n][c as usize] = true;
            }
            img[p] = c;
            let go_on = self.step(p + 1, k, a, opts, img, used, visit);
            if opts.injective {
                used[n][c as usize] = false;
            }
            if !go_on {
                return false;
            }
        }
        img[p] = NONE;
        true
    }
}

/// A search plan bound to its two simplicial sets.
pub struct MapSearch<'a> {
    pub k: &'a SSet,
    pub a: &'a SSet,
    pub plan: SearchPlan,
}

impl<'a> MapSearch<'a> {
    pub fn new(k: &'a SSet, a: &'a SSet) -> Self {
        MapSearch {
            k,
            a,
            plan: SearchPlan::new(k, a.bound()),
        }
    }

    pub fn eval(&self, img: &[Idx], n: usize, y: Idx) -> Idx {
        self.plan.eval(self.k, self.a, img, n, y)
    }

    pub fn run(&self, opts: &SearchOptions<'_>, visit: &mut dyn FnMut(&[Idx]) -> bool) {
        self.plan.run(self.k, self.a, opts, visit)
    }

    pub fn count(&self) -> usize {
        let mut c = 0;
        self.run(&SearchOptions::default(), &mut |_| {
            c += 1;
            true
        });
        c
    }
}

/// Every simplicial map `K → A` (up to the smaller bound).
pub fn enumerate_maps(k: &Arc<SSet>, a: &Arc<SSet>) -> Vec<SMap> {
    let s = MapSearch::new(k, a);
    let mut out = Vec::new();
    s.run(&SearchOptions::default(), &mut |img| {
        let t = s.plan.full_table(k, a, img);
        out.push(SMap::new_unchecked(k.clone(), a.clone(), t));
        true
    });
    out
}
