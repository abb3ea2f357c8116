//! Finite simplicial sets truncated at a dimension bound.
//!
//! A simplicial set is stored as explicit face and degeneracy tables for every
//! simplex (degenerate ones included) in degrees `0..=bound`. The
//! Eilenberg–Zilber presentation (generators plus faces as [`SimplexRef`]s) is
//! available on demand and can be used to build a set.

mod checks;
mod mapping;
mod maps;

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{cap_check, Error, Result};
use crate::fincat::{FinCategory, MorId};
use crate::ordinal::{monotone_maps, OrdMap};

pub(crate) use checks::sphere_maps;
pub use checks::{
    find_inner_horn_failure, is_invertible_edge, is_isofibration, is_quasi_category,
    isofibration_failure, isomorphism, HornFailure,
};
pub use mapping::{mapping_space, restriction_map, MappingSpace};
pub use maps::{enumerate_maps, MapSearch, SMap, SearchOptions, SearchPlan};

pub type Idx = u32;
pub(crate) const NONE: u32 = u32::MAX;

pub const DEFAULT_BOUND: usize = 4;
pub const DEFAULT_SIMPLEX_CAP: usize = 4_000_000;

/// A simplex in Eilenberg–Zilber normal form: `s_{i_1} … s_{i_k} g` with
/// `i_1 > … > i_k` and `g` a nondegenerate generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimplexRef {
    pub dim: usize,
    pub gen: usize,
    #[serde(default)]
    pub word: Vec<usize>,
}

impl SimplexRef {
    pub fn is_well_formed(&self) -> bool {
        self.word.windows(2).all(|w| w[0] > w[1])
            && self
                .word
                .iter()
                .enumerate()
                .all(|(p, &i)| i <= self.dim + self.word.len() - 1 - p)
    }

    pub fn degree(&self) -> usize {
        self.dim + self.word.len()
    }

    /// The surjection `[dim + k] → [dim]` named by the word.
    pub fn surjection(&self) -> Vec<u32> {
        let mut theta: Vec<u32> = (0..=self.dim as u32).collect();
        for &i in self.word.iter().rev() {
            let mut next = theta.clone();
            next.insert(i, theta[i]);
            theta = next;
        }
        theta
    }
}

#[derive(Debug)]
pub struct SSet {
    name: String,
    bound: usize,
    counts: Vec<usize>,
    faces: Vec<Vec<Idx>>,
    degens: Vec<Vec<Idx>>,
    roots: Vec<Vec<(u32, Idx)>>,
    nondeg: Vec<Vec<Idx>>,
    gen_pos: Vec<Vec<Idx>>,
    labels: Vec<String>,
    nerve_of: Option<Arc<FinCategory>>,
    by_faces: Vec<OnceLock<HashMap<Vec<Idx>, Vec<Idx>>>>,
}

impl Clone for SSet {
    fn clone(&self) -> Self {
        SSet {
            name: self.name.clone(),
            bound: self.bound,
            counts: self.counts.clone(),
            faces: self.faces.clone(),
            degens: self.degens.clone(),
            roots: self.roots.clone(),
            nondeg: self.nondeg.clone(),
            gen_pos: self.gen_pos.clone(),
            labels: self.labels.clone(),
            nerve_of: self.nerve_of.clone(),
            by_faces: (0..=self.bound).map(|_| OnceLock::new()).collect(),
        }
    }
}

/// Equality of simplicial sets as tables: same ordering of simplices.
impl PartialEq for SSet {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound
            && self.counts == other.counts
            && self.faces == other.faces
            && self.degens == other.degens
    }
}

impl SSet {
    /// Builds from complete face and degeneracy tables. `faces[n]` has
    /// `counts[n] * (n+1)` entries (empty for `n = 0`); `degens[n]` has
    /// `counts[n] * (n+1)` entries for `n < bound`.
    pub fn from_tables(
        name: &str,
        bound: usize,
        counts: Vec<usize>,
        faces: Vec<Vec<Idx>>,
        degens: Vec<Vec<Idx>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if counts.len() != bound + 1 || faces.len() != bound + 1 || degens.len() != bound + 1 {
            return Err(Error::Invalid(
                "table lengths do not match the bound".into(),
            ));
        }
        for n in 0..=bound {
            let want_f = if n == 0 { 0 } else { counts[n] * (n + 1) };
            let want_d = if n == bound { 0 } else { counts[n] * (n + 1) };
            if faces[n].len() != want_f || degens[n].len() != want_d {
                return Err(Error::Invalid(format!(
                    "degree {n}: table sizes are inconsistent"
                )));
            }
            if n > 0 && faces[n].iter().any(|&f| f as usize >= counts[n - 1]) {
                return Err(Error::Invalid(format!(
                    "degree {n}: face index out of range"
                )));
            }
            if n < bound && degens[n].iter().any(|&d| d as usize >= counts[n + 1]) {
                return Err(Error::Invalid(format!(
                    "degree {n}: degeneracy index out of range"
                )));
            }
        }
        let mut roots: Vec<Vec<(u32, Idx)>> =
            counts.iter().map(|&c| vec![(NONE, NONE); c]).collect();
        for n in 0..bound {
            for x in 0..counts[n] {
                for i in 0..=n {
                    let y = degens[n][x * (n + 1) + i] as usize;
                    if roots[n + 1][y].0 == NONE {
                        roots[n + 1][y] = (i as u32, x as Idx);
                    }
                }
            }
        }
        let nondeg: Vec<Vec<Idx>> = roots
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, r)| r.0 == NONE)
                    .map(|(i, _)| i as Idx)
                    .collect()
            })
            .collect();
        let gen_pos = nondeg
            .iter()
            .zip(&counts)
            .map(|(nd, &c)| {
                let mut p = vec![NONE; c];
                for (k, &x) in nd.iter().enumerate() {
                    p[x as usize] = k as Idx;
                }
                p
            })
            .collect();
        let labels = if labels.len() == counts[0] {
            labels
        } else {
            (0..counts[0]).map(|i| i.to_string()).collect()
        };
        Ok(SSet {
            name: name.to_string(),
            bound,
            counts,
            faces,
            degens,
            roots,
            nondeg,
            gen_pos,
            labels,
            nerve_of: None,
            by_faces: (0..=bound).map(|_| OnceLock::new()).collect(),
        })
    }

    /// Builds from complete per-degree key lists; faces and degeneracies of
    /// keys must land in the lists.
    pub fn from_keys<K, F, D>(
        name: &str,
        bound: usize,
        levels: &[Vec<K>],
        face: F,
        degen: D,
        labels: Vec<String>,
        cap: usize,
    ) -> Result<(SSet, Vec<HashMap<K, Idx>>)>
    where
        K: Eq + Hash + Clone,
        F: Fn(usize, &K, usize) -> K,
        D: Fn(usize, &K, usize) -> K,
    {
        let total: usize = levels.iter().map(|l| l.len()).sum();
        cap_check(&format!("simplices of {name}"), total, cap)?;
        let index: Vec<HashMap<K, Idx>> = levels
            .iter()
            .map(|l| {
                l.iter()
                    .enumerate()
                    .map(|(i, k)| (k.clone(), i as Idx))
                    .collect()
            })
            .collect();
        let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
        let mut faces = vec![Vec::new(); bound + 1];
        let mut degens = vec![Vec::new(); bound + 1];
        for n in 0..=bound {
            for k in &levels[n] {
                if n > 0 {
                    for i in 0..=n {
                        let f = face(n, k, i);
                        let j = index[n - 1].get(&f).ok_or_else(|| {
                            Error::Invalid(format!(
                                "{name}: a face in degree {n} is missing from degree {}",
                                n - 1
                            ))
                        })?;
                        faces[n].push(*j);
                    }
                }
                if n < bound {
                    for i in 0..=n {
                        let d = degen(n, k, i);
                        let j = index[n + 1].get(&d).ok_or_else(|| {
                            Error::Invalid(format!("{name}: a degeneracy in degree {n} is missing"))
                        })?;
                        degens[n].push(*j);
                    }
                }
            }
        }
        Ok((
            SSet::from_tables(name, bound, counts, faces, degens, labels)?,
            index,
        ))
    }

    /// Builds from an Eilenberg–Zilber presentation: `generators[m]` names the
    /// nondegenerate m-simplices and `faces[m][g][i]` is `d_i` of generator `g`.
    pub fn from_presentation(
        name: &str,
        bound: usize,
        generators: &[Vec<String>],
        faces: &[Vec<Vec<SimplexRef>>],
    ) -> Result<SSet> {
        for (m, gs) in generators.iter().enumerate() {
            for g in 0..gs.len() {
                if m == 0 {
                    continue;
                }
                let fs = faces.get(m).and_then(|f| f.get(g)).ok_or_else(|| {
                    Error::Schema(format!("generator {} in dimension {m} has no faces", gs[g]))
                })?;
                if fs.len() != m + 1 {
                    return Err(Error::Schema(format!(
                        "generator {} needs {} faces",
                        gs[g],
                        m + 1
                    )));
                }
                for r in fs {
                    if !r.is_well_formed()
                        || r.degree() != m - 1
                        || r.gen >= generators.get(r.dim).map_or(0, |v| v.len())
                    {
                        return Err(Error::Schema(format!(
                            "bad face reference {r:?} of {}",
                            gs[g]
                        )));
                    }
                }
            }
        }
        type Key = (usize, usize, Vec<u32>);
        let mut levels: Vec<Vec<Key>> = vec![Vec::new(); bound + 1];
        for (n, level) in levels.iter_mut().enumerate() {
            for (m, gs) in generators.iter().enumerate().take(n + 1) {
                for g in 0..gs.len() {
                    for th in monotone_maps(n as i32, m as i32) {
                        if th.is_surjective() {
                            level.push((m, g, th.values));
                        }
                    }
                }
            }
        }
        let face = |_: usize, k: &Key, i: usize| -> Key {
            let (m, g, theta) = k;
            let mut rest = theta.clone();
            let v = rest.remove(i);
            if rest.contains(&v) {
                return (*m, *g, rest);
            }
            let r = &faces[*m][*g][v as usize];
            let psi = r.surjection();
            let shifted: Vec<u32> = rest
                .iter()
                .map(|&t| if t > v { t - 1 } else { t })
                .collect();
            (
                r.dim,
                r.gen,
                shifted.iter().map(|&t| psi[t as usize]).collect(),
            )
        };
        let degen = |_: usize, k: &Key, i: usize| -> Key {
            let (m, g, theta) = k;
            let mut t = theta.clone();
            t.insert(i, theta[i]);
            (*m, *g, t)
        };
        let labels = generators.first().cloned().unwrap_or_default();
        let (s, _) = SSet::from_keys(
            name,
            bound,
            &levels,
            face,
            degen,
            labels,
            DEFAULT_SIMPLEX_CAP,
        )?;
        Ok(s)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn count(&self, n: usize) -> usize {
        self.counts.get(n).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn face(&self, n: usize, x: Idx, i: usize) -> Idx {
        self.faces[n][x as usize * (n + 1) + i]
    }

    pub fn faces_of(&self, n: usize, x: Idx) -> &[Idx] {
        &self.faces[n][x as usize * (n + 1)..(x as usize + 1) * (n + 1)]
    }

    pub fn degen(&self, n: usize, x: Idx, i: usize) -> Idx {
        self.degens[n][x as usize * (n + 1) + i]
    }

    pub fn is_nondegenerate(&self, n: usize, x: Idx) -> bool {
        self.roots[n][x as usize].0 == NONE
    }

    /// For a degenerate simplex, some `(i, x)` with `y = s_i x`.
    pub fn root(&self, n: usize, y: Idx) -> Option<(usize, Idx)> {
        let (i, x) = self.roots[n][y as usize];
        (i != NONE).then_some((i as usize, x))
    }

    pub fn nondegenerate(&self, n: usize) -> &[Idx] {
        self.nondeg.get(n).map_or(&[], |v| v.as_slice())
    }

    pub fn nondegenerate_counts(&self) -> Vec<usize> {
        self.nondeg.iter().map(|v| v.len()).collect()
    }

    pub fn vertex_label(&self, v: Idx) -> &str {
        &self.labels[v as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        if labels.len() == self.counts[0] {
            self.labels = labels;
        }
    }

    pub fn find_vertex(&self, label: &str) -> Option<Idx> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| i as Idx)
    }

    /// The category this set is the nerve of, when known.
    pub fn nerve_of(&self) -> Option<&Arc<FinCategory>> {
        self.nerve_of.as_ref()
    }

    pub fn is_nerve(&self) -> bool {
        self.nerve_of.is_some()
    }

    /// Vertex `j` of an n-simplex.
    pub fn vertex(&self, n: usize, x: Idx, j: usize) -> Idx {
        let mut cur = x;
        let mut deg = n;
        // drop everything above j, then everything below it
        while deg > j {
            cur = self.face(deg, cur, deg);
            deg -= 1;
        }
        while deg > 0 {
            cur = self.face(deg, cur, 0);
            deg -= 1;
        }
        cur
    }

    pub fn vertices(&self, n: usize, x: Idx) -> Vec<Idx> {
        (0..=n).map(|j| self.vertex(n, x, j)).collect()
    }

    /// The edge from vertex `j` to vertex `k` of an n-simplex.
    pub fn edge(&self, n: usize, x: Idx, j: usize, k: usize) -> Idx {
        self.apply(n, x, &[j as u32, k as u32])
    }

    /// `θ^*(x)` for a monotone `θ: [p] → [n]` with `p ≤ bound`.
    pub fn apply(&self, n: usize, x: Idx, theta: &[u32]) -> Idx {
        assert!(
            !theta.is_empty() && theta.len() - 1 <= self.bound,
            "operator out of range"
        );
        let mut image: Vec<u32> = theta.to_vec();
        image.dedup();
        let mut cur = x;
        let mut deg = n;
        for j in (0..=n as u32).rev() {
            if image.binary_search(&j).is_err() {
                cur = self.face(deg, cur, j as usize);
                deg -= 1;
            }
        }
        for j in 0..theta.len().saturating_sub(1) {
            if theta[j] == theta[j + 1] {
                cur = self.degen(deg, cur, j);
                deg += 1;
            }
        }
        cur
    }

    pub fn apply_map(&self, x: Idx, theta: &OrdMap) -> Idx {
        self.apply(theta.cod.0 as usize, x, &theta.values)
    }

    /// Totally degenerate n-simplex on a vertex.
    pub fn constant(&self, v: Idx, n: usize) -> Idx {
        let mut cur = v;
        for d in 0..n {
            cur = self.degen(d, cur, 0);
        }
        cur
    }

    pub fn simplex_ref(&self, n: usize, y: Idx) -> SimplexRef {
        let mut js = Vec::new();
        for j in 0..n {
            if self.degen(n - 1, self.face(n, y, j), j) == y {
                js.push(j);
            }
        }
        let mut cur = y;
        let mut deg = n;
        for &j in js.iter().rev() {
            cur = self.face(deg, cur, j);
            deg -= 1;
        }
        js.reverse();
        SimplexRef {
            dim: deg,
            gen: self.gen_pos[deg][cur as usize] as usize,
            word: js,
        }
    }

    pub fn resolve(&self, r: &SimplexRef) -> Option<Idx> {
        let g = *self.nondeg.get(r.dim)?.get(r.gen)?;
        if r.degree() > self.bound || !r.is_well_formed() {
            return None;
        }
        Some(self.apply(r.dim, g, &r.surjection()))
    }

    /// All n-simplices with exactly the given faces.
    pub fn with_faces(&self, n: usize, faces: &[Idx]) -> &[Idx] {
        let map = self.by_faces[n].get_or_init(|| {
            let mut m: HashMap<Vec<Idx>, Vec<Idx>> = HashMap::new();
            if n > 0 {
                for x in 0..self.counts[n] as Idx {
                    m.entry(self.faces_of(n, x).to_vec()).or_default().push(x);
                }
            }
            m
        });
        map.get(faces).map_or(&[], |v| v.as_slice())
    }

    /// Exhaustive check of the simplicial identities; returns the failures.
    pub fn identity_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let b = self.bound;
        for n in 0..=b {
            for x in 0..self.counts[n] as Idx {
                if n >= 2 {
                    for j in 0..=n {
                        for i in 0..j {
                            let l = self.face(n - 1, self.face(n, x, j), i);
                            let r = self.face(n - 1, self.face(n, x, i), j - 1);
                            if l != r {
                                out.push(format!(
                                    "d{i} d{j} != d{} d{i} on simplex {x} of degree {n}",
                                    j - 1
                                ));
                            }
                        }
                    }
                }
                if n < b {
                    for j in 0..=n {
                        let y = self.degen(n, x, j);
                        for i in 0..=n + 1 {
                            let l = self.face(n + 1, y, i);
                            let ok = if i < j {
                                n >= 1 && l == self.degen(n - 1, self.face(n, x, i), j - 1)
                            } else if i == j || i == j + 1 {
                                l == x
                            } else {
                                n >= 1 && l == self.degen(n - 1, self.face(n, x, i - 1), j)
                            };
                            if !ok {
                                out.push(format!("d{i} s{j} fails on simplex {x} of degree {n}"));
                            }
                        }
                    }
                }
                if n + 2 <= b {
                    for j in 0..=n {
                        for i in 0..=j {
                            let l = self.degen(n + 1, self.degen(n, x, j), i);
                            let r = self.degen(n + 1, self.degen(n, x, i), j + 1);
                            if l != r {
                                out.push(format!(
                                    "s{i} s{j} != s{} s{i} on simplex {x} of degree {n}",
                                    j + 1
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Reverses every simplex: `d_i ↦ d_{n-i}`, `s_i ↦ s_{n-i}`.
    pub fn opposite(&self) -> SSet {
        let b = self.bound;
        let flip = |tables: &Vec<Vec<Idx>>| -> Vec<Vec<Idx>> {
            tables
                .iter()
                .enumerate()
                .map(|(n, t)| {
                    let mut out = t.clone();
                    for chunk in out.chunks_mut(n + 1) {
                        chunk.reverse();
                    }
                    out
                })
                .collect()
        };
        let mut s = SSet::from_tables(
            &format!("{}^op", self.name),
            b,
            self.counts.clone(),
            flip(&self.faces),
            flip(&self.degens),
            self.labels.clone(),
        )
        .expect("opposite of a valid table");
        s.nerve_of = self.nerve_of.as_ref().map(|c| Arc::new(c.opposite()));
        s
    }

    /// The same set with fewer dimensions.
    pub fn truncate(&self, bound: usize) -> SSet {
        if bound >= self.bound {
            return self.clone();
        }
        let mut faces = self.faces[..=bound].to_vec();
        let mut degens = self.degens[..=bound].to_vec();
        degens[bound].clear();
        faces.truncate(bound + 1);
        let mut s = SSet::from_tables(
            &self.name,
            bound,
            self.counts[..=bound].to_vec(),
            faces,
            degens,
            self.labels.clone(),
        )
        .expect("truncation of a valid table");
        s.nerve_of = self.nerve_of.clone();
        s
    }

    pub fn to_json(&self) -> SSetJson {
        let generators: Vec<Vec<String>> = (0..=self.bound)
            .map(|n| {
                self.nondeg[n]
                    .iter()
                    .map(|&x| {
                        if n == 0 {
                            self.labels[x as usize].clone()
                        } else {
                            format!("{n}:{x}")
                        }
                    })
                    .collect()
            })
            .collect();
        let faces: Vec<Vec<Vec<SimplexRef>>> = (0..=self.bound)
            .map(|n| {
                if n == 0 {
                    return Vec::new();
                }
                self.nondeg[n]
                    .iter()
                    .map(|&x| {
                        (0..=n)
                            .map(|i| self.simplex_ref(n - 1, self.face(n, x, i)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        SSetJson {
            name: self.name.clone(),
            bound: self.bound,
            generators,
            faces,
        }
    }

    pub fn from_json(j: &SSetJson) -> Result<SSet> {
        SSet::from_presentation(&j.name, j.bound, &j.generators, &j.faces)
    }
}

/// JSON presentation: generator names per dimension and their faces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SSetJson {
    pub name: String,
    pub bound: usize,
    pub generators: Vec<Vec<String>>,
    pub faces: Vec<Vec<Vec<SimplexRef>>>,
}

/// Nerve of a finite category up to degree `bound`.
pub fn nerve(c: &Arc<FinCategory>, bound: usize, cap: usize) -> Result<SSet> {
    c.ensure_valid()?;
    let mut levels: Vec<Vec<Vec<MorId>>> = Vec::with_capacity(bound + 1);
    levels.push(c.objects().map(|o| vec![c.identity(o)]).collect());
    if bound >= 1 {
        levels.push(c.morphism_ids().map(|m| vec![m]).collect());
    }
    let mut total = levels.iter().map(|l| l.len()).sum::<usize>();
    for n in 2..=bound {
        let mut next = Vec::new();
        for chain in &levels[n - 1] {
            let last = c.tgt(*chain.last().expect("non-empty chain"));
            for o in c.objects() {
                for &m in c.hom(last, o) {
                    let mut k = chain.clone();
                    k.push(m);
                    next.push(k);
                }
            }
        }
        total += next.len();
        cap_check(&format!("simplices of N({})", c.name()), total, cap)?;
        levels.push(next);
    }
    let face = |n: usize, k: &Vec<MorId>, i: usize| -> Vec<MorId> {
        if n == 1 {
            let o = if i == 0 { c.tgt(k[0]) } else { c.src(k[0]) };
            return vec![c.identity(o)];
        }
        let mut out = k.clone();
        if i == 0 {
            out.remove(0);
        } else if i == n {
            out.pop();
        } else {
            let g = out.remove(i);
            out[i - 1] = c.comp(g, out[i - 1]);
        }
        out
    };
    let degen = |n: usize, k: &Vec<MorId>, i: usize| -> Vec<MorId> {
        if n == 0 {
            return k.clone();
        }
        let o = if i < n { c.src(k[i]) } else { c.tgt(k[n - 1]) };
        let mut out = k.clone();
        out.insert(i, c.identity(o));
        out
    };
    let labels = c.object_names().to_vec();
    let (mut s, _) = SSet::from_keys(
        &format!("N({})", c.name()),
        bound,
        &levels,
        face,
        degen,
        labels,
        cap,
    )?;
    s.nerve_of = Some(c.clone());
    Ok(s)
}

/// The chain of morphisms named by an n-simplex of a nerve built by [`nerve`].
pub fn nerve_chain(a: &SSet, n: usize, x: Idx) -> Vec<MorId> {
    let c = a.nerve_of().expect("nerve");
    if n == 0 {
        return vec![c.identity(x)];
    }
    (0..n).map(|j| a.edge(n, x, j, j + 1)).collect()
}

/// The simplex of a nerve with spine `f_1, …, f_n` (`n ≥ 1`, composable).
pub fn nerve_simplex(a: &SSet, spine: &[MorId]) -> Option<Idx> {
    let c = a.nerve_of()?;
    let n = spine.len();
    if n == 0 || n > a.bound() || spine.iter().any(|&f| f as usize >= c.morphism_count()) {
        return None;
    }
    if n == 1 {
        return Some(spine[0]);
    }
    let mut faces = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let f: Vec<MorId> = if i == 0 {
            spine[1..].to_vec()
        } else if i == n {
            spine[..n - 1].to_vec()
        } else {
            let mut v = spine.to_vec();
            let g = v.remove(i);
            v[i - 1] = c.compose(g, v[i - 1])?;
            v
        };
        faces.push(nerve_simplex(a, &f)?);
    }
    a.with_faces(n, &faces).first().copied()
}

type SubsetLevels = (SSet, Vec<Vec<Vec<u32>>>, Vec<HashMap<Vec<u32>, Idx>>);

/// Subsets of the standard simplex, as predicates on the image of `[k] → [n]`.
fn simplex_subset(
    name: &str,
    n: usize,
    bound: usize,
    keep: impl Fn(&[u32]) -> bool,
) -> Result<SubsetLevels> {
    let mut levels: Vec<Vec<Vec<u32>>> = Vec::new();
    for k in 0..=bound {
        levels.push(
            monotone_maps(k as i32, n as i32)
                .into_iter()
                .map(|f| f.values)
                .filter(|v| {
                    let mut img = v.clone();
                    img.dedup();
                    keep(&img)
                })
                .collect(),
        );
    }
    let face = |_: usize, k: &Vec<u32>, i: usize| {
        let mut v = k.clone();
        v.remove(i);
        v
    };
    let degen = |_: usize, k: &Vec<u32>, i: usize| {
        let mut v = k.clone();
        v.insert(i, k[i]);
        v
    };
    let labels = (0..=n).map(|i| i.to_string()).collect();
    let (s, index) = SSet::from_keys(
        name,
        bound,
        &levels,
        face,
        degen,
        labels,
        DEFAULT_SIMPLEX_CAP,
    )?;
    Ok((s, levels, index))
}

/// `Δ^n` truncated at `bound`; it is the nerve of `[n]`.
pub fn standard_simplex(n: usize, bound: usize) -> SSet {
    standard_simplex_indexed(n, bound).0
}

/// `Δ^n` with the lookup from vertex sequences to simplex indices.
pub(crate) fn standard_simplex_indexed(
    n: usize,
    bound: usize,
) -> (SSet, Vec<HashMap<Vec<u32>, Idx>>) {
    let (s, _, index) = standard_simplex_levels(n, bound);
    (s, index)
}

/// `Δ^n` with its simplices as vertex sequences, both ways.
pub(crate) fn standard_simplex_levels(n: usize, bound: usize) -> SubsetLevels {
    let (mut s, levels, index) =
        simplex_subset(&format!("Delta^{n}"), n, bound, |_| true).expect("standard simplex");
    s.nerve_of = Some(Arc::new(FinCategory::ordinal(n)));
    (s, levels, index)
}

/// `∂Δ^n` with its inclusion into `Δ^n`.
pub fn boundary(n: usize, bound: usize) -> Result<(SSet, SMap)> {
    let sub = simplex_subset(&format!("dDelta^{n}"), n, bound, |img| img.len() < n + 1)?;
    subset_inclusion(sub, n, bound)
}

/// The horn `Λ^n_k` with its inclusion into `Δ^n`.
pub fn horn(n: usize, k: usize, bound: usize) -> Result<(SSet, SMap)> {
    if k > n || n == 0 {
        return Err(Error::Index(format!("horn Lambda^{n}_{k}")));
    }
    let sub = simplex_subset(&format!("Lambda^{n}_{k}"), n, bound, |img| {
        (0..=n as u32)
            .filter(|&j| j != k as u32)
            .any(|j| img.binary_search(&j).is_err())
    })?;
    subset_inclusion(sub, n, bound)
}

pub fn inner_horn(n: usize, k: usize, bound: usize) -> Result<(SSet, SMap)> {
    if k == 0 || k >= n {
        return Err(Error::Index(format!("Lambda^{n}_{k} is not an inner horn")));
    }
    horn(n, k, bound)
}

fn subset_inclusion(sub: SubsetLevels, n: usize, bound: usize) -> Result<(SSet, SMap)> {
    let (s, levels, _) = sub;
    let (whole, idx) = standard_simplex_indexed(n, bound);
    let table = levels
        .iter()
        .enumerate()
        .map(|(k, l)| l.iter().map(|key| idx[k][key]).collect())
        .collect();
    let s = Arc::new(s);
    let inc = SMap::new(s.clone(), Arc::new(whole), table)?;
    Ok(((*s).clone(), inc))
}

/// Degreewise product, truncated at `bound`; simplex `(x, y)` has index `x·|Y_n| + y`.
pub fn product(x: &SSet, y: &SSet, bound: usize) -> Result<SSet> {
    let b = bound.min(x.bound()).min(y.bound());
    let counts: Vec<usize> = (0..=b).map(|n| x.count(n) * y.count(n)).collect();
    cap_check(
        "simplices of a product",
        counts.iter().sum(),
        DEFAULT_SIMPLEX_CAP,
    )?;
    let mut faces = vec![Vec::new(); b + 1];
    let mut degens = vec![Vec::new(); b + 1];
    for n in 0..=b {
        let ny = y.count(n) as Idx;
        for a in 0..x.count(n) as Idx {
            for c in 0..ny {
                if n > 0 {
                    let ny1 = y.count(n - 1) as Idx;
                    for i in 0..=n {
                        faces[n].push(x.face(n, a, i) * ny1 + y.face(n, c, i));
                    }
                }
                if n < b {
                    let ny1 = y.count(n + 1) as Idx;
                    for i in 0..=n {
                        degens[n].push(x.degen(n, a, i) * ny1 + y.degen(n, c, i));
                    }
                }
            }
        }
    }
    let labels = (0..x.count(0))
        .flat_map(|a| (0..y.count(0)).map(move |c| (a, c)))
        .map(|(a, c)| format!("({},{})", x.labels[a], y.labels[c]))
        .collect();
    let mut s = SSet::from_tables(
        &format!("{}x{}", x.name, y.name),
        b,
        counts,
        faces,
        degens,
        labels,
    )?;
    if let (Some(c), Some(d)) = (x.nerve_of(), y.nerve_of()) {
        let (p, _, _) = crate::fincat::product_category(c, d)?;
        s.nerve_of = Some(p);
    }
    Ok(s)
}

/// Product with its two projections.
pub fn product_with_projections(
    x: &Arc<SSet>,
    y: &Arc<SSet>,
    bound: usize,
) -> Result<(Arc<SSet>, SMap, SMap)> {
    let p = Arc::new(product(x, y, bound)?);
    let b = p.bound();
    let t0 = (0..=b)
        .map(|n| {
            (0..p.count(n) as Idx)
                .map(|i| i / y.count(n) as Idx)
                .collect()
        })
        .collect();
    let t1 = (0..=b)
        .map(|n| {
            (0..p.count(n) as Idx)
                .map(|i| i % y.count(n) as Idx)
                .collect()
        })
        .collect();
    let p0 = SMap::new(p.clone(), x.clone(), t0)?;
    let p1 = SMap::new(p.clone(), y.clone(), t1)?;
    Ok((p, p0, p1))
}

/// Sub-simplicial set of simplices accepted by `keep` (must be closed under
/// faces and degeneracies), with its inclusion.
pub fn subset(
    x: &Arc<SSet>,
    name: &str,
    keep: impl Fn(usize, Idx) -> bool,
) -> Result<(Arc<SSet>, SMap)> {
    let b = x.bound();
    let members: Vec<Vec<Idx>> = (0..=b)
        .map(|n| (0..x.count(n) as Idx).filter(|&i| keep(n, i)).collect())
        .collect();
    let pos: Vec<HashMap<Idx, Idx>> = members
        .iter()
        .map(|m| m.iter().enumerate().map(|(k, &i)| (i, k as Idx)).collect())
        .collect();
    let mut faces = vec![Vec::new(); b + 1];
    let mut degens = vec![Vec::new(); b + 1];
    for n in 0..=b {
        for &i in &members[n] {
            if n > 0 {
                for j in 0..=n {
                    let f = x.face(n, i, j);
                    faces[n].push(*pos[n - 1].get(&f).ok_or_else(|| {
                        Error::Invalid(format!("{name} is not closed under faces"))
                    })?);
                }
            }
            if n < b {
                for j in 0..=n {
                    let d = x.degen(n, i, j);
                    degens[n].push(*pos[n + 1].get(&d).ok_or_else(|| {
                        Error::Invalid(format!("{name} is not closed under degeneracies"))
                    })?);
                }
            }
        }
    }
    let labels = members[0]
        .iter()
        .map(|&v| x.labels[v as usize].clone())
        .collect();
    let s = Arc::new(SSet::from_tables(
        name,
        b,
        members.iter().map(|m| m.len()).collect(),
        faces,
        degens,
        labels,
    )?);
    let inc = SMap::new(s.clone(), x.clone(), members)?;
    Ok((s, inc))
}

/// Pullback of `f: X → Z` and `g: Y → Z` with both projections.
pub fn pullback(f: &SMap, g: &SMap) -> Result<(Arc<SSet>, SMap, SMap)> {
    if !Arc::ptr_eq(f.cod(), g.cod()) && **f.cod() != **g.cod() {
        return Err(Error::Invalid(
            "pullback of maps with different codomains".into(),
        ));
    }
    let (x, y) = (f.dom().clone(), g.dom().clone());
    let (p, p0, p1) = product_with_projections(&x, &y, f.bound().min(g.bound()))?;
    let (s, inc) = subset(&p, &format!("{}x_{}", x.name(), y.name()), |n, i| {
        f.at(n, p0.at(n, i)) == g.at(n, p1.at(n, i))
    })?;
    Ok((s, inc.then(&p0)?, inc.then(&p1)?))
}

/// Equalizer of parallel maps, with its inclusion.
pub fn equalizer(f: &SMap, g: &SMap) -> Result<(Arc<SSet>, SMap)> {
    if **f.dom() != **g.dom() || **f.cod() != **g.cod() {
        return Err(Error::Invalid("equalizer of non-parallel maps".into()));
    }
    let x = f.dom().clone();
    subset(&x, &format!("eq({})", x.name()), |n, i| {
        f.at(n, i) == g.at(n, i)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Arc<FinCategory> {
        Arc::new(FinCategory::ordinal(n))
    }

    #[test]
    fn nerve_of_chain_counts() {
        let c = Arc::new(FinCategory::chain("abc", &["a", "b", "c"]).unwrap());
        let n = nerve(&c, 3, 1000).unwrap();
        assert_eq!(n.nondegenerate_counts(), vec![3, 3, 1, 0]);
        assert!(n.identity_failures().is_empty());
    }

    #[test]
    fn nerve_of_ordinal_is_standard_simplex() {
        let a = nerve(&chain(2), 3, 1000).unwrap();
        let b = standard_simplex(2, 3);
        assert!(isomorphism(&a, &b).is_some());
    }

    #[test]
    fn boundaries_and_horns() {
        let (b1, _) = boundary(1, 2).unwrap();
        assert_eq!(b1.nondegenerate_counts(), vec![2, 0, 0]);
        let (b2, _) = boundary(2, 2).unwrap();
        assert_eq!(b2.nondegenerate_counts()[1], 3);
        let (h, _) = inner_horn(2, 1, 2).unwrap();
        assert_eq!(h.nondegenerate_counts(), vec![3, 2, 0]);
        assert!(inner_horn(2, 0, 2).is_err());
    }

    #[test]
    fn square_has_two_triangles() {
        let d1 = standard_simplex(1, 3);
        let p = product(&d1, &d1, 3).unwrap();
        assert_eq!(p.nondegenerate_counts(), vec![4, 5, 2, 0]);
        assert!(p.identity_failures().is_empty());
    }

    #[test]
    fn simplex_refs_round_trip() {
        let n = nerve(&chain(2), 4, 1000).unwrap();
        for d in 0..=4 {
            for x in 0..n.count(d) as Idx {
                let r = n.simplex_ref(d, x);
                assert!(r.is_well_formed());
                assert_eq!(n.resolve(&r), Some(x));
            }
        }
    }

    #[test]
    fn presentation_round_trip() {
        let c = Arc::new(
            FinCategory::poset(
                "d",
                &["0", "x", "y", "1"],
                &[("0", "x"), ("0", "y"), ("x", "1"), ("y", "1")],
            )
            .unwrap(),
        );
        let n = nerve(&c, 3, 1000).unwrap();
        let back = SSet::from_json(&n.to_json()).unwrap();
        assert!(isomorphism(&n, &back).is_some());
    }

    #[test]
    fn opposite_is_involutive() {
        let n = nerve(&chain(2), 3, 1000).unwrap();
        assert_eq!(n.opposite().opposite(), n);
        assert!(n.opposite().identity_failures().is_empty());
    }
}
