//! Finite categories, functors and natural transformations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{cap_check, Error, Result};

pub type ObjId = u32;
pub type MorId = u32;

pub const DEFAULT_MORPHISM_CAP: usize = 10_000;
const NONE: u32 = u32::MAX;
const DENSE_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub id: String,
    pub src: ObjId,
    pub tgt: ObjId,
}

#[derive(Clone, Debug)]
enum CompTable {
    Dense(Vec<u32>),
    Sparse(HashMap<(MorId, MorId), MorId>),
}

#[derive(Clone, Debug)]
pub struct FinCategory {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    comp: CompTable,
    hom: Vec<Vec<MorId>>,
    obj_index: HashMap<String, ObjId>,
    mor_index: HashMap<String, MorId>,
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        if self.objects != other.objects
            || self.morphisms != other.morphisms
            || self.identities != other.identities
        {
            return false;
        }
        let n = self.morphisms.len() as MorId;
        (0..n).all(|g| (0..n).all(|f| self.compose(g, f) == other.compose(g, f)))
    }
}

impl Eq for FinCategory {}

/// One failed axiom, as found by [`FinCategory::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    MissingComposite { g: String, f: String },
    BadComposite { g: String, f: String, gf: String },
    LeftUnit { f: String },
    RightUnit { f: String },
    NonAssociative { h: String, g: String, f: String },
    BadIdentity { object: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingComposite { g, f } => write!(out, "missing composite {g} o {f}"),
            Violation::BadComposite { g, f, gf } => {
                write!(out, "composite {g} o {f} = {gf} has wrong endpoints")
            }
            Violation::LeftUnit { f } => write!(out, "left unit law fails at {f}"),
            Violation::RightUnit { f } => write!(out, "right unit law fails at {f}"),
            Violation::NonAssociative { h, g, f } => {
                write!(out, "non-associative triple ({h}, {g}, {f})")
            }
            Violation::BadIdentity { object } => {
                write!(out, "identity of {object} is not an endomorphism of it")
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl FinCategory {
    /// Builds a category from raw tables. Referential integrity is enforced
    /// here; the category axioms are only checked by [`validate`](Self::validate).
    /// Composites with an identity may be omitted and are then filled in.
    pub fn from_parts(
        name: &str,
        objects: Vec<String>,
        morphisms: Vec<(String, String, String)>,
        identities: &BTreeMap<String, String>,
        composition: &[(String, String, String)],
        cap: usize,
    ) -> Result<Self> {
        cap_check("morphisms", morphisms.len(), cap)?;
        let mut obj_index = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if obj_index.insert(o.clone(), i as ObjId).is_some() {
                return Err(Error::Schema(format!("duplicate object {o}")));
            }
        }
        let mut mor_index = HashMap::new();
        let mut mors = Vec::with_capacity(morphisms.len());
        for (i, (id, s, t)) in morphisms.into_iter().enumerate() {
            let src = *obj_index
                .get(&s)
                .ok_or_else(|| Error::Schema(format!("morphism {id}: unknown source {s}")))?;
            let tgt = *obj_index
                .get(&t)
                .ok_or_else(|| Error::Schema(format!("morphism {id}: unknown target {t}")))?;
            if mor_index.insert(id.clone(), i as MorId).is_some() {
                return Err(Error::Schema(format!("duplicate morphism {id}")));
            }
            mors.push(Morphism { id, src, tgt });
        }
        let mut ids = Vec::with_capacity(objects.len());
        for o in &objects {
            let id = identities
                .get(o)
                .ok_or_else(|| Error::Schema(format!("object {o} has no identity")))?;
            let m = *mor_index
                .get(id)
                .ok_or_else(|| Error::Schema(format!("identity {id} is not a morphism")))?;
            ids.push(m);
        }
        let n = mors.len();
        let mut comp = if n <= DENSE_LIMIT {
            CompTable::Dense(vec![NONE; n * n])
        } else {
            CompTable::Sparse(HashMap::new())
        };
        let lookup = |s: &str| {
            mor_index
                .get(s)
                .copied()
                .ok_or_else(|| Error::Schema(format!("composition mentions unknown morphism {s}")))
        };
        for (g, f, gf) in composition {
            let (g, f, gf) = (lookup(g)?, lookup(f)?, lookup(gf)?);
            if mors[f as usize].tgt != mors[g as usize].src {
                return Err(Error::Schema(format!(
                    "composition entry {} o {} is not composable",
                    mors[g as usize].id, mors[f as usize].id
                )));
            }
            set_comp(&mut comp, n, g, f, gf);
        }
        let mut hom = vec![Vec::new(); objects.len() * objects.len()];
        for (i, m) in mors.iter().enumerate() {
            hom[m.src as usize * objects.len() + m.tgt as usize].push(i as MorId);
        }
        let mut cat = FinCategory {
            name: name.to_string(),
            objects,
            morphisms: mors,
            identities: ids,
            comp,
            hom,
            obj_index,
            mor_index,
        };
        cat.fill_identity_composites();
        Ok(cat)
    }

    fn fill_identity_composites(&mut self) {
        let n = self.morphisms.len();
        for f in 0..n as MorId {
            let (s, t) = (self.src(f), self.tgt(f));
            let (is, it) = (self.identities[s as usize], self.identities[t as usize]);
            if self.morphisms[is as usize].src != s || self.morphisms[it as usize].tgt != t {
                continue;
            }
            if self.compose(it, f).is_none() {
                set_comp(&mut self.comp, n, it, f, f);
            }
            if self.compose(f, is).is_none() {
                set_comp(&mut self.comp, n, f, is, f);
            }
        }
    }

    /// The poset generated by the given cover (Hasse) relation.
    pub fn poset(name: &str, elements: &[&str], covers: &[(&str, &str)]) -> Result<Self> {
        let elements: Vec<String> = elements.iter().map(|s| s.to_string()).collect();
        let covers: Vec<(String, String)> = covers
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        Self::poset_owned(name, &elements, &covers)
    }

    pub fn poset_owned(
        name: &str,
        elements: &[String],
        covers: &[(String, String)],
    ) -> Result<Self> {
        let n = elements.len();
        let idx: HashMap<&str, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_str(), i))
            .collect();
        if idx.len() != n {
            return Err(Error::Schema("duplicate poset element".into()));
        }
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in covers {
            let ia = *idx
                .get(a.as_str())
                .ok_or_else(|| Error::Schema(format!("unknown element {a}")))?;
            let ib = *idx
                .get(b.as_str())
                .ok_or_else(|| Error::Schema(format!("unknown element {b}")))?;
            le[ia][ib] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i][j] && le[j][i] {
                    return Err(Error::Schema(format!(
                        "relation has a cycle through {} and {}",
                        elements[i], elements[j]
                    )));
                }
            }
        }
        let mname = |i: usize, j: usize| {
            if i == j {
                format!("id_{}", elements[i])
            } else {
                format!("{}->{}", elements[i], elements[j])
            }
        };
        let mut mors = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if le[i][j] {
                    mors.push((mname(i, j), elements[i].clone(), elements[j].clone()));
                }
            }
        }
        let identities: BTreeMap<String, String> =
            (0..n).map(|i| (elements[i].clone(), mname(i, i))).collect();
        let mut comp = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !le[i][j] {
                    continue;
                }
                for k in 0..n {
                    if le[j][k] {
                        comp.push((mname(j, k), mname(i, j), mname(i, k)));
                    }
                }
            }
        }
        Self::from_parts(
            name,
            elements.to_vec(),
            mors,
            &identities,
            &comp,
            usize::MAX,
        )
    }

    /// Linear order on the given names, in order.
    pub fn chain(name: &str, elements: &[&str]) -> Result<Self> {
        let covers: Vec<(&str, &str)> = elements.windows(2).map(|w| (w[0], w[1])).collect();
        Self::poset(name, elements, &covers)
    }

    /// The ordinal `[n]` as a category with objects `0..=n`.
    pub fn ordinal(n: usize) -> Self {
        let names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        Self::chain(&format!("[{n}]"), &refs).expect("ordinal is a valid chain")
    }

    pub fn discrete(name: &str, elements: &[&str]) -> Result<Self> {
        Self::poset(name, elements, &[])
    }

    pub fn terminal() -> Self {
        Self::discrete("1", &["*"]).expect("terminal category")
    }

    /// The one-object category of a finite group given by its multiplication table.
    pub fn group(name: &str, elements: &[&str], mul: &[Vec<usize>], unit: usize) -> Result<Self> {
        let mors: Vec<(String, String, String)> = elements
            .iter()
            .map(|e| (e.to_string(), "*".into(), "*".into()))
            .collect();
        let mut comp = Vec::new();
        for (g, row) in mul.iter().enumerate() {
            for (f, &gf) in row.iter().enumerate() {
                comp.push((
                    elements[g].to_string(),
                    elements[f].to_string(),
                    elements[gf].to_string(),
                ));
            }
        }
        let identities = BTreeMap::from([("*".to_string(), elements[unit].to_string())]);
        Self::from_parts(name, vec!["*".into()], mors, &identities, &comp, usize::MAX)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        0..self.objects.len() as ObjId
    }

    pub fn morphism_ids(&self) -> impl Iterator<Item = MorId> {
        0..self.morphisms.len() as MorId
    }

    pub fn object_name(&self, o: ObjId) -> &str {
        &self.objects[o as usize]
    }

    pub fn morphism_name(&self, m: MorId) -> &str {
        &self.morphisms[m as usize].id
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn find_object(&self, name: &str) -> Option<ObjId> {
        self.obj_index.get(name).copied()
    }

    pub fn find_morphism(&self, name: &str) -> Option<MorId> {
        self.mor_index.get(name).copied()
    }

    pub fn src(&self, m: MorId) -> ObjId {
        self.morphisms[m as usize].src
    }

    pub fn tgt(&self, m: MorId) -> ObjId {
        self.morphisms[m as usize].tgt
    }

    pub fn identity(&self, o: ObjId) -> MorId {
        self.identities[o as usize]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identities[self.src(m) as usize] == m
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> &[MorId] {
        &self.hom[a as usize * self.objects.len() + b as usize]
    }

    /// `g ∘ f`, if the table has an entry.
    pub fn compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        match &self.comp {
            CompTable::Dense(v) => {
                let r = v[g as usize * self.morphisms.len() + f as usize];
                (r != NONE).then_some(r)
            }
            CompTable::Sparse(m) => m.get(&(g, f)).copied(),
        }
    }

    /// `g ∘ f` for a category that has passed validation.
    pub fn comp(&self, g: MorId, f: MorId) -> MorId {
        self.compose(g, f).unwrap_or_else(|| {
            panic!(
                "{} o {} is not defined",
                self.morphism_name(g),
                self.morphism_name(f)
            )
        })
    }

    pub fn is_thin(&self) -> bool {
        self.hom.iter().all(|h| h.len() <= 1)
    }

    /// Whether `o` is a terminal object (exactly one morphism from every object).
    pub fn is_terminal_object(&self, o: ObjId) -> bool {
        self.objects().all(|a| self.hom(a, o).len() == 1)
    }

    pub fn is_initial_object(&self, o: ObjId) -> bool {
        self.objects().all(|a| self.hom(o, a).len() == 1)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let name = |m: MorId| self.morphism_name(m).to_string();
        for o in self.objects() {
            let i = self.identity(o);
            if self.src(i) != o || self.tgt(i) != o {
                v.push(Violation::BadIdentity {
                    object: self.object_name(o).to_string(),
                });
            }
        }
        for f in self.morphism_ids() {
            for g in self.morphism_ids() {
                if self.tgt(f) != self.src(g) {
                    continue;
                }
                match self.compose(g, f) {
                    None => v.push(Violation::MissingComposite {
                        g: name(g),
                        f: name(f),
                    }),
                    Some(gf) => {
                        if self.src(gf) != self.src(f) || self.tgt(gf) != self.tgt(g) {
                            v.push(Violation::BadComposite {
                                g: name(g),
                                f: name(f),
                                gf: name(gf),
                            });
                        }
                    }
                }
            }
            if self.compose(self.identity(self.tgt(f)), f) != Some(f) {
                v.push(Violation::LeftUnit { f: name(f) });
            }
            if self.compose(f, self.identity(self.src(f))) != Some(f) {
                v.push(Violation::RightUnit { f: name(f) });
            }
        }
        for f in self.morphism_ids() {
            for g in self.morphism_ids().filter(|&g| self.src(g) == self.tgt(f)) {
                let Some(gf) = self.compose(g, f) else {
                    continue;
                };
                for h in self.morphism_ids().filter(|&h| self.src(h) == self.tgt(g)) {
                    let Some(hg) = self.compose(h, g) else {
                        continue;
                    };
                    if self.compose(h, gf) != self.compose(hg, f) {
                        v.push(Violation::NonAssociative {
                            h: name(h),
                            g: name(g),
                            f: name(f),
                        });
                    }
                }
            }
        }
        ValidationReport {
            valid: v.is_empty(),
            violations: v,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let r = self.validate();
        match r.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::Invalid(format!("category {}: {v}", self.name))),
        }
    }

    /// Same ids with every arrow reversed; an involution on the nose.
    pub fn opposite(&self) -> Self {
        let n = self.morphisms.len();
        let morphisms: Vec<Morphism> = self
            .morphisms
            .iter()
            .map(|m| Morphism {
                id: m.id.clone(),
                src: m.tgt,
                tgt: m.src,
            })
            .collect();
        let comp = match &self.comp {
            CompTable::Dense(v) => {
                let mut w = vec![NONE; n * n];
                for g in 0..n {
                    for f in 0..n {
                        w[g * n + f] = v[f * n + g];
                    }
                }
                CompTable::Dense(w)
            }
            CompTable::Sparse(m) => {
                CompTable::Sparse(m.iter().map(|(&(g, f), &gf)| ((f, g), gf)).collect())
            }
        };
        let k = self.objects.len();
        let mut hom = vec![Vec::new(); k * k];
        for (i, m) in morphisms.iter().enumerate() {
            hom[m.src as usize * k + m.tgt as usize].push(i as MorId);
        }
        FinCategory {
            name: self.name.clone(),
            objects: self.objects.clone(),
            morphisms,
            identities: self.identities.clone(),
            comp,
            hom,
            obj_index: self.obj_index.clone(),
            mor_index: self.mor_index.clone(),
        }
    }

    /// Full subcategory on the given objects, in the given order.
    pub fn full_subcategory(&self, name: &str, objs: &[ObjId]) -> Result<Self> {
        let keep: HashMap<ObjId, ()> = objs.iter().map(|&o| (o, ())).collect();
        let objects: Vec<String> = objs
            .iter()
            .map(|&o| self.object_name(o).to_string())
            .collect();
        let mors: Vec<MorId> = self
            .morphism_ids()
            .filter(|&m| keep.contains_key(&self.src(m)) && keep.contains_key(&self.tgt(m)))
            .collect();
        let triples: Vec<(String, String, String)> = mors
            .iter()
            .map(|&m| {
                (
                    self.morphism_name(m).to_string(),
                    self.object_name(self.src(m)).to_string(),
                    self.object_name(self.tgt(m)).to_string(),
                )
            })
            .collect();
        let identities: BTreeMap<String, String> = objs
            .iter()
            .map(|&o| {
                (
                    self.object_name(o).to_string(),
                    self.morphism_name(self.identity(o)).to_string(),
                )
            })
            .collect();
        let mut comp = Vec::new();
        for &f in &mors {
            for &g in &mors {
                if self.tgt(f) == self.src(g) {
                    if let Some(gf) = self.compose(g, f) {
                        comp.push((
                            self.morphism_name(g).to_string(),
                            self.morphism_name(f).to_string(),
                            self.morphism_name(gf).to_string(),
                        ));
                    }
                }
            }
        }
        Self::from_parts(name, objects, triples, &identities, &comp, usize::MAX)
    }

    pub fn to_json(&self) -> CategoryJson {
        let mut composition = Vec::new();
        for g in self.morphism_ids() {
            for f in self.morphism_ids() {
                if let Some(gf) = self.compose(g, f) {
                    composition.push([
                        self.morphism_name(g).to_string(),
                        self.morphism_name(f).to_string(),
                        self.morphism_name(gf).to_string(),
                    ]);
                }
            }
        }
        CategoryJson {
            name: Some(self.name.clone()),
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| MorphismJson {
                    id: m.id.clone(),
                    src: self.objects[m.src as usize].clone(),
                    tgt: self.objects[m.tgt as usize].clone(),
                })
                .collect(),
            composition,
            identities: self
                .objects()
                .map(|o| {
                    (
                        self.object_name(o).to_string(),
                        self.morphism_name(self.identity(o)).to_string(),
                    )
                })
                .collect(),
        }
    }

    pub fn from_json_str(s: &str, cap: usize) -> Result<Self> {
        let spec: CategorySpec = serde_json::from_str(s)?;
        spec.build(cap)
    }

    /// Structural isomorphism search (objects and morphisms, preserving composition).
    pub fn is_isomorphic(&self, other: &FinCategory) -> bool {
        iso_search(self, other).is_some()
    }

    /// The poset of an order-embedding check: `a ≤ b` iff there is a morphism.
    pub fn le(&self, a: ObjId, b: ObjId) -> bool {
        !self.hom(a, b).is_empty()
    }
}

fn set_comp(comp: &mut CompTable, n: usize, g: MorId, f: MorId, gf: MorId) {
    match comp {
        CompTable::Dense(v) => v[g as usize * n + f as usize] = gf,
        CompTable::Sparse(m) => {
            m.insert((g, f), gf);
        }
    }
}

fn iso_search(a: &FinCategory, b: &FinCategory) -> Option<(Vec<ObjId>, Vec<MorId>)> {
    if a.object_count() != b.object_count() || a.morphism_count() != b.morphism_count() {
        return None;
    }
    let k = a.object_count();
    let sig = |c: &FinCategory, o: ObjId| {
        let mut out: Vec<usize> = c.objects().map(|x| c.hom(o, x).len()).collect();
        let mut inn: Vec<usize> = c.objects().map(|x| c.hom(x, o).len()).collect();
        out.sort_unstable();
        inn.sort_unstable();
        (c.hom(o, o).len(), out, inn)
    };
    let sa: Vec<_> = a.objects().map(|o| sig(a, o)).collect();
    let sb: Vec<_> = b.objects().map(|o| sig(b, o)).collect();
    let mut omap = vec![NONE; k];
    let mut used = vec![false; k];
    fn objs(
        i: usize,
        a: &FinCategory,
        b: &FinCategory,
        sa: &[(usize, Vec<usize>, Vec<usize>)],
        sb: &[(usize, Vec<usize>, Vec<usize>)],
        omap: &mut Vec<u32>,
        used: &mut Vec<bool>,
    ) -> Option<Vec<MorId>> {
        if i == omap.len() {
            return mors(a, b, omap);
        }
        for j in 0..omap.len() {
            if used[j] || sa[i] != sb[j] {
                continue;
            }
            let ok = (0..i).all(|p| {
                a.hom(p as ObjId, i as ObjId).len() == b.hom(omap[p], j as ObjId).len()
                    && a.hom(i as ObjId, p as ObjId).len() == b.hom(j as ObjId, omap[p]).len()
            });
            if !ok {
                continue;
            }
            omap[i] = j as u32;
            used[j] = true;
            if let Some(m) = objs(i + 1, a, b, sa, sb, omap, used) {
                return Some(m);
            }
            used[j] = false;
        }
        omap[i] = NONE;
        None
    }
    fn mors(a: &FinCategory, b: &FinCategory, omap: &[u32]) -> Option<Vec<MorId>> {
        let n = a.morphism_count();
        let mut mmap = vec![NONE; n];
        let mut used = vec![false; n];
        for o in a.objects() {
            let (i, j) = (a.identity(o), b.identity(omap[o as usize]));
            mmap[i as usize] = j;
            used[j as usize] = true;
        }
        let order: Vec<MorId> = a
            .morphism_ids()
            .filter(|&m| mmap[m as usize] == NONE)
            .collect();
        fn go(
            idx: usize,
            order: &[MorId],
            a: &FinCategory,
            b: &FinCategory,
            omap: &[u32],
            mmap: &mut Vec<u32>,
            used: &mut Vec<bool>,
        ) -> bool {
            if idx == order.len() {
                return true;
            }
            let f = order[idx];
            let (s, t) = (omap[a.src(f) as usize], omap[a.tgt(f) as usize]);
            for &g in b.hom(s, t) {
                if used[g as usize] {
                    continue;
                }
                mmap[f as usize] = g;
                let consistent = a.morphism_ids().all(|x| {
                    let check = |p: MorId, q: MorId| match a.compose(p, q) {
                        Some(pq) => {
                            let (ip, iq, ipq) =
                                (mmap[p as usize], mmap[q as usize], mmap[pq as usize]);
                            ip == NONE
                                || iq == NONE
                                || ipq == NONE
                                || b.compose(ip, iq) == Some(ipq)
                        }
                        None => true,
                    };
                    check(x, f) && check(f, x)
                });
                if consistent {
                    used[g as usize] = true;
                    if go(idx + 1, order, a, b, omap, mmap, used) {
                        return true;
                    }
                    used[g as usize] = false;
                }
            }
            mmap[f as usize] = NONE;
            false
        }
        go(0, &order, a, b, omap, &mut mmap, &mut used).then_some(mmap)
    }
    let m = objs(0, a, b, &sa, &sb, &mut omap, &mut used)?;
    Some((omap, m))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorphismJson {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// Explicit JSON form of a category.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismJson>,
    pub composition: Vec<[String; 3]>,
    pub identities: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetJson {
    pub elements: Vec<String>,
    #[serde(default)]
    pub covers: Vec<[String; 2]>,
}

/// Either the explicit form or `{"name": .., "poset": {"elements": .., "covers": ..}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CategorySpec {
    Poset {
        #[serde(default)]
        name: Option<String>,
        poset: PosetJson,
    },
    Explicit(CategoryJson),
}

impl CategorySpec {
    pub fn build(&self, cap: usize) -> Result<FinCategory> {
        match self {
            CategorySpec::Poset { name, poset } => {
                let covers: Vec<(String, String)> = poset
                    .covers
                    .iter()
                    .map(|[a, b]| (a.clone(), b.clone()))
                    .collect();
                let c = FinCategory::poset_owned(
                    name.as_deref().unwrap_or("poset"),
                    &poset.elements,
                    &covers,
                )?;
                cap_check("morphisms", c.morphism_count(), cap)?;
                Ok(c)
            }
            CategorySpec::Explicit(j) => {
                let mors = j
                    .morphisms
                    .iter()
                    .map(|m| (m.id.clone(), m.src.clone(), m.tgt.clone()))
                    .collect();
                let comp: Vec<(String, String, String)> = j
                    .composition
                    .iter()
                    .map(|[g, f, gf]| (g.clone(), f.clone(), gf.clone()))
                    .collect();
                FinCategory::from_parts(
                    j.name.as_deref().unwrap_or("category"),
                    j.objects.clone(),
                    mors,
                    &j.identities,
                    &comp,
                    cap,
                )
            }
        }
    }
}

/// A functor between finite categories, stored as object and morphism tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor {
    pub dom: Arc<FinCategory>,
    pub cod: Arc<FinCategory>,
    pub obj_map: Vec<ObjId>,
    pub mor_map: Vec<MorId>,
}

impl Functor {
    pub fn new(
        dom: Arc<FinCategory>,
        cod: Arc<FinCategory>,
        obj_map: Vec<ObjId>,
        mor_map: Vec<MorId>,
    ) -> Result<Self> {
        let f = Functor {
            dom,
            cod,
            obj_map,
            mor_map,
        };
        if let Some(e) = f.violations().first() {
            return Err(Error::Invalid(e.clone()));
        }
        Ok(f)
    }

    pub fn identity(c: Arc<FinCategory>) -> Self {
        Functor {
            obj_map: c.objects().collect(),
            mor_map: c.morphism_ids().collect(),
            dom: c.clone(),
            cod: c,
        }
    }

    /// Functor between thin categories determined by its object map.
    pub fn from_object_map(
        dom: Arc<FinCategory>,
        cod: Arc<FinCategory>,
        obj_map: Vec<ObjId>,
    ) -> Result<Self> {
        let mut mor_map = Vec::with_capacity(dom.morphism_count());
        for m in dom.morphism_ids() {
            let (s, t) = (obj_map[dom.src(m) as usize], obj_map[dom.tgt(m) as usize]);
            let h = cod.hom(s, t);
            if h.len() != 1 {
                return Err(Error::Invalid(format!(
                    "object map does not determine the image of {} ({} candidates)",
                    dom.morphism_name(m),
                    h.len()
                )));
            }
            mor_map.push(h[0]);
        }
        Self::new(dom, cod, obj_map, mor_map)
    }

    pub fn violations(&self) -> Vec<String> {
        let (d, c) = (&self.dom, &self.cod);
        let mut v = Vec::new();
        if self.obj_map.len() != d.object_count() || self.mor_map.len() != d.morphism_count() {
            v.push("table sizes do not match the domain".to_string());
            return v;
        }
        for m in d.morphism_ids() {
            let fm = self.mor_map[m as usize];
            if c.src(fm) != self.obj_map[d.src(m) as usize]
                || c.tgt(fm) != self.obj_map[d.tgt(m) as usize]
            {
                v.push(format!(
                    "image of {} has wrong endpoints",
                    d.morphism_name(m)
                ));
            }
        }
        for o in d.objects() {
            if self.mor_map[d.identity(o) as usize] != c.identity(self.obj_map[o as usize]) {
                v.push(format!("identity of {} not preserved", d.object_name(o)));
            }
        }
        for f in d.morphism_ids() {
            for g in d.morphism_ids() {
                if let Some(gf) = d.compose(g, f) {
                    let img = c.compose(self.mor_map[g as usize], self.mor_map[f as usize]);
                    if img != Some(self.mor_map[gf as usize]) {
                        v.push(format!(
                            "composite {} o {} not preserved",
                            d.morphism_name(g),
                            d.morphism_name(f)
                        ));
                    }
                }
            }
        }
        v
    }

    pub fn ob(&self, o: ObjId) -> ObjId {
        self.obj_map[o as usize]
    }

    pub fn mor(&self, m: MorId) -> MorId {
        self.mor_map[m as usize]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Functor) -> Functor {
        Functor {
            dom: self.dom.clone(),
            cod: other.cod.clone(),
            obj_map: self.obj_map.iter().map(|&o| other.ob(o)).collect(),
            mor_map: self.mor_map.iter().map(|&m| other.mor(m)).collect(),
        }
    }
}

/// A natural transformation between parallel functors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTransf {
    pub dom: Functor,
    pub cod: Functor,
    pub components: Vec<MorId>,
}

impl NatTransf {
    pub fn new(dom: Functor, cod: Functor, components: Vec<MorId>) -> Result<Self> {
        let t = NatTransf {
            dom,
            cod,
            components,
        };
        if let Some(e) = t.violations().first() {
            return Err(Error::Invalid(e.clone()));
        }
        Ok(t)
    }

    pub fn violations(&self) -> Vec<String> {
        let (f, g) = (&self.dom, &self.cod);
        let (d, c) = (&f.dom, &f.cod);
        let mut v = Vec::new();
        if g.dom != f.dom || g.cod != f.cod || self.components.len() != d.object_count() {
            v.push("functors are not parallel".into());
            return v;
        }
        for o in d.objects() {
            let a = self.components[o as usize];
            if c.src(a) != f.ob(o) || c.tgt(a) != g.ob(o) {
                v.push(format!(
                    "component at {} has wrong endpoints",
                    d.object_name(o)
                ));
            }
        }
        if !v.is_empty() {
            return v;
        }
        for m in d.morphism_ids() {
            let l = c.compose(self.components[d.tgt(m) as usize], f.mor(m));
            let r = c.compose(g.mor(m), self.components[d.src(m) as usize]);
            if l.is_none() || l != r {
                v.push(format!("naturality fails at {}", d.morphism_name(m)));
            }
        }
        v
    }

    pub fn at(&self, o: ObjId) -> MorId {
        self.components[o as usize]
    }
}

/// Every functor `d → c`, in a deterministic order.
pub fn enumerate_functors(
    d: &FinCategory,
    c: &FinCategory,
    cap: usize,
) -> Result<Vec<(Vec<ObjId>, Vec<MorId>)>> {
    let mut out = Vec::new();
    let no = d.object_count();
    let mut objs = vec![0; no];
    let nonid: Vec<MorId> = d.morphism_ids().filter(|&m| !d.is_identity(m)).collect();
    fn assign_objs(
        i: usize,
        d: &FinCategory,
        c: &FinCategory,
        nonid: &[MorId],
        objs: &mut Vec<ObjId>,
        out: &mut Vec<(Vec<ObjId>, Vec<MorId>)>,
        cap: usize,
    ) -> Result<()> {
        if i == objs.len() {
            let mut mm = vec![NONE; d.morphism_count()];
            for o in d.objects() {
                mm[d.identity(o) as usize] = c.identity(objs[o as usize]);
            }
            return assign_mors(0, d, c, nonid, objs, &mut mm, out, cap);
        }
        for o in c.objects() {
            let ok = (0..i).all(|p| {
                let a = !d.hom(p as ObjId, i as ObjId).is_empty();
                let b = !d.hom(i as ObjId, p as ObjId).is_empty();
                (!a || !c.hom(objs[p], o).is_empty()) && (!b || !c.hom(o, objs[p]).is_empty())
            });
            if ok {
                objs[i] = o;
                assign_objs(i + 1, d, c, nonid, objs, out, cap)?;
            }
        }
        Ok(())
    }
    #[allow(clippy::too_many_arguments)]
    fn assign_mors(
        k: usize,
        d: &FinCategory,
        c: &FinCategory,
        nonid: &[MorId],
        objs: &[ObjId],
        mm: &mut Vec<MorId>,
        out: &mut Vec<(Vec<ObjId>, Vec<MorId>)>,
        cap: usize,
    ) -> Result<()> {
        if k == nonid.len() {
            cap_check("functors", out.len() + 1, cap)?;
            out.push((objs.to_vec(), mm.clone()));
            return Ok(());
        }
        let f = nonid[k];
        for &img in c.hom(objs[d.src(f) as usize], objs[d.tgt(f) as usize]) {
            mm[f as usize] = img;
            let ok = nonid[..=k].iter().chain(d.identities.iter()).all(|&x| {
                let chk = |g: MorId, h: MorId| match d.compose(g, h) {
                    Some(gh) => {
                        let (ig, ih, igh) = (mm[g as usize], mm[h as usize], mm[gh as usize]);
                        ig == NONE || ih == NONE || igh == NONE || c.compose(ig, ih) == Some(igh)
                    }
                    None => true,
                };
                chk(x, f) && chk(f, x)
            });
            if ok {
                assign_mors(k + 1, d, c, nonid, objs, mm, out, cap)?;
            }
        }
        mm[f as usize] = NONE;
        Ok(())
    }
    assign_objs(0, d, c, &nonid, &mut objs, &mut out, cap)?;
    Ok(out)
}

fn functor_label(d: &FinCategory, c: &FinCategory, objs: &[ObjId], mors: &[MorId]) -> String {
    let mut s = String::from("[");
    s.push_str(
        &objs
            .iter()
            .map(|&o| c.object_name(o))
            .collect::<Vec<_>>()
            .join(","),
    );
    if !c.is_thin() {
        let nonid: Vec<&str> = d
            .morphism_ids()
            .filter(|&m| !d.is_identity(m))
            .map(|m| c.morphism_name(mors[m as usize]))
            .collect();
        if !nonid.is_empty() {
            s.push('|');
            s.push_str(&nonid.join(","));
        }
    }
    s.push(']');
    s
}

/// The category of functors `d → c` and natural transformations.
pub fn functor_category(d: &FinCategory, c: &FinCategory, cap: usize) -> Result<FinCategory> {
    Ok(functor_category_data(d, c, cap)?.category)
}

/// A functor category together with the tables behind its objects and morphisms.
#[derive(Clone, Debug)]
pub struct FunctorCategory {
    pub category: FinCategory,
    /// Object and morphism tables of each object, in object order.
    pub functors: Vec<(Vec<ObjId>, Vec<MorId>)>,
    /// Components of each morphism, in morphism order.
    pub components: Vec<Vec<MorId>>,
}

impl FunctorCategory {
    pub fn find_functor(&self, objs: &[ObjId], mors: &[MorId]) -> Option<ObjId> {
        self.functors
            .iter()
            .position(|(o, m)| o == objs && m == mors)
            .map(|i| i as ObjId)
    }

    pub fn find_transformation(&self, src: ObjId, tgt: ObjId, comps: &[MorId]) -> Option<MorId> {
        self.category
            .hom(src, tgt)
            .iter()
            .copied()
            .find(|&m| self.components[m as usize] == comps)
    }
}

pub fn functor_category_data(
    d: &FinCategory,
    c: &FinCategory,
    cap: usize,
) -> Result<FunctorCategory> {
    d.ensure_valid()?;
    c.ensure_valid()?;
    let functors = enumerate_functors(d, c, cap)?;
    let labels: Vec<String> = functors
        .iter()
        .map(|(o, m)| functor_label(d, c, o, m))
        .collect();
    let mut mors: Vec<(String, String, String)> = Vec::new();
    let mut comps: Vec<Vec<MorId>> = Vec::new();
    let mut by_ends: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut identities = BTreeMap::new();
    for (fi, (fo, fm)) in functors.iter().enumerate() {
        for (gi, (go, gm)) in functors.iter().enumerate() {
            let mut cur = vec![NONE; d.object_count()];
            let mut found = Vec::new();
            nat_search(0, d, c, fo, fm, go, gm, &mut cur, &mut found);
            for comp in found {
                let is_id = fi == gi
                    && d.objects()
                        .all(|o| comp[o as usize] == c.identity(fo[o as usize]));
                let name = if is_id {
                    format!("id_{}", labels[fi])
                } else {
                    let cs: Vec<&str> = comp.iter().map(|&m| c.morphism_name(m)).collect();
                    format!("{}=>{}:<{}>", labels[fi], labels[gi], cs.join(","))
                };
                if is_id {
                    identities.insert(labels[fi].clone(), name.clone());
                }
                by_ends.entry((fi, gi)).or_default().push(mors.len());
                mors.push((name, labels[fi].clone(), labels[gi].clone()));
                comps.push(comp);
                cap_check("natural transformations", mors.len(), cap)?;
            }
        }
    }
    let ends: Vec<(usize, usize)> = {
        let mut e = vec![(0, 0); mors.len()];
        for (&(f, g), list) in &by_ends {
            for &i in list {
                e[i] = (f, g);
            }
        }
        e
    };
    let index: HashMap<(usize, usize, &Vec<MorId>), usize> = comps
        .iter()
        .enumerate()
        .map(|(i, c)| ((ends[i].0, ends[i].1, c), i))
        .collect();
    let mut composition = Vec::new();
    for (i, ci) in comps.iter().enumerate() {
        for (j, cj) in comps.iter().enumerate() {
            if ends[i].1 != ends[j].0 {
                continue;
            }
            let composite: Vec<MorId> = d
                .objects()
                .map(|o| c.comp(cj[o as usize], ci[o as usize]))
                .collect();
            let k = index[&(ends[i].0, ends[j].1, &composite)];
            composition.push((mors[j].0.clone(), mors[i].0.clone(), mors[k].0.clone()));
        }
    }
    let category = FinCategory::from_parts(
        &format!("{}^{}", c.name(), d.name()),
        labels,
        mors,
        &identities,
        &composition,
        cap,
    )?;
    Ok(FunctorCategory {
        category,
        functors,
        components: comps,
    })
}

#[allow(clippy::too_many_arguments)]
fn nat_search(
    i: usize,
    d: &FinCategory,
    c: &FinCategory,
    fo: &[ObjId],
    fm: &[MorId],
    go: &[ObjId],
    gm: &[MorId],
    cur: &mut Vec<MorId>,
    found: &mut Vec<Vec<MorId>>,
) {
    if i == cur.len() {
        found.push(cur.clone());
        return;
    }
    for &a in c.hom(fo[i], go[i]) {
        cur[i] = a;
        let ok = d.morphism_ids().all(|m| {
            let (s, t) = (d.src(m) as usize, d.tgt(m) as usize);
            if s > i || t > i {
                return true;
            }
            c.compose(cur[t], fm[m as usize]) == c.compose(gm[m as usize], cur[s])
        });
        if ok {
            nat_search(i + 1, d, c, fo, fm, go, gm, cur, found);
        }
    }
    cur[i] = NONE;
}

/// Product category with its two projections.
pub fn product_category(
    c: &Arc<FinCategory>,
    d: &Arc<FinCategory>,
) -> Result<(Arc<FinCategory>, Functor, Functor)> {
    let pair = |a: &str, b: &str| format!("({a},{b})");
    let mut objects = Vec::new();
    for a in c.objects() {
        for b in d.objects() {
            objects.push(pair(c.object_name(a), d.object_name(b)));
        }
    }
    let mut mors = Vec::new();
    for f in c.morphism_ids() {
        for g in d.morphism_ids() {
            mors.push((
                pair(c.morphism_name(f), d.morphism_name(g)),
                pair(c.object_name(c.src(f)), d.object_name(d.src(g))),
                pair(c.object_name(c.tgt(f)), d.object_name(d.tgt(g))),
            ));
        }
    }
    let identities: BTreeMap<String, String> = c
        .objects()
        .flat_map(|a| d.objects().map(move |b| (a, b)))
        .map(|(a, b)| {
            (
                pair(c.object_name(a), d.object_name(b)),
                pair(
                    c.morphism_name(c.identity(a)),
                    d.morphism_name(d.identity(b)),
                ),
            )
        })
        .collect();
    let mut comp = Vec::new();
    for f1 in c.morphism_ids() {
        for g1 in c.morphism_ids() {
            let Some(gf1) = c.compose(g1, f1) else {
                continue;
            };
            for f2 in d.morphism_ids() {
                for g2 in d.morphism_ids() {
                    let Some(gf2) = d.compose(g2, f2) else {
                        continue;
                    };
                    comp.push((
                        pair(c.morphism_name(g1), d.morphism_name(g2)),
                        pair(c.morphism_name(f1), d.morphism_name(f2)),
                        pair(c.morphism_name(gf1), d.morphism_name(gf2)),
                    ));
                }
            }
        }
    }
    let p = Arc::new(FinCategory::from_parts(
        &format!("{}x{}", c.name(), d.name()),
        objects,
        mors,
        &identities,
        &comp,
        usize::MAX,
    )?);
    let (nd, md) = (d.object_count() as u32, d.morphism_count() as u32);
    let p0 = Functor::new(
        p.clone(),
        c.clone(),
        (0..p.object_count() as u32).map(|o| o / nd).collect(),
        (0..p.morphism_count() as u32).map(|m| m / md).collect(),
    )?;
    let p1 = Functor::new(
        p.clone(),
        d.clone(),
        (0..p.object_count() as u32).map(|o| o % nd).collect(),
        (0..p.morphism_count() as u32).map(|m| m % md).collect(),
    )?;
    Ok((p, p0, p1))
}

pub fn opposite_category(c: &FinCategory) -> FinCategory {
    c.opposite()
}

pub fn validate_category(c: &FinCategory) -> ValidationReport {
    c.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> FinCategory {
        FinCategory::poset(
            "diamond",
            &["bot", "x", "y", "top"],
            &[("bot", "x"), ("bot", "y"), ("x", "top"), ("y", "top")],
        )
        .unwrap()
    }

    #[test]
    fn posets_are_valid() {
        assert!(
            FinCategory::chain("c3", &["a", "b", "c"])
                .unwrap()
                .validate()
                .valid
        );
        let d = diamond();
        assert!(d.validate().valid);
        assert_eq!(d.morphism_count(), 9);
    }

    #[test]
    fn broken_associativity_is_named() {
        let mut comp = Vec::new();
        for g in ["e", "a", "b"] {
            for f in ["e", "a", "b"] {
                let gf = match (g, f) {
                    ("e", x) | (x, "e") => x,
                    ("a", "a") => "b",
                    ("a", "b") => "e",
                    ("b", "a") => "e",
                    ("b", "b") => "b",
                    _ => unreachable!(),
                };
                comp.push((g.to_string(), f.to_string(), gf.to_string()));
            }
        }
        let mors = ["e", "a", "b"]
            .iter()
            .map(|m| (m.to_string(), "*".into(), "*".into()))
            .collect();
        let ids = BTreeMap::from([("*".to_string(), "e".to_string())]);
        let c = FinCategory::from_parts("bad", vec!["*".into()], mors, &ids, &comp, 100).unwrap();
        let r = c.validate();
        assert!(!r.valid);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonAssociative { .. })));
    }

    #[test]
    fn functor_categories_of_small_chains() {
        let one = FinCategory::ordinal(1);
        let fc = functor_category(&one, &one, 1000).unwrap();
        assert_eq!(fc.object_count(), 3);
        assert!(fc.is_thin());
        assert!(fc.validate().valid);
        let t = FinCategory::terminal();
        let d = diamond();
        assert!(functor_category(&t, &d, 1000).unwrap().is_isomorphic(&d));
    }

    #[test]
    fn cap_aborts() {
        let c = FinCategory::ordinal(5);
        let err = functor_category(&c, &c, 10).unwrap_err();
        assert!(matches!(err, Error::SizeCap { .. }));
    }

    #[test]
    fn opposite_involution_and_duality() {
        let d = diamond();
        let op = d.opposite();
        assert_eq!(op.opposite(), d);
        let top = d.find_object("top").unwrap();
        let bot = d.find_object("bot").unwrap();
        assert!(d.is_terminal_object(top) && op.is_initial_object(top));
        assert!(op.is_terminal_object(bot));
    }

    #[test]
    fn product_counts_and_projections() {
        let c2 = Arc::new(FinCategory::ordinal(1));
        let (p, p0, p1) = product_category(&c2, &c2).unwrap();
        assert_eq!(p.object_count(), 4);
        assert!(p.validate().valid);
        assert!(p0.violations().is_empty() && p1.violations().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let d = diamond();
        let s = serde_json::to_string(&d.to_json()).unwrap();
        let back = FinCategory::from_json_str(&s, 100).unwrap();
        assert_eq!(back, d);
        let p = r#"{"name":"c","poset":{"elements":["a","b"],"covers":[["a","b"]]}}"#;
        assert_eq!(
            FinCategory::from_json_str(p, 100).unwrap().morphism_count(),
            3
        );
    }
}
