//! Monads on finite categories, their Eilenberg–Moore categories, and the
//! action of the augmented simplex category on the nerve of the base.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{
    functor_category_data, CategorySpec, FinCategory, Functor, FunctorCategory, MorId, ObjId,
};
use crate::ordinal::{OrdMap, Ordinal};
use crate::sset::{nerve_simplex, Idx, SSet};

/// A monad `(t, η, μ)` on a finite category. The constructor only checks
/// shapes; the laws are checked by [`Monad::law_violations`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monad {
    name: String,
    base: Arc<FinCategory>,
    t: Functor,
    unit: Vec<MorId>,
    mult: Vec<MorId>,
}

/// One failed monad axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonadViolation {
    pub law: String,
    pub at: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonadReport {
    pub valid: bool,
    pub violations: Vec<MonadViolation>,
}

impl Monad {
    pub fn new(name: &str, t: Functor, unit: Vec<MorId>, mult: Vec<MorId>) -> Result<Self> {
        if *t.dom != *t.cod {
            return Err(Error::Invalid("a monad needs an endofunctor".into()));
        }
        let base = t.dom.clone();
        if let Some(v) = t.violations().into_iter().next() {
            return Err(Error::Invalid(format!("endofunctor: {v}")));
        }
        let n = base.object_count();
        if unit.len() != n || mult.len() != n {
            return Err(Error::Invalid(
                "unit and multiplication need one component per object".into(),
            ));
        }
        for o in base.objects() {
            let (e, m) = (unit[o as usize], mult[o as usize]);
            if e as usize >= base.morphism_count() || base.src(e) != o || base.tgt(e) != t.ob(o) {
                return Err(Error::Invalid(format!(
                    "unit component at {} has the wrong type",
                    base.object_name(o)
                )));
            }
            if m as usize >= base.morphism_count()
                || base.src(m) != t.ob(t.ob(o))
                || base.tgt(m) != t.ob(o)
            {
                return Err(Error::Invalid(format!(
                    "multiplication component at {} has the wrong type",
                    base.object_name(o)
                )));
            }
        }
        Ok(Monad {
            name: name.to_string(),
            base,
            t,
            unit,
            mult,
        })
    }

    pub fn identity(base: Arc<FinCategory>) -> Self {
        let ids: Vec<MorId> = base.objects().map(|o| base.identity(o)).collect();
        Monad {
            name: format!("identity on {}", base.name()),
            t: Functor::identity(base.clone()),
            unit: ids.clone(),
            mult: ids,
            base,
        }
    }

    /// The monad of a closure operator on a poset, given on objects.
    pub fn closure(name: &str, base: Arc<FinCategory>, map: &[ObjId]) -> Result<Self> {
        if !base.is_thin() {
            return Err(Error::Invalid(
                "closure operators live on thin categories".into(),
            ));
        }
        let t = Functor::from_object_map(base.clone(), base.clone(), map.to_vec())?;
        let unique = |a: ObjId, b: ObjId, what: &str| {
            base.hom(a, b).first().copied().ok_or_else(|| {
                Error::Invalid(format!("no {what} component at {}", base.object_name(a)))
            })
        };
        let unit = base
            .objects()
            .map(|o| unique(o, map[o as usize], "unit"))
            .collect::<Result<Vec<_>>>()?;
        let mult = base
            .objects()
            .map(|o| {
                unique(
                    map[map[o as usize] as usize],
                    map[o as usize],
                    "multiplication",
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Monad::new(name, t, unit, mult)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn functor(&self) -> &Functor {
        &self.t
    }

    pub fn ob(&self, o: ObjId) -> ObjId {
        self.t.ob(o)
    }

    pub fn mor(&self, f: MorId) -> MorId {
        self.t.mor(f)
    }

    pub fn unit(&self, o: ObjId) -> MorId {
        self.unit[o as usize]
    }

    pub fn mult(&self, o: ObjId) -> MorId {
        self.mult[o as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.base.objects().all(|o| {
            self.ob(o) == o
                && self.unit(o) == self.base.identity(o)
                && self.mult(o) == self.base.identity(o)
        }) && self.base.morphism_ids().all(|f| self.mor(f) == f)
    }

    pub fn law_violations(&self) -> Vec<MonadViolation> {
        let c = &self.base;
        let mut v = Vec::new();
        let mut push = |law: &str, at: &str| {
            v.push(MonadViolation {
                law: law.into(),
                at: at.into(),
            })
        };
        for f in c.morphism_ids() {
            let (a, b) = (c.src(f), c.tgt(f));
            if c.compose(self.unit(b), f) != c.compose(self.mor(f), self.unit(a)) {
                push("unit naturality", c.morphism_name(f));
            }
            let ttf = self.mor(self.mor(f));
            if c.compose(self.mult(b), ttf) != c.compose(self.mor(f), self.mult(a)) {
                push("multiplication naturality", c.morphism_name(f));
            }
        }
        for o in c.objects() {
            let name = c.object_name(o);
            let id = c.identity(self.ob(o));
            let to = self.ob(o);
            if c.compose(self.mult(o), self.unit(to)) != Some(id) {
                push("left unit (mu . eta t = id)", name);
            }
            if c.compose(self.mult(o), self.mor(self.unit(o))) != Some(id) {
                push("right unit (mu . t eta = id)", name);
            }
            if c.compose(self.mult(o), self.mult(to))
                != c.compose(self.mult(o), self.mor(self.mult(o)))
            {
                push("associativity (mu . mu t = mu . t mu)", name);
            }
        }
        v
    }

    pub fn check_laws(&self) -> MonadReport {
        let violations = self.law_violations();
        MonadReport {
            valid: violations.is_empty(),
            violations,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        self.base.ensure_valid()?;
        match self.law_violations().first() {
            Some(v) => Err(Error::Invalid(format!(
                "monad {}: {} fails at {}",
                self.name, v.law, v.at
            ))),
            None => Ok(()),
        }
    }

    /// Whether `h: t c → c` satisfies the algebra laws.
    pub fn is_algebra(&self, c: ObjId, h: MorId) -> bool {
        let cat = &self.base;
        cat.src(h) == self.ob(c)
            && cat.tgt(h) == c
            && cat.compose(h, self.unit(c)) == Some(cat.identity(c))
            && cat.compose(h, self.mor(h)) == cat.compose(h, self.mult(c))
    }

    pub fn em_category(&self) -> Result<EmCategory> {
        em_category(self)
    }

    pub fn from_json_str(s: &str, dir: Option<&Path>, cap: usize) -> Result<Self> {
        let j: MonadJson = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        j.build(dir, cap)
    }

    pub fn to_json(&self) -> MonadJson {
        let c = &self.base;
        let named =
            |o: ObjId, m: MorId| (c.object_name(o).to_string(), c.morphism_name(m).to_string());
        MonadJson {
            name: Some(self.name.clone()),
            category: CategoryRef::Inline(CategorySpec::Explicit(c.to_json())),
            functor: FunctorJson {
                objects: c
                    .objects()
                    .map(|o| (c.object_name(o).into(), c.object_name(self.ob(o)).into()))
                    .collect(),
                morphisms: Some(
                    c.morphism_ids()
                        .map(|f| {
                            (
                                c.morphism_name(f).into(),
                                c.morphism_name(self.mor(f)).into(),
                            )
                        })
                        .collect(),
                ),
            },
            unit: Some(c.objects().map(|o| named(o, self.unit(o))).collect()),
            multiplication: Some(c.objects().map(|o| named(o, self.mult(o))).collect()),
        }
    }
}

pub fn check_monad_laws(m: &Monad) -> MonadReport {
    m.check_laws()
}

/// Where a monad file finds its category.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CategoryRef {
    Path { path: String },
    Inline(CategorySpec),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorJson {
    pub objects: BTreeMap<String, String>,
    /// May be omitted when the category is thin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphisms: Option<BTreeMap<String, String>>,
}

/// JSON form of a monad. Unit and multiplication may be omitted over a thin
/// category.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonadJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub category: CategoryRef,
    pub functor: FunctorJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplication: Option<BTreeMap<String, String>>,
}

impl MonadJson {
    pub fn build(&self, dir: Option<&Path>, cap: usize) -> Result<Monad> {
        let spec = match &self.category {
            CategoryRef::Inline(s) => s.clone(),
            CategoryRef::Path { path } => {
                // without a directory the bundled files win, so they never depend on the cwd
                let p = dir.map_or_else(|| Path::new(path).to_path_buf(), |d| d.join(path));
                let bundled = crate::corpus::get(path).map(str::to_string);
                let text = match (dir, bundled) {
                    (None, Some(t)) => t,
                    (_, bundled) => match std::fs::read_to_string(&p) {
                        Ok(t) => t,
                        Err(e) => bundled.ok_or(Error::Io(e))?,
                    },
                };
                serde_json::from_str(&text)
                    .map_err(|e| Error::Schema(format!("{}: {e}", p.display())))?
            }
        };
        let c = Arc::new(spec.build(cap)?);
        let obj = |s: &str| {
            c.find_object(s)
                .ok_or_else(|| Error::Schema(format!("unknown object {s}")))
        };
        let mor = |s: &str| {
            c.find_morphism(s)
                .ok_or_else(|| Error::Schema(format!("unknown morphism {s}")))
        };
        let mut omap = vec![u32::MAX; c.object_count()];
        for (a, b) in &self.functor.objects {
            omap[obj(a)? as usize] = obj(b)?;
        }
        if let Some(o) = c.objects().find(|&o| omap[o as usize] == u32::MAX) {
            return Err(Error::Schema(format!(
                "functor has no value at {}",
                c.object_name(o)
            )));
        }
        let t = match &self.functor.morphisms {
            Some(ms) => {
                let mut mmap = vec![u32::MAX; c.morphism_count()];
                for o in c.objects() {
                    mmap[c.identity(o) as usize] = c.identity(omap[o as usize]);
                }
                for (a, b) in ms {
                    mmap[mor(a)? as usize] = mor(b)?;
                }
                if let Some(f) = c.morphism_ids().find(|&f| mmap[f as usize] == u32::MAX) {
                    return Err(Error::Schema(format!(
                        "functor has no value at {}",
                        c.morphism_name(f)
                    )));
                }
                Functor::new(c.clone(), c.clone(), omap.clone(), mmap)?
            }
            None if c.is_thin() => Functor::from_object_map(c.clone(), c.clone(), omap.clone())?,
            None => {
                return Err(Error::Schema(
                    "functor.morphisms is required for a category that is not thin".into(),
                ))
            }
        };
        let comps = |table: &Option<BTreeMap<String, String>>,
                     what: &str,
                     src: &dyn Fn(ObjId) -> ObjId,
                     tgt: &dyn Fn(ObjId) -> ObjId| {
            let mut out = vec![u32::MAX; c.object_count()];
            match table {
                Some(tab) => {
                    for (a, f) in tab {
                        out[obj(a)? as usize] = mor(f)?;
                    }
                }
                None if c.is_thin() => {
                    for o in c.objects() {
                        out[o as usize] = *c.hom(src(o), tgt(o)).first().ok_or_else(|| {
                            Error::Schema(format!(
                                "no {what} component exists at {}",
                                c.object_name(o)
                            ))
                        })?;
                    }
                }
                None => {
                    return Err(Error::Schema(format!(
                        "{what} is required for a category that is not thin"
                    )))
                }
            }
            if let Some(o) = c.objects().find(|&o| out[o as usize] == u32::MAX) {
                return Err(Error::Schema(format!(
                    "{what} has no component at {}",
                    c.object_name(o)
                )));
            }
            Ok(out)
        };
        let unit = comps(&self.unit, "unit", &|o| o, &|o| omap[o as usize])?;
        let mult = comps(
            &self.multiplication,
            "multiplication",
            &|o| omap[omap[o as usize] as usize],
            &|o| omap[o as usize],
        )?;
        let name = self
            .name
            .clone()
            .unwrap_or_else(|| format!("monad on {}", c.name()));
        Monad::new(&name, t, unit, mult)
    }
}

/// The Eilenberg–Moore category with its forgetful functor.
#[derive(Clone, Debug)]
pub struct EmCategory {
    pub category: Arc<FinCategory>,
    /// `(carrier, structure map)` of each object.
    pub algebras: Vec<(ObjId, MorId)>,
    pub forgetful: Functor,
}

impl EmCategory {
    pub fn find_algebra(&self, c: ObjId, h: MorId) -> Option<ObjId> {
        self.algebras
            .iter()
            .position(|&a| a == (c, h))
            .map(|i| i as ObjId)
    }
}

pub fn em_category(m: &Monad) -> Result<EmCategory> {
    let c = &m.base;
    let mut algebras = Vec::new();
    for o in c.objects() {
        for &h in c.hom(m.ob(o), o) {
            if m.is_algebra(o, h) {
                algebras.push((o, h));
            }
        }
    }
    let label = |(o, h): (ObjId, MorId)| format!("({},{})", c.object_name(o), c.morphism_name(h));
    let objects: Vec<String> = algebras.iter().map(|&a| label(a)).collect();
    let mut mors = Vec::new();
    let mut under = Vec::new();
    let mut identities = BTreeMap::new();
    for (i, &(a, ha)) in algebras.iter().enumerate() {
        for (j, &(b, hb)) in algebras.iter().enumerate() {
            for &f in c.hom(a, b) {
                if c.compose(f, ha) != c.compose(hb, m.mor(f)) {
                    continue;
                }
                let name = if i == j && f == c.identity(a) {
                    let n = format!("id_{}", objects[i]);
                    identities.insert(objects[i].clone(), n.clone());
                    n
                } else {
                    format!("{}:{}->{}", c.morphism_name(f), objects[i], objects[j])
                };
                mors.push((name, objects[i].clone(), objects[j].clone(), i, j));
                under.push(f);
            }
        }
    }
    let mut index: HashMap<(usize, usize, MorId), usize> = HashMap::new();
    for (k, (_, _, _, i, j)) in mors.iter().enumerate() {
        index.insert((*i, *j, under[k]), k);
    }
    let mut composition = Vec::new();
    for (k1, (n1, _, _, i1, j1)) in mors.iter().enumerate() {
        for (k2, (n2, _, _, i2, j2)) in mors.iter().enumerate() {
            if j1 != i2 {
                continue;
            }
            let gf = c.comp(under[k2], under[k1]);
            let k = index[&(*i1, *j2, gf)];
            composition.push((n2.clone(), n1.clone(), mors[k].0.clone()));
        }
    }
    let em = Arc::new(FinCategory::from_parts(
        &format!("EM({})", m.name),
        objects,
        mors.iter()
            .map(|(n, s, t, _, _)| (n.clone(), s.clone(), t.clone()))
            .collect(),
        &identities,
        &composition,
        usize::MAX,
    )?);
    let forgetful = Functor::new(
        em.clone(),
        c.clone(),
        algebras.iter().map(|a| a.0).collect(),
        under,
    )?;
    Ok(EmCategory {
        category: em,
        algebras,
        forgetful,
    })
}

/// A strict map of monads: a functor commuting with `t`, `η` and `μ`.
#[derive(Clone, Debug)]
pub struct MonadMap {
    pub dom: Arc<Monad>,
    pub cod: Arc<Monad>,
    pub functor: Functor,
}

impl MonadMap {
    pub fn new(dom: Arc<Monad>, cod: Arc<Monad>, functor: Functor) -> Result<Self> {
        let m = MonadMap { dom, cod, functor };
        if let Some(v) = m.violations().first() {
            return Err(Error::Invalid(v.clone()));
        }
        Ok(m)
    }

    pub fn identity(m: Arc<Monad>) -> Self {
        MonadMap {
            functor: Functor::identity(m.base.clone()),
            dom: m.clone(),
            cod: m,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let (s, t, f) = (&self.dom, &self.cod, &self.functor);
        let mut v = Vec::new();
        if *f.dom != *s.base || *f.cod != *t.base {
            v.push("functor does not run between the base categories".into());
            return v;
        }
        v.extend(f.violations());
        let c = &s.base;
        for o in c.objects() {
            if f.ob(s.ob(o)) != t.ob(f.ob(o)) {
                v.push(format!("F t != t' F at {}", c.object_name(o)));
            } else {
                if f.mor(s.unit(o)) != t.unit(f.ob(o)) {
                    v.push(format!("unit not preserved at {}", c.object_name(o)));
                }
                if f.ob(s.ob(s.ob(o))) == t.ob(t.ob(f.ob(o))) && f.mor(s.mult(o)) != t.mult(f.ob(o))
                {
                    v.push(format!(
                        "multiplication not preserved at {}",
                        c.object_name(o)
                    ));
                }
            }
        }
        for g in c.morphism_ids() {
            if f.mor(s.mor(g)) != t.mor(f.mor(g)) {
                v.push(format!("F t != t' F at {}", c.morphism_name(g)));
            }
        }
        v
    }
}

/// A monad applied pointwise to diagrams, with the constant-diagram map.
#[derive(Clone, Debug)]
pub struct PointwiseMonad {
    pub monad: Arc<Monad>,
    pub diagrams: FunctorCategory,
    pub diagonal: MonadMap,
}

pub fn pointwise_monad(m: &Arc<Monad>, shape: &FinCategory, cap: usize) -> Result<PointwiseMonad> {
    let c = &m.base;
    let fc = functor_category_data(shape, c, cap)?;
    let cat = Arc::new(fc.category.clone());
    let missing = || Error::Invalid("diagram category is not closed under the monad".into());
    let mut omap = Vec::with_capacity(cat.object_count());
    let mut unit = Vec::with_capacity(cat.object_count());
    let mut mult = Vec::with_capacity(cat.object_count());
    for (i, (fo, fm)) in fc.functors.iter().enumerate() {
        let to: Vec<ObjId> = fo.iter().map(|&o| m.ob(o)).collect();
        let tm: Vec<MorId> = fm.iter().map(|&f| m.mor(f)).collect();
        let t = fc.find_functor(&to, &tm).ok_or_else(missing)?;
        omap.push(t);
        let eta: Vec<MorId> = fo.iter().map(|&o| m.unit(o)).collect();
        unit.push(
            fc.find_transformation(i as ObjId, t, &eta)
                .ok_or_else(missing)?,
        );
    }
    for (i, (fo, _)) in fc.functors.iter().enumerate() {
        let mu: Vec<MorId> = fo.iter().map(|&o| m.mult(o)).collect();
        let (tt, t) = (omap[omap[i] as usize], omap[i]);
        mult.push(fc.find_transformation(tt, t, &mu).ok_or_else(missing)?);
    }
    let mut mmap = Vec::with_capacity(cat.morphism_count());
    for a in cat.morphism_ids() {
        let comps: Vec<MorId> = fc.components[a as usize]
            .iter()
            .map(|&f| m.mor(f))
            .collect();
        let (s, t) = (omap[cat.src(a) as usize], omap[cat.tgt(a) as usize]);
        mmap.push(fc.find_transformation(s, t, &comps).ok_or_else(missing)?);
    }
    let t = Functor::new(cat.clone(), cat.clone(), omap, mmap)?;
    let pm = Arc::new(Monad::new(
        &format!("{}^{}", m.name, shape.name()),
        t,
        unit,
        mult,
    )?);
    let nd = shape.morphism_count();
    let mut dobj = Vec::new();
    for o in c.objects() {
        let objs = vec![o; shape.object_count()];
        let mors = vec![c.identity(o); nd];
        dobj.push(fc.find_functor(&objs, &mors).ok_or_else(missing)?);
    }
    let mut dmor = Vec::new();
    for f in c.morphism_ids() {
        let comps = vec![f; shape.object_count()];
        dmor.push(
            fc.find_transformation(dobj[c.src(f) as usize], dobj[c.tgt(f) as usize], &comps)
                .ok_or_else(missing)?,
        );
    }
    let diag = Functor::new(c.clone(), cat, dobj, dmor)?;
    let diagonal = MonadMap::new(m.clone(), pm.clone(), diag)?;
    Ok(PointwiseMonad {
        monad: pm,
        diagrams: fc,
        diagonal,
    })
}

/// The monad read as an action of `Δ₊`: `[m]` acts by `t^{m+1}` and a
/// monotone map by the corresponding composite of units and multiplications.
#[derive(Debug)]
pub struct HCAction {
    monad: Arc<Monad>,
    pow_ob: Mutex<Vec<Vec<ObjId>>>,
    pow_mor: Mutex<Vec<Vec<MorId>>>,
    interp: Mutex<HashMap<(OrdMap, ObjId), MorId>>,
}

impl HCAction {
    pub fn new(monad: Arc<Monad>) -> Self {
        let c = monad.base.clone();
        HCAction {
            pow_ob: Mutex::new(vec![c.objects().collect()]),
            pow_mor: Mutex::new(vec![c.morphism_ids().collect()]),
            interp: Mutex::new(HashMap::new()),
            monad,
        }
    }

    pub fn monad(&self) -> &Arc<Monad> {
        &self.monad
    }

    /// `t^k` on an object.
    pub fn pow_ob(&self, k: usize, o: ObjId) -> ObjId {
        let mut p = self.pow_ob.lock().expect("power table");
        while p.len() <= k {
            let next = p
                .last()
                .expect("t^0")
                .iter()
                .map(|&x| self.monad.ob(x))
                .collect();
            p.push(next);
        }
        p[k][o as usize]
    }

    /// `t^k` on a morphism.
    pub fn pow_mor(&self, k: usize, f: MorId) -> MorId {
        let mut p = self.pow_mor.lock().expect("power table");
        while p.len() <= k {
            let next = p
                .last()
                .expect("t^0")
                .iter()
                .map(|&x| self.monad.mor(x))
                .collect();
            p.push(next);
        }
        p[k][f as usize]
    }

    /// The component at `c` of the transformation `t^{m+1} ⇒ t^{n+1}` named by
    /// `α: [m] → [n]`: merges first, then insertions.
    pub fn interp(&self, alpha: &OrdMap, c: ObjId) -> MorId {
        if let Some(&f) = self.interp.lock().expect("memo").get(&(alpha.clone(), c)) {
            return f;
        }
        let cat = &self.monad.base;
        let mut size = alpha.dom.0;
        let mut cur = cat.identity(self.pow_ob((size + 1) as usize, c));
        let mut vals = alpha.values.clone();
        let mut i = 0;
        while i + 1 < vals.len() {
            if vals[i] == vals[i + 1] {
                let mu = self.monad.mult(self.pow_ob((size - 1) as usize - i, c));
                cur = cat.comp(self.pow_mor(i, mu), cur);
                vals.remove(i + 1);
                size -= 1;
            } else {
                i += 1;
            }
        }
        let mut k = size;
        for j in 0..=alpha.cod.0.max(-1) {
            let j = j as u32;
            if vals.binary_search(&j).is_ok() {
                continue;
            }
            let pos = vals.iter().filter(|&&v| v < j).count();
            let eta = self.monad.unit(self.pow_ob((k + 1) as usize - pos, c));
            cur = cat.comp(self.pow_mor(pos, eta), cur);
            vals.insert(pos, j);
            k += 1;
        }
        self.interp
            .lock()
            .expect("memo")
            .insert((alpha.clone(), c), cur);
        cur
    }

    /// The object `[m]·c = t^{m+1} c`.
    pub fn act_ob(&self, m: Ordinal, c: ObjId) -> ObjId {
        self.pow_ob((m.0 + 1) as usize, c)
    }

    /// `α · f = interp(α, c') ∘ t^{m+1} f` for `f: c → c'`.
    pub fn act_edge(&self, alpha: &OrdMap, f: MorId) -> MorId {
        let cat = &self.monad.base;
        let tf = self.pow_mor((alpha.dom.0 + 1) as usize, f);
        cat.comp(self.interp(alpha, cat.tgt(f)), tf)
    }

    /// Triples where `interp` fails to respect composition, on ordinals up to `max`.
    pub fn functoriality_failures(&self, max: i32) -> Vec<String> {
        let cat = self.monad.base.clone();
        let mut out = Vec::new();
        for a in -1..=max {
            for b in -1..=max {
                for c in -1..=max {
                    for f in crate::ordinal::monotone_maps(a, b) {
                        for g in crate::ordinal::monotone_maps(b, c) {
                            let gf = g.after(&f);
                            for o in cat.objects() {
                                if cat.compose(self.interp(&g, o), self.interp(&f, o))
                                    != Some(self.interp(&gf, o))
                                {
                                    out.push(format!(
                                        "{} after {} at {}",
                                        g.label(),
                                        f.label(),
                                        cat.object_name(o)
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// The action on nerves: an n-simplex of the nerve of a `Δ₊` truncation acts
/// on an n-simplex of the nerve of the base.
pub fn action_eval(
    act: &HCAction,
    dplus: &SSet,
    n: usize,
    x: Idx,
    base: &SSet,
    y: Idx,
) -> Result<Idx> {
    let dcat = dplus
        .nerve_of()
        .ok_or_else(|| Error::Invalid("first argument must be a nerve".into()))?;
    let cat = act.monad.base.clone();
    let ord_of = |v: Idx| -> Result<Ordinal> {
        let name = dcat.object_name(v);
        name.strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .and_then(|s| s.parse().ok())
            .map(Ordinal)
            .ok_or_else(|| Error::Invalid(format!("{name} is not an ordinal")))
    };
    if n == 0 {
        return Ok(act.act_ob(ord_of(x)?, y));
    }
    let mut chain = Vec::with_capacity(n);
    for j in 0..n {
        let e = dplus.edge(n, x, j, j + 1);
        let alpha = OrdMap::from_label(dcat.morphism_name(e)).ok_or_else(|| {
            Error::Invalid(format!("{} is not a monotone map", dcat.morphism_name(e)))
        })?;
        chain.push(act.act_edge(&alpha, base.edge(n, y, j, j + 1)));
    }
    let _ = cat;
    nerve_simplex(base, &chain)
        .ok_or_else(|| Error::Invalid("acted chain is not a simplex of the base nerve".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::{delta_plus_truncation, monotone_maps};
    use crate::sset::nerve;

    fn chain3() -> Arc<FinCategory> {
        Arc::new(FinCategory::chain("abc", &["a", "b", "c"]).unwrap())
    }

    #[test]
    fn closure_on_a_chain() {
        let c = chain3();
        let m = Monad::closure("cl", c.clone(), &[1, 1, 2]).unwrap();
        assert!(m.check_laws().valid);
        let em = m.em_category().unwrap();
        assert_eq!(em.category.object_count(), 2);
        assert!(em
            .category
            .is_isomorphic(&FinCategory::chain("bc", &["b", "c"]).unwrap()));
    }

    #[test]
    fn successor_breaks_the_unit_law() {
        let c = chain3();
        let succ = Functor::from_object_map(c.clone(), c.clone(), vec![1, 2, 2]).unwrap();
        let unit = vec![c.hom(0, 1)[0], c.hom(1, 2)[0], c.identity(2)];
        // t t a = c but t a = b, so no multiplication component exists at a
        assert!(Monad::new("succ", succ.clone(), unit.clone(), vec![c.identity(2); 3]).is_err());
        let bad = Monad {
            name: "succ".into(),
            base: c.clone(),
            t: succ,
            unit,
            mult: vec![c.identity(2); 3],
        };
        let r = bad.check_laws();
        assert!(!r.valid);
        assert!(r
            .violations
            .iter()
            .any(|v| v.law.starts_with("left unit") && v.at == "a"));
    }

    #[test]
    fn interpretation_is_functorial() {
        let c = chain3();
        let act = HCAction::new(Arc::new(Monad::closure("cl", c, &[1, 1, 2]).unwrap()));
        assert!(act.functoriality_failures(2).is_empty());
        let z =
            Arc::new(FinCategory::group("Z2", &["e", "g"], &[vec![0, 1], vec![1, 0]], 0).unwrap());
        let g = z.find_morphism("g").unwrap();
        let tw = Monad::new("twist", Functor::identity(z.clone()), vec![g], vec![g]).unwrap();
        assert!(tw.check_laws().valid);
        let act = HCAction::new(Arc::new(tw));
        assert!(act.functoriality_failures(2).is_empty());
        for f in monotone_maps(1, 0) {
            assert_eq!(act.interp(&f, 0), g);
        }
    }

    #[test]
    fn vertex_action_is_t() {
        let c = chain3();
        let m = Arc::new(Monad::closure("cl", c.clone(), &[1, 1, 2]).unwrap());
        let act = HCAction::new(m);
        let d = Arc::new(delta_plus_truncation(1));
        let nd = nerve(&d, 1, 10_000).unwrap();
        let nb = nerve(&c, 1, 10_000).unwrap();
        let zero = d.find_object("[0]").unwrap();
        assert_eq!(action_eval(&act, &nd, 0, zero, &nb, 0).unwrap(), 1);
        let mu = d.find_morphism("[1]->[0]:(0,0)").unwrap();
        let a_id = c.identity(0);
        let e = action_eval(&act, &nd, 1, mu, &nb, a_id).unwrap();
        assert_eq!(e, c.identity(1));
    }

    #[test]
    fn pointwise_closure() {
        let c = chain3();
        let m = Arc::new(Monad::closure("cl", c, &[1, 1, 2]).unwrap());
        let two = FinCategory::discrete("two", &["p", "q"]).unwrap();
        let pm = pointwise_monad(&m, &two, 10_000).unwrap();
        assert!(pm.monad.check_laws().valid);
        let em = pm.monad.em_category().unwrap();
        assert_eq!(em.category.object_count(), 4);
    }

    #[test]
    fn json_round_trip() {
        let m = Monad::closure("cl", chain3(), &[1, 1, 2]).unwrap();
        let s = serde_json::to_string(&m.to_json()).unwrap();
        let back = Monad::from_json_str(&s, None, 10_000).unwrap();
        assert_eq!(back, m);
    }
}
