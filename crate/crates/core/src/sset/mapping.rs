use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{cap_check, Error, Result};

use super::maps::{SearchOptions, SearchPlan};
use super::{product, standard_simplex_levels, Idx, SMap, SSet};

/// `Δ^n × X` together with its search plan and the simplices of `Δ^n`.
#[derive(Debug)]
struct Domain {
    k: SSet,
    plan: SearchPlan,
    levels: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, Idx>>,
}

/// The simplicial set `A^X`: an n-simplex is a map `Δ^n × X → A`, stored by
/// its values on the nondegenerate simplices of `Δ^n × X`.
#[derive(Debug)]
pub struct MappingSpace {
    space: Arc<SSet>,
    x: Arc<SSet>,
    a: Arc<SSet>,
    doms: Vec<Domain>,
    keys: Vec<Vec<Vec<Idx>>>,
    lookup: Vec<HashMap<Vec<Idx>, Idx>>,
}

/// Builds `A^X` up to degree `bound`; maps out of `Δ^n × X` are truncated at
/// the smaller of the bounds of `X` and `A`.
pub fn mapping_space(
    x: &Arc<SSet>,
    a: &Arc<SSet>,
    bound: usize,
    cap: usize,
) -> Result<MappingSpace> {
    let kb = x.bound().min(a.bound());
    let mut doms = Vec::with_capacity(bound + 1);
    for n in 0..=bound {
        let (d, levels, index) = standard_simplex_levels(n, kb);
        let k = product(&d, x, kb)?;
        let plan = SearchPlan::new(&k, kb);
        doms.push(Domain {
            k,
            plan,
            levels,
            index,
        });
    }
    let mut keys: Vec<Vec<Vec<Idx>>> = Vec::with_capacity(bound + 1);
    let mut total = 0usize;
    for dom in &doms {
        let mut level = Vec::new();
        let mut over = false;
        dom.plan
            .run(&dom.k, a, &SearchOptions::default(), &mut |img| {
                level.push(img.to_vec());
                if total + level.len() > cap {
                    over = true;
                    return false;
                }
                true
            });
        if over {
            cap_check(
                &format!("simplices of {}^{}", a.name(), x.name()),
                total + level.len(),
                cap,
            )?;
        }
        total += level.len();
        keys.push(level);
    }
    let lookup: Vec<HashMap<Vec<Idx>, Idx>> = keys
        .iter()
        .map(|l| {
            l.iter()
                .enumerate()
                .map(|(i, k)| (k.clone(), i as Idx))
                .collect()
        })
        .collect();
    let mut ms = MappingSpace {
        space: Arc::new(SSet::from_tables(
            "",
            0,
            vec![0],
            vec![vec![]],
            vec![vec![]],
            vec![],
        )?),
        x: x.clone(),
        a: a.clone(),
        doms,
        keys,
        lookup,
    };
    let counts: Vec<usize> = ms.keys.iter().map(|l| l.len()).collect();
    let mut faces = vec![Vec::new(); bound + 1];
    let mut degens = vec![Vec::new(); bound + 1];
    for n in 0..=bound {
        for phi in 0..counts[n] as Idx {
            if n > 0 {
                for i in 0..=n as u32 {
                    let key = ms.precompose(n, phi, n - 1, &|v| if v < i { v } else { v + 1 });
                    faces[n].push(ms.lookup[n - 1][&key]);
                }
            }
            if n < bound {
                for i in 0..=n as u32 {
                    let key = ms.precompose(n, phi, n + 1, &|v| if v <= i { v } else { v - 1 });
                    degens[n].push(ms.lookup[n + 1][&key]);
                }
            }
        }
    }
    let labels = (0..counts[0] as Idx)
        .map(|phi| {
            let vs: Vec<&str> = (0..x.count(0) as Idx)
                .map(|v| a.vertex_label(ms.eval(0, phi, 0, v)))
                .collect();
            format!("[{}]", vs.join(","))
        })
        .collect();
    let name = format!("{}^{}", a.name(), x.name());
    ms.space = Arc::new(SSet::from_tables(
        &name, bound, counts, faces, degens, labels,
    )?);
    Ok(ms)
}

impl MappingSpace {
    pub fn space(&self) -> &Arc<SSet> {
        &self.space
    }

    pub fn source(&self) -> &Arc<SSet> {
        &self.x
    }

    pub fn target(&self) -> &Arc<SSet> {
        &self.a
    }

    pub fn key(&self, n: usize, phi: Idx) -> &[Idx] {
        &self.keys[n][phi as usize]
    }

    pub fn find(&self, n: usize, key: &[Idx]) -> Option<Idx> {
        self.lookup[n].get(key).copied()
    }

    /// Value of the n-simplex `phi` on `(θ, y)` where `θ: [d] → [n]` is the
    /// `t`-th d-simplex of `Δ^n` and `y` a d-simplex of `X`.
    fn eval_at(&self, n: usize, phi: Idx, d: usize, t: Idx, y: Idx) -> Idx {
        let dom = &self.doms[n];
        let s = t * self.x.count(d) as Idx + y;
        dom.plan
            .eval(&dom.k, &self.a, &self.keys[n][phi as usize], d, s)
    }

    /// Value of `phi` on `(θ, y)` with `θ` given by its values.
    pub fn eval_simplex(&self, n: usize, phi: Idx, theta: &[u32], y: Idx) -> Idx {
        let d = theta.len() - 1;
        let t = self.doms[n].index[d][theta];
        self.eval_at(n, phi, d, t, y)
    }

    /// Value of `phi` at a vertex of `Δ^n × X`.
    pub fn eval(&self, n: usize, phi: Idx, j: u32, v: Idx) -> Idx {
        self.eval_simplex(n, phi, &[j], v)
    }

    /// Key of `phi ∘ (f × X)` for `f: [m] → [n]` given pointwise.
    fn precompose(&self, n: usize, phi: Idx, m: usize, f: &dyn Fn(u32) -> u32) -> Vec<Idx> {
        let dom = &self.doms[m];
        dom.plan
            .order()
            .iter()
            .map(|&(d, s)| {
                let ny = self.x.count(d) as Idx;
                let (t, y) = (s / ny, s % ny);
                let theta: Vec<u32> = dom.levels[d][t as usize].iter().map(|&v| f(v)).collect();
                self.eval_simplex(n, phi, &theta, y)
            })
            .collect()
    }

    /// The map `X → A` named by a vertex.
    pub fn vertex_map(&self, phi: Idx) -> SMap {
        let dom = &self.doms[0];
        let table = dom
            .plan
            .full_table(&dom.k, &self.a, &self.keys[0][phi as usize]);
        SMap::new_unchecked(self.x.clone(), self.a.clone(), table)
    }

    /// The vertex naming a map `X → A`.
    pub fn vertex_of(&self, f: &SMap) -> Option<Idx> {
        let key: Vec<Idx> = self.doms[0]
            .plan
            .order()
            .iter()
            .map(|&(d, s)| f.at(d, s))
            .collect();
        self.find(0, &key)
    }

    /// Evaluation `A^X → A` at a vertex of `X`.
    pub fn ev(&self, v: Idx) -> SMap {
        let b = self.space.bound().min(self.a.bound());
        let table = (0..=b)
            .map(|n| {
                let id: Vec<u32> = (0..=n as u32).collect();
                let y = self.x.constant(v, n);
                (0..self.space.count(n) as Idx)
                    .map(|phi| self.eval_simplex(n, phi, &id, y))
                    .collect()
            })
            .collect();
        SMap::new_unchecked(self.space.clone(), self.a.clone(), table)
    }

    /// The diagonal `A → A^X`.
    pub fn constant_map(&self) -> SMap {
        let b = self.space.bound().min(self.a.bound());
        let table = (0..=b)
            .map(|n| {
                let dom = &self.doms[n];
                (0..self.a.count(n) as Idx)
                    .map(|alpha| {
                        let key: Vec<Idx> = dom
                            .plan
                            .order()
                            .iter()
                            .map(|&(d, s)| {
                                let t = s / self.x.count(d) as Idx;
                                self.a.apply(n, alpha, &dom.levels[d][t as usize])
                            })
                            .collect();
                        self.lookup[n][&key]
                    })
                    .collect()
            })
            .collect();
        SMap::new_unchecked(self.a.clone(), self.space.clone(), table)
    }

    /// `g ∘ -: A^X → B^X` where `to` is `B^X`.
    pub fn postcompose(&self, g: &SMap, to: &MappingSpace) -> Result<SMap> {
        if *to.x != *self.x || **g.dom() != *self.a || **g.cod() != *to.a {
            return Err(Error::Invalid(
                "postcomposition between unrelated mapping spaces".into(),
            ));
        }
        let b = self.space.bound().min(to.space.bound());
        let mut table = Vec::with_capacity(b + 1);
        for n in 0..=b {
            let dom = &self.doms[n];
            let tdom = &to.doms[n];
            let mut row = Vec::with_capacity(self.space.count(n));
            for phi in 0..self.space.count(n) as Idx {
                let key: Vec<Idx> = tdom
                    .plan
                    .order()
                    .iter()
                    .map(|&(d, s)| {
                        g.at(
                            d,
                            dom.plan
                                .eval(&dom.k, &self.a, &self.keys[n][phi as usize], d, s),
                        )
                    })
                    .collect();
                row.push(
                    to.find(n, &key)
                        .ok_or_else(|| Error::Invalid("image is not a simplex".into()))?,
                );
            }
            table.push(row);
        }
        SMap::new(self.space.clone(), to.space.clone(), table)
    }
}

/// Precomposition `A^X → A^Y` along `i: Y → X`.
pub fn restriction_map(i: &SMap, from: &MappingSpace, to: &MappingSpace) -> Result<SMap> {
    if **i.cod() != *from.x || **i.dom() != *to.x || *from.a != *to.a {
        return Err(Error::Invalid(
            "restriction between unrelated mapping spaces".into(),
        ));
    }
    let b = from.space.bound().min(to.space.bound());
    let mut table = Vec::with_capacity(b + 1);
    for n in 0..=b {
        let tdom = &to.doms[n];
        let mut row = Vec::with_capacity(from.space.count(n));
        for phi in 0..from.space.count(n) as Idx {
            let key: Vec<Idx> = tdom
                .plan
                .order()
                .iter()
                .map(|&(d, s)| {
                    let ny = to.x.count(d) as Idx;
                    let (t, y) = (s / ny, s % ny);
                    from.eval_at(n, phi, d, t, i.at(d, y))
                })
                .collect();
            row.push(
                to.find(n, &key)
                    .ok_or_else(|| Error::Invalid("restricted map is not a simplex".into()))?,
            );
        }
        table.push(row);
    }
    SMap::new(from.space.clone(), to.space.clone(), table)
}

#[cfg(test)]
mod tests {
    use super::super::{isomorphism, nerve, standard_simplex};
    use super::*;
    use crate::fincat::{functor_category, FinCategory};

    #[test]
    fn arrows_of_a_chain() {
        let c = Arc::new(FinCategory::ordinal(2));
        let a = Arc::new(nerve(&c, 3, 10_000).unwrap());
        let d1 = Arc::new(standard_simplex(1, 3));
        let m = mapping_space(&d1, &a, 3, 100_000).unwrap();
        let fc = Arc::new(functor_category(&FinCategory::ordinal(1), &c, 10_000).unwrap());
        let expect = nerve(&fc, 3, 100_000).unwrap();
        assert!(m.space().identity_failures().is_empty());
        assert!(isomorphism(m.space(), &expect).is_some());
    }

    #[test]
    fn evaluation_and_diagonal() {
        let c = Arc::new(FinCategory::ordinal(1));
        let a = Arc::new(nerve(&c, 2, 1000).unwrap());
        let d1 = Arc::new(standard_simplex(1, 2));
        let m = mapping_space(&d1, &a, 2, 10_000).unwrap();
        let diag = m.constant_map();
        assert!(diag.violations().is_empty());
        for v in 0..2 {
            let ev = m.ev(v);
            assert!(ev.violations().is_empty());
            assert_eq!(diag.then(&ev).unwrap(), SMap::identity(a.clone()));
        }
    }
}
