//! Finite ordinals, monotone maps and ordinal sum.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::FinCategory;

/// The ordinal `[n] = {0 < … < n}`; `[-1]` is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Ordinal(pub i32);

impl Ordinal {
    pub const EMPTY: Ordinal = Ordinal(-1);

    pub fn new(n: i32) -> Result<Self> {
        if n < -1 {
            return Err(Error::Invalid(format!("ordinal [{n}] below [-1]")));
        }
        Ok(Ordinal(n))
    }

    pub fn len(self) -> usize {
        (self.0 + 1) as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 < 0
    }

    pub fn sum(self, other: Ordinal) -> Ordinal {
        Ordinal(self.0 + other.0 + 1)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

/// A monotone map `[m] → [n]` given by its value table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrdMap {
    pub dom: Ordinal,
    pub cod: Ordinal,
    pub values: Vec<u32>,
}

impl OrdMap {
    pub fn new(dom: i32, cod: i32, values: Vec<u32>) -> Result<Self> {
        let (dom, cod) = (Ordinal::new(dom)?, Ordinal::new(cod)?);
        if values.len() != dom.len() {
            return Err(Error::Invalid(format!(
                "map out of {dom} needs {} values",
                dom.len()
            )));
        }
        if values.iter().any(|&v| v as usize >= cod.len()) {
            return Err(Error::Invalid(format!("value outside {cod}")));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Invalid("values are not monotone".into()));
        }
        Ok(OrdMap { dom, cod, values })
    }

    pub fn identity(n: i32) -> Self {
        OrdMap {
            dom: Ordinal(n),
            cod: Ordinal(n),
            values: (0..(n + 1) as u32).collect(),
        }
    }

    /// The coface `δ^i: [n-1] → [n]` skipping `i`.
    pub fn coface(n: i32, i: u32) -> Self {
        OrdMap {
            dom: Ordinal(n - 1),
            cod: Ordinal(n),
            values: (0..n as u32)
                .map(|j| if j < i { j } else { j + 1 })
                .collect(),
        }
    }

    /// The codegeneracy `σ^i: [n+1] → [n]` hitting `i` twice.
    pub fn codegeneracy(n: i32, i: u32) -> Self {
        OrdMap {
            dom: Ordinal(n + 1),
            cod: Ordinal(n),
            values: (0..(n + 2) as u32)
                .map(|j| if j <= i { j } else { j - 1 })
                .collect(),
        }
    }

    pub fn is_top_preserving(&self) -> bool {
        match self.values.last() {
            Some(&v) => v as i32 == self.cod.0,
            None => self.cod.is_empty(),
        }
    }

    pub fn is_injective(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        for &v in &self.values {
            seen[v as usize] = true;
        }
        seen.into_iter().all(|b| b)
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &OrdMap) -> OrdMap {
        assert_eq!(f.cod, self.dom, "maps are not composable");
        OrdMap {
            dom: f.dom,
            cod: self.cod,
            values: f.values.iter().map(|&v| self.values[v as usize]).collect(),
        }
    }

    pub fn sum(&self, other: &OrdMap) -> OrdMap {
        let shift = self.cod.len() as u32;
        let mut values = self.values.clone();
        values.extend(other.values.iter().map(|&v| v + shift));
        OrdMap {
            dom: self.dom.sum(other.dom),
            cod: self.cod.sum(other.cod),
            values,
        }
    }

    /// Epi-mono factorization as generator words: first the codegeneracies
    /// (applied left to right), then the cofaces (applied left to right).
    /// Each entry is `(source ordinal, index)`.
    pub fn factor(&self) -> (Vec<(i32, u32)>, Vec<(i32, u32)>) {
        let mut vals = self.values.clone();
        let mut size = self.dom.0;
        let mut degens = Vec::new();
        let mut i = 0;
        while i + 1 < vals.len() {
            if vals[i] == vals[i + 1] {
                degens.push((size, i as u32));
                vals.remove(i + 1);
                size -= 1;
            } else {
                i += 1;
            }
        }
        let mut faces = Vec::new();
        let mut present = vals;
        for j in 0..self.cod.len() as u32 {
            if present.binary_search(&j).is_err() {
                let pos = present.iter().filter(|&&v| v < j).count() as u32;
                faces.push((size, pos));
                present.push(j);
                present.sort_unstable();
                size += 1;
            }
        }
        (degens, faces)
    }

    /// Inverse of [`label`](Self::label).
    pub fn from_label(s: &str) -> Option<OrdMap> {
        let (ends, vals) = s.split_once(':')?;
        let (a, b) = ends.split_once("->")?;
        let ord = |t: &str| t.strip_prefix('[')?.strip_suffix(']')?.parse::<i32>().ok();
        let inner = vals.strip_prefix('(')?.strip_suffix(')')?;
        let values = if inner.is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|v| v.parse().ok())
                .collect::<Option<Vec<u32>>>()?
        };
        OrdMap::new(ord(a)?, ord(b)?, values).ok()
    }

    pub fn label(&self) -> String {
        let v: Vec<String> = self.values.iter().map(|x| x.to_string()).collect();
        format!("{}->{}:({})", self.dom, self.cod, v.join(","))
    }
}

/// Every monotone map `[m] → [n]`, lexicographic.
pub fn monotone_maps(m: i32, n: i32) -> Vec<OrdMap> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity((m + 1) as usize);
    fn go(m: i32, n: i32, lo: u32, cur: &mut Vec<u32>, out: &mut Vec<OrdMap>) {
        if cur.len() == (m + 1) as usize {
            out.push(OrdMap {
                dom: Ordinal(m),
                cod: Ordinal(n),
                values: cur.clone(),
            });
            return;
        }
        for v in lo..(n + 1).max(0) as u32 {
            cur.push(v);
            go(m, n, v, cur, out);
            cur.pop();
        }
    }
    go(m, n, 0, &mut cur, &mut out);
    out
}

/// Accepts either two ordinals or two maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrdinalOrMap {
    Ordinal(Ordinal),
    Map(OrdMap),
}

pub fn ordinal_sum(x: &OrdinalOrMap, y: &OrdinalOrMap) -> Result<OrdinalOrMap> {
    match (x, y) {
        (OrdinalOrMap::Ordinal(a), OrdinalOrMap::Ordinal(b)) => {
            Ok(OrdinalOrMap::Ordinal(a.sum(*b)))
        }
        (OrdinalOrMap::Map(a), OrdinalOrMap::Map(b)) => Ok(OrdinalOrMap::Map(a.sum(b))),
        _ => Err(Error::Invalid("ordinal sum of an ordinal and a map".into())),
    }
}

fn truncation(name: &str, objects: std::ops::RangeInclusive<i32>, top: bool) -> FinCategory {
    let objs: Vec<i32> = objects.collect();
    let mut mors = Vec::new();
    let mut maps = Vec::new();
    for &a in &objs {
        for &b in &objs {
            for f in monotone_maps(a, b) {
                if !top || f.is_top_preserving() {
                    mors.push((f.label(), Ordinal(a).to_string(), Ordinal(b).to_string()));
                    maps.push(f);
                }
            }
        }
    }
    let identities: BTreeMap<String, String> = objs
        .iter()
        .map(|&a| (Ordinal(a).to_string(), OrdMap::identity(a).label()))
        .collect();
    let mut comp = Vec::new();
    for f in &maps {
        for g in &maps {
            if f.cod == g.dom {
                comp.push((g.label(), f.label(), g.after(f).label()));
            }
        }
    }
    let objects = objs.iter().map(|&a| Ordinal(a).to_string()).collect();
    FinCategory::from_parts(name, objects, mors, &identities, &comp, usize::MAX)
        .expect("truncation is well formed")
}

/// Full subcategory of Δ₊ on `[-1]..=[max]`.
pub fn delta_plus_truncation(max: i32) -> FinCategory {
    truncation(&format!("Delta+<={max}"), -1..=max, false)
}

/// Top-preserving maps between `[0]..=[max]`.
pub fn delta_t_truncation(max: i32) -> FinCategory {
    truncation(&format!("Delta_t<={max}"), 0..=max, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hom_counts() {
        let d = delta_plus_truncation(2);
        let o = |s: &str| d.find_object(s).unwrap();
        assert_eq!(d.hom(o("[1]"), o("[1]")).len(), 3);
        assert_eq!(d.hom(o("[1]"), o("[2]")).len(), 6);
        assert_eq!(d.hom(o("[-1]"), o("[2]")).len(), 1);
        assert!(d.validate().valid);
        let t = delta_t_truncation(2);
        assert_eq!(
            t.hom(t.find_object("[1]").unwrap(), t.find_object("[1]").unwrap())
                .len(),
            2
        );
        assert!(t.validate().valid);
    }

    #[test]
    fn sums() {
        assert_eq!(Ordinal(-1).sum(Ordinal(3)), Ordinal(3));
        assert_eq!(Ordinal(0).sum(Ordinal(0)), Ordinal(1));
        let collapse = OrdMap::new(1, 0, vec![0, 0]).unwrap();
        let s = OrdMap::identity(0).sum(&collapse);
        assert_eq!(s, OrdMap::new(2, 1, vec![0, 1, 1]).unwrap());
    }

    #[test]
    fn factorization_recomposes() {
        for m in -1..=3 {
            for n in -1..=3 {
                for f in monotone_maps(m, n) {
                    let (dg, fc) = f.factor();
                    let mut acc = OrdMap::identity(m);
                    for (s, i) in dg {
                        acc = OrdMap::codegeneracy(s - 1, i).after(&acc);
                    }
                    for (s, i) in fc {
                        acc = OrdMap::coface(s + 1, i).after(&acc);
                    }
                    assert_eq!(acc, f);
                }
            }
        }
    }
}
