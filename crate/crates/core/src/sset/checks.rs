use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use super::maps::{SearchOptions, SearchPlan};
use super::{simplex_subset, Idx, SMap, SSet, NONE};

/// An inner horn in `A` with no filler.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HornFailure {
    pub n: usize,
    pub k: usize,
    /// Faces of the horn, `None` at the missing one.
    pub faces: Vec<Option<Idx>>,
}

/// Visits every map `Λ^n_k → A` (or `∂Δ^n → A` when `omit` is `None`) as
/// its list of `n+1` faces, with `NONE` at the omitted position. `last`
/// pins vertex `n`.
pub(crate) fn sphere_maps(
    a: &SSet,
    n: usize,
    omit: Option<usize>,
    last: Option<Idx>,
    visit: &mut dyn FnMut(&[Idx]) -> bool,
) {
    assert!(n >= 1 && n - 1 <= a.bound());
    let (shape, _, index) = match omit {
        Some(k) => simplex_subset("horn", n, n - 1, |img| {
            (0..=n as u32)
                .filter(|&j| j != k as u32)
                .any(|j| img.binary_search(&j).is_err())
        }),
        None => simplex_subset("sphere", n, n - 1, |img| img.len() < n + 1),
    }
    .expect("horn shapes are small");
    let face_idx: Vec<Option<Idx>> = (0..=n)
        .map(|j| {
            if omit == Some(j) {
                return None;
            }
            let key: Vec<u32> = (0..=n as u32).filter(|&v| v != j as u32).collect();
            Some(index[n - 1][&key])
        })
        .collect();
    let plan = SearchPlan::new(&shape, n - 1);
    let mut opts = SearchOptions::default();
    if let Some(v) = last {
        opts.pins.insert((0, index[0][&vec![n as u32]]), v);
    }
    let mut faces = vec![NONE; n + 1];
    plan.run(&shape, a, &opts, &mut |img| {
        for (j, f) in face_idx.iter().enumerate() {
            faces[j] = f.map_or(NONE, |y| plan.eval(&shape, a, img, n - 1, y));
        }
        visit(&faces)
    });
}

/// The first inner horn `Λ^n_k → A` with `n ≤ max_dim` that has no filler.
pub fn find_inner_horn_failure(a: &SSet, max_dim: usize) -> Option<HornFailure> {
    for n in 2..=max_dim.min(a.bound()) {
        for k in 1..n {
            let mut present: HashSet<Vec<Idx>> = HashSet::new();
            for x in 0..a.count(n) as Idx {
                let mut f = a.faces_of(n, x).to_vec();
                f[k] = NONE;
                present.insert(f);
            }
            let mut failure = None;
            sphere_maps(a, n, Some(k), None, &mut |faces| {
                if present.contains(faces) {
                    return true;
                }
                failure = Some(faces.to_vec());
                false
            });
            if let Some(f) = failure {
                let faces = f.into_iter().map(|x| (x != NONE).then_some(x)).collect();
                return Some(HornFailure { n, k, faces });
            }
        }
    }
    None
}

/// Inner horn filling in every dimension up to `max_dim` (and the bound).
pub fn is_quasi_category(a: &SSet, max_dim: usize) -> bool {
    find_inner_horn_failure(a, max_dim).is_none()
}

/// An edge `e: x → y` with a two-sided inverse witnessed by 2-simplices.
pub fn is_invertible_edge(a: &SSet, e: Idx) -> bool {
    if a.bound() < 2 {
        return false;
    }
    let (x, y) = (a.face(1, e, 1), a.face(1, e, 0));
    let (ix, iy) = (a.degen(0, x, 0), a.degen(0, y, 0));
    (0..a.count(1) as Idx).any(|g| {
        a.face(1, g, 1) == y
            && a.face(1, g, 0) == x
            && !a.with_faces(2, &[g, ix, e]).is_empty()
            && !a.with_faces(2, &[e, iy, g]).is_empty()
    })
}

/// Why `p` fails to be an isofibration (inner horn lifting up to `max_dim`
/// plus lifting of invertible edges), or `None`.
pub fn isofibration_failure(p: &SMap, max_dim: usize) -> Option<String> {
    let (e, b) = (p.dom(), p.cod());
    let top = max_dim.min(p.bound());
    for n in 2..=top {
        for k in 1..n {
            let mut lifts: HashMap<Vec<Idx>, HashSet<Idx>> = HashMap::new();
            for x in 0..e.count(n) as Idx {
                let mut f = e.faces_of(n, x).to_vec();
                f[k] = NONE;
                lifts.entry(f).or_default().insert(p.at(n, x));
            }
            let mut below: HashMap<Vec<Idx>, Vec<Idx>> = HashMap::new();
            for x in 0..b.count(n) as Idx {
                let mut f = b.faces_of(n, x).to_vec();
                f[k] = NONE;
                below.entry(f).or_default().push(x);
            }
            let mut failure = None;
            sphere_maps(e, n, Some(k), None, &mut |faces| {
                let image: Vec<Idx> = faces
                    .iter()
                    .map(|&f| if f == NONE { NONE } else { p.at(n - 1, f) })
                    .collect();
                let have = lifts.get(faces);
                for &s in below.get(&image).map_or(&[][..], |v| v.as_slice()) {
                    if !have.is_some_and(|h| h.contains(&s)) {
                        failure = Some(format!("inner horn Lambda^{n}_{k} with faces {faces:?} has no lift of simplex {s}"));
                        return false;
                    }
                }
                true
            });
            if failure.is_some() {
                return failure;
            }
        }
    }
    if top >= 2 {
        for v in 0..e.count(0) as Idx {
            let pv = p.at(0, v);
            for beta in 0..b.count(1) as Idx {
                if b.face(1, beta, 1) != pv || !is_invertible_edge(b, beta) {
                    continue;
                }
                let lifted = (0..e.count(1) as Idx).any(|eps| {
                    e.face(1, eps, 1) == v && p.at(1, eps) == beta && is_invertible_edge(e, eps)
                });
                if !lifted {
                    return Some(format!(
                        "invertible edge {beta} out of {} does not lift at {}",
                        b.vertex_label(pv),
                        e.vertex_label(v)
                    ));
                }
            }
        }
    }
    None
}

pub fn is_isofibration(p: &SMap, max_dim: usize) -> bool {
    isofibration_failure(p, max_dim).is_none()
}

fn vertex_profile(a: &SSet) -> Vec<(usize, usize)> {
    let mut prof = vec![(0, 0); a.count(0)];
    if a.bound() >= 1 {
        for &e in a.nondegenerate(1) {
            prof[a.face(1, e, 1) as usize].0 += 1;
            prof[a.face(1, e, 0) as usize].1 += 1;
        }
    }
    prof
}

/// An isomorphism `a → b`, if there is one.
pub fn isomorphism(a: &SSet, b: &SSet) -> Option<SMap> {
    if a.bound() != b.bound()
        || a.counts() != b.counts()
        || a.nondegenerate_counts() != b.nondegenerate_counts()
    {
        return None;
    }
    let (pa, pb) = (vertex_profile(a), vertex_profile(b));
    let ok = |x: Idx, c: Idx| pa[x as usize] == pb[c as usize];
    let plan = SearchPlan::new(a, a.bound());
    let opts = SearchOptions {
        injective: true,
        vertex_ok: Some(&ok),
        ..Default::default()
    };
    let mut found = None;
    plan.run(a, b, &opts, &mut |img| {
        found = Some(plan.full_table(a, b, img));
        false
    });
    let m = SMap::new_unchecked(Arc::new(a.clone()), Arc::new(b.clone()), found?);
    m.is_iso().then_some(m)
}

#[cfg(test)]
mod tests {
    use super::super::{nerve, standard_simplex};
    use super::*;
    use crate::fincat::FinCategory;

    #[test]
    fn nerves_are_quasi_categories() {
        let c = Arc::new(
            FinCategory::poset(
                "d",
                &["0", "x", "y", "1"],
                &[("0", "x"), ("0", "y"), ("x", "1"), ("y", "1")],
            )
            .unwrap(),
        );
        assert!(is_quasi_category(&nerve(&c, 3, 1000).unwrap(), 3));
    }

    #[test]
    fn boundary_of_triangle_is_not() {
        let (b, _) = super::super::boundary(2, 2).unwrap();
        let f = find_inner_horn_failure(&b, 2).unwrap();
        assert_eq!((f.n, f.k), (2, 1));
    }

    #[test]
    fn invertible_edges_in_a_group() {
        let g =
            Arc::new(FinCategory::group("Z2", &["e", "g"], &[vec![0, 1], vec![1, 0]], 0).unwrap());
        let n = nerve(&g, 2, 1000).unwrap();
        assert!((0..n.count(1) as Idx).all(|e| is_invertible_edge(&n, e)));
        let d = standard_simplex(1, 2);
        let e = d.nondegenerate(1)[0];
        assert!(!is_invertible_edge(&d, e));
    }
}
