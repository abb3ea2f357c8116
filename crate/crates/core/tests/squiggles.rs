use std::collections::HashMap;

use proptest::prelude::*;
use qcat::algebras::build_cell_complex;
use qcat::squiggle::{
    act, attach, enumerate_cells, enumerate_plus_squiggles, enumerate_squiggles, Level, Squiggle,
    Target,
};

/// Every level sequence from `n+1` to `0` of width at most `w`, filtered by
/// the definition rather than generated shape by shape.
fn brute_force(dim: usize, w: usize) -> Vec<Vec<Level>> {
    let top = dim as Level + 1;
    let mut out = Vec::new();
    for len in 2..=w + 1 {
        let mut seq = vec![0 as Level; len];
        loop {
            let undulating = seq.windows(2).all(|p| p[0] != p[1])
                && seq
                    .windows(3)
                    .all(|t| (t[1] > t[0] && t[1] > t[2]) || (t[1] < t[0] && t[1] < t[2]));
            if seq[0] == top && seq[len - 1] == 0 && undulating {
                out.push(seq.clone());
            }
            let mut i = 0;
            while i < len && seq[i] == top {
                seq[i] = 0;
                i += 1;
            }
            if i == len {
                break;
            }
            seq[i] += 1;
        }
    }
    out.sort();
    out
}

#[test]
fn enumeration_matches_brute_force() {
    for dim in 0..=3 {
        for w in 1..=7 {
            let mut got: Vec<Vec<Level>> = enumerate_squiggles(dim, w)
                .iter()
                .map(|s| s.levels().to_vec())
                .collect();
            got.sort();
            assert_eq!(got, brute_force(dim, w), "dim {dim} width {w}");
        }
    }
}

#[test]
fn vertices_are_one_per_odd_width() {
    for w in 1..=11 {
        let v = enumerate_squiggles(0, w);
        assert_eq!(v.len(), w.div_ceil(2));
        for (m, s) in v.iter().enumerate() {
            assert_eq!(*s, Squiggle::vertex_of(m));
        }
    }
}

fn face(s: &Squiggle, i: usize) -> Squiggle {
    s.face(i).unwrap()
}

fn degen(s: &Squiggle, i: usize) -> Squiggle {
    s.degeneracy(i).unwrap()
}

#[test]
fn simplicial_identities_exhaustive() {
    for dim in 0..=4 {
        for s in enumerate_squiggles(dim, 7) {
            let n = dim;
            for j in 0..=n {
                for i in 0..j {
                    if n >= 2 {
                        assert_eq!(
                            face(&face(&s, j), i),
                            face(&face(&s, i), j - 1),
                            "{s} d{i}d{j}"
                        );
                    }
                }
            }
            for j in 0..=n {
                let sj = degen(&s, j);
                assert_eq!(face(&sj, j), s);
                assert_eq!(face(&sj, j + 1), s);
                for i in 0..j {
                    assert_eq!(face(&sj, i), degen(&face(&s, i), j - 1));
                }
                for i in j + 2..=n + 1 {
                    assert_eq!(face(&sj, i), degen(&face(&s, i - 1), j));
                }
                for i in 0..=j {
                    assert_eq!(degen(&degen(&s, j), i), degen(&degen(&s, i), j + 1));
                }
            }
        }
    }
}

#[test]
fn cells_are_well_ordered() {
    let cells = enumerate_cells(9, 3);
    let index: HashMap<Squiggle, usize> = cells
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    for (k, c) in cells.iter().enumerate() {
        assert!(c.is_atomic() && c.is_nondegenerate() && !c.in_delta_plus_image());
        assert_eq!(c.final_vertex(), Squiggle::u(), "{c}");
        for (i, a) in attach(c, &index).unwrap().iter().enumerate() {
            if let Target::Cell(t) = a.target {
                assert!(t < k, "face {i} of {c} lands on a later cell");
            }
        }
    }
    let cx = build_cell_complex(9, 3).unwrap();
    assert!(cx.violations().is_empty());
    let classes: Vec<(usize, usize)> = cx
        .width_classes()
        .iter()
        .map(|(w, r)| (*w, r.len()))
        .collect();
    assert_eq!(classes, vec![(3, 2), (5, 17), (7, 117), (9, 685)]);
}

fn squiggle() -> impl Strategy<Value = Squiggle> {
    (0usize..=3, 1usize..=4).prop_flat_map(|(dim, half)| {
        let all = enumerate_squiggles(dim, 2 * half + 1);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

fn monotone(dom: usize, cod: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=cod as u32, dom + 1).prop_map(|mut v| {
        v.sort_unstable();
        v
    })
}

fn composable() -> impl Strategy<Value = (Squiggle, Vec<u32>, Vec<u32>)> {
    (squiggle(), 0usize..=3, 0usize..=3).prop_flat_map(|(s, p, q)| {
        let n = s.dim();
        (Just(s), monotone(p, n), monotone(q, p))
    })
}

proptest! {
    #[test]
    fn operators_compose((s, theta, phi) in composable()) {
        let composite: Vec<u32> = phi.iter().map(|&j| theta[j as usize]).collect();
        prop_assert_eq!(s.apply(&theta).unwrap().apply(&phi).unwrap(), s.apply(&composite).unwrap());
    }

    #[test]
    fn decompose_round_trips(s in squiggle()) {
        let (x, a) = s.decompose();
        prop_assert!(a.is_atomic());
        prop_assert_eq!(act(&x, &a).unwrap(), s);
    }

    #[test]
    fn normal_form_reconstructs(s in squiggle()) {
        let (core, theta) = s.degeneracy_normal_form();
        prop_assert!(core.is_nondegenerate());
        prop_assert_eq!(core.apply(&theta).unwrap(), s.clone());
        prop_assert_eq!(s.is_nondegenerate(), core.dim() == s.dim());
    }

    #[test]
    fn action_is_natural(s in squiggle(), k in 0usize..4, theta in monotone(2, 3)) {
        let plus = enumerate_plus_squiggles(s.dim(), 4);
        let x = &plus[k % plus.len()];
        let theta: Vec<u32> = theta.into_iter().map(|t| t.min(s.dim() as u32)).collect();
        let lhs = act(x, &s).unwrap().apply(&theta).unwrap();
        let rhs = act(&x.apply(&theta).unwrap(), &s.apply(&theta).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
