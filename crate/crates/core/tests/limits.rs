use std::sync::Arc;

use proptest::prelude::*;
use qcat::algebras::{evaluate_algebras, AlgebraConfig};
use qcat::corpus;
use qcat::fincat::FinCategory;
use qcat::limits::{comma, has_limits_of_shape, is_initial, is_terminal, terminal_vertices};
use qcat::sset::{is_isofibration, is_quasi_category, nerve, SMap, SSet, DEFAULT_SIMPLEX_CAP};

/// A random poset on `n` elements: `i < j` only when `i < j` as integers.
fn poset() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..=4).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let k = pairs.len();
        (Just(n), prop::collection::vec(any::<bool>(), k)).prop_map(move |(n, keep)| {
            let covers = pairs
                .iter()
                .zip(keep)
                .filter(|(_, k)| *k)
                .map(|(p, _)| *p)
                .collect();
            (n, covers)
        })
    })
}

fn build(n: usize, covers: &[(usize, usize)]) -> (FinCategory, Vec<Vec<bool>>) {
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let cov: Vec<(String, String)> = covers
        .iter()
        .map(|&(a, b)| (names[a].clone(), names[b].clone()))
        .collect();
    let c = FinCategory::poset_owned("p", &names, &cov).unwrap();
    let mut le = vec![vec![false; n]; n];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in covers {
        le[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    (c, le)
}

fn nerve_arc(c: FinCategory) -> Arc<SSet> {
    Arc::new(nerve(&Arc::new(c), 3, DEFAULT_SIMPLEX_CAP).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn terminal_iff_top((n, covers) in poset()) {
        let (c, le) = build(n, &covers);
        let a = nerve_arc(c);
        for v in 0..n {
            let top = (0..n).all(|w| le[w][v]);
            let bottom = (0..n).all(|w| le[v][w]);
            prop_assert_eq!(is_terminal(&a, v as u32, 3).unwrap(), top);
            prop_assert_eq!(is_initial(&a, v as u32, 3).unwrap(), bottom);
        }
    }

    #[test]
    fn binary_limits_are_meets((n, covers) in poset()) {
        let (c, le) = build(n, &covers);
        let a = nerve_arc(c);
        let x = nerve_arc(corpus::category("discrete2").unwrap());
        let r = has_limits_of_shape(&a, &x, 3).unwrap();
        prop_assert_eq!(r.diagrams.len(), n * n);
        for d in &r.diagrams {
            let parts: Vec<usize> = d.diagram.trim_matches(['[', ']']).split(',')
                .map(|s| s.trim_start_matches('p').parse().unwrap()).collect();
            let (p, q) = (parts[0], parts[1]);
            let lower: Vec<usize> = (0..n).filter(|&w| le[w][p] && le[w][q]).collect();
            let glb = lower.iter().copied().find(|&g| lower.iter().all(|&w| le[w][g]));
            prop_assert_eq!(d.apex.map(|v| v as usize), glb, "{}", d.diagram);
        }
    }

    #[test]
    fn comma_of_identities_has_the_arrows_as_objects((n, covers) in poset()) {
        let (c, le) = build(n, &covers);
        let a = nerve_arc(c);
        let id = SMap::identity(a.clone());
        let k = comma(&id, &id, DEFAULT_SIMPLEX_CAP).unwrap();
        prop_assert_eq!(k.space.count(0), a.count(1));
        let mut ends: Vec<(u32, u32)> = (0..k.space.count(0) as u32).map(|v| (k.p0.at(0, v), k.p1.at(0, v))).collect();
        prop_assert!(ends.iter().all(|&(x, y)| le[x as usize][y as usize]));
        ends.sort_unstable();
        ends.dedup();
        prop_assert_eq!(ends.len(), a.count(1));
        let tops: Vec<u32> = terminal_vertices(&k.space, 3);
        let atops = terminal_vertices(&a, 3);
        prop_assert_eq!(tops.len(), atops.len());
    }
}

#[test]
fn forgetful_maps_are_isofibrations() {
    for name in [
        "chain-closure",
        "diamond-closure",
        "z2-twist",
        "identity-bz2",
    ] {
        let m = corpus::monad(name).unwrap();
        let res = evaluate_algebras(
            &m,
            &AlgebraConfig {
                width_max: 7,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(is_quasi_category(&res.algebras, 3), "{name}");
        assert!(is_isofibration(&res.forget, 3), "{name}");
    }
}

#[test]
fn lifting_along_an_upper_inclusion() {
    use qcat::fincat::Functor;
    use qcat::limits::{absolute_right_lifting, Lifting};
    use qcat::sset::standard_simplex;

    let c3 = Arc::new(corpus::category("chain3").unwrap());
    let bc = Arc::new(FinCategory::chain("bc", &["b", "c"]).unwrap());
    let inc = Functor::from_object_map(bc.clone(), c3.clone(), vec![1, 2]).unwrap();
    let (nb, na) = (nerve_arc((*bc).clone()), nerve_arc((*c3).clone()));
    let f = SMap::of_functor(&inc, nb.clone(), na.clone()).unwrap();
    let pt = Arc::new(standard_simplex(0, 3));
    let g = SMap::constant(pt.clone(), na.clone(), 0);
    // nothing in {b, c} lies below a
    assert!(matches!(absolute_right_lifting(&f, &g, 3).unwrap(), Lifting::Refusal { .. }));
    let (nb_op, na_op) = (Arc::new(nb.opposite()), Arc::new(na.opposite()));
    let f_op = f.opposite_between(nb_op.clone(), na_op.clone());
    let g_op = SMap::constant(pt, na_op, 0);
    let cert = absolute_right_lifting(&f_op, &g_op, 3).unwrap();
    let lift = cert.certificate().expect("the dual lifting exists").lift(0).unwrap();
    assert_eq!(nb_op.vertex_label(lift), "b");
}
