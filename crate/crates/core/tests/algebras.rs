use std::sync::Arc;

use proptest::prelude::*;
use qcat::algebras::{
    ablation, em_compare, evaluate_algebras, induced_map, tower_projection, AlgebraConfig,
    EmMismatch,
};
use qcat::corpus;
use qcat::fincat::{FinCategory, Functor, MorId, ObjId};
use qcat::monad::{pointwise_monad, Monad, MonadMap};
use qcat::sset::{nerve, SMap, DEFAULT_SIMPLEX_CAP};

/// Simplex counts of the nerve of the Eilenberg-Moore category, from the
/// algebra laws and composable strings of algebra maps.
fn em_nerve_counts(m: &Monad, degree_max: usize) -> Vec<usize> {
    let c = m.base();
    let mut algs: Vec<(ObjId, MorId)> = Vec::new();
    for o in c.objects() {
        for &h in c.hom(m.ob(o), o) {
            let unit = c.comp(h, m.unit(o)) == c.identity(o);
            let assoc = c.comp(h, m.mor(h)) == c.comp(h, m.mult(o));
            if unit && assoc {
                algs.push((o, h));
            }
        }
    }
    let maps = |a: (ObjId, MorId), b: (ObjId, MorId)| -> usize {
        c.hom(a.0, b.0)
            .iter()
            .filter(|&&f| c.comp(f, a.1) == c.comp(b.1, m.mor(f)))
            .count()
    };
    // strings ending at each algebra, degree by degree
    let mut ending: Vec<usize> = vec![1; algs.len()];
    let mut out = vec![algs.len()];
    for _ in 1..=degree_max {
        ending = (0..algs.len())
            .map(|j| {
                (0..algs.len())
                    .map(|i| ending[i] * maps(algs[i], algs[j]))
                    .sum()
            })
            .collect();
        out.push(ending.iter().sum());
    }
    out
}

#[test]
fn corpus_monads_match_the_em_oracle() {
    let cfg = AlgebraConfig {
        width_max: 7,
        ..Default::default()
    };
    for e in corpus::monads() {
        let m = corpus::monad(e.name).unwrap();
        let res = evaluate_algebras(&m, &cfg).unwrap();
        assert!(res.stabilized, "{}", e.name);
        assert_eq!(res.counts(), em_nerve_counts(&m, 3), "{}", e.name);
        let cmp = em_compare(&res).unwrap();
        assert!(cmp.iso, "{}: {:?}", e.name, cmp.mismatch);
        assert!(res.forget.violations().is_empty());
    }
}

#[test]
fn identity_monads_give_the_base_nerve() {
    for name in ["identity-chain2", "identity-diamond", "identity-bz2"] {
        let m = corpus::monad(name).unwrap();
        let res = evaluate_algebras(
            &m,
            &AlgebraConfig {
                width_max: 5,
                ..Default::default()
            },
        )
        .unwrap();
        let base = nerve(m.base(), 3, DEFAULT_SIMPLEX_CAP).unwrap();
        assert_eq!(res.counts(), base.counts(), "{name}");
        assert!(res.forget.is_iso(), "{name}");
    }
}

#[test]
fn one_cell_short_is_not_an_equivalence() {
    let cfg = AlgebraConfig {
        width_max: 5,
        ..Default::default()
    };
    let a = ablation(&corpus::monad("chain-closure").unwrap(), &cfg, 10).unwrap();
    assert_eq!(a.cells_needed, Some(1));
    assert_eq!(
        a.one_short.unwrap().mismatch,
        Some(EmMismatch::NoStructureCell)
    );
    let a = ablation(&corpus::monad("z2-twist").unwrap(), &cfg, 10).unwrap();
    assert_eq!(a.cells_needed, Some(2));
    assert!(matches!(
        a.one_short.unwrap().mismatch,
        Some(EmMismatch::NotAnAlgebra { .. })
    ));
}

#[test]
fn tower_projections_are_simplicial() {
    let m = corpus::monad("diamond-closure").unwrap();
    let run = |k| {
        evaluate_algebras(
            &m,
            &AlgebraConfig {
                width_max: 7,
                cell_limit: Some(k),
                ..Default::default()
            },
        )
        .unwrap()
    };
    let (lo, hi) = (run(2), run(19));
    let p = tower_projection(&hi, &lo).unwrap();
    assert!(p.violations().is_empty());
    assert_eq!(hi.forget, p.then(&lo.forget).unwrap());
    assert!(tower_projection(&lo, &hi).is_err());
}

fn run(m: &Arc<Monad>) -> qcat::algebras::AlgebraResult {
    evaluate_algebras(
        m,
        &AlgebraConfig {
            width_max: 7,
            degree_max: 2,
            ..Default::default()
        },
    )
    .unwrap()
}

#[test]
fn identity_monad_map_induces_the_identity() {
    let m = corpus::monad("diamond-closure").unwrap();
    let a = run(&m);
    let f = induced_map(&MonadMap::identity(m), &a, &a).unwrap();
    assert_eq!(f, SMap::identity(a.algebras.clone()));
}

/// `u' ∘ f[t] = N(f) ∘ u`, and `f[t]` sends an algebra `(c, h)` to `(Fc, Fh)`.
fn check_natural(f: &MonadMap) {
    let (a, b) = (run(&f.dom), run(&f.cod));
    let ft = induced_map(f, &a, &b).unwrap();
    assert!(ft.violations().is_empty());
    let nf = SMap::of_functor(&f.functor, a.base.clone(), b.base.clone()).unwrap();
    assert_eq!(ft.then(&b.forget).unwrap(), a.forget.then(&nf).unwrap());
    let (ea, eb) = (em_compare(&a).unwrap(), em_compare(&b).unwrap());
    let em_b = f.cod.em_category().unwrap();
    let em_a = f.dom.em_category().unwrap();
    for v in 0..a.algebras.count(0) as u32 {
        let h = a.structure_map(v).unwrap();
        let w = ft.at(0, v);
        assert_eq!(b.structure_map(w), Some(f.functor.mor(h)));
        let (ia, ib) = (
            ea.map.as_ref().unwrap().at(0, v),
            eb.map.as_ref().unwrap().at(0, w),
        );
        let (ca, ha) = em_a.algebras[ia as usize];
        assert_eq!(
            em_b.find_algebra(f.functor.ob(ca), f.functor.mor(ha)),
            Some(ib)
        );
    }
}

#[test]
fn diagonal_into_pointwise_monad() {
    let m = corpus::monad("chain-closure").unwrap();
    let shape = corpus::category("discrete2").unwrap();
    let pm = pointwise_monad(&m, &shape, 10_000).unwrap();
    check_natural(&pm.diagonal);
    let (a, b) = (run(&pm.diagonal.dom), run(&pm.diagonal.cod));
    assert_eq!(
        b.algebras.count(0),
        a.algebras.count(0) * a.algebras.count(0)
    );
}

#[test]
fn inclusion_of_a_closed_subposet() {
    let big = corpus::monad("chain4-closure").unwrap();
    let c4 = big.base().clone();
    let keep: Vec<ObjId> = ["c", "d"]
        .iter()
        .map(|s| c4.find_object(s).unwrap())
        .collect();
    let small_cat = Arc::new(c4.full_subcategory("cd", &keep).unwrap());
    let map: Vec<ObjId> = vec![1, 1];
    let small = Arc::new(Monad::closure("cd-closure", small_cat.clone(), &map).unwrap());
    let inc = Functor::from_object_map(small_cat, c4, keep).unwrap();
    check_natural(&MonadMap::new(small, big, inc).unwrap());
}

fn chain_closure() -> impl Strategy<Value = (usize, Vec<bool>)> {
    (2usize..=4).prop_flat_map(|n| (Just(n), prop::collection::vec(any::<bool>(), n - 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Closure operators on a chain: fixed points are any subset containing the top.
    #[test]
    fn random_chain_closures((n, fixed) in chain_closure()) {
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let base = Arc::new(FinCategory::chain("c", &refs).unwrap());
        let is_fixed = |i: usize| i == n - 1 || fixed[i];
        let map: Vec<ObjId> = (0..n).map(|i| (i..n).find(|&j| is_fixed(j)).unwrap() as ObjId).collect();
        let m = Arc::new(Monad::closure("c", base, &map).unwrap());
        let res = evaluate_algebras(&m, &AlgebraConfig { width_max: 7, ..Default::default() }).unwrap();
        prop_assert!(res.stabilized);
        prop_assert_eq!(res.counts(), em_nerve_counts(&m, 3));
        let k = (0..n).filter(|&i| is_fixed(i)).count();
        prop_assert_eq!(res.algebras.count(0), k);
        prop_assert!(em_compare(&res).unwrap().iso);
    }
}
