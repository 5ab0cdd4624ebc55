mod common;

use common::template;
use pcsp_core::csp::{Budget, Relation};
use pcsp_core::minion::{
    all_maps, build_free_template, check_dr_homomorphism, check_minion_homomorphism, check_minor_closure, compose_maps,
    enumerate_polymorphisms, free_relation, is_polymorphism, minor, polymorphism_violation, DictatorMinion,
    DrHomomorphismTable, FiniteFunction, IdentityMap, Minion, MinionSlice, PolymorphismMinion,
};
use proptest::prelude::*;

fn function(arity: usize, q: usize, out: usize) -> impl Strategy<Value = FiniteFunction> {
    proptest::collection::vec(0..out, q.pow(arity as u32))
        .prop_map(move |table| FiniteFunction::new(arity, q, out, table).unwrap())
}

proptest! {
    #[test]
    fn minors_compose(t in function(3, 2, 3), pi in proptest::collection::vec(0usize..2, 3), rho in proptest::collection::vec(0usize..3, 2)) {
        let two_step = minor(&minor(&t, &pi, 2).unwrap(), &rho, 3).unwrap();
        prop_assert_eq!(two_step, minor(&t, &compose_maps(&pi, &rho), 3).unwrap());
    }

    #[test]
    fn identity_minor_is_identity(t in function(3, 3, 2)) {
        prop_assert_eq!(minor(&t, &[0, 1, 2], 3).unwrap(), t);
    }

    #[test]
    fn minors_evaluate_by_precomposition(t in function(3, 2, 2), pi in proptest::collection::vec(0usize..2, 3), g in proptest::collection::vec(0usize..2, 2)) {
        let s = minor(&t, &pi, 2).unwrap();
        let point: Vec<usize> = pi.iter().map(|&y| g[y]).collect();
        prop_assert_eq!(s.eval(&g), t.eval(&point));
    }

    #[test]
    fn polymorphism_test_matches_brute_force(t in function(2, 2, 3)) {
        let tmpl = template(2, 3);
        let naive = common::naive_polymorphisms(tmpl.strict(), tmpl.relaxed(), 2);
        prop_assert_eq!(is_polymorphism(&t, &tmpl).unwrap(), naive.contains(&t.table().to_vec()));
    }
}

#[test]
fn golden_counts() {
    let count = |a, b, n| {
        enumerate_polymorphisms(&template(a, b), n, Budget::default())
            .unwrap()
            .len()
    };
    assert_eq!(count(2, 2, 1), 2);
    assert_eq!(count(2, 2, 2), 4);
    assert_eq!(count(2, 3, 1), 6);
    // self-dual functions: one free bit per complementary pair of points
    assert_eq!(count(2, 2, 3), 16);
    assert_eq!(count(3, 3, 1), 6);
}

#[test]
fn enumeration_matches_brute_force() {
    for (a, b, n) in [(2, 2, 3), (2, 3, 2), (3, 3, 2), (2, 4, 2)] {
        let t = template(a, b);
        let lib: Vec<Vec<usize>> = enumerate_polymorphisms(&t, n, Budget::default())
            .unwrap()
            .iter()
            .map(|f| f.table().to_vec())
            .collect();
        assert_eq!(
            lib,
            common::naive_polymorphisms(t.strict(), t.relaxed(), n),
            "K{a} -> K{b}, arity {n}"
        );
    }
}

#[test]
fn xor_breaks_neq() {
    let xor = FiniteFunction::from_fn(2, 2, 2, |x| x[0] ^ x[1]).unwrap();
    let v = polymorphism_violation(&xor, &template(2, 2)).unwrap().unwrap();
    assert_eq!(v.relation, "neq");
    assert_eq!(v.columns.len(), 2);
}

#[test]
fn majority_is_self_dual() {
    let maj = FiniteFunction::from_fn(3, 2, 2, |x| (x[0] + x[1] + x[2] >= 2) as usize).unwrap();
    assert!(is_polymorphism(&maj, &template(2, 2)).unwrap());
    assert_eq!(maj.essential_coordinates(), vec![0, 1, 2]);
    for t in enumerate_polymorphisms(&template(2, 2), 2, Budget::default()).unwrap() {
        assert_eq!(t.essential_coordinates().len(), 1);
    }
}

#[test]
fn closure_audits() {
    let pol = PolymorphismMinion {
        template: template(2, 3),
        budget: Budget::default(),
    };
    let slice = MinionSlice::from_minion(&pol, &[1, 2, 3]).unwrap();
    assert!(check_minor_closure(&slice).unwrap().is_none());
    let xor = FiniteFunction::from_fn(2, 2, 2, |x| x[0] ^ x[1]).unwrap();
    let lone = MinionSlice::new(2, 2, [1, 2], vec![xor]).unwrap();
    assert!(check_minor_closure(&lone).unwrap().is_some());
}

#[test]
fn identity_map_is_a_homomorphism() {
    let pol = PolymorphismMinion {
        template: template(2, 2),
        budget: Budget::default(),
    };
    let slice = MinionSlice::from_minion(&pol, &[1, 2]).unwrap();
    assert!(check_minion_homomorphism(&IdentityMap { r: 1 }, &slice)
        .unwrap()
        .is_none());
    assert!(check_dr_homomorphism(&IdentityMap { r: 1 }, &slice).unwrap().is_none());
}

#[test]
fn single_valued_tables_agree_with_the_minion_check() {
    // every table on Pol^(1)(K2,K2) ∪ Pol^(2)(K2,K2) into itself that is a
    // (1,1)-homomorphism is a minion homomorphism, and conversely
    let pol = PolymorphismMinion {
        template: template(2, 2),
        budget: Budget::default(),
    };
    let slice = MinionSlice::from_minion(&pol, &[1, 2]).unwrap();
    let (unary, binary) = (slice.at(1).to_vec(), slice.at(2).to_vec());
    for img1 in all_maps(unary.len(), unary.len()) {
        for img2 in all_maps(binary.len(), binary.len()) {
            let entries = unary
                .iter()
                .zip(&img1)
                .map(|(t, &i)| (t.clone(), vec![unary[i].clone()]))
                .chain(
                    binary
                        .iter()
                        .zip(&img2)
                        .map(|(t, &i)| (t.clone(), vec![binary[i].clone()])),
                );
            let table = DrHomomorphismTable::new(1, 1, entries).unwrap();
            let minion = check_minion_homomorphism(&table, &slice).unwrap().is_none();
            let dr = check_dr_homomorphism(&table, &slice).unwrap().is_none();
            assert_eq!(minion, dr, "images {img1:?} / {img2:?}");
        }
    }
}

#[test]
fn free_relations_of_dictators() {
    let dict = DictatorMinion { size: 3 };
    let neq = Relation::new(
        2,
        (0..3).flat_map(|a| (0..3).filter(move |&b| b != a).map(move |b| vec![a, b])),
    )
    .unwrap();
    let rel = free_relation(3, &dict, &neq).unwrap();
    // for dictators the free relation is a copy of the relation itself
    assert_eq!(rel.len(), 6);
    let template = build_free_template(2, 3, &dict, Some(&[neq])).unwrap();
    assert!(!template.template.strict().relations().is_empty());
}

#[test]
fn minion_membership() {
    let dict = DictatorMinion { size: 2 };
    let neg = FiniteFunction::from_fn(1, 2, 2, |x| 1 - x[0]).unwrap();
    assert!(!dict.contains(&neg).unwrap());
    let pol = PolymorphismMinion {
        template: template(2, 2),
        budget: Budget::default(),
    };
    assert!(pol.contains(&neg).unwrap());
    assert_eq!(dict.members(3).unwrap().len(), 3);
}
