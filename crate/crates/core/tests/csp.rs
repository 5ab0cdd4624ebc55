mod common;

use common::{k, neq_instances, template};
use pcsp_core::csp::{
    all_solutions, brute_force_solve, check_homomorphism, evaluate, find_homomorphism, mcsp_structure,
    partial_solutions, Assignment, Budget, Constraint, Instance, PcspTemplate, Solver,
};
use pcsp_core::Error;
use proptest::prelude::*;

fn cycle(n: usize) -> Instance {
    let constraints = (0..n)
        .map(|i| Constraint {
            scope: vec![i, (i + 1) % n],
            relation: "neq".into(),
        })
        .collect();
    Instance::new(common::vars(n), constraints).unwrap()
}

#[test]
fn odd_cycles_need_three_colours() {
    assert!(brute_force_solve(&cycle(5), &k(2)).unwrap().is_none());
    let f = brute_force_solve(&cycle(5), &k(3)).unwrap().unwrap();
    assert_eq!(f.values, vec![0, 1, 0, 1, 2]);
    assert!(brute_force_solve(&cycle(4), &k(2)).unwrap().is_some());
}

#[test]
fn triangle_has_six_colourings() {
    let sols = all_solutions(&cycle(3), &k(3)).unwrap();
    assert_eq!(sols.len(), 6);
    assert!(sols.windows(2).all(|w| w[0].values < w[1].values));
}

#[test]
fn loops_are_unsatisfiable() {
    let inst = Instance::from_labels(&["x"], &[(&["x", "x"], "neq")]).unwrap();
    assert!(brute_force_solve(&inst, &k(5)).unwrap().is_none());
    assert!(Solver::default().find_any(&inst, &k(5)).unwrap().is_none());
}

#[test]
fn homomorphisms_between_cliques() {
    assert!(find_homomorphism(&k(2), &k(3), Budget::default()).unwrap().is_some());
    assert!(find_homomorphism(&k(3), &k(2), Budget::default()).unwrap().is_none());
    assert!(check_homomorphism(&[0, 1], &k(2), &k(2)).unwrap());
    assert!(!check_homomorphism(&[0, 0], &k(2), &k(2)).unwrap());
}

#[test]
fn template_needs_a_homomorphism() {
    assert!(PcspTemplate::new(k(2), k(3)).is_ok());
    assert!(PcspTemplate::new(k(3), k(2)).is_err());
}

#[test]
fn evaluate_lists_violations() {
    let bad = evaluate(&cycle(4), &k(2), &Assignment::new(vec![0, 0, 1, 1])).unwrap();
    assert_eq!(bad, vec![0, 2]);
}

#[test]
fn unknown_relation_and_variable_are_rejected() {
    let inst = Instance::from_labels(&["x", "y"], &[(&["x", "y"], "lt")]).unwrap();
    assert!(brute_force_solve(&inst, &k(2)).is_err());
    assert!(Instance::from_labels(&["x"], &[(&["x", "z"], "neq")]).is_err());
    assert!(Instance::new(vec!["x".into(), "x".into()], vec![]).is_err());
}

#[test]
fn budget_is_enforced() {
    let err = Solver::new(Budget::new(3)).solve(&cycle(5), &k(2)).unwrap_err();
    assert!(matches!(err.root(), Error::Resource(_)));
}

#[test]
fn mcsp_structure_lists_every_relation() {
    assert_eq!(mcsp_structure(2, 1).unwrap().relations().len(), 3);
    assert_eq!(mcsp_structure(2, 2).unwrap().relations().len(), 3 + 15);
    assert!(mcsp_structure(2, 1).unwrap().relation("{0|1}").is_some());
}

#[test]
fn partial_solutions_of_a_path() {
    let inst = Instance::from_labels(&["a", "b", "c"], &[(&["a", "b"], "neq"), (&["b", "c"], "neq")]).unwrap();
    let on_ac = partial_solutions(&inst, &k(2), &[0, 2], Budget::default()).unwrap();
    // no constraint lies inside {a, c}
    assert_eq!(on_ac.len(), 4);
    assert_eq!(
        partial_solutions(&inst, &k(2), &[0, 1, 2], Budget::default()).unwrap(),
        vec![vec![0, 1, 0], vec![1, 0, 1]]
    );
}

#[test]
fn find_any_agrees_on_small_graphs() {
    for n in 1..=3 {
        for inst in neq_instances(n) {
            for q in 2..=3 {
                let a = brute_force_solve(&inst, &k(q)).unwrap().is_some();
                let b = Solver::default().find_any(&inst, &k(q)).unwrap();
                assert_eq!(a, b.is_some());
                if let Some(f) = b {
                    assert!(evaluate(&inst, &k(q), &f).unwrap().is_empty());
                }
            }
        }
    }
}

fn random_graph() -> impl Strategy<Value = Instance> {
    (2usize..7).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..12).prop_map(move |edges| {
            let constraints = edges
                .into_iter()
                .map(|(a, b)| Constraint {
                    scope: vec![a, b],
                    relation: "neq".into(),
                })
                .collect();
            Instance::new(common::vars(n), constraints).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn colour_permutations_preserve_solutions(inst in random_graph(), shift in 1usize..3) {
        for f in all_solutions(&inst, &k(3)).unwrap() {
            let g = Assignment::new(f.values.iter().map(|&c| (c + shift) % 3).collect());
            prop_assert!(evaluate(&inst, &k(3), &g).unwrap().is_empty());
        }
    }

    #[test]
    fn strict_solutions_map_to_relaxed_ones(inst in random_graph()) {
        let t = template(2, 3);
        let h = find_homomorphism(t.strict(), t.relaxed(), Budget::default()).unwrap().unwrap();
        if let Some(f) = brute_force_solve(&inst, t.strict()).unwrap() {
            prop_assert!(evaluate(&inst, t.relaxed(), &f.compose(&h)).unwrap().is_empty());
        }
    }
}
