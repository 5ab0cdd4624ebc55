mod common;

use common::{data, k, template};
use pcsp_core::csp::{mcsp_structure, Assignment, Budget, Instance, Side};
use pcsp_core::format::*;
use pcsp_core::labelcover::reduce_mcsp_to_llc;
use pcsp_core::minion::{DrHomomorphismTable, FiniteFunction, IdentityMap, MinionSlice, PolymorphismMinion};
use pcsp_core::pas::{gap_parameters, Pas, PasSequence};
use pcsp_core::reduction::{pipeline_reduce, CMode};
use serde_json::json;

#[test]
fn canonical_sorts_keys_and_ends_with_newline() {
    let v: serde_json::Value = serde_json::from_str(r#"{"b": 1, "a": [2, 3]}"#).unwrap();
    let text = canonical(&v);
    assert!(text.ends_with('\n'));
    assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
    let again: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(canonical(&again), text);
}

#[test]
fn structures_and_templates_round_trip() {
    let s = mcsp_structure(2, 2).unwrap();
    assert_eq!(structure_from_json(&structure_to_json(&s)).unwrap(), s);
    let t = template(2, 3);
    let back = template_from_json(&template_to_json(&t)).unwrap();
    assert_eq!(back.strict(), t.strict());
    assert_eq!(back.relaxed(), t.relaxed());
    // a bare structure reads as the template (S, S)
    let bare = template_from_json(&read_json(&data("k2.json")).unwrap()).unwrap();
    assert_eq!(bare.strict(), bare.relaxed());
}

#[test]
fn instances_and_assignments_round_trip() {
    let inst = instance_from_json(&read_json(&data("c5.json")).unwrap()).unwrap();
    assert_eq!(inst.num_variables(), 5);
    assert_eq!(instance_from_json(&instance_to_json(&inst)).unwrap(), inst);
    let f = Assignment::new(vec![0, 1, 0, 1, 2]);
    let domain = k(3).domain().to_vec();
    let v = assignment_to_json(&inst, &domain, Some(Side::Relaxed), &f);
    assert_eq!(
        assignment_from_json(&v, &inst, &domain).unwrap(),
        (Some(Side::Relaxed), f)
    );
}

#[test]
fn malformed_files_are_input_errors() {
    let err = instance_from_json(&json!({"variables": ["x"], "constraints": [{"scope": ["y"], "relation": "r"}]}))
        .unwrap_err();
    assert!(matches!(
        err.root(),
        pcsp_core::Error::Input(_) | pcsp_core::Error::Structural(_)
    ));
    assert!(structure_from_json(&json!({"domain": ["0"], "relations": {}, "extra": 1})).is_err());
    assert!(params_from_json(&json!([1, 2])).is_err());
}

#[test]
fn pas_sequences_round_trip() {
    let seq = PasSequence::new(vec![
        Pas::from_fn(4, 2, 3, |u| vec![vec![0; 3], vec![u.0 as usize % 2, 1, 0]]).unwrap(),
        Pas::restrictions(2, 2, &[0, 1, 1, 0]).unwrap(),
    ])
    .unwrap();
    let labels = PasLabels::numbered(4, 2);
    let v = pas_sequence_to_json(&seq, &labels);
    assert_eq!(pas_sequence_from_json(&v).unwrap(), (seq.clone(), labels.clone()));
    let single = pas_to_json(&seq.systems()[1], &labels);
    assert_eq!(pas_from_json(&single).unwrap().0, seq.systems()[1]);
}

#[test]
fn functions_round_trip() {
    let t = FiniteFunction::from_fn(2, 2, 3, |x| x[0] + x[1]).unwrap();
    let labels = FunctionLabels::numbered(2, k(2).domain(), k(3).domain());
    let v = function_to_json(&t, &labels);
    assert_eq!(function_from_json(&v).unwrap(), (t.clone(), labels));
    assert_eq!(function_for_template(&v, &template(2, 3)).unwrap(), t);
    assert!(function_for_template(&v, &template(2, 2)).is_err());
}

#[test]
fn dr_tables_round_trip() {
    let t = template(2, 2);
    let pol = PolymorphismMinion {
        template: t.clone(),
        budget: Budget::default(),
    };
    let slice = MinionSlice::from_minion(&pol, &[1, 2]).unwrap();
    let table = DrHomomorphismTable::new(1, 1, slice.iter().map(|f| (f.clone(), vec![f.clone()]))).unwrap();
    let v = dr_table_to_json(&table, &t, &t);
    let back = dr_table_from_json(&v, &t, &t).unwrap();
    for f in slice.iter() {
        assert_eq!(back.image(f).unwrap(), vec![f.clone()]);
    }
    let builtin = dr_table_from_json(&read_json(&data("identity.json")).unwrap(), &t, &t).unwrap();
    assert_eq!((builtin.d(), builtin.r()), (1, 1));
}

#[test]
fn llc_round_trip() {
    let inst = instance_from_json(&read_json(&data("c5.json")).unwrap()).unwrap();
    let red = reduce_mcsp_to_llc(&inst, &k(3), &[3, 2], Budget::default()).unwrap();
    // the reader numbers variables layer by layer, so compare files
    let v = llc_to_json(&red.instance);
    let back = llc_from_json(&v).unwrap();
    assert_eq!(llc_to_json(&back), v);
    assert_eq!(back.num_variables(), red.instance.num_variables());
    assert_eq!(back.constraints().count(), red.instance.constraints().count());
}

#[test]
fn layouts_round_trip() {
    let t = template(2, 2);
    let phi = Instance::from_labels(&["x", "y", "z"], &[(&["x", "y"], "neq")]).unwrap();
    let params = gap_parameters(2, 2, &[1, 1]).unwrap();
    let p = pipeline_reduce(
        &phi,
        &t,
        &t,
        &IdentityMap { r: 1 },
        &params,
        CMode::Fitted,
        Budget::default(),
    )
    .unwrap();
    let v = layout_to_json(&phi, t.strict(), &p.auxiliary, &p.longcode.layout);
    let (aux, layout) = layout_from_json(&v, &phi, t.strict()).unwrap();
    assert_eq!(layout, p.longcode.layout);
    assert_eq!(aux.sets, p.auxiliary.sets);
    assert_eq!(aux.instance, p.auxiliary.instance);
}

#[test]
fn parameter_requests() {
    let r = params_from_json(&json!({"k": [3, "2"]})).unwrap();
    assert_eq!(r.k, Some(vec![3, 2]));
    let full = gap_parameters(2, 1, &[1, 1]).unwrap().to_json();
    let r = params_from_json(&full).unwrap();
    assert_eq!((r.domain_size, r.m, r.values), (Some(2), Some(1), Some(vec![1, 1])));
    assert!(params_from_json(&json!({"k": ["99999999999999999999999"]})).is_err());
}
