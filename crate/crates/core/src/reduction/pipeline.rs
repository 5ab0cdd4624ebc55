//! The full reduction between PCSP templates, and decoding of relaxed
//! solutions back into PAS sequences.

use std::collections::BTreeSet;

use serde::Serialize;

use super::auxiliary::{build_auxiliary, AuxiliaryInstance, CMode};
use super::longcode::{longcode_reduce, LongCode};
use crate::csp::{evaluate, Assignment, Budget, Instance, PcspTemplate};
use crate::error::{Error, Result};
use crate::minion::{
    decode_partial_map_constraint, is_polymorphism, FiniteFunction, PolymorphismMinion, SetValuedMinionMap,
};
use crate::pas::{check_consistent, Consistency, GapParameters, ParamInt, Pas, PasSequence};
use crate::subset::{k_subsets, Subset};

/// What a pipeline run produced, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineMetadata {
    pub arities: Vec<usize>,
    pub c_size: usize,
    pub mode: CMode,
    pub d: usize,
    pub r: usize,
    pub m: usize,
    pub auxiliary_variables: usize,
    pub auxiliary_constraints: usize,
    pub cloud_sizes: Vec<usize>,
    pub output_variables: usize,
    pub output_constraints: usize,
}

#[derive(Clone, Debug)]
pub struct Pipeline {
    pub auxiliary: AuxiliaryInstance,
    pub longcode: LongCode,
    pub metadata: PipelineMetadata,
}

/// Reduces `phi` over `source = (A2, B2)` to an instance over
/// `target = (A1, B1)`, given a `(d, r)`-homomorphism from polymorphisms of
/// the target to those of the source.
///
/// `params` must be the gap parameters for `|B2|`, the largest arity of
/// `A2`, and `r + 1` copies of `d`.
pub fn pipeline_reduce<T: ParamInt>(
    phi: &Instance,
    source: &PcspTemplate,
    target: &PcspTemplate,
    map: &dyn SetValuedMinionMap,
    params: &GapParameters<T>,
    mode: CMode,
    budget: Budget,
) -> Result<Pipeline> {
    check_params(source, map, params).map_err(Error::in_stage("parameters"))?;
    let n = phi.num_variables();
    let arities = params.arities_capped(n.max(1));
    let auxiliary =
        build_auxiliary(phi, source.strict(), &arities, mode, budget).map_err(Error::in_stage("auxiliary"))?;
    let longcode = longcode_reduce(&auxiliary.instance, &auxiliary.free_strict, target, budget)
        .map_err(Error::in_stage("longcode"))?;
    let metadata = PipelineMetadata {
        arities: auxiliary.arities.clone(),
        c_size: auxiliary.c_size,
        mode,
        d: map.d(),
        r: map.r(),
        m: params.m,
        auxiliary_variables: auxiliary.instance.num_variables(),
        auxiliary_constraints: auxiliary.instance.constraints().len(),
        cloud_sizes: longcode.layout.clouds.iter().map(|c| c.size).collect(),
        output_variables: longcode.instance.num_variables(),
        output_constraints: longcode.instance.constraints().len(),
    };
    Ok(Pipeline {
        auxiliary,
        longcode,
        metadata,
    })
}

fn check_params<T: ParamInt>(
    source: &PcspTemplate,
    map: &dyn SetValuedMinionMap,
    params: &GapParameters<T>,
) -> Result<()> {
    let b2 = source.relaxed().domain_size();
    let m = source.strict().max_arity();
    if params.domain_size != b2 || params.m != m {
        return Err(Error::parameter(format!(
            "parameters are for |A| = {}, m = {}; the source template needs |A| = {b2}, m = {m}",
            params.domain_size, params.m
        )));
    }
    let (d, r) = (map.d(), map.r());
    if params.values.len() != r + 1 || params.values.iter().any(|&v| v != d) {
        return Err(Error::parameter(format!(
            "values {:?} should be {} copies of d = {d}",
            params.values,
            r + 1
        )));
    }
    Ok(())
}

/// `q(Z)` for the matrix whose columns are `columns`, each of length `rows`:
/// row `u` is the point `f ↦ f[u]`.
pub fn apply_to_rows(q: &FiniteFunction, columns: &[Vec<usize>], rows: usize) -> Vec<usize> {
    let mut point = vec![0usize; columns.len()];
    (0..rows)
        .map(|u| {
            for (slot, col) in point.iter_mut().zip(columns) {
                *slot = col[u];
            }
            q.eval(&point)
        })
        .collect()
}

/// Turns a solution of the output over `B1` into a PAS sequence for `phi`
/// over `B2`, with value at most `d`, checking every step on the way.
#[allow(clippy::too_many_arguments)]
pub fn decode_relaxed_solution(
    aux: &AuxiliaryInstance,
    longcode: &LongCode,
    solution: &[usize],
    phi: &Instance,
    source: &PcspTemplate,
    target: &PcspTemplate,
    map: &dyn SetValuedMinionMap,
    budget: Budget,
) -> Result<PasSequence> {
    let layout = &longcode.layout;
    let b1 = target.relaxed();
    let violated = evaluate(&longcode.instance, b1, &Assignment::new(solution.to_vec()))?;
    if let Some(&i) = violated.first() {
        return Err(Error::input(format!(
            "the assignment violates {} output constraints, the first being {i}",
            violated.len()
        )));
    }
    let psi = &aux.instance;
    let mut cloud_fns = Vec::with_capacity(psi.num_variables());
    for v in 0..psi.num_variables() {
        let ci = layout
            .variable_cloud(v)
            .ok_or_else(|| Error::input(format!("no cloud for `{}`", psi.variables()[v])))?;
        let s = layout.cloud_function(ci, b1.domain_size(), solution)?;
        if !is_polymorphism(&s, target)? {
            return Err(Error::ConstraintViolation(format!(
                "the cloud of `{}` does not carry a polymorphism",
                psi.variables()[v]
            )));
        }
        cloud_fns.push(s);
    }

    // decode every partial-map constraint; decodings must agree on shared variables
    let minion = PolymorphismMinion {
        template: target.clone(),
        budget,
    };
    let mut decoded: Vec<Option<FiniteFunction>> = vec![None; psi.num_variables()];
    for link in &aux.links {
        let (u, w) = (link.from, link.to);
        let c1: Vec<usize> = (0..aux.partial[u].len()).collect();
        let c2: Vec<usize> = (0..aux.partial[w].len()).collect();
        let pair = decode_partial_map_constraint(&cloud_fns[u], &cloud_fns[w], &c1, &c2, &link.map, &minion)?;
        let Some((t1, t2)) = pair else {
            return Err(Error::ConstraintViolation(format!(
                "no decoding for the constraint ({}, {})",
                psi.variables()[u],
                psi.variables()[w]
            )));
        };
        for (v, t) in [(u, t1), (w, t2)] {
            match &decoded[v] {
                Some(prev) if *prev != t => {
                    return Err(Error::internal(format!(
                        "two decodings of `{}` differ",
                        psi.variables()[v]
                    )))
                }
                _ => decoded[v] = Some(t),
            }
        }
    }

    let (a2, b2) = (source.strict(), source.relaxed());
    let n = aux.num_source_variables;
    let mut images: Vec<Vec<Vec<usize>>> = Vec::with_capacity(psi.num_variables());
    for (v, t) in decoded.into_iter().enumerate() {
        let t = t.ok_or_else(|| Error::internal(format!("`{}` is in no constraint", psi.variables()[v])))?;
        let u = aux.sets[v];
        let qs = crate::minion::checked_image(map, &t)?;
        let mut out = BTreeSet::new();
        for q in qs {
            if q.in_size() != a2.domain_size() || q.out_size() != b2.domain_size() {
                return Err(Error::structural(format!(
                    "an image maps {} values to {}, the source template maps {} to {}",
                    q.in_size(),
                    q.out_size(),
                    a2.domain_size(),
                    b2.domain_size()
                )));
            }
            let g = apply_to_rows(&q, &aux.partial[v], u.len());
            check_partial_solution(phi, source, u, &g)?;
            out.insert(g);
        }
        images.push(out.into_iter().collect());
    }

    let systems = aux
        .arities
        .iter()
        .map(|&k| {
            let entries: Vec<(Subset, Vec<Vec<usize>>)> = k_subsets(n, k)
                .map(|u| {
                    let v = aux.variable_of(u).expect("every k-subset is a variable");
                    (u, images[v].clone())
                })
                .collect();
            Pas::new(n, b2.domain_size(), k, entries)
        })
        .collect::<Result<Vec<_>>>()?;
    let seq = PasSequence::new(systems)?;
    if let Consistency::Violated(chain) = check_consistent(&seq)? {
        return Err(Error::internal(format!(
            "decoded sequence is inconsistent at chain {chain:?}"
        )));
    }
    Ok(seq)
}

fn check_partial_solution(phi: &Instance, source: &PcspTemplate, u: Subset, g: &[usize]) -> Result<()> {
    let b2 = source.relaxed();
    let mut buf = Vec::new();
    for (i, c) in phi.constraints().iter().enumerate() {
        if !c.scope.iter().all(|&v| u.contains(v)) {
            continue;
        }
        buf.clear();
        buf.extend(c.scope.iter().map(|&v| g[u.rank_of(v).expect("scope inside U")]));
        if !b2.relations()[&c.relation].contains(&buf) {
            return Err(Error::internal(format!(
                "decoded map {g:?} on {u:?} violates constraint {i}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::tests::k;
    use crate::csp::{brute_force_solve, Solver};
    use crate::minion::{minor, IdentityMap};
    use crate::pas::{extract_solution, gap_parameters};
    use crate::reduction::lift_strict_solution;
    use crate::subset::{all_tuples, project};

    fn k2k2() -> PcspTemplate {
        PcspTemplate::new(k(2), k(2)).unwrap()
    }

    #[test]
    fn identity_pipeline_on_an_edge() {
        let phi = Instance::from_labels(&["x", "y", "z"], &[(&["x", "y"], "neq")]).unwrap();
        let params = gap_parameters(2, 2, &[1, 1]).unwrap();
        let map = IdentityMap { r: 1 };
        let p = pipeline_reduce(&phi, &k2k2(), &k2k2(), &map, &params, CMode::Fitted, Budget::default()).unwrap();
        assert_eq!(p.metadata.arities, vec![3, 3]);
        assert_eq!(p.metadata.c_size, 4);

        let h = brute_force_solve(&phi, &k(2)).unwrap().unwrap();
        let s = p.auxiliary.encode(&h.values).unwrap();
        let lifted =
            lift_strict_solution(&p.auxiliary.instance, &p.auxiliary.free_strict, &p.longcode.layout, &s).unwrap();
        let seq = decode_relaxed_solution(
            &p.auxiliary,
            &p.longcode,
            &lifted,
            &phi,
            &k2k2(),
            &k2k2(),
            &map,
            Budget::default(),
        )
        .unwrap();
        // dictators decode to the restrictions of h
        assert_eq!(seq.systems()[0], Pas::restrictions(2, 3, &h.values).unwrap());

        let any = Solver::default()
            .find_any(&p.longcode.instance, &k(2))
            .unwrap()
            .unwrap();
        let seq = decode_relaxed_solution(
            &p.auxiliary,
            &p.longcode,
            &any.values,
            &phi,
            &k2k2(),
            &k2k2(),
            &map,
            Budget::default(),
        )
        .unwrap();
        let ex = extract_solution(&seq, &params, 2).unwrap();
        assert!(evaluate(&phi, &k(2), &Assignment::new(ex.solution)).unwrap().is_empty());
    }

    #[test]
    fn parameter_mismatch_is_tagged() {
        let phi = Instance::from_labels(&["x", "y"], &[(&["x", "y"], "neq")]).unwrap();
        let params = gap_parameters(2, 1, &[1, 1]).unwrap();
        let err = pipeline_reduce(
            &phi,
            &k2k2(),
            &k2k2(),
            &IdentityMap { r: 1 },
            &params,
            CMode::Fitted,
            Budget::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Stage {
                stage: "parameters",
                ..
            }
        ));
        let triangle = Instance::from_labels(
            &["a", "b", "c"],
            &[(&["a", "b"], "neq"), (&["b", "c"], "neq"), (&["a", "c"], "neq")],
        )
        .unwrap();
        let params = gap_parameters(2, 2, &[1, 1]).unwrap();
        let err = pipeline_reduce(
            &triangle,
            &k2k2(),
            &k2k2(),
            &IdentityMap { r: 1 },
            &params,
            CMode::Fitted,
            Budget::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Stage { stage: "auxiliary", .. }));
        assert!(matches!(err.root(), Error::PromiseViolation(_)));
    }

    #[test]
    fn minors_commute_with_row_application() {
        // proj_W q(Z_U) = q'(Z_W) whenever q --π--> q', π the restriction D_U -> D_W
        let domain_u: Vec<Vec<usize>> = vec![vec![0, 0, 1], vec![0, 1, 1], vec![1, 0, 0]];
        let (u, w) = (Subset::full(3), Subset::from_indices([0, 2]));
        let mut domain_w: Vec<Vec<usize>> = domain_u.iter().map(|g| project(g, u, w)).collect();
        domain_w.sort();
        domain_w.dedup();
        let pi: Vec<usize> = domain_u
            .iter()
            .map(|g| domain_w.binary_search(&project(g, u, w)).unwrap())
            .collect();
        for table in all_tuples(2, 8) {
            let q = FiniteFunction::new(3, 2, 2, table).unwrap();
            let q2 = minor(&q, &pi, domain_w.len()).unwrap();
            let lhs = project(&apply_to_rows(&q, &domain_u, 3), u, w);
            assert_eq!(lhs, apply_to_rows(&q2, &domain_w, 2));
        }
    }
}
