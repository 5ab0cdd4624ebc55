//! Polymorphisms of a PCSP template.

use std::collections::BTreeSet;

use super::{table_len, FiniteFunction};
use crate::csp::{Budget, Constraint, Instance, PcspTemplate, Relation, Solver};
use crate::error::{Error, Result};

/// A matrix with columns in a strict relation whose rows are mapped outside
/// the relaxed relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolymorphismViolation {
    pub relation: String,
    /// One strict tuple per coordinate of the arity set.
    pub columns: Vec<Vec<usize>>,
}

/// Calls `visit(rows)` for every matrix with columns in `rel`, where row `j`
/// is given by its table index; stops when `visit` returns false.
pub(crate) fn for_each_matrix(
    rel: &Relation,
    arity: usize,
    in_size: usize,
    mut visit: impl FnMut(&[usize], &[&Vec<usize>]) -> bool,
) {
    let tuples: Vec<&Vec<usize>> = rel.tuples().iter().collect();
    let a = rel.arity();
    let weights: Vec<usize> = (0..arity).map(|x| in_size.pow((arity - 1 - x) as u32)).collect();
    let mut choice = vec![0usize; arity];
    let mut rows = vec![0usize; a];
    for (x, w) in weights.iter().enumerate() {
        for j in 0..a {
            rows[j] += tuples[choice[x]][j] * w;
        }
    }
    let mut columns: Vec<&Vec<usize>> = vec![tuples[0]; arity];
    loop {
        if !visit(&rows, &columns) {
            return;
        }
        let mut x = arity;
        loop {
            if x == 0 {
                return;
            }
            x -= 1;
            for j in 0..a {
                rows[j] -= tuples[choice[x]][j] * weights[x];
            }
            choice[x] = (choice[x] + 1) % tuples.len();
            for j in 0..a {
                rows[j] += tuples[choice[x]][j] * weights[x];
            }
            columns[x] = tuples[choice[x]];
            if choice[x] != 0 {
                break;
            }
        }
    }
}

/// First violating matrix, in relation-name order, if any.
pub fn polymorphism_violation(t: &FiniteFunction, template: &PcspTemplate) -> Result<Option<PolymorphismViolation>> {
    let (strict, relaxed) = (template.strict(), template.relaxed());
    if t.in_size() != strict.domain_size() || t.out_size() != relaxed.domain_size() {
        return Err(Error::structural(format!(
            "function maps {} values to {}, the template maps {} to {}",
            t.in_size(),
            t.out_size(),
            strict.domain_size(),
            relaxed.domain_size()
        )));
    }
    for (name, rel) in strict.relations() {
        let target = &relaxed.relations()[name];
        let mut image = vec![0usize; rel.arity()];
        let mut found = None;
        for_each_matrix(rel, t.arity(), t.in_size(), |rows, columns| {
            for (slot, &row) in image.iter_mut().zip(rows) {
                *slot = t.table()[row];
            }
            if target.contains(&image) {
                true
            } else {
                found = Some(columns.iter().map(|c| (*c).clone()).collect());
                false
            }
        });
        if let Some(columns) = found {
            return Ok(Some(PolymorphismViolation {
                relation: name.clone(),
                columns,
            }));
        }
    }
    Ok(None)
}

pub fn is_polymorphism(t: &FiniteFunction, template: &PcspTemplate) -> Result<bool> {
    Ok(polymorphism_violation(t, template)?.is_none())
}

/// All polymorphisms of the given arity, in table order.
///
/// The tables are the solutions of a CSP over the relaxed structure with one
/// variable per point of `A^X` and one constraint per matrix.
pub fn enumerate_polymorphisms(template: &PcspTemplate, arity: usize, budget: Budget) -> Result<Vec<FiniteFunction>> {
    if arity == 0 {
        return Err(Error::structural("arity sets must be nonempty"));
    }
    let (strict, relaxed) = (template.strict(), template.relaxed());
    let points = table_len(strict.domain_size(), arity)?;
    let mut matrices: u64 = 0;
    for rel in strict.relations().values() {
        let count = (rel.len() as u64).checked_pow(arity as u32);
        matrices = count
            .and_then(|c| matrices.checked_add(c))
            .filter(|&m| m <= budget.max_nodes)
            .ok_or_else(|| Error::resource(format!("more than {} matrices at arity {arity}", budget.max_nodes)))?;
    }
    let mut constraints = BTreeSet::new();
    for (name, rel) in strict.relations() {
        for_each_matrix(rel, arity, strict.domain_size(), |rows, _| {
            constraints.insert((rows.to_vec(), name.clone()));
            true
        });
    }
    let inst = Instance::new(
        (0..points).map(|i| i.to_string()).collect(),
        constraints
            .into_iter()
            .map(|(scope, relation)| Constraint { scope, relation })
            .collect(),
    )?;
    Solver::new(budget)
        .all_solutions(&inst, relaxed)?
        .into_iter()
        .map(|a| FiniteFunction::new(arity, strict.domain_size(), relaxed.domain_size(), a.values))
        .collect()
}

/// Every table of the given shape, for cross-checking the enumerator.
#[cfg(test)]
pub(crate) fn naive_polymorphisms(template: &PcspTemplate, arity: usize) -> Vec<FiniteFunction> {
    let (p, q) = (template.strict().domain_size(), template.relaxed().domain_size());
    crate::subset::all_tuples(q, p.pow(arity as u32))
        .map(|table| FiniteFunction::new(arity, p, q, table).unwrap())
        .filter(|t| is_polymorphism(t, template).unwrap())
        .collect()
}
