//! The long-code reduction from an instance over a free template to an
//! instance of a fixed template.

use std::collections::HashSet;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::csp::{Budget, Constraint, Instance, PcspTemplate, RelationalStructure};
use crate::error::{Error, Result};
use crate::minion::{for_each_matrix, table_len, FiniteFunction};

/// Where a cloud comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "index")]
pub enum CloudSource {
    Variable(usize),
    Constraint(usize),
}

/// One block of positions, indexed by the points of `A^S` in table order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cloud {
    pub label: String,
    pub source: CloudSource,
    /// `|S|`: `|C|` for variables, the relation size for constraints.
    pub arity: usize,
    pub offset: usize,
    pub size: usize,
}

/// Clouds plus the class (output variable) of every position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloudLayout {
    pub in_size: usize,
    pub clouds: Vec<Cloud>,
    pub class_of: Vec<usize>,
    /// Smallest position of each class.
    pub representatives: Vec<usize>,
}

impl CloudLayout {
    pub fn num_positions(&self) -> usize {
        self.class_of.len()
    }

    pub fn num_classes(&self) -> usize {
        self.representatives.len()
    }

    /// Cloud holding a position, with the position's table index inside it.
    pub fn locate(&self, position: usize) -> (usize, usize) {
        let c = self.clouds.partition_point(|cl| cl.offset <= position) - 1;
        (c, position - self.clouds[c].offset)
    }

    /// The function an assignment to the output induces on a cloud.
    pub fn cloud_function(&self, cloud: usize, out_size: usize, values: &[usize]) -> Result<FiniteFunction> {
        let cl = &self.clouds[cloud];
        let table = (cl.offset..cl.offset + cl.size)
            .map(|p| values[self.class_of[p]])
            .collect();
        FiniteFunction::new(cl.arity, self.in_size, out_size, table)
    }

    /// Variable cloud of `Ψ` variable `v`.
    pub fn variable_cloud(&self, v: usize) -> Option<usize> {
        self.clouds.iter().position(|c| c.source == CloudSource::Variable(v))
    }
}

/// The output instance and how it was laid out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LongCode {
    pub instance: Instance,
    pub layout: CloudLayout,
}

/// Reduces `psi`, over `free_strict`, to an instance of `target`.
///
/// Every variable gets a cloud indexed by `A^C` and every constraint a cloud
/// indexed by `A^R`; a solution on a cloud is forced to be a polymorphism of
/// `target`, and position `f` of the cloud of the `i`-th scope variable is
/// identified with position `f ∘ proj_i` of the constraint cloud.
/// `budget.max_nodes` caps positions plus matrices.
pub fn longcode_reduce(
    psi: &Instance,
    free_strict: &RelationalStructure,
    target: &PcspTemplate,
    budget: Budget,
) -> Result<LongCode> {
    psi.validate_against(free_strict)?;
    let strict = target.strict();
    let q = strict.domain_size();
    let c = free_strict.domain_size();

    let mut clouds = Vec::new();
    let mut offset = 0usize;
    let mut work: u128 = 0;
    let matrices = |arity: usize| -> u128 {
        strict
            .relations()
            .values()
            .map(|r| (r.len() as u128).saturating_pow(arity as u32))
            .fold(0u128, u128::saturating_add)
    };
    let mut push = |label: String, source: CloudSource, arity: usize| -> Result<()> {
        let size = table_len(q, arity)?;
        work = work.saturating_add(size as u128).saturating_add(matrices(arity));
        clouds.push(Cloud {
            label,
            source,
            arity,
            offset,
            size,
        });
        offset += size;
        Ok(())
    };
    let too_big = |e: Error| match e {
        Error::Resource(msg) => Error::resource(format!("{msg}; |A| = {q}, |C| = {c}")),
        other => other,
    };
    for (v, name) in psi.variables().iter().enumerate() {
        push(name.clone(), CloudSource::Variable(v), c).map_err(too_big)?;
    }
    for (i, con) in psi.constraints().iter().enumerate() {
        let arity = free_strict.relations()[&con.relation].len();
        push(format!("c{i}"), CloudSource::Constraint(i), arity).map_err(too_big)?;
    }
    if work > budget.max_nodes as u128 {
        let mut sizes: Vec<String> = clouds.iter().map(|cl| format!("{}: {}", cl.label, cl.size)).collect();
        if sizes.len() > 8 {
            sizes.truncate(8);
            sizes.push("...".into());
        }
        return Err(Error::resource(format!(
            "long code needs {work} positions and matrices, above the budget of {}; \
             {} clouds over |A| = {q}, |C| = {c} ({})",
            budget.max_nodes,
            clouds.len(),
            sizes.join(", ")
        )));
    }

    let total = offset;
    let mut uf = UnionFind::<usize>::new(total);
    let nvars = psi.num_variables();
    for (i, con) in psi.constraints().iter().enumerate() {
        let rel = &free_strict.relations()[&con.relation];
        let cc = &clouds[nvars + i];
        let tuples: Vec<&Vec<usize>> = rel.tuples().iter().collect();
        for (slot, &v) in con.scope.iter().enumerate() {
            let vc = &clouds[v];
            // table index of f ∘ proj_slot, accumulated one tuple at a time
            let mut digits = vec![0usize; c];
            for f in 0..vc.size {
                let mut g = 0usize;
                for t in &tuples {
                    g = g * q + digits[t[slot]];
                }
                uf.union(vc.offset + f, cc.offset + g);
                for y in (0..c).rev() {
                    digits[y] += 1;
                    if digits[y] < q {
                        break;
                    }
                    digits[y] = 0;
                }
            }
        }
    }
    let mut class_of = vec![usize::MAX; total];
    let mut class_of_root = vec![usize::MAX; total];
    let mut representatives = Vec::new();
    for (p, class) in class_of.iter_mut().enumerate() {
        let root = uf.find(p);
        if class_of_root[root] == usize::MAX {
            class_of_root[root] = representatives.len();
            representatives.push(p);
        }
        *class = class_of_root[root];
    }

    let layout = CloudLayout {
        in_size: q,
        clouds,
        class_of,
        representatives,
    };
    let names = layout
        .representatives
        .iter()
        .map(|&p| {
            let (ci, idx) = layout.locate(p);
            let cl = &layout.clouds[ci];
            format!("{}@{}", cl.label, point_label(idx, q, cl.arity))
        })
        .collect();

    let mut seen = HashSet::new();
    let mut constraints = Vec::new();
    for cl in &layout.clouds {
        for (name, rel) in strict.relations() {
            for_each_matrix(rel, cl.arity, q, |rows, _| {
                let scope: Vec<usize> = rows.iter().map(|&r| layout.class_of[cl.offset + r]).collect();
                let con = Constraint {
                    scope,
                    relation: name.clone(),
                };
                if seen.insert(con.clone()) {
                    constraints.push(con);
                }
                true
            });
        }
    }
    let instance = Instance::new(names, constraints)?;
    Ok(LongCode { instance, layout })
}

/// Digits of a point of `A^S`, first coordinate first.
fn point_label(mut idx: usize, q: usize, arity: usize) -> String {
    let mut digits = vec![0usize; arity];
    for d in digits.iter_mut().rev() {
        *d = idx % q;
        idx /= q;
    }
    let sep = if q > 10 { "." } else { "" };
    digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(sep)
}

/// Lifts a strict solution `s` of `psi` to the output: every cloud gets the
/// dictator at `s(v)`, or at the index of the scope's tuple for constraints.
pub fn lift_strict_solution(
    psi: &Instance,
    free_strict: &RelationalStructure,
    layout: &CloudLayout,
    s: &[usize],
) -> Result<Vec<usize>> {
    if s.len() != psi.num_variables() {
        return Err(Error::input("the assignment does not cover every variable"));
    }
    let q = layout.in_size;
    let mut coordinate = Vec::with_capacity(layout.clouds.len());
    for cl in &layout.clouds {
        coordinate.push(match cl.source {
            CloudSource::Variable(v) => s[v],
            CloudSource::Constraint(i) => {
                let con = &psi.constraints()[i];
                let tuple: Vec<usize> = con.scope.iter().map(|&v| s[v]).collect();
                free_strict.relations()[&con.relation]
                    .tuples()
                    .iter()
                    .position(|t| *t == tuple)
                    .ok_or_else(|| Error::input(format!("constraint {i} is violated")))?
            }
        });
    }
    Ok(layout
        .representatives
        .iter()
        .map(|&p| {
            let (ci, idx) = layout.locate(p);
            let arity = layout.clouds[ci].arity;
            idx / q.pow((arity - 1 - coordinate[ci]) as u32) % q
        })
        .collect())
}
