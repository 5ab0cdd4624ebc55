//! The auxiliary instance: one variable per subset, one label per partial
//! solution, and restriction maps as graph constraints.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::csp::{partial_solutions, relation_name, Budget, Constraint, Instance, RelationalStructure};
use crate::error::{Error, Result};
use crate::minion::graph_relation;
use crate::subset::{check_universe, k_subsets, project, Subset};

/// How large the label set `C` is.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "size")]
pub enum CMode {
    /// `|C| = max_U |D_U|`, the smallest set every `D_U` embeds into.
    #[default]
    Fitted,
    /// `|C| = |A|^{k_0}`.
    Paper,
    /// A given size, which must be at least `max_U |D_U|`.
    Explicit(usize),
}

/// A restriction `D_U -> D_W` for `W ⊆ U`, by positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxLink {
    pub from: usize,
    pub to: usize,
    /// `map[i]` is the position in `D_W` of the restriction of `D_U[i]`.
    pub map: Vec<usize>,
}

/// `Ψ` together with the encodings `σ_U`.
///
/// `σ_U` sends `partial[U][i]` to label `i`, so labels in use always form a
/// prefix of `0..c_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxiliaryInstance {
    pub num_source_variables: usize,
    /// Arities after lowering to the number of variables.
    pub arities: Vec<usize>,
    pub c_size: usize,
    pub mode: CMode,
    /// Per variable of `Ψ`: its subset, ordered by mask.
    pub sets: Vec<Subset>,
    /// Per variable: `D_U`, sorted.
    pub partial: Vec<Vec<Vec<usize>>>,
    /// Per constraint of `Ψ`, in the same order.
    pub links: Vec<AuxLink>,
    /// Strict side of the free template, restricted to the graphs in use.
    pub free_strict: RelationalStructure,
    pub instance: Instance,
}

impl AuxiliaryInstance {
    pub fn variable_of(&self, u: Subset) -> Option<usize> {
        self.sets.binary_search_by_key(&u.0, |s| s.0).ok()
    }

    /// The solution of `Ψ` induced by a source solution `h`.
    pub fn encode(&self, h: &[usize]) -> Result<Vec<usize>> {
        self.sets
            .iter()
            .zip(&self.partial)
            .map(|(&u, dom)| {
                let g: Vec<usize> = u.iter().map(|v| h[v]).collect();
                dom.binary_search(&g)
                    .map_err(|_| Error::input(format!("the assignment is not a partial solution on {u:?}")))
            })
            .collect()
    }
}

/// Builds `Ψ` from `Φ` over the strict source structure.
///
/// Variables are all subsets of sizes `arities` (lowered to `|V|`); every
/// pair `U ⊇ W`, `U = W` included, gets the graph of `σ_W ∘ π_{U,W} ∘ σ_U⁻¹`.
pub fn build_auxiliary(
    phi: &Instance,
    strict: &RelationalStructure,
    arities: &[usize],
    mode: CMode,
    budget: Budget,
) -> Result<AuxiliaryInstance> {
    let n = phi.num_variables();
    check_universe(n)?;
    if n == 0 {
        return Err(Error::input("the instance has no variables"));
    }
    if arities.is_empty() || arities.contains(&0) || arities.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::input(format!(
            "arities {arities:?} must be positive and non-increasing"
        )));
    }
    phi.validate_against(strict)?;
    let ks: Vec<usize> = arities.iter().map(|&k| k.min(n)).collect();
    let mut sets: Vec<Subset> = ks.iter().flat_map(|&k| k_subsets(n, k)).collect();
    sets.sort_by_key(|u| u.0);
    sets.dedup();

    let mut partial = Vec::with_capacity(sets.len());
    for &u in &sets {
        let sols = partial_solutions(phi, strict, &u.members(), budget)?;
        if sols.is_empty() {
            return Err(Error::PromiseViolation(format!(
                "no partial solution on {{{}}}, so the strict side is unsolvable",
                names(phi, u)
            )));
        }
        partial.push(sols);
    }
    let widest = partial.iter().map(Vec::len).max().unwrap_or(1);
    let c_size = match mode {
        CMode::Fitted => widest,
        CMode::Paper => u32::try_from(ks[0])
            .ok()
            .and_then(|k| strict.domain_size().checked_pow(k))
            .ok_or_else(|| Error::resource("|A|^k_0 does not fit in a machine word"))?,
        CMode::Explicit(c) => {
            if c < widest {
                return Err(Error::parameter(format!(
                    "|C| = {c} is smaller than the largest D_U, of size {widest}"
                )));
            }
            c
        }
    };
    if c_size < widest {
        return Err(Error::parameter(format!(
            "|C| = {c_size} is smaller than the largest D_U, of size {widest}"
        )));
    }

    let variables = sets.iter().map(|&u| names(phi, u)).collect();
    AuxiliaryInstance::from_tables(variables, n, ks, c_size, mode, sets, partial)
}

impl AuxiliaryInstance {
    /// Rebuilds the links, the free structure and `Ψ` from the subsets and
    /// their partial solutions, as stored in a layout file.
    pub fn from_tables(
        variables: Vec<String>,
        num_source_variables: usize,
        arities: Vec<usize>,
        c_size: usize,
        mode: CMode,
        sets: Vec<Subset>,
        partial: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if sets.windows(2).any(|w| w[0].0 >= w[1].0) || sets.len() != partial.len() {
            return Err(Error::input("subsets must be distinct, ordered by mask, one per table"));
        }
        for (u, dom) in sets.iter().zip(&partial) {
            if dom.is_empty() || dom.len() > c_size {
                return Err(Error::input(format!(
                    "{} partial solutions on {u:?} with |C| = {c_size}",
                    dom.len()
                )));
            }
            if dom.windows(2).any(|w| w[0] >= w[1]) || dom.iter().any(|g| g.len() != u.len()) {
                return Err(Error::input(format!("partial solutions on {u:?} are not sorted maps")));
            }
        }
        let labels: Vec<String> = (0..c_size).map(|a| a.to_string()).collect();
        let mut relations = BTreeMap::new();
        let mut links = Vec::new();
        let mut constraints = Vec::new();
        for (x, &u) in sets.iter().enumerate() {
            for (y, &w) in sets.iter().enumerate() {
                if !w.is_subset_of(u) {
                    continue;
                }
                let map = partial[x]
                    .iter()
                    .map(|g| {
                        partial[y].binary_search(&project(g, u, w)).map_err(|_| {
                            Error::input(format!("a restriction from {u:?} to {w:?} is not a partial solution"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let c1: Vec<usize> = (0..partial[x].len()).collect();
                let c2: Vec<usize> = (0..partial[y].len()).collect();
                let graph = graph_relation(&c1, &c2, &map)?;
                let tuples: Vec<Vec<usize>> = graph.tuples().iter().cloned().collect();
                let name = relation_name(&labels, &tuples);
                relations.entry(name.clone()).or_insert(graph);
                constraints.push(Constraint {
                    scope: vec![x, y],
                    relation: name,
                });
                links.push(AuxLink { from: x, to: y, map });
            }
        }
        let free_strict = RelationalStructure::new(labels, relations)?;
        let instance = Instance::new(variables, constraints)?;
        Ok(AuxiliaryInstance {
            num_source_variables,
            arities,
            c_size,
            mode,
            sets,
            partial,
            links,
            free_strict,
            instance,
        })
    }
}

fn names(phi: &Instance, u: Subset) -> String {
    u.iter()
        .map(|v| phi.variables()[v].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::tests::k;
    use crate::csp::{brute_force_solve, evaluate, Assignment, Instance};

    fn edge() -> Instance {
        Instance::from_labels(&["x", "y"], &[(&["x", "y"], "neq")]).unwrap()
    }

    #[test]
    fn single_edge() {
        let aux = build_auxiliary(&edge(), &k(2), &[2, 1], CMode::Fitted, Budget::default()).unwrap();
        assert_eq!(aux.instance.variables(), ["x", "y", "x,y"]);
        assert_eq!(aux.partial[2], vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(aux.c_size, 2);
        // U = W for each of the three, plus xy -> x and xy -> y
        assert_eq!(aux.links.len(), 5);
        let to_x = aux.links.iter().find(|l| (l.from, l.to) == (2, 0)).unwrap();
        assert_eq!(to_x.map, vec![0, 1]);
        let to_y = aux.links.iter().find(|l| (l.from, l.to) == (2, 1)).unwrap();
        assert_eq!(to_y.map, vec![1, 0]);
    }

    #[test]
    fn encoding_solves_psi() {
        let phi = Instance::from_labels(&["a", "b", "c"], &[(&["a", "b"], "neq"), (&["b", "c"], "neq")]).unwrap();
        let h = brute_force_solve(&phi, &k(2)).unwrap().unwrap();
        let aux = build_auxiliary(&phi, &k(2), &[2, 1], CMode::Fitted, Budget::default()).unwrap();
        let s = aux.encode(&h.values).unwrap();
        assert!(evaluate(&aux.instance, &aux.free_strict, &Assignment::new(s))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn promise_and_size_errors() {
        let triangle = Instance::from_labels(
            &["a", "b", "c"],
            &[(&["a", "b"], "neq"), (&["b", "c"], "neq"), (&["a", "c"], "neq")],
        )
        .unwrap();
        let err = build_auxiliary(&triangle, &k(2), &[3, 2], CMode::Fitted, Budget::default()).unwrap_err();
        assert!(matches!(err, Error::PromiseViolation(_)));
        let err = build_auxiliary(&edge(), &k(2), &[2, 1], CMode::Explicit(1), Budget::default()).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
        let paper = build_auxiliary(&edge(), &k(2), &[2, 1], CMode::Paper, Budget::default()).unwrap();
        assert_eq!(paper.c_size, 4);
    }
}
