//! Layered Label Cover: instances, chains, weak satisfaction, the
//! combinatorial layered value, and the reduction from m-CSP.

use std::collections::BTreeMap;

use crate::csp::{partial_solutions, Budget, Instance, RelationalStructure};
use crate::error::{Error, Result};
use crate::pas::{check_consistent, Pas, PasSequence};
use crate::subset::{check_universe, k_subsets, project, Subset};

/// Layered variables with finite domains and functional constraints from
/// lower to higher layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LlcInstance {
    names: Vec<String>,
    layer_of: Vec<usize>,
    layers: Vec<Vec<usize>>,
    domains: Vec<Vec<String>>,
    constraints: BTreeMap<(usize, usize), Vec<usize>>,
    has_empty_domain: bool,
}

/// One functional constraint `ψ: A_from -> A_to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LlcConstraint {
    pub from: usize,
    pub to: usize,
    pub map: Vec<usize>,
}

impl LlcInstance {
    /// `variables[v] = (name, layer, domain labels)`.
    pub fn new(
        num_layers: usize,
        variables: Vec<(String, usize, Vec<String>)>,
        constraints: Vec<LlcConstraint>,
    ) -> Result<Self> {
        if num_layers == 0 {
            return Err(Error::structural("an LLC instance needs at least one layer"));
        }
        let mut names = Vec::with_capacity(variables.len());
        let mut layer_of = Vec::with_capacity(variables.len());
        let mut domains = Vec::with_capacity(variables.len());
        let mut layers = vec![Vec::new(); num_layers];
        let mut seen = std::collections::HashSet::new();
        for (v, (name, layer, domain)) in variables.into_iter().enumerate() {
            if layer >= num_layers {
                return Err(Error::structural(format!("{name} is on missing layer {layer}")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::structural(format!("variable {name} appears twice")));
            }
            layers[layer].push(v);
            names.push(name);
            layer_of.push(layer);
            domains.push(domain);
        }
        let has_empty_domain = domains.iter().any(Vec::is_empty);
        let mut map = BTreeMap::new();
        for c in constraints {
            let (Some(&lf), Some(&lt)) = (layer_of.get(c.from), layer_of.get(c.to)) else {
                return Err(Error::structural("constraint refers to a missing variable"));
            };
            if lf >= lt {
                return Err(Error::structural(format!(
                    "constraint {} -> {} does not go to a higher layer",
                    names[c.from], names[c.to]
                )));
            }
            if c.map.len() != domains[c.from].len() || c.map.iter().any(|&b| b >= domains[c.to].len()) {
                return Err(Error::structural(format!(
                    "constraint {} -> {} is not a total map between the domains",
                    names[c.from], names[c.to]
                )));
            }
            if map.insert((c.from, c.to), c.map).is_some() {
                return Err(Error::structural(format!(
                    "two constraints from {} to {}",
                    names[c.from], names[c.to]
                )));
            }
        }
        Ok(LlcInstance {
            names,
            layer_of,
            layers,
            domains,
            constraints: map,
            has_empty_domain,
        })
    }

    pub fn num_variables(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn layer_of(&self, v: usize) -> usize {
        self.layer_of[v]
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn domain(&self, v: usize) -> &[String] {
        &self.domains[v]
    }

    pub fn constraint(&self, from: usize, to: usize) -> Option<&[usize]> {
        self.constraints.get(&(from, to)).map(Vec::as_slice)
    }

    pub fn constraints(&self) -> impl Iterator<Item = LlcConstraint> + '_ {
        self.constraints.iter().map(|(&(from, to), map)| LlcConstraint {
            from,
            to,
            map: map.clone(),
        })
    }

    pub fn has_empty_domain(&self) -> bool {
        self.has_empty_domain
    }
}

/// Every `(x_0, …, x_r)` with `x_i` in layer `i` and a constraint between
/// every two of its members.
pub fn enumerate_chains(inst: &LlcInstance) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut chain = Vec::new();
    fn walk(inst: &LlcInstance, chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let layer = chain.len();
        if layer == inst.layers.len() {
            out.push(chain.clone());
            return;
        }
        for &y in &inst.layers[layer] {
            if chain.iter().all(|&x| inst.constraints.contains_key(&(x, y))) {
                chain.push(y);
                walk(inst, chain, out);
                chain.pop();
            }
        }
    }
    walk(inst, &mut chain, &mut out);
    out
}

/// A set of at most `d` labels per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DAssignment {
    pub d: usize,
    pub sets: Vec<Vec<usize>>,
}

impl DAssignment {
    pub fn new(inst: &LlcInstance, d: usize, mut sets: Vec<Vec<usize>>) -> Result<Self> {
        if sets.len() != inst.num_variables() {
            return Err(Error::input("a d-assignment must cover every variable"));
        }
        for (v, s) in sets.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() || s.len() > d || s.iter().any(|&a| a >= inst.domains[v].len()) {
                return Err(Error::input(format!(
                    "the set at {} must be a nonempty subset of its domain of size at most {d}",
                    inst.names[v]
                )));
            }
        }
        Ok(DAssignment { d, sets })
    }
}

/// Some pair `i < j` on the chain has `ψ(f(x_i)) ∩ f(x_j) ≠ ∅`.
pub fn weakly_satisfies(inst: &LlcInstance, f: &DAssignment, chain: &[usize]) -> bool {
    weak_with(inst, |v| &f.sets[v], chain)
}

fn weak_with<'a>(inst: &LlcInstance, f: impl Fn(usize) -> &'a [usize], chain: &[usize]) -> bool {
    chain.iter().enumerate().any(|(i, &x)| {
        chain[i + 1..].iter().any(|&y| {
            inst.constraints
                .get(&(x, y))
                .is_some_and(|psi| f(x).iter().any(|&a| f(y).contains(&psi[a])))
        })
    })
}

/// Outcome of [`combinatorial_layered_value`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LayeredValue {
    /// The smallest working `d`, with a witness.
    Value(DAssignment),
    /// No `d <= max_d` works.
    Exceeds(usize),
}

/// Smallest `d <= max_d` admitting a `d`-assignment that weakly satisfies
/// every chain. Each variable gets exactly `min(d, |A_x|)` labels, which
/// loses nothing since weak satisfaction is monotone.
pub fn combinatorial_layered_value(inst: &LlcInstance, max_d: usize, budget: Budget) -> Result<LayeredValue> {
    if inst.has_empty_domain || inst.num_variables() == 0 {
        return Ok(LayeredValue::Exceeds(max_d));
    }
    let chains = enumerate_chains(inst);
    let n = inst.num_variables();
    // chains are checked once their last variable (by index) is set
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, chain) in chains.iter().enumerate() {
        due[*chain.iter().max().expect("chains are nonempty")].push(c);
    }
    let mut nodes = 0u64;
    for d in 1..=max_d {
        let options: Vec<Vec<Vec<usize>>> = (0..n)
            .map(|v| {
                use itertools::Itertools;
                (0..inst.domains[v].len())
                    .combinations(d.min(inst.domains[v].len()))
                    .collect()
            })
            .collect();
        let mut pick = vec![usize::MAX; n];
        let mut pos = 0;
        let found = loop {
            if pos == n {
                break true;
            }
            pick[pos] = pick[pos].wrapping_add(1);
            if pick[pos] == options[pos].len() {
                pick[pos] = usize::MAX;
                if pos == 0 {
                    break false;
                }
                pos -= 1;
                continue;
            }
            nodes += 1;
            if nodes > budget.max_nodes {
                return Err(Error::resource(format!(
                    "layered value search exceeded the budget of {} nodes",
                    budget.max_nodes
                )));
            }
            let current = |v: usize| options[v][pick[v]].as_slice();
            if due[pos].iter().all(|&c| weak_with(inst, current, &chains[c])) {
                pos += 1;
            }
        };
        if found {
            let sets = (0..n).map(|v| options[v][pick[v]].clone()).collect();
            return Ok(LayeredValue::Value(DAssignment { d, sets }));
        }
    }
    Ok(LayeredValue::Exceeds(max_d))
}

/// An LLC instance produced from an m-CSP instance, with what is needed to
/// read assignments back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LlcReduction {
    pub instance: LlcInstance,
    pub num_source_variables: usize,
    pub domain_size: usize,
    /// Arities used, after lowering to the number of variables.
    pub arities: Vec<usize>,
    /// Per LLC variable: its subset of source variables.
    pub sets: Vec<Subset>,
    /// Per LLC variable: its domain, the partial solutions on the subset.
    pub partial: Vec<Vec<Vec<usize>>>,
}

impl LlcReduction {
    /// LLC variable for subset `u` on layer `i`.
    pub fn variable(&self, layer: usize, u: Subset) -> Option<usize> {
        self.instance.layers[layer].iter().copied().find(|&v| self.sets[v] == u)
    }
}

/// Layer `i` holds the `k_i`-subsets of the variables, each with the partial
/// solutions as its domain; `U ⊇ W` on layers `i < j` are joined by restriction.
pub fn reduce_mcsp_to_llc(
    inst: &Instance,
    side: &RelationalStructure,
    arities: &[usize],
    budget: Budget,
) -> Result<LlcReduction> {
    let n = inst.num_variables();
    check_universe(n)?;
    if n == 0 {
        return Err(Error::input("the instance has no variables"));
    }
    if arities.is_empty() || arities.contains(&0) || arities.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::input(format!(
            "arities {arities:?} must be positive and non-increasing"
        )));
    }
    inst.validate_against(side)?;
    let ks: Vec<usize> = arities.iter().map(|&k| k.min(n)).collect();
    // index order: subsets by mask, later layers first, so every chain
    // ends at its layer-0 variable
    let mut slots: Vec<(Subset, usize)> = ks
        .iter()
        .enumerate()
        .flat_map(|(i, &k)| k_subsets(n, k).map(move |u| (u, i)))
        .collect();
    slots.sort_by_key(|&(u, i)| (u.0, std::cmp::Reverse(i)));

    let atom = |a: usize| side.domain()[a].as_str();
    let mut variables = Vec::with_capacity(slots.len());
    let mut partial = Vec::with_capacity(slots.len());
    for &(u, i) in &slots {
        let members = u.members();
        let sols = partial_solutions(inst, side, &members, budget)?;
        let names: Vec<&str> = members.iter().map(|&v| inst.variables()[v].as_str()).collect();
        let labels = sols
            .iter()
            .map(|g| g.iter().map(|&a| atom(a)).collect::<Vec<_>>().join("."))
            .collect();
        variables.push((format!("{i}|{}", names.join(",")), i, labels));
        partial.push(sols);
    }
    let mut constraints = Vec::new();
    for (x, &(u, i)) in slots.iter().enumerate() {
        for (y, &(w, j)) in slots.iter().enumerate() {
            if i < j && w.is_subset_of(u) {
                let map = partial[x]
                    .iter()
                    .map(|g| {
                        let h = project(g, u, w);
                        partial[y]
                            .binary_search(&h)
                            .map_err(|_| Error::internal("a restricted partial solution is missing"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                constraints.push(LlcConstraint { from: x, to: y, map });
            }
        }
    }
    let instance = LlcInstance::new(ks.len(), variables, constraints)?;
    Ok(LlcReduction {
        instance,
        num_source_variables: n,
        domain_size: side.domain_size(),
        arities: ks,
        sets: slots.iter().map(|&(u, _)| u).collect(),
        partial,
    })
}

/// `I_i(U) = f(U)` read as sets of partial solutions.
pub fn d_assignment_to_pas(red: &LlcReduction, f: &DAssignment) -> Result<PasSequence> {
    let inst = &red.instance;
    if f.sets.len() != inst.num_variables() {
        return Err(Error::input("the d-assignment does not match the instance"));
    }
    if let Some(chain) = enumerate_chains(inst)
        .into_iter()
        .find(|c| !weakly_satisfies(inst, f, c))
    {
        let names: Vec<&str> = chain.iter().map(|&v| inst.name(v)).collect();
        return Err(Error::input(format!("chain {names:?} is not weakly satisfied")));
    }
    let mut systems = Vec::with_capacity(red.arities.len());
    for (i, &k) in red.arities.iter().enumerate() {
        let entries: Vec<(Subset, Vec<Vec<usize>>)> = inst.layers[i]
            .iter()
            .map(|&v| {
                let maps = f.sets[v].iter().map(|&a| red.partial[v][a].clone()).collect();
                (red.sets[v], maps)
            })
            .collect();
        systems.push(Pas::new(red.num_source_variables, red.domain_size, k, entries)?);
    }
    let seq = PasSequence::new(systems)?;
    if !check_consistent(&seq)?.is_consistent() {
        return Err(Error::internal(
            "weakly satisfying assignment gave an inconsistent sequence",
        ));
    }
    Ok(seq)
}
