//! Partial assignment systems and the solution-extraction machinery.
//!
//! A `k`-PAS over variables `0..n` and domain `0..q` assigns every
//! `k`-subset `U` a nonempty set of maps `U -> A`. Maps on `U` are stored as
//! value vectors listed along the sorted members of `U`.

mod extract;
mod oracle;
mod params;
mod property;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::subset::{check_universe, k_subsets, k_subsets_of, project, restrict, supersets, Subset};

pub use extract::{extract_solution, Extraction, TraceEvent};
pub use oracle::{csp_value_oracle, csp_value_witness};
pub use params::{gap_parameters, gap_parameters_with, GapParameters, K0Mode, ParamInt, DEFAULT_MAX_BITS};
pub use property::{
    find_p_assignment, find_split_selector, find_value1_selector, has_property, refine, solve_value1, split_to1,
    Property, PropertyCheck, SelectorSearch, SplitSelector,
};

/// A partial assignment system of fixed arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pas {
    n: usize,
    q: usize,
    arity: usize,
    entries: BTreeMap<Subset, Vec<Vec<usize>>>,
}

impl Pas {
    /// Validates totality on `C(V, k)`, nonemptiness and entry shapes.
    /// Entry lists are sorted and deduplicated.
    pub fn new(
        n: usize,
        q: usize,
        arity: usize,
        entries: impl IntoIterator<Item = (Subset, Vec<Vec<usize>>)>,
    ) -> Result<Self> {
        check_universe(n)?;
        if arity == 0 || arity > n {
            return Err(Error::structural(format!("PAS arity {arity} must lie in 1..={n}")));
        }
        if q == 0 {
            return Err(Error::structural("PAS domain must be nonempty"));
        }
        let universe = Subset::full(n);
        let mut map = BTreeMap::new();
        for (u, mut maps) in entries {
            if u.len() != arity || !u.is_subset_of(universe) {
                return Err(Error::structural(format!(
                    "entry {u:?} is not an {arity}-subset of the variables"
                )));
            }
            if maps.is_empty() {
                return Err(Error::structural(format!("entry {u:?} is empty")));
            }
            if let Some(bad) = maps.iter().find(|g| g.len() != arity || g.iter().any(|&a| a >= q)) {
                return Err(Error::structural(format!(
                    "entry {u:?} holds {bad:?}, which is not a map into the domain"
                )));
            }
            maps.sort();
            maps.dedup();
            if map.insert(u, maps).is_some() {
                return Err(Error::structural(format!("entry {u:?} given twice")));
            }
        }
        if let Some(missing) = k_subsets(n, arity).find(|u| !map.contains_key(u)) {
            return Err(Error::structural(format!("no entry for {missing:?}")));
        }
        Ok(Pas {
            n,
            q,
            arity,
            entries: map,
        })
    }

    pub fn from_fn(n: usize, q: usize, arity: usize, mut entry: impl FnMut(Subset) -> Vec<Vec<usize>>) -> Result<Self> {
        check_universe(n)?;
        let entries: Vec<_> = k_subsets(n, arity).map(|u| (u, entry(u))).collect();
        Pas::new(n, q, arity, entries)
    }

    /// The PAS of restrictions of one global assignment.
    pub fn restrictions(q: usize, arity: usize, global: &[usize]) -> Result<Self> {
        Pas::from_fn(global.len(), q, arity, |u| vec![restrict(global, u)])
    }

    pub fn num_variables(&self) -> usize {
        self.n
    }

    pub fn domain_size(&self) -> usize {
        self.q
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Maps for `u`; empty slice if `u` is not an entry.
    pub fn entry(&self, u: Subset) -> &[Vec<usize>] {
        self.entries.get(&u).map_or(&[], Vec::as_slice)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Subset, &[Vec<usize>])> {
        self.entries.iter().map(|(u, g)| (*u, g.as_slice()))
    }

    /// Largest entry size.
    pub fn value(&self) -> usize {
        self.entries.values().map(Vec::len).max().unwrap_or(0)
    }

    fn projections_to(&self, w: Subset, target: Subset) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.entry(w).iter().map(move |g| project(g, w, target))
    }
}

/// Largest entry size of `pas`.
pub fn pas_value(pas: &Pas) -> usize {
    pas.value()
}

/// First `m`-subset that no entry realises the restriction of `f` on, if any.
pub fn first_unextendable(f: &[usize], pas: &Pas, m: usize) -> Result<Option<Subset>> {
    if m == 0 || m > pas.arity {
        return Err(Error::input(format!(
            "m = {m} must lie in 1..={} (the PAS arity)",
            pas.arity
        )));
    }
    if f.len() != pas.n {
        return Err(Error::input(format!(
            "assignment covers {} of {} variables",
            f.len(),
            pas.n
        )));
    }
    for small in k_subsets(pas.n, m) {
        let want = restrict(f, small);
        let realised = supersets(small, pas.n, pas.arity).any(|w| pas.projections_to(w, small).any(|g| g == want));
        if !realised {
            return Ok(Some(small));
        }
    }
    Ok(None)
}

/// Whether `f` is an `m`-solution of `pas`.
pub fn is_m_solution(f: &[usize], pas: &Pas, m: usize) -> Result<bool> {
    Ok(first_unextendable(f, pas, m)?.is_none())
}

/// A list of PASes over common variables and domain with non-increasing arities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PasSequence {
    systems: Vec<Pas>,
}

impl PasSequence {
    pub fn new(systems: Vec<Pas>) -> Result<Self> {
        let first = systems
            .first()
            .ok_or_else(|| Error::structural("a PAS sequence needs at least one system"))?;
        let (n, q) = (first.n, first.q);
        for (i, s) in systems.iter().enumerate() {
            if s.n != n || s.q != q {
                return Err(Error::structural(format!(
                    "system {i} is over a different universe or domain"
                )));
            }
        }
        if let Some(i) = (1..systems.len()).find(|&i| systems[i].arity > systems[i - 1].arity) {
            return Err(Error::structural(format!(
                "arities must be non-increasing, but k_{} = {} < k_{i} = {}",
                i - 1,
                systems[i - 1].arity,
                systems[i].arity
            )));
        }
        Ok(PasSequence { systems })
    }

    pub fn systems(&self) -> &[Pas] {
        &self.systems
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn arities(&self) -> Vec<usize> {
        self.systems.iter().map(Pas::arity).collect()
    }

    pub fn num_variables(&self) -> usize {
        self.systems[0].n
    }

    pub fn domain_size(&self) -> usize {
        self.systems[0].q
    }

    /// Largest value among the systems.
    pub fn value(&self) -> usize {
        self.systems.iter().map(Pas::value).max().unwrap_or(0)
    }

    /// Every entry of every system, as (system index, subset, maps).
    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, Subset, &[Vec<usize>])> {
        self.systems
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.entries().map(move |(u, g)| (i, u, g)))
    }
}

/// Outcome of a consistency check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    /// A nested chain `U_0 ⊇ … ⊇ U_r` on which no pair of systems agrees.
    Violated(Vec<Subset>),
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent)
    }
}

/// `I_j(U_j) ∩ proj_{U_j} I_i(U_i) ≠ ∅`.
fn pair_agrees(outer: &Pas, u_outer: Subset, inner: &Pas, u_inner: Subset) -> bool {
    let inner_maps = inner.entry(u_inner);
    outer
        .projections_to(u_outer, u_inner)
        .any(|g| inner_maps.binary_search(&g).is_ok())
}

/// Checks every nested chain of subsets for an agreeing pair of systems.
/// Chains are walked depth first; a prefix that already contains an agreeing
/// pair is not extended further.
pub fn check_consistent(seq: &PasSequence) -> Result<Consistency> {
    let systems = &seq.systems;
    let mut chain = Vec::with_capacity(systems.len());
    for u0 in k_subsets(seq.num_variables(), systems[0].arity) {
        chain.clear();
        chain.push(u0);
        if let Some(bad) = violating_extension(systems, &mut chain) {
            return Ok(Consistency::Violated(bad));
        }
    }
    Ok(Consistency::Consistent)
}

fn violating_extension(systems: &[Pas], chain: &mut Vec<Subset>) -> Option<Vec<Subset>> {
    let j = chain.len();
    if j == systems.len() {
        return Some(chain.clone());
    }
    let parent = chain[j - 1];
    for uj in k_subsets_of(parent, systems[j].arity) {
        let agrees = (0..j).any(|i| pair_agrees(&systems[i], chain[i], &systems[j], uj));
        if agrees {
            continue;
        }
        chain.push(uj);
        let found = violating_extension(systems, chain);
        chain.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}
