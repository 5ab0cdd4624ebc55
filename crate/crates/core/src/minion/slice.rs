//! Minions as arity-indexed families, and finite slices of them.

use std::collections::{BTreeMap, BTreeSet};

use super::poly::{enumerate_polymorphisms, is_polymorphism};
use super::{all_maps, minor, FiniteFunction};
use crate::csp::{Budget, PcspTemplate};
use crate::error::{Error, Result};

/// A family of functions closed under minors, queried one arity at a time.
pub trait Minion {
    /// `(|A|, |B|)`.
    fn domain_sizes(&self) -> (usize, usize);

    fn contains(&self, t: &FiniteFunction) -> Result<bool>;

    /// All members of the given arity, in table order.
    fn members(&self, arity: usize) -> Result<Vec<FiniteFunction>>;
}

/// Projections `A^X -> A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DictatorMinion {
    pub size: usize,
}

impl Minion for DictatorMinion {
    fn domain_sizes(&self) -> (usize, usize) {
        (self.size, self.size)
    }

    fn contains(&self, t: &FiniteFunction) -> Result<bool> {
        Ok(t.in_size() == self.size && t.out_size() == self.size && t.as_dictator().is_some())
    }

    fn members(&self, arity: usize) -> Result<Vec<FiniteFunction>> {
        let mut all = (0..arity)
            .map(|i| FiniteFunction::dictator(arity, self.size, self.size, i))
            .collect::<Result<Vec<_>>>()?;
        all.sort();
        Ok(all)
    }
}

/// `Pol(A, B)` of a template, enumerated on demand.
#[derive(Clone, Debug)]
pub struct PolymorphismMinion {
    pub template: PcspTemplate,
    pub budget: Budget,
}

impl Minion for PolymorphismMinion {
    fn domain_sizes(&self) -> (usize, usize) {
        (
            self.template.strict().domain_size(),
            self.template.relaxed().domain_size(),
        )
    }

    fn contains(&self, t: &FiniteFunction) -> Result<bool> {
        if (t.in_size(), t.out_size()) != self.domain_sizes() {
            return Ok(false);
        }
        is_polymorphism(t, &self.template)
    }

    fn members(&self, arity: usize) -> Result<Vec<FiniteFunction>> {
        enumerate_polymorphisms(&self.template, arity, self.budget)
    }
}

/// Finitely many functions, grouped by arity, over declared arities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinionSlice {
    in_size: usize,
    out_size: usize,
    functions: BTreeMap<usize, Vec<FiniteFunction>>,
}

impl MinionSlice {
    /// Every declared arity gets an entry, possibly empty.
    pub fn new(
        in_size: usize,
        out_size: usize,
        arities: impl IntoIterator<Item = usize>,
        functions: impl IntoIterator<Item = FiniteFunction>,
    ) -> Result<Self> {
        let mut map: BTreeMap<usize, BTreeSet<FiniteFunction>> =
            arities.into_iter().map(|a| (a, BTreeSet::new())).collect();
        if map.contains_key(&0) {
            return Err(Error::structural("arity sets must be nonempty"));
        }
        for t in functions {
            if t.in_size() != in_size || t.out_size() != out_size {
                return Err(Error::structural(format!("{t:?} has the wrong domains")));
            }
            map.get_mut(&t.arity())
                .ok_or_else(|| Error::structural(format!("arity {} is not declared", t.arity())))?
                .insert(t);
        }
        Ok(MinionSlice {
            in_size,
            out_size,
            functions: map.into_iter().map(|(a, set)| (a, set.into_iter().collect())).collect(),
        })
    }

    /// The members of `minion` at each of the given arities.
    pub fn from_minion(minion: &dyn Minion, arities: &[usize]) -> Result<Self> {
        let (p, q) = minion.domain_sizes();
        let mut all = Vec::new();
        for &a in arities {
            all.extend(minion.members(a)?);
        }
        MinionSlice::new(p, q, arities.iter().copied(), all)
    }

    pub fn arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.functions.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.functions.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn at(&self, arity: usize) -> &[FiniteFunction] {
        self.functions.get(&arity).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FiniteFunction> {
        self.functions.values().flatten()
    }

    pub fn position(&self, t: &FiniteFunction) -> Option<usize> {
        self.functions.get(&t.arity())?.binary_search(t).ok()
    }
}

impl Minion for MinionSlice {
    fn domain_sizes(&self) -> (usize, usize) {
        (self.in_size, self.out_size)
    }

    fn contains(&self, t: &FiniteFunction) -> Result<bool> {
        Ok(self.position(t).is_some())
    }

    fn members(&self, arity: usize) -> Result<Vec<FiniteFunction>> {
        self.functions
            .get(&arity)
            .cloned()
            .ok_or_else(|| Error::TableIncomplete(format!("arity {arity} is not declared")))
    }
}

/// `minor(source, pi)` of arity `target_arity`, missing from the slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorWitness {
    pub source: FiniteFunction,
    pub pi: Vec<usize>,
    pub target_arity: usize,
    pub minor: FiniteFunction,
}

/// First minor between declared arities that leaves the slice, if any.
pub fn check_minor_closure(slice: &MinionSlice) -> Result<Option<MinorWitness>> {
    let arities: Vec<usize> = slice.arities().collect();
    for t in slice.iter() {
        for &y in &arities {
            for pi in all_maps(t.arity(), y) {
                let s = minor(t, &pi, y)?;
                if slice.position(&s).is_none() {
                    return Ok(Some(MinorWitness {
                        source: t.clone(),
                        pi,
                        target_arity: y,
                        minor: s,
                    }));
                }
            }
        }
    }
    Ok(None)
}
