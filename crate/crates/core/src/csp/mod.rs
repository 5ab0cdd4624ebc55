//! Finite relational structures, (P)CSP templates and instances.

mod solve;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};

pub use solve::{all_solutions, brute_force_solve, partial_solutions, Budget, Solver};

/// A nonempty relation of fixed arity over domain indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Vec<usize>>,
}

impl Relation {
    pub fn new(arity: usize, tuples: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::structural("relation arity must be positive"));
        }
        let tuples: BTreeSet<Vec<usize>> = tuples.into_iter().collect();
        if tuples.is_empty() {
            return Err(Error::structural("relations must be nonempty"));
        }
        if let Some(bad) = tuples.iter().find(|t| t.len() != arity) {
            return Err(Error::structural(format!(
                "tuple {bad:?} does not have declared arity {arity}"
            )));
        }
        Ok(Relation { arity, tuples })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<usize>> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples.contains(tuple)
    }
}

/// A finite domain of atom labels together with named relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationalStructure {
    domain: Vec<String>,
    index: HashMap<String, usize>,
    relations: BTreeMap<String, Relation>,
}

impl RelationalStructure {
    pub fn new(domain: Vec<String>, relations: BTreeMap<String, Relation>) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::structural("domain must be nonempty"));
        }
        let mut index = HashMap::with_capacity(domain.len());
        for (i, label) in domain.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::structural(format!("duplicate atom `{label}`")));
            }
        }
        for (name, rel) in &relations {
            if let Some(t) = rel.tuples.iter().find(|t| t.iter().any(|&a| a >= domain.len())) {
                return Err(Error::structural(format!(
                    "relation `{name}` has tuple {t:?} outside the domain"
                )));
            }
        }
        Ok(RelationalStructure {
            domain,
            index,
            relations,
        })
    }

    /// Builds a structure from labelled tuples.
    pub fn from_labels<S: AsRef<str>>(domain: &[S], relations: &[(&str, Vec<Vec<S>>)]) -> Result<Self> {
        let domain: Vec<String> = domain.iter().map(|s| s.as_ref().to_owned()).collect();
        let lookup: HashMap<&str, usize> = domain.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut rels = BTreeMap::new();
        for (name, tuples) in relations {
            let arity = tuples.first().map_or(0, Vec::len);
            let tuples = tuples
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|a| {
                            lookup
                                .get(a.as_ref())
                                .copied()
                                .ok_or_else(|| Error::structural(format!("unknown atom `{}`", a.as_ref())))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            rels.insert((*name).to_owned(), Relation::new(arity, tuples)?);
        }
        RelationalStructure::new(domain, rels)
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn atom(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn max_arity(&self) -> usize {
        self.relations.values().map(Relation::arity).max().unwrap_or(0)
    }

    /// Same relation names with matching arities.
    pub fn is_similar(&self, other: &RelationalStructure) -> bool {
        self.relations.len() == other.relations.len()
            && self
                .relations
                .iter()
                .zip(&other.relations)
                .all(|((n1, r1), (n2, r2))| n1 == n2 && r1.arity == r2.arity)
    }

    fn ensure_similar(&self, other: &RelationalStructure) -> Result<()> {
        if self.is_similar(other) {
            Ok(())
        } else {
            Err(Error::structural(
                "structures are not similar: relation names or arities differ",
            ))
        }
    }
}

/// Checks that `h` (source atom index to target atom index) preserves every relation.
pub fn check_homomorphism(h: &[usize], src: &RelationalStructure, dst: &RelationalStructure) -> Result<bool> {
    src.ensure_similar(dst)?;
    if h.len() != src.domain_size() {
        return Err(Error::input(format!(
            "map is defined on {} atoms but the source domain has {}",
            h.len(),
            src.domain_size()
        )));
    }
    if let Some(&b) = h.iter().find(|&&b| b >= dst.domain_size()) {
        return Err(Error::input(format!("image {b} is outside the target domain")));
    }
    let mut image = Vec::new();
    for (name, rel) in &src.relations {
        let target = &dst.relations[name];
        for tuple in &rel.tuples {
            image.clear();
            image.extend(tuple.iter().map(|&a| h[a]));
            if !target.contains(&image) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Lexicographically first homomorphism `src -> dst`, found by solving the
/// canonical instance of `src` over `dst`.
pub fn find_homomorphism(
    src: &RelationalStructure,
    dst: &RelationalStructure,
    budget: Budget,
) -> Result<Option<Vec<usize>>> {
    src.ensure_similar(dst)?;
    let inst = Instance::canonical(src);
    Ok(Solver::new(budget).solve(&inst, dst)?.map(|a| a.values))
}

/// A pair of similar structures admitting a homomorphism strict -> relaxed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcspTemplate {
    strict: RelationalStructure,
    relaxed: RelationalStructure,
}

impl PcspTemplate {
    pub fn new(strict: RelationalStructure, relaxed: RelationalStructure) -> Result<Self> {
        Self::with_budget(strict, relaxed, Budget::default())
    }

    pub fn with_budget(strict: RelationalStructure, relaxed: RelationalStructure, budget: Budget) -> Result<Self> {
        strict.ensure_similar(&relaxed)?;
        if find_homomorphism(&strict, &relaxed, budget)?.is_none() {
            return Err(Error::structural(
                "no homomorphism from the strict to the relaxed structure",
            ));
        }
        Ok(PcspTemplate { strict, relaxed })
    }

    /// The CSP template `(A, A)`.
    pub fn csp(structure: RelationalStructure) -> Self {
        PcspTemplate {
            strict: structure.clone(),
            relaxed: structure,
        }
    }

    pub fn strict(&self) -> &RelationalStructure {
        &self.strict
    }

    pub fn relaxed(&self) -> &RelationalStructure {
        &self.relaxed
    }

    pub fn side(&self, side: Side) -> &RelationalStructure {
        match side {
            Side::Strict => &self.strict,
            Side::Relaxed => &self.relaxed,
        }
    }
}

/// Which structure of a template an assignment ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Strict,
    Relaxed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub scope: Vec<usize>,
    pub relation: String,
}

/// Variables plus constraints naming template relations. Scopes may repeat variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    variables: Vec<String>,
    constraints: Vec<Constraint>,
}

impl Instance {
    pub fn new(variables: Vec<String>, constraints: Vec<Constraint>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &variables {
            if !seen.insert(v.as_str()) {
                return Err(Error::structural(format!("duplicate variable `{v}`")));
            }
        }
        for (i, c) in constraints.iter().enumerate() {
            if c.scope.is_empty() {
                return Err(Error::structural(format!("constraint {i} has an empty scope")));
            }
            if let Some(&v) = c.scope.iter().find(|&&v| v >= variables.len()) {
                return Err(Error::structural(format!(
                    "constraint {i} references unknown variable index {v}"
                )));
            }
        }
        Ok(Instance { variables, constraints })
    }

    /// Builds an instance from labelled scopes.
    pub fn from_labels<S: AsRef<str>>(variables: &[S], constraints: &[(&[S], &str)]) -> Result<Self> {
        let variables: Vec<String> = variables.iter().map(|s| s.as_ref().to_owned()).collect();
        let lookup: HashMap<&str, usize> = variables.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let constraints = constraints
            .iter()
            .map(|(scope, rel)| {
                let scope = scope
                    .iter()
                    .map(|v| {
                        lookup
                            .get(v.as_ref())
                            .copied()
                            .ok_or_else(|| Error::structural(format!("unknown variable `{}`", v.as_ref())))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Constraint {
                    scope,
                    relation: (*rel).to_owned(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(variables, constraints)
    }

    /// The instance whose variables are the atoms of `structure` and whose
    /// constraints are its tuples; its solutions over `B` are the homomorphisms.
    pub fn canonical(structure: &RelationalStructure) -> Self {
        let constraints = structure
            .relations
            .iter()
            .flat_map(|(name, rel)| {
                rel.tuples.iter().map(move |t| Constraint {
                    scope: t.clone(),
                    relation: name.clone(),
                })
            })
            .collect();
        Instance {
            variables: structure.domain.clone(),
            constraints,
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn variable(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Checks every constraint names a relation of `structure` with matching arity.
    pub fn validate_against(&self, structure: &RelationalStructure) -> Result<()> {
        for (i, c) in self.constraints.iter().enumerate() {
            let rel = structure.relation(&c.relation).ok_or_else(|| {
                Error::structural(format!(
                    "constraint {i} uses relation `{}` missing from the template",
                    c.relation
                ))
            })?;
            if rel.arity() != c.scope.len() {
                return Err(Error::structural(format!(
                    "constraint {i} has scope length {} but `{}` has arity {}",
                    c.scope.len(),
                    c.relation,
                    rel.arity()
                )));
            }
        }
        Ok(())
    }

    /// Largest number of distinct variables in one scope.
    pub fn max_scope_width(&self) -> usize {
        self.constraints
            .iter()
            .map(|c| c.scope.iter().collect::<BTreeSet<_>>().len())
            .max()
            .unwrap_or(0)
    }
}

/// A total map from instance variables to domain atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub values: Vec<usize>,
}

impl Assignment {
    pub fn new(values: Vec<usize>) -> Self {
        Assignment { values }
    }

    /// `h ∘ f` for an atom map `h`.
    pub fn compose(&self, h: &[usize]) -> Assignment {
        Assignment {
            values: self.values.iter().map(|&a| h[a]).collect(),
        }
    }
}

/// Indices of the constraints violated by `f`; empty iff `f` is a solution.
pub fn evaluate(instance: &Instance, side: &RelationalStructure, f: &Assignment) -> Result<Vec<usize>> {
    instance.validate_against(side)?;
    if f.values.len() != instance.num_variables() {
        return Err(Error::input(format!(
            "assignment covers {} of {} variables",
            f.values.len(),
            instance.num_variables()
        )));
    }
    if let Some(&a) = f.values.iter().find(|&&a| a >= side.domain_size()) {
        return Err(Error::input(format!("value {a} is outside the domain")));
    }
    let mut buf = Vec::new();
    Ok(instance
        .constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            buf.clear();
            buf.extend(c.scope.iter().map(|&v| f.values[v]));
            !side.relations[&c.relation].contains(&buf)
        })
        .map(|(i, _)| i)
        .collect())
}

/// The structure of all nonempty relations of arity `1..=m` on an
/// `n`-element domain labelled `0..n`: its CSP is the m-CSP over that domain.
pub fn mcsp_structure(domain_size: usize, m: usize) -> Result<RelationalStructure> {
    let domain: Vec<String> = (0..domain_size).map(|a| a.to_string()).collect();
    let mut relations = BTreeMap::new();
    for arity in 1..=m {
        let all: Vec<Vec<usize>> =
            itertools::Itertools::multi_cartesian_product((0..arity).map(|_| 0..domain_size)).collect();
        if all.len() >= 64 {
            return Err(Error::resource(format!(
                "{} tuples of arity {arity}: too many relations to list",
                all.len()
            )));
        }
        for mask in 1u64..(1u64 << all.len()) {
            let tuples: Vec<Vec<usize>> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, t)| t.clone())
                .collect();
            relations.insert(relation_name(&domain, &tuples), Relation::new(arity, tuples)?);
        }
    }
    RelationalStructure::new(domain, relations)
}

/// Canonical name listing a relation's tuples, e.g. `{0.1|1.0}`.
pub fn relation_name(domain: &[String], tuples: &[Vec<usize>]) -> String {
    let mut sorted: Vec<&Vec<usize>> = tuples.iter().collect();
    sorted.sort();
    let body: Vec<String> = sorted
        .iter()
        .map(|t| t.iter().map(|&a| domain[a].as_str()).collect::<Vec<_>>().join("."))
        .collect();
    format!("{{{}}}", body.join("|"))
}
