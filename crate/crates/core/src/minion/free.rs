//! Free PCSP templates and partial-map constraints over them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::preimage_along_injection;
use super::slice::Minion;
use super::{minor, FiniteFunction};
use crate::csp::{mcsp_structure, relation_name, PcspTemplate, Relation, RelationalStructure};
use crate::error::{Error, Result};

/// Tuples `(s_1, …, s_m)` of `C`-ary members, given as indices into
/// `minion.members(c)`, such that some `R`-ary member has `s_i` as its
/// minor along the `i`-th projection `R -> C`.
pub fn free_relation(c: usize, minion: &dyn Minion, rel: &Relation) -> Result<BTreeSet<Vec<usize>>> {
    if rel.is_empty() {
        return Err(Error::input("free relations are taken of nonempty relations"));
    }
    if rel.tuples().iter().flatten().any(|&x| x >= c) {
        return Err(Error::input(format!("relation has a value outside 0..{c}")));
    }
    let targets = minion.members(c)?;
    let position: HashMap<&FiniteFunction, usize> = targets.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let projections: Vec<Vec<usize>> = (0..rel.arity())
        .map(|i| rel.tuples().iter().map(|tuple| tuple[i]).collect())
        .collect();
    let mut out = BTreeSet::new();
    for t in minion.members(rel.len())? {
        let tuple = projections
            .iter()
            .map(|proj| {
                let s = minor(&t, proj, c)?;
                position
                    .get(&s)
                    .copied()
                    .ok_or_else(|| Error::structural(format!("minion is not closed: {s:?} is missing")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.insert(tuple);
    }
    Ok(out)
}

/// A free template together with the members labelling its relaxed domain.
#[derive(Clone, Debug)]
pub struct FreeTemplate {
    pub template: PcspTemplate,
    /// `C`-ary members; relaxed atom `s{i}` is `members[i]`.
    pub members: Vec<FiniteFunction>,
}

/// The `m`-ary free template on `0..c`. With `requested`, only those strict
/// relations are built (each of arity at most `m`); otherwise every nonempty
/// relation of arity at most `m` is listed.
pub fn build_free_template(
    m: usize,
    c: usize,
    minion: &dyn Minion,
    requested: Option<&[Relation]>,
) -> Result<FreeTemplate> {
    if m == 0 || c == 0 {
        return Err(Error::input("m and |C| must be positive"));
    }
    let strict = match requested {
        None => mcsp_structure(c, m)?,
        Some(rels) => {
            let domain: Vec<String> = (0..c).map(|a| a.to_string()).collect();
            let mut map = BTreeMap::new();
            for rel in rels {
                if rel.arity() > m {
                    return Err(Error::input(format!("relation of arity {} above m = {m}", rel.arity())));
                }
                let tuples: Vec<Vec<usize>> = rel.tuples().iter().cloned().collect();
                map.insert(relation_name(&domain, &tuples), rel.clone());
            }
            RelationalStructure::new(domain, map)?
        }
    };
    let members = minion.members(c)?;
    if members.is_empty() {
        return Err(Error::structural(format!("the minion has no members of arity {c}")));
    }
    let mut relaxed_rels = BTreeMap::new();
    for (name, rel) in strict.relations() {
        let tuples = free_relation(c, minion, rel)?;
        relaxed_rels.insert(name.clone(), Relation::new(rel.arity(), tuples)?);
    }
    let relaxed = RelationalStructure::new((0..members.len()).map(|i| format!("s{i}")).collect(), relaxed_rels)?;
    Ok(FreeTemplate {
        template: PcspTemplate::new(strict, relaxed)?,
        members,
    })
}

/// The graph `{(c1[i], c2[pi[i]])}` of a map between subsets of `C`.
pub fn graph_relation(c1: &[usize], c2: &[usize], pi: &[usize]) -> Result<Relation> {
    check_partial_map(usize::MAX, c1, c2, pi)?;
    Relation::new(2, c1.iter().zip(pi).map(|(&a, &j)| vec![a, c2[j]]))
}

fn check_partial_map(c: usize, c1: &[usize], c2: &[usize], pi: &[usize]) -> Result<()> {
    for set in [c1, c2] {
        if set.is_empty() || set.windows(2).any(|w| w[0] >= w[1]) || set[set.len() - 1] >= c {
            return Err(Error::input("subsets of C must be nonempty, sorted and in range"));
        }
    }
    if pi.len() != c1.len() || pi.iter().any(|&j| j >= c2.len()) {
        return Err(Error::input("the map must send every element of C1 into C2"));
    }
    Ok(())
}

/// The unique `(t1, t2)` of arities `|C1|`, `|C2|` with `t_i` having minor
/// `s_i` along the inclusion `C_i ⊆ C` and `t1 --pi--> t2`, when it exists.
/// `pi[i]` is the position in `c2` of the image of `c1[i]`.
pub fn decode_partial_map_constraint(
    s1: &FiniteFunction,
    s2: &FiniteFunction,
    c1: &[usize],
    c2: &[usize],
    pi: &[usize],
    minion: &dyn Minion,
) -> Result<Option<(FiniteFunction, FiniteFunction)>> {
    if s1.arity() != s2.arity() {
        return Err(Error::input("both functions must be C-ary"));
    }
    check_partial_map(s1.arity(), c1, c2, pi)?;
    let (Some(t1), Some(t2)) = (preimage_along_injection(s1, c1)?, preimage_along_injection(s2, c2)?) else {
        return Ok(None);
    };
    if !minion.contains(&t1)? || !minion.contains(&t2)? {
        return Ok(None);
    }
    if minor(&t1, pi, c2.len())? != t2 {
        return Ok(None);
    }
    Ok(Some((t1, t2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::tests::k;
    use crate::csp::Budget;
    use crate::minion::{DictatorMinion, PolymorphismMinion};

    const DICT: DictatorMinion = DictatorMinion { size: 2 };

    #[test]
    fn dictator_free_relations() {
        let eq = Relation::new(2, vec![vec![0, 0], vec![1, 1]]).unwrap();
        let rel = free_relation(2, &DICT, &eq).unwrap();
        // members(2) = [e_1, e_0] in table order
        let e = |c: usize| {
            DICT.members(2)
                .unwrap()
                .iter()
                .position(|t| t.as_dictator() == Some(c))
                .unwrap()
        };
        assert_eq!(rel, BTreeSet::from([vec![e(0), e(0)], vec![e(1), e(1)]]));

        let full = Relation::new(2, crate::subset::all_tuples(2, 2)).unwrap();
        assert_eq!(free_relation(2, &DICT, &full).unwrap().len(), 4);
    }

    #[test]
    fn constant_graph_forces_second_component() {
        let pol = PolymorphismMinion {
            template: PcspTemplate::csp(k(2)),
            budget: Budget::default(),
        };
        let constant = Relation::new(2, vec![vec![0, 1], vec![1, 1]]).unwrap();
        let rel = free_relation(2, &pol, &constant).unwrap();
        let seconds: BTreeSet<usize> = rel.iter().map(|t| t[1]).collect();
        assert_eq!(seconds.len(), 2);
        let members = pol.members(2).unwrap();
        for t in &rel {
            // the second component only depends on coordinate 1
            assert_eq!(members[t[1]].essential_coordinates(), vec![1]);
        }
    }

    #[test]
    fn full_template_counts() {
        let free = build_free_template(2, 2, &DICT, None).unwrap();
        assert_eq!(free.template.strict().relations().len(), 18);
        assert_eq!(free.members.len(), 2);
        let neq = Relation::new(2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let lazy = build_free_template(2, 2, &DICT, Some(&[neq])).unwrap();
        assert_eq!(lazy.template.strict().relations().len(), 1);
    }

    #[test]
    fn decoding_identity_constraint() {
        let e0 = FiniteFunction::dictator(2, 2, 2, 0).unwrap();
        let (t1, t2) = decode_partial_map_constraint(&e0, &e0, &[0, 1], &[0, 1], &[0, 1], &DICT)
            .unwrap()
            .unwrap();
        assert_eq!((t1.clone(), t2), (e0.clone(), e0.clone()));
        // strict subset: the dictator at 0 restricts to {0}
        let (t1, _) = decode_partial_map_constraint(&e0, &e0, &[0], &[0], &[0], &DICT)
            .unwrap()
            .unwrap();
        assert_eq!(t1, FiniteFunction::dictator(1, 2, 2, 0).unwrap());
        assert!(decode_partial_map_constraint(&e0, &e0, &[1], &[1], &[0], &DICT)
            .unwrap()
            .is_none());
    }
}
