//! Exhaustive decision of `val_{k_0,…,k_r}(Φ) <= d` for tiny instances.

use itertools::Itertools;

use super::{check_consistent, Pas, PasSequence};
use crate::csp::{partial_solutions, Budget, Instance, RelationalStructure};
use crate::error::{Error, Result};
use crate::subset::{k_subsets, k_subsets_of, Subset};

/// Whether some consistent sequence of the given arities, with entries of at
/// most `d` partial solutions each, exists for `inst`.
pub fn csp_value_oracle(
    inst: &Instance,
    side: &RelationalStructure,
    arities: &[usize],
    d: usize,
    budget: Budget,
) -> Result<bool> {
    Ok(csp_value_witness(inst, side, arities, d, budget)?.is_some())
}

struct Slot {
    system: usize,
    set: Subset,
    /// Candidate entries, each a sorted list of map indices into `maps`.
    choices: Vec<Vec<usize>>,
    maps: Vec<Vec<usize>>,
}

/// Like [`csp_value_oracle`], returning a witnessing sequence.
///
/// Arities above the number of variables are lowered to it. Consistency is
/// monotone in the entries, so only entries of size `min(d, |D_U|)` are
/// tried, where `D_U` is the set of partial solutions on `U`.
pub fn csp_value_witness(
    inst: &Instance,
    side: &RelationalStructure,
    arities: &[usize],
    d: usize,
    budget: Budget,
) -> Result<Option<PasSequence>> {
    let n = inst.num_variables();
    if arities.is_empty() || d == 0 {
        return Err(Error::input("need at least one arity and d >= 1"));
    }
    if n == 0 {
        return Err(Error::input("the instance has no variables"));
    }
    if arities.windows(2).any(|w| w[1] > w[0]) || arities.contains(&0) {
        return Err(Error::structural(format!(
            "arities {arities:?} must be positive and non-increasing"
        )));
    }
    let ks: Vec<usize> = arities.iter().map(|&k| k.min(n)).collect();
    let r = ks.len() - 1;

    let mut slots = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        for u in k_subsets(n, k) {
            let maps = partial_solutions(inst, side, &u.members(), budget)?;
            if maps.is_empty() {
                return Ok(None);
            }
            let size = d.min(maps.len());
            let choices = (0..maps.len()).combinations(size).collect();
            slots.push(Slot {
                system: i,
                set: u,
                choices,
                maps,
            });
        }
    }
    // Subsets sort before supersets by mask value, and for equal sets later
    // systems come first, so a chain is complete once its system-0 set is set.
    slots.sort_by_key(|s| (s.set.0, std::cmp::Reverse(s.system)));
    let index_of = |system: usize, set: Subset| {
        slots
            .iter()
            .position(|s| s.system == system && s.set == set)
            .expect("every set has a slot")
    };
    let lookup: Vec<Vec<(Subset, usize)>> = (0..=r)
        .map(|i| {
            let mut list: Vec<(Subset, usize)> = k_subsets(n, ks[i]).map(|u| (u, index_of(i, u))).collect();
            list.sort_by_key(|(u, _)| u.0);
            list
        })
        .collect();
    let slot_of = |system: usize, set: Subset| {
        let list = &lookup[system];
        list[list.binary_search_by_key(&set.0, |(u, _)| u.0).expect("slot exists")].1
    };

    let mut pick = vec![usize::MAX; slots.len()];
    let mut nodes: u64 = 0;
    let mut pos = 0;
    loop {
        if pos == slots.len() {
            break;
        }
        pick[pos] = pick[pos].wrapping_add(1);
        if pick[pos] >= slots[pos].choices.len() {
            pick[pos] = usize::MAX;
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            continue;
        }
        nodes += 1;
        if nodes > budget.max_nodes {
            return Err(Error::resource(format!(
                "value oracle exceeded the budget of {} nodes",
                budget.max_nodes
            )));
        }
        let ok = slots[pos].system != 0 || chains_hold(&slots, &pick, &ks, slots[pos].set, &slot_of);
        if ok {
            pos += 1;
        }
    }

    let mut systems = Vec::with_capacity(r + 1);
    for (i, &k) in ks.iter().enumerate() {
        let entries = k_subsets(n, k).map(|u| {
            let s = &slots[slot_of(i, u)];
            let chosen = &s.choices[pick[slot_of(i, u)]];
            (u, chosen.iter().map(|&c| s.maps[c].clone()).collect())
        });
        systems.push(Pas::new(n, side.domain_size(), k, entries.collect::<Vec<_>>())?);
    }
    let seq = PasSequence::new(systems)?;
    debug_assert!(check_consistent(&seq)?.is_consistent());
    Ok(Some(seq))
}

fn entry<'a>(slots: &'a [Slot], pick: &[usize], idx: usize) -> impl Iterator<Item = &'a Vec<usize>> {
    let s = &slots[idx];
    s.choices[pick[idx]].iter().map(move |&c| &s.maps[c])
}

fn agrees(slots: &[Slot], pick: &[usize], outer: usize, inner: usize) -> bool {
    let (uo, ui) = (slots[outer].set, slots[inner].set);
    let inner_maps: Vec<&Vec<usize>> = entry(slots, pick, inner).collect();
    entry(slots, pick, outer).any(|g| {
        let proj = crate::subset::project(g, uo, ui);
        inner_maps.iter().any(|h| **h == proj)
    })
}

/// Every chain starting at `top` in system 0 has an agreeing pair.
fn chains_hold(
    slots: &[Slot],
    pick: &[usize],
    ks: &[usize],
    top: Subset,
    slot_of: &dyn Fn(usize, Subset) -> usize,
) -> bool {
    let mut chain = vec![slot_of(0, top)];
    walk(slots, pick, ks, &mut chain, slot_of)
}

fn walk(
    slots: &[Slot],
    pick: &[usize],
    ks: &[usize],
    chain: &mut Vec<usize>,
    slot_of: &dyn Fn(usize, Subset) -> usize,
) -> bool {
    let last = *chain.last().expect("nonempty chain");
    let j = chain.len() - 1;
    if j > 0 && chain[..j].iter().any(|&outer| agrees(slots, pick, outer, last)) {
        return true;
    }
    if chain.len() == ks.len() {
        return false;
    }
    let next = chain.len();
    for u in k_subsets_of(slots[last].set, ks[next]) {
        chain.push(slot_of(next, u));
        let fine = walk(slots, pick, ks, chain, slot_of);
        chain.pop();
        if !fine {
            return false;
        }
    }
    true
}
