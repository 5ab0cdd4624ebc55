//! Recursive extraction of an `m`-solution from a consistent PAS sequence.

use std::collections::BTreeMap;

use serde::Serialize;

use super::params::{capped, GapParameters, ParamInt};
use super::property::{
    find_split_selector, find_value1_selector, has_property, refine, solve_value1, split_to1, Property, SelectorSearch,
};
use super::{check_consistent, is_m_solution, Pas, PasSequence};
use crate::error::{Error, Result};
use crate::subset::{all_tuples, k_subsets, k_subsets_of, project, supersets, Subset};

/// A solved sequence: `solution` is an `m`-solution of system `index`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extraction {
    pub index: usize,
    pub solution: Vec<usize>,
    pub trace: Vec<TraceEvent>,
}

/// One step of the extraction, for auditing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// System 0 covers all variables, so any of its maps is a solution.
    WholeUniverse {
        depth: usize,
    },
    Value1Solved {
        depth: usize,
        index: usize,
    },
    Value1Blocked {
        depth: usize,
        index: usize,
        variable: usize,
    },
    Split {
        depth: usize,
        index: usize,
    },
    SplitBlocked {
        depth: usize,
        index: usize,
        set: Vec<usize>,
    },
    PAssignment {
        depth: usize,
        set: Vec<usize>,
        map: Vec<usize>,
    },
    /// Entries of the new system 0 that lost every map and were refilled.
    Refilled {
        depth: usize,
        count: usize,
    },
    Recurse {
        depth: usize,
        values: Vec<usize>,
        arities: Vec<usize>,
    },
    Solved {
        depth: usize,
        index: usize,
    },
}

/// Finds `(i, f)` with `f` an `m`-solution of `seq[i]`.
///
/// The sequence must be consistent, each `seq[i]` must have value at most
/// `d_i`, and its arities must be exactly `params.k` (arities above the
/// number of variables are read as the number of variables, and so is `m`).
/// The answer is checked against the input before it is returned.
pub fn extract_solution<T: ParamInt>(seq: &PasSequence, params: &GapParameters<T>, m: usize) -> Result<Extraction> {
    if !check_consistent(seq)?.is_consistent() {
        return Err(Error::structural("the PAS sequence is not consistent"));
    }
    let mut trace = Vec::new();
    let (index, solution) = Extractor { trace: &mut trace, m }.run(seq, params, 0)?;
    Ok(Extraction { index, solution, trace })
}

struct Extractor<'a> {
    trace: &'a mut Vec<TraceEvent>,
    m: usize,
}

impl Extractor<'_> {
    fn check_shape<T: ParamInt>(&self, seq: &PasSequence, params: &GapParameters<T>) -> Result<()> {
        let n = seq.num_variables();
        if params.values.len() != seq.len() {
            return Err(Error::parameter(format!(
                "{} systems but {} values",
                seq.len(),
                params.values.len()
            )));
        }
        if params.m != self.m || params.domain_size != seq.domain_size() {
            return Err(Error::parameter(format!(
                "parameters are for |A| = {}, m = {}, the input has |A| = {}, m = {}",
                params.domain_size,
                params.m,
                seq.domain_size(),
                self.m
            )));
        }
        let want = params.arities_capped(n);
        if seq.arities() != want {
            return Err(Error::parameter(format!(
                "arities {:?} differ from the required {want:?}",
                seq.arities()
            )));
        }
        if self.m.min(n) > want[want.len() - 1] {
            return Err(Error::parameter(format!("m = {} exceeds the smallest arity", self.m)));
        }
        for (i, (pas, &d)) in seq.systems().iter().zip(&params.values).enumerate() {
            if pas.value() > d {
                return Err(Error::input(format!(
                    "system {i} has value {} above d_{i} = {d}",
                    pas.value()
                )));
            }
        }
        Ok(())
    }

    fn verified(&mut self, depth: usize, pas: &Pas, index: usize, f: Vec<usize>) -> Result<(usize, Vec<usize>)> {
        // with fewer than m variables, a solution is an n-solution
        if !is_m_solution(&f, pas, self.m.min(pas.num_variables()))? {
            return Err(Error::internal(format!(
                "candidate {f:?} is not an {}-solution of system {index} at depth {depth}; trace: {:?}",
                self.m, self.trace
            )));
        }
        self.trace.push(TraceEvent::Solved { depth, index });
        Ok((index, f))
    }

    fn run<T: ParamInt>(
        &mut self,
        seq: &PasSequence,
        params: &GapParameters<T>,
        depth: usize,
    ) -> Result<(usize, Vec<usize>)> {
        self.check_shape(seq, params)?;
        let n = seq.num_variables();
        let sys = seq.systems();
        let r = sys.len() - 1;

        if sys[0].arity() == n {
            self.trace.push(TraceEvent::WholeUniverse { depth });
            let g = sys[0].entry(Subset::full(n))[0].clone();
            return self.verified(depth, &sys[0], 0, g);
        }

        let l: Vec<usize> = params.l.iter().map(|x| capped(x, usize::MAX)).collect();

        // Step 1: each system on its own.
        let mut blocking = vec![Subset::EMPTY; r + 1];
        for i in 1..=r {
            if params.values[i] == 1 {
                match find_value1_selector(&sys[i], l[i])? {
                    SelectorSearch::Found(sel) => {
                        self.trace.push(TraceEvent::Value1Solved { depth, index: i });
                        let s = solve_value1(&sys[i], l[i], &sel)?;
                        return self.verified(depth, &sys[i], i, s);
                    }
                    SelectorSearch::Blocked(x) => {
                        let variable = x.iter().next().expect("singleton");
                        self.trace.push(TraceEvent::Value1Blocked {
                            depth,
                            index: i,
                            variable,
                        });
                        blocking[i] = x;
                    }
                }
            } else {
                let (kdd, kd) = params.split[i]
                    .as_ref()
                    .ok_or_else(|| Error::parameter(format!("no split arities at index {i}")))?;
                let (kdd, kd) = (capped(kdd, n), capped(kd, n));
                let sub = params.split_params[i]
                    .as_ref()
                    .ok_or_else(|| Error::parameter(format!("no nested record at index {i}")))?;
                match find_split_selector(&sys[i], l[i], kd)? {
                    SelectorSearch::Found(sel) => {
                        self.trace.push(TraceEvent::Split { depth, index: i });
                        let (refined, singles) = split_to1(&sys[i], l[i], kd, kdd, &sel)?;
                        let pair = PasSequence::new(vec![refined, singles])?;
                        self.trace.push(TraceEvent::Recurse {
                            depth,
                            values: sub.values.clone(),
                            arities: pair.arities(),
                        });
                        let (_, f) = self.run(&pair, sub, depth + 1)?;
                        return self.verified(depth, &sys[i], i, f);
                    }
                    SelectorSearch::Blocked(x) => {
                        self.trace.push(TraceEvent::SplitBlocked {
                            depth,
                            index: i,
                            set: x.members(),
                        });
                        blocking[i] = x;
                    }
                }
            }
        }

        // Step 2: a map on the union of blocking sets with property P in system 0.
        let x = blocking.iter().fold(Subset::EMPTY, |acc, b| acc.union(*b));
        let k0 = sys[0].arity();
        if l[0].saturating_add(x.len()) > k0 {
            return Err(Error::parameter(format!(
                "k_0 = {k0} cannot host X of size {} together with l_0 = {}; use conservative k_0",
                x.len(),
                l[0]
            )));
        }
        let mut f = None;
        for cand in all_tuples(seq.domain_size(), x.len()) {
            if has_property(&sys[0], x, &cand, l[0], Property::P)?.holds {
                f = Some(cand);
                break;
            }
        }
        let f = f.ok_or_else(|| {
            Error::parameter(format!(
                "no map on {x:?} has {}-property P in system 0; k_0 = {k0} is too small",
                l[0]
            ))
        })?;
        self.trace.push(TraceEvent::PAssignment {
            depth,
            set: x.members(),
            map: f.clone(),
        });

        // Step 3: refinements from the last system down.
        let p: Vec<usize> = params.p.iter().map(|v| capped(v, n)).collect();
        let mut ex: Vec<BTreeMap<Subset, Subset>> = vec![BTreeMap::new(); r + 1];
        for i in (0..=r).rev() {
            let xi = if i == 0 { x } else { blocking[i] };
            let fi = project(&f, x, xi);
            let pas = &sys[i];
            for y in k_subsets(n, p[i]) {
                let mut w = y;
                for j in i + 1..=r {
                    for z in k_subsets_of(y, p[j]) {
                        w = w.union(ex[j][&z]);
                    }
                }
                let wanted = |u: &Subset| {
                    let mut hits = pas.entry(*u).iter().map(|g| project(g, *u, xi) == fi);
                    if i == 0 {
                        hits.any(|h| h)
                    } else {
                        !hits.any(|h| h)
                    }
                };
                let u = supersets(xi.union(w), n, pas.arity()).find(wanted).ok_or_else(|| {
                    Error::internal(format!(
                        "no {}-set around {w:?} realises the property for system {i}; trace: {:?}",
                        pas.arity(),
                        self.trace
                    ))
                })?;
                ex[i].insert(y, u);
            }
        }

        let mut refined = Vec::with_capacity(r + 1);
        let mut refilled = 0;
        let mut entries = Vec::new();
        for (&y, &u) in &ex[0] {
            let maps = sys[0].entry(u);
            let mut kept: Vec<Vec<usize>> = maps
                .iter()
                .filter(|g| project(g, u, x) != f)
                .map(|g| project(g, u, y))
                .collect();
            if kept.is_empty() {
                if params.values[0] < 2 {
                    return Err(Error::internal(format!(
                        "value-0 entry at {y:?} with d_0 = 1; trace: {:?}",
                        self.trace
                    )));
                }
                // Every map here extends f, so no chain through this entry
                // relies on system 0; any single projection keeps the value.
                refilled += 1;
                kept.push(project(&maps[0], u, y));
            }
            entries.push((y, kept));
        }
        if refilled > 0 {
            self.trace.push(TraceEvent::Refilled { depth, count: refilled });
        }
        refined.push(Pas::new(n, seq.domain_size(), p[0], entries)?);
        for i in 1..=r {
            refined.push(refine(&sys[i], p[i], &ex[i])?);
        }
        let next = PasSequence::new(refined)?;
        if !check_consistent(&next)?.is_consistent() {
            return Err(Error::internal(format!(
                "refined sequence is not consistent; trace: {:?}",
                self.trace
            )));
        }
        let reduced = params
            .reduced
            .as_ref()
            .ok_or_else(|| Error::internal("step 3 reached with d_0 = 1, which a consistent input cannot do"))?;
        self.trace.push(TraceEvent::Recurse {
            depth,
            values: reduced.values.clone(),
            arities: next.arities(),
        });
        let (j, g) = self.run(&next, reduced, depth + 1)?;
        self.verified(depth, &sys[j], j, g)
    }
}
