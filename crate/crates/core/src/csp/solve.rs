//! Exhaustive backtracking search, used as the oracle everywhere else.

use super::{Assignment, Instance, Relation, RelationalStructure};
use crate::error::{Error, Result};

/// Cap on the number of (variable, value) trials one search may make.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
}

impl Budget {
    pub const DEFAULT_NODES: u64 = 10_000_000;

    pub fn new(max_nodes: u64) -> Self {
        Budget { max_nodes }
    }

    pub fn unlimited() -> Self {
        Budget { max_nodes: u64::MAX }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: Self::DEFAULT_NODES,
        }
    }
}

/// Backtracking solver over variables in declaration order and values in
/// domain order, so the first solution found is the lexicographically first.
#[derive(Clone, Copy, Debug, Default)]
pub struct Solver {
    budget: Budget,
}

struct Check<'a> {
    scope: &'a [usize],
    relation: &'a Relation,
}

impl Solver {
    pub fn new(budget: Budget) -> Self {
        Solver { budget }
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn solve(&self, inst: &Instance, side: &RelationalStructure) -> Result<Option<Assignment>> {
        let mut found = None;
        self.search(inst, side, |values| {
            found = Some(Assignment::new(values.to_vec()));
            false
        })?;
        Ok(found)
    }

    pub fn all_solutions(&self, inst: &Instance, side: &RelationalStructure) -> Result<Vec<Assignment>> {
        let mut out = Vec::new();
        self.search(inst, side, |values| {
            out.push(Assignment::new(values.to_vec()));
            true
        })?;
        Ok(out)
    }

    /// Calls `visit` on each solution in lexicographic order until it returns false.
    pub fn search(
        &self,
        inst: &Instance,
        side: &RelationalStructure,
        mut visit: impl FnMut(&[usize]) -> bool,
    ) -> Result<()> {
        inst.validate_against(side)?;
        let n = inst.num_variables();
        let q = side.domain_size();
        // each constraint is checked once its last variable is set
        let mut checks: Vec<Vec<Check>> = (0..n).map(|_| Vec::new()).collect();
        for c in inst.constraints() {
            let last = *c.scope.iter().max().expect("scopes are nonempty");
            checks[last].push(Check {
                scope: &c.scope,
                relation: &side.relations()[&c.relation],
            });
        }
        if n == 0 {
            visit(&[]);
            return Ok(());
        }
        let mut values = vec![0usize; n];
        let mut next = vec![0usize; n];
        let mut buf = Vec::new();
        let mut nodes: u64 = 0;
        let mut depth = 0usize;
        loop {
            if next[depth] == q {
                next[depth] = 0;
                if depth == 0 {
                    return Ok(());
                }
                depth -= 1;
                continue;
            }
            nodes += 1;
            if nodes > self.budget.max_nodes {
                return Err(Error::resource(format!(
                    "search budget of {} nodes exhausted ({} variables, domain size {})",
                    self.budget.max_nodes, n, q
                )));
            }
            values[depth] = next[depth];
            next[depth] += 1;
            let ok = checks[depth].iter().all(|c| {
                buf.clear();
                buf.extend(c.scope.iter().map(|&v| values[v]));
                c.relation.contains(&buf)
            });
            if !ok {
                continue;
            }
            if depth + 1 == n {
                if !visit(&values) {
                    return Ok(());
                }
            } else {
                depth += 1;
            }
        }
    }
}

impl Solver {
    /// Some solution, not necessarily the first. Connected components are
    /// solved separately, choosing the variable with the fewest remaining
    /// values and pruning by forward checking. Meant for large instances
    /// where only satisfiability matters.
    pub fn find_any(&self, inst: &Instance, side: &RelationalStructure) -> Result<Option<Assignment>> {
        inst.validate_against(side)?;
        let q = side.domain_size();
        if q > 64 {
            return self.solve(inst, side);
        }
        let n = inst.num_variables();
        let full = if q == 64 { u64::MAX } else { (1u64 << q) - 1 };
        let mut search = AnySearch {
            scopes: inst.constraints().iter().map(|c| c.scope.as_slice()).collect(),
            relations: inst
                .constraints()
                .iter()
                .map(|c| &side.relations()[&c.relation])
                .collect(),
            touching: vec![Vec::new(); n],
            dom: vec![full; n],
            values: vec![usize::MAX; n],
            trail: Vec::new(),
            buf: Vec::new(),
            nodes: 0,
            budget: self.budget,
        };
        let mut uf = petgraph::unionfind::UnionFind::<usize>::new(n);
        for c in 0..search.scopes.len() {
            let mut vars: Vec<usize> = search.scopes[c].to_vec();
            vars.sort_unstable();
            vars.dedup();
            for &v in &vars {
                search.touching[v].push(c);
                uf.union(vars[0], v);
            }
            if vars.len() == 1 && !search.filter(vars[0], c) {
                return Ok(None);
            }
        }
        let mut components: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for v in 0..n {
            let root = uf.find(v);
            if slot[root] == usize::MAX {
                slot[root] = components.len();
                components.push(Vec::new());
            }
            components[slot[root]].push(v);
        }
        for comp in &components {
            if !search.solve_component(comp)? {
                return Ok(None);
            }
        }
        Ok(Some(Assignment::new(search.values)))
    }
}

struct AnySearch<'a> {
    scopes: Vec<&'a [usize]>,
    relations: Vec<&'a Relation>,
    touching: Vec<Vec<usize>>,
    dom: Vec<u64>,
    values: Vec<usize>,
    trail: Vec<(usize, u64)>,
    buf: Vec<usize>,
    nodes: u64,
    budget: Budget,
}

impl AnySearch<'_> {
    /// Keeps the values of `u` that satisfy constraint `c`, all of whose
    /// other variables are assigned. False if none remain.
    fn filter(&mut self, u: usize, c: usize) -> bool {
        let mut keep = 0u64;
        let mut bits = self.dom[u];
        while bits != 0 {
            let a = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            self.buf.clear();
            for &v in self.scopes[c] {
                self.buf.push(if v == u { a } else { self.values[v] });
            }
            if self.relations[c].contains(&self.buf) {
                keep |= 1 << a;
            }
        }
        if keep != self.dom[u] {
            self.trail.push((u, self.dom[u]));
            self.dom[u] = keep;
        }
        keep != 0
    }

    fn propagate(&mut self, var: usize) -> bool {
        for i in 0..self.touching[var].len() {
            let c = self.touching[var][i];
            let mut open = None;
            let mut several = false;
            for &v in self.scopes[c] {
                if self.values[v] == usize::MAX {
                    match open {
                        None => open = Some(v),
                        Some(u) if u != v => several = true,
                        _ => {}
                    }
                }
            }
            if several {
                continue;
            }
            match open {
                Some(u) => {
                    if !self.filter(u, c) {
                        return false;
                    }
                }
                None => {
                    self.buf.clear();
                    self.buf.extend(self.scopes[c].iter().map(|&v| self.values[v]));
                    if !self.relations[c].contains(&self.buf) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn pick(&self, comp: &[usize]) -> Option<usize> {
        comp.iter()
            .copied()
            .filter(|&v| self.values[v] == usize::MAX)
            .min_by_key(|&v| self.dom[v].count_ones())
    }

    fn solve_component(&mut self, comp: &[usize]) -> Result<bool> {
        // frames: (variable, untried values, trail length before it)
        let mut stack: Vec<(usize, u64, usize)> = Vec::new();
        let Some(first) = self.pick(comp) else {
            return Ok(true);
        };
        stack.push((first, self.dom[first], self.trail.len()));
        while let Some(frame) = stack.last_mut() {
            let (var, mark) = (frame.0, frame.2);
            while self.trail.len() > mark {
                let (v, d) = self.trail.pop().expect("nonempty trail");
                self.dom[v] = d;
            }
            self.values[var] = usize::MAX;
            if frame.1 == 0 {
                stack.pop();
                continue;
            }
            let a = frame.1.trailing_zeros() as usize;
            frame.1 &= frame.1 - 1;
            self.nodes += 1;
            if self.nodes > self.budget.max_nodes {
                return Err(Error::resource(format!(
                    "search budget of {} nodes exhausted ({} variables in one component)",
                    self.budget.max_nodes,
                    comp.len()
                )));
            }
            self.values[var] = a;
            self.trail.push((var, self.dom[var]));
            self.dom[var] = 1 << a;
            if !self.propagate(var) {
                continue;
            }
            match self.pick(comp) {
                None => return Ok(true),
                Some(next) => stack.push((next, self.dom[next], self.trail.len())),
            }
        }
        Ok(false)
    }
}

/// First solution in lexicographic order, under the default budget.
pub fn brute_force_solve(inst: &Instance, side: &RelationalStructure) -> Result<Option<Assignment>> {
    Solver::default().solve(inst, side)
}

/// Every solution, lexicographically ordered, under the default budget.
pub fn all_solutions(inst: &Instance, side: &RelationalStructure) -> Result<Vec<Assignment>> {
    Solver::default().all_solutions(inst, side)
}

/// Partial solutions on `vars` (sorted variable indices): maps `vars -> A`
/// satisfying every constraint whose scope lies inside `vars`. Values are
/// listed in the order of `vars`.
pub fn partial_solutions(
    inst: &Instance,
    side: &RelationalStructure,
    vars: &[usize],
    budget: Budget,
) -> Result<Vec<Vec<usize>>> {
    let mut position = vec![usize::MAX; inst.num_variables()];
    for (i, &v) in vars.iter().enumerate() {
        position[v] = i;
    }
    let constraints = inst
        .constraints()
        .iter()
        .filter(|c| c.scope.iter().all(|&v| position[v] != usize::MAX))
        .map(|c| super::Constraint {
            scope: c.scope.iter().map(|&v| position[v]).collect(),
            relation: c.relation.clone(),
        })
        .collect();
    let names = vars.iter().map(|&v| inst.variables()[v].clone()).collect();
    let sub = Instance::new(names, constraints)?;
    Ok(Solver::new(budget)
        .all_solutions(&sub, side)?
        .into_iter()
        .map(|a| a.values)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::{evaluate, tests::k};
    use super::*;

    fn cycle(n: usize) -> Instance {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let cons = (0..n)
            .map(|i| super::super::Constraint {
                scope: vec![i, (i + 1) % n],
                relation: "neq".into(),
            })
            .collect();
        Instance::new(names, cons).unwrap()
    }

    #[test]
    fn odd_cycle_not_two_colourable() {
        assert!(brute_force_solve(&cycle(5), &k(2)).unwrap().is_none());
    }

    #[test]
    fn five_cycle_three_colouring_is_lexicographically_first() {
        let f = brute_force_solve(&cycle(5), &k(3)).unwrap().unwrap();
        assert_eq!(f.values, vec![0, 1, 0, 1, 2]);
        assert!(evaluate(&cycle(5), &k(3), &f).unwrap().is_empty());
    }

    #[test]
    fn unconstrained_variable_gets_first_value() {
        let inst = Instance::from_labels::<&str>(&["x"], &[]).unwrap();
        assert_eq!(brute_force_solve(&inst, &k(2)).unwrap().unwrap().values, vec![0]);
    }

    #[test]
    fn all_solutions_examples() {
        let edge = Instance::from_labels(&["x", "y"], &[(&["x", "y"], "neq")]).unwrap();
        let sols: Vec<Vec<usize>> = all_solutions(&edge, &k(2))
            .unwrap()
            .into_iter()
            .map(|a| a.values)
            .collect();
        assert_eq!(sols, vec![vec![0, 1], vec![1, 0]]);
        assert!(all_solutions(&cycle(3), &k(2)).unwrap().is_empty());
        let free = Instance::from_labels::<&str>(&["x", "y"], &[]).unwrap();
        assert_eq!(all_solutions(&free, &k(2)).unwrap().len(), 4);
    }

    #[test]
    fn find_any_agrees_with_search() {
        for n in 3..9 {
            for q in 2..4 {
                let any = Solver::default().find_any(&cycle(n), &k(q)).unwrap();
                let first = brute_force_solve(&cycle(n), &k(q)).unwrap();
                assert_eq!(any.is_some(), first.is_some());
                if let Some(f) = any {
                    assert!(evaluate(&cycle(n), &k(q), &f).unwrap().is_empty());
                }
            }
        }
        let inst = Instance::from_labels(&["x", "y"], &[(&["x", "x"], "neq")]).unwrap();
        assert!(Solver::default().find_any(&inst, &k(2)).unwrap().is_none());
    }

    #[test]
    fn budget_is_reported() {
        let err = Solver::new(Budget::new(10))
            .all_solutions(&cycle(9), &k(3))
            .unwrap_err();
        assert!(matches!(err, Error::Resource(ref m) if m.contains("10 nodes")));
    }

    #[test]
    fn repeated_scope_variables() {
        let inst = Instance::from_labels(&["x"], &[(&["x", "x"], "neq")]).unwrap();
        assert!(brute_force_solve(&inst, &k(3)).unwrap().is_none());
    }

    #[test]
    fn partial_solutions_restrict_to_inner_constraints() {
        let path = Instance::from_labels(&["x", "y", "z"], &[(&["x", "y"], "neq"), (&["y", "z"], "neq")]).unwrap();
        let d = partial_solutions(&path, &k(2), &[0, 2], Budget::default()).unwrap();
        assert_eq!(d.len(), 4);
        let d = partial_solutions(&path, &k(2), &[0, 1], Budget::default()).unwrap();
        assert_eq!(d, vec![vec![0, 1], vec![1, 0]]);
    }
}
