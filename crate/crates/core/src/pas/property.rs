//! The P/Q properties of a pair `(X, f)`, the propositions built on them,
//! and refinement of a PAS along an extension map.

use std::collections::{BTreeMap, HashMap};

use super::{check_consistent, is_m_solution, Pas, PasSequence};
use crate::error::{Error, Result};
use crate::subset::{all_tuples, k_subsets, k_subsets_of, project, supersets, Subset};

/// Which of the two `l`-properties to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    /// Every `l`-set `W` has a `k`-superset of `X ∪ W` with an entry extending `f`.
    P,
    /// Every `l`-set `W` has a `k`-superset of `X ∪ W` with no entry extending `f`.
    Q,
}

/// Result of [`has_property`]. When the property fails, `witness` is the
/// first `l`-set `W` (lexicographically) witnessing the negation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PropertyCheck {
    pub holds: bool,
    pub witness: Option<Subset>,
}

pub fn has_property(pas: &Pas, x: Subset, f: &[usize], l: usize, which: Property) -> Result<PropertyCheck> {
    let k = pas.arity();
    if x.len() > k || l > k {
        return Err(Error::input(format!(
            "|X| = {} and l = {l} must not exceed the arity {k}",
            x.len()
        )));
    }
    if f.len() != x.len() || f.iter().any(|&a| a >= pas.domain_size()) {
        return Err(Error::input("f is not a map from X into the domain"));
    }
    let n = pas.num_variables();
    let mut cache: HashMap<Subset, bool> = HashMap::new();
    for w in k_subsets(n, l) {
        let base = x.union(w);
        let ok = *cache.entry(base).or_insert_with(|| {
            supersets(base, n, k).any(|u| {
                let mut extending = pas.entry(u).iter().map(|g| project(g, u, x) == f);
                match which {
                    Property::P => extending.any(|e| e),
                    Property::Q => !extending.any(|e| e),
                }
            })
        });
        if !ok {
            return Ok(PropertyCheck {
                holds: false,
                witness: Some(w),
            });
        }
    }
    Ok(PropertyCheck {
        holds: true,
        witness: None,
    })
}

fn pow_mul_add(base: usize, exp: usize, mul: usize, add: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    acc.checked_mul(mul as u128)?.checked_add(add as u128)
}

/// A map `X -> A` with `l`-property P, lexicographically first.
///
/// Requires `k >= |A|^|X| * l + |X|`, which guarantees existence.
pub fn find_p_assignment(pas: &Pas, x: Subset, l: usize) -> Result<Vec<usize>> {
    let k = pas.arity();
    let q = pas.domain_size();
    let needed = pow_mul_add(q, x.len(), l, x.len());
    if needed.is_none_or(|need| (k as u128) < need) {
        return Err(Error::parameter(format!(
            "arity {k} is below |A|^|X| * l + |X| = {q}^{} * {l} + {}",
            x.len(),
            x.len()
        )));
    }
    for f in all_tuples(q, x.len()) {
        if has_property(pas, x, &f, l, Property::P)?.holds {
            return Ok(f);
        }
    }
    Err(Error::internal(format!(
        "no map on {x:?} has {l}-property P although the arity bound holds"
    )))
}

/// Outcome of a selector search: either a selector, or the set on which
/// every candidate has property Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectorSearch<T> {
    Found(T),
    Blocked(Subset),
}

/// Picks, for each variable, the first value with `l`-property ¬Q.
pub fn find_value1_selector(pas: &Pas, l: usize) -> Result<SelectorSearch<Vec<usize>>> {
    let mut selector = Vec::with_capacity(pas.num_variables());
    for v in 0..pas.num_variables() {
        let x = Subset::singleton(v);
        let mut chosen = None;
        for a in 0..pas.domain_size() {
            if !has_property(pas, x, &[a], l, Property::Q)?.holds {
                chosen = Some(a);
                break;
            }
        }
        match chosen {
            Some(a) => selector.push(a),
            None => return Ok(SelectorSearch::Blocked(x)),
        }
    }
    Ok(SelectorSearch::Found(selector))
}

/// For a value-1 PAS and a verified ¬Q selector, the selector itself is a
/// `⌊k/(l+1)⌋`-solution. The result is checked before it is returned.
pub fn solve_value1(pas: &Pas, l: usize, selector: &[usize]) -> Result<Vec<usize>> {
    if pas.value() != 1 {
        return Err(Error::structural(format!("PAS has value {}, expected 1", pas.value())));
    }
    if selector.len() != pas.num_variables() {
        return Err(Error::input("selector must cover every variable"));
    }
    let m = pas.arity() / (l + 1);
    if m == 0 {
        return Err(Error::parameter(format!(
            "arity {} with l = {l} yields no positive m",
            pas.arity()
        )));
    }
    for (v, &a) in selector.iter().enumerate() {
        if has_property(pas, Subset::singleton(v), &[a], l, Property::Q)?.holds {
            return Err(Error::input(format!(
                "selector value {a} at variable {v} has {l}-property Q"
            )));
        }
    }
    if !is_m_solution(selector, pas, m)? {
        return Err(Error::internal(format!(
            "selector is not a {m}-solution of a value-1 PAS"
        )));
    }
    Ok(selector.to_vec())
}

/// Selector for [`split_to1`]: each `k'`-set `X` mapped to a map `f` on `X`
/// with `l`-property ¬Q, together with its witness `W_X`.
pub type SplitSelector = BTreeMap<Subset, (Vec<usize>, Subset)>;

/// For each `k'`-set, the first map with `l`-property ¬Q and its witness.
pub fn find_split_selector(pas: &Pas, l: usize, k_prime: usize) -> Result<SelectorSearch<SplitSelector>> {
    let mut sel = SplitSelector::new();
    for x in k_subsets(pas.num_variables(), k_prime) {
        let mut chosen = None;
        for f in all_tuples(pas.domain_size(), k_prime) {
            let check = has_property(pas, x, &f, l, Property::Q)?;
            if !check.holds {
                chosen = Some((f, check.witness.expect("failing checks carry a witness")));
                break;
            }
        }
        match chosen {
            Some(c) => {
                sel.insert(x, c);
            }
            None => return Ok(SelectorSearch::Blocked(x)),
        }
    }
    Ok(SelectorSearch::Found(sel))
}

fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

/// Splits a PAS into a compatible pair `(I'', I')`: `I'` has arity `k'` and
/// value 1, `I''` is a refinement of `pas` of arity `k''`.
pub fn split_to1(
    pas: &Pas,
    l: usize,
    k_prime: usize,
    k_dblprime: usize,
    selector: &SplitSelector,
) -> Result<(Pas, Pas)> {
    let k = pas.arity();
    let n = pas.num_variables();
    if k_prime == 0 || k_prime > k_dblprime || k_dblprime > n {
        return Err(Error::parameter(format!(
            "need 1 <= k' = {k_prime} <= k'' = {k_dblprime} <= |V| = {n}"
        )));
    }
    let needed = binomial_u128(k_dblprime, k_prime)
        .and_then(|c| c.checked_mul(l as u128))
        .and_then(|c| c.checked_add(k_dblprime as u128));
    if needed.is_none_or(|need| (k as u128) < need) {
        return Err(Error::parameter(format!(
            "arity {k} is below k'' + C(k'', k') * l with k'' = {k_dblprime}, k' = {k_prime}, l = {l}"
        )));
    }
    for x in k_subsets(n, k_prime) {
        let (f, w) = selector
            .get(&x)
            .ok_or_else(|| Error::input(format!("selector has no entry for {x:?}")))?;
        if w.len() != l || f.len() != k_prime {
            return Err(Error::input(format!("selector entry for {x:?} is malformed")));
        }
        let verified = supersets(x.union(*w), n, k).all(|u| pas.entry(u).iter().any(|g| project(g, u, x) == *f));
        if !verified {
            return Err(Error::input(format!(
                "{w:?} does not witness {l}-property ¬Q for {x:?}"
            )));
        }
    }
    let singles = Pas::new(
        n,
        pas.domain_size(),
        k_prime,
        selector.iter().map(|(x, (f, _))| (*x, vec![f.clone()])),
    )?;
    let mut ex = BTreeMap::new();
    for y in k_subsets(n, k_dblprime) {
        let base = k_subsets_of(y, k_prime).fold(y, |acc, x| acc.union(selector[&x].1));
        let u = supersets(base, n, k)
            .next()
            .ok_or_else(|| Error::internal(format!("no {k}-superset of {base:?} for {y:?}")))?;
        ex.insert(y, u);
    }
    let refined = refine(pas, k_dblprime, &ex)?;
    let pair = PasSequence::new(vec![refined, singles])?;
    if !check_consistent(&pair)?.is_consistent() {
        return Err(Error::internal("split pair is not consistent"));
    }
    let mut systems = pair.systems.into_iter();
    let refined = systems.next().expect("two systems");
    let singles = systems.next().expect("two systems");
    Ok((refined, singles))
}

/// `J(U) = proj_U I(ex(U))` for every `l`-set `U`.
pub fn refine(pas: &Pas, l: usize, ex: &BTreeMap<Subset, Subset>) -> Result<Pas> {
    let k = pas.arity();
    let mut entries = Vec::new();
    for u in k_subsets(pas.num_variables(), l) {
        let w = *ex
            .get(&u)
            .ok_or_else(|| Error::input(format!("extension map misses {u:?}")))?;
        if !u.is_subset_of(w) {
            return Err(Error::input(format!("{u:?} is not contained in ex(U) = {w:?}")));
        }
        if w.len() != k {
            return Err(Error::input(format!("ex({u:?}) = {w:?} is not a {k}-set")));
        }
        entries.push((u, pas.projections_to(w, u).collect()));
    }
    Pas::new(pas.num_variables(), pas.domain_size(), l, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn global_pas(f: &[usize], k: usize) -> Pas {
        Pas::restrictions(2, k, f).unwrap()
    }

    #[test]
    fn properties_on_restrictions() {
        let f = [0, 1, 1, 0, 1];
        let pas = global_pas(&f, 3);
        let x = Subset::singleton(1);
        assert!(has_property(&pas, x, &[1], 1, Property::P).unwrap().holds);
        assert!(has_property(&pas, x, &[0], 1, Property::Q).unwrap().holds);
        let fails = has_property(&pas, x, &[0], 1, Property::P).unwrap();
        assert!(!fails.holds);
        assert_eq!(fails.witness, Some(Subset::singleton(0)));
    }

    #[test]
    fn property_preconditions() {
        let pas = global_pas(&[0, 0, 0], 2);
        assert!(matches!(
            has_property(&pas, Subset::full(3), &[0, 0, 0], 1, Property::P),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn p_assignment_on_restrictions() {
        let h = [1, 0, 0, 1, 1];
        let pas = global_pas(&h, 3);
        let x = Subset::singleton(0);
        assert_eq!(find_p_assignment(&pas, x, 1).unwrap(), vec![1]);
        let small = global_pas(&h, 2);
        assert!(matches!(find_p_assignment(&small, x, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn p_assignment_on_full_pas_is_lexicographic_first() {
        let pas = Pas::from_fn(6, 2, 5, |_| all_tuples(2, 5).collect()).unwrap();
        let x = Subset::from_indices([2]);
        assert_eq!(find_p_assignment(&pas, x, 2).unwrap(), vec![0]);
    }

    #[test]
    fn value1_examples() {
        let pas = global_pas(&[0, 0, 0], 2);
        let SelectorSearch::Found(sel) = find_value1_selector(&pas, 1).unwrap() else {
            panic!("selector exists");
        };
        assert_eq!(solve_value1(&pas, 1, &sel).unwrap(), vec![0, 0, 0]);

        let f = [1, 0, 1, 1, 0, 0];
        let pas = global_pas(&f, 4);
        let s = solve_value1(&pas, 1, &f).unwrap();
        assert_eq!(s, f);
        assert!(is_m_solution(&s, &pas, 2).unwrap());
    }

    #[test]
    fn value1_rejects_bad_selectors() {
        let f = [1, 0, 1, 1, 0, 0];
        let pas = global_pas(&f, 4);
        let mut bad = f;
        bad[3] = 0;
        let err = solve_value1(&pas, 1, &bad).unwrap_err();
        assert!(matches!(err, Error::Input(ref m) if m.contains("variable 3")));
        let wide = Pas::from_fn(3, 2, 2, |u| vec![vec![0; u.len()], vec![1; u.len()]]).unwrap();
        assert!(matches!(solve_value1(&wide, 1, &[0, 0, 0]), Err(Error::Structural(_))));
    }

    /// Value-1 PAS that is not made of restrictions of one assignment: the
    /// entries containing both 4 and 5 flip the value at 5.
    #[test]
    fn value1_adversarial() {
        let h = [0, 1, 0, 1, 1, 0];
        let pas = Pas::from_fn(6, 2, 4, |u| {
            let mut g = crate::subset::restrict(&h, u);
            if u.contains(4) && u.contains(5) {
                let pos = u.rank_of(5).unwrap();
                g[pos] = 1 - g[pos];
            }
            vec![g]
        })
        .unwrap();
        let SelectorSearch::Found(sel) = find_value1_selector(&pas, 1).unwrap() else {
            panic!("selector exists");
        };
        let s = solve_value1(&pas, 1, &sel).unwrap();
        assert!(is_m_solution(&s, &pas, 2).unwrap());
    }

    #[test]
    fn refine_examples() {
        let f = [0, 1, 1, 0, 1];
        let pas = global_pas(&f, 3);
        let ex: BTreeMap<Subset, Subset> = k_subsets(5, 2)
            .map(|u| (u, supersets(u, 5, 3).last().unwrap()))
            .collect();
        let j = refine(&pas, 2, &ex).unwrap();
        assert_eq!(j, global_pas(&f, 2));
        let mut bad = ex.clone();
        let first = *bad.keys().next().unwrap();
        bad.insert(first, Subset::from_indices([2, 3, 4]));
        assert!(matches!(refine(&pas, 2, &bad), Err(Error::Input(_))));
    }

    #[test]
    fn split_on_restrictions() {
        let f = [0, 1, 1, 0, 1, 0, 0];
        let pas = global_pas(&f, 5);
        let SelectorSearch::Found(sel) = find_split_selector(&pas, 1, 1).unwrap() else {
            panic!("selector exists");
        };
        let (refined, singles) = split_to1(&pas, 1, 1, 2, &sel).unwrap();
        assert_eq!(singles, global_pas(&f, 1));
        assert_eq!(singles.value(), 1);
        assert_eq!(refined, global_pas(&f, 2));
        assert!(matches!(split_to1(&pas, 2, 1, 4, &sel), Err(Error::Parameter(_))));
    }
}
