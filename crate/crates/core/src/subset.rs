//! Variable subsets as bitmasks, with lexicographic enumeration helpers.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};

/// Largest universe a [`Subset`] can index.
pub const MAX_UNIVERSE: usize = 64;

/// A subset of a universe `0..n` with `n <= 64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Subset(indices.into_iter().fold(0, |m, i| m | 1 << i))
    }

    pub fn full(n: usize) -> Self {
        if n == 64 {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn members(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Position of `v` among the sorted members.
    pub fn rank_of(self, v: usize) -> Option<usize> {
        self.contains(v)
            .then(|| (self.0 & ((1u64 << v) - 1)).count_ones() as usize)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub(crate) fn check_universe(n: usize) -> Result<()> {
    if n > MAX_UNIVERSE {
        Err(Error::resource(format!(
            "{n} variables exceed the supported universe of {MAX_UNIVERSE}"
        )))
    } else {
        Ok(())
    }
}

/// All `k`-subsets of `0..n` in lexicographic order of their member lists.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = Subset> {
    (0..n).combinations(k).map(Subset::from_indices)
}

/// All `k`-subsets of `within`.
pub fn k_subsets_of(within: Subset, k: usize) -> impl Iterator<Item = Subset> {
    within.members().into_iter().combinations(k).map(Subset::from_indices)
}

/// All `k`-subsets of `0..n` containing `base`, ordered by the added members.
pub fn supersets(base: Subset, n: usize, k: usize) -> impl Iterator<Item = Subset> {
    let rest: Vec<usize> = (0..n).filter(|&i| !base.contains(i)).collect();
    let extra = k.checked_sub(base.len());
    let it = match extra {
        Some(e) if e <= rest.len() => Some(
            rest.into_iter()
                .combinations(e)
                .map(move |c| base.union(Subset::from_indices(c))),
        ),
        _ => None,
    };
    it.into_iter().flatten()
}

/// Binomial coefficient with saturation at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Restricts `values` (listed along the members of `from`) to `to ⊆ from`.
pub fn project(values: &[usize], from: Subset, to: Subset) -> Vec<usize> {
    from.iter()
        .zip(values)
        .filter(|(v, _)| to.contains(*v))
        .map(|(_, &a)| a)
        .collect()
}

/// Restricts a total assignment on the universe to `to`.
pub fn restrict(total: &[usize], to: Subset) -> Vec<usize> {
    to.iter().map(|v| total[v]).collect()
}

/// All maps `0..len -> 0..q` in lexicographic order.
pub fn all_tuples(q: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur = vec![0usize; len];
    let mut done = q == 0 && len > 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur.clone();
        done = true;
        for i in (0..len).rev() {
            cur[i] += 1;
            if cur[i] < q {
                done = false;
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    })
}
