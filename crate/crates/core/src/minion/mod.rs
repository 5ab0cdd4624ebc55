//! Functions of set arity, minors, polymorphisms and minions.
//!
//! An `X`-ary function `A^X -> B` is stored as a dense table over `A^X` in
//! lexicographic order, the first coordinate of `X` being most significant.
//! Arity sets are identified with `0..|X|`; minor maps are index vectors.

mod free;
mod homo;
mod poly;
mod slice;

use std::fmt;

use crate::error::{Error, Result};
use crate::subset::all_tuples;

pub use free::{build_free_template, decode_partial_map_constraint, free_relation, graph_relation, FreeTemplate};
pub(crate) use homo::checked_image;
pub use homo::{
    check_dr_homomorphism, check_minion_homomorphism, ChainViolation, DrHomomorphismTable, EssentialCoordinatesMap,
    HomomorphismViolation, IdentityMap, SetValuedMinionMap,
};
pub(crate) use poly::for_each_matrix;
pub use poly::{enumerate_polymorphisms, is_polymorphism, polymorphism_violation, PolymorphismViolation};
pub use slice::{check_minor_closure, DictatorMinion, Minion, MinionSlice, MinorWitness, PolymorphismMinion};

/// A total map `A^X -> B`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteFunction {
    arity: usize,
    in_size: usize,
    out_size: usize,
    table: Vec<usize>,
}

/// Upper bound on table lengths, to keep allocations honest.
pub const MAX_TABLE: usize = 1 << 24;

pub(crate) fn table_len(in_size: usize, arity: usize) -> Result<usize> {
    u32::try_from(arity)
        .ok()
        .and_then(|a| in_size.checked_pow(a))
        .filter(|&len| len <= MAX_TABLE)
        .ok_or_else(|| {
            Error::resource(format!(
                "a table over {in_size}^{arity} points exceeds {MAX_TABLE} entries"
            ))
        })
}

impl FiniteFunction {
    pub fn new(arity: usize, in_size: usize, out_size: usize, table: Vec<usize>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::structural("arity sets must be nonempty"));
        }
        if in_size == 0 || out_size == 0 {
            return Err(Error::structural("domains must be nonempty"));
        }
        let len = table_len(in_size, arity)?;
        if table.len() != len {
            return Err(Error::structural(format!(
                "table has {} entries, expected {len}",
                table.len()
            )));
        }
        if let Some(&b) = table.iter().find(|&&b| b >= out_size) {
            return Err(Error::structural(format!("table value {b} is outside the codomain")));
        }
        Ok(FiniteFunction {
            arity,
            in_size,
            out_size,
            table,
        })
    }

    /// Builds the table by evaluating `f` on `A^X` in canonical order.
    pub fn from_fn(
        arity: usize,
        in_size: usize,
        out_size: usize,
        mut f: impl FnMut(&[usize]) -> usize,
    ) -> Result<Self> {
        table_len(in_size, arity)?;
        let table = all_tuples(in_size, arity).map(|x| f(&x)).collect();
        FiniteFunction::new(arity, in_size, out_size, table)
    }

    /// The projection onto coordinate `i`, with `A` included in `B`.
    pub fn dictator(arity: usize, in_size: usize, out_size: usize, i: usize) -> Result<Self> {
        if i >= arity || in_size > out_size {
            return Err(Error::input(format!(
                "no dictator at {i} of arity {arity} from {in_size} into {out_size} values"
            )));
        }
        FiniteFunction::from_fn(arity, in_size, out_size, |x| x[i])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn in_size(&self) -> usize {
        self.in_size
    }

    pub fn out_size(&self) -> usize {
        self.out_size
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Position of a point of `A^X` in the table.
    pub fn index_of(&self, point: &[usize]) -> usize {
        point.iter().fold(0, |acc, &a| acc * self.in_size + a)
    }

    pub fn eval(&self, point: &[usize]) -> usize {
        self.table[self.index_of(point)]
    }

    /// Coordinates the value depends on.
    pub fn essential_coordinates(&self) -> Vec<usize> {
        let q = self.in_size;
        (0..self.arity)
            .filter(|&i| {
                let stride = q.pow((self.arity - 1 - i) as u32);
                (0..self.table.len()).any(|idx| {
                    let digit = idx / stride % q;
                    digit + 1 < q && self.table[idx] != self.table[idx + stride]
                })
            })
            .collect()
    }

    /// Whether this is the dictator at some coordinate.
    pub fn as_dictator(&self) -> Option<usize> {
        (0..self.arity).find(|&i| {
            all_tuples(self.in_size, self.arity)
                .zip(&self.table)
                .all(|(x, &b)| x[i] == b)
        })
    }
}

impl fmt::Debug for FiniteFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Fn[{}; {}->{}]{:?}",
            self.arity, self.in_size, self.out_size, self.table
        )
    }
}

/// The `π`-minor `s(g) = t(g ∘ π)` of `t`, for `π: X -> Y` with `|Y| = target_arity`.
pub fn minor(t: &FiniteFunction, pi: &[usize], target_arity: usize) -> Result<FiniteFunction> {
    if pi.len() != t.arity {
        return Err(Error::input(format!(
            "minor map covers {} of {} coordinates",
            pi.len(),
            t.arity
        )));
    }
    if let Some(&y) = pi.iter().find(|&&y| y >= target_arity) {
        return Err(Error::input(format!(
            "minor map sends a coordinate to {y}, outside an arity of {target_arity}"
        )));
    }
    let q = t.in_size;
    let len = table_len(q, target_arity)?;
    // t's index is Σ_x g(π x) q^(n-1-x) = Σ_y g(y) w_y.
    let mut weight = vec![0usize; target_arity];
    for (x, &y) in pi.iter().enumerate() {
        weight[y] += q.pow((t.arity - 1 - x) as u32);
    }
    let mut digits = vec![0usize; target_arity];
    let mut src = 0usize;
    let mut table = Vec::with_capacity(len);
    for _ in 0..len {
        table.push(t.table[src]);
        // odometer step on g, tracking the source index
        for y in (0..target_arity).rev() {
            if digits[y] + 1 < q {
                digits[y] += 1;
                src += weight[y];
                break;
            }
            src -= weight[y] * digits[y];
            digits[y] = 0;
        }
    }
    Ok(FiniteFunction {
        arity: target_arity,
        in_size: q,
        out_size: t.out_size,
        table,
    })
}

/// Composition `ρ ∘ π` of minor maps.
pub fn compose_maps(pi: &[usize], rho: &[usize]) -> Vec<usize> {
    pi.iter().map(|&y| rho[y]).collect()
}

/// Every map `0..from -> 0..to`, lexicographically.
pub fn all_maps(from: usize, to: usize) -> impl Iterator<Item = Vec<usize>> {
    all_tuples(to, from)
}

/// The function whose minor along the injection `iota` is `s`, if one exists.
/// Such a function is unique.
pub fn preimage_along_injection(s: &FiniteFunction, iota: &[usize]) -> Result<Option<FiniteFunction>> {
    let mut seen = vec![false; s.arity];
    for &y in iota {
        if y >= s.arity || std::mem::replace(&mut seen[y], true) {
            return Err(Error::input("the map is not an injection into the arity set"));
        }
    }
    if iota.is_empty() {
        return Ok(None);
    }
    let mut ext = vec![0usize; s.arity];
    let t = FiniteFunction::from_fn(iota.len(), s.in_size, s.out_size, |g| {
        for (i, &y) in iota.iter().enumerate() {
            ext[y] = g[i];
        }
        s.eval(&ext)
    })?;
    Ok((minor(&t, iota, s.arity)? == *s).then_some(t))
}
