//! The arity recursion behind the gap parameters.
//!
//! Parameters are computed in an integer type chosen by the caller. Exact
//! big integers are the default since `C(k'', k') * l` leaves 64 bits after
//! a couple of recursion levels; fixed-width types report overflow as a
//! resource error instead of wrapping.

use std::collections::HashMap;
use std::fmt::{Debug, Display};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Integer type the recursion is evaluated in.
pub trait ParamInt:
    Clone
    + Ord
    + Debug
    + Display
    + Zero
    + One
    + CheckedAdd
    + CheckedMul
    + CheckedSub
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Number of significant bits.
    fn bit_len(&self) -> u64;

    /// Exact division, used inside binomials where it never truncates.
    fn div_exact(&self, by: &Self) -> Self;
}

impl ParamInt for BigUint {
    fn bit_len(&self) -> u64 {
        self.bits()
    }

    fn div_exact(&self, by: &Self) -> Self {
        self / by
    }
}

macro_rules! prim_param_int {
    ($($t:ty),*) => {$(
        impl ParamInt for $t {
            fn bit_len(&self) -> u64 {
                u64::from(<$t>::BITS - self.leading_zeros())
            }

            fn div_exact(&self, by: &Self) -> Self {
                self / by
            }
        }
    )*};
}

prim_param_int!(u64, u128);

/// How `k_0` is computed from the `k'_j`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum K0Mode {
    /// `k_0 = Σ k'_j + |A|^{Σ k'_j}`.
    #[default]
    Paper,
    /// `k_0 = Σ k'_j + |A|^{Σ k'_j} * l_0`, enough for the P-assignment bound.
    Conservative,
}

/// Full parameter record for one value sequence, with the records it was
/// derived from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapParameters<T> {
    pub domain_size: usize,
    pub m: usize,
    pub mode: K0Mode,
    pub values: Vec<usize>,
    pub k: Vec<T>,
    pub l: Vec<T>,
    pub p: Vec<T>,
    /// `(k''_i, k'_i)` for indices with `d_i >= 2`; `None` elsewhere and at 0.
    pub split: Vec<Option<(T, T)>>,
    /// `k'_i` for `i >= 1`; index 0 holds zero.
    pub k_prime: Vec<T>,
    /// `k_0` before it is raised to `k_1`.
    pub k0_formula: T,
    /// Records for `(d_i, 1)`, aligned with `split`.
    pub split_params: Vec<Option<Arc<GapParameters<T>>>>,
    /// Record for `(d_0 - 1, d_1, …, d_r)` when `d_0 >= 2`.
    pub reduced: Option<Arc<GapParameters<T>>>,
}

/// Default cap on the size of any single parameter.
pub const DEFAULT_MAX_BITS: u64 = 1 << 16;

/// Largest exponent or binomial loop length attempted.
const MAX_STEPS: u64 = 1 << 20;

/// Parameters in exact arithmetic, with the default (`Paper`) rule for `k_0`.
pub fn gap_parameters(domain_size: usize, m: usize, values: &[usize]) -> Result<GapParameters<BigUint>> {
    gap_parameters_with(domain_size, m, values, K0Mode::Paper, DEFAULT_MAX_BITS)
}

/// Parameters in `T`, failing with a resource error once a value needs more
/// than `max_bits` bits or does not fit `T`.
pub fn gap_parameters_with<T: ParamInt>(
    domain_size: usize,
    m: usize,
    values: &[usize],
    mode: K0Mode,
    max_bits: u64,
) -> Result<GapParameters<T>> {
    if domain_size == 0 || m == 0 {
        return Err(Error::parameter("domain size and m must be positive"));
    }
    if values.len() < 2 {
        return Err(Error::parameter("need at least two values (r >= 1)"));
    }
    if values.contains(&0) {
        return Err(Error::parameter("every value d_i must be at least 1"));
    }
    let mut ctx = Ctx {
        q: domain_size,
        m,
        mode,
        max_bits,
        memo: HashMap::new(),
    };
    let rec = ctx.params(values)?;
    Ok(Arc::try_unwrap(rec).unwrap_or_else(|shared| (*shared).clone()))
}

struct Ctx<T> {
    q: usize,
    m: usize,
    mode: K0Mode,
    max_bits: u64,
    memo: HashMap<Vec<usize>, Arc<GapParameters<T>>>,
}

fn lift<T: ParamInt>(x: usize) -> T {
    T::from_usize(x).expect("every parameter type holds small usize values")
}

impl<T: ParamInt> Ctx<T> {
    fn overflow(&self, what: &str) -> Error {
        Error::resource(format!("{what} exceeds the parameter budget of {} bits", self.max_bits))
    }

    fn check(&self, x: T, what: &str) -> Result<T> {
        if x.bit_len() > self.max_bits {
            Err(self.overflow(what))
        } else {
            Ok(x)
        }
    }

    fn add(&self, a: &T, b: &T) -> Result<T> {
        let s = a.checked_add(b).ok_or_else(|| self.overflow("a sum"))?;
        self.check(s, "a sum")
    }

    fn mul(&self, a: &T, b: &T) -> Result<T> {
        if a.bit_len() + b.bit_len() > self.max_bits + 1 {
            return Err(self.overflow("a product"));
        }
        let p = a.checked_mul(b).ok_or_else(|| self.overflow("a product"))?;
        self.check(p, "a product")
    }

    fn sub(&self, a: &T, b: &T) -> Result<T> {
        a.checked_sub(b)
            .ok_or_else(|| Error::internal(format!("parameter difference {a} - {b} is negative")))
    }

    fn binomial(&self, n: &T, k: &T) -> Result<T> {
        if k > n {
            return Ok(T::zero());
        }
        let rest = self.sub(n, k)?;
        let steps = if &rest < k { rest } else { k.clone() };
        let count = steps
            .to_u64()
            .filter(|&s| s <= MAX_STEPS)
            .ok_or_else(|| self.overflow("a binomial coefficient"))?;
        let mut acc = T::one();
        let mut top = n.clone();
        for i in 1..=count {
            acc = self.mul(&acc, &top)?.div_exact(&lift(i as usize));
            top = self.sub(&top, &T::one())?;
        }
        Ok(acc)
    }

    fn pow_q(&self, exp: &T) -> Result<T> {
        let e = exp
            .to_u64()
            .filter(|&e| e <= MAX_STEPS)
            .ok_or_else(|| self.overflow("a power of |A|"))?;
        let q = lift::<T>(self.q);
        if e.saturating_mul(q.bit_len().saturating_sub(1)) > self.max_bits {
            return Err(self.overflow("a power of |A|"));
        }
        let mut acc = T::one();
        for _ in 0..e {
            acc = self.mul(&acc, &q)?;
        }
        Ok(acc)
    }

    /// `p + Σ_{j > i} C(p, p_j) (k_j - p_j)`.
    fn l_value(&self, i: usize, p: &[T], k: &[T]) -> Result<T> {
        let mut l = p[i].clone();
        for j in i + 1..p.len() {
            let c = self.binomial(&p[i], &p[j])?;
            let gap = self.sub(&k[j], &p[j])?;
            l = self.add(&l, &self.mul(&c, &gap)?)?;
        }
        Ok(l)
    }

    fn params(&mut self, values: &[usize]) -> Result<Arc<GapParameters<T>>> {
        if let Some(hit) = self.memo.get(values) {
            return Ok(hit.clone());
        }
        let r = values.len() - 1;
        let reduced = if values[0] >= 2 {
            let mut smaller = values.to_vec();
            smaller[0] -= 1;
            Some(self.params(&smaller)?)
        } else {
            None
        };
        let p: Vec<T> = match &reduced {
            Some(rec) => rec.k.clone(),
            // p_0 is not defined by the recursion here; copy p_1.
            None => vec![T::one(); r + 1],
        };
        let mut k = vec![T::zero(); r + 1];
        let mut l = vec![T::zero(); r + 1];
        let mut k_prime = vec![T::zero(); r + 1];
        let mut split = vec![None; r + 1];
        let mut split_params = vec![None; r + 1];
        for i in (1..=r).rev() {
            l[i] = self.l_value(i, &p, &k)?;
            if values[i] == 1 {
                k[i] = self.mul(&self.add(&l[i], &T::one())?, &lift(self.m))?;
                k_prime[i] = T::one();
            } else {
                let sub = self.params(&[values[i], 1])?;
                let (kdd, kd) = (sub.k[0].clone(), sub.k[1].clone());
                let c = self.binomial(&kdd, &kd)?;
                k[i] = self.add(&kdd, &self.mul(&c, &l[i])?)?;
                k_prime[i] = kd.clone();
                split[i] = Some((kdd, kd));
                split_params[i] = Some(sub);
            }
        }
        l[0] = self.l_value(0, &p, &k)?;
        let mut sum_kp = T::zero();
        for kp in &k_prime[1..] {
            sum_kp = self.add(&sum_kp, kp)?;
        }
        let mut power = self.pow_q(&sum_kp)?;
        if self.mode == K0Mode::Conservative {
            power = self.mul(&power, &l[0])?;
        }
        let k0_formula = self.add(&sum_kp, &power)?;
        k[0] = k0_formula.clone().max(k[1].clone());
        if let Some(i) = (1..=r).find(|&i| k[i] > k[i - 1]) {
            return Err(Error::internal(format!(
                "arities increase at index {i} for values {values:?}"
            )));
        }
        if k[r] < lift(self.m) {
            return Err(Error::internal(format!("k_r is below m for values {values:?}")));
        }
        let rec = Arc::new(GapParameters {
            domain_size: self.q,
            m: self.m,
            mode: self.mode,
            values: values.to_vec(),
            k,
            l,
            p,
            split,
            k_prime,
            k0_formula,
            split_params,
            reduced,
        });
        self.memo.insert(values.to_vec(), rec.clone());
        Ok(rec)
    }
}

fn num<T: ParamInt>(x: &T) -> Value {
    match x.to_u64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn nums<T: ParamInt>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(num).collect())
}

impl<T: ParamInt> GapParameters<T> {
    pub fn r(&self) -> usize {
        self.values.len() - 1
    }

    /// Arities as `usize`, each capped at `cap`.
    pub fn arities_capped(&self, cap: usize) -> Vec<usize> {
        self.k.iter().map(|x| capped(x, cap)).collect()
    }

    /// JSON record with every nested record it depends on. Numbers that do
    /// not fit 64 bits are written as decimal strings.
    pub fn to_json(&self) -> Value {
        json!({
            "domain_size": self.domain_size,
            "m": self.m,
            "mode": self.mode,
            "values": self.values,
            "k": nums(&self.k),
            "l": nums(&self.l),
            "p": nums(&self.p),
            "k_prime": nums(&self.k_prime),
            "split": self.split.iter().map(|s| match s {
                Some((a, b)) => json!([num(a), num(b)]),
                None => Value::Null,
            }).collect::<Vec<_>>(),
            "k0_formula": num(&self.k0_formula),
            "k0_raised": self.k0_formula < self.k[0],
            "split_params": self.split_params.iter().map(|s| match s {
                Some(rec) => rec.to_json(),
                None => Value::Null,
            }).collect::<Vec<_>>(),
            "reduced": self.reduced.as_ref().map(|rec| rec.to_json()),
        })
    }
}

pub(crate) fn capped<T: ParamInt>(x: &T, cap: usize) -> usize {
    x.to_usize().map_or(cap, |v| v.min(cap))
}
