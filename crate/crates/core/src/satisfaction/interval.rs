// SPDX-License-Identifier: Apache-2.0

//! Rigorous enclosures of `ln(1 + c)` and `sqrt(c)` sums.
//!
//! All work is fixed-point over `BigInt` at a scale of `2^w`: lower bounds
//! round down at every step, upper bounds round up, so the true value always
//! lies inside the returned pair.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Extra working bits carried through the series before rounding outward.
const GUARD_BITS: u32 = 64;

/// A satisfaction value that is, in general, irrational.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IrrationalExpr {
    /// `sum ln(1 + c_i)`, terms sorted ascending.
    SumLn1p(Vec<BigRational>),
    /// `sum sqrt(c_i)`, terms sorted ascending.
    SumSqrt(Vec<BigRational>),
    /// `ln(1 + c)`.
    Ln1p(BigRational),
    /// `sqrt(c)`.
    Sqrt(BigRational),
}

/// Normal form under which two expressions denote the same real.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Identity {
    /// `ln(x)`
    Log(BigRational),
    /// `sum q_r sqrt(r)` with distinct radicands `r`, sorted by radicand.
    /// Square roots of distinct squarefree integers are linearly independent
    /// over the rationals, so this form decides equality whenever every
    /// radicand was fully reduced.
    SqrtSum(Vec<(BigInt, BigRational)>),
}

impl IrrationalExpr {
    pub fn sum_ln1p(mut terms: Vec<BigRational>) -> Self {
        terms.sort();
        IrrationalExpr::SumLn1p(terms)
    }

    pub fn sum_sqrt(mut terms: Vec<BigRational>) -> Self {
        terms.sort();
        IrrationalExpr::SumSqrt(terms)
    }

    pub(crate) fn identity(&self) -> Identity {
        match self {
            IrrationalExpr::SumLn1p(terms) => Identity::Log(
                terms
                    .iter()
                    .fold(BigRational::one(), |acc, c| acc * (BigRational::one() + c)),
            ),
            IrrationalExpr::Ln1p(c) => Identity::Log(BigRational::one() + c),
            IrrationalExpr::SumSqrt(terms) => sqrt_normal_form(terms),
            IrrationalExpr::Sqrt(c) => sqrt_normal_form(std::slice::from_ref(c)),
        }
    }

    /// Returns `(lo, hi)` with `lo <= value <= hi` and `hi - lo` on the
    /// order of `2^-bits` per term.
    pub fn enclose(&self, bits: u32) -> (BigRational, BigRational) {
        let w = bits + GUARD_BITS;
        let (lo, hi) = match self {
            IrrationalExpr::SumLn1p(terms) => terms.iter().fold(
                (BigInt::zero(), BigInt::zero()),
                |(lo, hi), c| {
                    let (l, h) = ln_scaled(&(BigRational::one() + c), w);
                    (lo + l, hi + h)
                },
            ),
            IrrationalExpr::SumSqrt(terms) => terms.iter().fold(
                (BigInt::zero(), BigInt::zero()),
                |(lo, hi), c| {
                    let (l, h) = sqrt_scaled(c, w);
                    (lo + l, hi + h)
                },
            ),
            IrrationalExpr::Ln1p(c) => ln_scaled(&(BigRational::one() + c), w),
            IrrationalExpr::Sqrt(c) => sqrt_scaled(c, w),
        };
        let denom = BigInt::one() << bits;
        (
            BigRational::new(shr_floor(&lo, GUARD_BITS), denom.clone()),
            BigRational::new(shr_ceil(&hi, GUARD_BITS), denom),
        )
    }
}

/// Trial division stops here; larger cofactors are kept unreduced, which
/// can only make equal sums look different.
const SQUAREFREE_TRIAL_LIMIT: u64 = 1 << 20;

/// Splits `n > 0` as `s^2 * r`, returning `(s, r)`. `r` is squarefree
/// unless a cofactor above the cube of the trial limit is left over.
fn square_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut s = BigInt::one();
    let mut r = BigInt::one();
    let mut p = 2u64;
    while p <= SQUAREFREE_TRIAL_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb * &pb > rest {
            break;
        }
        let mut odd = false;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            odd = !odd;
            if !odd {
                s *= &pb;
            }
        }
        if odd {
            r *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // once p^3 > rest, rest is 1, a prime, a product of two primes or a
    // prime squared
    let root = rest.sqrt();
    if &root * &root == rest {
        s *= root;
    } else {
        r *= rest;
    }
    (s, r)
}

/// `sum sqrt(c_i)` with `sqrt(a/b) = sqrt(ab)/b` and `ab = s^2 r`.
fn sqrt_normal_form(terms: &[BigRational]) -> Identity {
    let mut acc: std::collections::BTreeMap<BigInt, BigRational> = std::collections::BTreeMap::new();
    for c in terms {
        let (s, r) = square_part(&(c.numer() * c.denom()));
        *acc.entry(r).or_insert_with(BigRational::zero) += BigRational::new(s, c.denom().clone());
    }
    Identity::SqrtSum(acc.into_iter().collect())
}

/// A sound enclosure `[lo, hi]` of an irrational satisfaction value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigRational,
    hi: BigRational,
    precision_bits: u32,
    expr: Arc<IrrationalExpr>,
}

impl Enclosure {
    pub fn new(expr: IrrationalExpr, bits: u32) -> Self {
        Enclosure::compute(Arc::new(expr), bits)
    }

    fn compute(expr: Arc<IrrationalExpr>, bits: u32) -> Self {
        let (lo, hi) = expr.enclose(bits);
        Enclosure {
            lo,
            hi,
            precision_bits: bits,
            expr,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn expr(&self) -> &IrrationalExpr {
        &self.expr
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Recomputes at `bits` and intersects with the current enclosure, so
    /// refinement never widens or moves outside the previous bounds.
    pub fn refine(&self, bits: u32) -> Enclosure {
        let mut next = Enclosure::compute(Arc::clone(&self.expr), bits);
        if self.lo > next.lo {
            next.lo = self.lo.clone();
        }
        if self.hi < next.hi {
            next.hi = self.hi.clone();
        }
        next
    }
}

fn shr_floor(x: &BigInt, bits: u32) -> BigInt {
    x.div_floor(&(BigInt::one() << bits))
}

fn shr_ceil(x: &BigInt, bits: u32) -> BigInt {
    -((-x).div_floor(&(BigInt::one() << bits)))
}

fn floor_scaled(x: &BigRational, w: u32) -> BigInt {
    (x.numer() << w).div_floor(x.denom())
}

fn ceil_scaled(x: &BigRational, w: u32) -> BigInt {
    -((-(x.numer() << w)).div_floor(x.denom()))
}

/// Bounds on `atanh(t) * 2^w` for `0 <= t <= 1/3`.
fn atanh_scaled(t: &BigRational, w: u32) -> (BigInt, BigInt) {
    debug_assert!(!t.is_negative() && *t <= BigRational::new(1.into(), 3.into()));
    let t_lo = floor_scaled(t, w);
    let t_hi = ceil_scaled(t, w);
    let t2_lo = shr_floor(&(&t_lo * &t_lo), w);
    let t2_hi = shr_ceil(&(&t_hi * &t_hi), w);
    // with t <= 1/3 the tail after `terms` terms is below 2^-w
    let terms = w / 3 + 2;
    let mut p_lo = t_lo;
    let mut p_hi = t_hi;
    let mut s_lo = BigInt::zero();
    let mut s_hi = BigInt::zero();
    for j in 0..terms {
        if p_hi.is_zero() {
            break;
        }
        let d = BigInt::from(2 * j + 1);
        s_lo += p_lo.div_floor(&d);
        s_hi += -((-&p_hi).div_floor(&d));
        p_lo = shr_floor(&(&p_lo * &t2_lo), w);
        p_hi = shr_ceil(&(&p_hi * &t2_hi), w);
    }
    (s_lo, s_hi + 1)
}

/// Bounds on `ln(y) * 2^w` for rational `y >= 1`.
fn ln_scaled(y: &BigRational, w: u32) -> (BigInt, BigInt) {
    assert!(*y >= BigRational::one(), "ln enclosure needs y >= 1");
    let (n, d) = (y.numer(), y.denom());
    let mut k = n.bits() - d.bits();
    if (d << k) > *n {
        k -= 1;
    }
    // y = 2^k * r with 1 <= r < 2, and ln r = 2 atanh((r - 1) / (r + 1))
    let scaled_d = d << k;
    let t = BigRational::new(n - &scaled_d, n + &scaled_d);
    let (r_lo, r_hi) = atanh_scaled(&t, w);
    let (mut lo, mut hi) = (r_lo * 2, r_hi * 2);
    if k > 0 {
        let (l2_lo, l2_hi) = atanh_scaled(&BigRational::new(1.into(), 3.into()), w);
        let k = BigInt::from(k);
        lo += l2_lo * 2 * &k;
        hi += l2_hi * 2 * &k;
    }
    (lo, hi)
}

/// Bounds on `sqrt(x) * 2^w` for rational `x >= 0`; tight when exact.
fn sqrt_scaled(x: &BigRational, w: u32) -> (BigInt, BigInt) {
    assert!(!x.is_negative(), "sqrt enclosure needs x >= 0");
    let num = x.numer() << (2 * w);
    let (q, r) = num.div_rem(x.denom());
    let root = q.sqrt();
    if r.is_zero() && &root * &root == q {
        (root.clone(), root)
    } else {
        let up = &root + 1;
        (root, up)
    }
}
