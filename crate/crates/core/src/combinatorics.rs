//! Big-integer primitives shared by every counting module.
//!
//! [`binomial`] implements the extended binomial coefficient: it is zero whenever
//! `n < 0`, `k < 0` or `k > n`. All other modules rely on this convention to let
//! alternating sums run over their full index range without per-term guards.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Count, Error, Result};

/// Extended binomial coefficient `C(n, k)`.
///
/// Evaluated as a running product `prod_{i=1..k} (n-k+i)/i`; each partial product is
/// itself a binomial coefficient, so the division is always exact.
pub fn binomial(n: i64, k: i64) -> Count {
    if n < 0 || k < 0 || k > n {
        return Count::zero();
    }
    let k = k.min(n - k) as u64;
    let base = n as u64 - k;
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= base + i;
        acc /= i;
    }
    acc
}

/// Signed view of [`binomial`], for alternating sums.
pub(crate) fn binomial_signed(n: i64, k: i64) -> BigInt {
    BigInt::from(binomial(n, k))
}

/// `2^e` for any integer exponent, as an exact rational.
pub fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Converts an exact rational to a [`Count`], failing if it is fractional or negative.
pub(crate) fn rational_to_count(op: &'static str, q: &BigRational) -> Result<Count> {
    if !q.is_integer() || q.is_negative() {
        return Err(Error::NotIntegral {
            op,
            value: q.to_string(),
        });
    }
    Ok(q.to_integer().magnitude().clone())
}

/// Converts a signed alternating-sum result to a [`Count`].
pub(crate) fn signed_to_count(op: &'static str, v: BigInt) -> Result<Count> {
    v.to_biguint().ok_or_else(|| Error::NotIntegral {
        op,
        value: v.to_string(),
    })
}

fn require_positive(op: &'static str, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(op, "n >= 1", "0"));
    }
    Ok(())
}

/// `(sum_k k*C(n,k), n*2^(n-1))`, the left side summed term by term.
pub fn weighted_sum_identity_m1(n: u64) -> Result<(Count, Count)> {
    require_positive("weighted_sum_identity_m1", n)?;
    let ni = n as i64;
    let lhs = (0..=ni).map(|k| binomial(ni, k) * k as u64).sum();
    let rhs = Count::from(n) << (n - 1);
    Ok((lhs, rhs))
}

/// `(sum_k k^2*C(n,k), n(n+1)*2^(n-2))`.
///
/// At `n = 1` the right side is `2 * 2^-1`; it is evaluated as `n(n+1)/2 * 2^(n-1)`
/// so the arithmetic stays integral.
pub fn weighted_sum_identity_m2(n: u64) -> Result<(Count, Count)> {
    require_positive("weighted_sum_identity_m2", n)?;
    let ni = n as i64;
    let lhs = (0..=ni)
        .map(|k| binomial(ni, k) * (k as u64) * (k as u64))
        .sum();
    let rhs = (Count::from(n) * (n + 1) / 2u32) << (n - 1);
    Ok((lhs, rhs))
}

/// Sums of `C(m, t)` over even and over odd `t`.
pub fn parity_sums(m: u64) -> Result<(Count, Count)> {
    if m == 0 {
        return Err(Error::domain("parity_sums", "m >= 1", "0"));
    }
    let mi = m as i64;
    let mut even = Count::zero();
    let mut odd = Count::zero();
    for t in 0..=mi {
        if t % 2 == 0 {
            even += binomial(mi, t);
        } else {
            odd += binomial(mi, t);
        }
    }
    Ok((even, odd))
}

/// `m!` exactly.
pub fn factorial(m: u64) -> Count {
    (1..=m).fold(Count::one(), |acc, i| acc * i)
}
