//! Closed forms for `B(n, k)` and `M(n, l, k)` when `n < 3k`, together with the
//! intermediate counts used to assemble the `n = 2k + j` case:
//!
//! * `T(k, j, i)`: compositions of `2k + j` with a part `k` and another part `k + i`;
//! * `U(k, j, i, l)`: the same restricted to `l` parts;
//! * `F(k, j, t)`: compositions of `2k + j` with at least `t` parts equal to `k`;
//! * `G(k, j, l)`: `F` with `t = 2`, restricted to `l` parts.
//!
//! Several closed forms carry a factor `2^e` with `e < 0` at the low end of their
//! range. They are evaluated over the rationals and the result is checked to be a
//! nonnegative integer before it is returned.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::combinatorics::{binomial, pow2, rational_to_count};
use crate::generalized::m_formula_ii;
use crate::{Count, Error, Result};

/// Which closed form, if any, covers `B(n, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `n < k`: no composition qualifies.
    Trivial,
    /// `n = k`: the single one-part composition.
    Single,
    /// `k < n < 2k`: one part holds more than half of the balls.
    Dominant,
    /// `n = 2k`.
    Double,
    /// `n = 2k + j` with `0 < j < k`.
    DoublePlus { j: u64 },
    /// `n = mk + j` with `m >= 3`; no closed form is known here.
    General { m: u64, j: u64 },
}

impl Regime {
    pub fn classify(n: u64, k: u64) -> Regime {
        assert!(k >= 1, "capacity must be positive");
        if n < k {
            Regime::Trivial
        } else if n == k {
            Regime::Single
        } else if n < 2 * k {
            Regime::Dominant
        } else if n == 2 * k {
            Regime::Double
        } else if n < 3 * k {
            Regime::DoublePlus { j: n - 2 * k }
        } else {
            Regime::General { m: n / k, j: n % k }
        }
    }

    /// True when a closed form (or a trivial value) exists for `B`.
    pub fn has_closed_form(self) -> bool {
        !matches!(self, Regime::General { .. })
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Trivial => "trivial",
            Regime::Single => "single",
            Regime::Dominant => "dominant",
            Regime::Double => "double",
            Regime::DoublePlus { .. } => "double_plus",
            Regime::General { .. } => "general",
        }
    }
}

fn rational(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn require_dominant(op: &'static str, n: u64, k: u64) -> Result<()> {
    if k >= 1 && Regime::classify(n, k) == Regime::Dominant {
        Ok(())
    } else {
        Err(Error::Regime {
            op,
            regime: "n/2 < k < n",
            n,
            k,
        })
    }
}

fn require_double_plus(op: &'static str, k: u64, j: u64) -> Result<()> {
    if j >= 1 && j < k {
        Ok(())
    } else {
        Err(Error::Regime {
            op,
            regime: "n = 2k + j with 0 < j < k",
            n: 2 * k + j,
            k,
        })
    }
}

fn require_range(op: &'static str, what: &'static str, v: u64, lo: u64, hi: u64) -> Result<()> {
    if lo <= v && v <= hi {
        Ok(())
    } else {
        Err(Error::domain(op, what, format!("{v} outside [{lo}, {hi}]")))
    }
}

/// `l * C(n-k-1, l-2)` for `2 <= l <= n-k+1` in the dominant regime.
pub fn m_dominant(n: u64, l: u64, k: u64) -> Result<Count> {
    require_dominant("m_dominant", n, k)?;
    require_range("m_dominant", "2 <= l <= n-k+1", l, 2, n - k + 1)?;
    Ok(binomial((n - k - 1) as i64, l as i64 - 2) * l)
}

/// `(n-k+3) * 2^(n-k-2)`.
pub fn b_dominant(n: u64, k: u64) -> Result<Count> {
    require_dominant("b_dominant", n, k)?;
    let t = (n - k) as i64;
    rational_to_count("b_dominant", &(rational(t + 3) * pow2(t - 2)))
}

/// `sum_{l=2..n-k+1} l * C(n-k-1, l-2)`, term by term.
pub fn b_dominant_by_summation(n: u64, k: u64) -> Result<Count> {
    require_dominant("b_dominant_by_summation", n, k)?;
    let t = (n - k) as i64;
    Ok((2..=t + 1).map(|l| binomial(t - 1, l - 2) * l as u64).sum())
}

/// `M(2k, l, k)`: `1` for `l = 2`, else `l * C(k-1, l-2)` up to `l = k+1`.
pub fn m_2k(k: u64, l: u64) -> Result<Count> {
    if k == 0 {
        return Err(Error::domain("m_2k", "k >= 1", "k=0"));
    }
    require_range("m_2k", "2 <= l <= k+1", l, 2, k + 1)?;
    if l == 2 {
        return Ok(Count::from(1u32));
    }
    Ok(binomial(k as i64 - 1, l as i64 - 2) * l)
}

/// `(k+3) * 2^(k-2) - 1`.
pub fn b_2k(k: u64) -> Result<Count> {
    if k == 0 {
        return Err(Error::domain("b_2k", "k >= 1", "k=0"));
    }
    let k = k as i64;
    rational_to_count("b_2k", &(rational(k + 3) * pow2(k - 2) - rational(1)))
}

/// `1 + sum_{l=3..k+1} l * C(k-1, l-2)`, term by term.
pub fn b_2k_by_summation(k: u64) -> Result<Count> {
    if k == 0 {
        return Err(Error::domain("b_2k_by_summation", "k >= 1", "k=0"));
    }
    let k = k as i64;
    let tail: Count = (3..=k + 1).map(|l| binomial(k - 1, l - 2) * l as u64).sum();
    Ok(tail + 1u32)
}

/// `T`: compositions of `2k + j` holding a part `k` and another part `k + i`.
///
/// `sum_{l=1..j-i} (l^2 + 3l + 2) C(j-i-1, l-1)` for `i < j`, and `2` for `i = j`.
pub fn t_two_marked(k: u64, j: u64, i: u64) -> Result<Count> {
    if !(1 <= i && i <= j && j < k) {
        return Err(Error::domain(
            "t_two_marked",
            "1 <= i <= j < k",
            format!("k={k}, j={j}, i={i}"),
        ));
    }
    if i == j {
        return Ok(Count::from(2u32));
    }
    let d = (j - i) as i64;
    Ok((1..=d)
        .map(|l| binomial(d - 1, l - 1) * ((l * l + 3 * l + 2) as u64))
        .sum())
}

fn f_two(j: u64) -> Count {
    let j = j as i64;
    (1..=j)
        .map(|l| binomial(j - 1, l - 1) * (((l * l + 3 * l + 2) / 2) as u64))
        .sum()
}

/// `F`: compositions of `2k + j` with at least `t` parts equal to `k`, `t` in `{1, 2}`.
pub fn f_at_least(k: u64, j: u64, t: u64) -> Result<Count> {
    require_double_plus("f_at_least", k, j)?;
    match t {
        2 => Ok(f_two(j)),
        1 => {
            let s = (k + j) as i64;
            let with_marked: Count = (1..=s)
                .map(|l| binomial(s - 1, l - 1) * (l + 1) as u64)
                .sum();
            Ok(with_marked - f_two(j))
        }
        _ => Err(Error::domain("f_at_least", "t in {1, 2}", format!("t={t}"))),
    }
}

/// `U`: `T` restricted to `l` parts, `(l^2 - l) C(j-i-1, l-3)` for `3 <= l <= j-i+2`.
pub fn u_two_marked_fixed(k: u64, j: u64, i: u64, l: u64) -> Result<Count> {
    if !(1 <= i && i < j && j < k) {
        return Err(Error::domain(
            "u_two_marked_fixed",
            "1 <= i < j < k",
            format!("k={k}, j={j}, i={i}"),
        ));
    }
    require_range("u_two_marked_fixed", "3 <= l <= j-i+2", l, 3, j - i + 2)?;
    Ok(u_term(j, i, l))
}

fn u_term(j: u64, i: u64, l: u64) -> Count {
    binomial((j - i) as i64 - 1, l as i64 - 3) * (l * l - l)
}

/// `G`: at least two parts equal to `k` among exactly `l` parts,
/// `(l^2 - l)/2 * C(j-1, l-3)` for `3 <= l <= j+2`.
pub fn g_two_full_fixed(k: u64, j: u64, l: u64) -> Result<Count> {
    require_double_plus("g_two_full_fixed", k, j)?;
    require_range("g_two_full_fixed", "3 <= l <= j+2", l, 3, j + 2)?;
    Ok(g_term(j, l))
}

fn g_term(j: u64, l: u64) -> Count {
    binomial(j as i64 - 1, l as i64 - 3) * ((l * l - l) / 2)
}

/// `M(2k + j, l, k)` for `0 < j < k` and `2 <= l <= k+j+1`.
///
/// Piecewise in `l`: zero at `l = 2`; for `3 <= l <= j+1` (that is `l = j+2-s`,
/// `1 <= s < j`) the overcounts `G` and `U` for `i = 1..=s` are removed; at `l = j+2`
/// only `G` is removed; above that no correction applies.
pub fn m_2k_plus_j(k: u64, j: u64, l: u64) -> Result<Count> {
    require_double_plus("m_2k_plus_j", k, j)?;
    require_range("m_2k_plus_j", "2 <= l <= k+j+1", l, 2, k + j + 1)?;
    if l == 2 {
        return Ok(Count::zero());
    }
    let marked = binomial((k + j) as i64 - 1, l as i64 - 2) * l;
    if l >= j + 3 {
        return Ok(marked);
    }
    let mut value = marked - g_term(j, l);
    if l <= j + 1 {
        let s = j + 2 - l;
        for i in 1..=s {
            value -= u_term(j, i, l);
        }
    }
    Ok(value)
}

/// Closed forms of the three sums making up `B(2k + j, k)`:
/// `(k+j+3) 2^(k+j-2)`, `2^(j-4) (j^2+9j+14)` and `2^(j-3) (j^2+5j+2) - 2`.
pub fn sum_eval_triple(k: u64, j: u64) -> Result<(Count, Count, Count)> {
    require_double_plus("sum_eval_triple", k, j)?;
    let (k, j) = (k as i64, j as i64);
    let first = rational(k + j + 3) * pow2(k + j - 2);
    let second = pow2(j - 4) * rational(j * j + 9 * j + 14);
    let third = pow2(j - 3) * rational(j * j + 5 * j + 2) - rational(2);
    Ok((
        rational_to_count("sum_eval_triple", &first)?,
        rational_to_count("sum_eval_triple", &second)?,
        rational_to_count("sum_eval_triple", &third)?,
    ))
}

/// The same three sums, evaluated term by term.
pub fn sum_eval_terms(k: u64, j: u64) -> Result<(Count, Count, Count)> {
    require_double_plus("sum_eval_terms", k, j)?;
    let (k, j) = (k as i64, j as i64);
    let first = (2..=k + j + 1)
        .map(|l| binomial(k + j - 1, l - 2) * l as u64)
        .sum();
    let second = (3..=j + 2)
        .map(|l| binomial(j - 1, l - 3) * ((l * l - l) / 2) as u64)
        .sum();
    let third = (1..j)
        .flat_map(|i| (3..=j - i + 2).map(move |l| binomial(j - i - 1, l - 3) * (l * l - l) as u64))
        .sum();
    Ok((first, second, third))
}

/// `(k+j+3) 2^(k+j-2) - (3j^2+19j+18) 2^(j-4)`.
pub fn b_2k_plus_j(k: u64, j: u64) -> Result<Count> {
    require_double_plus("b_2k_plus_j", k, j)?;
    let (k, j) = (k as i64, j as i64);
    let value =
        rational(k + j + 3) * pow2(k + j - 2) - rational(3 * j * j + 19 * j + 18) * pow2(j - 4);
    rational_to_count("b_2k_plus_j", &value)
}

/// `B(2k + j, k)` from its four-sum form, every sum evaluated term by term.
pub fn b_2k_plus_j_by_summation(k: u64, j: u64) -> Result<Count> {
    let (first, second, third) = sum_eval_terms(k, j)?;
    let subtracted = second + third + 2u32;
    if subtracted > first {
        return Err(Error::NotIntegral {
            op: "b_2k_plus_j_by_summation",
            value: "negative".into(),
        });
    }
    Ok(first - subtracted)
}

/// `B(n, k)` for any `n, k >= 1`.
///
/// Uses the closed form of the matching [`Regime`]. For `n >= 3k` there is no closed
/// form and the value is the sum of [`m_formula_ii`] over all bin counts.
pub fn b_any(n: u64, k: u64) -> Count {
    if k == 0 {
        return Count::zero();
    }
    let closed = match Regime::classify(n, k) {
        Regime::Trivial => Ok(Count::zero()),
        Regime::Single => Ok(Count::from(1u32)),
        Regime::Dominant => b_dominant(n, k),
        Regime::Double => b_2k(k),
        Regime::DoublePlus { j } => b_2k_plus_j(k, j),
        Regime::General { .. } => return (1..=n).map(|l| m_formula_ii(n, l, k)).sum(),
    };
    closed.expect("closed form evaluated inside its own regime")
}

/// `M(n, l, k)` from whichever closed form covers `(n, l, k)`, if any.
pub fn m_closed(n: u64, l: u64, k: u64) -> Option<Count> {
    if k == 0 {
        return None;
    }
    match Regime::classify(n, k) {
        Regime::Trivial if l >= 1 => Some(Count::zero()),
        Regime::Single if l >= 1 => Some(Count::from(u32::from(l == 1))),
        Regime::Dominant => m_dominant(n, l, k).ok(),
        Regime::Double => m_2k(k, l).ok(),
        Regime::DoublePlus { j } => m_2k_plus_j(k, j, l).ok(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_at_least_t_full, oracle_b, oracle_m, oracle_two_marked};

    fn c(v: u64) -> Count {
        Count::from(v)
    }

    #[test]
    fn regime_examples() {
        assert_eq!(Regime::classify(3, 5), Regime::Trivial);
        assert_eq!(Regime::classify(4, 4), Regime::Single);
        assert_eq!(Regime::classify(7, 4), Regime::Dominant);
        assert_eq!(Regime::classify(8, 4), Regime::Double);
        assert_eq!(Regime::classify(9, 4), Regime::DoublePlus { j: 1 });
        assert_eq!(Regime::classify(9, 3), Regime::General { m: 3, j: 0 });
        assert_eq!(Regime::classify(2, 1), Regime::Double);
    }

    #[test]
    fn regime_totality() {
        for n in 1..=100u64 {
            for k in 1..=100u64 {
                let preds = [
                    n < k,
                    n == k,
                    2 * k > n && k < n,
                    n == 2 * k,
                    n > 2 * k && n < 3 * k,
                    n >= 3 * k,
                ];
                assert_eq!(preds.iter().filter(|&&p| p).count(), 1, "n={n} k={k}");
                let idx = preds.iter().position(|&p| p).unwrap();
                let expected = [
                    "trivial",
                    "single",
                    "dominant",
                    "double",
                    "double_plus",
                    "general",
                ][idx];
                assert_eq!(Regime::classify(n, k).name(), expected);
            }
        }
    }

    #[test]
    fn dominant_examples() {
        assert_eq!(m_dominant(5, 2, 3).unwrap(), c(2));
        assert_eq!(m_dominant(9, 3, 5).unwrap(), oracle_m(9, 3, 5));
        assert_eq!(m_dominant(9, 3, 5).unwrap(), c(9));
        for n in 3..12 {
            for k in n / 2 + 1..n {
                assert_eq!(m_dominant(n, n - k + 1, k).unwrap(), c(n - k + 1));
            }
        }
        assert_eq!(b_dominant(5, 3).unwrap(), c(5));
        assert_eq!(b_dominant(7, 4).unwrap(), c(12));
        assert_eq!(b_dominant(7, 4).unwrap(), oracle_b(7, 4));
        for n in 3..12 {
            assert_eq!(b_dominant(n, n - 1).unwrap(), c(2));
        }
    }

    #[test]
    fn dominant_rejects_other_regimes() {
        assert!(matches!(b_dominant(8, 4), Err(Error::Regime { .. })));
        assert!(matches!(b_dominant(4, 4), Err(Error::Regime { .. })));
        assert!(m_dominant(9, 1, 5).is_err());
        assert!(m_dominant(9, 6, 5).is_err());
    }

    #[test]
    fn double_examples() {
        for k in 1..8 {
            assert_eq!(m_2k(k, 2).unwrap(), c(1));
        }
        assert_eq!(m_2k(2, 3).unwrap(), c(3));
        assert_eq!(m_2k(4, 4).unwrap(), c(12));
        assert_eq!(m_2k(4, 4).unwrap(), oracle_m(8, 4, 4));
        assert!(m_2k(4, 6).is_err());
        assert!(m_2k(4, 1).is_err());
        assert_eq!(b_2k(2).unwrap(), c(4));
        assert_eq!(b_2k(1).unwrap(), c(1));
        assert_eq!(b_2k(5).unwrap(), c(63));
        assert_eq!(oracle_b(10, 5), c(63));
    }

    #[test]
    fn lemma_count_examples() {
        assert_eq!(t_two_marked(3, 2, 1).unwrap(), c(6));
        assert_eq!(t_two_marked(5, 3, 3).unwrap(), c(2));
        assert_eq!(
            t_two_marked(5, 3, 1).unwrap(),
            oracle_two_marked(13, 5, 1, None).unwrap()
        );
        assert!(t_two_marked(3, 2, 3).is_err());
        assert!(t_two_marked(3, 3, 1).is_err());

        assert_eq!(f_at_least(2, 1, 2).unwrap(), c(3));
        assert_eq!(f_at_least(3, 1, 2).unwrap(), c(3));
        assert_eq!(
            f_at_least(3, 2, 1).unwrap(),
            oracle_at_least_t_full(8, 3, 1, None).unwrap()
        );
        assert!(f_at_least(3, 2, 3).is_err());

        assert_eq!(u_two_marked_fixed(3, 2, 1, 3).unwrap(), c(6));
        assert_eq!(u_two_marked_fixed(5, 4, 3, 3).unwrap(), c(6));
        assert_eq!(u_two_marked_fixed(5, 4, 1, 5).unwrap(), c(20));
        assert!(u_two_marked_fixed(5, 4, 1, 6).is_err());

        assert_eq!(g_two_full_fixed(2, 1, 3).unwrap(), c(3));
        assert_eq!(g_two_full_fixed(4, 3, 3).unwrap(), c(3));
        assert_eq!(g_two_full_fixed(4, 3, 5).unwrap(), c(10));
        assert!(g_two_full_fixed(4, 3, 6).is_err());
    }

    #[test]
    fn fixed_length_counts_match_oracle_scans() {
        assert_eq!(oracle_two_marked(8, 3, 1, Some(3)).unwrap(), c(6));
        assert_eq!(oracle_two_marked(14, 5, 3, Some(3)).unwrap(), c(6));
        assert_eq!(oracle_two_marked(14, 5, 1, Some(5)).unwrap(), c(20));
        assert_eq!(oracle_at_least_t_full(5, 2, 2, Some(3)).unwrap(), c(3));
        assert_eq!(oracle_at_least_t_full(11, 4, 2, Some(3)).unwrap(), c(3));
        assert_eq!(oracle_at_least_t_full(11, 4, 2, Some(5)).unwrap(), c(10));
    }

    #[test]
    fn double_plus_examples() {
        assert_eq!(m_2k_plus_j(3, 2, 2).unwrap(), c(0));
        assert_eq!(m_2k_plus_j(3, 2, 4).unwrap(), c(18));
        assert_eq!(m_2k_plus_j(4, 1, 3).unwrap(), oracle_m(9, 3, 4));
        assert!(m_2k_plus_j(3, 2, 7).is_err());
        assert!(m_2k_plus_j(3, 3, 3).is_err());

        let (a, b, c3) = sum_eval_triple(3, 1).unwrap();
        assert_eq!((a, b, c3), (c(28), c(3), c(0)));
        assert_eq!(sum_eval_terms(3, 1).unwrap(), (c(28), c(3), c(0)));

        assert_eq!(b_2k_plus_j(3, 1).unwrap(), c(23));
        assert_eq!(oracle_b(7, 3), c(23));
        assert_eq!(b_2k_plus_j(4, 1).unwrap(), oracle_b(9, 4));
        assert_eq!(b_2k_plus_j(5, 4).unwrap(), oracle_b(14, 5));
    }

    #[test]
    fn b_any_examples() {
        assert_eq!(b_any(3, 5), c(0));
        assert_eq!(b_any(4, 4), c(1));
        assert_eq!(b_any(9, 3), oracle_b(9, 3));
    }

    #[test]
    fn summation_forms_agree() {
        for k in 2..=12 {
            for j in 1..k {
                assert_eq!(
                    sum_eval_terms(k, j).unwrap(),
                    sum_eval_triple(k, j).unwrap(),
                    "k={k} j={j}"
                );
                assert_eq!(
                    b_2k_plus_j_by_summation(k, j).unwrap(),
                    b_2k_plus_j(k, j).unwrap()
                );
            }
        }
        for k in 1..=20 {
            assert_eq!(b_2k_by_summation(k).unwrap(), b_2k(k).unwrap());
        }
    }
}
