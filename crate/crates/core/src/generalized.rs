//! Arbitrary `(n, l, k)`: `R` by inclusion-exclusion and by recurrence, the two
//! formulas expressing `M` through `R`, the `R` identities, the sums `K` and `N`,
//! and the bin-count distribution of `B`.
//!
//! `R` is extended past its counting domain so the formulas can be summed without
//! guards: `R(n, l, c) = 0` for `n < 0` or `c < 0`, `R(n, 0, c) = [n == 0]`, and
//! `R(n, l, 0) = [n == 0]`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::combinatorics::{binomial, binomial_signed, signed_to_count};
use crate::{Count, Error, Result};

/// A `(balls, bins, capacity)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    pub n: u64,
    pub l: u64,
    pub k: u64,
}

impl Params {
    pub fn new(n: u64, l: u64, k: u64) -> Self {
        Params { n, l, k }
    }

    /// Whether some composition of `n` into `l` parts has largest part exactly `k`.
    pub fn m_feasible(&self) -> bool {
        let Params { n, l, k } = *self;
        l >= 1 && k >= 1 && l + k - 1 <= n && n <= l * k
    }
}

/// `R` by inclusion-exclusion on the set of overfull bins.
pub fn r_pie(n: u64, l: u64, k: u64) -> Count {
    r_pie_ext(n as i64, l as i64, k as i64)
}

pub(crate) fn r_pie_ext(n: i64, l: i64, cap: i64) -> Count {
    if n < 0 || cap < 0 || l < 0 {
        return Count::zero();
    }
    if l == 0 {
        return if n == 0 { Count::one() } else { Count::zero() };
    }
    let mut acc = BigInt::zero();
    for t in 0..=l {
        let top = n - t * (cap + 1) + l - 1;
        if top < l - 1 {
            break;
        }
        let term = binomial_signed(l, t) * binomial_signed(top, l - 1);
        if t % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    signed_to_count("r_pie", acc).expect("inclusion-exclusion count is nonnegative")
}

/// `R` by adding one bin at a time: `R(m, b+1, k) = sum_{i=0..k} R(m-i, b, k)`.
///
/// Keeps a single row `R(0..=n, b, k)` and a running window sum.
pub fn r_recurrence(n: u64, l: u64, k: u64) -> Count {
    r_recurrence_ext(n as i64, l as i64, k as i64)
}

pub(crate) fn r_recurrence_ext(n: i64, l: i64, cap: i64) -> Count {
    if n < 0 || cap < 0 || l < 0 {
        return Count::zero();
    }
    if l == 0 {
        return if n == 0 { Count::one() } else { Count::zero() };
    }
    let width = n as usize + 1;
    let cap = cap as usize;
    let mut row: Vec<Count> = (0..width)
        .map(|m| {
            if m <= cap {
                Count::one()
            } else {
                Count::zero()
            }
        })
        .collect();
    for _ in 1..l {
        let mut next = Vec::with_capacity(width);
        let mut window = Count::zero();
        for m in 0..width {
            window += &row[m];
            if m > cap {
                window -= &row[m - cap - 1];
            }
            next.push(window.clone());
        }
        row = next;
    }
    row.pop().unwrap_or_default()
}

/// `M` from the inclusion-exclusion over the number of full bins.
///
/// Returns zero outside `l + k - 1 <= n <= l*k`.
pub fn m_formula_i(n: u64, l: u64, k: u64) -> Count {
    if !Params::new(n, l, k).m_feasible() {
        return Count::zero();
    }
    let (n, l, k) = (n as i64, l as i64, k as i64);
    let mut acc = BigInt::zero();
    for t in 1..=l {
        let term =
            binomial_signed(l, t) * BigInt::from(r_pie_ext(n - t * (k - 1) - l, l - t, k - 1));
        if t % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    signed_to_count("m_formula_i", acc).expect("count of compositions is nonnegative")
}

/// `M(n, l, k) = R(n - l, l, k - 1) - R(n - l, l, k - 2)`.
///
/// Returns zero outside `l + k - 1 <= n <= l*k`.
pub fn m_formula_ii(n: u64, l: u64, k: u64) -> Count {
    m_formula_ii_with(n, l, k, r_pie_ext)
}

/// [`m_formula_ii`] with both `R` terms taken from the recurrence.
pub fn m_formula_ii_recurrence(n: u64, l: u64, k: u64) -> Count {
    m_formula_ii_with(n, l, k, r_recurrence_ext)
}

fn m_formula_ii_with(n: u64, l: u64, k: u64, r: fn(i64, i64, i64) -> Count) -> Count {
    if !Params::new(n, l, k).m_feasible() {
        return Count::zero();
    }
    let (n, l, k) = (n as i64, l as i64, k as i64);
    let all = r(n - l, l, k - 1);
    let below = r(n - l, l, k - 2);
    all - below
}

/// Formula II written directly in binomials:
/// `sum_t (-1)^t C(l,t) [C(n-tk-1, l-1) - C(n-t(k-1)-1, l-1)]`.
///
/// No feasibility guard; the alternating sum itself vanishes outside the window.
pub fn m_formula_ii_binomial_form(n: u64, l: u64, k: u64) -> Count {
    if l == 0 || k == 0 {
        return Count::zero();
    }
    let (n, l, k) = (n as i64, l as i64, k as i64);
    let mut acc = BigInt::zero();
    for t in 0..=l {
        let term = binomial_signed(l, t)
            * (binomial_signed(n - t * k - 1, l - 1) - binomial_signed(n - t * (k - 1) - 1, l - 1));
        if t % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    signed_to_count("m_formula_ii_binomial_form", acc)
        .expect("count of compositions is nonnegative")
}

/// Compositions of `n` into exactly `l` parts: `C(n-1, l-1)`.
pub fn k_total(n: u64, l: u64) -> Count {
    binomial(n as i64 - 1, l as i64 - 1)
}

/// `sum_{i=1..n-l+1} M(n, l, i)`.
pub fn k_partition_sum(n: u64, l: u64) -> Count {
    if l == 0 || l > n {
        return Count::zero();
    }
    (1..=n - l + 1).map(|i| m_formula_ii(n, l, i)).sum()
}

/// Compositions into exactly `l` parts, any total, with largest part exactly `k`:
/// `k^l - (k-1)^l`.
pub fn n_total(l: u64, k: u64) -> Count {
    if k == 0 {
        return Count::zero();
    }
    let l = l as u32;
    Count::from(k).pow(l) - Count::from(k - 1).pow(l)
}

/// `sum_{i=k+l-1..lk} M(i, l, k)`.
pub fn n_partition_sum(l: u64, k: u64) -> Count {
    if l == 0 || k == 0 {
        return Count::zero();
    }
    (k + l - 1..=l * k).map(|i| m_formula_ii(i, l, k)).sum()
}

/// Named identities on `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `R(n, l, k) = R(lk - n, l, k)`.
    Lem1,
    /// `R(n, l, m + k) = sum_{i=0..n} R(i, l, m) R(n - i, l, k)`.
    Lem2,
    /// `R(n, l + 1, k) = sum_{i=0..k} R(n - i, l, k)`.
    Lem4,
    /// `R(n+1, l+1, k) - R(n, l+1, k) = R(n+1, l, k) - R(n-k, l, k)`.
    Lem5,
}

impl Identity {
    pub const ALL: [Identity; 4] = [
        Identity::Lem1,
        Identity::Lem2,
        Identity::Lem4,
        Identity::Lem5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Lem1 => "lem1",
            Identity::Lem2 => "lem2",
            Identity::Lem4 => "lem4",
            Identity::Lem5 => "lem5",
        }
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lem1" => Ok(Identity::Lem1),
            "lem2" => Ok(Identity::Lem2),
            "lem4" => Ok(Identity::Lem4),
            "lem5" => Ok(Identity::Lem5),
            other => Err(Error::UnknownIdentity(other.to_string())),
        }
    }
}

/// Parameters of an identity instance. `m` is only read by [`Identity::Lem2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityParams {
    pub n: u64,
    pub l: u64,
    pub k: u64,
    pub m: u64,
}

/// Evaluates both sides of an identity with [`r_pie`].
///
/// For [`Identity::Lem5`] the negative terms are moved across so both sides are
/// counts: `R(n+1, l+1, k) + R(n-k, l, k)` against `R(n, l+1, k) + R(n+1, l, k)`.
pub fn identity_check(id: Identity, p: IdentityParams) -> Result<(Count, Count)> {
    let IdentityParams { n, l, k, m } = p;
    let r = |n: i64, l: i64, k: i64| r_pie_ext(n, l, k);
    let (ni, li, ki) = (n as i64, l as i64, k as i64);
    match id {
        Identity::Lem1 => {
            if n > l * k {
                return Err(Error::domain(
                    "lem1",
                    "0 <= n <= l*k",
                    format!("n={n}, l={l}, k={k}"),
                ));
            }
            Ok((r(ni, li, ki), r(li * ki - ni, li, ki)))
        }
        Identity::Lem2 => {
            let mi = m as i64;
            let rhs = (0..=ni).map(|i| r(i, li, mi) * r(ni - i, li, ki)).sum();
            Ok((r(ni, li, mi + ki), rhs))
        }
        Identity::Lem4 => {
            let rhs = (0..=ki).map(|i| r(ni - i, li, ki)).sum();
            Ok((r(ni, li + 1, ki), rhs))
        }
        Identity::Lem5 => {
            let lhs = r(ni + 1, li + 1, ki) + r(ni - ki, li, ki);
            let rhs = r(ni, li + 1, ki) + r(ni + 1, li, ki);
            Ok((lhs, rhs))
        }
    }
}

/// `M(n, l, k)` for every bin count `l = 1..=n`, with the mean bin count.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    pub n: u64,
    pub k: u64,
    pub rows: Vec<(u64, Count)>,
    pub mean_bins: BigRational,
}

impl DistributionTable {
    pub fn total(&self) -> Count {
        self.rows.iter().map(|(_, c)| c).sum()
    }

    /// Rows with a nonzero count.
    pub fn support(&self) -> impl Iterator<Item = &(u64, Count)> {
        self.rows.iter().filter(|(_, c)| !c.is_zero())
    }
}

pub fn distribution(n: u64, k: u64) -> Result<DistributionTable> {
    if k == 0 || k > n {
        return Err(Error::domain(
            "distribution",
            "1 <= k <= n",
            format!("n={n}, k={k}"),
        ));
    }
    let rows: Vec<(u64, Count)> = (1..=n)
        .into_par_iter()
        .map(|l| (l, m_formula_ii(n, l, k)))
        .collect();
    let total: Count = rows.iter().map(|(_, c)| c).sum();
    if total.is_zero() {
        return Err(Error::EmptyDistribution { n, k });
    }
    let weighted: Count = rows.iter().map(|(l, c)| c * *l).sum();
    let mean_bins = BigRational::new(weighted.into(), total.into());
    Ok(DistributionTable {
        n,
        k,
        rows,
        mean_bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{composition_profile, oracle_m, oracle_r};

    fn c(v: u64) -> Count {
        Count::from(v)
    }

    #[test]
    fn r_examples() {
        assert_eq!(r_pie(4, 2, 2), c(1));
        assert_eq!(r_pie(0, 4, 3), c(1));
        assert_eq!(r_pie(3, 5, 3), c(35));
        assert_eq!(r_recurrence(4, 2, 2), c(1));
        assert_eq!(r_recurrence(12, 4, 3), c(1));
        assert_eq!(r_pie(12, 4, 3), c(1));
        for n in 0..8 {
            let single = if n <= 3 { c(1) } else { c(0) };
            assert_eq!(r_recurrence(n, 1, 3), single);
        }
    }

    #[test]
    fn r_extension() {
        assert_eq!(r_pie_ext(0, 3, 0), c(1));
        assert_eq!(r_pie_ext(2, 3, 0), c(0));
        assert_eq!(r_pie_ext(0, 3, -1), c(0));
        assert_eq!(r_pie_ext(0, 0, 5), c(1));
        assert_eq!(r_pie_ext(1, 0, 5), c(0));
        assert_eq!(r_recurrence_ext(0, 3, 0), c(1));
        assert_eq!(r_recurrence_ext(0, 0, 2), c(1));
    }

    #[test]
    fn m_examples() {
        assert_eq!(m_formula_i(8, 5, 4), c(5));
        assert_eq!(m_formula_i(8, 4, 3), c(18));
        assert_eq!(m_formula_ii(8, 5, 4), c(5));
        assert_eq!(m_formula_ii(8, 4, 3), c(18));
        assert_eq!(r_pie(3, 5, 3), c(35));
        assert_eq!(r_pie(3, 5, 2), c(30));
        for l in 1..=6 {
            for k in 1..=5 {
                assert_eq!(m_formula_i(l * k, l, k), c(1));
                assert_eq!(m_formula_ii(l * k, l, k), c(1));
            }
            assert_eq!(m_formula_ii(l, l, 1), c(1));
        }
    }

    #[test]
    fn m_three_way_small_grid() {
        for n in 1..=12u64 {
            let profile = composition_profile(n);
            for l in 1..=n {
                for k in 1..=n {
                    let expected = c(profile[l as usize][k as usize]);
                    assert_eq!(m_formula_i(n, l, k), expected, "I n={n} l={l} k={k}");
                    assert_eq!(m_formula_ii(n, l, k), expected, "II n={n} l={l} k={k}");
                    assert_eq!(m_formula_ii_recurrence(n, l, k), expected);
                    assert_eq!(m_formula_ii_binomial_form(n, l, k), expected);
                }
            }
        }
    }

    #[test]
    fn r_routes_agree_with_oracle() {
        for n in 0..=14 {
            for l in 1..=5 {
                for k in 1..=5 {
                    let o = oracle_r(n, l, k);
                    assert_eq!(r_pie(n, l, k), o, "n={n} l={l} k={k}");
                    assert_eq!(r_recurrence(n, l, k), o, "n={n} l={l} k={k}");
                }
            }
        }
    }

    #[test]
    fn k_and_n_examples() {
        assert_eq!(k_total(5, 2), c(4));
        for n in 1..=6 {
            assert_eq!(k_total(n, n), c(1));
        }
        assert_eq!(k_total(8, 3), c(21));
        assert_eq!(k_partition_sum(8, 3), c(21));
        assert_eq!(k_total(2, 3), c(0));
        assert_eq!(n_total(2, 2), c(3));
        for l in 1..=5 {
            assert_eq!(n_total(l, 1), c(1));
        }
        assert_eq!(n_total(3, 3), c(19));
        let oracle_sum: Count = (1..=9).map(|i| oracle_m(i, 3, 3)).sum();
        assert_eq!(oracle_sum, c(19));
        assert_eq!(n_partition_sum(3, 3), c(19));
    }

    #[test]
    fn identity_examples() {
        let p = |n, l, k, m| IdentityParams { n, l, k, m };
        assert_eq!(
            identity_check(Identity::Lem1, p(3, 2, 3, 0)).unwrap(),
            (c(4), c(4))
        );
        assert!(identity_check(Identity::Lem1, p(7, 2, 3, 0)).is_err());
        let (a, b) = identity_check(Identity::Lem5, p(5, 2, 3, 0)).unwrap();
        assert_eq!(a, b);
        let (a, b) = identity_check(Identity::Lem4, p(5, 2, 3, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn convolution_identity_overcounts() {
        // The convolution sums over independent splits of each capped part; a part of
        // size s <= m + k arises from up to s + 1 such splits, so the right side is
        // larger as soon as any part is positive.
        let p = IdentityParams {
            n: 2,
            l: 2,
            k: 1,
            m: 1,
        };
        let (lhs, rhs) = identity_check(Identity::Lem2, p).unwrap();
        assert_eq!(lhs, c(3));
        assert_eq!(rhs, c(6));
        let p = IdentityParams {
            n: 0,
            l: 3,
            k: 2,
            m: 2,
        };
        let (lhs, rhs) = identity_check(Identity::Lem2, p).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn identity_names_parse() {
        for id in Identity::ALL {
            assert_eq!(id.name().parse::<Identity>().unwrap(), id);
        }
        assert_eq!(
            "lem3".parse::<Identity>(),
            Err(Error::UnknownIdentity("lem3".into()))
        );
    }

    #[test]
    fn distribution_examples() {
        let t = distribution(10, 3).unwrap();
        let oracle: Count = (1..=10).map(|l| oracle_m(10, l, 3)).sum();
        assert_eq!(t.total(), oracle);
        assert_eq!(t.rows.len(), 10);

        let t = distribution(4, 4).unwrap();
        let support: Vec<_> = t.support().cloned().collect();
        assert_eq!(support, vec![(1, c(1))]);
        assert_eq!(t.mean_bins, BigRational::one());

        assert!(distribution(3, 5).is_err());
        assert!(distribution(3, 0).is_err());
    }

    #[test]
    fn mean_bins_within_support() {
        for n in 1..=15 {
            for k in 1..=n {
                let t = distribution(n, k).unwrap();
                let lo = t.support().map(|(l, _)| *l).min().unwrap();
                let hi = t.support().map(|(l, _)| *l).max().unwrap();
                let lo = BigRational::from_integer(lo.into());
                let hi = BigRational::from_integer(hi.into());
                assert!(lo <= t.mean_bins && t.mean_bins <= hi, "n={n} k={k}");
            }
        }
    }
}
