//! Analytic estimates: Stirling's two-sided factorial bound and the upper/lower
//! envelopes for `M(n, l, k)`.
//!
//! Every exponential term is formed as a logarithm and exponentiated once at the end.
//! The envelope expressions contain a few sub-expressions that are undefined on parts
//! of their own domain (the exponent `1/(12(n - lk - 1))` is the main one, since
//! `n <= lk` throughout). Where a guard fails the sub-expression is replaced by its
//! neutral value and [`BoundsInterval::exact_applicable`] is cleared. Containment of the
//! exact count is recorded, not assumed.

use std::f64::consts::{LN_2, PI};
use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::binomial;
use crate::generalized::m_formula_ii;
use crate::{Count, Error, Result};

/// Largest inclusion-exclusion indices with a nonvanishing boundary binomial.
/// `-1` encodes an empty defining set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaBeta {
    pub alpha: i64,
    pub beta: i64,
}

fn largest_t(n: i64, l: i64, step: i64) -> i64 {
    (0..=l).rev().find(|&t| n - t * step >= l).unwrap_or(-1)
}

/// `alpha = max{t <= l : n - tk - 1 >= l - 1}`, `beta` the same with `k - 1`.
pub fn alpha_beta(n: u64, l: u64, k: u64) -> AlphaBeta {
    let (n, l, k) = (n as i64, l as i64, k as i64);
    AlphaBeta {
        alpha: largest_t(n, l, k),
        beta: largest_t(n, l, k - 1),
    }
}

/// Natural logarithms of Stirling's lower and upper bounds on `m!`.
pub fn ln_stirling_bounds(m: u64) -> (f64, f64) {
    let mf = m as f64;
    let core = 0.5 * (2.0 * PI).ln() + (mf + 0.5) * mf.ln() - mf;
    (core + 1.0 / (12.0 * mf + 1.0), core + 1.0 / (12.0 * mf))
}

/// `sqrt(2 pi) m^(m+1/2) e^-m` times `e^(1/(12m+1))` and `e^(1/(12m))`.
pub fn stirling_bounds(m: u64) -> (f64, f64) {
    let (lo, hi) = ln_stirling_bounds(m);
    (lo.exp(), hi.exp())
}

/// Natural log of a positive count, accurate for values far beyond `f64` range.
pub fn ln_count(c: &Count) -> f64 {
    assert!(!c.is_zero(), "logarithm of zero count");
    let bits = c.bits();
    let shift = bits.saturating_sub(64);
    let top = (c >> shift).to_f64().expect("64-bit value fits f64");
    top.ln() + shift as f64 * LN_2
}

/// `c <= x`, decided in log space.
fn count_le(c: &Count, x: f64) -> bool {
    if x < 0.0 {
        return false;
    }
    c.is_zero() || ln_count(c) <= x.ln()
}

/// `x <= c`, decided in log space.
fn le_count(x: f64, c: &Count) -> bool {
    if x <= 0.0 {
        return true;
    }
    !c.is_zero() && x.ln() <= ln_count(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsInterval {
    pub lower: f64,
    pub upper: f64,
    /// Every sub-expression was evaluated under its own preconditions.
    pub exact_applicable: bool,
}

impl BoundsInterval {
    pub fn contains(&self, c: &Count) -> bool {
        le_count(self.lower, c) && count_le(c, self.upper)
    }

    pub fn is_finite(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }
}

fn ln_factorial(m: u64) -> f64 {
    (2..=m).map(|i| (i as f64).ln()).sum()
}

fn count_to_f64(c: &Count) -> f64 {
    if c.is_zero() {
        0.0
    } else {
        ln_count(c).exp()
    }
}

/// Log of one of the two large Stirling-type terms,
/// `2^(l-1)/(l-1)! (n-1)^(n-1/2) e^(1-l+lk) e^(1/(12(n - l*cap - 1)) - 1/(12(n-l)+1))
///  / (n - (idx-1)*cap - l)^(n - l*cap - l + 1/2)`.
///
/// `cap` is `k` for the alpha term and `k - 1` for the beta term. Returns `None`
/// when the base of the power is not positive; `applicable` is cleared whenever a
/// guard forces a substitution.
fn ln_growth_term(
    n: i64,
    l: i64,
    k: i64,
    cap: i64,
    idx: i64,
    applicable: &mut bool,
) -> Option<f64> {
    let base = n - (idx - 1) * cap - l;
    if base <= 0 {
        *applicable = false;
        return None;
    }
    let guard = n - l * cap - 1;
    let first = if guard > 0 {
        1.0 / (12.0 * guard as f64)
    } else {
        *applicable = false;
        0.0
    };
    let second_den = 12.0 * (n - l) as f64 + 1.0;
    if second_den <= 0.0 {
        *applicable = false;
    }
    let exponent = (n - l * cap - l) as f64 + 0.5;
    let nf = n as f64;
    Some(
        (l - 1) as f64 * LN_2 - ln_factorial((l - 1) as u64)
            + (nf - 0.5) * (nf - 1.0).ln()
            + (1 - l + l * k) as f64
            + first
            - 1.0 / second_den
            - exponent * (base as f64).ln(),
    )
}

/// Log of `2^l/(l-1)! (n-l)^(-l-1) e^(1-l) e^(1/(12n-11) - 1/12)`.
fn ln_floor_term(n: i64, l: i64, applicable: &mut bool) -> Option<f64> {
    if n - l <= 0 {
        *applicable = false;
        return None;
    }
    Some(
        l as f64 * LN_2 - ln_factorial((l - 1) as u64) - (l + 1) as f64 * ((n - l) as f64).ln()
            + (1 - l) as f64
            + 1.0 / (12.0 * n as f64 - 11.0)
            - 1.0 / 12.0,
    )
}

fn boundary_term(l: i64, idx: i64, top: i64) -> Count {
    binomial(l, idx) * binomial(top, l - 1) * 2u32
}

/// Upper and lower envelopes on `M(n, l, k)`.
///
/// Requires `k <= n <= lk` and `n >= 2`. Returns [`Error::Domain`] otherwise.
pub fn m_envelope(n: u64, l: u64, k: u64) -> Result<BoundsInterval> {
    if !(n >= 2 && l >= 1 && k >= 1 && k <= n && n <= l * k) {
        return Err(Error::domain(
            "m_envelope",
            "k <= n <= l*k and n >= 2",
            format!("n={n}, l={l}, k={k}"),
        ));
    }
    let AlphaBeta { alpha, beta } = alpha_beta(n, l, k);
    if alpha < 0 || beta < 0 {
        return Ok(BoundsInterval {
            lower: 0.0,
            upper: 0.0,
            exact_applicable: false,
        });
    }
    let (n, l, k) = (n as i64, l as i64, k as i64);
    let mut applicable = true;

    let boundary = count_to_f64(&boundary_term(l, alpha, n - alpha * k - 1))
        + count_to_f64(&boundary_term(l, beta, n - beta * (k - 1) - 1));
    let grow_alpha = ln_growth_term(n, l, k, k, alpha, &mut applicable).map_or(0.0, f64::exp);
    let grow_beta = ln_growth_term(n, l, k, k - 1, beta, &mut applicable).map_or(0.0, f64::exp);
    let floor = ln_floor_term(n, l, &mut applicable).map_or(0.0, f64::exp);

    Ok(BoundsInterval {
        upper: boundary + grow_alpha - floor + grow_beta,
        lower: -boundary + floor - grow_alpha - grow_beta,
        exact_applicable: applicable,
    })
}

/// One row of the containment report.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeRecord {
    pub n: u64,
    pub l: u64,
    pub k: u64,
    pub interval: BoundsInterval,
    pub exact: Count,
    pub contained: bool,
}

pub fn envelope_record(n: u64, l: u64, k: u64) -> Result<EnvelopeRecord> {
    let interval = m_envelope(n, l, k)?;
    let exact = m_formula_ii(n, l, k);
    let contained = interval.contains(&exact);
    Ok(EnvelopeRecord {
        n,
        l,
        k,
        interval,
        exact,
        contained,
    })
}

/// Every `(n, l, k)` of the envelope's domain with `n <= n_max`, `l <= l_max`, `k <= k_max`.
pub fn envelope_domain(n_max: u64, l_max: u64, k_max: u64) -> Vec<(u64, u64, u64)> {
    let mut points = Vec::new();
    for n in 2..=n_max {
        for l in 1..=l_max {
            for k in 1..=k_max.min(n) {
                if n <= l * k {
                    points.push((n, l, k));
                }
            }
        }
    }
    points
}

pub const REPORT_HEADER: &str = "n,l,k,lower,exact,upper,contained,applicable";

/// CSV with columns `n,l,k,lower,exact,upper,contained,applicable`.
pub fn containment_csv(records: &[EnvelopeRecord]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{:e},{},{:e},{},{}",
            r.n,
            r.l,
            r.k,
            r.interval.lower,
            r.exact,
            r.interval.upper,
            r.contained,
            r.interval.exact_applicable
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::factorial;

    #[test]
    fn alpha_beta_examples() {
        assert_eq!(alpha_beta(10, 3, 4), AlphaBeta { alpha: 1, beta: 2 });
        for l in 1..6 {
            for k in 2..6 {
                assert_eq!(alpha_beta(l, l, k), AlphaBeta { alpha: 0, beta: 0 });
            }
        }
        assert_eq!(
            alpha_beta(2, 5, 3),
            AlphaBeta {
                alpha: -1,
                beta: -1
            }
        );
    }

    #[test]
    fn alpha_beta_defining_inequalities() {
        for n in 1..=30i64 {
            for l in 1..=30i64 {
                for k in 1..=30i64 {
                    let ab = alpha_beta(n as u64, l as u64, k as u64);
                    assert!(ab.alpha <= ab.beta);
                    for (idx, step) in [(ab.alpha, k), (ab.beta, k - 1)] {
                        if idx >= 0 {
                            assert!(n - idx * step >= l);
                        }
                        if idx < l {
                            assert!(n - (idx + 1) * step - 1 < l - 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn stirling_examples() {
        let (lo, hi) = stirling_bounds(5);
        assert!(lo <= 120.0 && 120.0 <= hi);
        let (lo, hi) = stirling_bounds(1);
        assert!(lo <= 1.0 && 1.0 <= hi);
        let (lo, hi) = stirling_bounds(20);
        let exact = factorial(20).to_f64().unwrap();
        assert!(lo <= exact && exact <= hi);
        assert!((hi - lo) / exact < 0.01);
    }

    #[test]
    fn stirling_sandwich_in_log_space() {
        for m in 1..=170 {
            let (lo, hi) = ln_stirling_bounds(m);
            let exact = ln_count(&factorial(m));
            assert!(lo <= exact && exact <= hi, "m={m}");
        }
    }

    #[test]
    fn ln_count_of_large_values() {
        let big = Count::from(1u32) << 2000u32;
        assert!((ln_count(&big) - 2000.0 * LN_2).abs() < 1e-9);
        assert!((ln_count(&Count::from(120u32)) - 120f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn envelope_examples() {
        let r = envelope_record(12, 4, 4).unwrap();
        assert_eq!(r.exact, m_formula_ii(12, 4, 4));
        assert!(r.interval.is_finite());
        assert!(r.interval.lower <= r.interval.upper);

        let r = envelope_record(2, 2, 1).unwrap();
        assert_eq!(r.exact, Count::from(1u32));
        assert!(r.interval.is_finite());

        let r = envelope_record(20, 5, 5).unwrap();
        assert_eq!(r.exact, m_formula_ii(20, 5, 5));
        assert!(r.interval.is_finite());
    }

    #[test]
    fn envelope_rejects_outside_hypotheses() {
        assert!(m_envelope(1, 2, 1).is_err());
        assert!(m_envelope(5, 2, 6).is_err());
        assert!(m_envelope(9, 2, 4).is_err());
    }

    #[test]
    fn report_has_fixed_columns() {
        let records: Vec<_> = envelope_domain(6, 3, 3)
            .into_iter()
            .map(|(n, l, k)| envelope_record(n, l, k).unwrap())
            .collect();
        let csv = containment_csv(&records);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(REPORT_HEADER));
        for line in lines {
            assert_eq!(line.split(',').count(), 8, "{line}");
        }
    }
}
