//! Brute-force ground truth.
//!
//! Everything here counts configurations by listing them. Nothing in this module
//! calls into the formula modules, so agreement between the two is meaningful.
//!
//! The recursive walkers prune on capacity (remaining balls against remaining
//! slots times the per-part bounds), which keeps the grids used by the test
//! suites in the low seconds without skipping any valid configuration.

use rayon::prelude::*;

use crate::{Count, Error, Result};

/// Ordered composition: every part is at least one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<u64>,
}

impl Composition {
    pub fn new(parts: Vec<u64>) -> Option<Self> {
        if parts.iter().all(|&p| p >= 1) {
            Some(Composition { parts })
        } else {
            None
        }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn n(&self) -> u64 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn max_part(&self) -> u64 {
        self.parts.iter().copied().max().unwrap_or(0)
    }
}

impl std::fmt::Display for Composition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write_parts(f, &self.parts)
    }
}

/// Weak composition: parts may be zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeakComposition {
    parts: Vec<u64>,
}

impl WeakComposition {
    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn n(&self) -> u64 {
        self.parts.iter().sum()
    }
}

impl std::fmt::Display for WeakComposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write_parts(f, &self.parts)
    }
}

fn write_parts(f: &mut std::fmt::Formatter<'_>, parts: &[u64]) -> std::fmt::Result {
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

/// Lexicographic stream of fixed-length sequences with every part in `[min, max]`
/// summing to `total`.
#[derive(Debug, Clone)]
pub struct BoundedSequences {
    total: u64,
    min: u64,
    max: u64,
    current: Option<Vec<u64>>,
    started: bool,
}

impl BoundedSequences {
    pub fn new(total: u64, len: usize, min: u64, max: u64) -> Self {
        let n = len as u64;
        let feasible = min <= max
            && n.checked_mul(min).is_some_and(|lo| lo <= total)
            && n.checked_mul(max).is_none_or(|hi| total <= hi)
            && (len > 0 || total == 0);
        let current = feasible.then(|| {
            let mut parts = vec![0; len];
            fill_lex_min(&mut parts, total, min, max);
            parts
        });
        BoundedSequences {
            total,
            min,
            max,
            current,
            started: false,
        }
    }

    /// A stream with no items.
    pub fn empty() -> Self {
        BoundedSequences {
            total: 0,
            min: 0,
            max: 0,
            current: None,
            started: false,
        }
    }

    fn advance(&mut self) {
        let Some(parts) = self.current.as_mut() else {
            return;
        };
        let len = parts.len();
        let mut suffix = 0;
        for i in (0..len.saturating_sub(1)).rev() {
            suffix += parts[i + 1];
            let slots = (len - 1 - i) as u64;
            if parts[i] < self.max && suffix > slots * self.min {
                parts[i] += 1;
                fill_lex_min(&mut parts[i + 1..], suffix - 1, self.min, self.max);
                return;
            }
        }
        self.current = None;
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Smallest lexicographic arrangement of `remaining` over `slots` under the bounds.
fn fill_lex_min(slots: &mut [u64], mut remaining: u64, min: u64, max: u64) {
    let len = slots.len();
    for (p, slot) in slots.iter_mut().enumerate() {
        let rest = (len - p - 1) as u64;
        let v = remaining.saturating_sub(rest * max).max(min);
        *slot = v;
        remaining -= v;
    }
}

impl Iterator for BoundedSequences {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.started {
            self.advance();
        }
        self.started = true;
        self.current.clone()
    }
}

/// All compositions of `n` into exactly `l` positive parts, lexicographically.
///
/// Empty when `l == 0` or `l > n`.
pub fn enumerate_compositions(n: u64, l: u64) -> impl Iterator<Item = Composition> {
    enumerate_capped(n, l, n)
}

/// Compositions of `n` into `l` positive parts, each at most `cap`.
pub fn enumerate_capped(n: u64, l: u64, cap: u64) -> impl Iterator<Item = Composition> {
    let seq = if l == 0 || n == 0 {
        BoundedSequences::empty()
    } else {
        BoundedSequences::new(n, l as usize, 1, cap)
    };
    seq.map(|parts| Composition { parts })
}

/// Compositions of `n` into `l` parts whose largest part is exactly `k`.
pub fn enumerate_exact_max(n: u64, l: u64, k: u64) -> impl Iterator<Item = Composition> {
    enumerate_capped(n, l, k).filter(move |c| c.parts.contains(&k))
}

/// Weak compositions of `n` into `l` parts, each at most `k`.
pub fn enumerate_weak(n: u64, l: u64, k: u64) -> impl Iterator<Item = WeakComposition> {
    BoundedSequences::new(n, l as usize, 0, k).map(|parts| WeakComposition { parts })
}

/// Depth-first walk over fixed-length sequences with parts in `[min, max]`.
fn walk_fixed(
    remaining: u64,
    slots: u64,
    min: u64,
    max: u64,
    buf: &mut Vec<u64>,
    visit: &mut dyn FnMut(&[u64]),
) {
    if slots == 0 {
        if remaining == 0 {
            visit(buf);
        }
        return;
    }
    let rest = slots - 1;
    let lo = remaining.saturating_sub(rest.saturating_mul(max)).max(min);
    let hi = remaining.saturating_sub(rest * min).min(max);
    for v in lo..=hi {
        buf.push(v);
        walk_fixed(remaining - v, rest, min, max, buf, visit);
        buf.pop();
    }
}

/// Depth-first walk over compositions of `remaining` (any length) with parts at most `max`.
fn walk_any(remaining: u64, max: u64, buf: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64])) {
    if remaining == 0 {
        visit(buf);
        return;
    }
    for v in 1..=remaining.min(max) {
        buf.push(v);
        walk_any(remaining - v, max, buf, visit);
        buf.pop();
    }
}

/// Counts fixed-length sequences satisfying `pred`, split across threads on the first part.
fn count_fixed<P>(total: u64, len: u64, min: u64, max: u64, pred: P) -> u64
where
    P: Fn(&[u64]) -> bool + Sync,
{
    if len == 0 {
        return u64::from(total == 0 && pred(&[]));
    }
    let rest = len - 1;
    let lo = total.saturating_sub(rest.saturating_mul(max)).max(min);
    let Some(hi) = total.checked_sub(rest * min).map(|h| h.min(max)) else {
        return 0;
    };
    if lo > hi {
        return 0;
    }
    (lo..=hi)
        .into_par_iter()
        .map(|first| {
            let mut count = 0;
            let mut buf = vec![first];
            walk_fixed(total - first, rest, min, max, &mut buf, &mut |s| {
                if pred(s) {
                    count += 1;
                }
            });
            count
        })
        .sum()
}

/// Counts compositions of `n` of any length satisfying `pred`.
fn count_any<P>(n: u64, max: u64, pred: P) -> u64
where
    P: Fn(&[u64]) -> bool + Sync,
{
    if n == 0 {
        return u64::from(pred(&[]));
    }
    (1..=n.min(max))
        .into_par_iter()
        .map(|first| {
            let mut count = 0;
            let mut buf = vec![first];
            walk_any(n - first, max, &mut buf, &mut |s| {
                if pred(s) {
                    count += 1;
                }
            });
            count
        })
        .sum()
}

/// Number of compositions of `n` into `l` parts with largest part exactly `k`.
pub fn oracle_m(n: u64, l: u64, k: u64) -> Count {
    if n == 0 || l == 0 || k == 0 {
        return Count::from(0u32);
    }
    Count::from(count_fixed(n, l, 1, k, |s| s.contains(&k)))
}

/// Number of weak compositions of `n` into `l` parts, each at most `k`.
pub fn oracle_r(n: u64, l: u64, k: u64) -> Count {
    Count::from(count_fixed(n, l, 0, k, |_| true))
}

/// Number of compositions of `n` (any length) with largest part exactly `k`.
pub fn oracle_b(n: u64, k: u64) -> Count {
    (1..=n).map(|l| oracle_m(n, l, k)).sum()
}

/// Number of compositions of `n` into exactly `l` parts.
pub fn oracle_k(n: u64, l: u64) -> Count {
    if n == 0 || l == 0 {
        return Count::from(0u32);
    }
    Count::from(count_fixed(n, l, 1, n, |_| true))
}

/// Sum of [`oracle_m`] over every ball count `i` with the given `l` and `k`.
pub fn oracle_n(l: u64, k: u64) -> Count {
    (1..=l * k).map(|i| oracle_m(i, l, k)).sum()
}

/// Compositions of `n = 2k + j` containing a part `k` and another part `k + i`.
///
/// `len` restricts the count to compositions with exactly that many parts.
pub fn oracle_two_marked(n: u64, k: u64, i: u64, len: Option<u64>) -> Result<Count> {
    let j = n.checked_sub(2 * k);
    match j {
        Some(j) if 1 <= i && i <= j && j < k => {}
        _ => {
            return Err(Error::domain(
                "oracle_two_marked",
                "n = 2k + j with 1 <= i <= j < k",
                format!("n={n}, k={k}, i={i}"),
            ))
        }
    }
    let big = k + i;
    let pred = |s: &[u64]| s.contains(&k) && s.contains(&big);
    Ok(Count::from(match len {
        Some(l) => count_fixed(n, l, 1, n, pred),
        None => count_any(n, n, pred),
    }))
}

/// Compositions of `n = 2k + j` (`j < k`) with at least `t` parts equal to `k`.
///
/// `len` restricts the count to compositions with exactly that many parts.
pub fn oracle_at_least_t_full(n: u64, k: u64, t: u64, len: Option<u64>) -> Result<Count> {
    if !(1..=2).contains(&t) {
        return Err(Error::domain(
            "oracle_at_least_t_full",
            "t in {1, 2}",
            format!("t={t}"),
        ));
    }
    match n.checked_sub(2 * k) {
        Some(j) if k >= 1 && j < k => {}
        _ => {
            return Err(Error::domain(
                "oracle_at_least_t_full",
                "n = 2k + j with 0 <= j < k",
                format!("n={n}, k={k}"),
            ))
        }
    }
    let pred = |s: &[u64]| s.iter().filter(|&&p| p == k).count() as u64 >= t;
    Ok(Count::from(match len {
        Some(l) => count_fixed(n, l, 1, n, pred),
        None => count_any(n, n, pred),
    }))
}

/// Tally of every composition of `n` by `(number of parts, largest part)`.
///
/// `profile[l][k]` is `M(n, l, k)`. One pass over all `2^(n-1)` compositions, for
/// grid checks that need every `(l, k)` at once.
pub fn composition_profile(n: u64) -> Vec<Vec<u64>> {
    let size = n as usize + 1;
    if n == 0 {
        return vec![vec![0; size]; size];
    }
    (1..=n)
        .into_par_iter()
        .map(|first| {
            let mut table = vec![vec![0u64; size]; size];
            let mut buf = vec![first];
            walk_any(n - first, n, &mut buf, &mut |s| {
                let max = s.iter().copied().max().unwrap_or(0) as usize;
                table[s.len()][max] += 1;
            });
            table
        })
        .reduce(
            || vec![vec![0u64; size]; size],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            },
        )
}
