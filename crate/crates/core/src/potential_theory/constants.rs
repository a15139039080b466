//! The Peierls constants `μ(d) = 49 (2/d + (1 - 2/d) q(d - 2))`,
//! `e^{λ₀} = 7 μ^{-1/4}`, `c₀ = 8d / ln(1/μ)` and the threshold dimension
//! `d₀`, the smallest `d` with `μ(d) < 1`.

use serde::{Deserialize, Serialize};

use super::returns::{q_nu, ReturnProbability};
use crate::error::{Error, Result};
use crate::stats::Interval;

/// Search ceiling for `d₀`.
const D0_SEARCH_LIMIT: u32 = 100_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsRow {
    pub d: u32,
    pub q: f64,
    pub q_error: f64,
    pub mu: f64,
    pub mu_interval: Interval,
    /// Present only where `μ < 1`.
    pub lambda0: Option<f64>,
    pub c0: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub tolerance: f64,
    pub rows: Vec<ConstantsRow>,
    /// `d₀` from the point values of `μ`.
    pub d0: u32,
    /// Smallest `d` whose lower `μ` bound is `< 1`, and smallest `d` whose
    /// upper bound is `< 1`.
    pub d0_interval: (u32, u32),
}

fn q_for(d: u32, tol: f64) -> Result<ReturnProbability> {
    q_nu(d - 2, tol)
}

pub fn constants_row(d: u32, tol: f64) -> Result<ConstantsRow> {
    if d < 5 {
        return Err(Error::Parameter(format!("constants need d >= 5, got {d}")));
    }
    let q = q_for(d, tol)?;
    let a = 2.0 / d as f64;
    let mu_of = |q: f64| 49.0 * (a + (1.0 - a) * q);
    let mu = mu_of(q.value);
    let (lambda0, c0) = if mu < 1.0 {
        (Some(7f64.ln() - 0.25 * mu.ln()), Some(8.0 * d as f64 / (1.0 / mu).ln()))
    } else {
        (None, None)
    };
    Ok(ConstantsRow {
        d,
        q: q.value,
        q_error: q.error,
        mu,
        mu_interval: Interval {
            lo: mu_of(q.value - q.error),
            hi: mu_of(q.value + q.error),
        },
        lambda0,
        c0,
    })
}

/// Table over `d_range` plus the `d₀` search, which walks `d` upward from 5
/// until the upper bound on `μ` drops below 1.
pub fn constants_report(d_range: impl IntoIterator<Item = u32>, tol: f64) -> Result<ConstantsReport> {
    let rows = d_range
        .into_iter()
        .map(|d| constants_row(d, tol))
        .collect::<Result<Vec<_>>>()?;
    let (mut lo, mut mid) = (None, None);
    let mut d = 5;
    let hi = loop {
        if d > D0_SEARCH_LIMIT {
            return Err(Error::Parameter("d0 search exceeded its limit".into()));
        }
        let row = constants_row(d, tol)?;
        if lo.is_none() && row.mu_interval.lo < 1.0 {
            lo = Some(d);
        }
        if mid.is_none() && row.mu < 1.0 {
            mid = Some(d);
        }
        if row.mu_interval.hi < 1.0 {
            break d;
        }
        d += 1;
    };
    Ok(ConstantsReport {
        tolerance: tol,
        rows,
        d0: mid.unwrap_or(hi),
        d0_interval: (lo.unwrap_or(hi), hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential_theory::returns::{q_nu_quadrature, DEFAULT_TOLERANCE};

    #[test]
    fn mu_at_five_is_far_above_one() {
        let row = constants_row(5, DEFAULT_TOLERANCE).unwrap();
        let q3 = q_nu_quadrature(3).unwrap().value;
        assert!((row.mu - 49.0 * (0.4 + 0.6 * q3)).abs() < 1e-12);
        assert!((row.mu - 29.6).abs() < 0.1);
        assert!(row.c0.is_none() && row.lambda0.is_none());
    }

    #[test]
    fn d0_is_stable_and_beyond_ninety_eight() {
        let a = constants_report(5..=8, DEFAULT_TOLERANCE).unwrap();
        let b = constants_report(5..=8, DEFAULT_TOLERANCE / 2.0).unwrap();
        assert_eq!(a.d0_interval, b.d0_interval);
        assert!(a.d0_interval.0 > 98);
        assert!(a.d0_interval.0 <= a.d0 && a.d0 <= a.d0_interval.1);
        let row = constants_row(a.d0, DEFAULT_TOLERANCE).unwrap();
        let c0 = row.c0.unwrap();
        assert!(c0 > 0.0);
        assert!((row.lambda0.unwrap() - (7.0 * row.mu.powf(-0.25)).ln()).abs() < 1e-12);
    }

    /// `μ(d) d → 49 (2 + 1/2)`: the `q(d-2) ~ 1/(2d)` term adds half of the
    /// `2/d` term's weight.
    #[test]
    fn mu_times_d_limit() {
        let at = |d: u32| {
            let r = constants_row(d, DEFAULT_TOLERANCE).unwrap();
            r.mu * d as f64
        };
        let (m3, m4) = (at(1_000), at(10_000));
        assert!((m4 - 122.5).abs() < (m3 - 122.5).abs());
        assert!((m4 - 122.5).abs() < 0.05);
    }
}
