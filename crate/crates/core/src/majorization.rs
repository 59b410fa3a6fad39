//! Partial-sum tests for the permutahedron, the signed (B_k) permutahedron
//! and the halfcube. All three run in `O(n log n)` by sorting.

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorizationVerdict {
    pub holds: bool,
    /// Minimum of `rhs - lhs` over the checked inequalities (and minus the
    /// absolute sum residual where equality is required).
    pub worst_slack: f64,
}

impl MajorizationVerdict {
    fn from_slack(worst_slack: f64, tol: f64) -> Self {
        MajorizationVerdict {
            holds: worst_slack >= -tol,
            worst_slack,
        }
    }
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn check_len(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    Ok(())
}

/// Slacks `Σᵢ≤ₖ p↓ᵢ - Σᵢ≤ₖ q↓ᵢ` for `k = 1..n-1` together with the residual
/// of the total sums `Σq - Σp`.
pub fn majorization_slacks(p: &[f64], q: &[f64]) -> Result<(Vec<f64>, f64)> {
    check_len(p, q)?;
    let ps = sorted_desc(p);
    let qs = sorted_desc(q);
    let n = p.len();
    let mut slacks = Vec::with_capacity(n.saturating_sub(1));
    let (mut sp, mut sq) = (0.0, 0.0);
    for k in 0..n {
        sp += ps[k];
        sq += qs[k];
        if k + 1 < n {
            slacks.push(sp - sq);
        }
    }
    Ok((slacks, sq - sp))
}

/// Is `q` majorized by `p` (`q` in the permutahedron of `p`)?
pub fn majorizes(p: &[f64], q: &[f64], tol: f64) -> Result<MajorizationVerdict> {
    let (slacks, residual) = majorization_slacks(p, q)?;
    let worst = slacks
        .iter()
        .copied()
        .fold(-residual.abs(), f64::min);
    Ok(MajorizationVerdict::from_slack(worst, tol))
}

/// Slacks `Σᵢ≤ₖ |p|↓ᵢ - Σᵢ≤ₖ |q|↓ᵢ` for `k = 1..n`.
pub fn weak_abs_slacks(p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    check_len(p, q)?;
    let abs = |v: &[f64]| sorted_desc(&v.iter().map(|x| x.abs()).collect::<Vec<_>>());
    let ps = abs(p);
    let qs = abs(q);
    let (mut sp, mut sq) = (0.0, 0.0);
    Ok(ps
        .iter()
        .zip(&qs)
        .map(|(a, b)| {
            sp += a;
            sq += b;
            sp - sq
        })
        .collect())
}

/// Is `|q|` weakly majorized by `|p|` (`q` in the B_n-permutahedron of `p`)?
pub fn weak_abs_majorizes(p: &[f64], q: &[f64], tol: f64) -> Result<MajorizationVerdict> {
    let worst = weak_abs_slacks(p, q)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(MajorizationVerdict::from_slack(worst, tol))
}

/// Largest value of `Σ_{i∉J} xᵢ - Σ_{i∈J} xᵢ` over odd-cardinality `J`.
///
/// The unconstrained maximum flips exactly the negative entries; when that
/// set has even size the parity is repaired at the entry of least
/// magnitude.
pub fn max_odd_flip(x: &[f64]) -> f64 {
    let abs_sum: f64 = x.iter().map(|v| v.abs()).sum();
    let negatives = x.iter().filter(|&&v| v < 0.0).count();
    if negatives % 2 == 1 {
        abs_sum
    } else {
        let min_abs = x.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        abs_sum - 2.0 * min_abs
    }
}

/// Halfcube (demicube) membership: `|xᵢ| ≤ 1` and every odd sign flip sums
/// to at most `n - 2`.
pub fn halfcube_contains(x: &[f64], tol: f64) -> Result<MajorizationVerdict> {
    let n = x.len();
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "halfcube dimension",
            value: n as i64,
        });
    }
    let box_slack = 1.0 - x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let facet_slack = (n as f64 - 2.0) - max_odd_flip(x);
    Ok(MajorizationVerdict::from_slack(
        box_slack.min(facet_slack),
        tol,
    ))
}
