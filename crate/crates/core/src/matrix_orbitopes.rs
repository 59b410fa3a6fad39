//! Schur–Horn orbitopes, Fan orbitopes and the tautological orbitopes of
//! SO(3), O(n) and SO(n).
//!
//! The Schur–Horn and Fan oracles have two independent routes: the default
//! one compares sorted spectra by (weak) majorization, the second one
//! evaluates the additive-compound linear matrix inequalities. The two
//! routes must agree in status; their margins differ in scale.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{
    additive_compound, max_eigenvalue, singular_values, skew_double, skew_spectrum,
    special_svd, sym_eigen, GeneralMatrix, SkewMatrix, SymmetricMatrix,
};
use crate::majorization::{halfcube_contains, majorization_slacks, weak_abs_slacks};
use crate::verdict::{Certificate, MembershipVerdict};

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// Minimum of `slacks` with the partial-sum index that attains it
/// (`0.0` and no certificate for an empty list).
fn worst(slacks: &[f64]) -> (f64, Option<Certificate>) {
    match slacks
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
    {
        Some((i, &s)) => (
            s,
            Some(Certificate::Inequality {
                description: format!("partial sum k={}", i + 1),
                slack: s,
            }),
        ),
        None => (0.0, None),
    }
}

/// Worst block `c_k - λ_max(L_k(S))` over the given `(k, c_k)` pairs.
fn compound_margin(s: &DMatrix<f64>, blocks: impl Iterator<Item = (usize, f64)>) -> Result<(f64, Option<Certificate>)> {
    let mut out = (f64::INFINITY, None);
    for (k, c) in blocks {
        let m = c - max_eigenvalue(&additive_compound(s, k)?);
        if m < out.0 {
            out = (
                m,
                Some(Certificate::Inequality {
                    description: format!("compound block k={k}"),
                    slack: m,
                }),
            );
        }
    }
    if out.0 == f64::INFINITY {
        out.0 = 0.0;
    }
    Ok(out)
}

fn prefix_sums(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Is `A` in the Schur–Horn orbitope `conv{gMgᵀ}`? Trace equality plus
/// majorization of spectra.
pub fn sh_sym_membership(m: &SymmetricMatrix, a: &SymmetricMatrix, tol: f64) -> Result<MembershipVerdict> {
    same_dim(m.dim(), a.dim())?;
    let (slacks, residual) = majorization_slacks(&sym_eigen(m)?.values, &sym_eigen(a)?.values)?;
    let (margin, cert) = worst(&slacks);
    Ok(MembershipVerdict::with_equality(residual, margin, tol, "trace", cert))
}

/// Compound-LMI route: `Σ_{i≤k} λᵢ(M)·Id - L_k(A) ⪰ 0` for `k < n`.
pub fn sh_sym_membership_lmi(m: &SymmetricMatrix, a: &SymmetricMatrix, tol: f64) -> Result<MembershipVerdict> {
    same_dim(m.dim(), a.dim())?;
    let n = m.dim();
    let bounds = prefix_sums(&sym_eigen(m)?.values);
    let residual = a.trace() - m.trace();
    let (margin, cert) = compound_margin(a.as_matrix(), (1..n).map(|k| (k, bounds[k - 1])))?;
    Ok(MembershipVerdict::with_equality(residual, margin, tol, "trace", cert))
}

/// `max_{g} Tr(gMgᵀ B)` and a maximizer on the orbit.
pub fn sh_sym_support(m: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<(f64, SymmetricMatrix)> {
    same_dim(m.dim(), b.dim())?;
    let lm = sym_eigen(m)?.values;
    let eb = sym_eigen(b)?;
    let value = lm.iter().zip(&eb.values).map(|(x, y)| x * y).sum();
    let q = eb.vectors.expect("eigenvectors requested");
    let argmax = SymmetricMatrix::from_diagonal(&lm).conjugate(&q);
    Ok((value, argmax))
}

/// Skew Schur–Horn orbitope: weak majorization of skew spectra.
pub fn sh_skew_membership(n: &SkewMatrix, a: &SkewMatrix, tol: f64) -> Result<MembershipVerdict> {
    same_dim(n.dim(), a.dim())?;
    let slacks = weak_abs_slacks(&skew_spectrum(n), &skew_spectrum(a))?;
    let (margin, cert) = worst(&slacks);
    Ok(MembershipVerdict::new(margin, tol, cert))
}

/// Compound-LMI route: `2(λ̃₁+…+λ̃ⱼ)(N)·Id - L_{2j}(Â) ⪰ 0` for `j ≤ ⌊n/2⌋`.
pub fn sh_skew_membership_lmi(n: &SkewMatrix, a: &SkewMatrix, tol: f64) -> Result<MembershipVerdict> {
    same_dim(n.dim(), a.dim())?;
    let bounds = prefix_sums(&skew_spectrum(n));
    let hat = skew_double(a);
    let (margin, cert) = compound_margin(
        hat.as_matrix(),
        (1..=bounds.len()).map(|j| (2 * j, 2.0 * bounds[j - 1])),
    )?;
    Ok(MembershipVerdict::new(margin, tol, cert))
}

/// Fan orbitope `conv{gAhᵀ : g, h ∈ O(n)}`: weak majorization of singular
/// values.
pub fn fan_membership(a: &GeneralMatrix, x: &GeneralMatrix, tol: f64) -> Result<MembershipVerdict> {
    same_dim(a.dim(), x.dim())?;
    let slacks = weak_abs_slacks(
        &singular_values(a.as_matrix()),
        &singular_values(x.as_matrix()),
    )?;
    let (margin, cert) = worst(&slacks);
    Ok(MembershipVerdict::new(margin, tol, cert))
}

/// `[[0, X], [Xᵀ, 0]]`, whose eigenvalues are `±σᵢ(X)`.
pub fn singular_embed(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let m = x.ncols();
    let mut s = DMatrix::zeros(n + m, n + m);
    s.view_mut((0, n), (n, m)).copy_from(x);
    s.view_mut((n, 0), (m, n)).copy_from(&x.transpose());
    s
}

/// Compound-LMI route: `(σ₁+…+σ_k)(A)·Id - L_k(S(X)) ⪰ 0` for `k ≤ n`.
pub fn fan_membership_lmi(a: &GeneralMatrix, x: &GeneralMatrix, tol: f64) -> Result<MembershipVerdict> {
    same_dim(a.dim(), x.dim())?;
    let bounds = prefix_sums(&singular_values(a.as_matrix()));
    let s = singular_embed(x.as_matrix());
    let (margin, cert) = compound_margin(&s, (1..=bounds.len()).map(|k| (k, bounds[k - 1])))?;
    Ok(MembershipVerdict::new(margin, tol, cert))
}

/// Sum of the `p` largest singular values.
pub fn ky_fan_norm(x: &GeneralMatrix, p: usize) -> Result<f64> {
    let n = x.dim();
    if p < 1 || p > n {
        return Err(Error::OutOfRange {
            what: "Ky Fan index",
            value: p as i64,
        });
    }
    Ok(singular_values(x.as_matrix())[..p].iter().sum())
}

pub fn operator_norm(x: &GeneralMatrix) -> f64 {
    singular_values(x.as_matrix()).first().copied().unwrap_or(0.0)
}

pub fn nuclear_norm(x: &GeneralMatrix) -> f64 {
    singular_values(x.as_matrix()).iter().sum()
}

fn require_dim(x: &GeneralMatrix, n: usize) -> Result<()> {
    same_dim(n, x.dim())
}

/// The 4×4 matrix whose positive semidefiniteness cuts out conv(SO(3)).
/// It equals `4U` for the trace-one matrix `U` mapped to `X` by the
/// Cayley parametrization.
pub fn so3_lmi_matrix(x: &GeneralMatrix) -> Result<SymmetricMatrix> {
    require_dim(x, 3)?;
    let m = x.as_matrix();
    let e = |i: usize, j: usize| m[(i - 1, j - 1)];
    let (d1, d2, d3) = (e(1, 1), e(2, 2), e(3, 3));
    let a = e(3, 2) - e(2, 3);
    let b = e(1, 3) - e(3, 1);
    let c = e(2, 1) - e(1, 2);
    let p = e(2, 1) + e(1, 2);
    let q = e(1, 3) + e(3, 1);
    let r = e(3, 2) + e(2, 3);
    #[rustfmt::skip]
    let data = [
        1.0 + d1 + d2 + d3, a, b, c,
        a, 1.0 + d1 - d2 - d3, p, q,
        b, p, 1.0 - d1 + d2 - d3, r,
        c, q, r, 1.0 - d1 - d2 + d3,
    ];
    SymmetricMatrix::new(DMatrix::from_row_slice(4, 4, &data))
}

/// conv(SO(3)) membership; margin is the smallest eigenvalue of
/// [`so3_lmi_matrix`].
pub fn so3_membership(x: &GeneralMatrix, tol: f64) -> Result<MembershipVerdict> {
    let s = so3_lmi_matrix(x)?;
    let spec = sym_eigen(&s)?;
    let margin = *spec.values.last().unwrap();
    let v = spec.vectors.unwrap().column(3).iter().copied().collect();
    Ok(MembershipVerdict::new(
        margin,
        tol,
        Some(Certificate::Eigenvector { vector: v }),
    ))
}

/// Cayley parametrization: the image of `U = qqᵀ/|q|²` under the linear
/// map onto 3×3 matrices, realizing the double cover `S³ → SO(3)`.
pub fn cayley_rotation(q: [f64; 4]) -> Result<GeneralMatrix> {
    let n2: f64 = q.iter().map(|v| v * v).sum();
    if !n2.is_finite() {
        return Err(Error::NonFinite);
    }
    if n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let u = |i: usize, j: usize| q[i - 1] * q[j - 1] / n2;
    #[rustfmt::skip]
    let data = [
        u(1, 1) + u(2, 2) - u(3, 3) - u(4, 4), 2.0 * u(2, 3) - 2.0 * u(1, 4), 2.0 * u(1, 3) + 2.0 * u(2, 4),
        2.0 * u(2, 3) + 2.0 * u(1, 4), u(1, 1) - u(2, 2) + u(3, 3) - u(4, 4), 2.0 * u(3, 4) - 2.0 * u(1, 2),
        2.0 * u(2, 4) - 2.0 * u(1, 3), 2.0 * u(1, 2) + 2.0 * u(3, 4), u(1, 1) - u(2, 2) - u(3, 3) + u(4, 4),
    ];
    GeneralMatrix::from_row_slice(3, &data)
}

/// conv(SO(n)) membership through the special singular values.
///
/// The body is invariant under left and right multiplication by SO(n), so
/// membership depends only on `σ̃(X)`, and its diagonal matrices form the
/// halfcube (whose vertices, the even sign patterns, lie in SO(n)). For
/// n = 3 this agrees with [`so3_membership`].
pub fn son_membership(x: &GeneralMatrix, tol: f64) -> Result<MembershipVerdict> {
    if x.dim() < 2 {
        return Err(Error::OutOfRange {
            what: "SO(n) dimension",
            value: x.dim() as i64,
        });
    }
    let s = special_svd(x);
    let v = halfcube_contains(&s.sigma, tol)?;
    Ok(MembershipVerdict::new(
        v.worst_slack,
        tol,
        Some(Certificate::Inequality {
            description: "halfcube of special singular values".into(),
            slack: v.worst_slack,
        }),
    ))
}

/// conv(O(n)) is the operator-norm unit ball.
pub fn on_membership(x: &GeneralMatrix, tol: f64) -> MembershipVerdict {
    MembershipVerdict::new(1.0 - operator_norm(x), tol, None)
}

/// Nuclear-norm unit ball, the Fan orbitope of `e₁e₁ᵀ`.
pub fn nuclear_ball_membership(x: &GeneralMatrix, tol: f64) -> MembershipVerdict {
    MembershipVerdict::new(1.0 - nuclear_norm(x), tol, None)
}
