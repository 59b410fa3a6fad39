//! Algebraic boundaries: Schur–Horn boundary products and the symbolic
//! boundary polynomial of G(2,n).

use nalgebra::DMatrix;
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::grassmann::PluckerVector;
use crate::linalg::{additive_compound, binomial, k_subsets, sym_eigen, tensor_sum, SymmetricMatrix};
use crate::poly::SparsePolynomial;

const TRACE_TOL: f64 = 1e-8;

fn check_trace(m: &SymmetricMatrix, a: &SymmetricMatrix) -> Result<()> {
    if m.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: a.dim(),
        });
    }
    let residual = a.trace() - m.trace();
    if residual.abs() > TRACE_TOL {
        return Err(Error::TraceMismatch { residual });
    }
    Ok(())
}

/// `f(A) = ∏_{k<n} det(L_k(A) - (λ₁+…+λ_k)·Id)` with λ the eigenvalues
/// of M in decreasing order. Vanishes on the boundary of the Schur–Horn
/// orbitope.
pub fn sh_boundary_f(m: &SymmetricMatrix, a: &SymmetricMatrix) -> Result<f64> {
    check_trace(m, a)?;
    let n = m.dim();
    let lambda = sym_eigen(m)?.values;
    let mut prod = 1.0;
    let mut shift = 0.0;
    for k in 1..n {
        shift += lambda[k - 1];
        let lk = additive_compound(a.as_matrix(), k)?;
        let size = binomial(n, k);
        prod *= (lk - DMatrix::identity(size, size) * shift).determinant();
    }
    Ok(prod)
}

/// `g(A) = ∏_{k ≤ ⌈n/2⌉} det(L_k(A) ⊕ L_k(-M))`, free of the eigenvalues
/// of M.
pub fn sh_boundary_g(m: &SymmetricMatrix, a: &SymmetricMatrix) -> Result<f64> {
    check_trace(m, a)?;
    let n = m.dim();
    let neg_m = -m.as_matrix();
    let mut prod = 1.0;
    for k in 1..=n.div_ceil(2) {
        let s = tensor_sum(&additive_compound(a.as_matrix(), k)?, &additive_compound(&neg_m, k)?)?;
        prod *= s.determinant();
    }
    Ok(prod)
}

/// Variable names `p12, p13, …` (1-based, lexicographic).
pub fn plucker_variables(n: usize) -> Vec<String> {
    k_subsets(n, 2)
        .iter()
        .map(|s| format!("p{}{}", s[0] + 1, s[1] + 1))
        .collect()
}

/// Symbolic Pfaffian of the skew submatrix on `rows` (sorted, even length).
fn pfaffian(vars: &[String], rows: &[usize]) -> SparsePolynomial {
    if rows.is_empty() {
        return SparsePolynomial::constant(vars, 1);
    }
    let mut out = SparsePolynomial::zero(vars);
    for j in 1..rows.len() {
        let name = format!("p{}{}", rows[0] + 1, rows[j] + 1);
        let entry = SparsePolynomial::var(vars, &name).expect("plucker variable");
        let rest: Vec<usize> = rows.iter().enumerate().filter(|&(i, _)| i != 0 && i != j).map(|(_, &r)| r).collect();
        let term = entry.mul(&pfaffian(vars, &rest)).expect("same variables");
        out = if j % 2 == 1 { out.add(&term) } else { out.sub(&term) }.expect("same variables");
    }
    out
}

/// Coefficients of the monic characteristic polynomial `det(x·Id - i·p)`
/// of a symbolic skew matrix: entry `j` multiplies `x^{2j + (n mod 2)}`,
/// so the last entry is 1.
///
/// The coefficient of `x^{n-2j}` is `(-1)^j` times the sum of the squared
/// Pfaffians of the principal 2j×2j submatrices.
pub fn skew_charpoly_coeffs(n: usize) -> Result<Vec<SparsePolynomial>> {
    if !(4..=8).contains(&n) {
        return Err(Error::OutOfRange {
            what: "skew charpoly size",
            value: n as i64,
        });
    }
    let vars = plucker_variables(n);
    let half = n / 2;
    let mut coeffs = vec![SparsePolynomial::zero(&vars); half + 1];
    for j in 0..=half {
        let mut s = SparsePolynomial::zero(&vars);
        for rows in k_subsets(n, 2 * j) {
            s = s.add(&pfaffian(&vars, &rows).pow(2))?;
        }
        if j % 2 == 1 {
            s = s.neg();
        }
        coeffs[half - j] = s;
    }
    Ok(coeffs)
}

/// Expands `a₄⁴ + 4a₄³ - 8a₄²a₂ + 16a₂² - 16a₄a₂ + 6a₄² + 64a₀ - 8a₂ + 4a₄ + 1`
/// in the Plücker variables, where `x⁶ + a₄x⁴ + a₂x² + a₀` is the even part
/// of the characteristic polynomial of `i·p`. It vanishes on the boundary
/// of G(2,n) for n ∈ {6, 7}.
pub fn g2n_boundary_expand(n: usize) -> Result<SparsePolynomial> {
    if n != 6 && n != 7 {
        return Err(Error::OutOfRange {
            what: "G(2,n) boundary size",
            value: n as i64,
        });
    }
    let c = skew_charpoly_coeffs(n)?;
    let (a0, a2, a4) = (&c[0], &c[1], &c[2]);
    let vars = a0.variables().to_vec();
    let k = |v: i64| BigInt::from(v);
    let a4_2 = a4.mul(a4)?;
    let terms = [
        a4_2.mul(&a4_2)?,
        a4_2.mul(a4)?.scale(&k(4)),
        a4_2.mul(a2)?.scale(&k(-8)),
        a2.mul(a2)?.scale(&k(16)),
        a4.mul(a2)?.scale(&k(-16)),
        a4_2.scale(&k(6)),
        a0.scale(&k(64)),
        a2.scale(&k(-8)),
        a4.scale(&k(4)),
        SparsePolynomial::constant(&vars, 1),
    ];
    let mut out = SparsePolynomial::zero(&vars);
    for t in &terms {
        out = out.add(t)?;
    }
    Ok(out)
}

/// Evaluates a polynomial in the Plücker variables at a bivector.
pub fn eval_plucker(poly: &SparsePolynomial, p: &PluckerVector) -> Result<f64> {
    if p.d != 2 || plucker_variables(p.n) != poly.variables() {
        return Err(Error::VariableMismatch(format!(
            "bivector in dimension {} does not match the polynomial",
            p.n
        )));
    }
    poly.eval(&p.coords)
}
