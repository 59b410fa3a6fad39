//! Sylvester's 15×15 matrix for the resultant of the partial derivatives
//! of a ternary quartic, and the degree-27 discriminant it computes.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};

use crate::error::{Error, Result};
use crate::moment::{exponent_key, quartic_index, TernaryQuartic, QUARTIC_EXPONENTS};
use crate::poly::SparsePolynomial;

/// Column labels of the matrix, in order.
pub const COLUMNS: [&str; 15] = [
    "x*q_x", "y*q_x", "z*q_x", "x*q_y", "y*q_y", "z*q_y", "x*q_z", "y*q_z", "z*q_z", "D002", "D020", "D200",
    "D110", "D101", "D011",
];

const D_EXPONENTS: [[u16; 3]; 6] = [[0, 0, 2], [0, 2, 0], [2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 1, 1]];

/// Entries are polynomials in the coefficient variables `c400, …, c004`;
/// rows follow the degree-4 monomials in [`QUARTIC_EXPONENTS`] order.
#[derive(Debug, Clone)]
pub struct SylvesterMatrix {
    pub entries: Vec<Vec<SparsePolynomial>>,
}

pub fn coefficient_variables() -> Vec<String> {
    QUARTIC_EXPONENTS.iter().map(|e| exponent_key('c', *e)).collect()
}

fn all_variables() -> Vec<String> {
    let mut v = coefficient_variables();
    v.extend(["x", "y", "z"].map(String::from));
    v
}

/// Splits the monomials of `q_t` (a cubic form) by the first of
/// `x^{α₁+1}`, `y^{α₂+1}`, `z^{α₃+1}` dividing them, and returns the
/// three quotients.
fn decompose(qt: &SparsePolynomial, alpha: [u16; 3]) -> [SparsePolynomial; 3] {
    let vars = qt.variables().to_vec();
    let nc = vars.len() - 3;
    let mut parts: [Vec<(Vec<u16>, BigInt)>; 3] = Default::default();
    for (e, c) in qt.terms() {
        let slot = (0..3)
            .find(|&t| e[nc + t] > alpha[t])
            .expect("every cubic monomial has some exponent above alpha");
        let mut q = e.to_vec();
        q[nc + slot] -= alpha[slot] + 1;
        parts[slot].push((q, c.clone()));
    }
    parts.map(|terms| SparsePolynomial::from_terms(&vars, terms).expect("matching lengths"))
}

fn det3(m: &[[SparsePolynomial; 3]; 3]) -> Result<SparsePolynomial> {
    let minor = |a: usize, b: usize, c: usize, d: usize| -> Result<SparsePolynomial> {
        m[1][a].mul(&m[2][b])?.sub(&m[1][c].mul(&m[2][d])?)
    };
    m[0][0]
        .mul(&minor(1, 2, 2, 1)?)?
        .sub(&m[0][1].mul(&minor(0, 2, 2, 0)?)?)?
        .add(&m[0][2].mul(&minor(0, 1, 1, 0)?)?)
}

fn build() -> Result<SylvesterMatrix> {
    let vars = all_variables();
    let nc = 15;
    let q = SparsePolynomial::from_terms(
        &vars,
        QUARTIC_EXPONENTS.iter().enumerate().map(|(i, e)| {
            let mut x = vec![0u16; nc + 3];
            x[i] = 1;
            x[nc] = e[0] as u16;
            x[nc + 1] = e[1] as u16;
            x[nc + 2] = e[2] as u16;
            (x, BigInt::one())
        }),
    )?;
    let xyz: Vec<SparsePolynomial> = ["x", "y", "z"]
        .iter()
        .map(|v| SparsePolynomial::var(&vars, v))
        .collect::<Result<_>>()?;
    let partials: Vec<SparsePolynomial> = ["x", "y", "z"]
        .iter()
        .map(|v| q.derivative(v))
        .collect::<Result<_>>()?;

    let mut columns = Vec::with_capacity(15);
    for qt in &partials {
        for v in &xyz {
            columns.push(v.mul(qt)?);
        }
    }
    for alpha in D_EXPONENTS {
        let rows = [0, 1, 2].map(|t| decompose(&partials[t], alpha));
        columns.push(det3(&rows)?);
    }

    let cvars = coefficient_variables();
    let mut entries = vec![vec![SparsePolynomial::zero(&cvars); 15]; 15];
    for (j, col) in columns.iter().enumerate() {
        let mut buckets: Vec<Vec<(Vec<u16>, BigInt)>> = vec![Vec::new(); 15];
        for (e, c) in col.terms() {
            let mono = [e[nc] as u8, e[nc + 1] as u8, e[nc + 2] as u8];
            let row = quartic_index(mono)
                .ok_or_else(|| Error::Degenerate(format!("column {} is not a quartic", COLUMNS[j])))?;
            buckets[row].push((e[..nc].to_vec(), c.clone()));
        }
        for (row, terms) in buckets.into_iter().enumerate() {
            entries[row][j] = SparsePolynomial::from_terms(&cvars, terms)?;
        }
    }
    Ok(SylvesterMatrix { entries })
}

/// The symbolic matrix, built once.
pub fn sylvester_symbolic() -> &'static SylvesterMatrix {
    static CELL: OnceLock<SylvesterMatrix> = OnceLock::new();
    CELL.get_or_init(|| build().expect("construction is total"))
}

/// Exact rational coefficients of a quartic (every finite double is a
/// dyadic rational).
pub fn exact_coefficients(q: &TernaryQuartic) -> Result<[BigRational; 15]> {
    let mut out: [BigRational; 15] = std::array::from_fn(|_| BigRational::zero());
    for (o, v) in out.iter_mut().zip(q.0) {
        *o = BigRational::from_f64(v).ok_or(Error::NonFinite)?;
    }
    Ok(out)
}

pub fn sylvester_matrix_exact(c: &[BigRational; 15]) -> Result<Vec<Vec<BigRational>>> {
    sylvester_symbolic()
        .entries
        .iter()
        .map(|row| row.iter().map(|p| p.eval_exact(c)).collect())
        .collect()
}

pub fn sylvester_matrix(q: &TernaryQuartic) -> Result<DMatrix<f64>> {
    if q.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let s = sylvester_symbolic();
    let mut m = DMatrix::zeros(15, 15);
    for i in 0..15 {
        for j in 0..15 {
            m[(i, j)] = s.entries[i][j].eval(&q.0)?;
        }
    }
    Ok(m)
}

/// Exact determinant by Gaussian elimination over ℚ.
pub fn determinant_exact(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pivot;
            for c in col..n {
                let delta = &f * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

/// The discriminant up to a fixed nonzero scalar: the determinant of the
/// Sylvester matrix, computed exactly.
pub fn discriminant_exact(c: &[BigRational; 15]) -> Result<BigRational> {
    Ok(determinant_exact(sylvester_matrix_exact(c)?))
}

pub fn discriminant(q: &TernaryQuartic) -> Result<BigRational> {
    discriminant_exact(&exact_coefficients(q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn int_quartic(c: [i64; 15]) -> [BigRational; 15] {
        c.map(|v| BigRational::from_integer(v.into()))
    }

    fn fermat() -> [i64; 15] {
        let mut c = [0; 15];
        for e in [[4, 0, 0], [0, 4, 0], [0, 0, 4]] {
            c[quartic_index(e).unwrap()] = 1;
        }
        c
    }

    #[test]
    fn displayed_columns() {
        let s = sylvester_symbolic();
        let v = coefficient_variables();
        // D002 contains 4·c400·c040·4·c004 x²y² from the diagonal product
        let d002 = &s.entries[quartic_index([2, 2, 0]).unwrap()][9];
        let mut e = vec![0u16; 15];
        for k in ["c400", "c040", "c004"] {
            e[v.iter().position(|x| x == k).unwrap()] = 1;
        }
        assert_eq!(d002.coefficient(&e), BigInt::from(64));
        // x·q_x has coefficient 4·c400 at x⁴
        let xqx = &s.entries[0][0];
        assert_eq!(xqx.to_string(), "4*c400");
        for row in &s.entries {
            for (j, p) in row.iter().enumerate() {
                let want = if j < 9 { 1 } else { 3 };
                assert!(p.is_zero() || p.degree() == Some(want));
            }
        }
    }

    #[test]
    fn fermat_is_smooth() {
        assert!(!discriminant_exact(&int_quartic(fermat())).unwrap().is_zero());
    }

    #[test]
    fn singular_at_a_vertex() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..3 {
            let mut c: [i64; 15] = std::array::from_fn(|_| rng.random_range(-5..=5));
            for e in [[0, 0, 4], [1, 0, 3], [0, 1, 3]] {
                c[quartic_index(e).unwrap()] = 0;
            }
            assert!(discriminant_exact(&int_quartic(c)).unwrap().is_zero());
        }
    }

    #[test]
    fn degree_27() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let c: [i64; 15] = std::array::from_fn(|_| rng.random_range(-5..=5));
        let d1 = discriminant_exact(&int_quartic(c)).unwrap();
        let d2 = discriminant_exact(&int_quartic(c.map(|v| 2 * v))).unwrap();
        assert!(!d1.is_zero());
        assert_eq!(d2, d1 * BigRational::from_integer(BigInt::from(2).pow(27)));
    }

    #[test]
    fn float_matrix_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let c: [i64; 15] = std::array::from_fn(|_| rng.random_range(-3..=3));
        let q = TernaryQuartic(c.map(|v| v as f64));
        let m = sylvester_matrix(&q).unwrap();
        let exact = sylvester_matrix_exact(&int_quartic(c)).unwrap();
        for i in 0..15 {
            for j in 0..15 {
                assert_eq!(BigRational::from_f64(m[(i, j)]).unwrap(), exact[i][j]);
            }
        }
        assert_eq!(discriminant(&q).unwrap(), discriminant_exact(&int_quartic(c)).unwrap());
    }
}
