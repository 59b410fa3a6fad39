//! Dense real linear algebra shared by every oracle in the crate.
//!
//! Matrices are stored in [`nalgebra::DMatrix`] wrapped in newtypes that
//! carry the symmetry class. Eigenvalues and singular values are always
//! returned in nonincreasing order.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Wire form shared by all square matrix types: `{"n": .., "data": [row-major]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub data: Vec<f64>,
}

impl MatrixJson {
    fn into_dmatrix(self) -> Result<DMatrix<f64>> {
        if self.data.len() != self.n * self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n * self.n,
                found: self.data.len(),
            });
        }
        Ok(DMatrix::from_row_slice(self.n, self.n, &self.data))
    }

    fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(m[(i, j)]);
            }
        }
        MatrixJson { n, data }
    }
}

macro_rules! matrix_newtype_common {
    ($name:ident) => {
        impl $name {
            pub fn dim(&self) -> usize {
                self.0.nrows()
            }

            pub fn as_matrix(&self) -> &DMatrix<f64> {
                &self.0
            }

            pub fn into_inner(self) -> DMatrix<f64> {
                self.0
            }

            /// Row-major copy of the entries.
            pub fn to_row_major(&self) -> Vec<f64> {
                MatrixJson::from_dmatrix(&self.0).data
            }
        }

        impl TryFrom<MatrixJson> for $name {
            type Error = Error;
            fn try_from(value: MatrixJson) -> Result<Self> {
                $name::new(value.into_dmatrix()?)
            }
        }

        impl From<$name> for MatrixJson {
            fn from(value: $name) -> Self {
                MatrixJson::from_dmatrix(&value.0)
            }
        }
    };
}

/// Real symmetric matrix; symmetry is exact in the stored entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m)?;
        let n = m.nrows();
        for i in 0..n {
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(SymmetricMatrix(m))
    }

    /// `(M + Mᵀ) / 2`, which is exactly symmetric in floating point.
    pub fn symmetrize(m: &DMatrix<f64>) -> Result<Self> {
        check_square(m)?;
        let n = m.nrows();
        // addition commutes exactly, so both triangles agree bit for bit
        let out = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        check_finite(&out)?;
        Ok(SymmetricMatrix(out))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymmetricMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix(DMatrix::zeros(n, n))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `g · self · gᵀ`, symmetrized.
    pub fn conjugate(&self, g: &DMatrix<f64>) -> Self {
        let m = g * &self.0 * g.transpose();
        SymmetricMatrix::symmetrize(&m).expect("conjugate of a finite matrix")
    }
}

matrix_newtype_common!(SymmetricMatrix);

/// Real skew-symmetric matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct SkewMatrix(DMatrix<f64>);

impl SkewMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m)?;
        let n = m.nrows();
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(Error::NotSkew);
            }
            for j in 0..i {
                if m[(i, j)] != -m[(j, i)] {
                    return Err(Error::NotSkew);
                }
            }
        }
        Ok(SkewMatrix(m))
    }

    /// `(M - Mᵀ) / 2`.
    pub fn skew_part(m: &DMatrix<f64>) -> Result<Self> {
        check_square(m)?;
        let n = m.nrows();
        let out = DMatrix::from_fn(n, n, |i, j| {
            if i < j {
                0.5 * (m[(i, j)] - m[(j, i)])
            } else if i > j {
                -0.5 * (m[(j, i)] - m[(i, j)])
            } else {
                0.0
            }
        });
        check_finite(&out)?;
        Ok(SkewMatrix(out))
    }

    /// Builds the skew matrix whose strict upper triangle, read row by row
    /// (lexicographic pairs `i < j`), is `upper`.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: upper.len(),
            });
        }
        let mut m = DMatrix::zeros(n, n);
        let mut idx = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                m[(i, j)] = upper[idx];
                m[(j, i)] = -upper[idx];
                idx += 1;
            }
        }
        SkewMatrix::new(m)
    }

    /// Strict upper triangle in lexicographic pair order.
    pub fn upper(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn zeros(n: usize) -> Self {
        SkewMatrix(DMatrix::zeros(n, n))
    }

    pub fn conjugate(&self, g: &DMatrix<f64>) -> Self {
        let m = g * &self.0 * g.transpose();
        SkewMatrix::skew_part(&m).expect("conjugate of a finite matrix")
    }

    pub fn scale(&self, t: f64) -> Self {
        SkewMatrix(&self.0 * t)
    }
}

matrix_newtype_common!(SkewMatrix);

/// Real square matrix with no symmetry constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct GeneralMatrix(DMatrix<f64>);

impl GeneralMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m)?;
        Ok(GeneralMatrix(m))
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        MatrixJson {
            n,
            data: data.to_vec(),
        }
        .try_into()
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        GeneralMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(n: usize) -> Self {
        GeneralMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        GeneralMatrix(DMatrix::zeros(n, n))
    }

    pub fn determinant(&self) -> f64 {
        self.0.clone().determinant()
    }
}

matrix_newtype_common!(GeneralMatrix);

/// Hermitian matrix `F + iG` stored as its real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    pub re: SymmetricMatrix,
    pub im: SkewMatrix,
}

impl HermitianMatrix {
    pub fn new(re: SymmetricMatrix, im: SkewMatrix) -> Result<Self> {
        if re.dim() != im.dim() {
            return Err(Error::DimensionMismatch {
                expected: re.dim(),
                found: im.dim(),
            });
        }
        Ok(HermitianMatrix { re, im })
    }

    pub fn dim(&self) -> usize {
        self.re.dim()
    }
}

/// Eigenvalues in nonincreasing order, optionally with an orthonormal
/// eigenbasis stored column by column in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<DMatrix<f64>>,
}

/// Descending permutation of `values`; ties keep their original order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

/// Eigendecomposition of a symmetric matrix.
pub fn sym_eigen(a: &SymmetricMatrix) -> Result<Spectrum> {
    check_finite(&a.0)?;
    let n = a.dim();
    if n == 0 {
        return Ok(Spectrum {
            values: vec![],
            vectors: Some(DMatrix::zeros(0, 0)),
        });
    }
    let eig = a.0.clone().symmetric_eigen();
    let order = descending_order(eig.eigenvalues.as_slice());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Spectrum {
        values,
        vectors: Some(vectors),
    })
}

/// Eigenvalues only, descending. The input is assumed symmetric; only its
/// lower triangle is read.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return vec![];
    }
    let ev = m.clone().symmetric_eigenvalues();
    let mut v: Vec<f64> = ev.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Smallest eigenvalue of a symmetric matrix (`+inf` for the empty matrix).
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(m)
        .last()
        .copied()
        .unwrap_or(f64::INFINITY)
}

/// Largest eigenvalue of a symmetric matrix (`-inf` for the empty matrix).
pub fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(m)
        .first()
        .copied()
        .unwrap_or(f64::NEG_INFINITY)
}

/// The doubled symmetric matrix `[[0, N], [-N, 0]]` of a skew matrix.
pub fn skew_double(n: &SkewMatrix) -> SymmetricMatrix {
    let k = n.dim();
    let mut out = DMatrix::zeros(2 * k, 2 * k);
    out.view_mut((0, k), (k, k)).copy_from(&n.0);
    out.view_mut((k, 0), (k, k)).copy_from(&(-&n.0));
    SymmetricMatrix(out)
}

/// Magnitudes `λ̃₁ ≥ … ≥ λ̃ₖ ≥ 0` (k = ⌊n/2⌋) of the purely imaginary
/// eigenvalue pairs `±iλ̃` of a skew matrix.
///
/// The doubled matrix has eigenvalues `±λ̃ᵢ`, each twice; the top `2k`
/// of them come in equal pairs and every other one is kept.
pub fn skew_spectrum(n: &SkewMatrix) -> Vec<f64> {
    let k = n.dim() / 2;
    let ev = symmetric_eigenvalues(&skew_double(n).0);
    (0..k)
        .map(|i| {
            let pair = 0.5 * (ev[2 * i] + ev[2 * i + 1]);
            pair.max(0.0)
        })
        .collect()
}

/// `A = U · diag(σ) · Vᵀ`, σ nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.sigma));
        &self.u * d * self.v.transpose()
    }
}

/// Singular value decomposition with σ sorted in nonincreasing order.
pub fn svd(a: &GeneralMatrix) -> Svd {
    svd_rect(&a.0)
}

/// SVD of a rectangular matrix; `u` is `rows×r`, `v` is `cols×r` with
/// `r = min(rows, cols)`.
pub fn svd_rect(a: &DMatrix<f64>) -> Svd {
    let r = a.nrows().min(a.ncols());
    if r == 0 {
        return Svd {
            u: DMatrix::zeros(a.nrows(), 0),
            sigma: vec![],
            v: DMatrix::zeros(a.ncols(), 0),
        };
    }
    let s = a.clone().svd(true, true);
    let u = s.u.expect("requested U");
    let v_t = s.v_t.expect("requested Vᵀ");
    let order = descending_order(s.singular_values.as_slice());
    let sigma = order.iter().map(|&i| s.singular_values[i]).collect();
    let u = DMatrix::from_fn(a.nrows(), r, |i, c| u[(i, order[c])]);
    let v = DMatrix::from_fn(a.ncols(), r, |i, c| v_t[(order[c], i)]);
    Svd { u, sigma, v }
}

/// Singular values only, descending.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows().min(a.ncols()) == 0 {
        return vec![];
    }
    let mut v: Vec<f64> = a.singular_values().iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// SVD restricted to rotations: `A = U · diag(σ̃) · Vᵀ` with `U, V ∈ SO(n)`.
///
/// `σ̃₁ ≥ … ≥ σ̃ₙ₋₁ ≥ |σ̃ₙ|` and `∏ σ̃ᵢ = det(A)`.
pub fn special_svd(a: &GeneralMatrix) -> Svd {
    let mut s = svd(a);
    let n = a.dim();
    if n == 0 {
        return s;
    }
    let du = s.u.clone().determinant();
    let dv = s.v.clone().determinant();
    if du * dv < 0.0 {
        s.sigma[n - 1] = -s.sigma[n - 1];
        for i in 0..n {
            s.u[(i, n - 1)] = -s.u[(i, n - 1)];
        }
    }
    if s.u.clone().determinant() < 0.0 {
        // both determinants are -1 here; flipping the last column of each
        // leaves U·diag(σ̃)·Vᵀ unchanged
        for i in 0..n {
            s.u[(i, n - 1)] = -s.u[(i, n - 1)];
            s.v[(i, n - 1)] = -s.v[(i, n - 1)];
        }
    }
    s
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in (i + 1)..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// k-th additive compound of a square matrix: the matrix of the induced
/// derivation on the k-th exterior power, in the lexicographic basis of
/// k-subsets.
pub fn additive_compound(b: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    check_square(b)?;
    let n = b.nrows();
    if k == 0 || k > n {
        return Err(Error::OutOfRange {
            what: "compound order",
            value: k as i64,
        });
    }
    let subsets = k_subsets(n, k);
    let index: HashMap<&[usize], usize> = subsets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let size = subsets.len();
    let mut out = DMatrix::zeros(size, size);
    let mut member = vec![false; n];
    let mut scratch = Vec::with_capacity(k);
    for (col, t) in subsets.iter().enumerate() {
        for &x in t {
            member[x] = true;
        }
        for &tj in t {
            out[(col, col)] += b[(tj, tj)];
            for i in 0..n {
                if member[i] {
                    continue;
                }
                let coef = b[(i, tj)];
                if coef == 0.0 {
                    continue;
                }
                // e_tj is replaced by e_i; sorting costs one sign per element
                // strictly between i and tj
                let (lo, hi) = if i < tj { (i, tj) } else { (tj, i) };
                let between = t.iter().filter(|&&x| x > lo && x < hi).count();
                let sign = if between % 2 == 0 { 1.0 } else { -1.0 };
                scratch.clear();
                scratch.extend(t.iter().map(|&x| if x == tj { i } else { x }));
                scratch.sort_unstable();
                let row = index[scratch.as_slice()];
                out[(row, col)] += sign * coef;
            }
        }
        for &x in t {
            member[x] = false;
        }
    }
    Ok(out)
}

/// Tensor (Kronecker) sum `A ⊗ Id_p + Id_m ⊗ B`.
pub fn tensor_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(a)?;
    check_square(b)?;
    let m = a.nrows();
    let p = b.nrows();
    Ok(a.kronecker(&DMatrix::identity(p, p)) + DMatrix::<f64>::identity(m, m).kronecker(b))
}

/// Real symmetric form `[[F, -G], [G, F]]` of `H = F + iG`.
pub fn hermitian_embed(h: &HermitianMatrix) -> SymmetricMatrix {
    let n = h.dim();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(&h.re.0);
    out.view_mut((n, n), (n, n)).copy_from(&h.re.0);
    out.view_mut((0, n), (n, n)).copy_from(&(-&h.im.0));
    out.view_mut((n, 0), (n, n)).copy_from(&h.im.0);
    SymmetricMatrix::symmetrize(&out).expect("embedding of a finite matrix")
}

/// Haar-distributed element of SO(n) drawn from `rng`.
pub fn haar_rotation_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = haar_orthogonal_with(rng, n);
    fix_orientation(g)
}

/// Haar-distributed element of O(n) drawn from `rng`.
pub fn haar_orthogonal_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let gauss = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = gauss.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

fn fix_orientation(mut q: DMatrix<f64>) -> DMatrix<f64> {
    if q.nrows() > 0 && q.clone().determinant() < 0.0 {
        for i in 0..q.nrows() {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Deterministic Haar rotation in SO(n) for a given seed.
pub fn haar_rotation(n: usize, seed: u64) -> GeneralMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GeneralMatrix(haar_rotation_with(&mut rng, n))
}

/// Frobenius norm of `gᵀg - Id`.
pub fn orthogonality_residual(g: &DMatrix<f64>) -> f64 {
    let n = g.ncols();
    (g.transpose() * g - DMatrix::<f64>::identity(n, n)).norm()
}
