//! Grassmann orbitopes: Plücker vectors, decomposability, the G(2,n)
//! spectrahedron, principal angles, and special Lagrangian faces of G(3,6).

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    additive_compound, binomial, hermitian_embed, k_subsets, max_eigenvalue, singular_values,
    skew_spectrum, svd_rect, HermitianMatrix, SkewMatrix, SymmetricMatrix,
};
use crate::verdict::{Certificate, MembershipVerdict};

/// Coordinates of `p ∈ ∧_d ℝⁿ` on the basis `e_{i₁}∧…∧e_{i_d}`, indexed by
/// lexicographic d-subsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PluckerVector {
    pub n: usize,
    pub d: usize,
    pub coords: Vec<f64>,
}

impl PluckerVector {
    pub fn new(n: usize, d: usize, coords: Vec<f64>) -> Result<Self> {
        if d > n {
            return Err(Error::OutOfRange {
                what: "Plücker degree",
                value: d as i64,
            });
        }
        if coords.len() != binomial(n, d) {
            return Err(Error::DimensionMismatch {
                expected: binomial(n, d),
                found: coords.len(),
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PluckerVector { n, d, coords })
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        PluckerVector {
            n,
            d,
            coords: vec![0.0; binomial(n, d)],
        }
    }

    /// Basis vector `e_S` for a sorted 0-based index set.
    pub fn basis(n: usize, s: &[usize]) -> Result<Self> {
        let mut p = Self::zeros(n, s.len());
        let i = subset_index(n, s).ok_or_else(|| Error::Precondition("index set must be sorted and in range".into()))?;
        p.coords[i] = 1.0;
        Ok(p)
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Coordinate at a sorted 0-based index set.
    pub fn get(&self, s: &[usize]) -> f64 {
        subset_index(self.n, s).map_or(0.0, |i| self.coords[i])
    }

    pub fn scale(&self, t: f64) -> Self {
        PluckerVector {
            coords: self.coords.iter().map(|v| v * t).collect(),
            ..self.clone()
        }
    }

    /// For `d = 2`, the skew matrix with `p_{ij}` above the diagonal.
    pub fn to_skew(&self) -> Result<SkewMatrix> {
        require_d(self, 2)?;
        SkewMatrix::from_upper(self.n, &self.coords)
    }

    pub fn from_skew(m: &SkewMatrix) -> Self {
        PluckerVector {
            n: m.dim(),
            d: 2,
            coords: m.upper(),
        }
    }
}

/// Rank of a sorted subset among the lexicographic `|s|`-subsets of `0..n`.
pub fn subset_index(n: usize, s: &[usize]) -> Option<usize> {
    let k = s.len();
    let mut idx = 0;
    let mut prev = 0usize;
    for (pos, &x) in s.iter().enumerate() {
        if x >= n || (pos > 0 && x <= s[pos - 1]) {
            return None;
        }
        let start = if pos == 0 { 0 } else { prev + 1 };
        for skipped in start..x {
            idx += binomial(n - skipped - 1, k - pos - 1);
        }
        prev = x;
    }
    Some(idx)
}

fn require_d(p: &PluckerVector, d: usize) -> Result<()> {
    if p.d != d {
        return Err(Error::OutOfRange {
            what: "Plücker degree",
            value: p.d as i64,
        });
    }
    Ok(())
}

/// An oriented d-plane in ℝⁿ given by a d×n matrix with orthonormal rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let d = basis.nrows();
        let residual = (&basis * basis.transpose() - DMatrix::identity(d, d)).amax();
        if residual > 1e-10 {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Subspace { basis })
    }

    /// Orthonormalizes the rows of any full-rank d×n matrix (keeping the
    /// orientation of the row span).
    pub fn from_spanning_rows(m: &DMatrix<f64>) -> Result<Self> {
        let qr = m.transpose().qr();
        let (q, r) = qr.unpack();
        let mut q = q.transpose();
        for i in 0..r.nrows().min(r.ncols()) {
            if r[(i, i)].abs() < 1e-12 {
                return Err(Error::Degenerate("rows are linearly dependent".into()));
            }
            if r[(i, i)] < 0.0 {
                q.row_mut(i).neg_mut();
            }
        }
        Subspace::new(q)
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.ncols()
    }

    /// `span(e_{s₁}, …)` with rows in the given order.
    pub fn coordinate(n: usize, s: &[usize]) -> Result<Self> {
        let mut b = DMatrix::zeros(s.len(), n);
        for (r, &i) in s.iter().enumerate() {
            if i >= n {
                return Err(Error::OutOfRange {
                    what: "coordinate index",
                    value: i as i64,
                });
            }
            b[(r, i)] = 1.0;
        }
        Subspace::new(b)
    }

    /// Applies `g ∈ O(n)` to the plane.
    pub fn rotate(&self, g: &DMatrix<f64>) -> Result<Self> {
        Subspace::new(&self.basis * g.transpose())
    }
}

/// Plücker coordinates: the maximal minors of the basis matrix.
pub fn plucker_embed(l: &Subspace) -> PluckerVector {
    let (d, n) = (l.dim(), l.ambient());
    let coords = k_subsets(n, d)
        .iter()
        .map(|cols| {
            DMatrix::from_fn(d, d, |i, j| l.basis[(i, cols[j])]).determinant()
        })
        .collect();
    PluckerVector { n, d, coords }
}

/// `(ι_ξ p) ∧ p` for every basis (d-1)-vector ξ; all vanish exactly on
/// decomposable p. Returns the largest coefficient.
pub fn plucker_relation_residual(p: &PluckerVector) -> f64 {
    let (n, d) = (p.n, p.d);
    if d <= 1 || d + 1 > n {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for xi in k_subsets(n, d - 1) {
        // contraction: e_ξ ∧ e_j = ± e_{ξ∪j}; ι_ξ p has j-th entry ± p_{ξ∪j}
        let v: Vec<f64> = (0..n)
            .map(|j| {
                if xi.contains(&j) {
                    return 0.0;
                }
                let mut t = xi.clone();
                t.push(j);
                t.sort_unstable();
                let sign = if xi.iter().filter(|&&x| x > j).count() % 2 == 0 { 1.0 } else { -1.0 };
                sign * p.get(&t)
            })
            .collect();
        for s in k_subsets(n, d + 1) {
            // e_j ∧ e_{S∖j} = (-1)^{position of j in S} e_S
            let c: f64 = s
                .iter()
                .enumerate()
                .map(|(pos, &j)| {
                    let rest: Vec<usize> = s.iter().copied().filter(|&x| x != j).collect();
                    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                    sign * v[j] * p.get(&rest)
                })
                .sum();
            worst = worst.max(c.abs());
        }
    }
    worst
}

/// Largest 4×4 sub-Pfaffian `p_ab p_ce - p_ac p_be + p_ae p_bc` of a
/// bivector.
pub fn sub_pfaffian_residual(p: &PluckerVector) -> Result<f64> {
    require_d(p, 2)?;
    Ok(k_subsets(p.n, 4)
        .iter()
        .map(|s| {
            let q = |i: usize, j: usize| p.get(&[s[i], s[j]]);
            (q(0, 1) * q(2, 3) - q(0, 2) * q(1, 3) + q(0, 3) * q(1, 2)).abs()
        })
        .fold(0.0, f64::max))
}

/// Do the quadratic Plücker relations hold to `tol`? For bivectors the
/// sub-Pfaffians must vanish as well.
pub fn decomposable_check(p: &PluckerVector, tol: f64) -> bool {
    let mut ok = plucker_relation_residual(p) <= tol;
    if p.d == 2 {
        ok &= sub_pfaffian_residual(p).is_ok_and(|r| r <= tol);
    }
    ok
}

/// G(2,n) membership: the skew spectrum must lie in the crosspolytope,
/// `Σ λ̃ᵢ ≤ 1`.
pub fn g2_membership(p: &PluckerVector, tol: f64) -> Result<MembershipVerdict> {
    let spec = skew_spectrum(&p.to_skew()?);
    let margin = 1.0 - spec.iter().sum::<f64>();
    Ok(MembershipVerdict::new(
        margin,
        tol,
        Some(Certificate::Inequality {
            description: "sum of skew spectrum".into(),
            slack: margin,
        }),
    ))
}

/// LMI route: `Id - L_k(i·p) ⪰ 0` with `k = ⌊n/2⌋`. The compound is linear,
/// so `L_k(i·p) = i·L_k(p)`, which is embedded as a real symmetric matrix.
pub fn g2_membership_lmi(p: &PluckerVector, tol: f64) -> Result<MembershipVerdict> {
    let skew = p.to_skew()?;
    let k = (p.n / 2).max(1);
    let lk = additive_compound(skew.as_matrix(), k)?;
    let g = SkewMatrix::skew_part(&lk)?;
    let h = HermitianMatrix::new(SymmetricMatrix::zeros(g.dim()), g)?;
    let margin = 1.0 - max_eigenvalue(hermitian_embed(&h).as_matrix());
    Ok(MembershipVerdict::new(margin, tol, None))
}

/// `∏_{σ ∈ {±1}^k} (1 + σ·λ̃)`, which vanishes on the boundary of G(2,n).
pub fn g2_boundary_value(p: &PluckerVector) -> Result<f64> {
    let spec = skew_spectrum(&p.to_skew()?);
    let k = spec.len();
    Ok((0u32..1 << k)
        .map(|mask| {
            1.0 + spec
                .iter()
                .enumerate()
                .map(|(i, l)| if mask >> i & 1 == 1 { -l } else { *l })
                .sum::<f64>()
        })
        .product())
}

/// Coordinates `(u, v, w, x, y, z)` of a bivector in ℝ⁴ after the π/4
/// rotation in the planes `(p₁₂,p₃₄)`, `(p₁₃,p₂₄)`, `(p₁₄,p₂₃)`.
pub fn g24_rotated_coordinates(p: &PluckerVector) -> Result<[f64; 6]> {
    require_d(p, 2)?;
    if p.n != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: p.n,
        });
    }
    let q = |i: usize, j: usize| p.get(&[i - 1, j - 1]);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok([
        r * (q(1, 2) + q(3, 4)),
        r * (q(1, 3) - q(2, 4)),
        r * (q(1, 4) + q(2, 3)),
        r * (q(1, 2) - q(3, 4)),
        r * (q(1, 3) + q(2, 4)),
        r * (q(1, 4) - q(2, 3)),
    ])
}

/// Principal angles `θ₁ ≤ … ≤ θ_d` between two d-planes.
pub fn principal_angles(l: &Subspace, m: &Subspace) -> Result<Vec<f64>> {
    if l.dim() != m.dim() || l.ambient() != m.ambient() {
        return Err(Error::DimensionMismatch {
            expected: l.dim() * l.ambient(),
            found: m.dim() * m.ambient(),
        });
    }
    let s = singular_values(&(l.basis() * m.basis().transpose()));
    Ok(s.iter().map(|v| v.clamp(0.0, 1.0).acos()).collect())
}

/// Principal vectors realizing the angles: rows of the returned matrices
/// pair up as `vᵢ ∈ L`, `wᵢ ∈ L'`.
pub fn principal_vectors(l: &Subspace, m: &Subspace) -> (DMatrix<f64>, DMatrix<f64>) {
    let s = svd_rect(&(l.basis() * m.basis().transpose()));
    (s.u.transpose() * l.basis(), s.v.transpose() * m.basis())
}

/// The angle condition `θ₃ < θ₁ + θ₂` for two 3-planes in ℝ⁶, under
/// which the segment between their Plücker vectors is an exposed edge of
/// G(3,6).
pub fn g36_edge_exposed(l: &Subspace, m: &Subspace) -> Result<(bool, [f64; 3])> {
    if l.dim() != 3 || l.ambient() != 6 {
        return Err(Error::DimensionMismatch {
            expected: 18,
            found: l.dim() * l.ambient(),
        });
    }
    let t = principal_angles(l, m)?;
    let a = [t[0], t[1], t[2]];
    Ok((a[2] < a[0] + a[1] - 1e-9, a))
}

/// Indices (0-based) of the special Lagrangian equations.
const fn s3(a: usize, b: usize, c: usize) -> [usize; 3] {
    [a - 1, b - 1, c - 1]
}

/// `(coefficient, index)` lists of the two affine and six linear
/// equations cutting out the special Lagrangian face.
fn sl_equations() -> [(Vec<(f64, [usize; 3])>, f64); 8] {
    [
        (vec![(1.0, s3(1, 2, 3)), (-1.0, s3(1, 5, 6)), (1.0, s3(2, 4, 6)), (-1.0, s3(3, 4, 5))], 1.0),
        (vec![(1.0, s3(1, 2, 6)), (-1.0, s3(1, 3, 5)), (1.0, s3(2, 3, 4)), (-1.0, s3(4, 5, 6))], 0.0),
        (vec![(1.0, s3(1, 2, 5)), (1.0, s3(1, 3, 6))], 0.0),
        (vec![(1.0, s3(1, 3, 4)), (1.0, s3(2, 3, 5))], 0.0),
        (vec![(1.0, s3(1, 2, 4)), (-1.0, s3(2, 3, 6))], 0.0),
        (vec![(1.0, s3(1, 4, 6)), (1.0, s3(2, 5, 6))], 0.0),
        (vec![(1.0, s3(2, 4, 5)), (1.0, s3(3, 4, 6))], 0.0),
        (vec![(1.0, s3(1, 4, 5)), (-1.0, s3(3, 5, 6))], 0.0),
    ]
}

/// Residuals of the eight special Lagrangian face equations, and whether
/// all are within `tol`.
pub fn sl36_face_check(p: &PluckerVector, tol: f64) -> Result<(bool, [f64; 8])> {
    if p.n != 6 || p.d != 3 {
        return Err(Error::DimensionMismatch {
            expected: 20,
            found: p.coords.len(),
        });
    }
    let mut res = [0.0; 8];
    for (r, (terms, rhs)) in res.iter_mut().zip(sl_equations()) {
        *r = terms.iter().map(|(c, s)| c * p.get(s)).sum::<f64>() - rhs;
    }
    Ok((res.iter().all(|r| r.abs() <= tol), res))
}

/// The real 6×6 form `[[A, -B], [B, A]]` of `U = A + iB`.
pub fn complex_to_real(u: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = u.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = u[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    out
}

/// Haar-random element of SU(3).
pub fn random_su3<R: Rng + ?Sized>(rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(3, 3, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let (mut q, r) = z.qr().unpack();
    for j in 0..3 {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..3 {
            q[(i, j)] *= phase;
        }
    }
    let det = q.determinant();
    let fix = (det / det.norm()).conj();
    for i in 0..3 {
        q[(i, 0)] *= fix;
    }
    q
}

/// Image of `e₁∧e₂∧e₃` under the real form of `U ∈ SU(3)`.
pub fn sl_orbit_point(u: &DMatrix<Complex64>) -> Result<PluckerVector> {
    let g = complex_to_real(u);
    let b = g.columns(0, 3).transpose();
    Ok(plucker_embed(&Subspace::new(b)?))
}

/// Index sets spanning the 8-dimensional slice used for the supporting
/// polynomial, in coefficient order.
pub const SL_SLICE: [[usize; 3]; 8] = [
    [1, 2, 3],
    [1, 2, 6],
    [1, 3, 5],
    [2, 3, 4],
    [1, 5, 6],
    [2, 4, 6],
    [3, 4, 5],
    [4, 5, 6],
];

/// Plücker coordinates on the slice of the orbit point
/// `diag(e^{iα}, e^{iβ}, e^{-i(α+β)}) · e₁₂₃`, with their α and β partials.
pub fn sl_torus_functions(alpha: f64, beta: f64) -> [[f64; 3]; 8] {
    let gamma = -alpha - beta;
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    // each coordinate is ±f(α)g(β)h(γ) with f ∈ {cos, sin}; the derivative of
    // γ in α and β is -1
    let table: [(f64, bool, bool, bool); 8] = [
        (1.0, false, false, false),
        (1.0, false, false, true),
        (-1.0, false, true, false),
        (1.0, true, false, false),
        (1.0, false, true, true),
        (-1.0, true, false, true),
        (1.0, true, true, false),
        (1.0, true, true, true),
    ];
    let pick = |s: bool, sv: f64, cv: f64| if s { (sv, cv) } else { (cv, -sv) };
    table.map(|(sign, ua, ub, ug)| {
        let (fa, da) = pick(ua, sa, ca);
        let (fb, db) = pick(ub, sb, cb);
        let (fg, dg) = pick(ug, sg, cg);
        [
            sign * fa * fb * fg,
            sign * (da * fb * fg - fa * fb * dg),
            sign * (fa * db * fg - fa * fb * dg),
        ]
    })
}

/// `f(α, β) = Σ x_S · p_S(α, β)` for coefficients in [`SL_SLICE`] order.
pub fn sl_poly_eval(x: &[f64; 8], alpha: f64, beta: f64) -> f64 {
    sl_torus_functions(alpha, beta)
        .iter()
        .zip(x)
        .map(|(f, c)| c * f[0])
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub enum SupportingPoly {
    Found {
        coeffs: [f64; 8],
        /// Smallest value of `f` over the grid (excluded neighbourhoods
        /// removed).
        grid_min: f64,
    },
    NotFound {
        best_grid_min: f64,
    },
}

/// Points equivalent to `(α, β)` under the shifts by π that fix every
/// slice function.
fn torus_copies(a: f64, b: f64) -> [(f64, f64); 4] {
    use std::f64::consts::PI;
    [(a, b), (a + PI, b), (a, b + PI), (a + PI, b + PI)]
}

fn torus_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    let d = |x: f64, y: f64| {
        let t = (x - y).rem_euclid(TAU);
        t.min(TAU - t)
    };
    d(a.0, b.0).max(d(a.1, b.1))
}

/// Searches for a trigonometric polynomial on the slice vanishing to second
/// order at two torus points and nonnegative on a grid.
///
/// The six conditions `f = ∂_α f = ∂_β f = 0` leave a nullspace of
/// dimension at least two; the member maximizing the grid minimum (for unit
/// coefficient norm in an orthonormal nullspace basis) is found as the
/// min-norm point of the convex hull of grid evaluations, by Gilbert's
/// algorithm with constraint generation. Positivity is certified on the
/// grid only.
pub fn sl36_supporting_poly(a1: f64, b1: f64, a2: f64, b2: f64, grid_size: usize) -> Result<SupportingPoly> {
    if [a1, b1, a2, b2].iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let (da, db) = ((a1 - a2).rem_euclid(TAU), (b1 - b2).rem_euclid(TAU));
    let close = |t: f64| t.min(TAU - t) < 1e-12;
    if close(da) && close(db) {
        return Err(Error::Precondition("the two torus points coincide".into()));
    }
    if grid_size < 4 {
        return Err(Error::OutOfRange {
            what: "grid size",
            value: grid_size as i64,
        });
    }
    let mut rows = Vec::with_capacity(6);
    for (a, b) in [(a1, b1), (a2, b2)] {
        let f = sl_torus_functions(a, b);
        for c in 0..3 {
            rows.push(f.map(|v| v[c]));
        }
    }
    let m = DMatrix::from_fn(6, 8, |i, j| rows[i][j]);
    let sv = singular_values(&m);
    let rank = sv.iter().filter(|&&s| s > 1e-10 * sv[0].max(1.0)).count();
    let basis = nullspace_basis(&m, rank);
    let r = basis.ncols();

    let roots: Vec<(f64, f64)> = torus_copies(a1, b1)
        .into_iter()
        .chain(torus_copies(a2, b2))
        .collect();
    let step = TAU / grid_size as f64;
    let mut grid: Vec<Vec<f64>> = Vec::new();
    for i in 0..grid_size {
        for j in 0..grid_size {
            let pt = (i as f64 * step, j as f64 * step);
            if roots.iter().any(|&q| torus_dist(pt, q) < 1e-2) {
                continue;
            }
            let f = sl_torus_functions(pt.0, pt.1);
            let vals: Vec<f64> = (0..r)
                .map(|c| (0..8).map(|k| basis[(k, c)] * f[k][0]).sum())
                .collect();
            grid.push(vals);
        }
    }
    let (dir, grid_min) = max_margin_direction(&grid, r);
    let coeffs: Vec<f64> = (0..8)
        .map(|k| (0..r).map(|c| basis[(k, c)] * dir[c]).sum())
        .collect();
    let coeffs: [f64; 8] = coeffs.try_into().expect("eight coefficients");
    if grid_min >= -1e-9 {
        Ok(SupportingPoly::Found { coeffs, grid_min })
    } else {
        Ok(SupportingPoly::NotFound {
            best_grid_min: grid_min,
        })
    }
}

/// Orthonormal basis (columns) of the nullspace of a 6×8 matrix of the
/// given rank, from the eigenvectors of `MᵀM` with the smallest eigenvalues.
fn nullspace_basis(m: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let g = m.transpose() * m;
    let eig = g.symmetric_eigen();
    let mut order: Vec<usize> = (0..8).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let r = 8 - rank;
    DMatrix::from_fn(8, r, |i, c| eig.eigenvectors[(i, order[c])])
}

/// Unit `x` maximizing `min_j ⟨x, g_j⟩`, with that minimum.
fn max_margin_direction(points: &[Vec<f64>], r: usize) -> (Vec<f64>, f64) {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let eval_min = |x: &[f64]| {
        points
            .iter()
            .enumerate()
            .map(|(j, g)| (dot(x, g), j))
            .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
    };
    let stride = (points.len() / 4000).max(1);
    let mut work: Vec<usize> = (0..points.len()).step_by(stride).collect();
    let mut best = (vec![0.0; r], f64::NEG_INFINITY);
    for _round in 0..50 {
        let w = gilbert(points, &work, r);
        let norm = dot(&w, &w).sqrt();
        if norm < 1e-14 {
            // the origin lies in the hull: no strictly separating direction
            let mut x = vec![0.0; r];
            x[0] = 1.0;
            let (min, _) = eval_min(&x);
            if min > best.1 {
                best = (x, min);
            }
            break;
        }
        let x: Vec<f64> = w.iter().map(|v| v / norm).collect();
        let (min, arg) = eval_min(&x);
        if min > best.1 {
            best = (x.clone(), min);
        }
        // converged once the full grid agrees with the working set
        if min >= norm * (1.0 - 1e-6) || work.contains(&arg) {
            break;
        }
        // add the worst points of the full grid
        let mut viol: Vec<(f64, usize)> = points
            .iter()
            .enumerate()
            .map(|(j, g)| (dot(&x, g), j))
            .filter(|(v, _)| *v < norm)
            .collect();
        viol.sort_by(|a, b| a.0.total_cmp(&b.0));
        work.extend(viol.iter().take(200).map(|(_, j)| *j));
        work.sort_unstable();
        work.dedup();
    }
    best
}

/// Gilbert's algorithm for the min-norm point of `conv{points[j] : j ∈ idx}`.
fn gilbert(points: &[Vec<f64>], idx: &[usize], r: usize) -> Vec<f64> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut w = points[idx[0]].clone();
    for _ in 0..20_000 {
        let (mut best, mut arg) = (f64::INFINITY, idx[0]);
        for &j in idx {
            let v = dot(&w, &points[j]);
            if v < best {
                best = v;
                arg = j;
            }
        }
        let ww = dot(&w, &w);
        if ww - best <= 1e-12 * ww.max(1e-300) {
            break;
        }
        let g = &points[arg];
        let diff: Vec<f64> = (0..r).map(|c| w[c] - g[c]).collect();
        let dd = dot(&diff, &diff);
        if dd == 0.0 {
            break;
        }
        let lam = (dot(&w, &diff) / dd).clamp(0.0, 1.0);
        for c in 0..r {
            w[c] -= lam * diff[c];
        }
    }
    w
}
