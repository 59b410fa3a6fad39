//! Carathéodory orbitopes (trigonometric moment curves) in their Toeplitz
//! and Hankel forms, and the Veronese orbitope of ternary quartics.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{
    dykstra_feasibility, entry_selector, AffinePsdProblem, FeasibilityStatus,
};
use crate::linalg::{
    binomial, hermitian_embed, sym_eigen, HermitianMatrix, SkewMatrix, SymmetricMatrix,
};
use crate::trigpoly::TrigPolynomial;
use crate::verdict::{Certificate, MembershipVerdict};

/// Point `(c₁, s₁, …, c_d, s_d)` of the universal Carathéodory space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaraPoint {
    pub c: Vec<f64>,
    pub s: Vec<f64>,
}

impl CaraPoint {
    pub fn new(c: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if c.len() != s.len() {
            return Err(Error::DimensionMismatch {
                expected: c.len(),
                found: s.len(),
            });
        }
        if c.iter().chain(&s).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CaraPoint { c, s })
    }

    /// From interleaved coordinates `(c₁, s₁, c₂, s₂, …)`.
    pub fn from_interleaved(x: &[f64]) -> Result<Self> {
        if !x.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: x.len() + 1,
                found: x.len(),
            });
        }
        Self::new(
            x.iter().step_by(2).copied().collect(),
            x.iter().skip(1).step_by(2).copied().collect(),
        )
    }

    pub fn interleaved(&self) -> Vec<f64> {
        self.c.iter().zip(&self.s).flat_map(|(c, s)| [*c, *s]).collect()
    }

    pub fn degree(&self) -> usize {
        self.c.len()
    }

    /// The universal curve point at `θ` in degree `d`.
    pub fn on_curve(d: usize, theta: f64) -> Self {
        let (c, s) = (1..=d)
            .map(|k| {
                let (s, c) = (k as f64 * theta).sin_cos();
                (c, s)
            })
            .unzip();
        CaraPoint { c, s }
    }
}

/// `(λ₀, …, λ_{2n})`, coordinates on binary forms of degree `2n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HankelPoint {
    pub lambda: Vec<f64>,
}

impl HankelPoint {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() || lambda.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: lambda.len() + 1,
                found: lambda.len(),
            });
        }
        if lambda.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(HankelPoint { lambda })
    }

    /// Half degree `n` (the Hankel matrix is `(n+1)×(n+1)`).
    pub fn half_degree(&self) -> usize {
        (self.lambda.len() - 1) / 2
    }
}

fn check_weights(a: &[u32]) -> Result<()> {
    if let Some(&w) = a.iter().find(|&&w| w == 0) {
        return Err(Error::OutOfRange {
            what: "curve weight",
            value: w as i64,
        });
    }
    Ok(())
}

/// `(cos a₁θ, sin a₁θ, …, cos a_dθ, sin a_dθ)`.
pub fn cara_curve_point(a: &[u32], theta: f64) -> Result<Vec<f64>> {
    check_weights(a)?;
    Ok(a.iter()
        .flat_map(|&w| {
            let (s, c) = (w as f64 * theta).sin_cos();
            [c, s]
        })
        .collect())
}

/// The Hermitian Toeplitz matrix with unit diagonal and `xⱼ = cⱼ + i sⱼ`
/// on the j-th superdiagonal.
pub fn cara_toeplitz_matrix(p: &CaraPoint) -> HermitianMatrix {
    let m = p.degree() + 1;
    let re = DMatrix::from_fn(m, m, |i, j| {
        let k = i.abs_diff(j);
        if k == 0 {
            1.0
        } else {
            p.c[k - 1]
        }
    });
    let im = DMatrix::from_fn(m, m, |i, j| match j.cmp(&i) {
        std::cmp::Ordering::Greater => p.s[j - i - 1],
        std::cmp::Ordering::Less => -p.s[i - j - 1],
        std::cmp::Ordering::Equal => 0.0,
    });
    HermitianMatrix::new(
        SymmetricMatrix::new(re).expect("symmetric by construction"),
        SkewMatrix::new(im).expect("skew by construction"),
    )
    .expect("matching dimensions")
}

fn lmi_verdict(s: &SymmetricMatrix) -> Result<(f64, Option<Certificate>)> {
    let spec = sym_eigen(s)?;
    let n = spec.values.len();
    let margin = spec.values[n - 1];
    let v = spec.vectors.unwrap().column(n - 1).iter().copied().collect();
    Ok((margin, Some(Certificate::Eigenvector { vector: v })))
}

/// Membership in the universal Carathéodory orbitope via the PSD Toeplitz
/// characterization; the margin is the smallest eigenvalue of its real
/// embedding.
pub fn cara_toeplitz_membership(p: &CaraPoint, tol: f64) -> Result<MembershipVerdict> {
    let emb = hermitian_embed(&cara_toeplitz_matrix(p));
    let (margin, cert) = lmi_verdict(&emb)?;
    Ok(MembershipVerdict::new(margin, tol, cert))
}

/// `K(λ)[i][j] = λ_{i+j}`.
pub fn hankel_matrix(h: &HankelPoint) -> SymmetricMatrix {
    let n = h.half_degree();
    SymmetricMatrix::new(DMatrix::from_fn(n + 1, n + 1, |i, j| h.lambda[i + j]))
        .expect("symmetric by construction")
}

/// `Σ binom(n, j) λ_{2j} - 1` divided by `Σ binom(n, j) = 2ⁿ`.
pub fn hankel_affine_residual(h: &HankelPoint) -> f64 {
    let n = h.half_degree();
    let sum: f64 = (0..=n)
        .map(|j| binomial(n, j) as f64 * h.lambda[2 * j])
        .sum();
    (sum - 1.0) / 2f64.powi(n as i32)
}

/// Membership in `conv ν_{2n}(S¹)`: PSD Hankel matrix on the hyperplane
/// `Σ binom(n, j) λ_{2j} = 1`.
pub fn cara_hankel_membership(h: &HankelPoint, tol: f64) -> Result<MembershipVerdict> {
    let residual = hankel_affine_residual(h);
    let (margin, cert) = lmi_verdict(&hankel_matrix(h))?;
    Ok(MembershipVerdict::with_equality(
        residual,
        margin,
        tol,
        "binomial moment sum",
        cert,
    ))
}

/// `λⱼ = cos^{d-j}θ · sin^jθ`, `j = 0..=d`.
pub fn moment_curve_point(d: usize, theta: f64) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::OutOfRange {
            what: "moment curve degree",
            value: 0,
        });
    }
    let (s, c) = theta.sin_cos();
    Ok((0..=d)
        .map(|j| c.powi((d - j) as i32) * s.powi(j as i32))
        .collect())
}

/// Trigonometric polynomial `δ + Σᵢ αᵢ cos(aᵢθ) + βᵢ sin(aᵢθ)` for a
/// functional `ℓ = (δ, α₁, β₁, …)` on the curve with weights `a`.
pub fn functional_polynomial(a: &[u32], ell: &[f64]) -> Result<TrigPolynomial> {
    check_weights(a)?;
    if ell.len() != 1 + 2 * a.len() {
        return Err(Error::DimensionMismatch {
            expected: 1 + 2 * a.len(),
            found: ell.len(),
        });
    }
    let d = a.iter().copied().max().unwrap_or(0) as usize;
    let mut cos = vec![0.0; d];
    let mut sin = vec![0.0; d];
    for (i, &w) in a.iter().enumerate() {
        cos[w as usize - 1] += ell[1 + 2 * i];
        sin[w as usize - 1] += ell[2 + 2 * i];
    }
    TrigPolynomial::new(ell[0], cos, sin)
}

/// Support function of `conv` of the curve with weights `a`: the maximum of
/// `ℓ` along the curve, and where it is attained.
pub fn cara_support(a: &[u32], ell: &[f64]) -> Result<(f64, f64)> {
    let e = functional_polynomial(a, ell)?.extremize();
    Ok((e.max, e.argmax))
}

/// Zeros on the circle of a nonnegative trigonometric polynomial: the
/// curve points spanning the (simplex) face it supports.
pub fn cara_face_points(r: &TrigPolynomial, tol: f64) -> Result<Vec<f64>> {
    r.circle_zeros(tol, 1e-5)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProjectedMembership {
    /// Carries the lifted Hermitian Toeplitz matrix.
    Feasible(HermitianMatrix),
    Infeasible { distance: f64 },
    Undecided { distance: f64 },
}

/// The feasibility problem for the fiber over `x` (coordinates at the
/// frequencies `a`, interleaved cos/sin) inside the PSD Toeplitz
/// spectrahedron of degree `max a`, written for the real `2m×2m`
/// embedding `[[F, -G], [G, F]]`.
pub fn cara_fiber_problem(a: &[u32], x: &[f64]) -> Result<AffinePsdProblem> {
    check_weights(a)?;
    if a.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("weights must be strictly increasing".into()));
    }
    if x.len() != 2 * a.len() {
        return Err(Error::DimensionMismatch {
            expected: 2 * a.len(),
            found: x.len(),
        });
    }
    let d = a.last().copied().unwrap_or(0) as usize;
    let m = d + 1;
    let size = 2 * m;
    let sel = |i, j| entry_selector(size, i, j);
    let diff = |(i, j): (usize, usize), (k, l): (usize, usize), sign: f64| {
        let c = sel(i, j).as_matrix() - sel(k, l).as_matrix() * sign;
        SymmetricMatrix::symmetrize(&c).expect("finite")
    };
    let mut cons = Vec::new();
    for i in 0..m {
        for j in i..m {
            // F block repeated, G block antisymmetric
            cons.push((diff((i, j), (m + i, m + j), 1.0), 0.0));
            cons.push((diff((m + i, j), (m + j, i), -1.0), 0.0));
        }
    }
    for i in 0..m - 1 {
        for j in 0..m - 1 {
            if i <= j {
                cons.push((diff((i, j), (i + 1, j + 1), 1.0), 0.0));
            }
            cons.push((diff((m + i, j), (m + i + 1, j + 1), 1.0), 0.0));
        }
    }
    for i in 0..m {
        cons.push((sel(i, i), 1.0));
    }
    for (k, &w) in a.iter().enumerate() {
        let w = w as usize;
        cons.push((sel(0, w), x[2 * k]));
        // G[0][w] is stored at row m + 0, column w
        cons.push((sel(m, w), x[2 * k + 1]));
    }
    AffinePsdProblem::new(size, cons)
}

/// Membership in `conv` of the curve with weights `a` by searching for a
/// PSD Toeplitz lift. `budget` bounds the projection iterations.
pub fn cara_projected_membership(a: &[u32], x: &[f64], tol: f64, budget: usize) -> Result<ProjectedMembership> {
    let problem = cara_fiber_problem(a, x)?.with_tol(tol).with_max_iters(budget);
    let out = dykstra_feasibility(&problem, None);
    Ok(match out.status {
        FeasibilityStatus::Feasible => {
            let y = out.point.expect("feasible point").into_inner();
            let m = problem.m / 2;
            let f = y.view((0, 0), (m, m)).into_owned();
            let g = y.view((m, 0), (m, m)).into_owned();
            let f = SymmetricMatrix::symmetrize(&f)?;
            let g = SkewMatrix::skew_part(&g)?;
            ProjectedMembership::Feasible(HermitianMatrix::new(f, g)?)
        }
        FeasibilityStatus::Infeasible => ProjectedMembership::Infeasible {
            distance: out.distance_estimate,
        },
        FeasibilityStatus::Undecided => ProjectedMembership::Undecided {
            distance: out.distance_estimate,
        },
    })
}

/// The 15 exponents of ternary quartics, degree-lexicographic descending.
pub const QUARTIC_EXPONENTS: [[u8; 3]; 15] = [
    [4, 0, 0],
    [3, 1, 0],
    [3, 0, 1],
    [2, 2, 0],
    [2, 1, 1],
    [2, 0, 2],
    [1, 3, 0],
    [1, 2, 1],
    [1, 1, 2],
    [1, 0, 3],
    [0, 4, 0],
    [0, 3, 1],
    [0, 2, 2],
    [0, 1, 3],
    [0, 0, 4],
];

/// Position of a degree-4 exponent in [`QUARTIC_EXPONENTS`].
pub fn quartic_index(e: [u8; 3]) -> Option<usize> {
    QUARTIC_EXPONENTS.iter().position(|&x| x == e)
}

/// `4! / (α₁! α₂! α₃!)`.
pub fn multinomial4(e: [u8; 3]) -> u32 {
    let f = |k: u8| (1..=k as u32).product::<u32>();
    24 / (f(e[0]) * f(e[1]) * f(e[2]))
}

pub fn exponent_key(prefix: char, e: [u8; 3]) -> String {
    format!("{prefix}{}{}{}", e[0], e[1], e[2])
}

macro_rules! quartic_coords {
    ($name:ident, $prefix:expr) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name(pub [f64; 15]);

        impl $name {
            pub fn get(&self, e: [u8; 3]) -> f64 {
                quartic_index(e).map_or(0.0, |i| self.0[i])
            }

            pub fn set(&mut self, e: [u8; 3], v: f64) {
                let i = quartic_index(e).expect("degree-4 exponent");
                self.0[i] = v;
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                use serde::ser::SerializeMap;
                let mut map = s.serialize_map(Some(15))?;
                for (e, v) in QUARTIC_EXPONENTS.iter().zip(&self.0) {
                    map.serialize_entry(&exponent_key($prefix, *e), v)?;
                }
                map.end()
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                use serde::de::Error as _;
                let map = std::collections::BTreeMap::<String, f64>::deserialize(d)?;
                let mut out = [0.0; 15];
                for (i, e) in QUARTIC_EXPONENTS.iter().enumerate() {
                    let key = exponent_key($prefix, *e);
                    out[i] = *map
                        .get(&key)
                        .ok_or_else(|| D::Error::custom(format!("missing key {key}")))?;
                }
                if let Some(k) = map.keys().find(|k| {
                    !QUARTIC_EXPONENTS
                        .iter()
                        .any(|e| exponent_key($prefix, *e) == **k)
                }) {
                    return Err(D::Error::custom(format!("unknown key {k}")));
                }
                Ok($name(out))
            }
        }
    };
}

quartic_coords!(TernaryQuarticLambda, 'l');
quartic_coords!(TernaryQuartic, 'c');

impl TernaryQuartic {
    pub fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        QUARTIC_EXPONENTS
            .iter()
            .zip(&self.0)
            .map(|(e, c)| c * x.powi(e[0] as i32) * y.powi(e[1] as i32) * z.powi(e[2] as i32))
            .sum()
    }
}

/// `λ_α = v^α` for a unit vector `v`.
pub fn veronese_point(v: [f64; 3]) -> Result<TernaryQuarticLambda> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit { norm });
    }
    let mut out = [0.0; 15];
    for (o, e) in out.iter_mut().zip(QUARTIC_EXPONENTS) {
        *o = v[0].powi(e[0] as i32) * v[1].powi(e[1] as i32) * v[2].powi(e[2] as i32);
    }
    Ok(TernaryQuarticLambda(out))
}

const QUADRATIC_EXPONENTS: [[u8; 3]; 6] = [
    [2, 0, 0],
    [0, 2, 0],
    [0, 0, 2],
    [1, 1, 0],
    [1, 0, 1],
    [0, 1, 1],
];

/// The 6×6 moment matrix `K_λ[β][γ] = λ_{β+γ}` over quadratic exponents
/// ordered `200, 020, 002, 110, 101, 011`.
pub fn veronese_hankel(l: &TernaryQuarticLambda) -> SymmetricMatrix {
    SymmetricMatrix::new(DMatrix::from_fn(6, 6, |i, j| {
        let (b, g) = (QUADRATIC_EXPONENTS[i], QUADRATIC_EXPONENTS[j]);
        l.get([b[0] + g[0], b[1] + g[1], b[2] + g[2]])
    }))
    .expect("symmetric by construction")
}

/// Residual of `λ₄₀₀+λ₀₄₀+λ₀₀₄+2λ₂₂₀+2λ₂₀₂+2λ₀₂₂ = 1`, divided by the ℓ₁
/// norm 9 of the functional.
pub fn veronese_affine_residual(l: &TernaryQuarticLambda) -> f64 {
    let s = l.get([4, 0, 0])
        + l.get([0, 4, 0])
        + l.get([0, 0, 4])
        + 2.0 * (l.get([2, 2, 0]) + l.get([2, 0, 2]) + l.get([0, 2, 2]));
    (s - 1.0) / 9.0
}

/// Membership in the Veronese orbitope `conv ν₄(S²)`.
pub fn veronese34_membership(l: &TernaryQuarticLambda, tol: f64) -> Result<MembershipVerdict> {
    if l.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let residual = veronese_affine_residual(l);
    let (margin, cert) = lmi_verdict(&veronese_hankel(l))?;
    Ok(MembershipVerdict::with_equality(
        residual,
        margin,
        tol,
        "sphere equation",
        cert,
    ))
}

/// `c_α = binom(4, α) λ_α`.
pub fn quartic_from_lambda(l: &TernaryQuarticLambda) -> TernaryQuartic {
    let mut c = [0.0; 15];
    for (i, e) in QUARTIC_EXPONENTS.iter().enumerate() {
        c[i] = multinomial4(*e) as f64 * l.0[i];
    }
    TernaryQuartic(c)
}

/// Rotates the Veronese coordinates: `λ ↦ λ'` with `λ'_α = (gv)^α`
/// extended linearly, computed by expanding `(gv)^α` as a form in `v`.
pub fn rotate_lambda(l: &TernaryQuarticLambda, g: &DMatrix<f64>) -> TernaryQuarticLambda {
    // (gv)^α = Σ_β T[α][β] v^β; λ'_α = Σ_β T[α][β] λ_β
    let mut out = [0.0; 15];
    for (ia, a) in QUARTIC_EXPONENTS.iter().enumerate() {
        // product of linear forms rows of g with multiplicities a
        let mut poly: Vec<([u8; 3], f64)> = vec![([0, 0, 0], 1.0)];
        for (row, &mult) in a.iter().enumerate() {
            for _ in 0..mult {
                let mut next = Vec::new();
                for (e, c) in &poly {
                    for var in 0..3 {
                        let mut f = *e;
                        f[var] += 1;
                        next.push((f, c * g[(row, var)]));
                    }
                }
                poly = next;
            }
        }
        out[ia] = poly.iter().map(|(e, c)| c * l.get(*e)).sum();
    }
    TernaryQuarticLambda(out)
}

/// Full-turn sampling helper: `count` equally spaced angles with offset.
pub fn circle_angles(count: usize, offset: f64) -> Vec<f64> {
    (0..count)
        .map(|i| offset + TAU * i as f64 / count as f64)
        .collect()
}
