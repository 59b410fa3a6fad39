//! Real trigonometric polynomials on the circle.
//!
//! `R(θ) = δ + Σₖ aₖ cos(kθ) + bₖ sin(kθ)` is handled through its Laurent
//! form `R(z) = Σ_{|k|≤d} uₖ zᵏ` with `u₀ = δ`, `uₖ = (aₖ - i bₖ)/2` and
//! `u₋ₖ = conj(uₖ)`, evaluated on `z = e^{iθ}`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid used to seed the critical point search.
const PRESCAN: usize = 1024;
/// Roots within this band of the unit circle are treated as lying on it.
const CIRCLE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigJson", into = "TrigJson")]
pub struct TrigPolynomial {
    delta: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TrigJson {
    d: usize,
    delta: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TryFrom<TrigJson> for TrigPolynomial {
    type Error = Error;
    fn try_from(j: TrigJson) -> Result<Self> {
        for v in [&j.a, &j.b] {
            if v.len() != j.d {
                return Err(Error::DimensionMismatch {
                    expected: j.d,
                    found: v.len(),
                });
            }
        }
        TrigPolynomial::new(j.delta, j.a, j.b)
    }
}

impl From<TrigPolynomial> for TrigJson {
    fn from(p: TrigPolynomial) -> Self {
        TrigJson {
            d: p.a.len(),
            delta: p.delta,
            a: p.a,
            b: p.b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub argmin: f64,
    pub max: f64,
    pub argmax: f64,
}

impl TrigPolynomial {
    pub fn new(delta: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        if !delta.is_finite() || a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(TrigPolynomial { delta, a, b })
    }

    pub fn constant(delta: f64) -> Self {
        TrigPolynomial {
            delta,
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    /// Builds `R` from Laurent coefficients `u₀, u₁, …, u_d` (the negative
    /// half is implied by conjugation; the imaginary part of `u₀` is dropped).
    pub fn from_laurent(u: &[Complex64]) -> Self {
        let delta = u.first().map_or(0.0, |c| c.re);
        let a = u.iter().skip(1).map(|c| 2.0 * c.re).collect();
        let b = u.iter().skip(1).map(|c| -2.0 * c.im).collect();
        TrigPolynomial { delta, a, b }
    }

    /// `|H(e^{iθ})|²` as a trigonometric polynomial.
    pub fn squared_modulus(h: &ComplexPolynomial) -> Self {
        let c = &h.coeffs;
        let d = c.len().saturating_sub(1);
        let u: Vec<Complex64> = (0..=d)
            .map(|k| (0..=d - k).map(|j| c[j + k] * c[j].conj()).sum())
            .collect();
        Self::from_laurent(&u)
    }

    /// Nominal degree (length of the coefficient vectors).
    pub fn degree(&self) -> usize {
        self.a.len()
    }

    /// Degree after dropping vanishing top frequencies.
    pub fn effective_degree(&self) -> usize {
        let cutoff = 1e-15 * self.norm();
        (1..=self.a.len())
            .rev()
            .find(|&k| self.a[k - 1].hypot(self.b[k - 1]) > cutoff)
            .unwrap_or(0)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.a
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.b
    }

    /// `|δ| + Σ |(aₖ, bₖ)|`, an upper bound for `max |R|` on the circle.
    pub fn norm(&self) -> f64 {
        self.delta.abs()
            + self
                .a
                .iter()
                .zip(&self.b)
                .map(|(a, b)| a.hypot(*b))
                .sum::<f64>()
    }

    /// Laurent coefficients `u₀ … u_d`.
    pub fn laurent(&self) -> Vec<Complex64> {
        std::iter::once(Complex64::new(self.delta, 0.0))
            .chain(
                self.a
                    .iter()
                    .zip(&self.b)
                    .map(|(a, b)| Complex64::new(0.5 * a, -0.5 * b)),
            )
            .collect()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.delta
            + self
                .a
                .iter()
                .zip(&self.b)
                .enumerate()
                .map(|(i, (a, b))| {
                    let (s, c) = ((i + 1) as f64 * theta).sin_cos();
                    a * c + b * s
                })
                .sum::<f64>()
    }

    /// First and second derivatives in θ.
    fn derivatives(&self, theta: f64) -> (f64, f64) {
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (i, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            d1 += k * (b * c - a * s);
            d2 -= k * k * (a * c + b * s);
        }
        (d1, d2)
    }

    /// `R(θ - φ)`: the same polynomial on a rotated circle.
    pub fn rotate(&self, phi: f64) -> Self {
        let mut a = Vec::with_capacity(self.a.len());
        let mut b = Vec::with_capacity(self.b.len());
        for (i, (ak, bk)) in self.a.iter().zip(&self.b).enumerate() {
            let (s, c) = ((i + 1) as f64 * phi).sin_cos();
            a.push(ak * c - bk * s);
            b.push(ak * s + bk * c);
        }
        TrigPolynomial {
            delta: self.delta,
            a,
            b,
        }
    }

    pub fn scale(&self, t: f64) -> Self {
        TrigPolynomial {
            delta: t * self.delta,
            a: self.a.iter().map(|v| t * v).collect(),
            b: self.b.iter().map(|v| t * v).collect(),
        }
    }

    /// Product of two trigonometric polynomials.
    pub fn mul(&self, other: &Self) -> Self {
        let (u, v) = (self.laurent_full(), other.laurent_full());
        let (d1, d2) = (self.degree() as i64, other.degree() as i64);
        let d = d1 + d2;
        let mut w = vec![Complex64::new(0.0, 0.0); (2 * d + 1) as usize];
        for (i, x) in u.iter().enumerate() {
            for (j, y) in v.iter().enumerate() {
                w[i + j] += x * y;
            }
        }
        Self::from_laurent(&w[d as usize..])
    }

    /// Coefficients of `z^d R(z)`, `u₋d … u_d`.
    fn laurent_full(&self) -> Vec<Complex64> {
        let half = self.laurent();
        let mut out: Vec<Complex64> = half[1..].iter().rev().map(|c| c.conj()).collect();
        out.extend_from_slice(&half);
        out
    }

    fn truncated(&self, d: usize) -> Self {
        TrigPolynomial {
            delta: self.delta,
            a: self.a[..d].to_vec(),
            b: self.b[..d].to_vec(),
        }
    }

    /// Critical points of `R` on the circle, from the roots of the
    /// degree-2d polynomial `z^d R'(z)` plus a grid prescan.
    fn critical_points(&self) -> Vec<f64> {
        let d = self.effective_degree();
        if d == 0 {
            return Vec::new();
        }
        let r = self.truncated(d);
        let u = r.laurent_full();
        // d/dθ of uₖ zᵏ is i k uₖ zᵏ
        let deriv: Vec<Complex64> = u
            .iter()
            .enumerate()
            .map(|(j, c)| Complex64::new(0.0, j as f64 - d as f64) * c)
            .collect();
        let mut cands: Vec<f64> = poly_roots(&deriv)
            .into_iter()
            .filter(|z| (z.norm() - 1.0).abs() <= CIRCLE_EPS.sqrt())
            .map(|z| z.arg())
            .collect();
        let step = TAU / PRESCAN as f64;
        let vals: Vec<f64> = (0..PRESCAN).map(|i| r.eval(i as f64 * step)).collect();
        for i in 0..PRESCAN {
            let (prev, next) = (vals[(i + PRESCAN - 1) % PRESCAN], vals[(i + 1) % PRESCAN]);
            if (vals[i] <= prev && vals[i] <= next) || (vals[i] >= prev && vals[i] >= next) {
                cands.push(i as f64 * step);
            }
        }
        cands.into_iter().map(|t| r.newton_critical(t)).collect()
    }

    fn newton_critical(&self, mut theta: f64) -> f64 {
        for _ in 0..8 {
            let (d1, d2) = self.derivatives(theta);
            if d2 == 0.0 {
                break;
            }
            let step = d1 / d2;
            if !step.is_finite() || step.abs() > 0.1 {
                break;
            }
            theta -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        theta.rem_euclid(TAU)
    }

    pub fn extremize(&self) -> Extrema {
        let crit = self.critical_points();
        if crit.is_empty() {
            return Extrema {
                min: self.delta,
                argmin: 0.0,
                max: self.delta,
                argmax: 0.0,
            };
        }
        let mut ext = Extrema {
            min: f64::INFINITY,
            argmin: 0.0,
            max: f64::NEG_INFINITY,
            argmax: 0.0,
        };
        for t in crit {
            let v = self.eval(t);
            if v < ext.min {
                ext.min = v;
                ext.argmin = t;
            }
            if v > ext.max {
                ext.max = v;
                ext.argmax = t;
            }
        }
        ext
    }

    /// `(min ≥ -tol, min)`.
    pub fn is_nonnegative(&self, tol: f64) -> (bool, f64) {
        let min = self.extremize().min;
        (min >= -tol, min)
    }

    /// Zeros of a nonnegative `R` on the circle, in `[0, 2π)` ascending.
    /// These are the double roots of `z^d R(z)` on `|z| = 1`; clusters
    /// closer than `merge` radians are reported once.
    pub fn circle_zeros(&self, tol: f64, merge: f64) -> Result<Vec<f64>> {
        let (ok, min) = self.is_nonnegative(tol);
        if !ok {
            return Err(Error::NotNonnegative { min });
        }
        let d = self.effective_degree();
        if d == 0 {
            return Ok(Vec::new());
        }
        let r = self.truncated(d);
        let p = r.laurent_full();
        let split = split_roots(&p)?;
        let mut thetas: Vec<f64> = split
            .on_circle
            .iter()
            .map(|z| r.newton_critical(z.arg().rem_euclid(TAU)))
            .filter(|&t| r.eval(t).abs() <= tol.max(1e-10 * r.norm()))
            .collect();
        thetas.sort_by(f64::total_cmp);
        let mut out: Vec<f64> = Vec::new();
        for t in thetas {
            match out.last() {
                Some(&last) if t - last < merge => {}
                _ => out.push(t),
            }
        }
        if out.len() > 1 && out[0] + TAU - out[out.len() - 1] < merge {
            out.pop();
        }
        Ok(out)
    }
}

/// Complex polynomial `Σ cⱼ zʲ` with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct ComplexPolyJson {
    degree: usize,
    coefficients: Vec<[f64; 2]>,
}

impl Serialize for ComplexPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexPolyJson {
            degree: self.degree(),
            coefficients: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ComplexPolyJson::deserialize(d)?;
        if j.coefficients.len() != j.degree + 1 {
            return Err(serde::de::Error::custom("coefficient count must be degree + 1"));
        }
        Ok(ComplexPolynomial::new(
            j.coefficients
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        ))
    }
}

impl ComplexPolynomial {
    /// Trailing zero leading coefficients are trimmed; the zero polynomial
    /// keeps a single zero coefficient.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        ComplexPolynomial { coeffs }
    }

    /// `lead · ∏ (z - rᵢ)`.
    pub fn from_roots(lead: Complex64, roots: &[Complex64]) -> Self {
        let mut c = vec![lead];
        for r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (j, cj) in c.iter().enumerate() {
                next[j + 1] += cj;
                next[j] -= cj * r;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn scale(&self, t: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * t).collect())
    }
}

/// Roots of `Σ cⱼ zʲ` as eigenvalues of the companion matrix, polished by
/// Newton steps. Leading zero coefficients are dropped first.
pub fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let mut n = c.len();
    while n > 0 && c[n - 1] == Complex64::new(0.0, 0.0) {
        n -= 1;
    }
    if n <= 1 {
        return Vec::new();
    }
    let c = &c[..n];
    let deg = n - 1;
    let lead = c[deg];
    let mut comp = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -c[i] / lead;
    }
    let roots: Vec<Complex64> = match Schur::try_new(comp, f64::EPSILON, 100 * deg.max(10)) {
        Some(s) => {
            let (_, t) = s.unpack();
            (0..deg).map(|i| t[(i, i)]).collect()
        }
        None => aberth(c),
    };
    let p = ComplexPolynomial::new(c.to_vec());
    let dp = ComplexPolynomial::new(
        c.iter()
            .enumerate()
            .skip(1)
            .map(|(j, cj)| cj * j as f64)
            .collect(),
    );
    roots.into_iter().map(|z| polish(&p, &dp, z)).collect()
}

fn polish(p: &ComplexPolynomial, dp: &ComplexPolynomial, mut z: Complex64) -> Complex64 {
    let mut val = p.eval(z).norm();
    for _ in 0..3 {
        let der = dp.eval(z);
        if der.norm() == 0.0 {
            break;
        }
        let cand = z - p.eval(z) / der;
        let cv = p.eval(cand).norm();
        if !(cv < val) {
            break;
        }
        z = cand;
        val = cv;
    }
    z
}

/// Simultaneous Aberth iteration, used when the QR iteration stalls.
fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let deg = c.len() - 1;
    let p = ComplexPolynomial::new(c.to_vec());
    let dp = ComplexPolynomial::new(
        c.iter()
            .enumerate()
            .skip(1)
            .map(|(j, cj)| cj * j as f64)
            .collect(),
    );
    let radius = 1.0
        + c[..deg]
            .iter()
            .map(|x| (x / c[deg]).norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(0.5 * radius, TAU * k as f64 / deg as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let ratio = p.eval(z[i]) / dp.eval(z[i]);
            let repulse: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulse);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

struct RootSplit {
    inside: Vec<Complex64>,
    /// One representative per double root on the circle.
    on_circle: Vec<Complex64>,
}

/// Splits the roots of `P(z) = z^d R(z)` into those strictly inside the
/// disk and representatives of the (even multiplicity) roots on the circle.
fn split_roots(p: &[Complex64]) -> Result<RootSplit> {
    let roots = poly_roots(p);
    let (mut inside, mut circle) = (Vec::new(), Vec::new());
    for z in roots {
        let r = z.norm();
        if r < 1.0 - CIRCLE_EPS {
            inside.push(z);
        } else if r <= 1.0 / (1.0 - CIRCLE_EPS) {
            circle.push(z);
        }
    }
    if circle.len() % 2 == 1 {
        return Err(Error::IllConditioned(format!(
            "{} roots near the unit circle cannot be paired",
            circle.len()
        )));
    }
    circle.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
    // pair nearest neighbours on the circle; wrap-around pairs sort to the
    // two ends, so try both rotations and keep the tighter one
    let pair_cost = |v: &[Complex64]| {
        v.chunks(2)
            .map(|w| (w[0] - w[1]).norm())
            .fold(0.0, f64::max)
    };
    if circle.len() >= 2 {
        let mut rotated = circle.clone();
        rotated.rotate_left(1);
        if pair_cost(&rotated) < pair_cost(&circle) {
            circle = rotated;
        }
    }
    let dp: Vec<Complex64> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| c * j as f64)
        .collect();
    let dpp = ComplexPolynomial::new(
        dp.iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c * j as f64)
            .collect(),
    );
    let dpoly = ComplexPolynomial::new(dp);
    let mut on_circle = Vec::with_capacity(circle.len() / 2);
    for w in circle.chunks(2) {
        // a double root of P is a simple root of P'
        let mid = polish(&dpoly, &dpp, 0.5 * (w[0] + w[1]));
        if (mid.norm() - 1.0).abs() > CIRCLE_EPS {
            return Err(Error::IllConditioned(format!(
                "paired root at radius {} is off the circle",
                mid.norm()
            )));
        }
        on_circle.push(mid / mid.norm());
    }
    Ok(RootSplit { inside, on_circle })
}

/// Fejér–Riesz factorization `R = |H|²` on the circle, with `H` of degree
/// `d` having all roots in the closed unit disk and a positive leading
/// coefficient.
pub fn fejer_riesz(r: &TrigPolynomial, tol: f64) -> Result<ComplexPolynomial> {
    let (ok, min) = r.is_nonnegative(tol);
    if !ok {
        return Err(Error::NotNonnegative { min });
    }
    let d = r.effective_degree();
    if d == 0 {
        return Ok(ComplexPolynomial::new(vec![Complex64::new(
            r.delta.max(0.0).sqrt(),
            0.0,
        )]));
    }
    let rt = r.truncated(d);
    let split = split_roots(&rt.laurent_full())?;
    let mut roots = split.inside;
    roots.extend(split.on_circle);
    if roots.len() != d {
        return Err(Error::IllConditioned(format!(
            "selected {} roots for degree {d}",
            roots.len()
        )));
    }
    let g = ComplexPolynomial::from_roots(Complex64::new(1.0, 0.0), &roots);
    // least-squares scale over the verification samples
    let samples: Vec<f64> = (0..4 * d + 1)
        .map(|j| TAU * j as f64 / (4 * d + 1) as f64 + PI / 7.0)
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for &t in &samples {
        let m = g.eval(Complex64::from_polar(1.0, t)).norm_sqr();
        num += rt.eval(t) * m;
        den += m * m;
    }
    let c2 = (num / den).max(0.0);
    let h = g.scale(Complex64::new(c2.sqrt(), 0.0));
    let scale = r.norm().max(f64::MIN_POSITIVE);
    let err = samples
        .iter()
        .map(|&t| (rt.eval(t) - h.eval(Complex64::from_polar(1.0, t)).norm_sqr()).abs())
        .fold(0.0, f64::max);
    if err > tol.max(1e-12) * scale {
        return Err(Error::IllConditioned(format!(
            "reconstruction error {err:e} exceeds tolerance"
        )));
    }
    Ok(h)
}
