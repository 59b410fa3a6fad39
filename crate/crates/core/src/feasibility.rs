//! Alternating projections with Dykstra's correction for
//! `{X ⪰ 0 : ⟨Cᵢ, X⟩ = bᵢ}`.
//!
//! Infeasibility is a heuristic verdict: the gap between the two sets has
//! stopped shrinking. It is strong evidence, never a certificate.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, SymmetricMatrix};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 50_000;
const STALL_WINDOW: usize = 100;
const STALL_RELATIVE: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct AffinePsdProblem {
    pub m: usize,
    pub constraints: Vec<(SymmetricMatrix, f64)>,
    pub tol: f64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityOutcome {
    pub status: FeasibilityStatus,
    pub point: Option<SymmetricMatrix>,
    /// Frobenius gap between the last PSD and affine iterates (or the
    /// affine residual when the constraints are inconsistent).
    pub distance_estimate: f64,
    pub iterations: usize,
}

impl AffinePsdProblem {
    pub fn new(m: usize, constraints: Vec<(SymmetricMatrix, f64)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange {
                what: "matrix size",
                value: 0,
            });
        }
        for (c, b) in &constraints {
            if c.dim() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: c.dim(),
                });
            }
            if !b.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(AffinePsdProblem {
            m,
            constraints,
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    /// Multiplies every `(Cᵢ, bᵢ)` by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        AffinePsdProblem {
            constraints: self
                .constraints
                .iter()
                .map(|(c, b)| (SymmetricMatrix::new(c.as_matrix() * t).unwrap(), b * t))
                .collect(),
            ..self.clone()
        }
    }

    /// Largest constraint violation, each normalized by `‖Cᵢ‖_F`.
    pub fn residual(&self, x: &DMatrix<f64>) -> f64 {
        self.constraints
            .iter()
            .map(|(c, b)| {
                let norm = c.as_matrix().norm();
                if norm == 0.0 {
                    b.abs()
                } else {
                    (c.as_matrix().dot(x) - b).abs() / norm
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Nearest PSD matrix in Frobenius norm: clip negative eigenvalues.
pub fn project_psd(x: &SymmetricMatrix) -> SymmetricMatrix {
    SymmetricMatrix::symmetrize(&project_psd_raw(x.as_matrix())).expect("finite")
}

fn project_psd_raw(x: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = x.clone().symmetric_eigen();
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let q = &eig.eigenvectors;
    let out = q * DMatrix::from_diagonal(&clipped) * q.transpose();
    0.5 * (&out + out.transpose())
}

/// Precomputed orthogonal projector onto the affine constraint set.
#[derive(Debug, Clone)]
pub struct AffineProjector {
    m: usize,
    /// Constraint matrices flattened column-major, one per row.
    a: DMatrix<f64>,
    b: DVector<f64>,
    gram_pinv: DMatrix<f64>,
    /// Residual of the least-squares solution; positive when the affine set
    /// is empty.
    inconsistency: f64,
}

impl AffineProjector {
    pub fn new(problem: &AffinePsdProblem) -> Self {
        let m = problem.m;
        let k = problem.constraints.len();
        let mut a = DMatrix::zeros(k, m * m);
        let mut b = DVector::zeros(k);
        for (i, (c, bi)) in problem.constraints.iter().enumerate() {
            a.row_mut(i).copy_from_slice(c.as_matrix().as_slice());
            b[i] = *bi;
        }
        let gram = &a * a.transpose();
        let scale = gram.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
        let gram_pinv = gram
            .clone()
            .pseudo_inverse(1e-12 * scale)
            .unwrap_or_else(|_| DMatrix::zeros(k, k));
        let y = &gram_pinv * &b;
        let x0 = a.transpose() * y;
        let inconsistency = if k == 0 {
            0.0
        } else {
            (&a * x0 - &b).amax() / (1.0 + b.amax())
        };
        AffineProjector {
            m,
            a,
            b,
            gram_pinv,
            inconsistency,
        }
    }

    pub fn is_consistent(&self, tol: f64) -> bool {
        self.inconsistency <= tol
    }

    pub fn inconsistency(&self) -> f64 {
        self.inconsistency
    }

    pub fn project(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        if self.a.nrows() == 0 {
            return x.clone();
        }
        let v = DVector::from_column_slice(x.as_slice());
        let y = &self.gram_pinv * (&self.a * &v - &self.b);
        let out = v - self.a.transpose() * y;
        let out = DMatrix::from_column_slice(self.m, self.m, out.as_slice());
        0.5 * (&out + out.transpose())
    }
}

/// Orthogonal projection onto `{⟨Cᵢ, X⟩ = bᵢ}`; errors if that set is empty.
pub fn project_affine(x: &SymmetricMatrix, problem: &AffinePsdProblem) -> Result<SymmetricMatrix> {
    let proj = AffineProjector::new(problem);
    if !proj.is_consistent(1e-9) {
        return Err(Error::InconsistentConstraints {
            residual: proj.inconsistency(),
        });
    }
    SymmetricMatrix::symmetrize(&proj.project(x.as_matrix()))
}

/// One Dykstra run, exposed step by step so callers can observe the gaps.
pub struct Dykstra<'a> {
    problem: &'a AffinePsdProblem,
    proj: AffineProjector,
    x: DMatrix<f64>,
    p: DMatrix<f64>,
    y: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct DykstraStep {
    /// `‖Y - X‖_F` for the new PSD iterate `Y` and affine iterate `X`.
    pub gap: f64,
    /// `‖Y_new - Y_old‖_F`.
    pub psd_move: f64,
    /// Normalized affine residual of `Y`.
    pub residual: f64,
}

impl<'a> Dykstra<'a> {
    pub fn new(problem: &'a AffinePsdProblem, start: Option<&SymmetricMatrix>) -> Self {
        let proj = AffineProjector::new(problem);
        let m = problem.m;
        let x = match start {
            Some(s) => proj.project(s.as_matrix()),
            None => proj.project(&DMatrix::zeros(m, m)),
        };
        Dykstra {
            problem,
            proj,
            y: x.clone(),
            x,
            p: DMatrix::zeros(m, m),
        }
    }

    pub fn step(&mut self) -> DykstraStep {
        let shifted = &self.x + &self.p;
        let y = project_psd_raw(&shifted);
        self.p = shifted - &y;
        self.x = self.proj.project(&y);
        let psd_move = (&y - &self.y).norm();
        self.y = y;
        DykstraStep {
            gap: (&self.y - &self.x).norm(),
            psd_move,
            residual: self.problem.residual(&self.y),
        }
    }

    pub fn psd_iterate(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn affine_iterate(&self) -> &DMatrix<f64> {
        &self.x
    }
}

/// Gauss–Newton on `X = WWᵀ` with `W` of `r` columns, seeded from the top
/// eigenpairs of `y`. Returns a PSD point with residual `≤ tol`, if found.
///
/// When the slice touches the cone only along a low-rank face, alternating
/// projections converge sublinearly; this factored solve finishes the job
/// from a coarse iterate and its output is feasible by construction.
fn low_rank_polish(problem: &AffinePsdProblem, y: &DMatrix<f64>, r: usize, tol: f64) -> Option<DMatrix<f64>> {
    let s = problem.m;
    let k = problem.constraints.len();
    let eig = y.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut w = DMatrix::from_fn(s, r, |i, j| {
        let c = order[j];
        eig.eigenvectors[(i, c)] * eig.eigenvalues[c].max(0.0).sqrt()
    });
    let norms: Vec<f64> = problem
        .constraints
        .iter()
        .map(|(c, _)| c.as_matrix().norm().max(f64::MIN_POSITIVE))
        .collect();
    for _ in 0..POLISH_STEPS {
        let x = &w * w.transpose();
        let f = DVector::from_fn(k, |i, _| {
            let (c, b) = &problem.constraints[i];
            (c.as_matrix().dot(&x) - b) / norms[i]
        });
        if f.amax() <= tol {
            return Some(x);
        }
        let mut jac = DMatrix::zeros(k, s * r);
        for (i, (c, _)) in problem.constraints.iter().enumerate() {
            let g = c.as_matrix() * &w * (2.0 / norms[i]);
            jac.row_mut(i).copy_from_slice(g.as_slice());
        }
        let step = jac.svd(true, true).solve(&f, 1e-12).ok()?;
        w -= DMatrix::from_column_slice(s, r, step.as_slice());
        if !w.iter().all(|v| v.is_finite()) {
            return None;
        }
    }
    let x = &w * w.transpose();
    (problem.residual(&x) <= tol).then_some(x)
}

/// Ranks worth trying for [`low_rank_polish`]: numerical ranks of `y` at a
/// few relative thresholds.
fn candidate_ranks(y: &DMatrix<f64>) -> Vec<usize> {
    let ev = y.clone().symmetric_eigenvalues();
    let top = ev.iter().copied().fold(0.0, f64::max);
    let mut out: Vec<usize> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|t| ev.iter().filter(|&&v| v > t * top).count())
        .filter(|&r| r > 0)
        .collect();
    out.dedup();
    out
}

const POLISH_FIRST: usize = 100;
const POLISH_EVERY: usize = 1000;
const POLISH_STEPS: usize = 40;

/// Decides whether the affine slice of the PSD cone is nonempty.
///
/// Feasible once the PSD iterate meets every constraint to `tol`, or once
/// a low-rank polish seeded from it does; Infeasible once the gap has
/// changed by less than 0.1% over 100 iterations while exceeding `10·tol`;
/// Undecided when the budget runs out.
pub fn dykstra_feasibility(problem: &AffinePsdProblem, start: Option<&SymmetricMatrix>) -> FeasibilityOutcome {
    let tol = problem.tol;
    let mut solver = Dykstra::new(problem, start);
    if !solver.proj.is_consistent(tol.max(1e-12)) {
        return FeasibilityOutcome {
            status: FeasibilityStatus::Infeasible,
            point: None,
            distance_estimate: solver.proj.inconsistency(),
            iterations: 0,
        };
    }
    let mut history: Vec<f64> = Vec::with_capacity(problem.max_iters.min(1 << 16));
    let mut gap = f64::INFINITY;
    for it in 1..=problem.max_iters {
        let s = solver.step();
        gap = s.gap;
        if s.residual <= tol {
            let point = SymmetricMatrix::symmetrize(solver.psd_iterate()).ok();
            return FeasibilityOutcome {
                status: FeasibilityStatus::Feasible,
                point,
                distance_estimate: gap,
                iterations: it,
            };
        }
        if it == POLISH_FIRST || it % POLISH_EVERY == 0 {
            let y = solver.psd_iterate().clone();
            if let Some(x) = candidate_ranks(&y)
                .into_iter()
                .find_map(|r| low_rank_polish(problem, &y, r, tol))
            {
                return FeasibilityOutcome {
                    status: FeasibilityStatus::Feasible,
                    point: SymmetricMatrix::symmetrize(&x).ok(),
                    distance_estimate: 0.0,
                    iterations: it,
                };
            }
        }
        history.push(gap);
        if it > STALL_WINDOW && it % STALL_WINDOW == 0 {
            let old = history[it - 1 - STALL_WINDOW];
            if gap > 10.0 * tol && (old - gap).abs() <= STALL_RELATIVE * old {
                return FeasibilityOutcome {
                    status: FeasibilityStatus::Infeasible,
                    point: None,
                    distance_estimate: gap,
                    iterations: it,
                };
            }
        }
    }
    FeasibilityOutcome {
        status: FeasibilityStatus::Undecided,
        point: None,
        distance_estimate: gap,
        iterations: problem.max_iters,
    }
}

/// Independent check of a claimed feasible point.
pub fn verify_point(problem: &AffinePsdProblem, x: &SymmetricMatrix, tol: f64) -> bool {
    let min_eig = sym_eigen(x)
        .map(|s| s.values.last().copied().unwrap_or(0.0))
        .unwrap_or(f64::NEG_INFINITY);
    problem.residual(x.as_matrix()) <= tol && min_eig >= -tol
}

/// `E_ij + E_ji` scaled so that `⟨C, X⟩ = X_ij`.
pub fn entry_selector(m: usize, i: usize, j: usize) -> SymmetricMatrix {
    let mut c = DMatrix::zeros(m, m);
    if i == j {
        c[(i, i)] = 1.0;
    } else {
        c[(i, j)] = 0.5;
        c[(j, i)] = 0.5;
    }
    SymmetricMatrix::new(c).expect("symmetric by construction")
}
