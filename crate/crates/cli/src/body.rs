//! Body specifications, point encodings and per-family evaluation.

use std::path::PathBuf;

use nalgebra::DMatrix;
use orbitope::grassmann::{g2_membership, plucker_embed, PluckerVector, Subspace};
use orbitope::linalg::{
    binomial, haar_orthogonal_with, haar_rotation_with, k_subsets, svd, GeneralMatrix, MatrixJson, SkewMatrix,
    SymmetricMatrix,
};
use orbitope::matrix_orbitopes::{
    fan_membership, nuclear_ball_membership, nuclear_norm, on_membership, operator_norm, sh_skew_membership,
    sh_sym_membership, sh_sym_support, so3_membership, son_membership,
};
use orbitope::moment::{
    cara_curve_point, cara_hankel_membership, cara_projected_membership, cara_support, cara_toeplitz_membership,
    exponent_key, moment_curve_point, veronese34_membership, veronese_point, CaraPoint, HankelPoint,
    ProjectedMembership, TernaryQuarticLambda, QUARTIC_EXPONENTS,
};
use orbitope::verdict::MembershipVerdict;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

const DEFAULT_BUDGET: usize = 50_000;

/// Wire form of a body, tagged by `family`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BodySpec {
    ShSym {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model: Option<MatrixJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model_path: Option<PathBuf>,
    },
    ShSkew {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model: Option<MatrixJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model_path: Option<PathBuf>,
    },
    Fan {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model: Option<MatrixJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model_path: Option<PathBuf>,
    },
    // empty braces so that unknown fields are rejected
    So3 {},
    Son {
        n: usize,
    },
    OnOperator {
        n: usize,
    },
    Nuclear {
        n: usize,
    },
    CaraToeplitz {
        d: usize,
    },
    CaraHankel {
        n: usize,
    },
    CaraProjected {
        weights: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<usize>,
    },
    Veronese34 {},
    Grassmann2 {
        n: usize,
    },
}

/// A validated body.
#[derive(Debug, Clone)]
pub enum Body {
    ShSym(SymmetricMatrix),
    ShSkew(SkewMatrix),
    Fan(GeneralMatrix),
    So3,
    Son(usize),
    OnOperator(usize),
    Nuclear(usize),
    CaraToeplitz(usize),
    CaraHankel(usize),
    CaraProjected { weights: Vec<u32>, budget: usize },
    Veronese34,
    Grassmann2(usize),
}

fn load_model(model: &Option<MatrixJson>, path: &Option<PathBuf>) -> Result<MatrixJson, CliError> {
    match (model, path) {
        (Some(m), None) => Ok(m.clone()),
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", p.display())))
        }
        _ => Err(CliError::input("exactly one of model and model_path is required")),
    }
}

fn positive(n: usize, what: &str) -> Result<usize, CliError> {
    if n == 0 {
        return Err(CliError::input(format!("{what} must be positive")));
    }
    Ok(n)
}

impl BodySpec {
    pub fn resolve(&self) -> Result<Body, CliError> {
        let bad = |e: orbitope::Error| CliError::input(format!("model: {e}"));
        Ok(match self {
            BodySpec::ShSym { model, model_path } => {
                Body::ShSym(SymmetricMatrix::try_from(load_model(model, model_path)?).map_err(bad)?)
            }
            BodySpec::ShSkew { model, model_path } => {
                Body::ShSkew(SkewMatrix::try_from(load_model(model, model_path)?).map_err(bad)?)
            }
            BodySpec::Fan { model, model_path } => {
                Body::Fan(GeneralMatrix::try_from(load_model(model, model_path)?).map_err(bad)?)
            }
            BodySpec::So3 {} => Body::So3,
            BodySpec::Son { n } => Body::Son(positive(*n, "n")?),
            BodySpec::OnOperator { n } => Body::OnOperator(positive(*n, "n")?),
            BodySpec::Nuclear { n } => Body::Nuclear(positive(*n, "n")?),
            BodySpec::CaraToeplitz { d } => Body::CaraToeplitz(positive(*d, "d")?),
            BodySpec::CaraHankel { n } => Body::CaraHankel(positive(*n, "n")?),
            BodySpec::CaraProjected { weights, budget } => {
                if weights.is_empty() || weights.contains(&0) || weights.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(CliError::input("weights must be positive and strictly increasing"));
                }
                Body::CaraProjected {
                    weights: weights.clone(),
                    budget: budget.unwrap_or(DEFAULT_BUDGET),
                }
            }
            BodySpec::Veronese34 {} => Body::Veronese34,
            BodySpec::Grassmann2 { n } => {
                if *n < 2 {
                    return Err(CliError::input("grassmann2 needs n >= 2"));
                }
                Body::Grassmann2(*n)
            }
        })
    }
}

/// Outcome of one membership query.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Evaluation {
    Verdict(MembershipVerdict),
    Projected { status: &'static str, distance_estimate: f64 },
}

impl Evaluation {
    pub fn status(&self) -> String {
        match self {
            Evaluation::Verdict(v) => format!("{:?}", v.status),
            Evaluation::Projected { status, .. } => status.to_string(),
        }
    }

    /// Signed margin, or minus the distance estimate for the projected
    /// family.
    pub fn margin(&self) -> f64 {
        match self {
            Evaluation::Verdict(v) => v.margin,
            Evaluation::Projected { distance_estimate, .. } => -distance_estimate,
        }
    }
}

fn matrix_names(n: usize) -> Vec<String> {
    (1..=n).flat_map(|i| (1..=n).map(move |j| format!("a{i}_{j}"))).collect()
}

impl Body {
    pub fn matrix_dim(&self) -> Option<usize> {
        match self {
            Body::ShSym(m) => Some(m.dim()),
            Body::ShSkew(m) => Some(m.dim()),
            Body::Fan(m) => Some(m.dim()),
            Body::So3 => Some(3),
            Body::Son(n) | Body::OnOperator(n) | Body::Nuclear(n) => Some(*n),
            _ => None,
        }
    }

    /// Coordinate names of the ambient space, in flat order.
    pub fn coordinate_names(&self) -> Vec<String> {
        if let Some(n) = self.matrix_dim() {
            return matrix_names(n);
        }
        match self {
            Body::CaraToeplitz(d) => (1..=*d).flat_map(|k| [format!("c{k}"), format!("s{k}")]).collect(),
            Body::CaraProjected { weights, .. } => {
                weights.iter().flat_map(|k| [format!("c{k}"), format!("s{k}")]).collect()
            }
            Body::CaraHankel(n) => (0..=2 * n).map(|j| format!("l{j}")).collect(),
            Body::Veronese34 => QUARTIC_EXPONENTS.iter().map(|e| exponent_key('l', *e)).collect(),
            Body::Grassmann2(n) => k_subsets(*n, 2).iter().map(|s| format!("p{}{}", s[0] + 1, s[1] + 1)).collect(),
            _ => unreachable!("matrix families handled above"),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Body::Grassmann2(n) => binomial(*n, 2),
            _ => self.coordinate_names().len(),
        }
    }

    /// Decodes a point from its JSON form into flat coordinates.
    pub fn flatten_point(&self, v: &Value) -> Result<Vec<f64>, String> {
        let flat = if self.matrix_dim().is_some() {
            let m: MatrixJson = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
            if m.data.len() != m.n * m.n {
                return Err(format!("matrix data has {} entries, expected {}", m.data.len(), m.n * m.n));
            }
            m.data
        } else {
            match self {
                Body::Veronese34 => {
                    let l: TernaryQuarticLambda = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
                    l.0.to_vec()
                }
                Body::Grassmann2(_) => {
                    let p: PluckerVector = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
                    if p.d != 2 {
                        return Err(format!("expected a bivector, got d = {}", p.d));
                    }
                    p.coords
                }
                _ => serde_json::from_value(v.clone()).map_err(|e| e.to_string())?,
            }
        };
        if flat.len() != self.ambient_dim() {
            return Err(format!(
                "point has {} coordinates, expected {}",
                flat.len(),
                self.ambient_dim()
            ));
        }
        Ok(flat)
    }

    /// JSON form of a flat point.
    pub fn point_json(&self, flat: &[f64]) -> Value {
        if let Some(n) = self.matrix_dim() {
            return json!(MatrixJson { n, data: flat.to_vec() });
        }
        match self {
            Body::Veronese34 => {
                let mut l = [0.0; 15];
                l.copy_from_slice(flat);
                json!(TernaryQuarticLambda(l))
            }
            Body::Grassmann2(n) => json!(PluckerVector {
                n: *n,
                d: 2,
                coords: flat.to_vec()
            }),
            _ => json!(flat),
        }
    }

    pub fn evaluate(&self, x: &[f64], tol: f64) -> Result<Evaluation, orbitope::Error> {
        let n = self.matrix_dim().unwrap_or(0);
        let verdict = match self {
            Body::ShSym(m) => sh_sym_membership(m, &SymmetricMatrix::try_from(mj(n, x))?, tol)?,
            Body::ShSkew(m) => sh_skew_membership(m, &SkewMatrix::try_from(mj(n, x))?, tol)?,
            Body::Fan(m) => fan_membership(m, &GeneralMatrix::try_from(mj(n, x))?, tol)?,
            Body::So3 => so3_membership(&GeneralMatrix::try_from(mj(3, x))?, tol)?,
            Body::Son(_) => son_membership(&GeneralMatrix::try_from(mj(n, x))?, tol)?,
            Body::OnOperator(_) => on_membership(&GeneralMatrix::try_from(mj(n, x))?, tol),
            Body::Nuclear(_) => nuclear_ball_membership(&GeneralMatrix::try_from(mj(n, x))?, tol),
            Body::CaraToeplitz(_) => cara_toeplitz_membership(&CaraPoint::from_interleaved(x)?, tol)?,
            Body::CaraHankel(_) => cara_hankel_membership(&HankelPoint::new(x.to_vec())?, tol)?,
            Body::CaraProjected { weights, budget } => {
                let (status, distance_estimate) = match cara_projected_membership(weights, x, tol, *budget)? {
                    ProjectedMembership::Feasible(_) => ("Feasible", 0.0),
                    ProjectedMembership::Infeasible { distance } => ("Infeasible", distance),
                    ProjectedMembership::Undecided { distance } => ("Undecided", distance),
                };
                return Ok(Evaluation::Projected {
                    status,
                    distance_estimate,
                });
            }
            Body::Veronese34 => {
                let mut l = [0.0; 15];
                l.copy_from_slice(x);
                veronese34_membership(&TernaryQuarticLambda(l), tol)?
            }
            Body::Grassmann2(n) => g2_membership(&PluckerVector::new(*n, 2, x.to_vec())?, tol)?,
        };
        Ok(Evaluation::Verdict(verdict))
    }

    /// Support function and a maximizer, for the families with a closed
    /// form. `None` means unsupported.
    pub fn support(&self, functional: &Value) -> Option<Result<(f64, Value), String>> {
        let matrix = || -> Result<GeneralMatrix, String> {
            let m: MatrixJson = serde_json::from_value(functional.clone()).map_err(|e| e.to_string())?;
            GeneralMatrix::try_from(m).map_err(|e| e.to_string())
        };
        let curve = |a: Vec<u32>| -> Result<(f64, Value), String> {
            let ell: Vec<f64> = serde_json::from_value(functional.clone()).map_err(|e| e.to_string())?;
            let (value, theta) = cara_support(&a, &ell).map_err(|e| e.to_string())?;
            let x = cara_curve_point(&a, theta).map_err(|e| e.to_string())?;
            Ok((value, json!({ "theta": theta, "point": x })))
        };
        Some(match self {
            Body::ShSym(m) => (|| {
                let b = SymmetricMatrix::new(matrix()?.into_inner()).map_err(|e| e.to_string())?;
                let (value, arg) = sh_sym_support(m, &b).map_err(|e| e.to_string())?;
                Ok((value, json!(MatrixJson::from(arg))))
            })(),
            // operator and nuclear balls are dual to each other
            Body::OnOperator(_) => matrix().map(|b| {
                let s = svd(&b);
                let arg = &s.u * s.v.transpose();
                (nuclear_norm(&b), json!(MatrixJson::from(GeneralMatrix::new(arg).expect("finite"))))
            }),
            Body::Nuclear(_) => matrix().map(|b| {
                let s = svd(&b);
                let arg = s.u.column(0) * s.v.column(0).transpose();
                (operator_norm(&b), json!(MatrixJson::from(GeneralMatrix::new(arg).expect("finite"))))
            }),
            Body::CaraToeplitz(d) => curve((1..=*d as u32).collect()),
            Body::CaraProjected { weights, .. } => curve(weights.clone()),
            _ => return None,
        })
    }

    /// A random extreme point (orbit or curve point), as flat coordinates.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let flat = |m: &DMatrix<f64>| GeneralMatrix::new(m.clone()).expect("finite").to_row_major();
        match self {
            Body::ShSym(m) => {
                let g = haar_orthogonal_with(rng, m.dim());
                m.conjugate(&g).to_row_major()
            }
            Body::ShSkew(m) => {
                let g = haar_rotation_with(rng, m.dim());
                m.conjugate(&g).to_row_major()
            }
            Body::Fan(m) => {
                let n = m.dim();
                let g = haar_orthogonal_with(rng, n);
                let h = haar_orthogonal_with(rng, n);
                flat(&(g * m.as_matrix() * h))
            }
            Body::So3 => flat(&haar_rotation_with(rng, 3)),
            Body::Son(n) => flat(&haar_rotation_with(rng, *n)),
            Body::OnOperator(n) => flat(&haar_orthogonal_with(rng, *n)),
            Body::Nuclear(n) => {
                let g = haar_orthogonal_with(rng, *n);
                let h = haar_orthogonal_with(rng, *n);
                flat(&(g.column(0) * h.column(0).transpose()))
            }
            Body::CaraToeplitz(d) => CaraPoint::on_curve(*d, random_angle(rng)).interleaved(),
            Body::CaraProjected { weights, .. } => cara_curve_point(weights, random_angle(rng)).expect("valid weights"),
            Body::CaraHankel(n) => moment_curve_point(2 * n, random_angle(rng)).expect("positive degree"),
            Body::Veronese34 => loop {
                let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
                let r = v.iter().map(|t| t * t).sum::<f64>().sqrt();
                if r > 1e-8 {
                    break veronese_point(v.map(|t| t / r)).expect("unit vector").0.to_vec();
                }
            },
            Body::Grassmann2(n) => {
                let g = haar_rotation_with(rng, *n);
                let l = Subspace::new(g.rows(0, 2).into_owned()).expect("orthonormal rows");
                plucker_embed(&l).coords
            }
        }
    }
}

fn mj(n: usize, x: &[f64]) -> MatrixJson {
    MatrixJson { n, data: x.to_vec() }
}

fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.0..std::f64::consts::TAU)
}
