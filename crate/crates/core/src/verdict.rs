use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Inside,
    Boundary,
    Outside,
}

impl Status {
    pub fn from_margin(margin: f64, tol: f64) -> Status {
        if margin > tol {
            Status::Inside
        } else if margin >= -tol {
            Status::Boundary
        } else {
            Status::Outside
        }
    }

    pub fn is_member(self) -> bool {
        self != Status::Outside
    }
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Certificate {
    /// The binding linear inequality, e.g. a partial-sum index.
    Inequality { description: String, slack: f64 },
    /// Eigenvector of the smallest eigenvalue of the LMI slack matrix.
    Eigenvector { vector: Vec<f64> },
    /// An equality or affine constraint that fails.
    AffineResidual { description: String, residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub status: Status,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl MembershipVerdict {
    pub fn new(margin: f64, tol: f64, certificate: Option<Certificate>) -> Self {
        MembershipVerdict {
            status: Status::from_margin(margin, tol),
            margin,
            certificate,
        }
    }

    /// Combines an equality residual with an inequality margin: a residual
    /// above `tol` makes the point Outside with margin `-|residual|`,
    /// otherwise the inequality margin decides.
    pub fn with_equality(
        residual: f64,
        margin: f64,
        tol: f64,
        what: &str,
        certificate: Option<Certificate>,
    ) -> Self {
        if residual.abs() > tol || !residual.is_finite() {
            MembershipVerdict::new(
                -residual.abs(),
                tol,
                Some(Certificate::AffineResidual {
                    description: what.to_string(),
                    residual,
                }),
            )
        } else {
            MembershipVerdict::new(margin, tol, certificate)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_thresholds() {
        assert_eq!(Status::from_margin(1e-3, 1e-6), Status::Inside);
        assert_eq!(Status::from_margin(1e-6, 1e-6), Status::Boundary);
        assert_eq!(Status::from_margin(-1e-6, 1e-6), Status::Boundary);
        assert_eq!(Status::from_margin(-2e-6, 1e-6), Status::Outside);
        assert_eq!(Status::from_margin(f64::NAN, 1e-6), Status::Outside);
    }

    #[test]
    fn equality_residual_dominates() {
        let v = MembershipVerdict::with_equality(0.5, 1.0, 1e-8, "trace", None);
        assert_eq!((v.status, v.margin), (Status::Outside, -0.5));
        let v = MembershipVerdict::with_equality(1e-12, 0.3, 1e-8, "trace", None);
        assert_eq!(v.status, Status::Inside);
    }

    #[test]
    fn json_round_trip() {
        let v = MembershipVerdict::new(
            -0.25,
            1e-8,
            Some(Certificate::Inequality {
                description: "k=1".into(),
                slack: -0.25,
            }),
        );
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.starts_with(r#"{"status":"Outside","margin":-0.25"#));
        assert_eq!(serde_json::from_str::<MembershipVerdict>(&s).unwrap(), v);
    }
}
