//! Parabolic operators F(D²u): the trace (heat) operator and the τ-family
//!
//! ```text
//!   τ = 0         Σ ln λᵢ
//!   0 < τ < π/4   Σ ln((λᵢ + a − b)/(λᵢ + a + b))
//!   τ = π/4       −Σ 1/(1 + λᵢ)
//!   π/4 < τ < π/2 Σ arctan((λᵢ + a − b)/(λᵢ + a + b))
//!   τ = π/2       Σ arctan λᵢ
//! ```
//!
//! with a = cot τ and b = √|cot²τ − 1|. Every member is a spectral function
//! Σ f(λᵢ) of the Hessian eigenvalues, so values and derivative matrices share
//! one eigendecomposition.

mod eigen;
mod sym;

pub use eigen::{eig_sym, Eigen, CLUSTER_TOL};
pub use sym::{tri, SymMatrix};

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Trace,
    Tau,
}

/// Which closed-form branch of the family is active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    Trace,
    LogDet,
    LogRatio { a: f64, b: f64 },
    Reciprocal,
    ArctanRatio { a: f64, b: f64 },
    Arctan,
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::Trace => "trace",
            Branch::LogDet => "log-det",
            Branch::LogRatio { .. } => "log-ratio",
            Branch::Reciprocal => "reciprocal",
            Branch::ArctanRatio { .. } => "arctan-ratio",
            Branch::Arctan => "arctan",
        }
    }

    /// Strict lower bound on admissible eigenvalues (−∞ when every λ is allowed).
    pub fn lower_bound(&self) -> f64 {
        match *self {
            Branch::Trace | Branch::Arctan => f64::NEG_INFINITY,
            Branch::LogDet => 0.0,
            Branch::LogRatio { a, b } => b - a,
            Branch::Reciprocal => -1.0,
            Branch::ArctanRatio { a, b } => -a - b,
        }
    }

    #[inline]
    pub fn f(&self, l: f64) -> f64 {
        match *self {
            Branch::Trace => l,
            Branch::LogDet => l.ln(),
            Branch::LogRatio { a, b } => ((l + a - b) / (l + a + b)).ln(),
            Branch::Reciprocal => -1.0 / (1.0 + l),
            Branch::ArctanRatio { a, b } => ((l + a - b) / (l + a + b)).atan(),
            Branch::Arctan => l.atan(),
        }
    }

    /// df/dλ. For the arctan-ratio branch the Möbius map collapses to
    /// b / ((λ + a)² + b²).
    #[inline]
    pub fn df(&self, l: f64) -> f64 {
        match *self {
            Branch::Trace => 1.0,
            Branch::LogDet => 1.0 / l,
            Branch::LogRatio { a, b } => 2.0 * b / ((l + a - b) * (l + a + b)),
            Branch::Reciprocal => 1.0 / ((1.0 + l) * (1.0 + l)),
            Branch::ArctanRatio { a, b } => b / ((l + a) * (l + a) + b * b),
            Branch::Arctan => 1.0 / (1.0 + l * l),
        }
    }

    #[inline]
    pub fn admits(&self, l: f64) -> bool {
        l.is_finite() && l > self.lower_bound()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    family: Family,
    tau: f64,
    branch: Branch,
}

impl OperatorSpec {
    pub fn trace() -> Self {
        OperatorSpec {
            family: Family::Trace,
            tau: f64::NAN,
            branch: Branch::Trace,
        }
    }

    /// Member of the τ-family; the endpoints 0, π/4 and π/2 select their
    /// special formulas by exact comparison.
    pub fn tau(tau: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&tau) {
            return Err(Error::config(
                "operator.tau",
                format!("τ must lie in [0, π/2], got {tau}"),
            ));
        }
        let branch = if tau == 0.0 {
            Branch::LogDet
        } else if tau == FRAC_PI_4 {
            Branch::Reciprocal
        } else if tau == FRAC_PI_2 {
            Branch::Arctan
        } else {
            let a = tau.cos() / tau.sin();
            let b = (a * a - 1.0).abs().sqrt();
            if tau < FRAC_PI_4 {
                Branch::LogRatio { a, b }
            } else {
                Branch::ArctanRatio { a, b }
            }
        };
        Ok(OperatorSpec {
            family: Family::Tau,
            tau,
            branch,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// τ in radians; `None` for the trace operator.
    pub fn tau_value(&self) -> Option<f64> {
        (self.family == Family::Tau).then_some(self.tau)
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// `(a, b)` for the two middle branches.
    pub fn coefficients(&self) -> Option<(f64, f64)> {
        match self.branch {
            Branch::LogRatio { a, b } | Branch::ArctanRatio { a, b } => Some((a, b)),
            _ => None,
        }
    }

    pub fn domain_check(&self, eig: &Eigen) -> bool {
        eig.values().iter().all(|&l| self.branch.admits(l))
    }

    fn admissibility(&self, eig: &Eigen, node: Option<usize>) -> Result<()> {
        match eig.values().iter().find(|&&l| !self.branch.admits(l)) {
            None => Ok(()),
            Some(&l) => Err(Error::Admissibility {
                node,
                branch: self.branch.name(),
                value: l,
                bound: self.branch.lower_bound(),
                eigenvalues: eig.values().to_vec(),
            }),
        }
    }

    /// F and the largest eigenvalue of ∂F/∂A from a precomputed spectrum.
    pub fn evaluate(&self, eig: &Eigen, node: Option<usize>) -> Result<(f64, f64)> {
        self.admissibility(eig, node)?;
        let mut value = 0.0;
        let mut slope = f64::NEG_INFINITY;
        for &l in eig.values() {
            value += self.branch.f(l);
            slope = slope.max(self.branch.df(l));
        }
        Ok((value, slope))
    }

    pub fn value(&self, a: &SymMatrix) -> Result<f64> {
        if self.branch == Branch::Trace {
            return Ok(a.trace());
        }
        self.evaluate(&eig_sym(a), None).map(|(v, _)| v)
    }

    /// ∂F/∂A = Q·diag(f′(λᵢ))·Qᵀ.
    pub fn derivative(&self, a: &SymMatrix) -> Result<SymMatrix> {
        if self.branch == Branch::Trace {
            return Ok(SymMatrix::identity(a.dim()));
        }
        let eig = eig_sym(a);
        self.admissibility(&eig, None)?;
        Ok(eig.map(|l| self.branch.df(l)))
    }

    /// Averaged coefficient matrix ∫₀¹ ∂F/∂A(s·A₀ + (1 − s)·A₁) ds of the
    /// linear equation satisfied by the difference of two solutions.
    pub fn frozen_coefficients(&self, a0: &SymMatrix, a1: &SymMatrix) -> Result<SymMatrix> {
        let mut acc = SymMatrix::zeros(a0.dim());
        for (s, w) in GAUSS_LEGENDRE_5 {
            let m = a0.lincomb(s, a1, 1.0 - s);
            acc = acc.add(&self.derivative(&m)?.scale(w));
        }
        Ok(acc)
    }
}

/// Five-point Gauss–Legendre rule on [0, 1] as `(node, weight)`.
#[allow(clippy::excessive_precision)]
pub(crate) const GAUSS_LEGENDRE_5: [(f64, f64); 5] = [
    (0.046_910_077_030_668_0, 0.118_463_442_528_094_5),
    (0.230_765_344_947_158_5, 0.239_314_335_249_683_2),
    (0.5, 0.284_444_444_444_444_4),
    (0.769_234_655_052_841_5, 0.239_314_335_249_683_2),
    (0.953_089_922_969_332_0, 0.118_463_442_528_094_5),
];

/// Parses τ from a decimal or one of the literals `0`, `pi/6`, `pi/4`, `pi/3`, `pi/2`.
pub fn parse_tau(text: &str) -> Result<f64> {
    let t = text.trim();
    let value = match t.replace(' ', "").to_ascii_lowercase().as_str() {
        "0" => 0.0,
        "pi/6" => PI / 6.0,
        "pi/4" => PI / 4.0,
        "pi/3" => PI / 3.0,
        "pi/2" => PI / 2.0,
        other => other.parse::<f64>().map_err(|_| {
            Error::config("operator.tau", format!("cannot parse τ from {t:?}"))
        })?,
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};

    fn spec(tau: f64) -> OperatorSpec {
        OperatorSpec::tau(tau).unwrap()
    }

    fn eig_of(values: &[f64]) -> Eigen {
        eig_sym(&SymMatrix::diagonal(values))
    }

    #[test]
    fn domain_checks_at_branch_edges() {
        assert!(spec(0.0).domain_check(&eig_of(&[0.5, 2.0])));
        assert!(!spec(0.0).domain_check(&eig_of(&[-0.1, 2.0])));
        assert!(spec(FRAC_PI_4).domain_check(&eig_of(&[-0.999])));
        assert!(!spec(FRAC_PI_4).domain_check(&eig_of(&[-1.0])));
        assert!(OperatorSpec::trace().domain_check(&eig_of(&[-1e6])));
        assert!(spec(FRAC_PI_2).domain_check(&eig_of(&[-1e6, 3.0])));
    }

    #[test]
    fn middle_branch_bounds() {
        let s = spec(FRAC_PI_6);
        let (a, b) = s.coefficients().unwrap();
        assert!(a - b > 0.0);
        assert!(s.domain_check(&eig_of(&[b - a + 1e-9])));
        assert!(!s.domain_check(&eig_of(&[b - a])));
        let s = spec(FRAC_PI_3);
        let (a, b) = s.coefficients().unwrap();
        assert!(s.domain_check(&eig_of(&[-a - b + 1e-9])));
        assert!(!s.domain_check(&eig_of(&[-a - b - 1e-9])));
    }

    #[test]
    fn closed_form_values() {
        let i2 = SymMatrix::identity(2);
        assert!((spec(FRAC_PI_2).value(&i2).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(spec(0.0).value(&i2).unwrap(), 0.0);
        assert_eq!(spec(FRAC_PI_4).value(&SymMatrix::zeros(2)).unwrap(), -2.0);
        // high-precision reference ln((1+√3−√2)/(1+√3+√2))
        let v = spec(FRAC_PI_6).value(&SymMatrix::identity(1)).unwrap();
        assert!((v - (-1.146_215_834_780_588_8)).abs() < 1e-14, "{v}");
    }

    #[test]
    fn closed_form_derivatives() {
        let a = SymMatrix::from_rows(&[&[0.3, -2.0], &[-2.0, 5.0]]);
        assert_eq!(OperatorSpec::trace().derivative(&a).unwrap(), SymMatrix::identity(2));
        let d = spec(0.0).derivative(&SymMatrix::diagonal(&[1.0, 2.0])).unwrap();
        assert!(d.sub(&SymMatrix::diagonal(&[1.0, 0.5])).max_abs() < 1e-15);
        let d = spec(FRAC_PI_2).derivative(&SymMatrix::identity(2)).unwrap();
        assert!(d.sub(&SymMatrix::scalar(2, 0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn arctan_ratio_is_shifted_arctan() {
        // arctan((λ+a−b)/(λ+a+b)) = arctan((λ+a)/b) − π/4 on the admissible set
        let s = spec(1.2);
        let (a, b) = s.coefficients().unwrap();
        for l in [-a - b + 0.01, -0.3, 0.0, 1.0, 40.0] {
            let lhs = s.branch().f(l);
            let rhs = ((l + a) / b).atan() - FRAC_PI_4;
            assert!((lhs - rhs).abs() < 1e-13, "{l}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn inadmissible_value_reports_branch() {
        let err = spec(0.0)
            .value(&SymMatrix::diagonal(&[-0.5, 1.0]))
            .unwrap_err();
        match err {
            Error::Admissibility {
                branch,
                value,
                bound,
                ..
            } => {
                assert_eq!(branch, "log-det");
                assert_eq!(value, -0.5);
                assert_eq!(bound, 0.0);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn tau_literals() {
        assert_eq!(parse_tau("pi/3").unwrap(), 1.047_197_551_196_597_6);
        assert_eq!(parse_tau("0").unwrap(), 0.0);
        assert_eq!(parse_tau("pi/2").unwrap(), FRAC_PI_2);
        assert_eq!(parse_tau("0.25").unwrap(), 0.25);
        assert!(parse_tau("tau").is_err());
        assert!(OperatorSpec::tau(2.0).is_err());
    }

    #[test]
    fn frozen_coefficients_of_equal_arguments() {
        let s = spec(FRAC_PI_3);
        let a = SymMatrix::from_rows(&[&[1.0, 0.2], &[0.2, 0.7]]);
        let frozen = s.frozen_coefficients(&a, &a).unwrap();
        assert!(frozen.sub(&s.derivative(&a).unwrap()).max_abs() < 1e-14);
    }
}
