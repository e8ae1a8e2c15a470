//! Working precision, truncation thresholds, and quadrature schedule.
//!
//! All numerics in the crate run on [`rug`] multiprecision floats. A
//! [`PrecisionBudget`] fixes the number of working digits, the relative
//! threshold at which infinite q-products are truncated, the node schedule
//! for circle quadrature, and the tolerance that verification suites assert
//! against.

use crate::error::{Error, Result};

/// Multiprecision real scalar.
pub type Real = rug::Float;
/// Multiprecision complex scalar.
pub type Cplx = rug::Complex;

/// Decimal digits to binary precision, with guard bits for intermediate
/// rounding.
fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

/// Precision and tolerance knobs shared by every computation.
#[derive(Debug, Clone)]
pub struct PrecisionBudget {
    working_digits: u32,
    product_eps: f64,
    quad_nodes_initial: usize,
    quad_max_doublings: u32,
    verify_tol: f64,
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        // Identities verified here are exact, so residuals must sit far
        // below quadrature and truncation noise.
        PrecisionBudget {
            working_digits: 60,
            product_eps: 1e-40,
            quad_nodes_initial: 256,
            quad_max_doublings: 6,
            verify_tol: 1e-25,
        }
    }
}

impl PrecisionBudget {
    pub fn new(
        working_digits: u32,
        product_eps: f64,
        quad_nodes_initial: usize,
        quad_max_doublings: u32,
        verify_tol: f64,
    ) -> Result<Self> {
        if working_digits < 30 {
            return Err(Error::InvalidParameters(format!(
                "working_digits must be at least 30, got {working_digits}"
            )));
        }
        if !(product_eps > 0.0 && verify_tol > product_eps) {
            return Err(Error::InvalidParameters(format!(
                "need verify_tol > product_eps > 0, got verify_tol={verify_tol:e}, product_eps={product_eps:e}"
            )));
        }
        if quad_nodes_initial < 4 {
            return Err(Error::InvalidParameters(
                "quad_nodes_initial must be at least 4".into(),
            ));
        }
        Ok(PrecisionBudget {
            working_digits,
            product_eps,
            quad_nodes_initial,
            quad_max_doublings,
            verify_tol,
        })
    }

    /// Same budget with the digit count replaced (used for the large-degree
    /// asymptotics where coefficients grow with n).
    pub fn with_digits(&self, working_digits: u32) -> Result<Self> {
        Self::new(
            working_digits.max(30),
            self.product_eps,
            self.quad_nodes_initial,
            self.quad_max_doublings,
            self.verify_tol,
        )
    }

    pub fn working_digits(&self) -> u32 {
        self.working_digits
    }

    pub fn product_eps(&self) -> f64 {
        self.product_eps
    }

    pub fn quad_nodes_initial(&self) -> usize {
        self.quad_nodes_initial
    }

    pub fn quad_max_doublings(&self) -> u32 {
        self.quad_max_doublings
    }

    pub fn verify_tol(&self) -> f64 {
        self.verify_tol
    }

    /// Binary working precision.
    pub fn prec(&self) -> u32 {
        digits_to_bits(self.working_digits)
    }

    /// Relative threshold below which leading/trailing Laurent coefficients
    /// are treated as cancellation noise.
    pub fn trim_threshold(&self) -> f64 {
        10f64.powi(-(self.working_digits.saturating_sub(10) as i32))
    }

    pub fn real(&self, x: f64) -> Real {
        Real::with_val(self.prec(), x)
    }

    /// Parse a decimal string at working precision.
    pub fn real_from_str(&self, s: &str) -> Result<Real> {
        let parsed = Real::parse(s)
            .map_err(|e| Error::InvalidParameters(format!("cannot parse real {s:?}: {e}")))?;
        Ok(Real::with_val(self.prec(), parsed))
    }

    pub fn cplx(&self, re: f64, im: f64) -> Cplx {
        Cplx::with_val(self.prec(), (re, im))
    }

    pub fn cplx_from_real(&self, re: &Real) -> Cplx {
        Cplx::with_val(self.prec(), re)
    }

    pub fn zero(&self) -> Cplx {
        Cplx::with_val(self.prec(), 0)
    }

    pub fn one(&self) -> Cplx {
        Cplx::with_val(self.prec(), 1)
    }

    pub fn pi(&self) -> Real {
        Real::with_val(self.prec(), rug::float::Constant::Pi)
    }

    /// Unit-circle point e^{i theta}.
    pub fn unit_point(&self, theta: f64) -> Cplx {
        let (sin, cos) = self.real(theta).sin_cos(Real::new(self.prec()));
        Cplx::with_val(self.prec(), (cos, sin))
    }
}

/// |z| as a real scalar.
pub fn cabs(z: &Cplx) -> Real {
    z.real().clone().hypot(z.imag())
}

/// |z| rounded to f64, for reporting.
pub fn cabs_f64(z: &Cplx) -> f64 {
    cabs(z).to_f64()
}

/// z^e for signed integer e.
pub fn cpow_i(z: &Cplx, e: i64) -> Cplx {
    use rug::ops::Pow;
    let prec = z.prec().0;
    if e >= 0 {
        Cplx::with_val(prec, z.pow(e as u32))
    } else {
        let p = Cplx::with_val(prec, z.pow((-e) as u32));
        Cplx::with_val(prec, p.recip())
    }
}

/// x^e for signed integer e.
pub fn rpow_i(x: &Real, e: i64) -> Real {
    use rug::ops::Pow;
    let prec = x.prec();
    if e >= 0 {
        Real::with_val(prec, x.pow(e as u32))
    } else {
        let p = Real::with_val(prec, x.pow((-e) as u32));
        Real::with_val(prec, p.recip())
    }
}
