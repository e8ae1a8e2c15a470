//! Dense Laurent polynomials in z with multiprecision complex coefficients.
//!
//! V_n is the span of {z^-n, ..., z^n}; everything built here stays inside
//! some V_n with n below ~40, so a dense coefficient vector over the exponent
//! range is the right representation.

use crate::error::{Error, Result};
use crate::precision::{cabs, cpow_i, Cplx, PrecisionBudget, Real};
use std::str::FromStr;

/// A point z != 0 at which Laurent polynomials are evaluated. Weight
/// integrals use points on the unit circle, z = e^{i theta}.
#[derive(Debug, Clone)]
pub struct EvalPoint {
    z: Cplx,
}

impl EvalPoint {
    pub fn new(z: Cplx) -> Result<Self> {
        if z.real().to_f64() == 0.0 && z.imag().to_f64() == 0.0 {
            return Err(Error::InvalidParameters(
                "evaluation point must be nonzero".into(),
            ));
        }
        Ok(EvalPoint { z })
    }

    /// e^{i theta} at the budget's working precision.
    pub fn on_circle(theta: f64, budget: &PrecisionBudget) -> Self {
        EvalPoint {
            z: budget.unit_point(theta),
        }
    }

    pub fn z(&self) -> &Cplx {
        &self.z
    }
}

/// Laurent polynomial: `coeffs[i]` multiplies z^(min_exp + i).
///
/// Canonical form keeps the leading and trailing stored coefficients nonzero
/// (after noise trimming); the zero polynomial is the empty vector with
/// min_exp = 0.
#[derive(Debug, Clone)]
pub struct LaurentPoly {
    min_exp: i64,
    coeffs: Vec<Cplx>,
    prec: u32,
}

/// Relative noise threshold for a coefficient precision: 10^-(digits - 10)
/// where digits is the decimal equivalent of `prec` minus the guard bits.
fn noise_threshold(prec: u32) -> f64 {
    let digits = ((prec.saturating_sub(32)) as f64 / std::f64::consts::LOG2_10).floor();
    10f64.powf(-(digits - 10.0).max(5.0))
}

impl LaurentPoly {
    pub fn zero(prec: u32) -> Self {
        LaurentPoly {
            min_exp: 0,
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn constant(c: Cplx) -> Self {
        let prec = c.prec().0;
        LaurentPoly {
            min_exp: 0,
            coeffs: vec![c],
            prec,
        }
        .trimmed()
    }

    pub fn one(prec: u32) -> Self {
        Self::constant(Cplx::with_val(prec, 1))
    }

    pub fn monomial(c: Cplx, exp: i64) -> Self {
        let prec = c.prec().0;
        LaurentPoly {
            min_exp: exp,
            coeffs: vec![c],
            prec,
        }
        .trimmed()
    }

    /// Build from a raw coefficient vector; trims noise at the ends.
    pub fn from_coeffs(min_exp: i64, coeffs: Vec<Cplx>, prec: u32) -> Self {
        LaurentPoly {
            min_exp,
            coeffs,
            prec,
        }
        .trimmed()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn max_exp(&self) -> i64 {
        if self.coeffs.is_empty() {
            0
        } else {
            self.min_exp + self.coeffs.len() as i64 - 1
        }
    }

    /// Membership in V_n.
    pub fn in_space(&self, n: i64) -> bool {
        self.is_zero() || (self.min_exp >= -n && self.max_exp() <= n)
    }

    /// Coefficient on z^exp (zero outside the stored range).
    pub fn coeff(&self, exp: i64) -> Cplx {
        let idx = exp - self.min_exp;
        if idx < 0 || idx >= self.coeffs.len() as i64 {
            Cplx::with_val(self.prec, 0)
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    pub fn coeffs(&self) -> &[Cplx] {
        &self.coeffs
    }

    /// Largest coefficient magnitude (zero for the zero polynomial).
    pub fn max_coeff_mag(&self) -> Real {
        let mut m = Real::with_val(self.prec, 0);
        for c in &self.coeffs {
            let a = cabs(c);
            if a > m {
                m = a;
            }
        }
        m
    }

    fn trimmed(mut self) -> Self {
        if self.coeffs.is_empty() {
            self.min_exp = 0;
            return self;
        }
        let thr = {
            let m = self.max_coeff_mag();
            Real::with_val(self.prec, &m * noise_threshold(self.prec))
        };
        let below = |c: &Cplx| cabs(c) <= thr;
        let mut lo = 0usize;
        let mut hi = self.coeffs.len();
        while lo < hi && below(&self.coeffs[lo]) {
            lo += 1;
        }
        while hi > lo && below(&self.coeffs[hi - 1]) {
            hi -= 1;
        }
        if lo == hi {
            return LaurentPoly::zero(self.prec);
        }
        self.min_exp += lo as i64;
        self.coeffs.drain(hi..);
        self.coeffs.drain(..lo);
        self
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| -c.clone()).collect();
        LaurentPoly {
            min_exp: self.min_exp,
            coeffs,
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let prec = self.prec.max(other.prec);
        let min = self.min_exp.min(other.min_exp);
        let max = self.max_exp().max(other.max_exp());
        let len = (max - min + 1) as usize;
        let mut coeffs = vec![Cplx::with_val(prec, 0); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.min_exp - min) as usize + i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[(other.min_exp - min) as usize + i] += c;
        }
        LaurentPoly {
            min_exp: min,
            coeffs,
            prec,
        }
        .trimmed()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Cplx) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * c).collect();
        LaurentPoly {
            min_exp: self.min_exp,
            coeffs,
            prec: self.prec,
        }
        .trimmed()
    }

    pub fn scale_real(&self, c: &Real) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * c).collect();
        LaurentPoly {
            min_exp: self.min_exp,
            coeffs,
            prec: self.prec,
        }
        .trimmed()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero(self.prec.max(other.prec));
        }
        let prec = self.prec.max(other.prec);
        let len = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![Cplx::with_val(prec, 0); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += Cplx::with_val(prec, a * b);
            }
        }
        LaurentPoly {
            min_exp: self.min_exp + other.min_exp,
            coeffs,
            prec,
        }
        .trimmed()
    }

    /// Multiply by z^k.
    pub fn shifted(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPoly {
            min_exp: self.min_exp + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec,
        }
    }

    /// Evaluation at a nonzero point (Horner on the polynomial part, then a
    /// z^min_exp correction).
    pub fn eval(&self, pt: &EvalPoint) -> Cplx {
        self.eval_raw(pt.z())
    }

    pub(crate) fn eval_raw(&self, z: &Cplx) -> Cplx {
        let prec = self.prec.max(z.prec().0);
        if self.coeffs.is_empty() {
            return Cplx::with_val(prec, 0);
        }
        let mut acc = Cplx::with_val(prec, &self.coeffs[self.coeffs.len() - 1]);
        for c in self.coeffs.iter().rev().skip(1) {
            acc *= z;
            acc += c;
        }
        acc * cpow_i(z, self.min_exp)
    }

    /// p(1/z): coefficient on z^e moves to z^-e.
    pub fn sub_inv(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        LaurentPoly {
            min_exp: -self.max_exp(),
            coeffs,
            prec: self.prec,
        }
    }

    /// p(q/z): coefficient on z^e maps to q^e on z^-e.
    pub fn sub_qinv(&self, q: &Real) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.min_exp + i as i64;
            let scale = crate::precision::rpow_i(q, e);
            coeffs.push(c.clone() * scale);
        }
        coeffs.reverse();
        LaurentPoly {
            min_exp: -self.max_exp(),
            coeffs,
            prec: self.prec,
        }
        .trimmed()
    }

    /// p(s z): coefficient on z^e picks up s^e.
    pub fn sub_scale(&self, s: &Real) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.min_exp + i as i64;
            coeffs.push(c.clone() * crate::precision::rpow_i(s, e));
        }
        LaurentPoly {
            min_exp: self.min_exp,
            coeffs,
            prec: self.prec,
        }
        .trimmed()
    }

    /// Exact division: clears negative exponents on both sides, then runs
    /// ordinary long division from the top. The remainder must fall below
    /// `rel_tol` relative to the numerator's coefficient scale; anything
    /// larger is reported as [`Error::InexactDivision`], which the operator
    /// calculus uses as a stability check.
    pub fn divide_exact(&self, denom: &Self, rel_tol: f64) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::InvalidParameters(
                "division by the zero polynomial".into(),
            ));
        }
        let prec = self.prec.max(denom.prec);
        if self.is_zero() {
            return Ok(LaurentPoly::zero(prec));
        }
        let nn = self.coeffs.len();
        let nd = denom.coeffs.len();
        let numer_scale = self.max_coeff_mag();
        if nn < nd {
            let rel = (self.max_coeff_mag() / &numer_scale).to_f64();
            return Err(Error::InexactDivision {
                remainder: rel,
                tol: rel_tol,
            });
        }
        let d_top = denom.coeffs[nd - 1].clone();
        let mut rem: Vec<Cplx> = self
            .coeffs
            .iter()
            .map(|c| Cplx::with_val(prec, c))
            .collect();
        let q_len = nn - nd + 1;
        let mut quot = vec![Cplx::with_val(prec, 0); q_len];
        for i in (0..q_len).rev() {
            let c = Cplx::with_val(prec, &rem[i + nd - 1] / &d_top);
            for (j, d) in denom.coeffs.iter().enumerate() {
                let prod = Cplx::with_val(prec, &c * d);
                rem[i + j] -= prod;
            }
            quot[i] = c;
        }
        let mut rem_norm = Real::with_val(prec, 0);
        for r in &rem {
            let a = cabs(r);
            if a > rem_norm {
                rem_norm = a;
            }
        }
        let rel = if numer_scale.to_f64() == 0.0 {
            0.0
        } else {
            (rem_norm / numer_scale).to_f64()
        };
        if rel > rel_tol {
            return Err(Error::InexactDivision {
                remainder: rel,
                tol: rel_tol,
            });
        }
        Ok(LaurentPoly {
            min_exp: self.min_exp - denom.min_exp,
            coeffs: quot,
            prec,
        }
        .trimmed())
    }

    /// Max-norm of the coefficient difference over the union support.
    pub fn maxnorm_diff(&self, other: &Self) -> Real {
        self.sub(other).max_coeff_mag()
    }

    /// Serialize as {"min_exp", "digits", "coeffs": [[re, im], ...]} with
    /// full-precision decimal coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        let digits =
            ((self.prec.saturating_sub(32)) as f64 / std::f64::consts::LOG2_10).round() as usize;
        let coeffs: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|c| {
                serde_json::Value::Array(vec![
                    real_to_json(c.real(), digits),
                    real_to_json(c.imag(), digits),
                ])
            })
            .collect();
        serde_json::json!({
            "min_exp": self.min_exp,
            "digits": digits,
            "coeffs": coeffs,
        })
    }

    /// Parse the [`to_json`](Self::to_json) format.
    pub fn from_json(v: &serde_json::Value, budget: &PrecisionBudget) -> Result<Self> {
        let bad = |m: &str| Error::InvalidParameters(format!("polynomial JSON: {m}"));
        let min_exp = v
            .get("min_exp")
            .and_then(|x| x.as_i64())
            .ok_or_else(|| bad("missing min_exp"))?;
        let arr = v
            .get("coeffs")
            .and_then(|x| x.as_array())
            .ok_or_else(|| bad("missing coeffs"))?;
        let mut coeffs = Vec::with_capacity(arr.len());
        for pair in arr {
            let pair = pair
                .as_array()
                .ok_or_else(|| bad("coefficient is not a pair"))?;
            if pair.len() != 2 {
                return Err(bad("coefficient is not a pair"));
            }
            let re = json_to_real(&pair[0], budget)?;
            let im = json_to_real(&pair[1], budget)?;
            coeffs.push(Cplx::with_val(budget.prec(), (re, im)));
        }
        Ok(LaurentPoly::from_coeffs(min_exp, coeffs, budget.prec()))
    }
}

fn real_to_json(x: &Real, digits: usize) -> serde_json::Value {
    if x.is_zero() {
        return serde_json::Value::Number(0.into());
    }
    let s = x.to_string_radix(10, Some(digits));
    match serde_json::Number::from_str(&s) {
        Ok(n) => serde_json::Value::Number(n),
        Err(_) => serde_json::Value::String(s),
    }
}

fn json_to_real(v: &serde_json::Value, budget: &PrecisionBudget) -> Result<Real> {
    let s = match v {
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::String(s) => s.clone(),
        _ => {
            return Err(Error::InvalidParameters(
                "coefficient entry must be a number".into(),
            ))
        }
    };
    budget.real_from_str(&s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    fn poly(b: &PrecisionBudget, min_exp: i64, cs: &[f64]) -> LaurentPoly {
        LaurentPoly::from_coeffs(
            min_exp,
            cs.iter().map(|&x| b.cplx(x, 0.0)).collect(),
            b.prec(),
        )
    }

    #[test]
    fn add_zero_is_identity() {
        let b = budget();
        let p = poly(&b, -1, &[2.0, 0.5, -1.0]);
        let z = LaurentPoly::zero(b.prec());
        assert!(p.add(&z).maxnorm_diff(&p).to_f64() == 0.0);
    }

    #[test]
    fn difference_of_squares() {
        // (z + 1/z)(z - 1/z) = z^2 - z^-2
        let b = budget();
        let p = poly(&b, -1, &[1.0, 0.0, 1.0]);
        let q = poly(&b, -1, &[-1.0, 0.0, 1.0]);
        let prod = p.mul(&q);
        let expected = poly(&b, -2, &[-1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(prod.maxnorm_diff(&expected).to_f64() < 1e-55);
    }

    #[test]
    fn eval_monomial() {
        let b = budget();
        let p = LaurentPoly::monomial(b.one(), -3);
        let at = EvalPoint::new(b.cplx(2.0, 0.0)).unwrap();
        assert!((p.eval(&at).real().to_f64() - 0.125).abs() < 1e-16);
        let c = LaurentPoly::constant(b.cplx(4.25, 0.0));
        assert_eq!(c.eval(&at).real().to_f64(), 4.25);
    }

    #[test]
    fn sub_inv_involution_and_symmetry() {
        let b = budget();
        let sym = poly(&b, -1, &[1.0, 0.0, 1.0]); // z + 1/z
        assert!(sym.sub_inv().maxnorm_diff(&sym).to_f64() == 0.0);
        let p = poly(&b, -2, &[3.0, -1.0, 0.0, 2.0, 7.0]);
        assert!(p.sub_inv().sub_inv().maxnorm_diff(&p).to_f64() == 0.0);
    }

    #[test]
    fn sub_qinv_of_z() {
        let b = budget();
        let q = b.real(0.35);
        let z = LaurentPoly::monomial(b.one(), 1);
        let got = z.sub_qinv(&q);
        let expected = LaurentPoly::monomial(b.cplx(0.35, 0.0), -1);
        assert!(got.maxnorm_diff(&expected).to_f64() < 1e-50);
    }

    #[test]
    fn divide_exact_round_trip() {
        let b = budget();
        // (z^2 - q)/(z^2 - q) = 1
        let d = poly(&b, -2, &[-0.35, 0.0, 1.0]);
        let one = d.divide_exact(&d, 1e-30).unwrap();
        assert!(one.maxnorm_diff(&LaurentPoly::one(b.prec())).to_f64() < 1e-50);

        // (z - 1/z)/(1 - 1/z^2) = z
        let num = poly(&b, -1, &[-1.0, 0.0, 1.0]);
        let den = poly(&b, -2, &[-1.0, 0.0, 1.0]);
        let quo = num.divide_exact(&den, 1e-30).unwrap();
        assert!(
            quo.maxnorm_diff(&LaurentPoly::monomial(b.one(), 1))
                .to_f64()
                < 1e-50
        );
    }

    #[test]
    fn divide_inexact_is_detected() {
        let b = budget();
        let num = poly(&b, 0, &[1.0, 1.0]); // 1 + z
        let den = poly(&b, 0, &[-0.25, 0.0, 1.0]); // z^2 - 1/4
        match num.divide_exact(&den, 1e-30) {
            Err(Error::InexactDivision { .. }) => {}
            other => panic!("expected InexactDivision, got {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let b = budget();
        let p = LaurentPoly::from_coeffs(
            -2,
            vec![b.cplx(1.5, -0.25), b.cplx(0.0, 0.125), b.cplx(-3.75, 0.0)],
            b.prec(),
        );
        let v = p.to_json();
        let back = LaurentPoly::from_json(&v, &b).unwrap();
        assert!(p.maxnorm_diff(&back).to_f64() < 1e-45);
        assert_eq!(v["min_exp"], serde_json::json!(-2));
    }

    #[test]
    fn trim_produces_canonical_zero() {
        let b = budget();
        let tiny =
            LaurentPoly::from_coeffs(3, vec![b.cplx(1e-300, 0.0), b.cplx(0.0, 0.0)], b.prec());
        // relative trimming keeps a lone tiny coefficient (it is the max)
        assert!(!tiny.is_zero());
        let z = LaurentPoly::from_coeffs(5, vec![b.cplx(0.0, 0.0); 3], b.prec());
        assert!(z.is_zero());
        assert_eq!(z.min_exp(), 0);
    }

    #[test]
    fn space_membership() {
        let b = budget();
        let p = poly(&b, -3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0]);
        assert!(p.in_space(3));
        assert!(!p.in_space(2));
        assert!(LaurentPoly::zero(b.prec()).in_space(0));
    }
}
