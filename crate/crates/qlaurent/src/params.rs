//! Parameter tuples (q, t1..t4) and their admissibility checks.

use crate::error::{Error, Result};
use crate::precision::{PrecisionBudget, Real};

/// Margin used when rejecting parameter pairs whose product sits on top of a
/// zero of a weight or norm denominator.
const DEGENERACY_TOL: f64 = 1e-10;

/// The tuple (q, t1, t2, t3, t4).
///
/// A *strict* set satisfies 0 < q < 1 and |t_i| < 1 with no pair product
/// t_i t_j q^k equal to 1, which is what the continuous-weight bilinear forms
/// require. A *relaxed* set only requires q > 0 and finite t_i; it is used
/// for the base-inversion identities (base 1/q > 1) and for the discrete
/// Racah regime where one |t_j| necessarily exceeds 1. Continuous-weight
/// operations reject relaxed sets.
#[derive(Debug, Clone)]
pub struct ParameterSet {
    q: Real,
    t: [Real; 4],
    strict: bool,
}

impl ParameterSet {
    /// Strict constructor from f64 values at the budget's working precision.
    pub fn new(q: f64, t: [f64; 4], budget: &PrecisionBudget) -> Result<Self> {
        Self::from_reals(
            budget.real(q),
            [
                budget.real(t[0]),
                budget.real(t[1]),
                budget.real(t[2]),
                budget.real(t[3]),
            ],
        )
    }

    /// Strict constructor from already-built reals.
    pub fn from_reals(q: Real, t: [Real; 4]) -> Result<Self> {
        let qf = q.to_f64();
        if !(0.0 < qf && qf < 1.0) {
            return Err(Error::InvalidParameters(format!(
                "need 0 < q < 1, got q={qf}"
            )));
        }
        for (i, ti) in t.iter().enumerate() {
            let tf = ti.to_f64();
            if !tf.is_finite() || tf.abs() >= 1.0 {
                return Err(Error::InvalidParameters(format!(
                    "need |t{}| < 1, got {}",
                    i + 1,
                    tf
                )));
            }
        }
        // Norm formulas and the normalization constant divide by
        // (t_i t_j; q)_infinity factors; reject pair products that put a zero
        // inside them. Since |t_i t_j| < 1 and 0 < q < 1, only small k can
        // come near 1.
        for i in 0..4 {
            for j in (i + 1)..4 {
                let mut p = Real::with_val(q.prec(), &t[i] * &t[j]);
                for _ in 0..4 {
                    let gap = p.to_f64() - 1.0;
                    if gap.abs() < DEGENERACY_TOL {
                        return Err(Error::DegenerateParameters(format!(
                            "t{}t{} q^k is within {DEGENERACY_TOL:e} of 1",
                            i + 1,
                            j + 1
                        )));
                    }
                    p *= &q;
                }
            }
        }
        Ok(ParameterSet { q, t, strict: true })
    }

    /// Relaxed constructor: only q > 0 and finite entries are enforced.
    pub fn relaxed(q: Real, t: [Real; 4]) -> Result<Self> {
        let qf = q.to_f64();
        if !(qf > 0.0 && qf.is_finite()) {
            return Err(Error::InvalidParameters(format!("need q > 0, got q={qf}")));
        }
        if t.iter().any(|ti| !ti.to_f64().is_finite()) {
            return Err(Error::InvalidParameters("t entries must be finite".into()));
        }
        Ok(ParameterSet {
            q,
            t,
            strict: false,
        })
    }

    /// Whether the set satisfies the unit-disk constraints required by the
    /// continuous weights.
    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn q(&self) -> &Real {
        &self.q
    }

    /// t_i with 1-based index matching the usual notation.
    pub fn t(&self, i: usize) -> &Real {
        &self.t[i - 1]
    }

    pub fn t1(&self) -> &Real {
        &self.t[0]
    }

    pub fn t2(&self) -> &Real {
        &self.t[1]
    }

    pub fn t3(&self) -> &Real {
        &self.t[2]
    }

    pub fn t4(&self) -> &Real {
        &self.t[3]
    }

    pub fn prec(&self) -> u32 {
        self.q.prec()
    }

    /// t1 t2 t3 t4.
    pub fn t_product(&self) -> Real {
        let mut p = self.t[0].clone();
        p *= &self.t[1];
        p *= &self.t[2];
        p *= &self.t[3];
        p
    }

    /// Same tuple with two t entries swapped (1-based indices).
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut t = self.t.clone();
        t.swap(i - 1, j - 1);
        ParameterSet {
            q: self.q.clone(),
            t,
            strict: self.strict,
        }
    }

    /// Same q with all t entries replaced.
    pub fn with_t(&self, t: [Real; 4]) -> Self {
        ParameterSet {
            q: self.q.clone(),
            t,
            strict: false,
        }
    }

    /// Inverted tuple (1/q, 1/t): relaxed by construction.
    pub fn inverted(&self) -> Result<Self> {
        if self.t.iter().any(|ti| ti.to_f64() == 0.0) {
            return Err(Error::DegenerateParameters(
                "cannot invert a parameter set with a zero t entry".into(),
            ));
        }
        let prec = self.prec();
        let q = Real::with_val(prec, self.q.clone().recip());
        let t = [
            Real::with_val(prec, self.t[0].clone().recip()),
            Real::with_val(prec, self.t[1].clone().recip()),
            Real::with_val(prec, self.t[2].clone().recip()),
            Real::with_val(prec, self.t[3].clone().recip()),
        ];
        Self::relaxed(q, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    #[test]
    fn canonical_set_is_admissible() {
        let p = ParameterSet::new(0.35, [0.4, -0.3, 0.25, -0.15], &budget()).unwrap();
        assert!(p.is_strict());
        assert!((p.t_product().to_f64() - 0.0045).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(ParameterSet::new(1.2, [0.1, 0.1, 0.1, 0.1], &budget()).is_err());
        assert!(ParameterSet::new(0.5, [1.1, 0.1, 0.1, 0.1], &budget()).is_err());
        assert!(ParameterSet::new(
            0.5,
            [0.999_999_999_999, 0.999_999_999_999, 0.1, 0.1],
            &budget()
        )
        .is_err());
    }

    #[test]
    fn zero_t_is_admissible() {
        assert!(ParameterSet::new(0.35, [0.0, 0.0, 0.0, 0.0], &budget()).is_ok());
    }

    #[test]
    fn inversion_is_relaxed() {
        let p = ParameterSet::new(0.35, [0.4, -0.3, 0.25, -0.15], &budget()).unwrap();
        let inv = p.inverted().unwrap();
        assert!(!inv.is_strict());
        assert!((inv.q().to_f64() - 1.0 / 0.35).abs() < 1e-12);
        assert!((inv.t1().to_f64() - 2.5).abs() < 1e-12);
    }
}
