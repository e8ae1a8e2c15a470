//! q-Pochhammer symbols and the circle-weight normalization constant.

use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::precision::{cabs, Cplx, PrecisionBudget, Real};

/// (a; q)_n = prod_{k=0}^{n-1} (1 - a q^k), empty product for n = 0.
pub fn qpoch_finite(a: &Cplx, q: &Real, n: u32) -> Cplx {
    let prec = a.prec().0.max(q.prec());
    let mut acc = Cplx::with_val(prec, 1);
    let mut aq = a.clone();
    for _ in 0..n {
        let factor = Cplx::with_val(prec, 1) - &aq;
        acc *= factor;
        aq *= q;
    }
    acc
}

/// Real-argument variant of [`qpoch_finite`].
pub fn qpoch_finite_real(a: &Real, q: &Real, n: u32) -> Real {
    let prec = a.prec().max(q.prec());
    let mut acc = Real::with_val(prec, 1);
    let mut aq = a.clone();
    for _ in 0..n {
        let factor = Real::with_val(prec, 1) - &aq;
        acc *= factor;
        aq *= q;
    }
    acc
}

/// Number of factors needed so the discarded tail of (a; q)_infinity is below
/// `eps` in relative terms: smallest N with |a| q^N / (1 - q) < eps.
fn truncation_index(a_abs: f64, q: f64, eps: f64) -> u32 {
    if a_abs == 0.0 {
        return 0;
    }
    let bound = eps * (1.0 - q) / a_abs;
    if bound >= 1.0 {
        return 1;
    }
    // log step count; q < 1 so ln(q) < 0
    let n = (bound.ln() / q.ln()).ceil();
    (n.max(1.0) as u32).saturating_add(2)
}

/// (a; q)_infinity truncated once the residual factor bound drops below the
/// budget's `product_eps`. Requires 0 < q < 1.
pub fn qpoch_infinite(a: &Cplx, q: &Real, budget: &PrecisionBudget) -> Cplx {
    let n = truncation_index(cabs(a).to_f64(), q.to_f64(), budget.product_eps());
    qpoch_finite(a, q, n)
}

/// Real-argument variant of [`qpoch_infinite`].
pub fn qpoch_infinite_real(a: &Real, q: &Real, budget: &PrecisionBudget) -> Real {
    let n = truncation_index(a.to_f64().abs(), q.to_f64(), budget.product_eps());
    qpoch_finite_real(a, q, n)
}

/// Product of (a_i; q)_infinity over a list of real arguments.
pub fn qpoch_infinite_prod(args: &[Real], q: &Real, budget: &PrecisionBudget) -> Real {
    let mut acc = Real::with_val(q.prec(), 1);
    for a in args {
        acc *= qpoch_infinite_real(a, q, budget);
    }
    acc
}

/// The normalization constant of the circle weight:
/// mu(t|q) = (t1 t2 t3 t4; q)_inf / prod_{j<k} (t_j t_k; q)_inf.
pub fn aw_mu(params: &ParameterSet, budget: &PrecisionBudget) -> Result<Real> {
    let q = params.q();
    let prec = params.prec();
    let numer = qpoch_infinite_real(&params.t_product(), q, budget);
    let mut denom = Real::with_val(prec, 1);
    for j in 1..=4usize {
        for k in (j + 1)..=4usize {
            let p = Real::with_val(prec, params.t(j) * params.t(k));
            let f = qpoch_infinite_real(&p, q, budget);
            if f.to_f64().abs() < 1e-25 {
                return Err(Error::DegenerateParameters(format!(
                    "(t{j}t{k}; q)_infinity vanishes"
                )));
            }
            denom *= f;
        }
    }
    Ok(numer / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    #[test]
    fn empty_product_is_one() {
        let b = budget();
        let a = b.cplx(0.7, 0.1);
        let q = b.real(0.5);
        let v = qpoch_finite(&a, &q, 0);
        assert_eq!(v.real().to_f64(), 1.0);
        assert_eq!(v.imag().to_f64(), 0.0);
    }

    #[test]
    fn three_factor_product() {
        // (0.3; 0.5)_3 = 0.7 * 0.85 * 0.925 = 0.550375
        let b = budget();
        let a = b.real(0.3);
        let q = b.real(0.5);
        let v = qpoch_finite(&b.cplx(0.3, 0.0), &q, 3);
        // direct three-factor oracle on the same inputs
        let one = b.real(1.0);
        let f1 = one.clone() - &a;
        let f2 = one.clone() - Real::with_val(b.prec(), &a * &q);
        let f3 = one - Real::with_val(b.prec(), &a * &q) * &q;
        let oracle = f1 * f2 * f3;
        let diff = (v.real().clone() - &oracle).abs();
        assert!(diff.to_f64() < 1e-55);
        assert!((v.real().to_f64() - 0.550375).abs() < 1e-15);
    }

    #[test]
    fn unit_argument_vanishes() {
        let b = budget();
        let v = qpoch_finite(&b.one(), &b.real(0.35), 4);
        assert_eq!(cabs(&v).to_f64(), 0.0);
    }

    #[test]
    fn infinite_product_of_zero_argument() {
        let b = budget();
        let v = qpoch_infinite(&b.zero(), &b.real(0.35), &b);
        assert_eq!(v.real().to_f64(), 1.0);
    }

    #[test]
    fn euler_product_half() {
        // Long-product oracle for (1/2; 1/2)_infinity, frozen from a direct
        // 250-factor evaluation.
        let b = budget();
        let q = b.real(0.5);
        let oracle = qpoch_finite_real(&b.real(0.5), &q, 250);
        let v = qpoch_infinite_real(&b.real(0.5), &q, &b);
        let rel = ((v.clone() - &oracle) / &oracle).abs();
        assert!(rel.to_f64() < 1e-39, "rel error {:e}", rel.to_f64());
        assert!((v.to_f64() - 0.2887880950866).abs() < 1e-12);
    }

    #[test]
    fn splitting_identity() {
        // (a;q)_{m+n} = (a;q)_m (a q^m; q)_n
        let b = budget();
        let q = b.real(0.35);
        let a = b.cplx(0.8, -0.45);
        for (m, n) in [(0u32, 5u32), (3, 4), (7, 2), (10, 10)] {
            let lhs = qpoch_finite(&a, &q, m + n);
            let aqm = a.clone() * crate::precision::rpow_i(&q, m as i64);
            let rhs = qpoch_finite(&a, &q, m) * qpoch_finite(&aqm, &q, n);
            let diff = cabs(&(lhs - rhs));
            assert!(diff.to_f64() < 1e-50);
        }
    }

    #[test]
    fn infinite_splitting_identity() {
        // (a;q)_inf = (a;q)_n (a q^n; q)_inf to product_eps relative.
        let b = budget();
        let q = b.real(0.35);
        let a = b.cplx(-0.62, 0.31);
        for n in [1u32, 4, 10] {
            let lhs = qpoch_infinite(&a, &q, &b);
            let aqn = a.clone() * crate::precision::rpow_i(&q, n as i64);
            let rhs = qpoch_finite(&a, &q, n) * qpoch_infinite(&aqn, &q, &b);
            let rel = cabs(&(lhs.clone() - rhs)) / cabs(&lhs);
            assert!(rel.to_f64() < 1e-39);
        }
    }

    #[test]
    fn mu_trivial_and_symmetric() {
        let b = budget();
        let p0 = ParameterSet::new(0.35, [0.0, 0.0, 0.0, 0.0], &b).unwrap();
        assert!((aw_mu(&p0, &b).unwrap().to_f64() - 1.0).abs() < 1e-50);

        let p = ParameterSet::new(0.35, [0.4, -0.3, 0.25, -0.15], &b).unwrap();
        let m = aw_mu(&p, &b).unwrap();
        // invariant under permutations of (t1..t4)
        for (i, j) in [(1usize, 2usize), (1, 3), (2, 4), (3, 4)] {
            let ms = aw_mu(&p.swapped(i, j), &b).unwrap();
            let rel = ((m.clone() - &ms) / &m).abs();
            assert!(rel.to_f64() < 1e-45);
        }
    }

    #[test]
    fn mu_precision_refinement() {
        // Doubling digits and halving product_eps moves mu by less than the
        // prior truncation error bound.
        let coarse = PrecisionBudget::new(30, 1e-20, 256, 6, 1e-12).unwrap();
        let fine = PrecisionBudget::new(60, 5e-21, 256, 6, 1e-12).unwrap();
        let pc = ParameterSet::new(0.35, [0.4, -0.3, 0.25, -0.15], &coarse).unwrap();
        let pf = ParameterSet::new(0.35, [0.4, -0.3, 0.25, -0.15], &fine).unwrap();
        let mc = aw_mu(&pc, &coarse).unwrap();
        let mf = aw_mu(&pf, &fine).unwrap();
        let rel = ((mc - &mf) / &mf).abs().to_f64();
        // ten infinite products, each truncated at 1e-20 relative
        assert!(rel < 10.0 * 1e-20, "rel change {rel:e}");
    }
}
