//! Property tests for the arithmetic substrate: q-Pochhammer splitting,
//! Laurent ring axioms, evaluation homomorphisms, and the substitution
//! involution.

use proptest::prelude::*;
use qlaurent::laurent::{EvalPoint, LaurentPoly};
use qlaurent::precision::{cabs, Cplx, PrecisionBudget, Real};
use qlaurent::qcore::{qpoch_finite, qpoch_infinite};

fn budget() -> PrecisionBudget {
    PrecisionBudget::default()
}

fn poly_from(coeffs: &[(f64, f64)], min_exp: i64, b: &PrecisionBudget) -> LaurentPoly {
    LaurentPoly::from_coeffs(
        min_exp,
        coeffs.iter().map(|&(re, im)| b.cplx(re, im)).collect(),
        b.prec(),
    )
}

fn coeff_strategy(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), len..=len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn qpoch_splits_multiplicatively(
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
        q in 0.1f64..0.9,
        m in 0u32..20,
        n in 0u32..20,
    ) {
        let b = budget();
        let a = b.cplx(re, im);
        let qr = b.real(q);
        let lhs = qpoch_finite(&a, &qr, m + n);
        let shifted = a.clone() * qlaurent::precision::rpow_i(&qr, m as i64);
        let rhs = qpoch_finite(&a, &qr, m) * qpoch_finite(&shifted, &qr, n);
        prop_assert!(cabs(&(lhs - rhs)).to_f64() < 1e-45);
    }

    #[test]
    fn qpoch_infinite_splits(
        re in -1.5f64..1.5,
        im in -1.5f64..1.5,
        q in 0.1f64..0.7,
        n in 0u32..10,
    ) {
        let b = budget();
        let a = b.cplx(re, im);
        let qr = b.real(q);
        let lhs = qpoch_infinite(&a, &qr, &b);
        let shifted = a.clone() * qlaurent::precision::rpow_i(&qr, n as i64);
        let rhs = qpoch_finite(&a, &qr, n) * qpoch_infinite(&shifted, &qr, &b);
        let scale = cabs(&lhs).to_f64().max(1e-3);
        prop_assert!(cabs(&(lhs - rhs)).to_f64() / scale < 1e-38);
    }

    #[test]
    fn ring_axioms_on_v6(
        a in coeff_strategy(13),
        bb in coeff_strategy(13),
        c in coeff_strategy(13),
    ) {
        let b = budget();
        let p = poly_from(&a, -6, &b);
        let q = poly_from(&bb, -6, &b);
        let r = poly_from(&c, -6, &b);
        // associativity
        let lhs = p.mul(&q).mul(&r);
        let rhs = p.mul(&q.mul(&r));
        prop_assert!(lhs.maxnorm_diff(&rhs).to_f64() < 1e-45);
        // distributivity
        let lhs = p.mul(&q.add(&r));
        let rhs = p.mul(&q).add(&p.mul(&r));
        prop_assert!(lhs.maxnorm_diff(&rhs).to_f64() < 1e-45);
        // commutativity
        prop_assert!(p.mul(&q).maxnorm_diff(&q.mul(&p)).to_f64() < 1e-45);
    }

    #[test]
    fn product_evaluation_is_pointwise(
        a in coeff_strategy(11),
        bb in coeff_strategy(11),
        theta in 0.01f64..6.2,
    ) {
        let b = budget();
        let p = poly_from(&a, -5, &b);
        let q = poly_from(&bb, -5, &b);
        let z = EvalPoint::on_circle(theta, &b);
        let lhs = p.mul(&q).eval(&z);
        let rhs = p.eval(&z) * q.eval(&z);
        prop_assert!(cabs(&(lhs - rhs)).to_f64() < 1e-40);
    }

    #[test]
    fn substitution_inverts_argument(
        a in coeff_strategy(9),
        re in 0.3f64..2.0,
        im in -1.0f64..1.0,
    ) {
        let b = budget();
        let p = poly_from(&a, -4, &b);
        let z = b.cplx(re, im);
        let zinv = Cplx::with_val(b.prec(), z.clone().recip());
        let lhs = p.sub_inv().eval(&EvalPoint::new(z).unwrap());
        let rhs = p.eval(&EvalPoint::new(zinv).unwrap());
        prop_assert!(cabs(&(lhs - rhs)).to_f64() < 1e-38);
        // involution
        prop_assert!(p.sub_inv().sub_inv().maxnorm_diff(&p).to_f64() == 0.0);
    }

    #[test]
    fn degree_spaces_close_under_products(
        a in coeff_strategy(7),
        bb in coeff_strategy(9),
    ) {
        let b = budget();
        let p = poly_from(&a, -3, &b);
        let q = poly_from(&bb, -4, &b);
        prop_assert!(p.in_space(3));
        prop_assert!(q.in_space(4));
        prop_assert!(p.mul(&q).in_space(7));
    }

    #[test]
    fn multiply_then_divide_round_trips(
        a in coeff_strategy(9),
        d in coeff_strategy(3),
    ) {
        let b = budget();
        let p = poly_from(&a, -4, &b);
        let den = poly_from(&d, -2, &b);
        prop_assume!(!den.is_zero());
        prop_assume!(!p.is_zero());
        // keep the division well conditioned: top coefficient not tiny
        let top = den.coeffs().last().unwrap();
        prop_assume!(cabs(top).to_f64() > 0.2 * den.max_coeff_mag().to_f64());
        let prod = p.mul(&den);
        let back = prod.divide_exact(&den, 1e-30).unwrap();
        let scale = p.max_coeff_mag().to_f64().max(1e-6);
        prop_assert!(back.maxnorm_diff(&p).to_f64() / scale < 1e-40);
    }

    #[test]
    fn scalar_evaluation_is_linear(
        a in coeff_strategy(9),
        bb in coeff_strategy(9),
        s_re in -2.0f64..2.0,
        theta in 0.01f64..6.2,
    ) {
        let b = budget();
        let p = poly_from(&a, -4, &b);
        let q = poly_from(&bb, -4, &b);
        let s = b.cplx(s_re, 0.25);
        let z = EvalPoint::on_circle(theta, &b);
        let lhs = p.scale(&s).add(&q).eval(&z);
        let rhs = p.eval(&z) * &s + q.eval(&z);
        prop_assert!(cabs(&(lhs - rhs)).to_f64() < 1e-40);
    }
}

#[test]
fn sub_qinv_matches_pointwise_substitution() {
    let b = budget();
    let q = b.real(0.35);
    let p = LaurentPoly::from_coeffs(
        -3,
        (0..7)
            .map(|i| b.cplx(0.3 * i as f64 - 1.0, 0.1 * i as f64))
            .collect(),
        b.prec(),
    );
    for theta in [0.4, 1.9, 4.4] {
        let z = b.unit_point(theta);
        let qz_inv = Cplx::with_val(b.prec(), z.clone().recip()) * &q;
        let lhs = p.sub_qinv(&q).eval_at(&z);
        let rhs = p.eval_at(&qz_inv);
        assert!(cabs(&(lhs - rhs)).to_f64() < 1e-45);
    }
}

trait EvalAt {
    fn eval_at(&self, z: &Cplx) -> Cplx;
}

impl EvalAt for LaurentPoly {
    fn eval_at(&self, z: &Cplx) -> Cplx {
        self.eval(&EvalPoint::new(z.clone()).unwrap())
    }
}

#[test]
fn real_parameter_weights_are_conjugate_symmetric() {
    // pointwise conjugate symmetry of both weights for real parameters
    let b = budget();
    let p = qlaurent::params::ParameterSet::new(0.35, [0.4, -0.3, 0.25, -0.15], &b).unwrap();
    for theta in [0.3, 1.2, 2.8] {
        let z = b.unit_point(theta);
        let zbar = b.unit_point(-theta);
        for f in [qlaurent::forms::weight_aw, qlaurent::forms::weight_cher] {
            let w = f(&z, &p, &b).unwrap();
            let wbar = f(&zbar, &p, &b).unwrap();
            let conj = Cplx::with_val(b.prec(), w.conj_ref());
            assert!(cabs(&(conj - wbar)).to_f64() < 1e-45);
        }
    }
    let _: Real = b.real(0.0);
}
