//! Terminating basic hypergeometric series and the classical identities the
//! verification suites rely on: the balanced-series transformation of Sears,
//! the q-Pfaff-Saalschutz summation, Wilson's contiguous relations, and the
//! very-well-poised 6-phi-5 evaluation.

use crate::error::{Error, Result};
use crate::precision::{cabs, Cplx, PrecisionBudget, Real};
use crate::qcore::{qpoch_finite_real, qpoch_infinite_real};

/// Absolute threshold below which a denominator factor 1 - x counts as a
/// pole.
const POLE_TOL: f64 = 1e-20;
/// Relative tolerance for the balance check q * prod(upper) = prod(lower).
const BALANCE_TOL: f64 = 1e-30;

/// Parameter block of a terminating series: the upper parameter q^-n is
/// implicit in `n`; `numerators` holds the remaining upper parameters.
#[derive(Debug, Clone)]
pub struct PhiSpec {
    pub n: u32,
    pub numerators: Vec<Cplx>,
    pub denominators: Vec<Cplx>,
    pub q: Real,
    pub argument: Cplx,
}

impl PhiSpec {
    pub fn new(
        n: u32,
        numerators: Vec<Cplx>,
        denominators: Vec<Cplx>,
        q: Real,
        argument: Cplx,
    ) -> Self {
        PhiSpec {
            n,
            numerators,
            denominators,
            q,
            argument,
        }
    }

    /// Balanced series with argument q: the last denominator parameter is
    /// derived from the others so the balance holds exactly at working
    /// precision.
    pub fn balanced(n: u32, numerators: Vec<Cplx>, denominators_head: Vec<Cplx>, q: Real) -> Self {
        let prec = q.prec();
        let mut prod_num = Cplx::with_val(prec, crate::precision::rpow_i(&q, -(n as i64)));
        for a in &numerators {
            prod_num *= a;
        }
        prod_num *= &q;
        let mut last = prod_num;
        for d in &denominators_head {
            last /= d;
        }
        let mut denominators = denominators_head;
        denominators.push(last);
        let argument = Cplx::with_val(prec, &q);
        PhiSpec {
            n,
            numerators,
            denominators,
            q,
            argument,
        }
    }

    fn prec(&self) -> u32 {
        self.q.prec()
    }

    /// q * q^-n * prod(numerators) versus prod(denominators), and
    /// argument = q, both to relative tolerance.
    pub fn is_balanced(&self) -> bool {
        let prec = self.prec();
        let mut lhs = Cplx::with_val(prec, crate::precision::rpow_i(&self.q, 1 - self.n as i64));
        for a in &self.numerators {
            lhs *= a;
        }
        let mut rhs = Cplx::with_val(prec, 1);
        for d in &self.denominators {
            rhs *= d;
        }
        let scale = cabs(&rhs).to_f64().max(1e-30);
        let balanced = cabs(&(lhs - rhs)).to_f64() / scale < BALANCE_TOL;
        let arg_is_q = {
            let qd = Cplx::with_val(prec, &self.q);
            cabs(&(self.argument.clone() - qd)).to_f64() < BALANCE_TOL
        };
        balanced && arg_is_q
    }

    fn check_balanced(&self) -> Result<()> {
        if self.is_balanced() {
            Ok(())
        } else {
            Err(Error::BalanceViolation(
                "series is not balanced with argument q".into(),
            ))
        }
    }
}

/// Smallest m such that some entry equals q^-m (within 1e-25 relative), if
/// any. This is the index at which the series terminates.
fn detect_termination(uppers: &[Cplx], q: &Real) -> Option<u32> {
    let mut best: Option<u32> = None;
    for u in uppers {
        if u.imag().to_f64().abs() > 1e-25 * (1.0 + u.real().to_f64().abs()) {
            continue;
        }
        let mut uq = u.real().clone();
        for m in 0..=256u32 {
            let gap = (uq.to_f64() - 1.0).abs();
            if gap < 1e-25 {
                best = Some(match best {
                    Some(b) => b.min(m),
                    None => m,
                });
                break;
            }
            if uq.to_f64().abs() < 0.5 {
                break; // q^m u is shrinking away from 1
            }
            uq *= q;
        }
    }
    best
}

/// Sum a terminating series given the full upper parameter list. Terms are
/// updated through the term ratio, never by recomputing Pochhammers.
fn sum_terminating(
    uppers: &[Cplx],
    lowers: &[Cplx],
    q: &Real,
    argument: &Cplx,
    order: u32,
) -> Result<Cplx> {
    let prec = q.prec();
    let one = Cplx::with_val(prec, 1);
    let mut total = Cplx::with_val(prec, 1);
    let mut term = Cplx::with_val(prec, 1);
    let mut qj = Real::with_val(prec, 1); // q^j
    for j in 0..order {
        let mut ratio = argument.clone();
        for a in uppers {
            let f = one.clone() - Cplx::with_val(prec, a * &qj);
            ratio *= f;
        }
        // implicit (q; q)_{j+1} factor
        let qnext = Real::with_val(prec, &qj * q);
        let f = one.clone() - Cplx::with_val(prec, &qnext);
        if cabs(&f).to_f64() < POLE_TOL {
            return Err(Error::PoleInSeries(format!("q^{}", j + 1)));
        }
        ratio /= f;
        for b in lowers {
            let f = one.clone() - Cplx::with_val(prec, b * &qj);
            if cabs(&f).to_f64() < POLE_TOL {
                return Err(Error::PoleInSeries(format!(
                    "denominator parameter at q^{j}"
                )));
            }
            ratio /= f;
        }
        term *= ratio;
        total += &term;
        qj = qnext;
    }
    Ok(total)
}

/// Direct forward summation of a terminating series.
pub fn phi_terminating(spec: &PhiSpec) -> Result<Cplx> {
    let prec = spec.prec();
    let mut uppers = Vec::with_capacity(spec.numerators.len() + 1);
    uppers.push(Cplx::with_val(
        prec,
        crate::precision::rpow_i(&spec.q, -(spec.n as i64)),
    ));
    uppers.extend(spec.numerators.iter().cloned());
    sum_terminating(&uppers, &spec.denominators, &spec.q, &spec.argument, spec.n)
}

/// Closed product form of a balanced terminating 3-phi-2 with argument q
/// and upper parameters {q^-n, a, b}, lower parameters {c, d}:
/// (c/a; q)_n (c/b; q)_n / ((c; q)_n (c/(ab); q)_n).
pub fn pfaff_saalschutz_closed(spec: &PhiSpec) -> Result<Cplx> {
    if spec.numerators.len() != 2 || spec.denominators.len() != 2 {
        return Err(Error::InvalidParameters(
            "expected a 3-phi-2 (two explicit numerator and denominator parameters)".into(),
        ));
    }
    spec.check_balanced()?;
    let prec = spec.prec();
    let a = &spec.numerators[0];
    let b = &spec.numerators[1];
    let c = &spec.denominators[0];
    for (label, x) in [("a", a), ("b", b)] {
        if cabs(x).to_f64() < 1e-30 {
            return Err(Error::DegenerateParameters(format!(
                "numerator parameter {label} is zero"
            )));
        }
    }
    let ca = Cplx::with_val(prec, c / a);
    let cb = Cplx::with_val(prec, c / b);
    let cab = Cplx::with_val(prec, &ca / b);
    let numer = qpoch_c(&ca, &spec.q, spec.n) * qpoch_c(&cb, &spec.q, spec.n);
    let denom = qpoch_c(c, &spec.q, spec.n) * qpoch_c(&cab, &spec.q, spec.n);
    if cabs(&denom).to_f64() < 1e-30 {
        return Err(Error::DegenerateParameters(
            "closed-form denominator vanishes".into(),
        ));
    }
    Ok(numer / denom)
}

fn qpoch_c(a: &Cplx, q: &Real, n: u32) -> Cplx {
    crate::qcore::qpoch_finite(a, q, n)
}

/// The balanced-series transformation: for a terminating balanced 4-phi-3
/// with upper parameters {q^-n, A, B, C} and lower {D, E, F} (so that
/// DEF = ABC q^{1-n}),
///
/// phi = (E/A, F/A; q)_n A^n / (E, F; q)_n * phi~
///
/// where phi~ has upper {q^-n, A, D/B, D/C} and lower {D, A q^{1-n}/E,
/// A q^{1-n}/F}. `pivot` selects which numerator plays A, `d_index` which
/// denominator plays D.
pub fn sears_transform_with(
    spec: &PhiSpec,
    pivot: usize,
    d_index: usize,
) -> Result<(Cplx, PhiSpec)> {
    if spec.numerators.len() != 3 || spec.denominators.len() != 3 {
        return Err(Error::InvalidParameters(
            "expected a 4-phi-3 (three explicit numerator and denominator parameters)".into(),
        ));
    }
    if pivot > 2 || d_index > 2 {
        return Err(Error::InvalidParameters(
            "pivot/d_index out of range".into(),
        ));
    }
    spec.check_balanced()?;
    let prec = spec.prec();
    let a = spec.numerators[pivot].clone();
    let mut rest_num: Vec<Cplx> = Vec::new();
    for (i, x) in spec.numerators.iter().enumerate() {
        if i != pivot {
            rest_num.push(x.clone());
        }
    }
    let (big_b, big_c) = (rest_num[0].clone(), rest_num[1].clone());
    let d = spec.denominators[d_index].clone();
    let mut rest_den: Vec<Cplx> = Vec::new();
    for (i, x) in spec.denominators.iter().enumerate() {
        if i != d_index {
            rest_den.push(x.clone());
        }
    }
    let (e, f) = (rest_den[0].clone(), rest_den[1].clone());
    if cabs(&a).to_f64() < 1e-30 || cabs(&big_b).to_f64() < 1e-30 || cabs(&big_c).to_f64() < 1e-30 {
        return Err(Error::DegenerateParameters(
            "transformation pivot parameters must be nonzero".into(),
        ));
    }
    let ea = Cplx::with_val(prec, &e / &a);
    let fa = Cplx::with_val(prec, &f / &a);
    let mut prefactor = qpoch_c(&ea, &spec.q, spec.n) * qpoch_c(&fa, &spec.q, spec.n);
    let denom = qpoch_c(&e, &spec.q, spec.n) * qpoch_c(&f, &spec.q, spec.n);
    if cabs(&denom).to_f64() < 1e-30 {
        return Err(Error::DegenerateParameters(
            "prefactor denominator vanishes".into(),
        ));
    }
    prefactor /= denom;
    prefactor *= crate::precision::cpow_i(&a, spec.n as i64);

    let aq1n = Cplx::with_val(
        prec,
        &a * crate::precision::rpow_i(&spec.q, 1 - spec.n as i64),
    );
    let transformed = PhiSpec::new(
        spec.n,
        vec![
            a.clone(),
            Cplx::with_val(prec, &d / &big_b),
            Cplx::with_val(prec, &d / &big_c),
        ],
        vec![
            d.clone(),
            Cplx::with_val(prec, &aq1n / &e),
            Cplx::with_val(prec, &aq1n / &f),
        ],
        spec.q.clone(),
        spec.argument.clone(),
    );
    Ok((prefactor, transformed))
}

/// [`sears_transform_with`] using the first numerator and denominator slots.
pub fn sears_transform(spec: &PhiSpec) -> Result<(Cplx, PhiSpec)> {
    sears_transform_with(spec, 0, 0)
}

fn phi4_value(uppers: [Cplx; 4], lowers: [Cplx; 3], q: &Real) -> Result<Cplx> {
    let order = detect_termination(&uppers, q).ok_or(Error::NonTerminating)?;
    let arg = Cplx::with_val(q.prec(), q);
    sum_terminating(&uppers, &lowers, q, &arg, order)
}

fn is_negligible(c: &Cplx) -> bool {
    cabs(c).to_f64() < 1e-28
}

/// Residuals of the two contiguous relations for a terminating balanced
/// phi(a, b, c, d; e, f, g):
///
/// first:  phi(a+, e+) - phi - q(a-e)(1-b)(1-c)(1-d) /
///         ((1-e)(1-eq)(1-f)(1-g)) * phi_plus(e+)
/// second: a(1-f/a)(1-g/a) / ((1-f)(1-g)) * phi_plus(a-)
///         + (b-e)(1-c/e) / ((1-b)(1-c)) * phi(d+, e+)
///         - (1-e)(1-bc/e) / ((1-b)(1-c)) * phi
///
/// where phi_plus scales every parameter by q. Coefficients that vanish
/// suppress the evaluation of their series (those series may no longer
/// terminate).
#[allow(clippy::too_many_arguments)]
pub fn contiguous_residuals(
    a: &Cplx,
    b: &Cplx,
    c: &Cplx,
    d: &Cplx,
    e: &Cplx,
    f: &Cplx,
    g: &Cplx,
    q: &Real,
) -> Result<(Cplx, Cplx)> {
    let prec = q.prec();
    let one = Cplx::with_val(prec, 1);
    let qc = Cplx::with_val(prec, q);
    let mul_q = |x: &Cplx| Cplx::with_val(prec, x * q);

    // termination at order zero: every series in both relations collapses to
    // 1 and the singular coefficient pairs cancel, so the residuals are zero
    // identically
    if detect_termination(&[a.clone(), b.clone(), c.clone(), d.clone()], q) == Some(0) {
        return Ok((Cplx::with_val(prec, 0), Cplx::with_val(prec, 0)));
    }

    let phi = phi4_value(
        [a.clone(), b.clone(), c.clone(), d.clone()],
        [e.clone(), f.clone(), g.clone()],
        q,
    )?;

    // first relation
    let coeff1 = {
        let num = qc.clone()
            * (a.clone() - e)
            * (one.clone() - b)
            * (one.clone() - c)
            * (one.clone() - d);
        let den =
            (one.clone() - e) * (one.clone() - mul_q(e)) * (one.clone() - f) * (one.clone() - g);
        if cabs(&den).to_f64() < POLE_TOL {
            return Err(Error::DegenerateParameters(
                "contiguous coefficient denominator vanishes".into(),
            ));
        }
        num / den
    };
    let lhs1 = phi4_value(
        [mul_q(a), b.clone(), c.clone(), d.clone()],
        [mul_q(e), f.clone(), g.clone()],
        q,
    )? - &phi;
    let rhs1 = if is_negligible(&coeff1) {
        Cplx::with_val(prec, 0)
    } else {
        let phi_plus_eplus = phi4_value(
            [mul_q(a), mul_q(b), mul_q(c), mul_q(d)],
            [
                Cplx::with_val(prec, e * Real::with_val(prec, q * q)),
                mul_q(f),
                mul_q(g),
            ],
            q,
        )?;
        coeff1 * phi_plus_eplus
    };
    let res1 = lhs1 - rhs1;

    // second relation
    let coeff_a = {
        // a (1 - f/a)(1 - g/a) = (a - f)(a - g)/a
        if cabs(a).to_f64() < 1e-28 {
            return Err(Error::DegenerateParameters(
                "parameter a must be nonzero".into(),
            ));
        }
        let num = (a.clone() - f) * (a.clone() - g);
        let den = a.clone() * (one.clone() - f) * (one.clone() - g);
        num / den
    };
    let coeff_b = {
        let num = (b.clone() - e) * (one.clone() - Cplx::with_val(prec, c / e));
        let den = (one.clone() - b) * (one.clone() - c);
        if cabs(&den).to_f64() < POLE_TOL {
            return Err(Error::DegenerateParameters(
                "contiguous coefficient denominator vanishes".into(),
            ));
        }
        num / den
    };
    let coeff_rhs = {
        let bce = Cplx::with_val(prec, b * c) / e;
        let num = (one.clone() - e) * (one.clone() - bce);
        let den = (one.clone() - b) * (one.clone() - c);
        num / den
    };
    let term_a = if is_negligible(&coeff_a) {
        Cplx::with_val(prec, 0)
    } else {
        let phi_plus_aminus = phi4_value(
            [a.clone(), mul_q(b), mul_q(c), mul_q(d)],
            [mul_q(e), mul_q(f), mul_q(g)],
            q,
        )?;
        coeff_a * phi_plus_aminus
    };
    let term_b = if is_negligible(&coeff_b) {
        Cplx::with_val(prec, 0)
    } else {
        let phi_dplus_eplus = phi4_value(
            [a.clone(), b.clone(), c.clone(), mul_q(d)],
            [mul_q(e), f.clone(), g.clone()],
            q,
        )?;
        coeff_b * phi_dplus_eplus
    };
    let res2 = term_a + term_b - coeff_rhs * phi;

    Ok((res1, res2))
}

/// Both sides and the two-part split of the very-well-poised terminating
/// 6-phi-5 evaluation used to define the discrete bilinear form.
#[derive(Debug, Clone)]
pub struct Vwp65Outcome {
    /// The (N+1)-term very-well-poised sum.
    pub sum: Cplx,
    /// The closed infinite-product evaluation.
    pub closed: Cplx,
    /// The same sum split into two plain hypergeometric-style sums.
    pub split: Cplx,
}

/// Evaluate the very-well-poised sum, its closed product form, and its
/// two-sum split for parameters with t1 t_j = q^-N arranged by the caller.
pub fn vwp65_check(
    q: &Real,
    t: &[Real; 4],
    n_trunc: u32,
    budget: &PrecisionBudget,
) -> Result<Vwp65Outcome> {
    let prec = q.prec();
    let one = Real::with_val(prec, 1);
    let t1 = &t[0];
    let t1sq = Real::with_val(prec, t1 * t1);
    let sigma = {
        let mut p = t[0].clone();
        p *= &t[1];
        p *= &t[2];
        p *= &t[3];
        p
    };
    if sigma.to_f64().abs() < 1e-28 {
        return Err(Error::DegenerateParameters(
            "t1 t2 t3 t4 must be nonzero".into(),
        ));
    }
    let arg = Real::with_val(prec, q / &sigma);

    let pair = |x: &Real, y: &Real| Real::with_val(prec, x * y);
    let upper = [
        t1sq.clone(),
        pair(t1, &t[1]),
        pair(t1, &t[2]),
        pair(t1, &t[3]),
    ];
    let lower = [
        q.clone(),
        Real::with_val(prec, Real::with_val(prec, q * t1) / &t[1]),
        Real::with_val(prec, Real::with_val(prec, q * t1) / &t[2]),
        Real::with_val(prec, Real::with_val(prec, q * t1) / &t[3]),
    ];

    // running Pochhammers
    let mut sum = Real::with_val(prec, 0);
    let mut term_poch = Real::with_val(prec, 1); // ratio of Pochhammer products
    let mut argk = Real::with_val(prec, 1);
    let mut qk = Real::with_val(prec, 1);
    let denom_one_minus = |x: &Real| -> Result<Real> {
        let f = Real::with_val(prec, &one - x);
        if f.to_f64().abs() < POLE_TOL {
            return Err(Error::DegenerateParameters(format!(
                "very-well-poised denominator factor 1 - {} vanishes",
                x.to_f64()
            )));
        }
        Ok(f)
    };
    for k in 0..=n_trunc {
        if k > 0 {
            let km1 = Real::with_val(prec, &qk / q); // q^{k-1}
            let mut ratio = Real::with_val(prec, 1);
            for u in &upper {
                ratio *= Real::with_val(prec, &one - Real::with_val(prec, u * &km1));
            }
            for l in &lower {
                ratio /= denom_one_minus(&Real::with_val(prec, l * &km1))?;
            }
            term_poch *= ratio;
            argk *= &arg;
        }
        let q2k = Real::with_val(prec, &qk * &qk);
        let vw = Real::with_val(prec, &one - Real::with_val(prec, &t1sq * &q2k))
            / denom_one_minus(&t1sq)?;
        sum += Real::with_val(prec, &term_poch * &vw) * &argk;
        qk *= q;
    }

    // closed product side: with the very-well-poised base t1^2 and the three
    // parameters t1 t_j, the paired numerator entries reduce to q/(t_j t_k)
    let closed = {
        let qa = |x: Real| qpoch_infinite_real(&x, q, budget);
        let n1 = qa(Real::with_val(prec, q * &t1sq));
        let n2 = qa(Real::with_val(prec, q / pair(&t[1], &t[2])));
        let n3 = qa(Real::with_val(prec, q / pair(&t[1], &t[3])));
        let n4 = qa(Real::with_val(prec, q / pair(&t[2], &t[3])));
        let d1 = qa(Real::with_val(prec, Real::with_val(prec, q * t1) / &t[1]));
        let d2 = qa(Real::with_val(prec, Real::with_val(prec, q * t1) / &t[2]));
        let d3 = qa(Real::with_val(prec, Real::with_val(prec, q * t1) / &t[3]));
        let d4 = qa(arg.clone());
        let den = Real::with_val(prec, &d1 * &d2) * Real::with_val(prec, &d3 * &d4);
        if den.to_f64().abs() < 1e-25 {
            return Err(Error::DegenerateParameters(
                "closed-form denominator product vanishes".into(),
            ));
        }
        Real::with_val(prec, &n1 * &n2) * Real::with_val(prec, &n3 * &n4) / den
    };

    // split into the two plain sums
    let split = {
        let mut first = Real::with_val(prec, 0);
        let mut second = Real::with_val(prec, 0);
        // second sum: k = 0..N of (qt1^2, qt1t2, t1t3, t1t4)_k /
        //             (qt1/t2, qt1/t3, qt1/t4, q)_k * arg^k
        let upper2 = [
            Real::with_val(prec, q * &t1sq),
            Real::with_val(prec, q * pair(t1, &t[1])),
            pair(t1, &t[2]),
            pair(t1, &t[3]),
        ];
        let lower2 = [
            Real::with_val(prec, Real::with_val(prec, q * t1) / &t[1]),
            Real::with_val(prec, Real::with_val(prec, q * t1) / &t[2]),
            Real::with_val(prec, Real::with_val(prec, q * t1) / &t[3]),
            q.clone(),
        ];
        let mut term = Real::with_val(prec, 1);
        let mut km1 = Real::with_val(prec, 1);
        for k in 0..=n_trunc {
            if k > 0 {
                let mut ratio = arg.clone();
                for u in &upper2 {
                    ratio *= Real::with_val(prec, &one - Real::with_val(prec, u * &km1));
                }
                for l in &lower2 {
                    ratio /= denom_one_minus(&Real::with_val(prec, l * &km1))?;
                }
                term *= ratio;
                km1 *= q;
            }
            second += &term;
        }
        // first sum: k = 1..N of (qt1^2, qt1t2)_{k-1} (t1t3, t1t4)_k /
        //            ((qt1/t2, q)_{k-1} (qt1/t3, qt1/t4)_k) * arg^k * (-t1t2)
        let neg_t1t2 = Real::with_val(prec, -pair(t1, &t[1]));
        for k in 1..=n_trunc {
            let p = |x: &Real, m: u32| qpoch_finite_real(x, q, m);
            let numer = p(&Real::with_val(prec, q * &t1sq), k - 1)
                * p(&Real::with_val(prec, q * pair(t1, &t[1])), k - 1)
                * p(&pair(t1, &t[2]), k)
                * p(&pair(t1, &t[3]), k);
            let denom = p(
                &Real::with_val(prec, Real::with_val(prec, q * t1) / &t[1]),
                k - 1,
            ) * p(q, k - 1)
                * p(
                    &Real::with_val(prec, Real::with_val(prec, q * t1) / &t[2]),
                    k,
                )
                * p(
                    &Real::with_val(prec, Real::with_val(prec, q * t1) / &t[3]),
                    k,
                );
            if denom.to_f64().abs() < POLE_TOL {
                return Err(Error::DegenerateParameters(
                    "split-sum denominator vanishes".into(),
                ));
            }
            first += numer / denom * crate::precision::rpow_i(&arg, k as i64) * &neg_t1t2;
        }
        first + second
    };

    Ok(Vwp65Outcome {
        sum: Cplx::with_val(prec, &sum),
        closed: Cplx::with_val(prec, &closed),
        split: Cplx::with_val(prec, &split),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    fn tol(x: &Cplx) -> f64 {
        cabs(x).to_f64()
    }

    #[test]
    fn zero_order_series_is_one() {
        let b = budget();
        let q = b.real(0.35);
        let spec = PhiSpec::balanced(
            0,
            vec![b.cplx(0.3, 0.0), b.cplx(0.2, 0.0), b.cplx(0.4, 0.0)],
            vec![b.cplx(0.25, 0.0), b.cplx(0.15, 0.0)],
            q,
        );
        let v = phi_terminating(&spec).unwrap();
        assert!(tol(&(v - b.one())) < 1e-50);
    }

    #[test]
    fn series_symmetric_under_parameter_permutation() {
        let b = budget();
        let q = b.real(0.35);
        let nums = [b.cplx(0.3, 0.1), b.cplx(-0.2, 0.0), b.cplx(0.45, -0.3)];
        let dens = [b.cplx(0.21, 0.0), b.cplx(-0.4, 0.2), b.cplx(0.6, 0.0)];
        let arg = b.cplx(0.3, 0.2);
        let base = PhiSpec::new(5, nums.to_vec(), dens.to_vec(), q.clone(), arg.clone());
        let permuted = PhiSpec::new(
            5,
            vec![nums[2].clone(), nums[0].clone(), nums[1].clone()],
            vec![dens[1].clone(), dens[2].clone(), dens[0].clone()],
            q,
            arg,
        );
        let v1 = phi_terminating(&base).unwrap();
        let v2 = phi_terminating(&permuted).unwrap();
        assert!(tol(&(v1 - v2)) < 1e-50);
    }

    #[test]
    fn pfaff_saalschutz_matches_direct_sum() {
        let b = budget();
        let q = b.real(0.35);
        for (n, a, bb, c) in [
            (0u32, 0.4, -0.3, 0.25),
            (1, 0.4, -0.3, 0.25),
            (4, 0.15, 0.52, -0.61),
            (10, -0.72, 0.31, 0.44),
        ] {
            let spec = PhiSpec::balanced(
                n,
                vec![b.cplx(a, 0.0), b.cplx(bb, 0.0)],
                vec![b.cplx(c, 0.0)],
                q.clone(),
            );
            let closed = pfaff_saalschutz_closed(&spec).unwrap();
            let direct = phi_terminating(&spec).unwrap();
            let scale = cabs(&direct).to_f64().max(1.0);
            assert!(
                tol(&(closed - direct)) / scale < 1e-40,
                "n={n} a={a} b={bb} c={c}"
            );
        }
    }

    #[test]
    fn sears_preserves_value() {
        let b = budget();
        let q = b.real(0.35);
        for (n, big_a, big_b, big_c, d, e) in [
            (0u32, 0.5, 0.3, -0.4, 0.35, -0.2),
            (1, 0.5, 0.3, -0.4, 0.35, -0.2),
            (5, -0.62, 0.27, 0.81, -0.33, 0.54),
            (8, 0.2, -0.7, 0.4, 0.6, 0.3),
        ] {
            let spec = PhiSpec::balanced(
                n,
                vec![b.cplx(big_a, 0.0), b.cplx(big_b, 0.0), b.cplx(big_c, 0.0)],
                vec![b.cplx(d, 0.0), b.cplx(e, 0.0)],
                q.clone(),
            );
            let lhs = phi_terminating(&spec).unwrap();
            let (pref, transformed) = sears_transform(&spec).unwrap();
            let rhs = pref * phi_terminating(&transformed).unwrap();
            let scale = cabs(&lhs).to_f64().max(1.0);
            assert!(tol(&(lhs - rhs)) / scale < 1e-40, "n={n}");
        }
    }

    #[test]
    fn sears_rejects_unbalanced() {
        let b = budget();
        let q = b.real(0.35);
        let spec = PhiSpec::new(
            3,
            vec![b.cplx(0.5, 0.0), b.cplx(0.3, 0.0), b.cplx(-0.4, 0.0)],
            vec![b.cplx(0.35, 0.0), b.cplx(-0.2, 0.0), b.cplx(0.11, 0.0)],
            q.clone(),
            Cplx::with_val(q.prec(), &q),
        );
        assert!(matches!(
            sears_transform(&spec),
            Err(Error::BalanceViolation(_))
        ));
    }

    #[test]
    fn contiguous_residuals_vanish() {
        let b = budget();
        let q = b.real(0.35);
        let prec = b.prec();
        // balanced: a b c d q = e f g with b = q^{-n}
        for n in [0u32, 1, 3, 6] {
            let a = b.cplx(0.52, 0.0);
            let bb = Cplx::with_val(prec, crate::precision::rpow_i(&q, -(n as i64)));
            let c = b.cplx(-0.37, 0.0);
            let d = b.cplx(0.29, 0.0);
            let e = b.cplx(0.41, 0.0);
            let f = b.cplx(-0.23, 0.0);
            let g = {
                let num = a.clone() * &bb * &c * &d * &q;
                num / (e.clone() * &f)
            };
            let (r1, r2) = contiguous_residuals(&a, &bb, &c, &d, &e, &f, &g, &q).unwrap();
            assert!(tol(&r1) < 1e-40, "n={n} r1={:e}", tol(&r1));
            assert!(tol(&r2) < 1e-40, "n={n} r2={:e}", tol(&r2));
        }
    }

    #[test]
    fn contiguous_relations_at_proof_parameters() {
        // the connection-relation proof assigns a = t1/z, b = q^-n,
        // c = t1t2t3t4 q^{n-1}, d = t1 z, e = t1t2, f = t1t3, g = t1t4
        let b = budget();
        let prec = b.prec();
        let q = b.real(0.35);
        // build every product at working precision so the balance condition
        // holds exactly, not merely to double-precision rounding
        let t1 = b.real(0.4);
        let t2 = b.real(-0.3);
        let t3 = b.real(0.25);
        let t4 = b.real(-0.15);
        let sigma = Real::with_val(
            prec,
            Real::with_val(prec, &t1 * &t2) * Real::with_val(prec, &t3 * &t4),
        );
        for n in [1u32, 4, 8] {
            for theta in [0.8, 2.3] {
                let z = b.unit_point(theta);
                let a = Cplx::with_val(prec, Cplx::with_val(prec, z.clone().recip()) * &t1);
                let bb = Cplx::with_val(prec, crate::precision::rpow_i(&q, -(n as i64)));
                let c = Cplx::with_val(prec, &sigma * crate::precision::rpow_i(&q, n as i64 - 1));
                let d = Cplx::with_val(prec, z * &t1);
                let e = Cplx::with_val(prec, Real::with_val(prec, &t1 * &t2));
                let f = Cplx::with_val(prec, Real::with_val(prec, &t1 * &t3));
                let g = Cplx::with_val(prec, Real::with_val(prec, &t1 * &t4));
                let (r1, r2) = contiguous_residuals(&a, &bb, &c, &d, &e, &f, &g, &q).unwrap();
                // the series values grow like the reciprocal q-powers, so
                // measure against that scale
                let scale = crate::precision::rpow_i(&q, -((n * n) as i64))
                    .to_f64()
                    .max(1.0);
                assert!(
                    tol(&r1) / scale < 1e-40,
                    "n={n} theta={theta}: {:e}",
                    tol(&r1)
                );
                assert!(
                    tol(&r2) / scale < 1e-40,
                    "n={n} theta={theta}: {:e}",
                    tol(&r2)
                );
            }
        }
    }

    #[test]
    fn pfaff_sum_from_cross_pairing_proof_vanishes_below_order() {
        // with uppers {q^-n, sigma q^{n-1}, q^k t1t3} and lowers
        // {t1t3, sigma q^k} the closed form carries (q^-k; q)_n, which kills
        // the sum for k < n
        let b = budget();
        let prec = b.prec();
        let q = b.real(0.35);
        let (t1, t2, t3, t4) = (0.4, -0.3, 0.25, -0.15);
        let sigma = t1 * t2 * t3 * t4;
        for (n, k) in [(2u32, 0u32), (3, 1), (5, 4)] {
            let spec = PhiSpec::new(
                n,
                vec![
                    Cplx::with_val(
                        prec,
                        b.real(sigma) * crate::precision::rpow_i(&q, n as i64 - 1),
                    ),
                    Cplx::with_val(
                        prec,
                        b.real(t1 * t3) * crate::precision::rpow_i(&q, k as i64),
                    ),
                ],
                vec![
                    b.cplx(t1 * t3, 0.0),
                    Cplx::with_val(prec, b.real(sigma) * crate::precision::rpow_i(&q, k as i64)),
                ],
                q.clone(),
                Cplx::with_val(prec, &q),
            );
            assert!(spec.is_balanced(), "n={n} k={k} should be balanced");
            let direct = phi_terminating(&spec).unwrap();
            assert!(tol(&direct) < 1e-40, "n={n} k={k}: {:e}", tol(&direct));
            let closed = pfaff_saalschutz_closed(&spec).unwrap();
            assert!(tol(&closed) < 1e-40);
        }
    }

    #[test]
    fn vwp65_two_term_hand_sum() {
        // N = 1 with t1 t3 = q^-1: the sum has exactly two terms
        let b = budget();
        let prec = b.prec();
        let q = b.real(0.35);
        let t1 = b.real(0.45);
        let t2 = b.real(-0.33);
        let t4 = b.real(0.21);
        let t3 = Real::with_val(prec, crate::precision::rpow_i(&q, -1) / &t1);
        let out =
            vwp65_check(&q, &[t1.clone(), t2.clone(), t3.clone(), t4.clone()], 1, &b).unwrap();
        // term k=0 is 1; term k=1 written out factor by factor
        let one = b.real(1.0);
        let t1sq = Real::with_val(prec, &t1 * &t1);
        let sigma = Real::with_val(
            prec,
            Real::with_val(prec, &t1 * &t2) * Real::with_val(prec, &t3 * &t4),
        );
        let term1 = Real::with_val(prec, &one - &t1sq)
            * Real::with_val(prec, &one - Real::with_val(prec, &t1 * &t2))
            * Real::with_val(prec, &one - Real::with_val(prec, &t1 * &t3))
            * Real::with_val(prec, &one - Real::with_val(prec, &t1 * &t4))
            / (Real::with_val(prec, &one - &q)
                * Real::with_val(
                    prec,
                    &one - Real::with_val(prec, Real::with_val(prec, &q * &t1) / &t2),
                )
                * Real::with_val(
                    prec,
                    &one - Real::with_val(prec, Real::with_val(prec, &q * &t1) / &t3),
                )
                * Real::with_val(
                    prec,
                    &one - Real::with_val(prec, Real::with_val(prec, &q * &t1) / &t4),
                ))
            * Real::with_val(
                prec,
                &one - Real::with_val(prec, &t1sq * Real::with_val(prec, &q * &q)),
            )
            / Real::with_val(prec, &one - &t1sq)
            * Real::with_val(prec, &q / &sigma);
        let hand = Cplx::with_val(prec, one + term1);
        assert!(cabs(&(out.sum.clone() - &hand)).to_f64() < 1e-45);
        let scale = cabs(&out.closed).to_f64();
        assert!(cabs(&(out.sum - &out.closed)).to_f64() / scale < 1e-38);
    }

    #[test]
    fn vwp65_sum_equals_closed_and_split() {
        let b = budget();
        let q = b.real(0.35);
        let prec = b.prec();
        for n in [0u32, 1, 2, 5] {
            // t3 = q^{-N} / t1
            let t1 = b.real(0.45);
            let t2 = b.real(-0.33);
            let t4 = b.real(0.21);
            let t3 = Real::with_val(prec, crate::precision::rpow_i(&q, -(n as i64)) / &t1);
            let out = vwp65_check(&q, &[t1, t2, t3, t4], n, &b).unwrap();
            let scale = cabs(&out.closed).to_f64().max(1.0);
            assert!(
                tol(&(out.sum.clone() - &out.closed)) / scale < 1e-35,
                "N={n}"
            );
            assert!(
                tol(&(out.sum.clone() - &out.split)) / scale < 1e-35,
                "N={n}"
            );
            if n == 0 {
                assert!(tol(&(out.sum - b.one())) < 1e-45);
            }
        }
    }

    #[test]
    fn termination_detection() {
        let b = budget();
        let q = b.real(0.35);
        let prec = b.prec();
        let u = vec![
            b.cplx(0.4, 0.0),
            Cplx::with_val(prec, crate::precision::rpow_i(&q, -4)),
            b.cplx(0.9, 0.0),
        ];
        assert_eq!(detect_termination(&u, &q), Some(4));
        let v = vec![b.cplx(0.4, 0.0)];
        assert_eq!(detect_termination(&v, &q), None);
        let w = vec![b.one()];
        assert_eq!(detect_termination(&w, &q), Some(0));
    }
}
