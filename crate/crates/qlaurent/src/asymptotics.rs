//! Large-degree asymptotics on the unit circle: the general leading-order
//! form for terminating balanced series, the explicit formulas for the four
//! polynomial families, and decay-rate fits for the measured errors.

use crate::bases::{build_r, build_s, build_t, build_u, Family};
use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::precision::{cabs, cpow_i, Cplx, PrecisionBudget, Real};
use crate::qcore::{qpoch_infinite, qpoch_infinite_real};

/// Leading-order value of the terminating balanced series with upper
/// parameters (q^-n, A q^{n-1}, B, C) and lower (D, E, F), ABC = DEF, at
/// large n (without the 1 + O(q^{n/2}) factor).
///
/// For |B| < |C| this is a single term; for |B| = |C| the symmetric two-term
/// sum. The roles of B and C are swapped internally if needed so that
/// |B| <= |C|.
#[allow(clippy::too_many_arguments)]
pub fn iw_asymptotic(
    b: &Cplx,
    c: &Cplx,
    d: &Cplx,
    e: &Cplx,
    f: &Cplx,
    q: &Real,
    n: u32,
    budget: &PrecisionBudget,
) -> Result<Cplx> {
    let (b, c) = if cabs(b) <= cabs(c) {
        (b.clone(), c.clone())
    } else {
        (c.clone(), b.clone())
    };
    let prec = q.prec();
    let equal_modulus = {
        let bm = cabs(&b).to_f64();
        let cm = cabs(&c).to_f64();
        (bm - cm).abs() <= 1e-12 * cm.max(1e-300)
    };
    let main = single_term(&b, &c, d, e, f, q, n, budget)?;
    if !equal_modulus {
        return Ok(main);
    }
    let swapped = single_term(&c, &b, d, e, f, q, n, budget)?;
    Ok(Cplx::with_val(prec, main + swapped))
}

/// C^n (B, D/C, E/C, F/C; q)_inf / ((B/C, D, E, F; q)_inf).
#[allow(clippy::too_many_arguments)]
fn single_term(
    b: &Cplx,
    c: &Cplx,
    d: &Cplx,
    e: &Cplx,
    f: &Cplx,
    q: &Real,
    n: u32,
    budget: &PrecisionBudget,
) -> Result<Cplx> {
    let prec = q.prec();
    if cabs(c).to_f64() < 1e-300 {
        return Err(Error::DegenerateParameters(
            "asymptotic pivot C must be nonzero".into(),
        ));
    }
    let mut numer = qpoch_infinite(b, q, budget);
    for x in [d, e, f] {
        numer *= qpoch_infinite(&Cplx::with_val(prec, x / c), q, budget);
    }
    let mut denom = qpoch_infinite(&Cplx::with_val(prec, b / c), q, budget);
    for x in [d, e, f] {
        denom *= qpoch_infinite(x, q, budget);
    }
    if cabs(&denom).to_f64() < 1e-30 {
        return Err(Error::DegenerateParameters(
            "asymptotic denominator vanishes".into(),
        ));
    }
    Ok(cpow_i(c, n as i64) * numer / denom)
}

/// Budget with extra digits to keep the exact polynomial evaluation
/// trustworthy at large n. The termwise series build cancels intermediate
/// terms of size ~q^{-n(n+1)/2} down to values of size ~t1^n, so the digit
/// reserve must grow quadratically in n, not linearly.
fn scaled_budget(
    budget: &PrecisionBudget,
    params: &ParameterSet,
    n_max: u32,
) -> Result<PrecisionBudget> {
    let n = n_max as f64;
    let q = params.q().to_f64();
    let t1 = params.t1().to_f64().abs().max(1e-3);
    let cancellation = (n * (n + 1.0) / 2.0) * q.log10().abs();
    let value_scale = n * t1.log10().abs();
    let extra = (cancellation + value_scale).ceil() as u32 + 15;
    budget.with_digits(budget.working_digits() + extra)
}

/// Relative error |LHS(n)/RHS(n) - 1| of the displayed asymptotic formula
/// for the given family at each n in `n_list`, where LHS is the exact built
/// polynomial scaled by the displayed products and RHS the leading term.
pub fn thm91_convergence(
    family: Family,
    theta: f64,
    params: &ParameterSet,
    budget: &PrecisionBudget,
    n_list: &[u32],
) -> Result<Vec<Real>> {
    let n_max = n_list.iter().copied().max().unwrap_or(8);
    let wide = scaled_budget(budget, params, n_max)?;
    let up = |x: &Real| Real::with_val(wide.prec(), x);
    let wide_params = ParameterSet::from_reals(
        up(params.q()),
        [
            up(params.t1()),
            up(params.t2()),
            up(params.t3()),
            up(params.t4()),
        ],
    )?;
    let p = &wide_params;
    let prec = p.prec();
    let q = p.q();
    let z = wide.unit_point(theta);
    let zinv = Cplx::with_val(prec, z.clone().recip());
    let one = Cplx::with_val(prec, 1);

    let poch = |x: &Cplx| qpoch_infinite(x, q, &wide);
    let poch_r = |x: &Real| qpoch_infinite_real(x, q, &wide);
    let tz = |i: usize| Cplx::with_val(prec, &z * p.t(i));
    let tz_inv = |i: usize| Cplx::with_val(prec, &zinv * p.t(i));
    let tt = |i: usize, j: usize| Real::with_val(prec, p.t(i) * p.t(j));

    // the two circle factors shared by the symmetric families
    let plus_part = {
        let mut acc = poch(&Cplx::with_val(prec, &z * &z));
        if cabs(&acc).to_f64() < 1e-30 {
            return Err(Error::DegenerateParameters(
                "evaluation point z^2 hits a product zero".into(),
            ));
        }
        let mut num = Cplx::with_val(prec, 1);
        for j in 1..=4 {
            num *= poch(&tz(j));
        }
        acc = num / acc;
        acc
    };
    let minus_part = {
        let mut acc = poch(&Cplx::with_val(prec, &zinv * &zinv));
        if cabs(&acc).to_f64() < 1e-30 {
            return Err(Error::DegenerateParameters(
                "evaluation point z^-2 hits a product zero".into(),
            ));
        }
        let mut num = Cplx::with_val(prec, 1);
        for j in 1..=4 {
            num *= poch(&tz_inv(j));
        }
        acc = num / acc;
        acc
    };

    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let ni = n as i64;
        let (lhs, rhs) = match family {
            Family::R => {
                let mut scale = Real::with_val(prec, 1);
                for j in 2..=4 {
                    scale *= poch_r(&tt(1, j));
                }
                let value = build_r(n, p, &wide)?.eval_raw(&z);
                let lhs = Cplx::with_val(prec, value * scale);
                let t1_over_z = Cplx::with_val(prec, &zinv * p.t1());
                let t1_z = Cplx::with_val(prec, &z * p.t1());
                let rhs = cpow_i(&t1_over_z, ni) * &plus_part + cpow_i(&t1_z, ni) * &minus_part;
                (lhs, rhs)
            }
            Family::S => {
                let qz2 = Cplx::with_val(prec, Cplx::with_val(prec, &zinv * &zinv) * q);
                let mut scale = poch(&qz2);
                for j in 2..=4 {
                    scale *= poch_r(&Real::with_val(prec, tt(1, j) * q));
                }
                let mut denom = poch(&Cplx::with_val(prec, tz_inv(1) * q));
                denom *= poch(&Cplx::with_val(prec, tz_inv(2) * q));
                denom *= poch(&tz_inv(3));
                denom *= poch(&tz_inv(4));
                if cabs(&denom).to_f64() < 1e-30 {
                    return Err(Error::DegenerateParameters(
                        "scaling denominator vanishes".into(),
                    ));
                }
                let value = build_s(n, p, &wide)?.eval_raw(&z);
                let lhs = value * scale / denom;
                let rhs =
                    Cplx::with_val(prec, crate::precision::rpow_i(p.t1(), ni - 1)) * cpow_i(&z, ni);
                (lhs, rhs)
            }
            Family::T => {
                let qz2 = Cplx::with_val(prec, Cplx::with_val(prec, &zinv * &zinv) * q);
                let mut scale = poch(&qz2);
                scale *= poch_r(&Real::with_val(prec, tt(1, 2) * q));
                scale *= poch_r(&tt(1, 3));
                scale *= poch_r(&tt(1, 4));
                let mut denom = poch(&Cplx::with_val(prec, tz_inv(1) * q));
                denom *= poch(&tz_inv(3));
                denom *= poch(&Cplx::with_val(prec, tz_inv(2) * q));
                denom *= poch(&tz_inv(4));
                if cabs(&denom).to_f64() < 1e-30 {
                    return Err(Error::DegenerateParameters(
                        "scaling denominator vanishes".into(),
                    ));
                }
                let value = build_t(n, p, &wide)?.eval_raw(&z);
                let lhs = value * scale / denom;
                let t1_z = Cplx::with_val(prec, &z * p.t1());
                (lhs, cpow_i(&t1_z, ni))
            }
            Family::U => {
                let mut scale = Real::with_val(prec, 1);
                for j in 2..=4 {
                    scale *= poch_r(&Real::with_val(prec, tt(1, j) * q));
                }
                let denom = Real::with_val(prec, 1) - Real::with_val(prec, tt(1, 2) * q);
                if denom.to_f64().abs() < 1e-30 {
                    return Err(Error::DegenerateParameters(
                        "scaling denominator vanishes".into(),
                    ));
                }
                scale /= denom;
                let value = build_u(n, p, &wide)?.eval_raw(&z);
                let lhs = Cplx::with_val(prec, value * scale);
                let qt1 = Real::with_val(prec, q * p.t1());
                let qt1_pow = crate::precision::rpow_i(&qt1, ni - 1);
                let first = Cplx::with_val(prec, &qt1_pow) * cpow_i(&zinv, ni) * &plus_part;
                // the descending part carries the rational correction factor
                let corr_num = (one.clone() - tz(1)) * (one.clone() - tz(2));
                let corr_den = (one.clone() - tz_inv(1)) * (one.clone() - tz_inv(2));
                let second =
                    Cplx::with_val(prec, &qt1_pow) * cpow_i(&z, ni - 2) * &minus_part * corr_num
                        / corr_den;
                (lhs, first + second)
            }
            _ => {
                return Err(Error::InvalidParameters(
                    "asymptotic formulas exist for the R, S, T, U families".into(),
                ))
            }
        };
        if cabs(&rhs).to_f64() == 0.0 {
            return Err(Error::DegenerateParameters(
                "asymptotic main term vanishes".into(),
            ));
        }
        let ratio = Cplx::with_val(prec, lhs / rhs);
        let err = cabs(&(ratio - one.clone()));
        out.push(err);
    }
    Ok(out)
}

/// Least-squares slope of log err against n; the decay must be at least as
/// fast as q^{n/2} up to the stated slack.
pub fn rate_fit(errs: &[Real], n_list: &[u32], q: f64) -> Result<f64> {
    if errs.len() != n_list.len() || errs.len() < 2 {
        return Err(Error::InvalidParameters(
            "rate fit needs matching lists with at least two points".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = n_list
        .iter()
        .zip(errs)
        .map(|(&n, e)| {
            let v = e.to_f64();
            (n as f64, if v > 0.0 { v.ln() } else { -1e6 })
        })
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::InvalidParameters("degenerate abscissa list".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let bound = 0.5 * q.ln() + 0.1 * q.ln().abs();
    if slope > bound {
        return Err(Error::InsufficientDecay { slope, bound });
    }
    Ok(slope)
}

/// Default unit-circle test angles, chosen away from the removable points
/// and generic with respect to the parameter products.
pub const DEFAULT_THETAS: [f64; 3] = [0.7, 1.3, 2.1];
/// Default degree schedule.
pub const DEFAULT_N_LIST: [u32; 4] = [8, 12, 16, 20];

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (ParameterSet, PrecisionBudget) {
        let b = PrecisionBudget::default();
        let p = ParameterSet::new(0.35, [0.4, -0.3, 0.25, -0.15], &b).unwrap();
        (p, b)
    }

    #[test]
    fn rate_fit_on_synthetic_geometric_decay() {
        let b = PrecisionBudget::default();
        let q = 0.35f64;
        let n_list = [8u32, 12, 16, 20];
        let errs: Vec<Real> = n_list
            .iter()
            .map(|&n| b.real(q.powf(n as f64 / 2.0)))
            .collect();
        let slope = rate_fit(&errs, &n_list, q).unwrap();
        assert!((slope - 0.5 * q.ln()).abs() < 1e-9);
    }

    #[test]
    fn rate_fit_detects_insufficient_decay() {
        let b = PrecisionBudget::default();
        let n_list = [8u32, 12, 16, 20];
        let errs: Vec<Real> = n_list.iter().map(|_| b.real(0.5)).collect();
        assert!(matches!(
            rate_fit(&errs, &n_list, 0.35),
            Err(Error::InsufficientDecay { .. })
        ));
    }

    #[test]
    fn iw_leading_term_tracks_exact_series() {
        // single-term case: |B| < |C| with B = q t1/z, C = t1 z on |z| = 1
        let (p, b) = setup();
        let prec = b.prec();
        let q = p.q();
        let z = b.unit_point(1.3);
        let sigma = p.t_product();
        let t1z = Cplx::with_val(prec, &z * p.t1());
        let qt1_over_z = Cplx::with_val(prec, Cplx::with_val(prec, z.clone().recip()) * p.t1() * q);
        let d = Cplx::with_val(prec, Real::with_val(prec, p.t1() * p.t2()) * q);
        let e = Cplx::with_val(prec, Real::with_val(prec, p.t1() * p.t3()));
        let f = Cplx::with_val(prec, Real::with_val(prec, p.t1() * p.t4()));
        let mut prev_err = f64::INFINITY;
        for n in [8u32, 16] {
            // exact terminating series with upper (q^-n, sigma q^{n-1}, B, C)
            let spec = crate::qhyper::PhiSpec::new(
                n,
                vec![
                    Cplx::with_val(prec, &sigma * crate::precision::rpow_i(q, n as i64 - 1)),
                    t1z.clone(),
                    qt1_over_z.clone(),
                ],
                vec![d.clone(), e.clone(), f.clone()],
                q.clone(),
                Cplx::with_val(prec, q),
            );
            let exact = crate::qhyper::phi_terminating(&spec).unwrap();
            let approx = iw_asymptotic(&qt1_over_z, &t1z, &d, &e, &f, q, n, &b).unwrap();
            let err =
                cabs(&(Cplx::with_val(prec, exact / approx) - Cplx::with_val(prec, 1))).to_f64();
            assert!(err < prev_err, "err should shrink: {err} vs {prev_err}");
            assert!(err < 0.1, "n={n}: err {err}");
            prev_err = err;
        }
    }

    #[test]
    fn two_term_case_on_the_circle() {
        // B = t1 z and C = t1/z are conjugate on |z| = 1, so the equal-modulus
        // two-term branch applies; compare against the exact series as n grows
        let (p, b) = setup();
        let prec = b.prec();
        let q = p.q();
        let z = b.unit_point(0.7);
        let sigma = p.t_product();
        let bb = Cplx::with_val(prec, &z * p.t1());
        let cc = Cplx::with_val(prec, Cplx::with_val(prec, z.recip()) * p.t1());
        let d = Cplx::with_val(prec, Real::with_val(prec, p.t1() * p.t2()));
        let e = Cplx::with_val(prec, Real::with_val(prec, p.t1() * p.t3()));
        let f = Cplx::with_val(prec, Real::with_val(prec, p.t1() * p.t4()));
        let mut prev = f64::INFINITY;
        for n in [8u32, 16] {
            let spec = crate::qhyper::PhiSpec::new(
                n,
                vec![
                    Cplx::with_val(prec, &sigma * crate::precision::rpow_i(q, n as i64 - 1)),
                    bb.clone(),
                    cc.clone(),
                ],
                vec![d.clone(), e.clone(), f.clone()],
                q.clone(),
                Cplx::with_val(prec, q),
            );
            let exact = crate::qhyper::phi_terminating(&spec).unwrap();
            let approx = iw_asymptotic(&bb, &cc, &d, &e, &f, q, n, &b).unwrap();
            let err =
                cabs(&(Cplx::with_val(prec, exact / approx) - Cplx::with_val(prec, 1))).to_f64();
            assert!(err < prev && err < 0.1, "n={n}: err {err}");
            prev = err;
        }
    }

    #[test]
    fn family_errors_decay_at_expected_rate() {
        let (p, b) = setup();
        let n_list = [8u32, 12, 16, 20];
        let q = p.q().to_f64();
        for family in [Family::R, Family::S, Family::T, Family::U] {
            let errs = thm91_convergence(family, 1.3, &p, &b, &n_list).unwrap();
            for w in errs.windows(2) {
                assert!(w[1] < w[0], "{family:?}: errors should decrease");
            }
            // factor between the ends at least q^3
            let ratio = (errs[3].clone() / errs[0].clone()).to_f64();
            assert!(
                ratio <= q.powi(3),
                "{family:?}: err(20)/err(8) = {ratio:e} above q^3"
            );
            let slope = rate_fit(&errs, &n_list, q).unwrap();
            assert!(slope <= 0.4 * q.ln(), "{family:?}: slope {slope}");
        }
    }

    #[test]
    fn zero_second_parameter_reduces_to_three_products() {
        let (p, b) = setup();
        let prec = b.prec();
        let q = p.q();
        let zero = Cplx::with_val(prec, 0);
        let c = Cplx::with_val(prec, (0.52, 0.0));
        let d = Cplx::with_val(prec, (0.31, 0.0));
        let e = Cplx::with_val(prec, (-0.22, 0.0));
        let f = Cplx::with_val(prec, (0.17, 0.0));
        let got = iw_asymptotic(&zero, &c, &d, &e, &f, q, 5, &b).unwrap();
        // C^n (D/C, E/C, F/C; q)_inf / (D, E, F; q)_inf
        let mut expected = cpow_i(&c, 5);
        for x in [&d, &e, &f] {
            expected *= qpoch_infinite(&Cplx::with_val(prec, x / &c), q, &b);
            expected /= qpoch_infinite(x, q, &b);
        }
        assert!(cabs(&(got - expected)).to_f64() < 1e-40);
    }
}
