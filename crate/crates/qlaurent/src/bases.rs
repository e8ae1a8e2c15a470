//! Construction of the Laurent polynomial families R_n, S_n, T_n, U_n, the
//! orthogonal combinations X_m and Y_m, and the nonsymmetric pair P_m, P'_m,
//! together with the connection identities that tie them to each other.
//!
//! Everything is built by exact termwise expansion of the defining series so
//! these polynomials can serve as the reference for every other module.

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::params::ParameterSet;
use crate::precision::{cabs, rpow_i, Cplx, PrecisionBudget, Real};
use crate::qcore::qpoch_finite_real;

/// Polynomial family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    R,
    S,
    T,
    U,
    X,
    Y,
    P,
    PPrime,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "R" | "r" => Some(Family::R),
            "S" | "s" => Some(Family::S),
            "T" | "t" => Some(Family::T),
            "U" | "u" => Some(Family::U),
            "X" | "x" => Some(Family::X),
            "Y" | "y" => Some(Family::Y),
            "P" | "p" => Some(Family::P),
            "Pprime" | "pprime" | "P'" | "p'" => Some(Family::PPrime),
            _ => None,
        }
    }
}

/// A family member: index is n >= 0 for R, S, T, U and any integer for X, Y,
/// P, P'.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisId {
    pub family: Family,
    pub index: i64,
}

/// Build any family member.
pub fn build(id: BasisId, params: &ParameterSet, budget: &PrecisionBudget) -> Result<LaurentPoly> {
    let nonneg = |n: i64| -> Result<u32> {
        u32::try_from(n).map_err(|_| {
            Error::InvalidParameters(format!("family requires a nonnegative index, got {n}"))
        })
    };
    match id.family {
        Family::R => build_r(nonneg(id.index)?, params, budget),
        Family::S => build_s(nonneg(id.index)?, params, budget),
        Family::T => build_t(nonneg(id.index)?, params, budget),
        Family::U => build_u(nonneg(id.index)?, params, budget),
        Family::X => build_x(id.index, params, budget),
        Family::Y => build_y(id.index, params, budget),
        Family::P => build_p(id.index, params, budget),
        Family::PPrime => build_p_prime(id.index, params, budget),
    }
}

/// Termwise expansion of a terminating series whose j-th term carries the
/// Laurent factor (az; q)_j (b/z; q)_j: the scalar part advances through the
/// term ratio and the polynomial part through one extra quadratic factor per
/// step.
fn phi_series_laurent(
    order: u32,
    upper_scalars: &[Real],
    lower_scalars: &[Real],
    a: &Real,
    b: &Real,
    q: &Real,
) -> Result<LaurentPoly> {
    let prec = q.prec();
    let one = Real::with_val(prec, 1);
    let mut acc = LaurentPoly::constant(Cplx::with_val(prec, 1));
    let mut zpart = LaurentPoly::one(prec);
    let mut scalar = Real::with_val(prec, 1);
    let mut qj = Real::with_val(prec, 1);
    for j in 0..order {
        // scalar ratio from term j to j+1 (argument q)
        let mut ratio = q.clone();
        for u in upper_scalars {
            ratio *= Real::with_val(prec, &one - Real::with_val(prec, u * &qj));
        }
        let qnext = Real::with_val(prec, &qj * q);
        let f = Real::with_val(prec, &one - &qnext);
        if f.to_f64().abs() < 1e-20 {
            return Err(Error::PoleInSeries(format!("q^{}", j + 1)));
        }
        ratio /= f;
        for l in lower_scalars {
            let f = Real::with_val(prec, &one - Real::with_val(prec, l * &qj));
            if f.to_f64().abs() < 1e-20 {
                return Err(Error::PoleInSeries(format!(
                    "denominator parameter at step {j}"
                )));
            }
            ratio /= f;
        }
        scalar *= ratio;
        // polynomial factor (1 - a q^j z)(1 - b q^j / z)
        let az = Real::with_val(prec, a * &qj);
        let bz = Real::with_val(prec, b * &qj);
        let quad = LaurentPoly::from_coeffs(
            -1,
            vec![
                Cplx::with_val(prec, -&bz),
                Cplx::with_val(prec, Real::with_val(prec, &az * &bz) + &one),
                Cplx::with_val(prec, -&az),
            ],
            prec,
        );
        zpart = zpart.mul(&quad);
        acc = acc.add(&zpart.scale_real(&scalar));
        qj = qnext;
    }
    Ok(acc)
}

/// R_n: first-kind series with factors (t1 z; q)_j (t1/z; q)_j.
pub fn build_r(n: u32, params: &ParameterSet, _budget: &PrecisionBudget) -> Result<LaurentPoly> {
    let prec = params.prec();
    let q = params.q();
    let sigma = params.t_product();
    let uppers = [
        rpow_i(q, -(n as i64)),
        Real::with_val(prec, &sigma * rpow_i(q, n as i64 - 1)),
    ];
    let lowers = [
        Real::with_val(prec, params.t1() * params.t2()),
        Real::with_val(prec, params.t1() * params.t3()),
        Real::with_val(prec, params.t1() * params.t4()),
    ];
    phi_series_laurent(n, &uppers, &lowers, params.t1(), params.t1(), q)
}

/// T_n: same series as R_n with the lower t1 t2 pushed up by q and the
/// descending Laurent factor (q t1/z; q)_j.
pub fn build_t(n: u32, params: &ParameterSet, _budget: &PrecisionBudget) -> Result<LaurentPoly> {
    let prec = params.prec();
    let q = params.q();
    let sigma = params.t_product();
    let uppers = [
        rpow_i(q, -(n as i64)),
        Real::with_val(prec, &sigma * rpow_i(q, n as i64 - 1)),
    ];
    let lowers = [
        Real::with_val(prec, Real::with_val(prec, params.t1() * params.t2()) * q),
        Real::with_val(prec, params.t1() * params.t3()),
        Real::with_val(prec, params.t1() * params.t4()),
    ];
    let qt1 = Real::with_val(prec, q * params.t1());
    phi_series_laurent(n, &uppers, &lowers, params.t1(), &qt1, q)
}

/// S_n: S_0 = 0; for n >= 1 the series of order n-1 with all lower
/// parameters pushed up by q, times the prefactor z (1 - t3/z)(1 - t4/z).
pub fn build_s(n: u32, params: &ParameterSet, _budget: &PrecisionBudget) -> Result<LaurentPoly> {
    let prec = params.prec();
    if n == 0 {
        return Ok(LaurentPoly::zero(prec));
    }
    let q = params.q();
    let sigma = params.t_product();
    let uppers = [
        rpow_i(q, 1 - n as i64),
        Real::with_val(prec, &sigma * rpow_i(q, n as i64)),
    ];
    let lowers = [
        Real::with_val(prec, Real::with_val(prec, params.t1() * params.t2()) * q),
        Real::with_val(prec, Real::with_val(prec, params.t1() * params.t3()) * q),
        Real::with_val(prec, Real::with_val(prec, params.t1() * params.t4()) * q),
    ];
    let qt1 = Real::with_val(prec, q * params.t1());
    let series = phi_series_laurent(n - 1, &uppers, &lowers, params.t1(), &qt1, q)?;
    // z (1 - t3/z)(1 - t4/z) = z - (t3 + t4) + t3 t4 / z
    let t34 = Real::with_val(prec, params.t3() * params.t4());
    let mid = Real::with_val(prec, params.t3() + params.t4());
    let prefactor = LaurentPoly::from_coeffs(
        -1,
        vec![
            Cplx::with_val(prec, &t34),
            Cplx::with_val(prec, -&mid),
            Cplx::with_val(prec, 1),
        ],
        prec,
    );
    Ok(prefactor.mul(&series))
}

/// U_n: U_0 = 0; for n >= 1, (1/z)(1 - t1 z)(1 - t2 z) R_{n-1} at the
/// (q t1, q t2, t3, t4) parameter shift.
pub fn build_u(n: u32, params: &ParameterSet, budget: &PrecisionBudget) -> Result<LaurentPoly> {
    let prec = params.prec();
    if n == 0 {
        return Ok(LaurentPoly::zero(prec));
    }
    let q = params.q();
    let shifted = params.with_t([
        Real::with_val(prec, q * params.t1()),
        Real::with_val(prec, q * params.t2()),
        params.t3().clone(),
        params.t4().clone(),
    ]);
    let inner = build_r(n - 1, &shifted, budget)?;
    // (1/z)(1 - t1 z)(1 - t2 z) = 1/z - (t1 + t2) + t1 t2 z
    let t12 = Real::with_val(prec, params.t1() * params.t2());
    let mid = Real::with_val(prec, params.t1() + params.t2());
    let prefactor = LaurentPoly::from_coeffs(
        -1,
        vec![
            Cplx::with_val(prec, 1),
            Cplx::with_val(prec, -&mid),
            Cplx::with_val(prec, &t12),
        ],
        prec,
    );
    Ok(prefactor.mul(&inner))
}

/// (1 - t1 t2)(1 - t1 t3)(1 - t1 t4), the constant equal to both X_0 and
/// Y_0.
pub fn kappa(params: &ParameterSet) -> Real {
    let prec = params.prec();
    let one = Real::with_val(prec, 1);
    let mut acc = Real::with_val(prec, 1);
    for j in 2..=4usize {
        acc *= Real::with_val(prec, &one - Real::with_val(prec, params.t1() * params.t(j)));
    }
    acc
}

/// X_m for any integer m.
///
/// X_{-n} = kappa R_n - t1 (1 - t1t2t3t4 q^{n-1}) S_n for n > 0,
/// X_{n}  = kappa R_n + t1^2 t2 (1 - q^n) S_n        for n >= 0.
pub fn build_x(m: i64, params: &ParameterSet, budget: &PrecisionBudget) -> Result<LaurentPoly> {
    let prec = params.prec();
    let one = Real::with_val(prec, 1);
    let k = kappa(params);
    if m >= 0 {
        let n = m as u32;
        let r = build_r(n, params, budget)?;
        let s = build_s(n, params, budget)?;
        let coeff = Real::with_val(prec, params.t1() * params.t1())
            * params.t2()
            * Real::with_val(prec, &one - rpow_i(params.q(), m));
        Ok(r.scale_real(&k).add(&s.scale_real(&coeff)))
    } else {
        let n = (-m) as u32;
        let r = build_r(n, params, budget)?;
        let s = build_s(n, params, budget)?;
        let sigma_qn1 = Real::with_val(prec, params.t_product() * rpow_i(params.q(), n as i64 - 1));
        let coeff = Real::with_val(prec, -(params.t1().clone() * (one.clone() - sigma_qn1)));
        Ok(r.scale_real(&k).add(&s.scale_real(&coeff)))
    }
}

/// Y_m for any integer m.
///
/// Y_{-n} = q^{n-1} t3 t4 kappa R_n - t1 (1 - t1t2t3t4 q^{n-1}) S_n, n > 0,
/// Y_{n}  = q^n kappa R_n + t1 (1 - q^n) S_n,                       n >= 0.
pub fn build_y(m: i64, params: &ParameterSet, budget: &PrecisionBudget) -> Result<LaurentPoly> {
    let prec = params.prec();
    let one = Real::with_val(prec, 1);
    let k = kappa(params);
    if m >= 0 {
        let n = m as u32;
        let r = build_r(n, params, budget)?;
        let s = build_s(n, params, budget)?;
        let rc = Real::with_val(prec, &k * rpow_i(params.q(), m));
        let sc = Real::with_val(prec, params.t1() * (one.clone() - rpow_i(params.q(), m)));
        Ok(r.scale_real(&rc).add(&s.scale_real(&sc)))
    } else {
        let n = (-m) as u32;
        let r = build_r(n, params, budget)?;
        let s = build_s(n, params, budget)?;
        let t34 = Real::with_val(prec, params.t3() * params.t4());
        let rc = Real::with_val(prec, &k * rpow_i(params.q(), n as i64 - 1)) * t34;
        let sigma_qn1 = Real::with_val(prec, params.t_product() * rpow_i(params.q(), n as i64 - 1));
        let sc = Real::with_val(prec, -(params.t1().clone() * (one.clone() - sigma_qn1)));
        Ok(r.scale_real(&rc).add(&s.scale_real(&sc)))
    }
}

/// The nonsymmetric family: P_m = Y_m for m >= 0 and X_m for m < 0.
pub fn build_p(m: i64, params: &ParameterSet, budget: &PrecisionBudget) -> Result<LaurentPoly> {
    if m >= 0 {
        build_y(m, params, budget)
    } else {
        build_x(m, params, budget)
    }
}

/// P'_m, the parameter-inverted partner P_m(z; 1/t | 1/q), realized through
/// the X <-> Y inversion scalings so no series in base 1/q is ever summed:
///
/// P'_n(z)  = -X_n(1/z; t | q) / (t1^3 t2 t3 t4 q^n),        n >= 0,
/// P'_{-n}(z) = -Y_{-n}(1/z; t | q) / (t1^3 t2 t3^2 t4^2 q^{n-1}), n >= 1.
pub fn build_p_prime(
    m: i64,
    params: &ParameterSet,
    budget: &PrecisionBudget,
) -> Result<LaurentPoly> {
    let prec = params.prec();
    if params.t_product().to_f64() == 0.0 {
        return Err(Error::DegenerateParameters(
            "parameter inversion requires nonzero t entries".into(),
        ));
    }
    let t1cubed = rpow_i(params.t1(), 3);
    if m >= 0 {
        let x = build_x(m, params, budget)?;
        let scale = Real::with_val(prec, &t1cubed * params.t2())
            * params.t3()
            * params.t4()
            * rpow_i(params.q(), m);
        let inv_scale = Cplx::with_val(prec, Real::with_val(prec, -1) / scale);
        Ok(x.sub_inv().scale(&inv_scale))
    } else {
        let n = -m;
        let y = build_y(m, params, budget)?;
        let scale = Real::with_val(prec, &t1cubed * params.t2())
            * rpow_i(params.t3(), 2)
            * rpow_i(params.t4(), 2)
            * rpow_i(params.q(), n - 1);
        let inv_scale = Cplx::with_val(prec, Real::with_val(prec, -1) / scale);
        Ok(y.sub_inv().scale(&inv_scale))
    }
}

/// The constant c_n with c_n U_n = T_n - R_n. This is the connection
/// constant, distinct from the recurrence coefficients that reuse the same
/// letter.
pub fn connection_c(n: u32, params: &ParameterSet) -> Result<Real> {
    let prec = params.prec();
    let q = params.q();
    let one = Real::with_val(prec, 1);
    let sigma = params.t_product();
    let numer = Real::with_val(prec, q * params.t1())
        * Real::with_val(prec, &one - rpow_i(q, -(n as i64)))
        * Real::with_val(
            prec,
            &one - Real::with_val(prec, &sigma * rpow_i(q, n as i64 - 1)),
        );
    let t12 = Real::with_val(prec, params.t1() * params.t2());
    let denom = Real::with_val(prec, &one - &t12)
        * Real::with_val(prec, &one - Real::with_val(prec, q * &t12))
        * Real::with_val(prec, &one - Real::with_val(prec, params.t1() * params.t3()))
        * Real::with_val(prec, &one - Real::with_val(prec, params.t1() * params.t4()));
    if denom.to_f64().abs() < 1e-25 {
        return Err(Error::DegenerateParameters(
            "connection constant denominator vanishes".into(),
        ));
    }
    Ok(numer / denom)
}

/// Max-norm residual of `diff` relative to the largest coefficient scale
/// among the polynomials entering the identity.
pub fn rel_residual(diff: &LaurentPoly, terms: &[&LaurentPoly]) -> Real {
    let prec = diff.prec();
    let mut scale = Real::with_val(prec, 0);
    for t in terms {
        let m = t.max_coeff_mag();
        if m > scale {
            scale = m;
        }
    }
    let norm = diff.max_coeff_mag();
    if scale.to_f64() == 0.0 {
        norm
    } else {
        norm / scale
    }
}

/// Residuals of the three connection relations among T, R, U and S, R, T for
/// n >= 1:
///
/// 1. T_n - R_n = c_n U_n,
/// 2. (1-t1t3)(1-t1t4) R_n - t1 S_n
///    = t1 (1-t1t2 q^n)(1-t3t4 q^{n-1}) / (q^{n-1} (1-t1t2)(1-q t1t2)) U_n,
/// 3. t1/((1-t1t3)(1-t1t4)) S_n
///      - (1-q^n t1t2)(1-q^{n-1} t3t4) / ((1-q^n)(1-t1t2t3t4 q^{n-1})) T_n
///    + q^n (1-t1t2)(1-t3t4/q) / ((1-q^n)(1-t1t2t3t4 q^{n-1})) R_n = 0.
pub fn connection_residuals(
    n: u32,
    params: &ParameterSet,
    budget: &PrecisionBudget,
) -> Result<[Real; 3]> {
    if n == 0 {
        return Err(Error::InvalidParameters(
            "connection relations need n >= 1".into(),
        ));
    }
    let prec = params.prec();
    let q = params.q();
    let one = Real::with_val(prec, 1);
    let r = build_r(n, params, budget)?;
    let s = build_s(n, params, budget)?;
    let t = build_t(n, params, budget)?;
    let u = build_u(n, params, budget)?;
    let sigma = params.t_product();
    let t12 = Real::with_val(prec, params.t1() * params.t2());
    let t13 = Real::with_val(prec, params.t1() * params.t3());
    let t14 = Real::with_val(prec, params.t1() * params.t4());
    let t34 = Real::with_val(prec, params.t3() * params.t4());
    let qn = rpow_i(q, n as i64);
    let sig_qn1 = Real::with_val(prec, &sigma * rpow_i(q, n as i64 - 1));

    // relation 1
    let c = connection_c(n, params)?;
    let diff1 = t.sub(&r).sub(&u.scale_real(&c));
    let res1 = rel_residual(&diff1, &[&t, &r, &u]);

    // relation 2
    let lam = Real::with_val(prec, &one - &t13) * Real::with_val(prec, &one - &t14);
    let coeff2 = {
        let numer = params.t1().clone()
            * Real::with_val(prec, &one - Real::with_val(prec, &t12 * &qn))
            * Real::with_val(
                prec,
                &one - Real::with_val(prec, &t34 * rpow_i(q, n as i64 - 1)),
            );
        let denom = rpow_i(q, n as i64 - 1)
            * Real::with_val(prec, &one - &t12)
            * Real::with_val(prec, &one - Real::with_val(prec, q * &t12));
        numer / denom
    };
    let diff2 = r
        .scale_real(&lam)
        .sub(&s.scale_real(params.t1()))
        .sub(&u.scale_real(&coeff2));
    let res2 = rel_residual(&diff2, &[&r, &s, &u]);

    // relation 3
    let denom3 = Real::with_val(prec, &one - &qn) * Real::with_val(prec, &one - &sig_qn1);
    if denom3.to_f64().abs() < 1e-25 || lam.to_f64().abs() < 1e-25 {
        return Err(Error::DegenerateParameters(
            "connection relation denominator vanishes".into(),
        ));
    }
    let cs = Real::with_val(prec, params.t1() / &lam);
    let ct = Real::with_val(
        prec,
        -(Real::with_val(prec, &one - Real::with_val(prec, &t12 * &qn))
            * Real::with_val(
                prec,
                &one - Real::with_val(prec, &t34 * rpow_i(q, n as i64 - 1)),
            )
            / &denom3),
    );
    let cr = Real::with_val(
        prec,
        qn.clone()
            * Real::with_val(prec, &one - &t12)
            * Real::with_val(prec, &one - Real::with_val(prec, &t34 / q))
            / &denom3,
    );
    let diff3 = s
        .scale_real(&cs)
        .add(&t.scale_real(&ct))
        .add(&r.scale_real(&cr));
    let res3 = rel_residual(&diff3, &[&s, &t, &r]);

    Ok([res1, res2, res3])
}

/// Residuals of the parameter-swap and base-inversion identities.
#[derive(Debug, Clone)]
pub struct ScaledIdentityResiduals {
    /// R with t1 <-> t3 swapped against the explicit Pochhammer prefactor.
    pub r_swap_13: Real,
    /// T with t1 <-> t2 swapped against its prefactor.
    pub t_swap_12: Real,
    /// S_n versus z (1-t3/z)(1-t4/z) T_{n-1}(z; t1, t2, q t3, q t4).
    pub s_via_t: Real,
    /// T_n versus R_n(q^{-1/2} z; sqrt-q scaled parameters).
    pub t_via_scaled_r: Real,
    /// S_n versus the prefactor times R_{n-1}(q^{-1/2} z; sqrt-q up-scaled t).
    pub s_via_scaled_r: Real,
    /// R_n(1/z; 1/t | 1/q) = R_n(z; t | q).
    pub invert_r: Real,
    /// S_n(1/z; 1/t | 1/q) = S_n(z; t | q) / (t3 t4).
    pub invert_s: Real,
}

impl ScaledIdentityResiduals {
    pub fn max(&self) -> Real {
        let mut m = self.r_swap_13.clone();
        for v in [
            &self.t_swap_12,
            &self.s_via_t,
            &self.t_via_scaled_r,
            &self.s_via_scaled_r,
            &self.invert_r,
            &self.invert_s,
        ] {
            if *v > m {
                m = v.clone();
            }
        }
        m
    }
}

pub fn scaled_identity_residuals(
    n: u32,
    params: &ParameterSet,
    budget: &PrecisionBudget,
) -> Result<ScaledIdentityResiduals> {
    if n == 0 {
        return Err(Error::InvalidParameters(
            "scaled identities need n >= 1".into(),
        ));
    }
    let prec = params.prec();
    let q = params.q();
    for i in 1..=4 {
        if params.t(i).to_f64() == 0.0 {
            return Err(Error::DegenerateParameters(
                "swap and inversion identities need nonzero t entries".into(),
            ));
        }
    }

    let r = build_r(n, params, budget)?;
    let s = build_s(n, params, budget)?;
    let t = build_t(n, params, budget)?;

    // R swap t1 <-> t3
    let r_swap_13 = {
        let swapped = params.swapped(1, 3);
        let other = build_r(n, &swapped, budget)?;
        let scale = swap_prefactor(params, n, (2, 3), (3, 4), (1, 2), (1, 4), 3)?;
        let diff = r.sub(&other.scale_real(&scale));
        rel_residual(&diff, &[&r, &other])
    };

    // T swap t1 <-> t2
    let t_swap_12 = {
        let swapped = params.swapped(1, 2);
        let other = build_t(n, &swapped, budget)?;
        let scale = swap_prefactor(params, n, (2, 3), (2, 4), (1, 3), (1, 4), 2)?;
        let diff = t.sub(&other.scale_real(&scale));
        rel_residual(&diff, &[&t, &other])
    };

    // S via down-shifted T
    let s_via_t = {
        let shifted = params.with_t([
            params.t1().clone(),
            params.t2().clone(),
            Real::with_val(prec, q * params.t3()),
            Real::with_val(prec, q * params.t4()),
        ]);
        let tm1 = build_t(n - 1, &shifted, budget)?;
        let rhs = s_prefactor(params).mul(&tm1);
        let diff = s.sub(&rhs);
        rel_residual(&diff, &[&s, &rhs])
    };

    // T via scaled R
    let sqrt_q = Real::with_val(prec, q.clone().sqrt());
    let inv_sqrt_q = Real::with_val(prec, sqrt_q.clone().recip());
    let t_via_scaled_r = {
        let scaled = params.with_t([
            Real::with_val(prec, params.t1() * &sqrt_q),
            Real::with_val(prec, params.t2() * &sqrt_q),
            Real::with_val(prec, params.t3() * &inv_sqrt_q),
            Real::with_val(prec, params.t4() * &inv_sqrt_q),
        ]);
        let g = build_r(n, &scaled, budget)?;
        let rhs = g.sub_scale(&inv_sqrt_q);
        let diff = t.sub(&rhs);
        rel_residual(&diff, &[&t, &rhs])
    };

    // S via scaled R at n-1
    let s_via_scaled_r = {
        let scaled = params.with_t([
            Real::with_val(prec, params.t1() * &sqrt_q),
            Real::with_val(prec, params.t2() * &sqrt_q),
            Real::with_val(prec, params.t3() * &sqrt_q),
            Real::with_val(prec, params.t4() * &sqrt_q),
        ]);
        let g = build_r(n - 1, &scaled, budget)?;
        let rhs = s_prefactor(params).mul(&g.sub_scale(&inv_sqrt_q));
        let diff = s.sub(&rhs);
        rel_residual(&diff, &[&s, &rhs])
    };

    // base inversion
    let inverted = params.inverted()?;
    let invert_r = {
        let ri = build_r(n, &inverted, budget)?.sub_inv();
        let diff = ri.sub(&r);
        rel_residual(&diff, &[&r, &ri])
    };
    let invert_s = {
        let si = build_s(n, &inverted, budget)?.sub_inv();
        let t34 = Real::with_val(prec, params.t3() * params.t4());
        let rhs = s.scale_real(&Real::with_val(prec, t34.recip()));
        let diff = si.sub(&rhs);
        rel_residual(&diff, &[&si, &rhs])
    };

    Ok(ScaledIdentityResiduals {
        r_swap_13,
        t_swap_12,
        s_via_t,
        t_via_scaled_r,
        s_via_scaled_r,
        invert_r,
        invert_s,
    })
}

/// z (1 - t3/z)(1 - t4/z).
fn s_prefactor(params: &ParameterSet) -> LaurentPoly {
    let prec = params.prec();
    let t34 = Real::with_val(prec, params.t3() * params.t4());
    let mid = Real::with_val(prec, params.t3() + params.t4());
    LaurentPoly::from_coeffs(
        -1,
        vec![
            Cplx::with_val(prec, &t34),
            Cplx::with_val(prec, -&mid),
            Cplx::with_val(prec, 1),
        ],
        prec,
    )
}

/// t1^n (t_{a} t_{b}; q)_n (t_{c} t_{d}; q)_n /
/// (t_pivot^n (t_{e} t_{f}; q)_n (t_{g} t_{h}; q)_n) for the swap
/// identities.
fn swap_prefactor(
    params: &ParameterSet,
    n: u32,
    num1: (usize, usize),
    num2: (usize, usize),
    den1: (usize, usize),
    den2: (usize, usize),
    pivot: usize,
) -> Result<Real> {
    let prec = params.prec();
    let q = params.q();
    let pair = |(i, j): (usize, usize)| Real::with_val(prec, params.t(i) * params.t(j));
    let numer = rpow_i(params.t1(), n as i64)
        * qpoch_finite_real(&pair(num1), q, n)
        * qpoch_finite_real(&pair(num2), q, n);
    let denom = rpow_i(params.t(pivot), n as i64)
        * qpoch_finite_real(&pair(den1), q, n)
        * qpoch_finite_real(&pair(den2), q, n);
    if denom.to_f64().abs() < 1e-25 {
        return Err(Error::DegenerateParameters(
            "swap prefactor denominator vanishes".into(),
        ));
    }
    Ok(numer / denom)
}

/// Numeric rank of a list of coefficient rows, by Gaussian elimination with
/// partial pivoting at a relative threshold.
#[allow(clippy::needless_range_loop)]
pub fn numeric_rank(rows: &[Vec<Cplx>], rel_tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let prec = rows[0].first().map(|c| c.prec().0).unwrap_or(64);
    let mut m: Vec<Vec<Cplx>> = rows.to_vec();
    let ncols = m.iter().map(|r| r.len()).max().unwrap_or(0);
    for r in &mut m {
        while r.len() < ncols {
            r.push(Cplx::with_val(prec, 0));
        }
    }
    let mut scale = Real::with_val(prec, 0);
    for r in &m {
        for c in r {
            let a = cabs(c);
            if a > scale {
                scale = a;
            }
        }
    }
    if scale.to_f64() == 0.0 {
        return 0;
    }
    let thr = Real::with_val(prec, &scale * rel_tol);
    let mut rank = 0usize;
    let mut row = 0usize;
    for col in 0..ncols {
        // pivot search
        let mut best = row;
        let mut best_mag = Real::with_val(prec, 0);
        for (i, r) in m.iter().enumerate().skip(row) {
            let a = cabs(&r[col]);
            if a > best_mag {
                best_mag = a;
                best = i;
            }
        }
        if best_mag <= thr {
            continue;
        }
        m.swap(row, best);
        let pivot = m[row][col].clone();
        for i in (row + 1)..m.len() {
            let factor = Cplx::with_val(prec, &m[i][col] / &pivot);
            for j in col..ncols {
                let sub = Cplx::with_val(prec, &factor * &m[row][j]);
                m[i][j] -= sub;
            }
        }
        rank += 1;
        row += 1;
        if row == m.len() {
            break;
        }
    }
    rank
}

/// Coefficient rows of a set of polynomials over the V_n monomial basis.
pub fn coefficient_rows(polys: &[LaurentPoly], n: i64) -> Vec<Vec<Cplx>> {
    polys
        .iter()
        .map(|p| ((-n)..=n).map(|e| p.coeff(e)).collect())
        .collect()
}
