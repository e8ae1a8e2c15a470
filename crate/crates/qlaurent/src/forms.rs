//! Circle-weight bilinear forms.
//!
//! The pairing of two Laurent polynomials against the modified circle weight
//! is an integral of a smooth 2-pi-periodic function, so the uniform
//! half-offset trapezoid rule converges geometrically; nodes are doubled
//! until two successive levels agree. Closed-form norms and the glued-moment
//! evaluations provide independent values to compare against.

use crate::bases;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::params::ParameterSet;
use crate::precision::{cabs, rpow_i, Cplx, PrecisionBudget, Real};
use crate::qcore::{aw_mu, qpoch_finite_real, qpoch_infinite, qpoch_infinite_real};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

/// How a bilinear-form value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    ClosedForm,
    GluedMoment,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
            Method::GluedMoment => "glued_moment",
        }
    }
}

/// A bilinear-form value together with its provenance and an error estimate
/// (the node-doubling Cauchy difference for quadrature values, the product
/// truncation bound otherwise).
#[derive(Debug, Clone)]
pub struct InnerProductResult {
    pub value: Cplx,
    pub method: Method,
    pub error_estimate: Real,
}

/// Weight selector for the quadrature engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// The modified weight behind the Laurent orthogonality.
    Cher,
    /// The plain circle weight.
    Aw,
}

/// Closed-form norm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormFamily {
    R,
    S,
    T,
    U,
    XPos,
    XNeg,
    YPos,
    YNeg,
    /// The diagonal pairing of Y_n with its parameter-inverted partner under
    /// the inverted-argument form.
    YPrimePairing,
    /// Likewise for X_{-n}.
    XNegPrimePairing,
}

/// Evaluation of both circle weights at one point, sharing the common
/// product denominators.
struct WeightPoint {
    aw: Cplx,
    cher: Cplx,
}

fn weights_at(z: &Cplx, params: &ParameterSet, budget: &PrecisionBudget) -> Result<WeightPoint> {
    let prec = params.prec();
    let q = params.q();
    let one = Cplx::with_val(prec, 1);
    let zinv = Cplx::with_val(prec, z.clone().recip());
    let z2 = Cplx::with_val(prec, z * z);
    let zinv2 = Cplx::with_val(prec, &zinv * &zinv);
    let qz_inv2 = Cplx::with_val(prec, &zinv2 * q);

    let cq = qpoch_infinite_real(q, q, budget);
    let a = qpoch_infinite(&z2, q, budget);
    let bq = qpoch_infinite(&qz_inv2, q, budget);

    let mut denom = Cplx::with_val(prec, 1);
    for j in 1..=4usize {
        let tz = Cplx::with_val(prec, z * params.t(j));
        let tzinv = Cplx::with_val(prec, &zinv * params.t(j));
        denom *= qpoch_infinite(&tz, q, budget);
        denom *= qpoch_infinite(&tzinv, q, budget);
    }
    if cabs(&denom).to_f64() < 1e-200 {
        return Err(Error::DegenerateParameters(
            "weight denominator product vanishes".into(),
        ));
    }
    let shared = Cplx::with_val(prec, &a * &bq) * &cq / denom;
    let aw = shared.clone() * (one.clone() - &zinv2);
    let cher = {
        let f1 = one.clone() - Cplx::with_val(prec, &zinv * params.t1());
        let f2 = one.clone() - Cplx::with_val(prec, &zinv * params.t2());
        shared * f1 * f2
    };
    Ok(WeightPoint { aw, cher })
}

/// The plain circle weight at a point (unit-disk parameters only).
pub fn weight_aw(z: &Cplx, params: &ParameterSet, budget: &PrecisionBudget) -> Result<Cplx> {
    require_strict(params)?;
    Ok(weights_at(z, params, budget)?.aw)
}

/// The modified weight, computed from its explicit product form.
pub fn weight_cher(z: &Cplx, params: &ParameterSet, budget: &PrecisionBudget) -> Result<Cplx> {
    require_strict(params)?;
    Ok(weights_at(z, params, budget)?.cher)
}

/// The modified weight computed through the rational multiple of the plain
/// weight. The rational prefactor has a removable singularity at z = +-1;
/// points too close to it are rejected.
pub fn weight_cher_rational_form(
    z: &Cplx,
    params: &ParameterSet,
    budget: &PrecisionBudget,
) -> Result<Cplx> {
    require_strict(params)?;
    let prec = params.prec();
    let q = params.q();
    let one = Cplx::with_val(prec, 1);
    let zinv = Cplx::with_val(prec, z.clone().recip());
    let zinv2 = Cplx::with_val(prec, &zinv * &zinv);
    let denom_factor = one.clone() - &zinv2;
    if cabs(&denom_factor).to_f64() < 1e-15 {
        return Err(Error::NearSingularPoint);
    }
    // w_aw straight from its own displayed products
    let cq = qpoch_infinite_real(q, q, budget);
    let z2 = Cplx::with_val(prec, z * z);
    let mut aw = Cplx::with_val(prec, &cq)
        * qpoch_infinite(&z2, q, budget)
        * qpoch_infinite(&zinv2, q, budget);
    for j in 1..=4usize {
        let tz = Cplx::with_val(prec, z * params.t(j));
        let tzinv = Cplx::with_val(prec, &zinv * params.t(j));
        aw /= qpoch_infinite(&tz, q, budget);
        aw /= qpoch_infinite(&tzinv, q, budget);
    }
    let f1 = one.clone() - Cplx::with_val(prec, &zinv * params.t1());
    let f2 = one - Cplx::with_val(prec, &zinv * params.t2());
    Ok(aw * f1 * f2 / denom_factor)
}

fn require_strict(params: &ParameterSet) -> Result<()> {
    if params.is_strict() {
        Ok(())
    } else {
        Err(Error::DomainViolation(
            "continuous weights require unit-disk parameters".into(),
        ))
    }
}

/// Quadrature nodes and weight values for one node count.
pub struct QuadGrid {
    m: usize,
    nodes: Vec<Cplx>,
    w_cher: Vec<Cplx>,
    w_aw: Vec<Cplx>,
}

impl QuadGrid {
    fn build(m: usize, params: &ParameterSet, budget: &PrecisionBudget) -> Result<Self> {
        let prec = params.prec();
        let two_pi = Real::with_val(prec, budget.pi() * 2);
        let mut nodes = Vec::with_capacity(m);
        let mut w_cher = Vec::with_capacity(m);
        let mut w_aw = Vec::with_capacity(m);
        for j in 0..m {
            // half-offset keeps theta away from 0 and pi
            let theta = Real::with_val(prec, &two_pi * (j as f64 + 0.5)) / (m as f64);
            let (sin, cos) = theta.sin_cos(Real::new(prec));
            let z = Cplx::with_val(prec, (cos, sin));
            let w = weights_at(&z, params, budget)?;
            nodes.push(z);
            w_cher.push(w.cher);
            w_aw.push(w.aw);
        }
        Ok(QuadGrid {
            m,
            nodes,
            w_cher,
            w_aw,
        })
    }

    fn weights(&self, kind: WeightKind) -> &[Cplx] {
        match kind {
            WeightKind::Cher => &self.w_cher,
            WeightKind::Aw => &self.w_aw,
        }
    }

    /// (1/m) sum_j f(z_j) g(z_j) w_j, the periodic trapezoid value of the
    /// contour integral with measure dz/(2 pi i z).
    fn pair_integral(&self, f: &LaurentPoly, g: &LaurentPoly, kind: WeightKind) -> Cplx {
        let prec = self.nodes[0].prec().0;
        let mut acc = Cplx::with_val(prec, 0);
        let w = self.weights(kind);
        for (z, wj) in self.nodes.iter().zip(w) {
            let val = f.eval_raw(z) * g.eval_raw(z) * wj;
            acc += val;
        }
        acc / self.m as f64
    }

    /// Gram matrix of two polynomial lists from precomputed node values.
    fn gram(&self, fs: &[&LaurentPoly], gs: &[&LaurentPoly], kind: WeightKind) -> Vec<Vec<Cplx>> {
        let prec = self.nodes[0].prec().0;
        let w = self.weights(kind);
        let f_vals: Vec<Vec<Cplx>> = fs
            .iter()
            .map(|p| self.nodes.iter().map(|z| p.eval_raw(z)).collect())
            .collect();
        let g_vals: Vec<Vec<Cplx>> = gs
            .iter()
            .map(|p| {
                self.nodes
                    .iter()
                    .enumerate()
                    .map(|(j, z)| p.eval_raw(z) * &w[j])
                    .collect()
            })
            .collect();
        let mut out = vec![vec![Cplx::with_val(prec, 0); gs.len()]; fs.len()];
        for (i, fv) in f_vals.iter().enumerate() {
            for (k, gv) in g_vals.iter().enumerate() {
                let mut acc = Cplx::with_val(prec, 0);
                for j in 0..self.m {
                    acc += Cplx::with_val(prec, &fv[j] * &gv[j]);
                }
                out[i][k] = acc / self.m as f64;
            }
        }
        out
    }
}

/// Bilinear-form evaluation context: one parameter set, one budget, and a
/// cache of quadrature grids shared across calls (concurrent readers, single
/// writer per node count).
pub struct FormsCtx {
    params: ParameterSet,
    budget: PrecisionBudget,
    grids: Mutex<BTreeMap<usize, Arc<QuadGrid>>>,
    mu: OnceLock<Real>,
}

impl FormsCtx {
    pub fn new(params: ParameterSet, budget: PrecisionBudget) -> Result<Self> {
        require_strict(&params)?;
        Ok(FormsCtx {
            params,
            budget,
            grids: Mutex::new(BTreeMap::new()),
            mu: OnceLock::new(),
        })
    }

    /// Bypass the unit-disk gate for near-degenerate diagnostics. The
    /// quadrature still runs on the fixed circle; values computed this way
    /// are diagnostic, not pairings of the continued weight.
    pub fn new_unchecked(params: ParameterSet, budget: PrecisionBudget) -> Self {
        FormsCtx {
            params,
            budget,
            grids: Mutex::new(BTreeMap::new()),
            mu: OnceLock::new(),
        }
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn budget(&self) -> &PrecisionBudget {
        &self.budget
    }

    /// The weight normalization constant, cached.
    pub fn mu(&self) -> Result<Real> {
        if let Some(m) = self.mu.get() {
            return Ok(m.clone());
        }
        let m = aw_mu(&self.params, &self.budget)?;
        Ok(self.mu.get_or_init(|| m).clone())
    }

    fn grid(&self, m: usize) -> Result<Arc<QuadGrid>> {
        if let Some(g) = self.grids.lock().unwrap().get(&m) {
            return Ok(g.clone());
        }
        let built = Arc::new(QuadGrid::build(m, &self.params, &self.budget)?);
        let mut lock = self.grids.lock().unwrap();
        Ok(lock.entry(m).or_insert(built).clone())
    }

    fn cauchy_tol(&self) -> f64 {
        self.budget.verify_tol() / 10.0
    }

    fn quad_pair(
        &self,
        f: &LaurentPoly,
        g: &LaurentPoly,
        kind: WeightKind,
    ) -> Result<InnerProductResult> {
        let mut m = self.budget.quad_nodes_initial();
        let mut prev: Option<Cplx> = None;
        for _ in 0..=self.budget.quad_max_doublings() {
            let grid = self.grid(m)?;
            let val = grid.pair_integral(f, g, kind);
            if let Some(p) = prev {
                let diff = cabs(&(val.clone() - p));
                if diff.to_f64() < self.cauchy_tol() {
                    return Ok(InnerProductResult {
                        value: val,
                        method: Method::Quadrature,
                        error_estimate: diff,
                    });
                }
            }
            prev = Some(val);
            m *= 2;
        }
        Err(Error::NoConvergence(format!(
            "node doubling exhausted at {m} nodes"
        )))
    }

    /// The symmetric pairing <f, g> against the modified weight.
    pub fn inner_cher(&self, f: &LaurentPoly, g: &LaurentPoly) -> Result<InnerProductResult> {
        self.quad_pair(f, g, WeightKind::Cher)
    }

    /// The inverted-argument pairing: g enters as g(1/z).
    pub fn inner_cher_prime(&self, f: &LaurentPoly, g: &LaurentPoly) -> Result<InnerProductResult> {
        self.quad_pair(f, &g.sub_inv(), WeightKind::Cher)
    }

    /// The pairing against the plain circle weight.
    pub fn inner_aw(&self, f: &LaurentPoly, g: &LaurentPoly) -> Result<InnerProductResult> {
        self.quad_pair(f, g, WeightKind::Aw)
    }

    /// Gram matrix with node-doubling applied to the whole matrix at once;
    /// returns the matrix and the largest entrywise Cauchy difference.
    pub fn gram(
        &self,
        fs: &[&LaurentPoly],
        gs: &[&LaurentPoly],
        kind: WeightKind,
    ) -> Result<(Vec<Vec<Cplx>>, Real)> {
        let mut m = self.budget.quad_nodes_initial();
        let mut prev: Option<Vec<Vec<Cplx>>> = None;
        for _ in 0..=self.budget.quad_max_doublings() {
            let grid = self.grid(m)?;
            let val = grid.gram(fs, gs, kind);
            if let Some(p) = prev {
                let prec = self.params.prec();
                let mut worst = Real::with_val(prec, 0);
                for (ri, row) in val.iter().enumerate() {
                    for (ci, v) in row.iter().enumerate() {
                        let d = cabs(&(v.clone() - &p[ri][ci]));
                        if d > worst {
                            worst = d;
                        }
                    }
                }
                if worst.to_f64() < self.cauchy_tol() {
                    return Ok((val, worst));
                }
            }
            prev = Some(val);
            m *= 2;
        }
        Err(Error::NoConvergence(format!(
            "gram doubling exhausted at {m} nodes"
        )))
    }

    /// The moment pair of the gluing evaluation: quadrature of
    /// (t1 z, q t1/z; q)_j against (t3 z, t3/z; q)_k, and the closed infinite
    /// product it must equal.
    pub fn glued_moment(&self, j: u32, k: u32) -> Result<(InnerProductResult, Cplx)> {
        let prec = self.params.prec();
        let q = self.params.q();
        let f = glued_factor(&self.params, self.params.t1(), true, j);
        let g = glued_factor(&self.params, self.params.t3(), false, k);
        let quad = self.inner_cher(&f, &g)?;

        let t = |i: usize| self.params.t(i);
        let pairq = |a: usize, b: usize, shift: i64| -> Real {
            Real::with_val(prec, t(a) * t(b)) * rpow_i(q, shift)
        };
        let sigma_shift = Real::with_val(prec, self.params.t_product()) * rpow_i(q, (j + k) as i64);
        let numer = qpoch_infinite_real(&sigma_shift, q, &self.budget);
        let mut denom = Real::with_val(prec, 1);
        for (a, b, shift) in [
            (1usize, 2usize, j as i64 + 1),
            (1, 3, (j + k) as i64),
            (1, 4, j as i64),
            (2, 3, k as i64),
            (2, 4, 0),
            (3, 4, k as i64),
        ] {
            let f = qpoch_infinite_real(&pairq(a, b, shift), q, &self.budget);
            if f.to_f64().abs() < 1e-25 {
                return Err(Error::DegenerateParameters(
                    "glued-moment denominator vanishes".into(),
                ));
            }
            denom *= f;
        }
        let closed = Cplx::with_val(prec, numer / denom);
        Ok((quad, closed))
    }

    /// Exact closed-form diagonal values of the bilinear form.
    pub fn norm_closed(&self, family: NormFamily, n: u32) -> Result<Cplx> {
        let prec = self.params.prec();
        let v = self.norm_closed_real(family, n)?;
        Ok(Cplx::with_val(prec, v))
    }

    fn norm_r(&self, n: u32) -> Result<Real> {
        let prec = self.params.prec();
        let q = self.params.q();
        let one = Real::with_val(prec, 1);
        let t = |i: usize| self.params.t(i);
        let pair = |a: usize, b: usize| Real::with_val(prec, t(a) * t(b));
        let sigma = self.params.t_product();
        let mu = self.mu()?;
        let mut numer = Real::with_val(prec, &one - pair(1, 2));
        numer *= rpow_i(t(1), 2 * n as i64);
        numer *= qpoch_finite_real(q, q, n);
        numer *= qpoch_finite_real(&pair(2, 3), q, n);
        numer *= qpoch_finite_real(&pair(2, 4), q, n);
        numer *= qpoch_finite_real(&pair(3, 4), q, n);
        let sig_qn1 = Real::with_val(prec, &sigma * rpow_i(q, n as i64 - 1));
        numer *= qpoch_finite_real(&sig_qn1, q, n);
        let mut denom = qpoch_finite_real(&pair(1, 2), q, n);
        denom *= qpoch_finite_real(&pair(1, 3), q, n);
        denom *= qpoch_finite_real(&pair(1, 4), q, n);
        denom *= qpoch_finite_real(&sigma, q, 2 * n);
        if denom.to_f64().abs() < 1e-30 {
            return Err(Error::DegenerateParameters(
                "norm denominator vanishes".into(),
            ));
        }
        Ok(numer / denom * mu)
    }

    /// q^n (1 - t1t2)(1 - t3t4/q) / ((1 - t1t2 q^n)(1 - t3t4 q^{n-1})).
    fn t_norm_ratio(&self, n: u32) -> Result<Real> {
        let prec = self.params.prec();
        let q = self.params.q();
        let one = Real::with_val(prec, 1);
        let t12 = Real::with_val(prec, self.params.t1() * self.params.t2());
        let t34 = Real::with_val(prec, self.params.t3() * self.params.t4());
        let numer = rpow_i(q, n as i64)
            * Real::with_val(prec, &one - &t12)
            * Real::with_val(prec, &one - Real::with_val(prec, &t34 / q));
        let denom = Real::with_val(
            prec,
            &one - Real::with_val(prec, &t12 * rpow_i(q, n as i64)),
        ) * Real::with_val(
            prec,
            &one - Real::with_val(prec, &t34 * rpow_i(q, n as i64 - 1)),
        );
        if denom.to_f64().abs() < 1e-30 {
            return Err(Error::DegenerateParameters(
                "norm ratio denominator vanishes".into(),
            ));
        }
        Ok(numer / denom)
    }

    /// <a R + b S, c R + d S> expanded through the R, S pairings.
    fn rs_combination_norm(&self, n: u32, a: &Real, b: &Real, c: &Real, d: &Real) -> Result<Real> {
        let prec = self.params.prec();
        let nr = self.norm_r(n)?;
        let lam_over_t1 = {
            let one = Real::with_val(prec, 1);
            let l13 = Real::with_val(
                prec,
                &one - Real::with_val(prec, self.params.t1() * self.params.t3()),
            );
            let l14 = Real::with_val(
                prec,
                &one - Real::with_val(prec, self.params.t1() * self.params.t4()),
            );
            if self.params.t1().to_f64() == 0.0 {
                return Err(Error::DegenerateParameters(
                    "combination norms need t1 != 0".into(),
                ));
            }
            Real::with_val(prec, l13 * l14) / self.params.t1()
        };
        let mut acc = Real::with_val(prec, a * c) * &nr;
        let cross = Real::with_val(
            prec,
            Real::with_val(prec, a * d) + Real::with_val(prec, b * c),
        );
        acc += cross * &lam_over_t1 * &nr;
        let bd = Real::with_val(prec, b * d);
        if bd.to_f64() != 0.0 {
            acc += bd * self.norm_closed_real(NormFamily::S, n)?;
        }
        Ok(acc)
    }

    fn xy_coeffs(&self, family: NormFamily, n: u32) -> (Real, Real) {
        let prec = self.params.prec();
        let q = self.params.q();
        let one = Real::with_val(prec, 1);
        let k = bases::kappa(&self.params);
        let qn = rpow_i(q, n as i64);
        let sig_qn1 = Real::with_val(prec, self.params.t_product() * rpow_i(q, n as i64 - 1));
        match family {
            NormFamily::XNeg => (
                k,
                Real::with_val(prec, -(self.params.t1().clone() * (one.clone() - sig_qn1))),
            ),
            NormFamily::XPos => (
                k,
                Real::with_val(prec, self.params.t1() * self.params.t1())
                    * self.params.t2()
                    * Real::with_val(prec, &one - &qn),
            ),
            NormFamily::YPos => (
                Real::with_val(prec, &k * &qn),
                Real::with_val(prec, self.params.t1() * Real::with_val(prec, &one - &qn)),
            ),
            NormFamily::YNeg => (
                Real::with_val(prec, &k * rpow_i(q, n as i64 - 1))
                    * Real::with_val(prec, self.params.t3() * self.params.t4()),
                Real::with_val(prec, -(self.params.t1().clone() * (one.clone() - sig_qn1))),
            ),
            _ => unreachable!(),
        }
    }

    fn norm_closed_real(&self, family: NormFamily, n: u32) -> Result<Real> {
        let prec = self.params.prec();
        let q = self.params.q();
        let one = Real::with_val(prec, 1);
        match family {
            NormFamily::R => self.norm_r(n),
            NormFamily::T => Ok(self.t_norm_ratio(n)? * self.norm_r(n)?),
            NormFamily::S => {
                if n == 0 {
                    return Err(Error::InvalidParameters("S norm needs n >= 1".into()));
                }
                let t1 = self.params.t1();
                if t1.to_f64() == 0.0 {
                    return Err(Error::DegenerateParameters("S norm needs t1 != 0".into()));
                }
                let lam = {
                    let l13 =
                        Real::with_val(prec, &one - Real::with_val(prec, t1 * self.params.t3()));
                    let l14 =
                        Real::with_val(prec, &one - Real::with_val(prec, t1 * self.params.t4()));
                    Real::with_val(prec, l13 * l14)
                };
                let t12 = Real::with_val(prec, t1 * self.params.t2());
                let t34 = Real::with_val(prec, self.params.t3() * self.params.t4());
                let qn = rpow_i(q, n as i64);
                let sig_qn1 =
                    Real::with_val(prec, self.params.t_product() * rpow_i(q, n as i64 - 1));
                let numer = qn.clone()
                    * Real::with_val(prec, &lam * &lam)
                    * Real::with_val(prec, &one - &t12)
                    * Real::with_val(prec, &one - Real::with_val(prec, &t34 / q));
                let denom = Real::with_val(prec, qn - &one)
                    * Real::with_val(prec, &one - sig_qn1)
                    * rpow_i(t1, 2);
                if denom.to_f64().abs() < 1e-30 {
                    return Err(Error::DegenerateParameters(
                        "S norm denominator vanishes".into(),
                    ));
                }
                Ok(numer / denom * self.norm_r(n)?)
            }
            NormFamily::U => {
                if n == 0 {
                    return Err(Error::InvalidParameters("U norm needs n >= 1".into()));
                }
                let c = bases::connection_c(n, &self.params)?;
                if c.to_f64().abs() < 1e-40 {
                    return Err(Error::DegenerateParameters(
                        "connection constant vanishes".into(),
                    ));
                }
                // <U_n, U_n> = c_n^-2 (<T_n, T_n> - <R_n, R_n>)
                let ratio = self.t_norm_ratio(n)?;
                let bracket = Real::with_val(prec, ratio - &one);
                Ok(bracket * self.norm_r(n)? / Real::with_val(prec, &c * &c))
            }
            NormFamily::XPos | NormFamily::XNeg | NormFamily::YPos | NormFamily::YNeg => {
                if n == 0 && matches!(family, NormFamily::XNeg | NormFamily::YNeg) {
                    return Err(Error::InvalidParameters(
                        "negative-index norm needs n >= 1".into(),
                    ));
                }
                let (a, b) = self.xy_coeffs(family, n);
                self.rs_combination_norm(n, &a, &b, &a, &b)
            }
            NormFamily::YPrimePairing => {
                if n == 0 {
                    return Err(Error::InvalidParameters("pairing norm needs n >= 1".into()));
                }
                // <Y_n, Y'_n>' = -<Y_n, X_n> / (t1^3 t2 t3 t4 q^n); the
                // inversion scaling divides, with the reciprocal q power
                let (ya, yb) = self.xy_coeffs(NormFamily::YPos, n);
                let (xa, xb) = self.xy_coeffs(NormFamily::XPos, n);
                let cross = self.rs_combination_norm(n, &ya, &yb, &xa, &xb)?;
                let scale = rpow_i(self.params.t1(), 3)
                    * self.params.t2()
                    * self.params.t3()
                    * self.params.t4()
                    * rpow_i(q, n as i64);
                if scale.to_f64().abs() < 1e-40 {
                    return Err(Error::DegenerateParameters("pairing scale vanishes".into()));
                }
                Ok(-cross / scale)
            }
            NormFamily::XNegPrimePairing => {
                if n == 0 {
                    return Err(Error::InvalidParameters("pairing norm needs n >= 1".into()));
                }
                // <X_-n, X'_-n>' = -<X_-n, Y_-n> / (t1^3 t2 t3^2 t4^2 q^{n-1});
                // the inversion scaling divides here as well
                let (xa, xb) = self.xy_coeffs(NormFamily::XNeg, n);
                let (ya, yb) = self.xy_coeffs(NormFamily::YNeg, n);
                let cross = self.rs_combination_norm(n, &xa, &xb, &ya, &yb)?;
                let scale = rpow_i(self.params.t1(), 3)
                    * self.params.t2()
                    * rpow_i(self.params.t3(), 2)
                    * rpow_i(self.params.t4(), 2)
                    * rpow_i(q, n as i64 - 1);
                if scale.to_f64().abs() < 1e-40 {
                    return Err(Error::DegenerateParameters("pairing scale vanishes".into()));
                }
                Ok(-cross / scale)
            }
        }
    }

    /// Closed form of the cross pairing of R_n against T_n under the plain
    /// weight at m = n: (1 + q^n)/(1 - t1 t2 q^n) times the R norm. This is
    /// the form forced by the evenness projection of T_n onto the symmetric
    /// polynomials together with the circle orthogonality; the display it
    /// replaces is available from
    /// [`aw_cross_closed_as_printed`](Self::aw_cross_closed_as_printed).
    pub fn aw_cross_closed(&self, n: u32) -> Result<Cplx> {
        let prec = self.params.prec();
        let one = Real::with_val(prec, 1);
        let qn = rpow_i(self.params.q(), n as i64);
        let t12qn = Real::with_val(
            prec,
            Real::with_val(prec, self.params.t1() * self.params.t2()) * &qn,
        );
        let denom = Real::with_val(prec, &one - &t12qn);
        if denom.to_f64().abs() < 1e-30 {
            return Err(Error::DegenerateParameters(
                "cross-pairing denominator vanishes".into(),
            ));
        }
        let nr = self.norm_r(n)?;
        Ok(Cplx::with_val(
            prec,
            nr * Real::with_val(prec, &one + &qn) / denom,
        ))
    }

    /// The cross-pairing value exactly as displayed, kept for the
    /// informational report row (it disagrees with the circle normalization
    /// already at n = 0, where the pairing of two units is twice the weight
    /// constant).
    pub fn aw_cross_closed_as_printed(&self, n: u32) -> Result<Cplx> {
        let prec = self.params.prec();
        let q = self.params.q();
        let t = |i: usize| self.params.t(i);
        let pair = |a: usize, b: usize| Real::with_val(prec, t(a) * t(b));
        let sigma = self.params.t_product();
        let qn = rpow_i(q, n as i64);
        let mut numer = rpow_i(
            &Real::with_val(prec, -Real::with_val(prec, t(1) * t(1))),
            n as i64,
        );
        numer *= rpow_i(q, (n as i64) * (n as i64 - 1) / 2);
        numer *= Real::with_val(prec, Real::with_val(prec, 1) + &qn);
        let sig_q2n = Real::with_val(prec, &sigma * rpow_i(q, 2 * n as i64));
        numer *= qpoch_infinite_real(&sig_q2n, q, &self.budget);
        numer *= qpoch_finite_real(&pair(2, 3), q, n);
        numer *= qpoch_finite_real(&pair(2, 4), q, n);
        numer *= qpoch_finite_real(&pair(3, 4), q, n);
        let mut denom = Real::with_val(prec, 2);
        for a in 1..=4usize {
            for b in (a + 1)..=4usize {
                let f = qpoch_infinite_real(&pair(a, b), q, &self.budget);
                if f.to_f64().abs() < 1e-25 {
                    return Err(Error::DegenerateParameters(
                        "cross-pairing denominator vanishes".into(),
                    ));
                }
                denom *= f;
            }
        }
        Ok(Cplx::with_val(prec, numer / denom))
    }
}

/// (a z, b/z; q)_j expanded as a Laurent polynomial, where the descending
/// argument is q-shifted for the ascending family (`ascending_shift` true
/// gives (t z; q)_j (q t / z; q)_j, false gives (t z; q)_j (t / z; q)_j).
fn glued_factor(params: &ParameterSet, t: &Real, ascending_shift: bool, j: u32) -> LaurentPoly {
    let prec = params.prec();
    let q = params.q();
    let one = Real::with_val(prec, 1);
    let mut acc = LaurentPoly::one(prec);
    let mut up = t.clone();
    let mut down = if ascending_shift {
        Real::with_val(prec, t * q)
    } else {
        t.clone()
    };
    for _ in 0..j {
        let quad = LaurentPoly::from_coeffs(
            -1,
            vec![
                Cplx::with_val(prec, -&down),
                Cplx::with_val(prec, Real::with_val(prec, &up * &down) + &one),
                Cplx::with_val(prec, -&up),
            ],
            prec,
        );
        acc = acc.mul(&quad);
        up *= q;
        down *= q;
    }
    acc
}

/// |a - b| / max(|a|, |b|) with a zero-safe fallback to the absolute
/// difference.
pub fn rel_diff(a: &Cplx, b: &Cplx) -> f64 {
    let d = cabs(&(a.clone() - b)).to_f64();
    let scale = cabs(a).to_f64().max(cabs(b).to_f64());
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{build_r, build_s, build_t, build_u};

    fn ctx() -> FormsCtx {
        let b = PrecisionBudget::default();
        let p = ParameterSet::new(0.35, [0.4, -0.3, 0.25, -0.15], &b).unwrap();
        FormsCtx::new(p, b).unwrap()
    }

    #[test]
    fn cher_weight_forms_agree() {
        let c = ctx();
        for k in 0..32 {
            let theta = 0.05 + 6.1 * (k as f64) / 32.0;
            let z = c.budget().unit_point(theta);
            let w1 = weight_cher(&z, c.params(), c.budget()).unwrap();
            let w2 = weight_cher_rational_form(&z, c.params(), c.budget()).unwrap();
            assert!(rel_diff(&w1, &w2) < 1e-35, "theta={theta}");
        }
    }

    #[test]
    fn aw_weight_conjugate_symmetry() {
        let c = ctx();
        let z = c.budget().unit_point(1.234);
        let zbar = c.budget().unit_point(-1.234);
        let w = weight_aw(&z, c.params(), c.budget()).unwrap();
        let wbar = weight_aw(&zbar, c.params(), c.budget()).unwrap();
        let conj = Cplx::with_val(c.params().prec(), w.conj_ref());
        assert!(cabs(&(conj - wbar)).to_f64() < 1e-45);
    }

    #[test]
    fn unit_pairing_value() {
        // <1, 1> = (1 - t1 t2) mu
        let c = ctx();
        let one = LaurentPoly::one(c.params().prec());
        let got = c.inner_cher(&one, &one).unwrap();
        let mu = c.mu().unwrap();
        let t12 = Real::with_val(c.params().prec(), c.params().t1() * c.params().t2());
        let expected = Cplx::with_val(
            c.params().prec(),
            (Real::with_val(c.params().prec(), 1) - t12) * mu,
        );
        assert!(rel_diff(&got.value, &expected) < 1e-24);
        assert_eq!(got.method, Method::Quadrature);
    }

    #[test]
    fn aw_unit_pairing_is_twice_mu() {
        let c = ctx();
        let one = LaurentPoly::one(c.params().prec());
        let got = c.inner_aw(&one, &one).unwrap();
        let expected = Cplx::with_val(c.params().prec(), c.mu().unwrap() * 2);
        assert!(rel_diff(&got.value, &expected) < 1e-24);
    }

    #[test]
    fn r_orthogonality_small() {
        let c = ctx();
        let b = c.budget().clone();
        let r0 = build_r(0, c.params(), &b).unwrap();
        let r1 = build_r(1, c.params(), &b).unwrap();
        let off = c.inner_cher(&r1, &r0).unwrap();
        assert!(cabs(&off.value).to_f64() < 1e-25);
        let diag = c.inner_cher(&r1, &r1).unwrap();
        let closed = c.norm_closed(NormFamily::R, 1).unwrap();
        assert!(rel_diff(&diag.value, &closed) < 1e-22);
    }

    #[test]
    fn bilinearity() {
        let c = ctx();
        let b = c.budget().clone();
        let prec = c.params().prec();
        let f = build_r(2, c.params(), &b).unwrap();
        let h = build_u(1, c.params(), &b).unwrap();
        let g = build_t(2, c.params(), &b).unwrap();
        let a = Cplx::with_val(prec, (0.7, -0.2));
        let bb = Cplx::with_val(prec, (-1.3, 0.45));
        let combo = f.scale(&a).add(&h.scale(&bb));
        let lhs = c.inner_cher(&combo, &g).unwrap().value;
        let rhs =
            c.inner_cher(&f, &g).unwrap().value * &a + c.inner_cher(&h, &g).unwrap().value * &bb;
        assert!(cabs(&(lhs - rhs)).to_f64() < 1e-24);
    }

    #[test]
    fn inverted_pairing_of_constants_matches_plain() {
        let c = ctx();
        let one = LaurentPoly::one(c.params().prec());
        let plain = c.inner_cher(&one, &one).unwrap().value;
        let inverted = c.inner_cher_prime(&one, &one).unwrap().value;
        assert!(cabs(&(plain - inverted)).to_f64() < 1e-40);
    }

    #[test]
    fn glued_moment_base_case() {
        // j = k = 0 reduces to (1 - t1 t2) mu
        let c = ctx();
        let (quad, closed) = c.glued_moment(0, 0).unwrap();
        assert!(rel_diff(&quad.value, &closed) < 1e-22);
        let prec = c.params().prec();
        let t12 = Real::with_val(prec, c.params().t1() * c.params().t2());
        let expected = Cplx::with_val(prec, (Real::with_val(prec, 1) - t12) * c.mu().unwrap());
        assert!(rel_diff(&closed, &expected) < 1e-35);
    }

    #[test]
    fn glued_moments_match_quadrature() {
        let c = ctx();
        for (j, k) in [(1u32, 0u32), (0, 1), (2, 2)] {
            let (quad, closed) = c.glued_moment(j, k).unwrap();
            assert!(rel_diff(&quad.value, &closed) < 1e-22, "j={j} k={k}");
        }
    }

    #[test]
    fn norm_ratios_match_statements() {
        let c = ctx();
        let prec = c.params().prec();
        let q = c.params().q();
        let one = Real::with_val(prec, 1);
        for n in 1..=4u32 {
            // T/R ratio
            let nr = c.norm_closed(NormFamily::R, n).unwrap();
            let nt = c.norm_closed(NormFamily::T, n).unwrap();
            let ratio = Cplx::with_val(prec, &nt / &nr);
            let expected = Cplx::with_val(prec, c.t_norm_ratio(n).unwrap());
            assert!(rel_diff(&ratio, &expected) < 1e-40);
            // S * t1^2 / R ratio
            let ns = c.norm_closed(NormFamily::S, n).unwrap();
            let t1sq = rpow_i(c.params().t1(), 2);
            let lhs = Cplx::with_val(prec, ns * Cplx::with_val(prec, &t1sq) / nr);
            let lam = {
                let l13 = Real::with_val(
                    prec,
                    &one - Real::with_val(prec, c.params().t1() * c.params().t3()),
                );
                let l14 = Real::with_val(
                    prec,
                    &one - Real::with_val(prec, c.params().t1() * c.params().t4()),
                );
                Real::with_val(prec, l13 * l14)
            };
            let t12 = Real::with_val(prec, c.params().t1() * c.params().t2());
            let t34q = Real::with_val(
                prec,
                Real::with_val(prec, c.params().t3() * c.params().t4()) / q,
            );
            let qn = rpow_i(q, n as i64);
            let sig = Real::with_val(prec, c.params().t_product() * rpow_i(q, n as i64 - 1));
            let expect = Real::with_val(prec, &qn * Real::with_val(prec, &lam * &lam))
                * Real::with_val(prec, &one - &t12)
                * Real::with_val(prec, &one - &t34q)
                / (Real::with_val(prec, &qn - &one) * Real::with_val(prec, &one - &sig));
            assert!(rel_diff(&lhs, &Cplx::with_val(prec, expect)) < 1e-40);
        }
    }

    #[test]
    fn closed_norms_match_quadrature_spot() {
        let c = ctx();
        let b = c.budget().clone();
        let n = 2u32;
        for (family, poly) in [
            (NormFamily::R, build_r(n, c.params(), &b).unwrap()),
            (NormFamily::T, build_t(n, c.params(), &b).unwrap()),
            (NormFamily::S, build_s(n, c.params(), &b).unwrap()),
            (NormFamily::U, build_u(n, c.params(), &b).unwrap()),
        ] {
            let quad = c.inner_cher(&poly, &poly).unwrap().value;
            let closed = c.norm_closed(family, n).unwrap();
            assert!(
                rel_diff(&quad, &closed) < 1e-20,
                "{family:?}: quad={quad} closed={closed}"
            );
        }
    }

    #[test]
    fn relaxed_params_are_rejected() {
        let b = PrecisionBudget::default();
        let p = ParameterSet::new(0.35, [0.4, -0.3, 0.25, -0.15], &b)
            .unwrap()
            .inverted()
            .unwrap();
        assert!(matches!(
            FormsCtx::new(p.clone(), b.clone()),
            Err(Error::DomainViolation(_))
        ));
        let z = b.unit_point(0.4);
        assert!(matches!(
            weight_aw(&z, &p, &b),
            Err(Error::DomainViolation(_))
        ));
    }
}
