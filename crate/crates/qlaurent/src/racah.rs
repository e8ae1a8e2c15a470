//! The discrete bilinear form that replaces the contour pairing when
//! t1 t_j = q^-N for j = 3 or 4: a finite weighted sum over 2N+1 nodes, with
//! finite q-Pochhammer weights and no truncation error.

use crate::bases::{build_r, build_s, build_t, build_u, build_x, build_y};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::params::ParameterSet;
use crate::precision::{cabs, rpow_i, Cplx, PrecisionBudget, Real};

/// Parameters in the discrete regime: the truncating entry is set to
/// q^-N / t1 exactly, which necessarily leaves the unit disk; the base set is
/// therefore relaxed and continuous-weight operations reject it.
#[derive(Debug, Clone)]
pub struct RacahConfig {
    params: ParameterSet,
    n_trunc: u32,
    pair: u8,
}

impl RacahConfig {
    /// Build the configuration with t_pair = q^-N / t1 imposed exactly at
    /// working precision. `pair` must be 3 or 4.
    pub fn new(
        q: f64,
        t1: f64,
        t2: f64,
        t_other: f64,
        n_trunc: u32,
        pair: u8,
        budget: &PrecisionBudget,
    ) -> Result<Self> {
        if !(pair == 3 || pair == 4) {
            return Err(Error::InvalidParameters(format!(
                "truncating pair must be 3 or 4, got {pair}"
            )));
        }
        if n_trunc == 0 {
            return Err(Error::InvalidParameters(
                "truncation order N must be positive".into(),
            ));
        }
        if !(0.0 < q && q < 1.0) {
            return Err(Error::InvalidParameters(format!("need 0 < q < 1, got {q}")));
        }
        for (label, v) in [("t1", t1), ("t2", t2), ("t_other", t_other)] {
            if v.abs() >= 1.0 || v == 0.0 {
                return Err(Error::InvalidParameters(format!(
                    "need 0 < |{label}| < 1, got {v}"
                )));
            }
        }
        let prec = budget.prec();
        let qr = budget.real(q);
        let t1r = budget.real(t1);
        let t_pair = Real::with_val(prec, rpow_i(&qr, -(n_trunc as i64)) / &t1r);
        let t = match pair {
            3 => [t1r, budget.real(t2), t_pair, budget.real(t_other)],
            _ => [t1r, budget.real(t2), budget.real(t_other), t_pair],
        };
        // the t1 t2 = q^-k cases collapse a weight term and leave T_N, U_N
        // undefined; they are rejected outright rather than partially handled
        let t1t2 = Real::with_val(prec, &t[0] * &t[1]);
        for k in 0..=n_trunc {
            let gap = Real::with_val(prec, &t1t2 * rpow_i(&qr, k as i64)) - 1u32;
            if gap.to_f64().abs() < 1e-10 {
                return Err(Error::DegenerateParameters(format!(
                    "t1 t2 = q^-{k} is outside the supported discrete regime"
                )));
            }
        }
        let params = ParameterSet::relaxed(qr, t)?;
        Ok(RacahConfig {
            params,
            n_trunc,
            pair,
        })
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn n_trunc(&self) -> u32 {
        self.n_trunc
    }

    pub fn pair(&self) -> u8 {
        self.pair
    }

    /// The 2N+1 nodes and weights of the discrete form: t1 q^k for
    /// k = 1..N with the (-t1 t2)-carrying weight, then q^-k / t1 for
    /// k = 0..N.
    pub fn nodes_and_weights(&self) -> Result<Vec<(Cplx, Real)>> {
        let p = &self.params;
        let prec = p.prec();
        let q = p.q();
        let one = Real::with_val(prec, 1);
        let n = self.n_trunc;
        let t1 = p.t1();
        let sigma = p.t_product();
        if sigma.to_f64() == 0.0 {
            return Err(Error::DegenerateWeight("t1 t2 t3 t4 vanishes".into()));
        }
        let arg = Real::with_val(prec, q / &sigma);

        let qt1sq = Real::with_val(prec, Real::with_val(prec, t1 * t1) * q);
        let qt1t2 = Real::with_val(prec, Real::with_val(prec, t1 * p.t2()) * q);
        let t1t3 = Real::with_val(prec, t1 * p.t3());
        let t1t4 = Real::with_val(prec, t1 * p.t4());
        let qt1_t2 = Real::with_val(prec, Real::with_val(prec, q * t1) / p.t2());
        let qt1_t3 = Real::with_val(prec, Real::with_val(prec, q * t1) / p.t3());
        let qt1_t4 = Real::with_val(prec, Real::with_val(prec, q * t1) / p.t4());

        // running products; the denominators are checked factor by factor
        let mut out = Vec::with_capacity(2 * n as usize + 1);
        let factor = |x: &Real, k: u32| -> Result<Real> {
            let f = Real::with_val(prec, &one - Real::with_val(prec, x * rpow_i(q, k as i64)));
            if f.to_f64().abs() < 1e-20 {
                return Err(Error::DegenerateWeight(format!(
                    "weight denominator factor vanishes at step {k}"
                )));
            }
            Ok(f)
        };

        // first family: k = 1..N at nodes t1 q^k
        let neg_t1t2 = Real::with_val(prec, -Real::with_val(prec, t1 * p.t2()));
        let mut w = Real::with_val(prec, 1);
        for k in 1..=n {
            // advance the ratio from level k-1 to k
            let km1 = k - 1;
            let mut ratio = arg.clone();
            for x in [&qt1sq, &qt1t2] {
                if km1 >= 1 {
                    ratio *= Real::with_val(
                        prec,
                        &one - Real::with_val(prec, x * rpow_i(q, km1 as i64 - 1)),
                    );
                }
            }
            for x in [&t1t3, &t1t4] {
                ratio *=
                    Real::with_val(prec, &one - Real::with_val(prec, x * rpow_i(q, km1 as i64)));
            }
            if km1 >= 1 {
                ratio /= factor(&qt1_t2, km1 - 1)?;
                ratio /= factor(q, km1 - 1)?;
            }
            ratio /= factor(&qt1_t3, km1)?;
            ratio /= factor(&qt1_t4, km1)?;
            w *= ratio;
            let node = Cplx::with_val(prec, Real::with_val(prec, t1 * rpow_i(q, k as i64)));
            out.push((node, Real::with_val(prec, &w * &neg_t1t2)));
        }

        // second family: k = 0..N at nodes q^-k / t1
        let mut w = Real::with_val(prec, 1);
        for k in 0..=n {
            if k > 0 {
                let km1 = k - 1;
                let mut ratio = arg.clone();
                for x in [&qt1sq, &qt1t2, &t1t3, &t1t4] {
                    ratio *= Real::with_val(
                        prec,
                        &one - Real::with_val(prec, x * rpow_i(q, km1 as i64)),
                    );
                }
                for x in [&qt1_t2, &qt1_t3, &qt1_t4] {
                    ratio /= factor(x, km1)?;
                }
                ratio /= factor(q, km1)?;
                w *= ratio;
            }
            let node = Cplx::with_val(prec, Real::with_val(prec, rpow_i(q, -(k as i64)) / t1));
            out.push((node, w.clone()));
        }
        Ok(out)
    }
}

/// The finite weighted sum < f, g > over the discrete nodes.
pub fn racah_inner(f: &LaurentPoly, g: &LaurentPoly, config: &RacahConfig) -> Result<Cplx> {
    let prec = config.params().prec();
    let mut acc = Cplx::with_val(prec, 0);
    for (node, w) in config.nodes_and_weights()? {
        let v = f.eval_raw(&node) * g.eval_raw(&node) * Cplx::with_val(prec, &w);
        acc += v;
    }
    Ok(acc)
}

/// Like [`racah_inner`] but also returns the sum of absolute term values,
/// the natural scale to measure cancellation against.
pub fn racah_inner_scaled(
    f: &LaurentPoly,
    g: &LaurentPoly,
    config: &RacahConfig,
) -> Result<(Cplx, Real)> {
    let prec = config.params().prec();
    let mut acc = Cplx::with_val(prec, 0);
    let mut scale = Real::with_val(prec, 0);
    for (node, w) in config.nodes_and_weights()? {
        let v = f.eval_raw(&node) * g.eval_raw(&node) * Cplx::with_val(prec, &w);
        scale += cabs(&v);
        acc += v;
    }
    Ok((acc, scale))
}

/// The four discrete-orthogonal bases of V_N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RacahBasis {
    RU,
    TS,
    X,
    Y,
}

impl RacahBasis {
    pub const ALL: [RacahBasis; 4] = [RacahBasis::RU, RacahBasis::TS, RacahBasis::X, RacahBasis::Y];

    pub fn label(&self) -> &'static str {
        match self {
            RacahBasis::RU => "R0..RN,U1..UN",
            RacahBasis::TS => "T0..TN,S1..SN",
            RacahBasis::X => "X-N..XN",
            RacahBasis::Y => "Y-N..YN",
        }
    }
}

/// Build the members of one discrete basis.
pub fn basis_members(
    basis: RacahBasis,
    config: &RacahConfig,
    budget: &PrecisionBudget,
) -> Result<Vec<(String, LaurentPoly)>> {
    let p = config.params();
    let n = config.n_trunc();
    let mut out = Vec::new();
    match basis {
        RacahBasis::RU => {
            for m in 0..=n {
                out.push((format!("R{m}"), build_r(m, p, budget)?));
            }
            for m in 1..=n {
                out.push((format!("U{m}"), build_u(m, p, budget)?));
            }
        }
        RacahBasis::TS => {
            for m in 0..=n {
                out.push((format!("T{m}"), build_t(m, p, budget)?));
            }
            for m in 1..=n {
                out.push((format!("S{m}"), build_s(m, p, budget)?));
            }
        }
        RacahBasis::X => {
            for m in -(n as i64)..=n as i64 {
                out.push((format!("X{m}"), build_x(m, p, budget)?));
            }
        }
        RacahBasis::Y => {
            for m in -(n as i64)..=n as i64 {
                out.push((format!("Y{m}"), build_y(m, p, budget)?));
            }
        }
    }
    Ok(out)
}

/// One entry of the discrete orthogonality report.
#[derive(Debug, Clone)]
pub struct RacahPairResult {
    pub basis: RacahBasis,
    pub left: String,
    pub right: String,
    pub diagonal: bool,
    /// |value| / scale for off-diagonal pairs; |value| / scale for diagonal
    /// entries (which must stay away from zero).
    pub scaled_value: f64,
}

/// Pairwise discrete products within one basis, scaled by the absolute term
/// sums.
pub fn racah_orthogonality(
    basis: RacahBasis,
    config: &RacahConfig,
    budget: &PrecisionBudget,
) -> Result<Vec<RacahPairResult>> {
    let members = basis_members(basis, config, budget)?;
    let nodes = config.nodes_and_weights()?;
    let prec = config.params().prec();
    // evaluate every member once per node
    let values: Vec<Vec<Cplx>> = members
        .iter()
        .map(|(_, p)| nodes.iter().map(|(z, _)| p.eval_raw(z)).collect())
        .collect();
    let mut out = Vec::new();
    for i in 0..members.len() {
        for j in i..members.len() {
            let mut acc = Cplx::with_val(prec, 0);
            let mut scale = Real::with_val(prec, 0);
            for (k, (_, w)) in nodes.iter().enumerate() {
                let term =
                    Cplx::with_val(prec, &values[i][k] * &values[j][k]) * Cplx::with_val(prec, w);
                scale += cabs(&term);
                acc += term;
            }
            let scaled = if scale.to_f64() > 0.0 {
                (cabs(&acc) / scale).to_f64()
            } else {
                cabs(&acc).to_f64()
            };
            out.push(RacahPairResult {
                basis,
                left: members[i].0.clone(),
                right: members[j].0.clone(),
                diagonal: i == j,
                scaled_value: scaled,
            });
        }
    }
    Ok(out)
}
