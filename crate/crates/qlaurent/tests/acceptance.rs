//! End-to-end acceptance suite: every verification criterion at its pinned
//! tolerance, on the canonical parameter set plus four seeded admissible
//! sets, printing one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use qlaurent::bases::Family;
use qlaurent::forms::{rel_diff, FormsCtx, NormFamily};
use qlaurent::laurent::LaurentPoly;
use qlaurent::params::ParameterSet;
use qlaurent::precision::{cabs, Cplx, PrecisionBudget, Real};
use qlaurent::qcore::aw_mu;
use qlaurent::qhyper::vwp65_check;
use qlaurent::racah::{racah_inner, RacahConfig};
use qlaurent::recurrence::regenerate_r_forward;
use qlaurent::report::{
    asymptotics_rows, failures, random_admissible_sets, run_suite, selftest_battery, to_csv,
    ReportRow, SuiteKind, SuiteOptions,
};
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

const SEED: u64 = 20120804;

/// Criteria with stated runtime bounds must not time-share the machine with
/// sibling tests, so every criterion runs under one lock.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn budget() -> PrecisionBudget {
    PrecisionBudget::default()
}

fn canonical(budget: &PrecisionBudget) -> ParameterSet {
    ParameterSet::new(0.35, [0.4, -0.3, 0.25, -0.15], budget).unwrap()
}

/// Canonical set plus the four seeded admissible sets.
fn parameter_sets(budget: &PrecisionBudget) -> Vec<ParameterSet> {
    let mut sets = vec![canonical(budget)];
    sets.extend(random_admissible_sets(4, SEED, budget));
    sets
}

fn opts() -> SuiteOptions {
    SuiteOptions {
        seed: SEED,
        ..SuiteOptions::default()
    }
}

fn report_outcome(criterion: &str, rows: &[ReportRow], elapsed: Duration, bound: Option<Duration>) {
    let bad = failures(rows);
    let worst = rows
        .iter()
        .filter(|r| !r.is_informational())
        .map(|r| r.residual / r.tolerance)
        .fold(0.0f64, f64::max);
    let status = if bad.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "ACCEPTANCE {criterion}: {status} ({} checks, worst residual/tolerance {:.2e}, {:.1?})",
        rows.len(),
        worst,
        elapsed
    );
    if !bad.is_empty() {
        for f in bad.iter().take(10) {
            println!(
                "  failed: {} [{}] n={:?} m={:?} residual {:e} tol {:e}",
                f.anchor, f.suite, f.index_n, f.index_m, f.residual, f.tolerance
            );
        }
        panic!("{criterion}: {} failed checks\n{}", bad.len(), to_csv(rows));
    }
    if let Some(b) = bound {
        assert!(
            elapsed <= b,
            "{criterion}: runtime {elapsed:.1?} exceeds the stated bound {b:.1?}"
        );
    }
}

#[test]
fn criterion_01_identity_battery() {
    let _guard = serial();
    let b = budget();
    let start = Instant::now();
    let rows = selftest_battery(&b, &opts()).unwrap();
    // Sears, q-Pfaff-Saalschutz, both contiguous relations, and the
    // very-well-poised evaluation each run on 50 random terminating instances
    for anchor in [
        "Eq (2.12)",
        "q-Pfaff-Saalschutz",
        "Eq (2.10)",
        "Eq (2.11)",
        "Eq (10.1)",
    ] {
        let count = rows.iter().filter(|r| r.anchor == anchor).count();
        assert!(count >= 50, "{anchor}: only {count} instances");
    }
    report_outcome(
        "1 identity battery",
        &rows,
        start.elapsed(),
        Some(Duration::from_secs(10)),
    );
}

#[test]
fn criterion_02_connections() {
    let _guard = serial();
    let b = budget();
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut o = opts();
    o.max_n = 8;
    for params in parameter_sets(&b) {
        rows.extend(run_suite(SuiteKind::Connections, &params, &b, &o).unwrap());
    }
    report_outcome("2 connection suite", &rows, start.elapsed(), None);
}

#[test]
fn criterion_03_orthogonality_suites() {
    let _guard = serial();
    let b = budget();
    let start = Instant::now();
    let mut rows = Vec::new();
    let o = opts();
    for params in parameter_sets(&b) {
        rows.extend(run_suite(SuiteKind::CherOrthogonality, &params, &b, &o).unwrap());
        rows.extend(run_suite(SuiteKind::Nonsymmetric, &params, &b, &o).unwrap());
    }
    report_outcome(
        "3 orthogonality suites",
        &rows,
        start.elapsed(),
        Some(Duration::from_secs(300)),
    );
}

#[test]
fn criterion_04_glued_moments() {
    let _guard = serial();
    let b = budget();
    let start = Instant::now();
    let mut rows = Vec::new();
    for params in parameter_sets(&b) {
        let forms = FormsCtx::new(params.clone(), b.clone()).unwrap();
        for j in 0..=3u32 {
            for k in 0..=3u32 {
                let (quad, closed) = forms.glued_moment(j, k).unwrap();
                rows.push(ReportRow {
                    suite: "acceptance",
                    anchor: "Lemma 3.3".into(),
                    index_n: Some(j as i64),
                    index_m: Some(k as i64),
                    method: "glued_moment",
                    residual: rel_diff(&quad.value, &closed),
                    tolerance: 1e-20,
                    pass: rel_diff(&quad.value, &closed) < 1e-20,
                });
            }
        }
    }
    report_outcome("4 glued moments", &rows, start.elapsed(), None);
}

#[test]
fn criterion_05_operator_suite() {
    let _guard = serial();
    let b = budget();
    let start = Instant::now();
    let mut rows = Vec::new();
    let o = opts();
    for params in parameter_sets(&b) {
        rows.extend(run_suite(SuiteKind::Operators, &params, &b, &o).unwrap());
    }
    report_outcome("5 operator suite", &rows, start.elapsed(), None);
}

#[test]
fn criterion_06_recurrence_suite() {
    let _guard = serial();
    let b = budget();
    let start = Instant::now();
    let mut rows = Vec::new();
    let o = opts();
    for params in parameter_sets(&b) {
        rows.extend(run_suite(SuiteKind::Recurrences, &params, &b, &o).unwrap());
    }
    report_outcome("6 recurrence suite", &rows, start.elapsed(), None);
}

#[test]
fn criterion_07_aw_cross_orthogonality() {
    let _guard = serial();
    let b = budget();
    let start = Instant::now();
    let mut rows = Vec::new();
    let o = opts();
    for params in parameter_sets(&b) {
        rows.extend(run_suite(SuiteKind::AwCross, &params, &b, &o).unwrap());
    }
    report_outcome("7 cross orthogonality", &rows, start.elapsed(), None);
}

#[test]
fn criterion_08_asymptotics() {
    let _guard = serial();
    let b = budget();
    let start = Instant::now();
    let mut rows = Vec::new();
    for params in parameter_sets(&b) {
        rows.extend(
            asymptotics_rows(
                &params,
                &b,
                &[Family::R, Family::S, Family::T, Family::U],
                &qlaurent::asymptotics::DEFAULT_THETAS,
                &qlaurent::asymptotics::DEFAULT_N_LIST,
            )
            .unwrap(),
        );
    }
    report_outcome(
        "8 asymptotics",
        &rows,
        start.elapsed(),
        Some(Duration::from_secs(60)),
    );
}

#[test]
fn criterion_09_racah() {
    let _guard = serial();
    let b = budget();
    let start = Instant::now();
    let mut rows = Vec::new();
    for params in parameter_sets(&b) {
        for n_trunc in [2u32, 4] {
            for pair in [3u8, 4] {
                let o = SuiteOptions {
                    racah_n: n_trunc,
                    racah_pair: pair,
                    seed: SEED,
                    ..SuiteOptions::default()
                };
                rows.extend(run_suite(SuiteKind::Racah, &params, &b, &o).unwrap());
            }
        }
    }
    report_outcome("9 racah", &rows, start.elapsed(), None);
}

#[test]
fn criterion_10_cross_method_agreement() {
    let _guard = serial();
    let b = budget();
    let start = Instant::now();
    let mut rows: Vec<ReportRow> = Vec::new();
    let mut push = |anchor: &str, residual: f64, tolerance: f64| {
        rows.push(ReportRow {
            suite: "acceptance",
            anchor: anchor.into(),
            index_n: None,
            index_m: None,
            method: "cross_method",
            residual,
            tolerance,
            pass: residual < tolerance,
        });
    };

    for params in parameter_sets(&b) {
        let prec = params.prec();
        let forms = FormsCtx::new(params.clone(), b.clone()).unwrap();
        let one = LaurentPoly::one(prec);

        // normalization constant: product formula vs circle quadrature
        let mu = aw_mu(&params, &b).unwrap();
        let quad = forms.inner_aw(&one, &one).unwrap().value;
        let mu2 = Cplx::with_val(prec, &mu * 2u32);
        push("mu: products vs quadrature", rel_diff(&quad, &mu2), 1e-20);

        // unit pairing: quadrature vs closed vs glued moment
        let t12 = Real::with_val(prec, params.t1() * params.t2());
        let closed = Cplx::with_val(prec, (Real::with_val(prec, 1) - t12) * &mu);
        let quad = forms.inner_cher(&one, &one).unwrap().value;
        let (glued_quad, glued_closed) = forms.glued_moment(0, 0).unwrap();
        push(
            "unit pairing: quadrature vs closed",
            rel_diff(&quad, &closed),
            1e-20,
        );
        push(
            "unit pairing: glued moment route",
            rel_diff(&glued_quad.value, &glued_closed),
            1e-20,
        );
        push(
            "unit pairing: closed vs glued closed",
            rel_diff(&closed, &glued_closed),
            1e-30,
        );

        // diagonal norms: quadrature vs closed forms
        for (family, norm, n) in [
            (Family::R, NormFamily::R, 3u32),
            (Family::T, NormFamily::T, 3),
            (Family::S, NormFamily::S, 3),
            (Family::U, NormFamily::U, 3),
        ] {
            let p = qlaurent::bases::build(
                qlaurent::bases::BasisId {
                    family,
                    index: n as i64,
                },
                &params,
                &b,
            )
            .unwrap();
            let quad = forms.inner_cher(&p, &p).unwrap().value;
            let closed = forms.norm_closed(norm, n).unwrap();
            push(
                &format!("{family:?} norm: quadrature vs closed"),
                rel_diff(&quad, &closed),
                1e-20,
            );
        }

        // series build vs forward recurrence
        let regen = regenerate_r_forward(6, &params, &b).unwrap();
        for (n, got) in regen.iter().enumerate() {
            let reference = qlaurent::bases::build_r(n as u32, &params, &b).unwrap();
            let diff = got.sub(&reference);
            let res = qlaurent::bases::rel_residual(&diff, &[got, &reference]);
            push(&format!("R_{n}: series vs recurrence"), res.to_f64(), 1e-20);
        }

        // discrete unit pairing: node sum vs closed product vs split sum
        let q = params.q().to_f64();
        let t1 = params.t1().to_f64().clamp(-0.95, 0.95);
        let config =
            RacahConfig::new(q, t1, params.t2().to_f64(), params.t4().to_f64(), 3, 3, &b).unwrap();
        let got = racah_inner(
            &LaurentPoly::one(config.params().prec()),
            &LaurentPoly::one(config.params().prec()),
            &config,
        )
        .unwrap();
        let p = config.params();
        let t = [
            p.t1().clone(),
            p.t2().clone(),
            p.t3().clone(),
            p.t4().clone(),
        ];
        let out = vwp65_check(p.q(), &t, 3, &b).unwrap();
        push(
            "discrete unit pairing: sum vs closed",
            rel_diff(&got, &out.closed),
            1e-30,
        );
        push(
            "discrete unit pairing: sum vs split",
            rel_diff(&got, &out.split),
            1e-30,
        );

        // the two displayed forms of the modified weight
        let mut worst = 0.0f64;
        for k in 0..8 {
            let theta = 0.11 + 6.0 * (k as f64) / 8.0;
            let z = b.unit_point(theta);
            let w1 = qlaurent::forms::weight_cher(&z, &params, &b).unwrap();
            let w2 = qlaurent::forms::weight_cher_rational_form(&z, &params, &b).unwrap();
            worst = worst.max(rel_diff(&w1, &w2));
        }
        push("modified weight: two displayed forms", worst, 1e-30);

        let _ = cabs(&quad);
    }
    report_outcome("10 cross-method agreement", &rows, start.elapsed(), None);
}
