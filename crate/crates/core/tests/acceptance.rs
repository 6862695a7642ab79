//! Acceptance criteria 1 to 10. Each test prints one `criterion N: PASS` or
//! `criterion N: FAIL` line with the measured values and then asserts.
//!
//! Criteria 1, 2 and 9 run by default. The others take minutes to hours
//! and are ignored; run them with
//! `cargo test --release -p ulam-core --test acceptance -- --ignored`.

mod common;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ulam_core::rank::{
    contraction_factor, delocalization_scan_with, fit_pagerank_decay, k_scan_xi_with, pagerank, select_decay_fit,
    DecayKind, GoogleOperator, MatrixCache, MatrixSource, PageRankOptions, RankVector, ScanReport, Verdict,
};
use ulam_core::spectrum::{google_spectrum, nondegenerate_pars, weyl_exponent_theory, weyl_scan_with, EigenOptions};
use ulam_core::typical_map::{lyapunov_entropy, LyapunovOptions};
use ulam_core::ulam_net::{build_ulam_matrix, default_fit_range, fit_power_law, link_stats, Direction};
use ulam_core::{CellGrid, PhaseSet, UlamMatrix};

/// Collects the sub-checks of one criterion.
struct Criterion {
    id: u32,
    checks: Vec<(bool, String)>,
}

impl Criterion {
    fn new(id: u32) -> Self {
        Self { id, checks: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.checks.push((ok, detail.into()));
    }

    fn within(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        let ok = (value - target).abs() <= tol;
        let tol_shown = (tol * 1e6).round() / 1e6;
        self.check(ok, format!("{name} = {value:.4} (target {target} +- {tol_shown})"));
    }

    fn note(&mut self, detail: impl Into<String>) {
        self.checks.push((true, detail.into()));
    }

    /// Prints the summary line straight to the stderr handle, which the test
    /// harness does not capture, then fails the test if any check failed.
    fn finish(self) {
        let pass = self.checks.iter().all(|c| c.0);
        let details: Vec<String> = self
            .checks
            .iter()
            .map(|(ok, d)| if *ok { d.clone() } else { format!("{d} [out of range]") })
            .collect();
        let line = format!(
            "criterion {}: {} | {}",
            self.id,
            if pass { "PASS" } else { "FAIL" },
            details.join("; ")
        );
        let _ = writeln!(std::io::stderr().lock(), "{line}");
        assert!(pass, "{line}");
    }
}

fn build(ps: &PhaseSet, side: usize, n_c: usize) -> UlamMatrix {
    build_ulam_matrix(ps, CellGrid::square(side).unwrap(), n_c, 1).unwrap()
}

fn rank(s: &UlamMatrix, alpha: f64) -> RankVector {
    pagerank(&GoogleOperator::new(s.matrix(), alpha).unwrap(), &PageRankOptions::default(), None).unwrap()
}

#[test]
fn criterion_01_stochasticity_and_oracles() {
    let mut c = Criterion::new(1);

    let mut stochastic = true;
    for (ps, n_c) in [(PhaseSet::t10(), 100), (PhaseSet::t20(), 64), (PhaseSet::t10().with_eta(1.0).unwrap(), 37)] {
        stochastic &= build(&ps, 30, n_c).matrix().validate_stochastic().is_ok();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.random_range(1..=60);
        stochastic &= common::random_stochastic(&mut rng, n).validate_stochastic().is_ok();
    }
    c.check(stochastic, "column sums = 1 within 1e-12 (3 Ulam + 100 random matrices)");

    let mut drift = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=60);
        let s = common::random_stochastic(&mut rng, n);
        let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let total: f64 = v.iter().sum();
        for alpha in [0.0, 0.5, 0.85, 1.0] {
            let out = GoogleOperator::new(&s, alpha).unwrap().apply(&v).unwrap();
            drift = drift.max((out.iter().sum::<f64>() - total).abs() / total);
        }
    }
    c.check(drift < 1e-12, format!("probability conservation under G, max relative drift {drift:.1e}"));

    match common::pagerank_oracle_error(11, 200) {
        Ok(err) => c.check(err < 1e-8, format!("PageRank vs direct solve, 200 matrices N <= 50, max error {err:.1e}")),
        Err(e) => c.check(false, format!("PageRank oracle: {e}")),
    }

    let mut compared = 0;
    let mut spectral = Ok(());
    for case in 0..40 {
        let n = rng.random_range(5..=100);
        let s = common::random_stochastic(&mut rng, n);
        match common::check_spectrum_invariants(&s, 0.85) {
            Ok(k) => compared += k,
            Err(e) => {
                spectral = Err(format!("case {case}: {e}"));
                break;
            }
        }
    }
    match spectral {
        Ok(()) => c.check(true, format!("spectrum rescaling, conjugate pairs, trace, PAR invariance on 40 matrices N <= 100 ({compared} PARs)")),
        Err(e) => c.check(false, format!("spectrum invariants: {e}")),
    }
    c.finish();
}

#[test]
fn criterion_02_lyapunov_entropy() {
    let mut c = Criterion::new(2);
    for (name, ps, target) in [("h(T10)", PhaseSet::t10(), 0.0851), ("h(T20)", PhaseSet::t20(), 0.1081)] {
        let ps = ps.with_eta(1.0).unwrap();
        let opts = LyapunovOptions {
            n_periods: 10_000_000 / ps.period(),
            ..LyapunovOptions::default()
        };
        match lyapunov_entropy(&ps, &opts) {
            Ok(r) => c.within(name, r.h, target, 0.005),
            Err(e) => c.check(false, format!("{name}: {e}")),
        }
    }
    c.finish();
}

#[test]
#[ignore = "extended: two builds at N = 3.6e5, about 12 minutes"]
fn criterion_03_link_exponents() {
    let mut c = Criterion::new(3);
    let fit = |s: &UlamMatrix, dir| {
        let stats = link_stats(s.matrix());
        fit_power_law(stats.histogram(dir), default_fit_range(s.phase_set().unwrap())).map(|f| f.mu)
    };
    let s = build(&PhaseSet::t10(), 600, 10_000);
    for (name, dir, target) in [("mu_in(k=0.22)", Direction::In, 1.87), ("mu_out(k=0.22)", Direction::Out, 1.92)] {
        match fit(&s, dir) {
            Ok(mu) => c.within(name, mu, target, 0.2),
            Err(e) => c.check(false, format!("{name}: {e}")),
        }
    }
    drop(s);
    let s = build(&PhaseSet::t10().with_k(0.6).unwrap(), 600, 10_000);
    match fit(&s, Direction::In) {
        Ok(mu) => c.within("mu_in(k=0.6)", mu, 1.70, 0.2),
        Err(e) => c.check(false, format!("mu_in(k=0.6): {e}")),
    }
    c.finish();
}

/// Rank range of all PageRank decay fits at N = 9e4.
const DECAY_FIT_RANGE: (usize, usize) = (10, 1000);

#[test]
#[ignore = "extended: N = 9e4 builds and alpha = 1 power iterations, about an hour"]
fn criterion_04_pagerank_decay() {
    let mut c = Criterion::new(4);
    for (set, ps, beta, b) in [("T10", PhaseSet::t10(), 0.48, 1.4), ("T20", PhaseSet::t20(), 0.88, 2.1)] {
        let s = build(&ps, 300, 10_000);
        let r = rank(&s, 0.95);
        match fit_pagerank_decay(&r, DecayKind::Algebraic, DECAY_FIT_RANGE, ps.gamma_c()) {
            Ok(f) => c.within(&format!("beta({set}, 0.95)"), f.exponent, beta, 0.15),
            Err(e) => c.check(false, format!("beta({set}): {e}")),
        }
        let r = rank(&s, 1.0);
        c.note(format!("{set} alpha=1: {} iterations, residual {:.1e}", r.iterations, r.residual));
        match select_decay_fit(&r, DECAY_FIT_RANGE, ps.gamma_c()) {
            Ok(f) => {
                c.check(f.kind == DecayKind::Exponential, format!("{set} alpha=1 selects {}", f.kind.label()));
                c.within(&format!("b({set})"), f.exponent, b, 0.4 * b);
            }
            Err(e) => c.check(false, format!("b({set}): {e}")),
        }
    }
    c.finish();
}

fn verdict_line(report: &ScanReport) -> String {
    report
        .verdicts
        .iter()
        .map(|(p, v)| format!("{p}:{}", v.label()))
        .collect::<Vec<_>>()
        .join(" ")
}

#[test]
#[ignore = "extended: PageRank scans up to N = 3.6e5 for both sets, about 30 minutes"]
fn criterion_05_delocalization_scan() {
    let mut c = Criterion::new(5);
    let sides = [120, 300, 600];
    let opts = PageRankOptions::default();

    let alphas = [0.85, 0.9, 0.95, 0.97, 0.99];
    let report = delocalization_scan_with(&mut MatrixCache::new(10_000, 1), &PhaseSet::t10(), &alphas, &sides, &opts)
        .unwrap();
    c.note(format!("T10 {}", verdict_line(&report)));
    for &(alpha, want) in &[(0.85, Verdict::Delocalized), (0.9, Verdict::Delocalized), (0.97, Verdict::Localized), (0.99, Verdict::Localized)] {
        let got = report.verdict(alpha);
        c.check(got == Some(want), format!("T10 alpha={alpha} {}", got.map_or("missing", Verdict::label)));
    }
    let bracket = report.alpha_c_bracket();
    c.check(
        bracket.is_some_and(|(lo, hi)| lo >= 0.9 && hi <= 0.97),
        format!("T10 alpha_c in {bracket:?}, required within [0.9, 0.97]"),
    );

    let alphas = [0.6, 0.7, 0.8, 0.9, 0.95];
    let report = delocalization_scan_with(&mut MatrixCache::new(10_000, 1), &PhaseSet::t20(), &alphas, &sides, &opts)
        .unwrap();
    c.note(format!("T20 {}", verdict_line(&report)));
    let bracket = report.alpha_c_bracket();
    c.check(
        bracket.is_some_and(|(lo, hi)| lo >= 0.7 && hi <= 0.9),
        format!("T20 alpha_c in {bracket:?}, required within [0.7, 0.9]"),
    );
    c.finish();
}

#[test]
#[ignore = "extended: 19 k values at three grid sizes, about 10 minutes"]
fn criterion_06_k_scan() {
    let mut c = Criterion::new(6);
    let k_values: Vec<f64> = (0..19).map(|i| (250 + 25 * i) as f64 / 1000.0).collect();
    let report = k_scan_xi_with(
        &mut MatrixCache::new(1024, 1),
        &PhaseSet::t10(),
        &k_values,
        0.99,
        &[60, 120, 240],
        &PageRankOptions::default(),
    )
    .unwrap();
    c.note(verdict_line(&report));
    let onset = report.delocalization_onset();
    c.check(
        onset.is_some_and(|k| (k - 0.55).abs() <= 0.05 + 1e-9),
        format!("onset k = {onset:?} (target 0.55 +- 0.05)"),
    );
    let peak = report.localized_peak();
    c.check(
        peak.is_some_and(|(k, _)| (0.33 - 1e-9..=0.43 + 1e-9).contains(&k)),
        format!("xi peak at {peak:?} (required k in [0.33, 0.43])"),
    );
    c.finish();
}

#[test]
#[ignore = "extended: builds up to N = 1.6e5 for both sets, about 12 minutes"]
fn criterion_07_contraction() {
    let mut c = Criterion::new(7);
    let q = [1e-4, 1e-3, 1e-2, 0.1];
    for (set, ps, target) in [("T10", PhaseSet::t10(), 0.9043), ("T20", PhaseSet::t20(), 0.5437)] {
        let gamma_c = ps.contraction();
        let mut distance = Vec::new();
        for side in [100, 200, 400] {
            let res = contraction_factor(&build(&ps, side, 10_000), &q).unwrap();
            let g: Vec<f64> = res.iter().map(|r| r.gamma).collect();
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            distance.push((mean - gamma_c).abs());
            if side == 400 {
                let spread = g.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
                c.check(spread <= 0.03, format!("{set} N=1.6e5 Gamma(q) = {g:.4?}, spread +-{spread:.4}"));
                for v in &g {
                    c.within(&format!("{set} Gamma"), *v, target, 0.05);
                }
            }
        }
        c.check(
            distance.windows(2).all(|w| w[1] < w[0]),
            format!("{set} |Gamma - Gamma_c| over N = 1e4, 4e4, 1.6e5: {distance:.4?}"),
        );
    }
    c.finish();
}

#[test]
#[ignore = "extended: dense diagonalization up to N = 1e4 for both sets, hours"]
fn criterion_08_fractal_weyl_law() {
    let mut c = Criterion::new(8);
    let sides = [50, 75, 90, 100];
    for (set, ps, gamma_b, target) in [("T10", PhaseSet::t10(), 6.0, 0.85), ("T20", PhaseSet::t20(), 3.0, 0.61)] {
        let h = lyapunov_entropy(&ps.with_eta(1.0).unwrap(), &LyapunovOptions::default()).unwrap().h;
        let opts = EigenOptions { dense_cap: 10_000, ..EigenOptions::eigenvalues_only() };
        match weyl_scan_with(&mut MatrixCache::new(10_000, 1), &ps, &sides, 1.0, gamma_b, &opts, Some(h)) {
            Ok(fit) => {
                c.within(&format!("nu({set}, gamma_b={gamma_b})"), fit.nu, target, 0.1);
                let theory = weyl_exponent_theory(&ps, h).unwrap();
                c.note(format!(
                    "{set} counts {:?}, A = {:.3}, nu_theory = {theory:.3}, |nu - nu_theory| = {:.3}",
                    fit.counts,
                    fit.a,
                    (fit.nu - theory).abs()
                ));
            }
            Err(e) => c.check(false, format!("{set}: {e}")),
        }
    }
    c.finish();
}

#[test]
fn criterion_09_symplectic_uniform_pagerank() {
    let mut c = Criterion::new(9);
    // 300 x 300 points per cell; at n_c = 1e4 the row sums of S scatter by
    // a few 1e-6 and so does the stationary vector.
    let s = build(&PhaseSet::t10().with_eta(1.0).unwrap(), 100, 90_000);
    let r = rank(&s, 1.0);
    let uniform = 1.0 / s.n() as f64;
    let dev = r.p.iter().map(|p| (p - uniform).abs()).fold(0.0, f64::max);
    c.check(dev < 1e-6, format!("eta=1 T10 N=1e4 n_c=9e4: max |p - 1/N| = {dev:.2e} (< 1e-6)"));
    c.finish();
}

#[test]
#[ignore = "extended: full eigendecomposition with vectors at N = 1e4, about an hour"]
fn criterion_10_eigenvector_par_range() {
    let mut c = Criterion::new(10);
    let s = MatrixCache::new(10_000, 1).ulam_matrix(&PhaseSet::t10(), 100).unwrap();
    let opts = EigenOptions { keep_vectors: false, dense_cap: 10_000, ..EigenOptions::default() };
    let res = google_spectrum(s.matrix(), 1.0, &opts).unwrap();
    c.note(format!("max residual {:.1e}", res.max_residual().unwrap_or(f64::NAN)));
    // Interior: below the unit circle and outside the lambda = 0 family.
    let xi: Vec<f64> = nondegenerate_pars(&res)
        .into_iter()
        .filter(|(l, _)| l.norm() < 1.0 - 1e-9)
        .map(|(_, p)| p)
        .collect();
    let min = xi.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xi.iter().copied().fold(0.0, f64::max);
    c.note(format!("{} interior states", xi.len()));
    c.check((2.0..=8.0).contains(&min), format!("min xi = {min:.2} (required [2, 8])"));
    c.check((150.0..=600.0).contains(&max), format!("max xi = {max:.1} (required [150, 600])"));
    c.finish();
}
