//! One function per subcommand.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use ulam_core::rank::{
    contraction_factor, delocalization_scan_with, k_scan_xi_with, pagerank, select_decay_fit,
    write_contraction_tsv, GoogleOperator, MatrixCache, PageRankOptions, ScanReport,
};
use ulam_core::spectrum::{
    count_below, gap_scan_with, google_spectrum, spectral_density, weyl_scan_with, write_gap_tsv, EigenOptions,
    VectorSelection,
};
use ulam_core::typical_map::{
    bifurcation_scan, lyapunov_entropy, write_bifurcation_tsv, LyapunovOptions, PeriodWindow,
};
use ulam_core::ulam_net::{
    build_ulam_matrix, default_fit_range, fit_power_law, import_matrix, link_stats, write_fit_report, write_matrix,
    Direction,
};
use ulam_core::{CellGrid, PhaseSet, UlamMatrix};

use crate::args::*;
use crate::output::{companion, resolve, write_file, write_meta};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(ulam_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl From<ulam_core::Error> for CliError {
    fn from(e: ulam_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Build(a) => build(cli, a),
        Command::Linkstats(a) => linkstats(cli, a),
        Command::Pagerank(a) => run_pagerank(cli, a),
        Command::ScanAlpha(a) => scan_alpha(cli, a),
        Command::ScanK(a) => scan_k(cli, a),
        Command::Spectrum(a) => spectrum(cli, a),
        Command::Weyl(a) => weyl(cli, a),
        Command::Gap(a) => gap(cli, a),
        Command::Contraction(a) => contraction(cli, a),
        Command::Bifurcation(a) => bifurcation(cli, a),
        Command::Lyapunov(a) => lyapunov(cli, a),
    }
}

fn phase_set(m: &MapArgs) -> Result<PhaseSet> {
    let base = match m.set.to_ascii_lowercase().as_str() {
        "t10" => PhaseSet::t10(),
        "t20" => PhaseSet::t20(),
        _ => {
            let text = fs::read_to_string(&m.set)
                .map_err(|e| CliError::Usage(format!("--set: `{}` is neither t10, t20 nor a readable file: {e}", m.set)))?;
            PhaseSet::from_config(&text)?
        }
    };
    let ps = match m.k {
        Some(k) => base.with_k(k)?,
        None => base,
    };
    Ok(match m.eta {
        Some(eta) => ps.with_eta(eta)?,
        None => ps,
    })
}

fn phase_json(ps: &PhaseSet) -> Value {
    json!({
        "theta_over_2pi": ps.theta_over_2pi(),
        "k": ps.k(),
        "eta": ps.eta(),
        "period": ps.period(),
        "gamma_c": ps.gamma_c(),
    })
}

fn matrix(net: &NetArgs) -> Result<(UlamMatrix, Value)> {
    if let Some(path) = &net.matrix {
        let s = import_matrix(path)?;
        let info = json!({
            "matrix_file": path.display().to_string(),
            "N": s.n(),
            "n_c": s.n_c(),
            "seed": s.seed(),
        });
        return Ok((s, info));
    }
    let ps = phase_set(&net.map)?;
    let grid = CellGrid::square(net.grid)?;
    let s = build_ulam_matrix(&ps, grid, net.n_c, net.map.seed)?;
    let info = json!({
        "phase_set": phase_json(&ps),
        "grid": net.grid,
        "N": s.n(),
        "n_c": net.n_c,
        "seed": net.map.seed,
        "placement": format!("{:?}", ulam_core::ulam_net::Placement::for_count(net.n_c)),
    });
    Ok((s, info))
}

fn power_options(p: &PowerArgs) -> PageRankOptions {
    PageRankOptions {
        tol: p.tol,
        max_iter: p.max_iter,
        allow_unconverged: p.allow_unconverged,
    }
}

fn eigen_options(e: &EigenArgs, vectors: bool) -> EigenOptions {
    EigenOptions {
        vectors: if vectors { VectorSelection::All } else { VectorSelection::None },
        keep_vectors: false,
        balance: true,
        dense_cap: e.dense_cap,
        use_blocks: !e.no_blocks,
    }
}

fn range(v: &Option<Vec<usize>>, flag: &str) -> Result<Option<(usize, usize)>> {
    match v.as_deref() {
        None => Ok(None),
        Some(&[lo, hi]) if lo >= 1 && lo < hi => Ok(Some((lo, hi))),
        Some(other) => Err(CliError::Usage(format!(
            "{flag}: expected `lo,hi` with 1 <= lo < hi, got {other:?}"
        ))),
    }
}

fn finish(cli: &Cli, primary: &Path, outputs: &[PathBuf], resolved: Value, summary: Value) -> Result<()> {
    write_meta(primary, cli, resolved, outputs, summary)?;
    for p in outputs {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn build(cli: &Cli, a: &BuildArgs) -> Result<()> {
    let (s, info) = matrix(&a.net)?;
    let out = resolve(a.output.as_deref(), "matrix.txt");
    write_file(&out, |w| write_matrix(&s, w))?;
    let summary = json!({ "nnz": s.matrix().nnz() });
    finish(cli, &out, &[out.clone()], info, summary)
}

fn linkstats(cli: &Cli, a: &LinkstatsArgs) -> Result<()> {
    let requested = [
        (Direction::In, range(&a.fit_in, "--fit-in")?),
        (Direction::Out, range(&a.fit_out, "--fit-out")?),
    ];
    let (s, info) = matrix(&a.net)?;
    let stats = link_stats(s.matrix());
    let default = match s.phase_set() {
        Some(ps) => default_fit_range(ps),
        None => (10, 50),
    };
    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    for (dir, explicit) in requested {
        match fit_power_law(stats.histogram(dir), explicit.unwrap_or(default)) {
            Ok(f) => {
                println!("mu_{} = {:.4} over kappa in [{}, {}]", dir.label(), f.mu, f.fit_range.0, f.fit_range.1);
                fits.push((dir, f));
            }
            // An explicitly requested range must be fittable.
            Err(e) if explicit.is_some() => return Err(e.into()),
            Err(e) => {
                eprintln!("warning: no {}-degree fit: {e}", dir.label());
                skipped.push(dir.label());
            }
        }
    }
    let out = resolve(a.output.as_deref(), "linkstats.tsv");
    let fit_out = companion(&out, "fit");
    write_file(&out, |w| stats.write_tsv(w))?;
    write_file(&fit_out, |w| write_fit_report(w, &fits))?;
    let summary = json!({
        "mean_degree": stats.mean_degree(),
        "n_zero_in": stats.n_zero_in,
        "fits": fits.iter().map(|(d, f)| json!({
            "direction": d.label(), "mu": f.mu, "range": [f.fit_range.0, f.fit_range.1], "residual": f.residual,
        })).collect::<Vec<_>>(),
        "skipped_fits": skipped,
    });
    finish(cli, &out, &[out.clone(), fit_out], info, summary)
}

fn run_pagerank(cli: &Cli, a: &PagerankArgs) -> Result<()> {
    let fit_range = range(&a.fit_range, "--fit-range")?;
    let (s, info) = matrix(&a.net)?;
    let g = GoogleOperator::new(s.matrix(), a.alpha)?;
    let r = pagerank(&g, &power_options(&a.power), None)?;
    if !r.converged {
        eprintln!(
            "warning: not converged after {} iterations (residual {:e})",
            r.iterations, r.residual
        );
    }
    println!("xi = {:.6} after {} iterations", r.xi, r.iterations);
    let mut summary = json!({
        "xi": r.xi,
        "iterations": r.iterations,
        "residual": r.residual,
        "converged": r.converged,
    });
    if let Some(fr) = fit_range {
        let gamma_c = s.phase_set().map_or(0.0, PhaseSet::gamma_c);
        let f = select_decay_fit(&r, fr, gamma_c)?;
        println!("decay: {} slope {:.4} exponent {:.4}", f.kind.label(), f.slope, f.exponent);
        summary["decay_fit"] = json!({
            "kind": f.kind.label(),
            "exponent": f.exponent,
            "slope": f.slope,
            "intercept": f.intercept,
            "range": [f.fit_range.0, f.fit_range.1],
            "residual": f.residual,
        });
    }
    let out = resolve(a.output.as_deref(), "pagerank.tsv");
    write_file(&out, |w| r.write_tsv(s.grid(), w))?;
    finish(cli, &out, &[out.clone()], info, summary)
}

fn scan_summary(report: &ScanReport) -> Value {
    json!({
        "verdicts": report.verdicts.iter().map(|(p, v)| json!([p, v.label()])).collect::<Vec<_>>(),
        "alpha_c_bracket": report.alpha_c_bracket(),
        "delocalization_onset": report.delocalization_onset(),
        "localized_peak": report.localized_peak(),
    })
}

fn scan_info(ps: &PhaseSet, net: &ScanNetArgs) -> Value {
    json!({
        "phase_set": phase_json(ps),
        "grids": net.grids,
        "N": net.grids.iter().map(|g| g * g).collect::<Vec<_>>(),
        "n_c": net.n_c,
        "seed": net.map.seed,
    })
}

fn scan_alpha(cli: &Cli, a: &ScanAlphaArgs) -> Result<()> {
    let ps = phase_set(&a.net.map)?;
    let mut cache = MatrixCache::new(a.net.n_c, a.net.map.seed);
    let report = delocalization_scan_with(&mut cache, &ps, &a.alphas, &a.net.grids, &power_options(&a.power))?;
    if let Some((lo, hi)) = report.alpha_c_bracket() {
        println!("alpha_c in [{lo}, {hi}]");
    }
    let out = resolve(a.output.as_deref(), "scan_alpha.tsv");
    write_file(&out, |w| report.write_tsv(w))?;
    finish(cli, &out, &[out.clone()], scan_info(&ps, &a.net), scan_summary(&report))
}

fn scan_k(cli: &Cli, a: &ScanKArgs) -> Result<()> {
    let ps = phase_set(&a.net.map)?;
    let mut cache = MatrixCache::new(a.net.n_c, a.net.map.seed);
    let report = k_scan_xi_with(&mut cache, &ps, &a.k_values, a.alpha, &a.net.grids, &power_options(&a.power))?;
    if let Some(k) = report.delocalization_onset() {
        println!("delocalized from k = {k}");
    }
    let out = resolve(a.output.as_deref(), "scan_k.tsv");
    write_file(&out, |w| report.write_tsv(w))?;
    finish(cli, &out, &[out.clone()], scan_info(&ps, &a.net), scan_summary(&report))
}

fn spectrum(cli: &Cli, a: &SpectrumArgs) -> Result<()> {
    let (s, info) = matrix(&a.net)?;
    let res = google_spectrum(s.matrix(), a.alpha, &eigen_options(&a.eigen, !a.no_vectors))?;
    let density = spectral_density(&res, a.bins, a.gamma_cut)?;
    let out = resolve(a.output.as_deref(), "spectrum.tsv");
    let density_out = companion(&out, "density");
    write_file(&out, |w| res.write_tsv(w))?;
    write_file(&density_out, |w| density.write_tsv(w))?;
    println!("{} eigenvalues, {} with gamma < {}", res.len(), density.n_gamma, a.gamma_cut);
    let summary = json!({
        "n_eigenvalues": res.len(),
        "lambda_1": [res.eigenvalues[0].re, res.eigenvalues[0].im],
        "n_gamma_below_cut": count_below(&res, a.gamma_cut),
        "max_residual": res.max_residual(),
        "largest_block": res.block_sizes.iter().max(),
        "n_blocks": res.block_sizes.len(),
    });
    finish(cli, &out, &[out.clone(), density_out], info, summary)
}

fn weyl(cli: &Cli, a: &WeylArgs) -> Result<()> {
    let ps = phase_set(&a.net.map)?;
    let h = match (a.h, a.lyapunov_periods) {
        (Some(h), _) => Some(h),
        (None, 0) => None,
        (None, periods) => {
            // The entropy enters the dimension estimate of the attractor, so it is
            // taken from the conservative map with the same phases and k.
            let opts = LyapunovOptions {
                n_periods: periods,
                n_transient_periods: (periods / 1000).min(1000),
                seed: a.net.map.seed,
                ..LyapunovOptions::default()
            };
            Some(lyapunov_entropy(&ps.with_eta(1.0)?, &opts)?.h)
        }
    };
    let mut cache = MatrixCache::new(a.net.n_c, a.net.map.seed);
    let fit = weyl_scan_with(
        &mut cache,
        &ps,
        &a.net.grids,
        a.alpha,
        a.gamma_b,
        &eigen_options(&a.eigen, false),
        h,
    )?;
    println!("nu = {:.4}, A = {:.4}", fit.nu, fit.a);
    let out = resolve(a.output.as_deref(), "weyl.tsv");
    write_file(&out, |w| fit.write_tsv(w))?;
    let summary = json!({
        "nu": fit.nu,
        "A": fit.a,
        "residual": fit.residual,
        "h": h,
        "nu_theory": fit.nu_theory,
        "nu_minus_theory": fit.nu_theory.map(|t| (fit.nu - t).abs()),
    });
    finish(cli, &out, &[out.clone()], scan_info(&ps, &a.net), summary)
}

fn gap(cli: &Cli, a: &GapArgs) -> Result<()> {
    let ps = phase_set(&a.net.map)?;
    let mut cache = MatrixCache::new(a.net.n_c, a.net.map.seed);
    let rows = gap_scan_with(&mut cache, &ps, &a.net.grids, a.top, a.alpha, &eigen_options(&a.eigen, false))?;
    let out = resolve(a.output.as_deref(), "gap.tsv");
    write_file(&out, |w| write_gap_tsv(w, &rows))?;
    let summary = json!({ "rows": rows.len() });
    finish(cli, &out, &[out.clone()], scan_info(&ps, &a.net), summary)
}

fn contraction(cli: &Cli, a: &ContractionArgs) -> Result<()> {
    let (s, info) = matrix(&a.net)?;
    let results = contraction_factor(&s, &a.q)?;
    let out = resolve(a.output.as_deref(), "contraction.tsv");
    write_file(&out, |w| write_contraction_tsv(w, &results))?;
    let summary = json!({
        "gamma": results.iter().map(|r| r.gamma).collect::<Vec<_>>(),
        "gamma_c": s.phase_set().map(PhaseSet::contraction),
    });
    finish(cli, &out, &[out.clone()], info, summary)
}

fn bifurcation(cli: &Cli, a: &BifurcationArgs) -> Result<()> {
    let ps = phase_set(&a.map)?;
    let windows = [PeriodWindow::early(), PeriodWindow::late()];
    let samples = bifurcation_scan(&ps, &a.k_values, a.n_traj, &windows, a.map.seed)?;
    let out = resolve(a.output.as_deref(), "bifurcation.tsv");
    write_file(&out, |w| write_bifurcation_tsv(w, &samples))?;
    let info = json!({
        "phase_set": phase_json(&ps),
        "windows": windows.iter().map(|w| json!({"label": w.label, "start": w.start, "end": w.end})).collect::<Vec<_>>(),
    });
    let summary = json!({ "points": samples.iter().map(|s| s.points.len()).sum::<usize>() });
    finish(cli, &out, &[out.clone()], info, summary)
}

fn lyapunov(cli: &Cli, a: &LyapunovArgs) -> Result<()> {
    let ps = phase_set(&a.map)?;
    let opts = LyapunovOptions {
        n_periods: a.periods,
        n_transient_periods: a.transient,
        seed: a.map.seed,
        drift_tolerance: a.drift_tol,
    };
    let r = lyapunov_entropy(&ps, &opts)?;
    println!("h = {:.5} per iteration (theory {:.5})", r.h, r.h_theory);
    let out = resolve(a.output.as_deref(), "lyapunov.tsv");
    write_file(&out, |w| {
        use std::io::Write;
        writeln!(w, "# k\teta\tT\th\th_theory\td_estimate\tdrift\tperiods")?;
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{:e}\t{}",
            ps.k(),
            ps.eta(),
            ps.period(),
            r.h,
            r.h_theory,
            r.d_estimate.unwrap_or(f64::NAN),
            r.drift,
            r.n_periods
        )
    })?;
    let summary = json!({ "h": r.h, "h_theory": r.h_theory, "d_estimate": r.d_estimate, "drift": r.drift });
    finish(cli, &out, &[out.clone()], json!({ "phase_set": phase_json(&ps) }), summary)
}
