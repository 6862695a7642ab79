//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ulam_core::rank::{pagerank, GoogleOperator, PageRankOptions};
use ulam_core::spectrum::{google_spectrum, EigenOptions};
use ulam_core::CscMatrix;

/// Column-stochastic matrix with one to six random links per column.
pub fn random_stochastic(rng: &mut ChaCha8Rng, n: usize) -> CscMatrix {
    let columns = (0..n)
        .map(|_| {
            let links = rng.random_range(1..=n.min(6));
            let mut col: Vec<(u32, f64)> = (0..links)
                .map(|_| (rng.random_range(0..n as u32), rng.random_range(0.05..1.0)))
                .collect();
            col.sort_unstable_by_key(|e| e.0);
            col.dedup_by_key(|e| e.0);
            let total: f64 = col.iter().map(|e| e.1).sum();
            col.iter_mut().for_each(|e| e.1 /= total);
            col
        })
        .collect();
    CscMatrix::from_columns(n, columns).unwrap()
}

/// Solves `(I - alpha S) p = (1 - alpha) / N` by Gaussian elimination with
/// partial pivoting.
pub fn pagerank_direct(s: &CscMatrix, alpha: f64) -> Vec<f64> {
    let n = s.n();
    let mut a = vec![vec![0.0; n + 1]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().take(n).enumerate() {
            *v = f64::from(u8::from(i == j)) - alpha * s.get(i, j);
        }
        row[n] = (1.0 - alpha) / n as f64;
    }
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, piv);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..=n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    let mut p = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|k| a[r][k] * p[k]).sum();
        p[r] = (a[r][n] - tail) / a[r][r];
    }
    p
}

/// Largest PageRank deviation from the direct solve over `cases` random
/// matrices with `N <= 50` and three damping factors.
pub fn pagerank_oracle_error(seed: u64, cases: usize) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = PageRankOptions::default();
    let mut worst = 0.0f64;
    for case in 0..cases {
        let n = rng.random_range(2..=50);
        let s = random_stochastic(&mut rng, n);
        for alpha in [0.5, 0.85, 0.95] {
            let g = GoogleOperator::new(&s, alpha).map_err(|e| e.to_string())?;
            let r = pagerank(&g, &opts, None).map_err(|e| format!("case {case}: {e}"))?;
            let direct = pagerank_direct(&s, alpha);
            let err = r.p.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

/// Pairs every value of `a` with a distinct nearest value of `b`; returns
/// the largest distance.
pub fn match_spectra(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for &x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, &y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn isolated(values: &[Complex64], i: usize, gap: f64) -> bool {
    values.iter().enumerate().all(|(k, v)| k == i || (v - values[i]).norm() > gap)
}

/// Checks residuals, conjugate symmetry, the trace, the alpha rescaling of
/// the spectrum and the alpha independence of eigenvector PARs for one
/// matrix. Returns the number of PAR comparisons made.
pub fn check_spectrum_invariants(s: &CscMatrix, alpha: f64) -> Result<usize, String> {
    let n = s.n();
    let plain = google_spectrum(s, 1.0, &EigenOptions::default()).map_err(|e| e.to_string())?;
    let damped = google_spectrum(s, alpha, &EigenOptions::default()).map_err(|e| e.to_string())?;

    for res in [&plain, &damped] {
        if res.len() != n {
            return Err(format!("{} eigenvalues for N = {n}", res.len()));
        }
        let r = res.max_residual().unwrap_or(f64::INFINITY);
        if !(r < 1e-9) {
            return Err(format!("residual {r:e}"));
        }
        let conj: Vec<Complex64> = res.eigenvalues.iter().map(|z| z.conj()).collect();
        let d = match_spectra(&res.eigenvalues, &conj);
        if d >= 1e-9 {
            return Err(format!("not closed under conjugation ({d:e})"));
        }
        if (res.eigenvalues[0] - 1.0).norm() >= 1e-9 {
            return Err(format!("leading eigenvalue {}", res.eigenvalues[0]));
        }
    }
    let tr_s: f64 = (0..n).map(|i| s.get(i, i)).sum();
    let sum: Complex64 = damped.eigenvalues.iter().sum();
    if (sum.re - (alpha * tr_s + 1.0 - alpha)).abs() >= 1e-9 || sum.im.abs() >= 1e-9 {
        return Err(format!("trace {sum} against {}", alpha * tr_s + 1.0 - alpha));
    }

    // eig(G) = {1} together with alpha times eig(S) minus one unit
    // eigenvalue. Defective lambda = 0 blocks only resolve to about
    // eps^(1 / size), so the cluster at the origin is compared by count.
    let near_zero = |z: &&Complex64| z.norm() < 1e-4;
    let mut expected: Vec<Complex64> = plain.eigenvalues[1..].iter().map(|z| z * alpha).collect();
    expected.push(Complex64::new(1.0, 0.0));
    let (zeros_a, rest_a): (Vec<Complex64>, Vec<Complex64>) = expected.iter().partition(near_zero);
    let (zeros_b, rest_b): (Vec<Complex64>, Vec<Complex64>) = damped.eigenvalues.iter().partition(near_zero);
    if zeros_a.len() != zeros_b.len() {
        return Err(format!("{} vs {} eigenvalues near 0", zeros_a.len(), zeros_b.len()));
    }
    let d = match_spectra(&rest_a, &rest_b);
    if d >= 1e-8 {
        return Err(format!("rescaling mismatch {d:e}"));
    }

    // Eigenvectors away from lambda = 1 are shared, so their PAR is too.
    let mut compared = 0;
    for i in 1..n {
        let lambda = plain.eigenvalues[i];
        if lambda.norm() < 1e-6 || !isolated(&plain.eigenvalues, i, 1e-3) {
            continue;
        }
        let target = lambda * alpha;
        let k = (0..n)
            .min_by(|&p, &q| (damped.eigenvalues[p] - target).norm().total_cmp(&(damped.eigenvalues[q] - target).norm()))
            .unwrap();
        let (a, b) = (plain.pars[i].unwrap(), damped.pars[k].unwrap());
        if (a - b).abs() >= 1e-6 * a {
            return Err(format!("PAR at lambda = {lambda}: {a} vs {b}"));
        }
        compared += 1;
    }
    Ok(compared)
}
