//! Eigenvectors and shifted solves from a real Schur form.

use num_complex::Complex64;

use super::schur::RealSchur;

/// Magnitude above which a partial solution is rescaled.
const BIG: f64 = 1e100;

/// Back substitution for `(T - lambda) y = b` on rows `0..upto`, where
/// `y[0..upto]` holds `b` on entry and `y[upto..len]` are known values.
/// Near-singular pivots are replaced by `smin`. When `rescale` is set the
/// whole of `y[..len]` may be scaled down to avoid overflow; the applied
/// factor is returned.
#[allow(clippy::too_many_arguments)]
fn back_substitute(
    t: &[f64],
    n: usize,
    lambda: Complex64,
    yr: &mut [f64],
    yi: &mut [f64],
    upto: usize,
    len: usize,
    smin: f64,
    rescale: bool,
) -> f64 {
    let mut factor = 1.0;
    let tail_dot = |row: usize, from: usize, yr: &[f64], yi: &[f64]| -> Complex64 {
        let tr = &t[row * n + from..row * n + len];
        let (mut sr, mut si) = (0.0, 0.0);
        for ((a, br), bi) in tr.iter().zip(&yr[from..len]).zip(&yi[from..len]) {
            sr += a * br;
            si += a * bi;
        }
        Complex64::new(sr, si)
    };
    let protect = |d: Complex64| if d.norm() < smin { Complex64::new(smin, 0.0) } else { d };

    let mut i = upto;
    while i > 0 {
        let i1 = i - 1;
        let biggest;
        if i1 > 0 && t[i1 * n + i1 - 1] != 0.0 {
            let i0 = i1 - 1;
            let ra = Complex64::new(yr[i0], yi[i0]) - tail_dot(i0, i1 + 1, yr, yi);
            let rb = Complex64::new(yr[i1], yi[i1]) - tail_dot(i1, i1 + 1, yr, yi);
            let m = [
                [t[i0 * n + i0] - lambda, Complex64::from(t[i0 * n + i1])],
                [Complex64::from(t[i1 * n + i0]), t[i1 * n + i1] - lambda],
            ];
            let [u0, u1] = solve_2x2(m, [ra, rb], smin);
            yr[i0] = u0.re;
            yi[i0] = u0.im;
            yr[i1] = u1.re;
            yi[i1] = u1.im;
            biggest = u0.norm().max(u1.norm());
            i -= 2;
        } else {
            let r = Complex64::new(yr[i1], yi[i1]) - tail_dot(i1, i1 + 1, yr, yi);
            let u = r / protect(t[i1 * n + i1] - lambda);
            yr[i1] = u.re;
            yi[i1] = u.im;
            biggest = u.norm();
            i -= 1;
        }
        if rescale && biggest > BIG {
            let g = 1.0 / biggest;
            for v in yr[..len].iter_mut().chain(yi[..len].iter_mut()) {
                *v *= g;
            }
            factor *= g;
        }
    }
    factor
}

/// Solves a complex 2x2 system by Gaussian elimination with complete
/// pivoting; pivots below `smin` are raised to `smin`, as in the 1x1 case.
fn solve_2x2(m: [[Complex64; 2]; 2], r: [Complex64; 2], smin: f64) -> [Complex64; 2] {
    let (mut p, mut q) = (0, 0);
    for i in 0..2 {
        for j in 0..2 {
            if m[i][j].norm() > m[p][q].norm() {
                (p, q) = (i, j);
            }
        }
    }
    if m[p][q].norm() < smin {
        return [r[0] / smin, r[1] / smin];
    }
    let (p2, q2) = (1 - p, 1 - q);
    let l = m[p2][q] / m[p][q];
    let mut u22 = m[p2][q2] - l * m[p][q2];
    if u22.norm() < smin {
        u22 = Complex64::new(smin, 0.0);
    }
    let mut x = [Complex64::new(0.0, 0.0); 2];
    x[q2] = (r[p2] - l * r[p]) / u22;
    x[q] = (r[p] - m[p][q2] * x[q2]) / m[p][q];
    x
}

/// `D Z v` for `v` supported on the first `len` Schur coordinates.
fn to_original(s: &RealSchur, vr: &[f64], vi: &[f64], len: usize) -> Vec<Complex64> {
    let n = s.n;
    let zt = s.zt.as_ref().expect("Schur vectors were not computed");
    let mut out_r = vec![0.0; n];
    let mut out_i = vec![0.0; n];
    for j in 0..len {
        let row = &zt[j * n..(j + 1) * n];
        let (a, b) = (vr[j], vi[j]);
        if a != 0.0 {
            for (o, z) in out_r.iter_mut().zip(row) {
                *o += a * z;
            }
        }
        if b != 0.0 {
            for (o, z) in out_i.iter_mut().zip(row) {
                *o += b * z;
            }
        }
    }
    out_r
        .into_iter()
        .zip(out_i)
        .zip(&s.scale)
        .map(|((r, i), d)| Complex64::new(r * d, i * d))
        .collect()
}

/// Right eigenvector (unnormalized, original coordinates) for the
/// eigenvalue stored at diagonal position `pos`.
pub(crate) fn schur_eigenvector(s: &RealSchur, pos: usize) -> Vec<Complex64> {
    let n = s.n;
    let t = &s.t;
    let lambda = s.eig[pos];
    let mut yr = vec![0.0; n];
    let mut yi = vec![0.0; n];
    let (upto, len);
    if lambda.im == 0.0 {
        yr[pos] = 1.0;
        upto = pos;
        len = pos + 1;
    } else {
        // 2x2 block at (top, top + 1); pick (b, lambda - a) for the pair.
        let top = if pos + 1 < n && t[(pos + 1) * n + pos] != 0.0 { pos } else { pos - 1 };
        let a = t[top * n + top];
        let b = t[top * n + top + 1];
        let v = lambda - a;
        yr[top] = b;
        yr[top + 1] = v.re;
        yi[top + 1] = v.im;
        upto = top;
        len = top + 2;
    }
    back_substitute(t, n, lambda, &mut yr, &mut yi, upto, len, s.smin(), true);
    to_original(s, &yr, &yi, len)
}

/// Solves `(A - lambda) x = b` for the matrix `A = D Z T Z^T D^-1` the
/// Schur form was computed from.
pub(crate) fn shifted_solve(s: &RealSchur, lambda: Complex64, b: &[Complex64]) -> Vec<Complex64> {
    let n = s.n;
    let zt = s.zt.as_ref().expect("Schur vectors were not computed");
    // c = Z^T D^-1 b
    let br: Vec<f64> = b.iter().zip(&s.scale).map(|(v, d)| v.re / d).collect();
    let bi: Vec<f64> = b.iter().zip(&s.scale).map(|(v, d)| v.im / d).collect();
    let mut yr = vec![0.0; n];
    let mut yi = vec![0.0; n];
    for j in 0..n {
        let row = &zt[j * n..(j + 1) * n];
        yr[j] = row.iter().zip(&br).map(|(a, b)| a * b).sum();
        yi[j] = row.iter().zip(&bi).map(|(a, b)| a * b).sum();
    }
    back_substitute(&s.t, n, lambda, &mut yr, &mut yi, n, n, s.smin(), false);
    to_original(s, &yr, &yi, n)
}

#[cfg(test)]
mod tests {
    use super::super::schur::real_schur;
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n * n).map(|_| r.random::<f64>() - 0.5).collect()
    }

    fn apply(a: &[f64], n: usize, v: &[Complex64]) -> Vec<Complex64> {
        (0..n)
            .map(|i| (0..n).map(|j| v[j] * a[i * n + j]).sum())
            .collect()
    }

    #[test]
    fn eigenvectors_satisfy_the_eigen_equation() {
        for (n, seed) in [(1, 1), (2, 7), (5, 2), (30, 3), (80, 4)] {
            let a = random(n, seed);
            let s = real_schur(a.clone(), n, true, true).unwrap();
            for pos in 0..n {
                let v = schur_eigenvector(&s, pos);
                let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                let av = apply(&a, n, &v);
                let res = av
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| (x - s.eig[pos] * y).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res < 1e-12 * norm * n as f64, "n={n} pos={pos} res={res}");
            }
        }
    }

    #[test]
    fn pivoted_2x2_solve() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let m = [[c(1e-3, 0.0), c(2.0, 1.0)], [c(3.0, 0.0), c(-1.0, 0.5)]];
        let x = [c(0.5, -1.0), c(2.0, 0.25)];
        let r = [m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]];
        let got = solve_2x2(m, r, 1e-14);
        assert!((got[0] - x[0]).norm() < 1e-13 && (got[1] - x[1]).norm() < 1e-13);

        // Rank one: the second pivot is raised, the first equation still holds.
        let m = [[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        let got = solve_2x2(m, [c(1.0, 0.0), c(2.0, 0.0)], 1e-14);
        assert!((got[0] + got[1] * 2.0 - 1.0).norm() < 1e-12);
    }

    #[test]
    fn shifted_solve_inverts() {
        let n = 25;
        let a = random(n, 9);
        let s = real_schur(a.clone(), n, true, true).unwrap();
        let lambda = Complex64::new(0.3, -0.2);
        let b: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let x = shifted_solve(&s, lambda, &b);
        let ax = apply(&a, n, &x);
        for i in 0..n {
            assert!((ax[i] - lambda * x[i] - b[i]).norm() < 1e-10);
        }
    }
}
