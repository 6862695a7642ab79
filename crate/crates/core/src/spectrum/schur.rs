//! Real Schur decomposition of a dense nonsymmetric matrix: diagonal
//! balancing, Householder reduction to upper Hessenberg form and the
//! Francis double-shift QR iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `D^-1 A D = Z T Z^T` with `T` upper quasi-triangular (1x1 and 2x2
/// diagonal blocks) and `Z` orthogonal.
#[derive(Debug, Clone)]
pub(crate) struct RealSchur {
    pub n: usize,
    /// `T`, row-major. Only meaningful when vectors were requested.
    pub t: Vec<f64>,
    /// `Z^T`, row-major, so row `j` holds the `j`-th Schur vector.
    pub zt: Option<Vec<f64>>,
    /// Diagonal of the balancing transform `D`.
    pub scale: Vec<f64>,
    /// Eigenvalues in diagonal order; a complex pair occupies two
    /// consecutive slots, positive imaginary part first.
    pub eig: Vec<Complex64>,
    /// Sum of absolute entries of the Hessenberg part of `T`.
    pub norm: f64,
}

impl RealSchur {
    /// Smallest pivot magnitude tolerated by the triangular solves.
    pub fn smin(&self) -> f64 {
        (f64::EPSILON * self.norm).max(f64::MIN_POSITIVE)
    }
}

/// Diagonal similarity `D^-1 A D` reducing row and column norms to
/// comparable sizes (powers of two, so exact in floating point).
fn balance(a: &mut [f64], n: usize) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let mut scale = vec![1.0; n];
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= SQRDX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= SQRDX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                scale[i] *= f;
                let g = 1.0 / f;
                for v in &mut a[i * n..(i + 1) * n] {
                    *v *= g;
                }
                for j in 0..n {
                    a[j * n + i] *= f;
                }
            }
        }
        if done {
            return scale;
        }
    }
}

/// Householder reduction to upper Hessenberg form in place. Returns the
/// accumulated transform as `Z^T` when requested.
fn hessenberg(h: &mut [f64], n: usize, want_z: bool) -> Option<Vec<f64>> {
    let mut ort = vec![0.0; n];
    let mut f = vec![0.0; n];
    if n > 2 {
        let high = n - 1;
        for m in 1..high {
            let scale: f64 = (m..=high).map(|i| h[i * n + m - 1].abs()).sum();
            if scale == 0.0 {
                continue;
            }
            let mut hh = 0.0;
            for i in (m..=high).rev() {
                ort[i] = h[i * n + m - 1] / scale;
                hh += ort[i] * ort[i];
            }
            let mut g = hh.sqrt();
            if ort[m] > 0.0 {
                g = -g;
            }
            hh -= ort[m] * g;
            ort[m] -= g;
            let u = &ort[m..=high];

            // H = (I - u u^T / hh) H on columns m..n
            let fm = &mut f[m..n];
            fm.fill(0.0);
            for (i, &ui) in (m..=high).zip(u) {
                for (fj, &hij) in fm.iter_mut().zip(&h[i * n + m..(i + 1) * n]) {
                    *fj += ui * hij;
                }
            }
            for (i, &ui) in (m..=high).zip(u) {
                let c = ui / hh;
                for (hij, &fj) in h[i * n + m..(i + 1) * n].iter_mut().zip(fm.iter()) {
                    *hij -= c * fj;
                }
            }
            // H = H (I - u u^T / hh) on rows 0..=high
            for i in 0..=high {
                let row = &mut h[i * n + m..i * n + high + 1];
                let d: f64 = row.iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / hh;
                for (hij, &uj) in row.iter_mut().zip(u) {
                    *hij -= d * uj;
                }
            }
            ort[m] *= scale;
            h[m * n + m - 1] = scale * g;
        }
    }

    let zt = want_z.then(|| {
        let mut zt = vec![0.0; n * n];
        for i in 0..n {
            zt[i * n + i] = 1.0;
        }
        if n > 2 {
            let high = n - 1;
            for m in (1..high).rev() {
                let hm = h[m * n + m - 1];
                if hm == 0.0 {
                    continue;
                }
                for i in m + 1..=high {
                    ort[i] = h[i * n + m - 1];
                }
                let u = &ort[m..=high];
                let denom = ort[m] * hm;
                // V = (I + u u^T / denom) V on the trailing block; row j of
                // zt is column j of V.
                for j in m..=high {
                    let row = &mut zt[j * n + m..j * n + high + 1];
                    let g = row.iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / denom;
                    for (v, &ui) in row.iter_mut().zip(u) {
                        *v += g * ui;
                    }
                }
            }
        }
        zt
    });

    for i in 2..n {
        for v in &mut h[i * n..i * n + i - 1] {
            *v = 0.0;
        }
    }
    zt
}

/// Applies the 3x3 (or 2x2 when `r` is absent) reflector stored as
/// `(x, y, z, q, r)` to columns `k..k+2` of rows `rows` of a row-major
/// matrix.
#[inline]
fn reflect_columns(a: &mut [f64], n: usize, k: usize, rows: std::ops::Range<usize>, c: [f64; 5], notlast: bool) {
    let [x, y, z, q, r] = c;
    for i in rows {
        let base = i * n + k;
        if notlast {
            let w = &mut a[base..base + 3];
            let p = x * w[0] + y * w[1] + z * w[2];
            w[0] -= p;
            w[1] -= p * q;
            w[2] -= p * r;
        } else {
            let w = &mut a[base..base + 2];
            let p = x * w[0] + y * w[1];
            w[0] -= p;
            w[1] -= p * q;
        }
    }
}

/// Same reflector applied to rows `k..k+2` over the column range `cols`.
#[inline]
fn reflect_rows(a: &mut [f64], n: usize, k: usize, cols: std::ops::Range<usize>, c: [f64; 5], notlast: bool) {
    let [x, y, z, q, r] = c;
    let (head, tail) = a.split_at_mut((k + 1) * n);
    let r0 = &mut head[k * n + cols.start..k * n + cols.end];
    if notlast {
        let (mid, rest) = tail.split_at_mut(n);
        let r1 = &mut mid[cols.clone()];
        let r2 = &mut rest[cols];
        for ((a0, a1), a2) in r0.iter_mut().zip(r1.iter_mut()).zip(r2.iter_mut()) {
            let p = *a0 + q * *a1 + r * *a2;
            *a2 -= p * z;
            *a0 -= p * x;
            *a1 -= p * y;
        }
    } else {
        let r1 = &mut tail[cols];
        for (a0, a1) in r0.iter_mut().zip(r1.iter_mut()) {
            let p = *a0 + q * *a1;
            *a0 -= p * x;
            *a1 -= p * y;
        }
    }
}

/// Plane rotation of columns `k, k+1` (rows `rows`).
fn rotate_columns(a: &mut [f64], n: usize, k: usize, rows: std::ops::Range<usize>, p: f64, q: f64) {
    for i in rows {
        let w = &mut a[i * n + k..i * n + k + 2];
        let z = w[0];
        w[0] = q * z + p * w[1];
        w[1] = q * w[1] - p * z;
    }
}

fn rotate_rows(a: &mut [f64], n: usize, k: usize, cols: std::ops::Range<usize>, p: f64, q: f64) {
    let (head, tail) = a.split_at_mut((k + 1) * n);
    let r0 = &mut head[k * n + cols.start..k * n + cols.end];
    let r1 = &mut tail[cols];
    for (a0, a1) in r0.iter_mut().zip(r1.iter_mut()) {
        let z = *a0;
        *a0 = q * z + p * *a1;
        *a1 = q * *a1 - p * z;
    }
}

/// Computes the eigenvalues of the `n x n` row-major matrix `a` and, with
/// `want_vectors`, the full real Schur form and Schur vectors.
///
/// Fails when the QR iteration needs more than `30 n` iterations in total.
pub(crate) fn real_schur(mut a: Vec<f64>, n: usize, want_vectors: bool, balance_first: bool) -> Result<RealSchur> {
    assert_eq!(a.len(), n * n);
    let scale = if balance_first { balance(&mut a, n) } else { vec![1.0; n] };
    let mut zt = hessenberg(&mut a, n, want_vectors);
    let h = &mut a;
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    let eps = f64::EPSILON;

    let mut norm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            norm += h[i * n + j].abs();
        }
    }

    let max_total = 30 * n.max(1);
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut x, mut y, mut w);
    let mut en = n as isize - 1;

    while en >= 0 {
        let nn = en as usize;
        // Look for a single small subdiagonal element.
        let mut l = nn;
        while l > 0 {
            s = h[(l - 1) * n + l - 1].abs() + h[l * n + l].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[l * n + l - 1].abs() < eps * s {
                break;
            }
            l -= 1;
        }
        if l > 0 {
            h[l * n + l - 1] = 0.0;
        }

        if l == nn {
            h[nn * n + nn] += exshift;
            eig[nn] = Complex64::new(h[nn * n + nn], 0.0);
            en -= 1;
            iter = 0;
        } else if l + 1 == nn {
            let m1 = nn - 1;
            w = h[nn * n + m1] * h[m1 * n + nn];
            p = (h[m1 * n + m1] - h[nn * n + nn]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[nn * n + nn] += exshift;
            h[m1 * n + m1] += exshift;
            x = h[nn * n + nn];
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                let d1 = x + z;
                let d2 = if z != 0.0 { x - w / z } else { d1 };
                eig[m1] = Complex64::new(d1, 0.0);
                eig[nn] = Complex64::new(d2, 0.0);
                if want_vectors {
                    x = h[nn * n + m1];
                    s = x.abs() + z.abs();
                    p = x / s;
                    q = z / s;
                    r = (p * p + q * q).sqrt();
                    p /= r;
                    q /= r;
                    rotate_rows(h, n, m1, m1..n, p, q);
                    rotate_columns(h, n, m1, 0..nn + 1, p, q);
                    if let Some(zt) = zt.as_mut() {
                        rotate_rows(zt, n, m1, 0..n, p, q);
                    }
                    // The rotation triangularizes the block: keep T exact.
                    h[nn * n + m1] = 0.0;
                    eig[m1] = Complex64::new(h[m1 * n + m1], 0.0);
                    eig[nn] = Complex64::new(h[nn * n + nn], 0.0);
                }
            } else {
                eig[m1] = Complex64::new(x + p, z);
                eig[nn] = Complex64::new(x + p, -z);
            }
            en -= 2;
            iter = 0;
        } else {
            x = h[nn * n + nn];
            y = h[(nn - 1) * n + nn - 1];
            w = h[nn * n + nn - 1] * h[(nn - 1) * n + nn];

            if iter == 10 {
                exshift += x;
                for i in 0..=nn {
                    h[i * n + i] -= x;
                }
                s = h[nn * n + nn - 1].abs() + h[(nn - 1) * n + nn - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nn {
                        h[i * n + i] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total += 1;
            if total > max_total {
                return Err(Error::EigenNotConverged {
                    block: nn,
                    iterations: total,
                });
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = nn - 2;
            loop {
                z = h[m * n + m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1) * n + m] + h[m * n + m + 1];
                q = h[(m + 1) * n + m + 1] - z - r - s;
                r = h[(m + 2) * n + m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let lhs = h[m * n + m - 1].abs() * (q.abs() + r.abs());
                let rhs = eps * (p.abs() * (h[(m - 1) * n + m - 1].abs() + z.abs() + h[(m + 1) * n + m + 1].abs()));
                if lhs < rhs {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                h[i * n + i - 2] = 0.0;
                if i > m + 2 {
                    h[i * n + i - 3] = 0.0;
                }
            }

            // Double QR step on rows l..=nn and columns m..=nn.
            for k in m..nn {
                let notlast = k != nn - 1;
                if k != m {
                    p = h[k * n + k - 1];
                    q = h[(k + 1) * n + k - 1];
                    r = if notlast { h[(k + 2) * n + k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s == 0.0 {
                    continue;
                }
                if k != m {
                    h[k * n + k - 1] = -s * x;
                } else if l != m {
                    h[k * n + k - 1] = -h[k * n + k - 1];
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;
                let c = [x, y, z, q, r];

                let (col_end, row_start) = if want_vectors { (n, 0) } else { (nn + 1, l) };
                reflect_rows(h, n, k, k..col_end, [x, y, z, q, r], notlast);
                let last = nn.min(k + 3);
                reflect_columns(h, n, k, row_start..last + 1, c, notlast);
                if let Some(zt) = zt.as_mut() {
                    // columns of Z are rows of zt
                    reflect_zt(zt, n, k, c, notlast);
                }
            }
        }
    }

    // rounding-level leftovers of the bulge chase
    for i in 2..n {
        for v in &mut h[i * n..i * n + i - 1] {
            *v = 0.0;
        }
    }
    let t = std::mem::take(h);
    Ok(RealSchur {
        n,
        t,
        zt,
        scale,
        eig,
        norm,
    })
}

/// Column update of `Z` expressed on the rows of `Z^T`.
fn reflect_zt(zt: &mut [f64], n: usize, k: usize, c: [f64; 5], notlast: bool) {
    let [x, y, z, q, r] = c;
    let (head, tail) = zt.split_at_mut((k + 1) * n);
    let r0 = &mut head[k * n..(k + 1) * n];
    if notlast {
        let (mid, rest) = tail.split_at_mut(n);
        let r2 = &mut rest[..n];
        for ((a0, a1), a2) in r0.iter_mut().zip(mid.iter_mut()).zip(r2.iter_mut()) {
            let p = x * *a0 + y * *a1 + z * *a2;
            *a0 -= p;
            *a1 -= p * q;
            *a2 -= p * r;
        }
    } else {
        for (a0, a1) in r0.iter_mut().zip(tail[..n].iter_mut()) {
            let p = x * *a0 + y * *a1;
            *a0 -= p;
            *a1 -= p * q;
        }
    }
}
