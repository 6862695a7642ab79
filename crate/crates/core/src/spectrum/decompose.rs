use std::cmp::Ordering;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use super::blocks::{diagonal_block, strongly_connected_components, BlockOrder};
use super::dense::{dense_memory_estimate, materialize_dense, DenseMatrix, DEFAULT_DENSE_CAP};
use super::eigvec::{schur_eigenvector, shifted_solve};
use super::schur::{real_schur, RealSchur};
use crate::error::{Error, Result};
use crate::rank::participation_ratio_complex;
use crate::sparse::CscMatrix;

/// Eigenvalues with `|lambda|` below this count as the degenerate
/// `lambda = 0` family.
pub const DEGENERATE_ABS: f64 = 1e-8;

/// Which eigenvectors to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VectorSelection {
    None,
    All,
    /// Only for eigenvalues with `|lambda| >= threshold`.
    AbsAtLeast(f64),
}

impl VectorSelection {
    fn wants(self, lambda: Complex64) -> bool {
        match self {
            VectorSelection::None => false,
            VectorSelection::All => true,
            VectorSelection::AbsAtLeast(t) => lambda.norm() >= t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub vectors: VectorSelection,
    /// Store the eigenvectors in the result; otherwise only their PAR and
    /// residual are kept.
    pub keep_vectors: bool,
    pub balance: bool,
    /// Largest dense matrix (or diagonal block) that will be formed.
    pub dense_cap: usize,
    /// At `alpha = 1`, split `S` into strongly connected components and
    /// decompose the diagonal blocks separately. Exact, and much cheaper
    /// when the link graph has transient parts.
    pub use_blocks: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            vectors: VectorSelection::All,
            keep_vectors: true,
            balance: true,
            dense_cap: DEFAULT_DENSE_CAP,
            use_blocks: true,
        }
    }
}

impl EigenOptions {
    pub fn eigenvalues_only() -> Self {
        Self {
            vectors: VectorSelection::None,
            keep_vectors: false,
            ..Self::default()
        }
    }
}

/// Full complex spectrum of a Google matrix, sorted by decreasing `|lambda|`
/// (ties: decreasing real part, then increasing imaginary part).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub n: usize,
    pub eigenvalues: Vec<Complex64>,
    /// `-2 ln |lambda|`; `f64::INFINITY` for `lambda = 0`.
    pub gammas: Vec<f64>,
    /// PAR of each computed right eigenvector.
    pub pars: Vec<Option<f64>>,
    /// `||G psi - lambda psi||_2` for unit `psi`.
    pub residuals: Vec<Option<f64>>,
    /// Unit eigenvectors, largest component real-positive.
    pub vectors: Option<Vec<Option<Vec<Complex64>>>>,
    /// Sizes of the diagonal blocks that were decomposed (one entry for the
    /// plain dense path).
    pub block_sizes: Vec<usize>,
}

pub fn decay_rate(lambda: Complex64) -> f64 {
    let a = lambda.norm();
    if a == 0.0 {
        f64::INFINITY
    } else {
        -2.0 * a.ln()
    }
}

/// Moduli equal to 12 digits count as ties, so that e.g. the roots of
/// unity of a closed cycle sort by real part.
fn modulus_key(l: &Complex64) -> f64 {
    (l.norm() * 1e12).round()
}

fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    modulus_key(b)
        .total_cmp(&modulus_key(a))
        .then(b.re.total_cmp(&a.re))
        .then(a.im.total_cmp(&b.im))
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_residual(&self) -> Option<f64> {
        self.residuals.iter().flatten().copied().reduce(f64::max)
    }

    /// TSV: `index re_lambda im_lambda abs_lambda gamma xi residual`,
    /// with `inf` for infinite decay rates and `nan` for eigenvectors that
    /// were not computed.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# index\tre_lambda\tim_lambda\tabs_lambda\tgamma\txi\tresidual")?;
        for (i, l) in self.eigenvalues.iter().enumerate() {
            let gamma = if self.gammas[i].is_infinite() {
                "inf".to_string()
            } else {
                self.gammas[i].to_string()
            };
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{:e}",
                i,
                l.re,
                l.im,
                l.norm(),
                gamma,
                self.pars[i].unwrap_or(f64::NAN),
                self.residuals[i].unwrap_or(f64::NAN)
            )?;
        }
        Ok(())
    }
}

enum Block {
    Single(usize, f64),
    Dense(Vec<usize>, RealSchur),
}

enum Operator<'a> {
    Sparse(&'a CscMatrix),
    Dense(&'a DenseMatrix),
}

impl Operator<'_> {
    fn residual(&self, lambda: Complex64, v: &[Complex64]) -> f64 {
        let mut r: Vec<Complex64> = v.iter().map(|x| -lambda * x).collect();
        match self {
            Operator::Sparse(s) => {
                for (j, &vj) in v.iter().enumerate() {
                    for (i, a) in s.column(j) {
                        r[i] += vj * a;
                    }
                }
            }
            Operator::Dense(m) => {
                for (i, ri) in r.iter_mut().enumerate() {
                    let (mut sr, mut si) = (0.0, 0.0);
                    for (a, x) in m.row(i).iter().zip(v) {
                        sr += a * x.re;
                        si += a * x.im;
                    }
                    *ri += Complex64::new(sr, si);
                }
            }
        }
        r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

struct Decomposition<'a> {
    n: usize,
    blocks: Vec<Block>,
    /// Present on the block path.
    order: Option<(BlockOrder, &'a CscMatrix)>,
}

fn schur_block(a: Vec<f64>, m: usize, opts: &EigenOptions, block: usize) -> Result<RealSchur> {
    let want = opts.vectors != VectorSelection::None;
    real_schur(a, m, want, opts.balance).map_err(|e| match e {
        Error::EigenNotConverged { iterations, .. } => Error::EigenNotConverged { block, iterations },
        e => e,
    })
}

impl<'a> Decomposition<'a> {
    fn dense(m: &DenseMatrix, opts: &EigenOptions) -> Result<Self> {
        let n = m.n();
        let schur = schur_block(m.as_slice().to_vec(), n, opts, 0)?;
        Ok(Self {
            n,
            blocks: vec![Block::Dense((0..n).collect(), schur)],
            order: None,
        })
    }

    fn by_components(s: &'a CscMatrix, opts: &EigenOptions) -> Result<Self> {
        let order = strongly_connected_components(s);
        let largest = order.largest();
        if largest > opts.dense_cap {
            return Err(Error::DenseCapExceeded {
                n: largest,
                cap: opts.dense_cap,
                bytes: dense_memory_estimate(largest),
            });
        }
        let mut blocks = Vec::with_capacity(order.len());
        for (b, nodes) in order.blocks.iter().enumerate() {
            if nodes.len() == 1 {
                let j = nodes[0];
                blocks.push(Block::Single(j, s.get(j, j)));
            } else {
                let a = diagonal_block(s, &order, b);
                blocks.push(Block::Dense(nodes.clone(), schur_block(a, nodes.len(), opts, b)?));
            }
        }
        Ok(Self {
            n: s.n(),
            blocks,
            order: Some((order, s)),
        })
    }

    /// `(lambda, block, position)` for every eigenvalue.
    fn eigenvalues(&self) -> Vec<(Complex64, usize, usize)> {
        let mut out = Vec::with_capacity(self.n);
        for (b, block) in self.blocks.iter().enumerate() {
            match block {
                Block::Single(_, v) => out.push((Complex64::new(*v, 0.0), b, 0)),
                Block::Dense(_, s) => out.extend(s.eig.iter().enumerate().map(|(p, &l)| (l, b, p))),
            }
        }
        out
    }

    /// Unnormalized eigenvector in node coordinates.
    fn eigenvector(&self, b: usize, pos: usize, lambda: Complex64) -> Vec<Complex64> {
        let n = self.n;
        let mut psi = vec![Complex64::new(0.0, 0.0); n];
        match &self.blocks[b] {
            Block::Single(j, _) => psi[*j] = Complex64::new(1.0, 0.0),
            Block::Dense(nodes, s) => {
                for (&j, v) in nodes.iter().zip(schur_eigenvector(s, pos)) {
                    psi[j] = v;
                }
            }
        }
        let Some((order, s)) = &self.order else {
            return psi;
        };

        // Components downstream of b receive probability from b; solve
        // (A_cc - lambda) psi_c = -sum_d S_cd psi_d from b towards the sinks.
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut touched = vec![false; b];
        let scatter = |c: usize, psi: &[Complex64], acc: &mut [Complex64], touched: &mut [bool]| {
            for &j in &order.blocks[c] {
                let pj = psi[j];
                if pj == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (i, a) in s.column(j) {
                    let bi = order.block_of[i];
                    if bi < c {
                        acc[i] += pj * a;
                        touched[bi] = true;
                    }
                }
            }
        };
        scatter(b, &psi, &mut acc, &mut touched);
        let smin = f64::EPSILON;
        for c in (0..b).rev() {
            if !touched[c] {
                continue;
            }
            match &self.blocks[c] {
                Block::Single(j, v) => {
                    let mut d = Complex64::new(*v, 0.0) - lambda;
                    if d.norm() < smin {
                        d = Complex64::new(smin, 0.0);
                    }
                    psi[*j] = -acc[*j] / d;
                }
                Block::Dense(nodes, schur) => {
                    let rhs: Vec<Complex64> = nodes.iter().map(|&j| -acc[j]).collect();
                    for (&j, v) in nodes.iter().zip(shifted_solve(schur, lambda, &rhs)) {
                        psi[j] = v;
                    }
                }
            }
            // Keep magnitudes bounded when nearly singular solves blow up.
            let big = order.blocks[c].iter().map(|&j| psi[j].norm()).fold(0.0, f64::max);
            if big > 1e100 {
                let g = 1.0 / big;
                psi.iter_mut().chain(acc.iter_mut()).for_each(|v| *v *= g);
            }
            scatter(c, &psi, &mut acc, &mut touched);
        }
        psi
    }
}

fn normalize(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut big = 0;
    for (i, c) in v.iter().enumerate() {
        if c.norm() > v[big].norm() {
            big = i;
        }
    }
    let phase = if v[big].norm() > 0.0 {
        v[big].conj() / v[big].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let f = phase / norm;
    v.iter_mut().for_each(|c| *c *= f);
    v[big] = Complex64::new(v[big].norm(), 0.0);
    v
}

fn assemble(dec: &Decomposition, op: Operator, opts: &EigenOptions) -> Result<SpectrumResult> {
    let mut entries = dec.eigenvalues();
    entries.sort_by(|a, b| spectral_order(&a.0, &b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    // Vectors of complex pairs come from the member with positive
    // imaginary part; the partner is its conjugate.
    let wanted: Vec<usize> = (0..entries.len())
        .filter(|&i| opts.vectors.wants(entries[i].0) && entries[i].0.im >= 0.0)
        .collect();
    let computed: Vec<(usize, Vec<Complex64>, f64, f64)> = wanted
        .par_iter()
        .map(|&i| {
            let (lambda, b, pos) = entries[i];
            let v = normalize(dec.eigenvector(b, pos, lambda));
            let xi = participation_ratio_complex(&v)?;
            let res = op.residual(lambda, &v);
            Ok((i, v, xi, res))
        })
        .collect::<Result<_>>()?;

    let n = entries.len();
    let mut pars = vec![None; n];
    let mut residuals = vec![None; n];
    let mut vectors: Vec<Option<Vec<Complex64>>> = vec![None; n];
    let index_of: std::collections::HashMap<(usize, usize), usize> =
        entries.iter().enumerate().map(|(i, e)| ((e.1, e.2), i)).collect();
    for (i, v, xi, res) in computed {
        let (lambda, b, pos) = entries[i];
        if lambda.im > 0.0 {
            // the conjugate sits at the next diagonal position of the block
            if let Some(&k) = index_of.get(&(b, pos + 1)) {
                if opts.vectors.wants(entries[k].0) {
                    pars[k] = Some(xi);
                    residuals[k] = Some(res);
                    if opts.keep_vectors {
                        vectors[k] = Some(v.iter().map(|c| c.conj()).collect());
                    }
                }
            }
        }
        pars[i] = Some(xi);
        residuals[i] = Some(res);
        if opts.keep_vectors {
            vectors[i] = Some(v);
        }
    }

    let eigenvalues: Vec<Complex64> = entries.iter().map(|e| e.0).collect();
    let gammas = eigenvalues.iter().map(|&l| decay_rate(l)).collect();
    let block_sizes = dec
        .blocks
        .iter()
        .map(|b| match b {
            Block::Single(..) => 1,
            Block::Dense(nodes, _) => nodes.len(),
        })
        .collect();
    Ok(SpectrumResult {
        n: dec.n,
        eigenvalues,
        gammas,
        pars,
        residuals,
        vectors: opts.keep_vectors.then_some(vectors),
        block_sizes,
    })
}

/// Complete eigendecomposition of a dense matrix.
pub fn eigendecompose(m: &DenseMatrix, opts: &EigenOptions) -> Result<SpectrumResult> {
    if !m.is_finite() {
        return Err(crate::error::invalid("matrix", "entries must be finite"));
    }
    let dec = Decomposition::dense(m, opts)?;
    assemble(&dec, Operator::Dense(m), opts)
}

/// Spectrum of `G = alpha S + (1 - alpha) E / N`. At `alpha = 1` with
/// `use_blocks` the strongly connected components of `S` are decomposed
/// separately; otherwise `G` is densified (subject to `dense_cap`).
pub fn google_spectrum(s: &CscMatrix, alpha: f64, opts: &EigenOptions) -> Result<SpectrumResult> {
    if alpha == 1.0 && opts.use_blocks {
        let dec = Decomposition::by_components(s, opts)?;
        return assemble(&dec, Operator::Sparse(s), opts);
    }
    let m = materialize_dense(s, alpha, opts.dense_cap)?;
    eigendecompose(&m, opts)
}
