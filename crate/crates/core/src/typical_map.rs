//! The dissipative Chirikov typical map
//!
//! ```text
//! y' = eta * y + k * sin(x + theta_t),   x' = x + y'   (mod 2pi)
//! ```
//!
//! with `T` fixed phases `theta_t` repeated periodically. The phase space is
//! the torus `[0, 2pi) x [-pi, pi)`. The phase `x` is wrapped after every
//! step; the momentum `y` is only reduced once per period, after all `T`
//! steps have been applied.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::io;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::rng::{self, Purpose};
use crate::trig;

/// Phases of the `T10` set, as fractions of `2pi`.
pub const T10_PHASES: [f64; 10] = [
    0.562579, 0.279666, 0.864585, 0.654365, 0.821395, 0.981145, 0.478149, 0.834115, 0.180307,
    0.15902,
];

/// Phases of the `T20` set, as fractions of `2pi`.
pub const T20_PHASES: [f64; 20] = [
    0.415733267627,
    0.310795551489,
    0.632094907846,
    0.749488203411,
    0.924301928270,
    0.635937571045,
    0.118768635110,
    0.647524548037,
    0.651928927275,
    0.952312529146,
    0.370553510280,
    0.810837257644,
    0.814808044380,
    0.834758628241,
    0.993694010264,
    0.702057578688,
    0.828693568678,
    0.855421638697,
    0.278538720979,
    0.653773338142,
];

/// Wraps into `[0, 2pi)`.
#[inline]
pub fn wrap_phase(x: f64) -> f64 {
    // `rem_euclid` goes through fmod, which dominates the cost of a map
    // step; one or two shifts cover every value the map produces.
    let r = if (0.0..TAU).contains(&x) {
        return x;
    } else if (-TAU..0.0).contains(&x) {
        // x + 2pi can round up to 2pi for tiny negative x
        (x + TAU).min(TAU.next_down())
    } else if (TAU..2.0 * TAU).contains(&x) {
        x - TAU
    } else {
        x - TAU * (x / TAU).floor()
    };
    if (0.0..TAU).contains(&r) {
        r
    } else if r < 0.0 {
        // floor() overshoot for values just below a multiple of 2pi
        (r + TAU).min(TAU.next_down())
    } else {
        0.0
    }
}

/// Wraps into `[-pi, pi)`.
#[inline]
pub fn wrap_momentum(y: f64) -> f64 {
    if (-PI..PI).contains(&y) {
        return y;
    }
    let r = wrap_phase(y + PI) - PI;
    if r >= PI {
        -PI
    } else {
        r
    }
}

/// Parameters of the map: period, phases, kick strength and dissipation.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSet {
    theta_over_2pi: Vec<f64>,
    theta: Vec<f64>,
    k: f64,
    eta: f64,
}

impl PhaseSet {
    /// Builds a phase set from phases given as fractions of `2pi`.
    pub fn new(theta_over_2pi: Vec<f64>, k: f64, eta: f64) -> Result<Self> {
        if theta_over_2pi.is_empty() {
            return Err(invalid("T", "the period must contain at least one phase"));
        }
        if let Some(bad) = theta_over_2pi
            .iter()
            .find(|f| !(f.is_finite() && (0.0..1.0).contains(*f)))
        {
            return Err(invalid(
                "theta_over_2pi",
                format!("{bad} is outside [0, 1)"),
            ));
        }
        check_k(k)?;
        check_eta(eta)?;
        let theta = theta_over_2pi.iter().map(|f| TAU * f).collect();
        Ok(Self {
            theta_over_2pi,
            theta,
            k,
            eta,
        })
    }

    /// The built-in `T10` set with its working point `k = 0.22`, `eta = 0.99`.
    pub fn t10() -> Self {
        Self::new(T10_PHASES.to_vec(), 0.22, 0.99).expect("built-in set is valid")
    }

    /// The built-in `T20` set with its working point `k = 0.3`, `eta = 0.97`.
    pub fn t20() -> Self {
        Self::new(T20_PHASES.to_vec(), 0.3, 0.97).expect("built-in set is valid")
    }

    pub fn period(&self) -> usize {
        self.theta.len()
    }

    /// Phases in radians.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_over_2pi(&self) -> &[f64] {
        &self.theta_over_2pi
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Dissipation rate per period, `-T ln(eta)`.
    pub fn gamma_c(&self) -> f64 {
        -(self.period() as f64) * self.eta.ln()
    }

    /// Area contraction per period, `eta^T = exp(-gamma_c)`.
    pub fn contraction(&self) -> f64 {
        (-self.gamma_c()).exp()
    }

    pub fn with_k(&self, k: f64) -> Result<Self> {
        check_k(k)?;
        Ok(Self { k, ..self.clone() })
    }

    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        Ok(Self { eta, ..self.clone() })
    }

    /// Serializes to the plain-text config format.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "T={}", self.period());
        let _ = writeln!(out, "k={}", self.k);
        let _ = writeln!(out, "eta={}", self.eta);
        for f in &self.theta_over_2pi {
            let _ = writeln!(out, "theta_over_2pi={f}");
        }
        out
    }

    /// Parses the plain-text config format: `T=`, `k=`, `eta=` followed by
    /// `T` lines of `theta_over_2pi=`. Blank lines and `#` comments are
    /// ignored.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut period = None;
        let mut k = None;
        let mut eta = None;
        let mut phases = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected `key=value`, found `{line}`"),
            })?;
            let value = value.trim();
            let parse_f64 = |v: &str| {
                v.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad number `{v}`: {e}"),
                })
            };
            match key.trim() {
                "T" => {
                    period = Some(value.parse::<usize>().map_err(|e| Error::Parse {
                        line: line_no,
                        message: format!("bad period `{value}`: {e}"),
                    })?)
                }
                "k" => k = Some(parse_f64(value)?),
                "eta" => eta = Some(parse_f64(value)?),
                "theta_over_2pi" => phases.push(parse_f64(value)?),
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        let missing = |what: &str| Error::Parse {
            line: text.lines().count(),
            message: format!("missing `{what}=` line"),
        };
        let period = period.ok_or_else(|| missing("T"))?;
        let k = k.ok_or_else(|| missing("k"))?;
        let eta = eta.ok_or_else(|| missing("eta"))?;
        if phases.len() != period {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: format!("T={period} but {} phases were given", phases.len()),
            });
        }
        Self::new(phases, k, eta)
    }
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(invalid("k", format!("{k} must be finite and >= 0")));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid("eta", format!("{eta} is outside (0, 1]")));
    }
    Ok(())
}

pub fn phase_set_t10() -> PhaseSet {
    PhaseSet::t10()
}

pub fn phase_set_t20() -> PhaseSet {
    PhaseSet::t20()
}

/// A point of the phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapState {
    pub x: f64,
    pub y: f64,
}

impl MapState {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// One iteration with phase `theta_t`. `y` is left unwrapped.
#[inline]
pub fn step(state: MapState, theta_t: f64, k: f64, eta: f64) -> MapState {
    let y = eta * state.y + k * trig::sin(state.x + theta_t);
    MapState {
        x: wrap_phase(state.x + y),
        y,
    }
}

/// One full period: `T` steps in listed phase order, then `y` is reduced
/// into `[-pi, pi)`.
#[inline]
pub fn iterate_period(state: MapState, ps: &PhaseSet) -> MapState {
    let (k, eta) = (ps.k, ps.eta);
    let mut s = state;
    for &theta in &ps.theta {
        s = step(s, theta, k, eta);
    }
    s.y = wrap_momentum(s.y);
    s
}

/// [`iterate_period`] applied to many points at once, laid out as separate
/// `x` and `y` slices. Bit-identical to the scalar version; the split loops
/// let independent trajectories overlap in the pipeline.
pub fn iterate_period_batch(xs: &mut [f64], ys: &mut [f64], ps: &PhaseSet) {
    assert_eq!(xs.len(), ys.len());
    let (k, eta) = (ps.k, ps.eta);
    debug_assert!(xs.iter().all(|x| (0.0..TAU).contains(x)));
    for &theta in &ps.theta {
        // x in [0, 2pi) and theta in [0, 2pi), so the argument is bounded.
        for (x, y) in xs.iter_mut().zip(ys.iter_mut()) {
            let yn = eta * *y + k * trig::sin_bounded(*x + theta);
            *x += yn;
            *y = yn;
        }
        for x in xs.iter_mut() {
            *x = wrap_phase(*x);
        }
    }
    for y in ys.iter_mut() {
        *y = wrap_momentum(*y);
    }
}

/// Kolmogorov-Sinai entropy estimate `0.29 k^(2/3)`.
pub fn ks_entropy_theory(k: f64) -> f64 {
    0.29 * k.powf(2.0 / 3.0)
}

/// Fractal dimension estimate `2 - gamma_c / (T h)`.
pub fn dimension_estimate(gamma_c: f64, period: usize, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(invalid("h", format!("{h} must be positive")));
    }
    if period == 0 {
        return Err(invalid("T", "period must be at least 1"));
    }
    Ok(2.0 - gamma_c / (period as f64 * h))
}

/// Options for [`lyapunov_entropy`]. Counts are in map periods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovOptions {
    pub n_periods: usize,
    pub n_transient_periods: usize,
    pub seed: u64,
    /// Maximal allowed change of the running estimate over the final 10% of
    /// the periods.
    pub drift_tolerance: f64,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        Self {
            n_periods: 1_000_000,
            n_transient_periods: 1_000,
            seed: 1,
            drift_tolerance: 5e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovResult {
    /// Largest Lyapunov exponent per map iteration.
    pub h: f64,
    pub h_theory: f64,
    /// `2 - gamma_c / (T h)`, or `None` when `h <= 0`.
    pub d_estimate: Option<f64>,
    /// Periods averaged over (excluding the transient).
    pub n_periods: usize,
    pub n_transient_periods: usize,
    /// Change of the running estimate over the last 10% of the periods.
    pub drift: f64,
}

/// Largest Lyapunov exponent from the tangent map, renormalized once per
/// period and averaged per iteration.
pub fn lyapunov_entropy(ps: &PhaseSet, opts: &LyapunovOptions) -> Result<LyapunovResult> {
    if opts.n_periods == 0 {
        return Err(invalid("n_periods", "must be positive"));
    }
    if opts.n_transient_periods >= opts.n_periods {
        return Err(invalid(
            "n_transient_periods",
            "must be smaller than the number of averaged periods",
        ));
    }
    let mut rng = rng::stream(opts.seed, Purpose::Lyapunov, 0);
    let mut s = MapState::new(rng.random_range(0.0..TAU), rng.random_range(-PI..PI));
    let (k, eta) = (ps.k, ps.eta);
    // Tangent vector (dx, dy); start off-axis so it has a component along
    // the unstable direction.
    let (mut dx, mut dy) = (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);
    let tangent_period = |s: &mut MapState, dx: &mut f64, dy: &mut f64| -> f64 {
        for &theta in &ps.theta {
            let c = k * (s.x + theta).cos();
            let ndy = eta * *dy + c * *dx;
            let ndx = *dx + ndy;
            *dx = ndx;
            *dy = ndy;
            *s = step(*s, theta, k, eta);
        }
        s.y = wrap_momentum(s.y);
        let norm = dx.hypot(*dy);
        *dx /= norm;
        *dy /= norm;
        norm.ln()
    };

    for _ in 0..opts.n_transient_periods {
        tangent_period(&mut s, &mut dx, &mut dy);
    }
    let checkpoint = opts.n_periods - opts.n_periods / 10;
    let steps_per_period = ps.period() as f64;
    let mut sum = 0.0;
    let mut at_checkpoint = 0.0;
    for i in 1..=opts.n_periods {
        sum += tangent_period(&mut s, &mut dx, &mut dy);
        if i == checkpoint {
            at_checkpoint = sum / (i as f64 * steps_per_period);
        }
    }
    let h = sum / (opts.n_periods as f64 * steps_per_period);
    let drift = (h - at_checkpoint).abs();
    if drift > opts.drift_tolerance {
        return Err(Error::LyapunovDrift {
            drift,
            tolerance: opts.drift_tolerance,
        });
    }
    Ok(LyapunovResult {
        h,
        h_theory: ks_entropy_theory(ps.k),
        d_estimate: dimension_estimate(ps.gamma_c(), ps.period(), h).ok(),
        n_periods: opts.n_periods,
        n_transient_periods: opts.n_transient_periods,
        drift,
    })
}

/// A half-open window `(start, end]` of period indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodWindow {
    pub label: String,
    pub start: usize,
    pub end: usize,
}

impl PeriodWindow {
    pub fn new(label: impl Into<String>, start: usize, end: usize) -> Self {
        Self {
            label: label.into(),
            start,
            end,
        }
    }

    /// `(100, 110]`, the short-time window.
    pub fn early() -> Self {
        Self::new("early", 100, 110)
    }

    /// `(10^4, 10^4 + 100]`, the long-time window.
    pub fn late() -> Self {
        Self::new("late", 10_000, 10_100)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationPoint {
    pub trajectory: usize,
    pub period_index: usize,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationSample {
    pub k: f64,
    pub window: PeriodWindow,
    pub n_traj: usize,
    pub points: Vec<BifurcationPoint>,
}

impl BifurcationSample {
    pub fn y_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.y)
    }
}

/// Records `y` at every period boundary inside each window, for `n_traj`
/// trajectories per `k` launched from seeded uniform positions.
///
/// The same initial positions are used for every `k` value; trajectory `i`
/// draws from stream `i` of the master seed.
pub fn bifurcation_scan(
    template: &PhaseSet,
    k_values: &[f64],
    n_traj: usize,
    windows: &[PeriodWindow],
    seed: u64,
) -> Result<Vec<BifurcationSample>> {
    for w in windows {
        if w.end <= w.start {
            return Err(invalid("window", format!("({}, {}] is empty", w.start, w.end)));
        }
    }
    let horizon = windows.iter().map(|w| w.end).max().unwrap_or(0);
    let starts: Vec<MapState> = (0..n_traj)
        .map(|i| {
            let mut r = rng::stream(seed, Purpose::Bifurcation, i as u64);
            MapState::new(r.random_range(0.0..TAU), r.random_range(-PI..PI))
        })
        .collect();

    let mut out = Vec::with_capacity(k_values.len() * windows.len());
    for &k in k_values {
        let ps = template.with_k(k)?;
        // Per trajectory, the y values at every period index 1..=horizon that
        // falls inside some window.
        let traces: Vec<Vec<(usize, f64)>> = starts
            .par_iter()
            .map(|&s0| {
                let mut s = s0;
                let mut rec = Vec::new();
                for t in 1..=horizon {
                    s = iterate_period(s, &ps);
                    if windows.iter().any(|w| t > w.start && t <= w.end) {
                        rec.push((t, s.y));
                    }
                }
                rec
            })
            .collect();
        for w in windows {
            let points = traces
                .iter()
                .enumerate()
                .flat_map(|(traj, rec)| {
                    rec.iter()
                        .filter(|(t, _)| *t > w.start && *t <= w.end)
                        .map(move |&(t, y)| BifurcationPoint {
                            trajectory: traj,
                            period_index: t,
                            y,
                        })
                })
                .collect();
            out.push(BifurcationSample {
                k,
                window: w.clone(),
                n_traj,
                points,
            });
        }
    }
    Ok(out)
}

/// TSV with columns `k window trajectory_id period_index y`.
pub fn write_bifurcation_tsv<W: io::Write>(mut w: W, samples: &[BifurcationSample]) -> io::Result<()> {
    writeln!(w, "# k\twindow\ttrajectory_id\tperiod_index\ty")?;
    for s in samples {
        for p in &s.points {
            writeln!(w, "{}\t{}\t{}\t{}\t{}", s.k, s.window.label, p.trajectory, p.period_index, p.y)?;
        }
    }
    Ok(())
}
