//! Branch-light sine used by the map kernels.
//!
//! `libm`'s `sin` is a library call with data-dependent branches, which
//! keeps the compiler from overlapping independent trajectories. This
//! version uses a three-part Cody-Waite reduction by `pi/2` and the
//! fdlibm kernel polynomials on `[-pi/4, pi/4]`; it agrees with `f64::sin`
//! to within a couple of ulp for `|x| < 2^20` and defers to it beyond.

const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI;
// pi/2 split so that n * PIO2_1 is exact for |n| < 2^20.
const PIO2_1: f64 = 1.570_796_326_734_125_614_17e0;
const PIO2_2: f64 = 6.077_100_506_303_965_976_60e-11;
const PIO2_3: f64 = 2.022_266_248_711_166_455_80e-21;

const S1: f64 = -1.666_666_666_666_663_243_48e-1;
const S2: f64 = 8.333_333_333_322_489_461_24e-3;
const S3: f64 = -1.984_126_982_985_794_931_34e-4;
const S4: f64 = 2.755_731_370_707_006_767_89e-6;
const S5: f64 = -2.505_076_025_340_686_341_95e-8;
const S6: f64 = 1.589_690_995_211_550_102_21e-10;

const C1: f64 = 4.166_666_666_666_660_190_37e-2;
const C2: f64 = -1.388_888_888_887_410_957_49e-3;
const C3: f64 = 2.480_158_728_947_672_941_78e-5;
const C4: f64 = -2.755_731_435_139_066_330_35e-7;
const C5: f64 = 2.087_572_321_298_174_827_90e-9;
const C6: f64 = -1.135_964_755_778_819_482_65e-11;

const REDUCTION_LIMIT: f64 = 1_048_576.0;
const ROUND_SHIFT: f64 = 6_755_399_441_055_744.0;

#[inline(always)]
fn kernel_sin(r: f64) -> f64 {
    let z = r * r;
    let p = S2 + z * (S3 + z * (S4 + z * (S5 + z * S6)));
    r + r * z * (S1 + z * p)
}

#[inline(always)]
fn kernel_cos(r: f64) -> f64 {
    let z = r * r;
    let p = z * (C1 + z * (C2 + z * (C3 + z * (C4 + z * (C5 + z * C6)))));
    let hz = 0.5 * z;
    let w = 1.0 - hz;
    w + (((1.0 - w) - hz) + z * p)
}

#[inline(always)]
pub fn sin(x: f64) -> f64 {
    if !(x.abs() < REDUCTION_LIMIT) {
        return x.sin();
    }
    sin_bounded(x)
}

/// [`sin`] without the range check; the caller guarantees `|x| < 2^20`.
#[inline(always)]
pub fn sin_bounded(x: f64) -> f64 {
    // Round-to-nearest via the 1.5 * 2^52 shift; avoids a libm call for
    // `round` on baseline x86-64.
    let shifted = x * FRAC_2_PI + ROUND_SHIFT;
    let q = shifted.to_bits() as i64;
    let n = shifted - ROUND_SHIFT;
    let r = ((x - n * PIO2_1) - n * PIO2_2) - n * PIO2_3;
    let s = kernel_sin(r);
    let c = kernel_cos(r);
    let v = if q & 1 == 0 { s } else { c };
    f64::from_bits(v.to_bits() ^ (((q as u64) & 2) << 62))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ulps(a: f64, b: f64) -> f64 {
        (a - b).abs() / (f64::EPSILON * b.abs().max(f64::MIN_POSITIVE))
    }

    #[test]
    fn dense_sweep_over_map_range() {
        let mut worst_abs = 0.0f64;
        let n = 2_000_000;
        for i in 0..n {
            let x = -7.0 + 21.0 * i as f64 / n as f64;
            worst_abs = worst_abs.max((sin(x) - x.sin()).abs());
        }
        assert!(worst_abs < 3e-16, "{worst_abs:e}");
    }

    #[test]
    fn special_points() {
        assert_eq!(sin(0.0), 0.0);
        assert!(sin(std::f64::consts::PI).abs() < 2e-16);
        assert!((sin(std::f64::consts::FRAC_PI_2) - 1.0).abs() < 1e-16);
        assert!(sin(f64::NAN).is_nan());
        assert_eq!(sin(1e7), 1e7f64.sin());
    }

    proptest! {
        #[test]
        fn relative_accuracy(x in -1000.0..1000.0f64) {
            let e = ulps(sin(x), x.sin());
            // Near zeros the relative error of the reduced argument grows.
            prop_assert!(e < 4.0 || (sin(x) - x.sin()).abs() < 1e-16, "x={} ulps={}", x, e);
        }
    }
}
