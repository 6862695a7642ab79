use num_complex::Complex64;

use crate::error::{Error, Result};

/// Participation ratio `(sum |v_j|^2)^2 / sum |v_j|^4`, the effective number
/// of nodes carrying the vector. Lies in `[1, len]` and is scale-invariant.
pub fn participation_ratio(v: &[f64]) -> Result<f64> {
    par_from_weights(v.iter().map(|x| x.abs()))
}

pub fn participation_ratio_complex(v: &[Complex64]) -> Result<f64> {
    par_from_weights(v.iter().map(|z| z.norm()))
}

fn par_from_weights<I>(magnitudes: I) -> Result<f64>
where
    I: Iterator<Item = f64> + Clone,
{
    // Rescale by the largest magnitude so fourth powers cannot underflow.
    let scale = magnitudes.clone().fold(0.0f64, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::ZeroVector);
    }
    let (mut s2, mut s4) = (0.0, 0.0);
    for m in magnitudes {
        let w = (m / scale) * (m / scale);
        s2 += w;
        s4 += w * w;
    }
    Ok(s2 * s2 / s4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn limits() {
        assert!((participation_ratio(&[0.25; 4]).unwrap() - 4.0).abs() < 1e-14);
        let mut delta = vec![0.0; 10];
        delta[3] = 2.0;
        assert_eq!(participation_ratio(&delta).unwrap(), 1.0);
        let mut two = vec![0.0; 7];
        two[0] = 1.0;
        two[1] = 1.0;
        assert_eq!(participation_ratio(&two).unwrap(), 2.0);
        assert!(matches!(participation_ratio(&[0.0; 3]), Err(Error::ZeroVector)));
    }

    #[test]
    fn complex_phases_do_not_matter() {
        let v = [Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!((participation_ratio_complex(&v).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn tiny_values_do_not_underflow() {
        let v = vec![1e-100; 50];
        assert!((participation_ratio(&v).unwrap() - 50.0).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn bounded_and_scale_invariant(v in proptest::collection::vec(-5.0..5.0f64, 1..60), c in 0.01..100.0f64) {
            prop_assume!(v.iter().any(|x| x.abs() > 1e-6));
            let xi = participation_ratio(&v).unwrap();
            prop_assert!(xi >= 1.0 - 1e-12 && xi <= v.len() as f64 + 1e-9);
            let w: Vec<f64> = v.iter().map(|x| x * c).collect();
            prop_assert!((participation_ratio(&w).unwrap() - xi).abs() < 1e-9 * xi);
        }
    }
}
