use std::f64::consts::PI;
use std::sync::OnceLock;

use super::ShapeAssignment;

const TERMS: usize = 40;

/// ζ(2k) for k = 1..=TERMS.
fn zeta_even() -> &'static [f64; TERMS] {
    static TABLE: OnceLock<[f64; TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; TERMS];
        out[0] = PI * PI / 6.0;
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            let s = 2 * (k + 1);
            // tail beyond 10^4 is below 1e-16 for s >= 4
            let mut sum = 0.0;
            for n in (1..=10_000u32).rev() {
                sum += (n as f64).powi(-(s as i32));
            }
            *slot = sum;
        }
        out
    })
}

/// Clausen's function Cl₂(θ) via its Bernoulli series on (−π, π].
fn clausen(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta % two_pi;
    if t > PI {
        t -= two_pi;
    } else if t <= -PI {
        t += two_pi;
    }
    if t == 0.0 {
        return 0.0;
    }
    let x = t / two_pi;
    let x2 = x * x;
    let mut sum = t - t * t.abs().ln();
    let mut pow = x2;
    for (k, z) in zeta_even().iter().enumerate() {
        let k = (k + 1) as f64;
        let term = t * z * pow / (k * (2.0 * k + 1.0));
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
        pow *= x2;
    }
    sum
}

/// The Lobachevsky function Л(θ) = −∫₀^θ log|2 sin t| dt.
pub fn lobachevsky(theta: f64) -> f64 {
    0.5 * clausen(2.0 * theta)
}

/// Σ Л(arg z) + Л(arg z') + Л(arg z'') over all tetrahedra.
pub fn volume(sol: &ShapeAssignment) -> f64 {
    sol.shapes
        .iter()
        .map(|s| s.params().iter().map(|p| lobachevsky(p.arg())).sum::<f64>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Shape, ShapeAssignment};
    use num_complex::Complex64;

    fn quadrature(theta: f64) -> f64 {
        // log|2 sin t| = log t + log|2 sin t / t|; integrate log t exactly
        let n = 200_000;
        let h = theta / n as f64;
        let smooth: f64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                (2.0 * t.sin() / t).abs().ln()
            })
            .sum::<f64>()
            * h;
        -(theta * theta.ln() - theta + smooth)
    }

    #[test]
    fn matches_quadrature() {
        for theta in [0.3, PI / 3.0, 1.2, 2.5] {
            assert!((lobachevsky(theta) - quadrature(theta)).abs() < 1e-9, "{theta}");
        }
    }

    #[test]
    fn vanishes_at_multiples_of_pi() {
        for k in -2..=2 {
            assert!(lobachevsky(k as f64 * PI).abs() < 1e-14);
        }
        assert!(lobachevsky(PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn regular_tetrahedron() {
        let v = volume(&ShapeAssignment::regular(1));
        assert!((v - 1.014_941_606_409_653_6).abs() < 1e-13);
    }

    #[test]
    fn flat_shapes_have_zero_volume() {
        let sol = ShapeAssignment::from_shapes(vec![Shape::new(Complex64::new(2.0, 0.0)); 3]);
        assert!(volume(&sol).abs() < 1e-14);
    }
}
