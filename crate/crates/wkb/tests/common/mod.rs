//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use std::f64::consts::PI;

pub type M = [[C; 2]; 2];

fn mul(a: &M, b: &M) -> M {
    let mut r = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

/// exp(m) by scaling and squaring with a degree-24 Taylor polynomial.
pub fn expm(m: &M) -> M {
    let norm = m.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let f = 2f64.powi(-s);
    let a = [[m[0][0] * f, m[0][1] * f], [m[1][0] * f, m[1][1] * f]];
    let mut term = [
        [C::new(1.0, 0.0), C::new(0.0, 0.0)],
        [C::new(0.0, 0.0), C::new(1.0, 0.0)],
    ];
    let mut sum = term;
    for k in 1..=24 {
        term = mul(&term, &a);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        sum = mul(&sum, &sum);
    }
    sum
}

/// Complete elliptic integral of the first kind for modulus k, via the AGM.
pub fn elliptic_k_agm(k: f64) -> f64 {
    let (mut a, mut b) = (1.0f64, (1.0 - k * k).sqrt());
    for _ in 0..60 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        a = an;
        b = bn;
        if (a - b).abs() < 1e-17 {
            break;
        }
    }
    PI / (2.0 * a)
}

/// e^x K_0(x) = int_0^inf exp(-x (cosh t - 1)) dt by the trapezoid rule,
/// which converges geometrically for this integrand.
pub fn bessel_k0_scaled(x: f64) -> f64 {
    let h: f64 = 0.005;
    let mut sum = 0.5;
    let mut t: f64 = h;
    loop {
        let v = (-x * (t.cosh() - 1.0)).exp();
        sum += v;
        if v < 1e-18 {
            break;
        }
        t += h;
    }
    sum * h
}

/// Winding number of a closed polygon about p from summed argument increments.
pub fn winding(poly: &[C], p: C) -> i64 {
    let mut tot = 0.0;
    for w in poly.windows(2) {
        tot += ((w[1] - p) / (w[0] - p)).arg();
    }
    (tot / (2.0 * PI)).round() as i64
}

/// Distance from p to the segment [a, b].
pub fn seg_dist(a: C, b: C, p: C) -> f64 {
    let ab = b - a;
    let t = (((p - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
    (a + ab * t - p).norm()
}
