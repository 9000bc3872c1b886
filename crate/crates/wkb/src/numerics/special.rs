//! Modified Bessel functions of the second kind and Legendre elliptic integrals.

use crate::error::{Error, Result};

/// e^x K_nu(x) for nu in {0, 1}, by the trapezoid rule on
/// int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt.
///
/// The integrand is analytic in the strip |Im t| < pi/2, so the rule
/// converges geometrically in 1/h.
fn scaled_k(nu: u8, x: f64) -> f64 {
    const H: f64 = 0.05;
    let term = |t: f64| {
        let e = (-x * (t.cosh() - 1.0)).exp();
        if nu == 0 {
            e
        } else {
            e * t.cosh()
        }
    };
    let mut sum = 0.5 * term(0.0);
    let mut n = 1;
    loop {
        let v = term(n as f64 * H);
        sum += v;
        if v < 1e-18 * sum {
            break;
        }
        n += 1;
    }
    sum * H
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Bessel argument must be positive, got {x}"
        )))
    }
}

pub fn bessel_k0(x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(scaled_k(0, x) * (-x).exp())
}

pub fn bessel_k1(x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(scaled_k(1, x) * (-x).exp())
}

/// e^x K_0(x); finite for all x > 0.
pub fn bessel_k0_scaled(x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(scaled_k(0, x))
}

/// e^x K_1(x).
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(scaled_k(1, x))
}

/// Carlson's symmetric integral R_F(x, y, z) by duplication.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    loop {
        let a = (x + y + z) / 3.0;
        let dx = 1.0 - x / a;
        let dy = 1.0 - y / a;
        let dz = 1.0 - z / a;
        let m = dx.abs().max(dy.abs()).max(dz.abs());
        if m < 1e-4 {
            // fifth-order series; truncation error ~ m^6 / 10
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0)
                / a.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
    }
}

/// Moduli closer to 1 than this are refused.
pub const ELLIPTIC_K_MAX: f64 = 1.0 - 1e-9;

fn check_modulus(k: f64) -> Result<()> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!(
            "elliptic modulus must lie in (0,1), got {k}"
        )));
    }
    if k > ELLIPTIC_K_MAX {
        return Err(Error::Divergence(format!(
            "elliptic modulus {k} too close to 1"
        )));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind K(k), modulus convention.
pub fn elliptic_k(k: f64) -> Result<f64> {
    check_modulus(k)?;
    Ok(carlson_rf(0.0, 1.0 - k * k, 1.0))
}

/// Incomplete integral F(x; k) = int_0^x dt / sqrt((1-t^2)(1-k^2 t^2)).
pub fn elliptic_f(x: f64, k: f64) -> Result<f64> {
    check_modulus(k)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "elliptic_f argument must lie in [0,1], got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let x2 = x * x;
    Ok(x * carlson_rf(1.0 - x2, 1.0 - k * k * x2, 1.0))
}

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
