//! Dormand-Prince 5(4) integrator and the log-scaled matrix transport built on it.

use super::linalg::{Mat2, ScaledMatrix, C64};
use super::quad::ParamPath;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-10,
            h_init: 1e-2,
            h_min: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn comb<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

/// Integrates y' = f(t, y) from t0 to t1 (either direction). `on_accept` may
/// rescale the state after every accepted step. Returns the final state and
/// the last step size.
pub fn dopri5<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &OdeOptions,
    on_accept: &mut dyn FnMut(f64, &mut [f64; N]),
) -> Result<([f64; N], f64)> {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    if span <= 4.0 * f64::EPSILON * t0.abs().max(t1.abs()).max(1.0) {
        return Ok((y0, opts.h_init));
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h_init.min(span) * dir;
    let mut k1 = f(t, &y);
    for _ in 0..opts.max_steps {
        if (t1 - t) * dir <= 0.0 {
            return Ok((y, h.abs()));
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, &comb(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &comb(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            t + C4 * h,
            &comb(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + C5 * h,
            &comb(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &comb(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = comb(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = f(t + h, &y_new);
        let mut err = 0.0f64;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        if err.is_nan() {
            err = f64::INFINITY;
        }
        if err <= 1.0 {
            t += h;
            y = y_new;
            on_accept(t, &mut y);
            k1 = if y == y_new { k7 } else { f(t, &y) };
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h.abs() < opts.h_min && (t1 - t) * dir > opts.h_min {
            return Err(Error::StepUnderflow(t));
        }
    }
    Err(Error::StepUnderflow(t))
}

fn pack(m: &Mat2) -> [f64; 8] {
    [
        m.a.re, m.a.im, m.b.re, m.b.im, m.c.re, m.c.im, m.d.re, m.d.im,
    ]
}

fn unpack(y: &[f64; 8]) -> Mat2 {
    Mat2::new(
        C64::new(y[0], y[1]),
        C64::new(y[2], y[3]),
        C64::new(y[4], y[5]),
        C64::new(y[6], y[7]),
    )
}

/// Fundamental solution of dY/dt = -form(t) Y, Y(t0) = I, at t1.
pub fn transport_ode(
    form: &dyn Fn(f64) -> Mat2,
    t0: f64,
    t1: f64,
    opts: &OdeOptions,
) -> Result<ScaledMatrix> {
    let rhs = |t: f64, y: &[f64; 8]| pack(&(form(t) * unpack(y)).scale(C64::new(-1.0, 0.0)));
    let mut log_scale = 0.0;
    let mut renorm = |_t: f64, y: &mut [f64; 8]| {
        let m = unpack(y);
        let mx = m.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
        if mx > 0.0 && !(0.5..=2.0).contains(&mx) {
            for v in y.iter_mut() {
                *v /= mx;
            }
            log_scale += mx.ln();
        }
    };
    let (y, _) = dopri5(&rhs, t0, pack(&Mat2::identity()), t1, opts, &mut renorm)?;
    Ok(ScaledMatrix::new(unpack(&y), log_scale))
}

/// Transport of dY = -A(z) dz Y along a polygonal path, where `form` gives
/// the coefficient of dz.
pub fn transport_along(
    form: &dyn Fn(C64) -> Mat2,
    path: &ParamPath,
    opts: &OdeOptions,
) -> Result<ScaledMatrix> {
    let mut total = ScaledMatrix::identity();
    for (a, b) in path.segments() {
        let dz = b - a;
        let seg = transport_ode(&|t| form(a + dz * t).scale(dz), 0.0, 1.0, opts)?;
        total = seg * total;
    }
    Ok(total)
}
