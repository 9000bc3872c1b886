//! Adaptive Gauss-Kronrod quadrature along polygonal contours.

use super::linalg::C64;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Polygonal contour in the z-chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPath {
    pub samples: Vec<C64>,
    /// 1/sqrt singularity of the integrand at the start / end point.
    pub endpoint_singularity: (bool, bool),
    pub closed: bool,
}

impl ParamPath {
    pub fn new(samples: Vec<C64>) -> Result<Self> {
        Self::with_flags(samples, (false, false))
    }

    pub fn with_flags(samples: Vec<C64>, endpoint_singularity: (bool, bool)) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain("a path needs at least two samples".into()));
        }
        if samples.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("consecutive path samples coincide".into()));
        }
        let closed = samples.len() > 2 && samples[0] == samples[samples.len() - 1];
        Ok(ParamPath {
            samples,
            endpoint_singularity,
            closed,
        })
    }

    pub fn segment(a: C64, b: C64) -> Result<Self> {
        Self::new(vec![a, b])
    }

    /// Closed regular polygon approximating a circle, starting at angle `phase`.
    pub fn circle(center: C64, radius: f64, n: usize, phase: f64) -> Self {
        let mut samples: Vec<C64> = (0..n)
            .map(|k| {
                center
                    + C64::from_polar(
                        radius,
                        phase + 2.0 * std::f64::consts::PI * k as f64 / n as f64,
                    )
            })
            .collect();
        samples.push(samples[0]);
        ParamPath {
            samples,
            endpoint_singularity: (false, false),
            closed: true,
        }
    }

    pub fn start(&self) -> C64 {
        self.samples[0]
    }

    pub fn end(&self) -> C64 {
        *self.samples.last().unwrap()
    }

    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        ParamPath {
            samples,
            endpoint_singularity: (self.endpoint_singularity.1, self.endpoint_singularity.0),
            closed: self.closed,
        }
    }

    /// self followed by `other`; the end of self must be the start of other.
    pub fn concat(&self, other: &ParamPath) -> Result<Self> {
        if self.end() != other.start() {
            return Err(Error::Domain("paths do not join".into()));
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples[1..]);
        ParamPath::with_flags(
            samples,
            (self.endpoint_singularity.0, other.endpoint_singularity.1),
        )
    }

    pub fn segments(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        self.samples.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn n_segments(&self) -> usize {
        self.samples.len() - 1
    }

    /// Point at parameter u in [0, n_segments].
    pub fn point(&self, u: f64) -> C64 {
        let n = self.n_segments();
        let k = (u.floor() as usize).min(n - 1);
        let t = u - k as f64;
        self.samples[k] + (self.samples[k + 1] - self.samples[k]) * t
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate on [a, b] with the embedded 7-point Gauss error.
fn gk15(f: &dyn Fn(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let fc = f(m);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(m - x) + f(m + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive integral of a complex function of a real variable on [a, b].
pub fn integrate_real(f: &dyn Fn(f64) -> C64, a: f64, b: f64, tol: f64) -> Result<C64> {
    // Pieces (a, b, value, err), refined by splitting the worst one.
    let (v, e) = gk15(f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    for _ in 0..2000 {
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        if total_err <= tol {
            return Ok(pieces.iter().map(|p| p.2).sum());
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
    let estimate = pieces.iter().map(|p| p.2).sum();
    let error_bound = pieces.iter().map(|p| p.3).sum();
    if error_bound <= tol {
        Ok(estimate)
    } else {
        Err(Error::NoConvergence {
            estimate,
            error_bound,
        })
    }
}

fn integrate_segment(
    f: &dyn Fn(C64) -> C64,
    a: C64,
    b: C64,
    sing: (bool, bool),
    tol: f64,
) -> Result<C64> {
    let dz = b - a;
    match sing {
        (false, false) => integrate_real(&|t| f(a + dz * t) * dz, 0.0, 1.0, tol),
        (true, false) => integrate_real(&|u| f(a + dz * (u * u)) * dz * (2.0 * u), 0.0, 1.0, tol),
        (false, true) => integrate_real(&|u| f(b - dz * (u * u)) * dz * (2.0 * u), 0.0, 1.0, tol),
        (true, true) => {
            let m = a + 0.5 * dz;
            Ok(integrate_segment(f, a, m, (true, false), 0.5 * tol)?
                + integrate_segment(f, m, b, (false, true), 0.5 * tol)?)
        }
    }
}

/// Integral of f(z) dz along the path. Flagged endpoints are treated with
/// the substitution z - endpoint = u^2.
pub fn integrate_contour(f: &dyn Fn(C64) -> C64, path: &ParamPath, tol: f64) -> Result<C64> {
    let n = path.n_segments();
    let seg_tol = tol / n as f64;
    let mut sum = C64::new(0.0, 0.0);
    for (k, (a, b)) in path.segments().enumerate() {
        let sing = (
            k == 0 && path.endpoint_singularity.0,
            k == n - 1 && path.endpoint_singularity.1,
        );
        sum += integrate_segment(f, a, b, sing, seg_tol)?;
    }
    Ok(sum)
}
