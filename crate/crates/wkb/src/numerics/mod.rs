//! Special functions, quadrature, matrix exponentials, ODE transport and root finding.

pub mod linalg;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod special;

pub use linalg::{
    c, expm_neg_symmetric, expm_neg_symmetric_log, LMat2, LogComplex, Mat2, Scalar, ScaledMatrix,
    C64, I, M2,
};
pub use ode::{dopri5, transport_along, transport_ode, OdeOptions};
pub use quad::{integrate_contour, integrate_real, ParamPath};
pub use roots::bracket_root;
pub use special::{
    bessel_k0, bessel_k0_scaled, bessel_k1, bessel_k1_scaled, elliptic_f, elliptic_k,
};

/// Least-squares line through the points: (slope, intercept).
pub fn linfit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
