//! Painleve-III fiducial profiles, the circle connection form and the
//! fiducial circle monodromy.

use crate::error::{Error, Result};
use crate::numerics::{
    bessel_k0, bessel_k1, bessel_k1_scaled, dopri5, expm_neg_symmetric_log, LMat2, LogComplex,
    Mat2, OdeOptions, ScaledMatrix, C64, I,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiducialKind {
    /// (d^2/dr^2 + r^-1 d/dr) m = 8 R r^-1 sinh 2m, m ~ K0(8 sqrt(R r)) / pi.
    Logarithmic,
    /// (d^2/dr^2 + r^-1 d/dr) l = 8 R r sinh 2l, l ~ K0((8/3) sqrt(R r^3)) / pi.
    Ramification,
}

impl FiducialKind {
    /// Power p with r d/dr = (p/2) x d/dx for the Bessel variable x ~ r^{p/2}.
    fn power(self) -> f64 {
        match self {
            FiducialKind::Logarithmic => 1.0,
            FiducialKind::Ramification => 3.0,
        }
    }

    /// Bessel variable at radius r.
    pub fn x(self, r_scale: f64, r: f64) -> f64 {
        match self {
            FiducialKind::Logarithmic => 8.0 * (r_scale * r).sqrt(),
            FiducialKind::Ramification => 8.0 / 3.0 * (r_scale * r * r * r).sqrt(),
        }
    }

    fn r_of_x(self, r_scale: f64, x: f64) -> f64 {
        match self {
            FiducialKind::Logarithmic => x * x / (64.0 * r_scale),
            FiducialKind::Ramification => (9.0 * x * x / (64.0 * r_scale)).cbrt(),
        }
    }
}

/// Bessel variable at the outer end of the default grid.
pub const DEFAULT_X_MAX: f64 = 32.0;
pub const DEFAULT_R_MIN: f64 = 1e-8;
pub const DEFAULT_N_GRID: usize = 2000;

/// Profile sampled on a log-uniform radial grid, with t = ln r derivative.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiducialSolution {
    pub kind: FiducialKind,
    pub r_scale: f64,
    /// Increasing radii, uniform in ln r.
    pub grid: Vec<f64>,
    pub m: Vec<f64>,
    /// r dm/dr at the grid points.
    pub rdm: Vec<f64>,
}

fn bessel_data(kind: FiducialKind, x: f64) -> Result<(f64, f64)> {
    // m = K0(x)/pi, r dm/dr = (p/2) x dm/dx = -(p/2) x K1(x) / pi
    Ok((
        bessel_k0(x)? / PI,
        -0.5 * kind.power() * x * bessel_k1(x)? / PI,
    ))
}

impl FiducialSolution {
    /// Shoots inward from r_max with Bessel data and records the profile on
    /// `n_grid` log-spaced radii in [r_min, r_max]. When r_max is inside
    /// the Bessel-accurate region the integration starts further out.
    pub fn solve(
        kind: FiducialKind,
        r_scale: f64,
        r_max: f64,
        n_grid: usize,
        r_min: f64,
    ) -> Result<Self> {
        if !(r_scale > 0.0) || !(r_max > r_min) || !(r_min > 0.0) || n_grid < 8 {
            return Err(Error::Domain("invalid fiducial grid parameters".into()));
        }
        let p = kind.power();
        let rhs = move |t: f64, y: &[f64; 2]| -> [f64; 2] {
            let r = t.exp();
            // m_tt = 8 R r^{p-1} r^2 ... written as 8 R r^p sinh 2m for p = 1, 3
            [y[1], 8.0 * r_scale * r.powf(p) * (2.0 * y[0]).sinh()]
        };
        let opts = OdeOptions {
            rtol: 1e-13,
            atol: 1e-300,
            h_init: 1e-3,
            h_min: 1e-14,
            max_steps: 5_000_000,
        };
        let r_start = r_max.max(kind.r_of_x(r_scale, DEFAULT_X_MAX));
        let (m0, d0) = bessel_data(kind, kind.x(r_scale, r_start))?;
        let (lo, hi) = (r_min.ln(), r_max.ln());
        let dt = (hi - lo) / (n_grid - 1) as f64;
        let mut grid = vec![0.0; n_grid];
        let mut m = vec![0.0; n_grid];
        let mut rdm = vec![0.0; n_grid];
        let mut y = [m0, d0];
        let mut t = r_start.ln();
        let mut h = opts.h_init;
        for i in (0..n_grid).rev() {
            let ti = if i == n_grid - 1 {
                hi
            } else {
                lo + dt * i as f64
            };
            let o = OdeOptions { h_init: h, ..opts };
            let (yn, hn) = dopri5(&rhs, t, y, ti, &o, &mut |_, _| {})?;
            if !yn[0].is_finite() || !yn[1].is_finite() {
                return Err(Error::Shooting(format!(
                    "profile blew up at r = {}",
                    ti.exp()
                )));
            }
            y = yn;
            h = hn;
            t = ti;
            grid[i] = ti.exp();
            m[i] = y[0];
            rdm[i] = y[1];
        }
        Ok(FiducialSolution {
            kind,
            r_scale,
            grid,
            m,
            rdm,
        })
    }

    /// Default grid: r_max with Bessel variable 32, 2000 points down to 1e-8.
    pub fn solve_default(kind: FiducialKind, r_scale: f64) -> Result<Self> {
        Self::solve(
            kind,
            r_scale,
            kind.r_of_x(r_scale, DEFAULT_X_MAX),
            DEFAULT_N_GRID,
            DEFAULT_R_MIN,
        )
    }

    pub fn r_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn r_min(&self) -> f64 {
        self.grid[0]
    }

    fn dt(&self) -> f64 {
        (self.grid[self.grid.len() - 1].ln() - self.grid[0].ln()) / (self.grid.len() - 1) as f64
    }

    /// m_tt from the equation, t = ln r.
    fn m_tt(&self, r: f64, m: f64) -> f64 {
        8.0 * self.r_scale * r.powf(self.kind.power()) * (2.0 * m).sinh()
    }

    /// (m, r dm/dr) at r by cubic Hermite interpolation in ln r; Bessel data
    /// beyond the grid.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if r > self.r_max() * (1.0 + 1e-12) {
            return bessel_data(self.kind, self.kind.x(self.r_scale, r));
        }
        if r < self.r_min() * (1.0 - 1e-12) || !r.is_finite() {
            return Err(Error::OutOfGrid(r));
        }
        let dt = self.dt();
        let s = (r.ln() - self.grid[0].ln()) / dt;
        let i = (s.floor() as usize).min(self.grid.len() - 2);
        let u = s - i as f64;
        let h00 = 2.0 * u * u * u - 3.0 * u * u + 1.0;
        let h10 = u * u * u - 2.0 * u * u + u;
        let h01 = -2.0 * u * u * u + 3.0 * u * u;
        let h11 = u * u * u - u * u;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (d0, d1) = (self.rdm[i], self.rdm[i + 1]);
        let (e0, e1) = (self.m_tt(self.grid[i], m0), self.m_tt(self.grid[i + 1], m1));
        let m = h00 * m0 + h10 * dt * d0 + h01 * m1 + h11 * dt * d1;
        let d = h00 * d0 + h10 * dt * e0 + h01 * d1 + h11 * dt * e1;
        Ok((m, d))
    }

    pub fn m_at(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.0)
    }

    /// r dm/dr.
    pub fn rdm_at(&self, r: f64) -> Result<f64> {
        Ok(self.eval(r)?.1)
    }

    /// dm/dr at the grid points.
    pub fn dm(&self) -> Vec<f64> {
        self.grid
            .iter()
            .zip(&self.rdm)
            .map(|(r, d)| d / r)
            .collect()
    }

    /// Residual of m_tt - 8 R r^p sinh 2m (t = ln r), the equation
    /// multiplied by r^2, with m_tt from sixth-order central differences of
    /// the stored r dm/dr. Nodes within three of either end are skipped.
    pub fn residuals(&self) -> Vec<(f64, f64)> {
        let dt = self.dt();
        let n = self.grid.len();
        let c = [
            -1.0 / 60.0,
            3.0 / 20.0,
            -3.0 / 4.0,
            0.0,
            3.0 / 4.0,
            -3.0 / 20.0,
            1.0 / 60.0,
        ];
        (3..n - 3)
            .map(|i| {
                let d: f64 = (0..7).map(|k| c[k] * self.rdm[i + k - 3]).sum::<f64>() / dt;
                (self.grid[i], d - self.m_tt(self.grid[i], self.m[i]))
            })
            .collect()
    }

    /// Least-squares slope of m against ln r over the innermost decade.
    pub fn small_r_slope(&self) -> f64 {
        let cut = self.r_min() * 10.0;
        let pts: Vec<(f64, f64)> = self
            .grid
            .iter()
            .zip(&self.m)
            .filter(|(r, _)| **r <= cut)
            .map(|(r, m)| (r.ln(), *m))
            .collect();
        crate::numerics::linfit(&pts).0
    }

    pub fn f_function(&self, r: f64) -> Result<f64> {
        if self.kind != FiducialKind::Logarithmic {
            return Err(Error::Domain(
                "F is defined for the logarithmic profile".into(),
            ));
        }
        if r > self.r_max() * (1.0 + 1e-12) {
            return Err(Error::OutOfGrid(r));
        }
        Ok(-0.125 + 0.25 * self.rdm_at(r)?)
    }

    /// h(f_1, f_2) = (e^{2m} - 1)/(e^{2m} + 1) for the diagonalizing frame.
    pub fn frame_inner_product(&self, r: f64) -> Result<f64> {
        Ok(self.m_at(r)?.tanh())
    }
}

/// sqrt(R) theta_fid as the coefficient of dz in the fiducial frame.
pub fn fiducial_higgs(sol: &FiducialSolution, r: f64, phi: f64) -> Result<Mat2> {
    let m = sol.m_at(r)?;
    let s = sol.r_scale.sqrt();
    let z = C64::from_polar(r, phi);
    Ok(Mat2::new(
        C64::new(0.0, 0.0),
        C64::new(s * r.powf(-0.5) * m.exp(), 0.0),
        s / z * r.sqrt() * (-m).exp(),
        C64::new(0.0, 0.0),
    ))
}

/// Unit eigenvectors f_1, f_2 of the fiducial Higgs field at angle phi.
pub fn diagonalizing_frame(
    sol: &FiducialSolution,
    r: f64,
    phi: f64,
) -> Result<([C64; 2], [C64; 2])> {
    let m = sol.m_at(r)?;
    let n = ((2.0 * m).exp() + 1.0).sqrt();
    let e = C64::from_polar(1.0, -0.5 * phi);
    let top = C64::new(m.exp() / n, 0.0);
    Ok(([top, e / n], [top, -e / n]))
}

/// Coefficient of d(phi) of the flat connection on the circle of radius r.
pub fn circle_connection_form(sol: &FiducialSolution, r: f64, phi: f64) -> Result<Mat2> {
    let rdm = sol.rdm_at(r)?;
    let diag = 2.0 * I * (sol.r_scale * r).sqrt() * (0.5 * phi).sin();
    let off = C64::new(-0.5 * rdm, 0.0);
    Ok(Mat2::new(0.75 + diag, off, off, 0.75 - diag).scale(I))
}

/// How the radius r_j of the fiducial disc and the diagonal exponent are
/// read off the period data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// r_j = |tau_j| s and C = 8 cos(arg tau_j / 2) sqrt(R r_j).
    Linear,
    /// r_j = |int_sigma Z_+|^2 / 4 and C = -4 sqrt(R) Re int_sigma Z_+, so that the
    /// exponents agree with the periods to all orders in s.
    Exact,
}

/// Disc data entering the circle monodromy at one puncture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleData {
    pub r_scale: f64,
    /// Radius in the local coordinate; zero at a nodal puncture.
    pub r_j: f64,
    /// 8 cos(arg tau_j / 2), with arg tau_j / 2 the argument of sqrt(tau_j).
    pub upsilon: f64,
}

impl CircleData {
    /// From the unit-scale sigma integral.
    pub fn exact(r_scale: f64, sigma_integral: C64) -> Self {
        let n = sigma_integral.norm();
        let upsilon = if n == 0.0 {
            0.0
        } else {
            -8.0 * sigma_integral.re / n
        };
        CircleData {
            r_scale,
            r_j: 0.25 * n * n,
            upsilon,
        }
    }

    pub fn linear(r_scale: f64, sqrt_tau: C64, radius: f64) -> Self {
        let n = sqrt_tau.norm();
        let upsilon = if n == 0.0 { 0.0 } else { 8.0 * sqrt_tau.re / n };
        CircleData {
            r_scale,
            r_j: n * n * radius,
            upsilon,
        }
    }

    pub fn x(&self) -> f64 {
        8.0 * (self.r_scale * self.r_j).sqrt()
    }

    pub fn c(&self) -> f64 {
        self.upsilon * (self.r_scale * self.r_j).sqrt()
    }
}

/// Threshold on |cos(arg tau/2)| below which the diagonal exponent is dropped.
pub const DEGENERATE_COS: f64 = 1e-12;

/// Off-diagonal entry B = -i pi r dm/dr at r_j, kept in log form so that it
/// survives far below the diagonal scale.
fn off_diagonal(sol: &FiducialSolution, d: &CircleData) -> Result<LogComplex> {
    let x = d.x();
    if d.r_j > sol.r_max() {
        // -i pi (-x K1(x) / (2 pi)) = i x K1(x) / 2
        let k1s = bessel_k1_scaled(x)?;
        return Ok(LogComplex::new(I * (0.5 * x * k1s), -x));
    }
    Ok(LogComplex::from(-I * PI * sol.rdm_at(d.r_j)?))
}

/// T exp(-[[A - C, B], [B, A + C]]) with A = 3 pi i / 2; i T at a nodal puncture.
pub fn rh_xi(sol: &FiducialSolution, d: &CircleData) -> Result<LMat2> {
    if d.r_j == 0.0 {
        return Ok(LMat2::swap().scale(LogComplex::from(I)));
    }
    if (d.r_scale - sol.r_scale).abs() > 1e-12 * d.r_scale {
        return Err(Error::Domain(
            "fiducial solution solved at a different R".into(),
        ));
    }
    let b = off_diagonal(sol, d)?;
    let c = if (d.upsilon / 8.0).abs() < DEGENERATE_COS {
        0.0
    } else {
        d.c()
    };
    let e = expm_neg_symmetric_log(C64::new(0.0, 1.5 * PI), b, C64::new(c, 0.0));
    Ok(LMat2::swap() * e)
}

pub fn rh_xi_scaled(sol: &FiducialSolution, d: &CircleData) -> Result<ScaledMatrix> {
    Ok(ScaledMatrix::from_log(&rh_xi(sol, d)?))
}

/// The integrated circle form [[A - C, B], [B, A + C]] over one turn starting
/// at angle `start` (the reparameterization offset arg tau_j).
pub fn integrated_circle_form(sol: &FiducialSolution, r: f64, start: f64) -> Result<Mat2> {
    let b = -I * PI * sol.rdm_at(r)?;
    let c = 8.0 * (0.5 * start).cos() * (sol.r_scale * r).sqrt();
    let a = C64::new(0.0, 1.5 * PI);
    Ok(Mat2::new(a - c, b, b, a + c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_real, transport_ode, Scalar};

    #[test]
    fn residual_and_monotonicity() {
        for r_scale in [1.0, 100.0] {
            let sol = FiducialSolution::solve_default(FiducialKind::Logarithmic, r_scale).unwrap();
            let worst = sol
                .residuals()
                .iter()
                .map(|p| p.1.abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-8, "residual {worst}");
            assert!(sol.m.iter().all(|&m| m > 0.0));
            assert!(sol.m.windows(2).all(|w| w[0] > w[1]));
        }
        let ram = FiducialSolution::solve_default(FiducialKind::Ramification, 10.0).unwrap();
        assert!(ram.m.windows(2).all(|w| w[0] > w[1] && w[1] > 0.0));
        let worst = ram
            .residuals()
            .iter()
            .map(|p| p.1.abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "residual {worst}");
    }

    #[test]
    fn bessel_tail() {
        let sol = FiducialSolution::solve_default(FiducialKind::Logarithmic, 4.0).unwrap();
        let r = sol.r_max();
        let x = FiducialKind::Logarithmic.x(4.0, r);
        assert!((sol.m_at(r).unwrap() * PI / bessel_k0(x).unwrap() - 1.0).abs() < 1e-10);
        // F -> -1/8 far out
        assert!((sol.f_function(r).unwrap() + 0.125).abs() < 1e-12);
    }

    #[test]
    fn f_identity() {
        let sol = FiducialSolution::solve_default(FiducialKind::Logarithmic, 2.0).unwrap();
        for r in [1e-6, 1e-3, 0.1] {
            let f = sol.f_function(r).unwrap();
            assert!((2.0 * f + 0.25 - 0.5 * sol.rdm_at(r).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn interpolation_consistent_with_grid() {
        let sol = FiducialSolution::solve_default(FiducialKind::Logarithmic, 1.0).unwrap();
        let i = 200;
        let (m, d) = sol.eval(sol.grid[i]).unwrap();
        assert!((m - sol.m[i]).abs() < 1e-14 && (d - sol.rdm[i]).abs() < 1e-14);
        let fine = FiducialSolution::solve(
            FiducialKind::Logarithmic,
            1.0,
            sol.r_max(),
            1599,
            sol.r_min(),
        )
        .unwrap();
        let r = (sol.grid[100] * sol.grid[101]).sqrt();
        assert!((sol.rdm_at(r).unwrap() - fine.rdm_at(r).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn connection_form_properties() {
        let sol = FiducialSolution::solve_default(FiducialKind::Logarithmic, 50.0).unwrap();
        let r = 0.01;
        for phi in [0.0, 1.0, 4.0] {
            let a = circle_connection_form(&sol, r, phi).unwrap();
            assert!((a.trace() - C64::new(0.0, 1.5)).norm() < 1e-14);
        }
        let a0 = circle_connection_form(&sol, r, 0.0).unwrap();
        assert!((a0.a - C64::new(0.0, 0.75)).norm() < 1e-15);
        let start = -2.0;
        let quad = |pick: fn(&Mat2) -> C64| {
            integrate_real(
                &|p| pick(&circle_connection_form(&sol, r, p).unwrap()),
                start,
                start + 2.0 * PI,
                1e-13,
            )
            .unwrap()
        };
        let m = integrated_circle_form(&sol, r, start).unwrap();
        assert!((quad(|m| m.a) - m.a).norm() < 1e-9);
        assert!((quad(|m| m.b) - m.b).norm() < 1e-9);
        assert!((quad(|m| m.d) - m.d).norm() < 1e-9);
    }

    #[test]
    fn circle_transport_matches_closed_form_when_off_diagonal_is_small() {
        // Bessel variable 8 sqrt(R r) = 40: the off-diagonal part is ~e^-40 and
        // the path-ordered exponential agrees with the exponential of the integral
        let r_scale = 25.0;
        let r = 1.0;
        let sol =
            FiducialSolution::solve(FiducialKind::Logarithmic, r_scale, 2.0, 400, 1e-4).unwrap();
        let start = 0.7;
        let ode = transport_ode(
            &|p| circle_connection_form(&sol, r, p).unwrap(),
            start,
            start + 2.0 * PI,
            &OdeOptions {
                rtol: 1e-12,
                atol: 1e-14,
                ..Default::default()
            },
        )
        .unwrap();
        let m = integrated_circle_form(&sol, r, start).unwrap();
        let closed = crate::numerics::expm_neg_symmetric(
            C64::new(0.0, 1.5 * PI),
            m.b,
            C64::new(0.0, 0.0) - (m.a - C64::new(0.0, 1.5 * PI)),
        );
        assert!(LMat2::from(ode.value()).rel_diff(&LMat2::from(closed)) < 1e-8);
    }

    #[test]
    fn rh_xi_determinant_and_limits() {
        let sol = FiducialSolution::solve_default(FiducialKind::Logarithmic, 30.0).unwrap();
        let d = CircleData::linear(30.0, C64::new(0.3, -0.2), 0.05);
        let m = rh_xi(&sol, &d).unwrap();
        assert!((m.det().to_c64() - 1.0).norm() < 1e-10);
        let nodal = rh_xi(
            &sol,
            &CircleData {
                r_scale: 30.0,
                r_j: 0.0,
                upsilon: 0.0,
            },
        )
        .unwrap()
        .to_c64();
        assert!((nodal.b - I).norm() < 1e-15 && nodal.a.norm() < 1e-15);
        // b e^{C} -> i at large R, with C = upsilon sqrt(R r)
        let big = 1e5;
        let sol = FiducialSolution::solve_default(FiducialKind::Logarithmic, big).unwrap();
        let d = CircleData::linear(big, C64::new(0.3, -0.2), 0.05);
        let m = rh_xi(&sol, &d).unwrap();
        let scaled = m.b * LogComplex::exp(C64::new(d.c(), 0.0));
        assert!((scaled.to_c64() - I).norm() < 1e-6);
        assert!(m.trace().ratio_abs(m.c) < 1e-20);
    }

    #[test]
    fn frames_diagonalize_higgs_field() {
        let sol = FiducialSolution::solve_default(FiducialKind::Logarithmic, 5.0).unwrap();
        let r = 0.02;
        for phi in [0.3, 2.0, 5.9] {
            let h = fiducial_higgs(&sol, r, phi).unwrap();
            let (f1, f2) = diagonalizing_frame(&sol, r, phi).unwrap();
            let lam = 5.0f64.sqrt() * r.powf(-0.5) * C64::from_polar(1.0, -0.5 * phi);
            for (f, l) in [(f1, lam), (f2, -lam)] {
                let hf = [h.a * f[0] + h.b * f[1], h.c * f[0] + h.d * f[1]];
                assert!((hf[0] - l * f[0]).norm() + (hf[1] - l * f[1]).norm() < 1e-10 * lam.norm());
            }
        }
        let (f1_end, _) = diagonalizing_frame(&sol, r, 2.0 * PI).unwrap();
        let (_, f2_start) = diagonalizing_frame(&sol, r, 0.0).unwrap();
        assert!((f1_end[0] - f2_start[0]).norm() + (f1_end[1] - f2_start[1]).norm() < 1e-15);
    }

    #[test]
    fn inner_product_decreases_with_r() {
        let r = 0.01;
        let vals: Vec<f64> = [1.0, 10.0, 100.0]
            .iter()
            .map(|&s| {
                FiducialSolution::solve_default(FiducialKind::Logarithmic, s)
                    .unwrap()
                    .frame_inner_product(r)
                    .unwrap()
            })
            .collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2] && vals[2] > 0.0);
    }
}
