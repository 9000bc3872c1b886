//! Regularized periods of Z_+, integrals along the pants contours, the
//! Legendre closed forms and the combinatorial abelian integral.

use crate::error::{Error, Result};
use crate::hitchin_base::{ray_crossings, sqrt_up, PunctureConfig, QuadraticDifferential};
use crate::numerics::{
    bracket_root, elliptic_k, integrate_contour, integrate_real, ParamPath, C64, I,
};
use crate::transport::AbelianHolonomy;
use serde::{Deserialize, Serialize};

pub const DEFAULT_QUAD_TOL: f64 = 1e-12;

/// Base points, radii and the named contours of the pants decomposition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PantsData {
    pub x2: C64,
    pub x3: C64,
    pub x4: C64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub epsilon: f64,
    /// Depth of the detours below the real axis.
    pub depth: f64,
    /// sigma_j = [t_j, t_j + radius]; None at a nodal puncture.
    pub sigma: [Option<ParamPath>; 5],
    /// eta_j from the base point of t_j to the end of sigma_j (to t_j itself
    /// at a nodal puncture).
    pub eta: [ParamPath; 5],
    pub psi2: ParamPath,
    pub psi3: ParamPath,
    /// Circles of the given radius about t_j, starting at t_j + radius.
    pub xi: [ParamPath; 5],
    /// Loops around the discs of (t_1, t_2) at x_2 and (t_4, t_0) at x_4.
    pub rho2: ParamPath,
    pub rho3: ParamPath,
}

/// Which pants boundary disc a puncture belongs to.
pub fn radius_slot(j: usize) -> usize {
    match j {
        1 | 2 => 2,
        3 => 3,
        _ => 4,
    }
}

impl PantsData {
    pub fn radius(&self, j: usize) -> f64 {
        match radius_slot(j) {
            2 => self.s2,
            3 => self.s3,
            _ => self.s4,
        }
    }

    pub fn base(&self, j: usize) -> C64 {
        match radius_slot(j) {
            2 => self.x2,
            3 => self.x3,
            _ => self.x4,
        }
    }

    /// Legendre layout: x2 = -1 - eps, x3 = 1 - eps, x4 from `legendre_x4`,
    /// detours at depth `depth` below the real axis.
    pub fn legendre(
        q: &QuadraticDifferential,
        epsilon: f64,
        radii: [f64; 3],
        depth: f64,
    ) -> Result<Self> {
        let k = q
            .config
            .k
            .ok_or_else(|| Error::Domain("Legendre pants need a Legendre configuration".into()))?;
        let x4 = legendre_x4(k, epsilon)?;
        Self::build(
            q,
            epsilon,
            C64::new(-1.0 - epsilon, 0.0),
            C64::new(1.0 - epsilon, 0.0),
            C64::new(x4, 0.0),
            radii,
            depth,
        )
    }

    pub fn build(
        q: &QuadraticDifferential,
        epsilon: f64,
        x2: C64,
        x3: C64,
        x4: C64,
        radii: [f64; 3],
        depth: f64,
    ) -> Result<Self> {
        let [s2, s3, s4] = radii;
        if radii.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::Domain("radii must be positive".into()));
        }
        let t = q.config.t;
        let rad = |j: usize| match radius_slot(j) {
            2 => s2,
            3 => s3,
            _ => s4,
        };
        for i in 0..5 {
            for j in 0..i {
                if (t[i] - t[j]).norm() <= rad(i) + rad(j) {
                    return Err(Error::Domain(format!("discs about t{j} and t{i} overlap")));
                }
            }
        }
        let nodal = q.nodal_index();
        let h = I * depth;
        let base = |j: usize| match radius_slot(j) {
            2 => x2,
            3 => x3,
            _ => x4,
        };
        let detour = |from: C64, to: C64, end_singular: bool| -> Result<ParamPath> {
            ParamPath::with_flags(vec![from, from - h, to - h, to], (false, end_singular))
        };
        let geometric_eta = |j: usize| -> Result<ParamPath> {
            let e = t[j] + rad(j);
            if j == 4 && (x4.im == 0.0 && x4.re > e.re) {
                ParamPath::segment(x4, e)
            } else {
                detour(base(j), e, false)
            }
        };
        let mut eta = Vec::with_capacity(5);
        let mut sigma = Vec::with_capacity(5);
        for j in 0..5 {
            if nodal == Some(j) {
                eta.push(detour(base(j), t[j], false)?);
                sigma.push(None);
            } else {
                eta.push(geometric_eta(j)?);
                sigma.push(Some(ParamPath::with_flags(
                    vec![t[j], t[j] + rad(j)],
                    (true, false),
                )?));
            }
        }
        let xi: Vec<ParamPath> = (0..5)
            .map(|j| ParamPath::circle(t[j], rad(j), 32, 0.0))
            .collect();
        let lasso = |j: usize| -> Result<ParamPath> {
            let e = geometric_eta(j)?;
            e.concat(&xi[j])?.concat(&e.reversed())
        };
        let rho2 = lasso(1)?.concat(&lasso(2)?)?;
        let rho3 = lasso(4)?.concat(&lasso(0)?)?;
        Ok(PantsData {
            x2,
            x3,
            x4,
            s2,
            s3,
            s4,
            epsilon,
            depth,
            sigma: sigma.try_into().unwrap(),
            eta: eta.try_into().unwrap(),
            psi2: detour(x2, x3, false)?,
            psi3: detour(x3, x4, false)?,
            xi: xi.try_into().unwrap(),
            rho2,
            rho3,
        })
    }
}

/// Points where the segment [a, b] crosses a cut, with a and b added at the
/// ends. Cuts issuing from a or b themselves are ignored.
pub fn split_at_cuts(q: &QuadraticDifferential, a: C64, b: C64) -> Result<Vec<C64>> {
    let mut ts: Vec<f64> = Vec::new();
    for bp in q.cut_points() {
        if (a - bp).norm() < 1e-14 || (b - bp).norm() < 1e-14 {
            continue;
        }
        if ray_crossings(bp, a, b)? == 1 {
            ts.push((a.re - bp.re) / (a.re - b.re));
        }
    }
    ts.sort_by(f64::total_cmp);
    let mut pts = vec![a];
    pts.extend(ts.iter().map(|t| a + (b - a) * *t));
    pts.push(b);
    Ok(pts)
}

/// Integral of Z_+ over [a, b]. At a flagged end z - end = (b - a) u^2 and the
/// inverse square root is divided out analytically.
fn integrate_piece(
    q: &QuadraticDifferential,
    a: C64,
    b: C64,
    sing: (bool, bool),
    tol: f64,
) -> Result<C64> {
    let dz = b - a;
    match sing {
        (false, false) => integrate_contour(&|z| q.root_unit(z), &ParamPath::segment(a, b)?, tol),
        (true, false) => {
            let s = 2.0 * dz / sqrt_up(dz);
            integrate_real(
                &|u| q.root_unit_regularized(a + dz * (u * u), a) * s,
                0.0,
                1.0,
                tol,
            )
        }
        (false, true) => {
            let s = 2.0 * dz / sqrt_up(-dz);
            integrate_real(
                &|u| q.root_unit_regularized(b - dz * (u * u), b) * s,
                0.0,
                1.0,
                tol,
            )
        }
        (true, true) => {
            let m = a + 0.5 * dz;
            Ok(integrate_piece(q, a, m, (true, false), 0.5 * tol)?
                + integrate_piece(q, m, b, (false, true), 0.5 * tol)?)
        }
    }
}

/// Pieces of a path between consecutive cut crossings: each entry is the
/// unit-scale integral of Z_+ on the piece together with the sheet it lies on.
pub fn sheeted_pieces(
    q: &QuadraticDifferential,
    path: &ParamPath,
    start_sheet: i8,
    tol: f64,
) -> Result<Vec<(C64, i8)>> {
    let mut sheet = start_sheet;
    let mut out = Vec::new();
    let n = path.n_segments();
    for (k, (a, b)) in path.segments().enumerate() {
        let pts = split_at_cuts(q, a, b)?;
        let m = pts.len() - 1;
        for (i, w) in pts.windows(2).enumerate() {
            let sing = (
                k == 0 && i == 0 && path.endpoint_singularity.0,
                k == n - 1 && i == m - 1 && path.endpoint_singularity.1,
            );
            let v = sheet as f64 * integrate_piece(q, w[0], w[1], sing, tol / (n * m) as f64)?;
            match out.last_mut() {
                Some((acc, s)) if i == 0 && *s == sheet => *acc += v,
                _ => out.push((v, sheet)),
            }
            if i < m - 1 {
                sheet = -sheet;
            }
        }
    }
    Ok(out)
}

/// Integral of Z_+ (unit scale) along a path from `start_sheet`, flipping the
/// sheet at every cut crossing. Returns the integral and the final sheet.
pub fn integrate_z(
    q: &QuadraticDifferential,
    path: &ParamPath,
    start_sheet: i8,
    tol: f64,
) -> Result<(C64, i8)> {
    let pieces = sheeted_pieces(q, path, start_sheet, tol)?;
    let total = pieces.iter().map(|p| p.0).sum();
    Ok((total, pieces.last().map(|p| p.1).unwrap_or(start_sheet)))
}

/// Periods of the unit-scale differential (multiply by sqrt(R) for R q).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodSet {
    pub pi: [C64; 5],
    pub psi2: C64,
    pub psi3: C64,
    pub sqrt_tau: [C64; 5],
    /// int_{sigma_j} Z_+ (zero at a nodal puncture).
    pub sigma: [C64; 5],
    /// int_{eta_j} Z_+.
    pub eta: [C64; 5],
}

impl PeriodSet {
    pub fn pi1_minus_pi2(&self) -> C64 {
        self.pi[1] - self.pi[2]
    }
    pub fn pi0_minus_pi4(&self) -> C64 {
        self.pi[0] - self.pi[4]
    }
}

/// pi_j = int_{eta_j} Z_+ - int_{sigma_j} Z_+, together with the psi integrals.
pub fn compute_periods(
    q: &QuadraticDifferential,
    pants: &PantsData,
    tol: f64,
) -> Result<PeriodSet> {
    let mut eta = [C64::new(0.0, 0.0); 5];
    let mut sigma = [C64::new(0.0, 0.0); 5];
    for j in 0..5 {
        let (v, s) = integrate_z(q, &pants.eta[j], 1, tol)?;
        if s != 1 {
            return Err(Error::CutCrossing(format!("eta_{j} changes sheet")));
        }
        eta[j] = v;
        if let Some(p) = &pants.sigma[j] {
            sigma[j] = integrate_z(q, p, 1, tol)?.0;
        }
    }
    let pi = std::array::from_fn(|j| eta[j] - sigma[j]);
    let (psi2, s2) = integrate_z(q, &pants.psi2, 1, tol)?;
    let (psi3, s3) = integrate_z(q, &pants.psi3, 1, tol)?;
    if s2 != 1 || s3 != 1 {
        return Err(Error::CutCrossing("psi contour changes sheet".into()));
    }
    Ok(PeriodSet {
        pi,
        psi2,
        psi3,
        sqrt_tau: q.sqrt_tau(),
        sigma,
        eta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LegendreDifference {
    P1MinusP2,
    P0MinusP4,
}

pub fn legendre_period_closed_form(k: f64, which: LegendreDifference) -> Result<f64> {
    let kk = elliptic_k(k)?;
    Ok(match which {
        LegendreDifference::P1MinusP2 => -k * kk,
        LegendreDifference::P0MinusP4 => -2.0 * k * kk,
    })
}

/// x_4 > 1/k with |int_{1/k}^{x_4} Z_+| = 2 |int_{1 - eps}^{1} Z_+| for the
/// differential dz^2 z / prod(z - t_j) (a = 1, b = 0).
pub fn legendre_x4(k: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    let q = QuadraticDifferential::new(
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        1.0,
        PunctureConfig::legendre(k)?,
    )?;
    let one = C64::new(1.0, 0.0);
    let near = ParamPath::with_flags(vec![one - epsilon, one], (false, true))?;
    let target = 2.0 * integrate_z(&q, &near, 1, DEFAULT_QUAD_TOL)?.0.norm();
    let t4 = 1.0 / k;
    let g = |x: f64| -> f64 {
        let p = ParamPath::with_flags(vec![C64::new(t4, 0.0), C64::new(x, 0.0)], (true, false))
            .unwrap();
        integrate_z(&q, &p, 1, DEFAULT_QUAD_TOL)
            .map(|v| v.0.norm() - target)
            .unwrap_or(f64::NAN)
    };
    let mut hi = t4 + 0.5;
    while g(hi) < 0.0 {
        hi += 0.5 * (hi - t4);
        if hi > 1e6 {
            return Err(Error::NoRoot("x4 defining equation".into()));
        }
    }
    bracket_root(&g, t4 + 1e-12, hi, 1e-13)
}

/// Contours on which the abelian integral is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Contour {
    Eta(usize),
    Psi2,
    Psi3,
    /// Integer combination of the basis cycles (A1, A2, B1, B2).
    Cycle([i64; 4]),
}

/// int B_L along the lift of a named contour on `sheet`. The lattice
/// identification puts A1 = lift of eta_2 - eta_1, A2 = lift of eta_4 - eta_0,
/// B1 = lift of psi_2, B2 = lift of psi_3; half of each cycle is carried by
/// the eta_2, eta_0, psi_2, psi_3 halves, the remaining contours carry none.
pub fn abelian_integral(contour: Contour, sheet: i8, hol: &AbelianHolonomy) -> C64 {
    let h = hol.signed();
    let v = match contour {
        Contour::Eta(2) => 0.5 * h[0],
        Contour::Eta(0) => -0.5 * h[1],
        Contour::Eta(_) => 0.0,
        Contour::Psi2 => 0.5 * h[2],
        Contour::Psi3 => 0.5 * h[3],
        Contour::Cycle(m) => (0..4).map(|i| m[i] as f64 * h[i]).sum(),
    };
    I * (sheet as f64 * v)
}
