//! Points of the Hitchin base, residues at the punctures and the sheeted
//! square root of the quadratic differential.

use crate::error::{Error, Result};
use crate::numerics::{ParamPath, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PunctureConfig {
    /// Legendre eccentricity, when the configuration is of that type.
    pub k: Option<f64>,
    pub t: [C64; 5],
}

impl PunctureConfig {
    /// t = (-1/k, 0, 1, -1, 1/k).
    pub fn legendre(k: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::Domain(format!(
                "Legendre eccentricity must lie in (0,1), got {k}"
            )));
        }
        let t = [-1.0 / k, 0.0, 1.0, -1.0, 1.0 / k].map(|x| C64::new(x, 0.0));
        Ok(PunctureConfig { k: Some(k), t })
    }

    pub fn custom(t: [C64; 5]) -> Result<Self> {
        for i in 0..5 {
            for j in 0..i {
                if (t[i] - t[j]).norm() < 1e-12 {
                    return Err(Error::Domain(format!("punctures t{j} and t{i} coincide")));
                }
            }
        }
        Ok(PunctureConfig { k: None, t })
    }

    /// prod_{k != j} (t_j - t_k).
    pub fn derivative_at(&self, j: usize) -> C64 {
        (0..5)
            .filter(|&k| k != j)
            .map(|k| self.t[j] - self.t[k])
            .product()
    }

    /// max over |a|^2 + |b|^2 = 1 of |tau_j|, which by Cauchy-Schwarz is
    /// sqrt(1 + |t_j|^2) / |prod_{k != j} (t_j - t_k)|.
    pub fn tau_bound(&self) -> f64 {
        (0..5)
            .map(|j| (1.0 + self.t[j].norm_sqr()).sqrt() / self.derivative_at(j).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfCoords {
    pub theta: f64,
    /// Fiber angle in [0, 2 pi).
    pub varphi: f64,
    /// Base angle in [0, pi).
    pub phi: f64,
}

impl HopfCoords {
    pub fn to_ab(&self) -> (C64, C64) {
        (
            C64::from_polar(self.theta.cos(), self.varphi - self.phi),
            C64::from_polar(self.theta.sin(), self.varphi + self.phi),
        )
    }

    /// Inverse of `to_ab` on unit-norm pairs.
    pub fn from_ab(a: C64, b: C64) -> Self {
        let theta = b.norm().atan2(a.norm());
        let (aa, ab) = (a.arg(), b.arg());
        let (mut varphi, mut phi) = if a.norm() < 1e-300 {
            (ab, 0.0)
        } else if b.norm() < 1e-300 {
            (aa, 0.0)
        } else {
            (0.5 * (aa + ab), 0.5 * (ab - aa))
        };
        phi = phi.rem_euclid(2.0 * PI);
        if phi >= PI {
            phi -= PI;
            varphi += PI;
        }
        HopfCoords {
            theta,
            varphi: varphi.rem_euclid(2.0 * PI),
            phi,
        }
    }
}

/// R (a z - b) dz^2 / prod (z - t_j).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticDifferential {
    pub a: C64,
    pub b: C64,
    pub r: f64,
    pub config: PunctureConfig,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProjPoint {
    Finite(C64),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SheetedPoint {
    pub z: C64,
    pub sheet: i8,
}

impl SheetedPoint {
    pub fn new(z: C64, sheet: i8) -> Self {
        SheetedPoint { z, sheet }
    }
}

/// Square root with the cut on the upward vertical ray: arg in (-3pi/2, pi/2].
pub fn sqrt_up(u: C64) -> C64 {
    let mut a = u.arg();
    if a > PI / 2.0 {
        a -= 2.0 * PI;
    }
    C64::from_polar(u.norm().sqrt(), 0.5 * a)
}

/// Tolerance for identifying t(q) with a puncture.
pub const NODAL_TOL: f64 = 1e-12;

impl QuadraticDifferential {
    pub fn new(a: C64, b: C64, r: f64, config: PunctureConfig) -> Result<Self> {
        if a.norm() == 0.0 && b.norm() == 0.0 {
            return Err(Error::Domain(
                "(a, b) = (0, 0) is not a point of the Hopf sphere".into(),
            ));
        }
        if !(r > 0.0) {
            return Err(Error::Domain(format!("scale R must be positive, got {r}")));
        }
        Ok(QuadraticDifferential { a, b, r, config })
    }

    pub fn from_hopf(h: HopfCoords, r: f64, config: PunctureConfig) -> Result<Self> {
        let (a, b) = h.to_ab();
        Self::new(a, b, r, config)
    }

    pub fn hopf_coords(&self) -> HopfCoords {
        let n = self.norm();
        HopfCoords::from_ab(self.a / n, self.b / n)
    }

    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr()).sqrt()
    }

    pub fn with_r(&self, r: f64) -> Self {
        QuadraticDifferential { r, ..self.clone() }
    }

    /// e^{i phi} q.
    pub fn rotated(&self, phi: f64) -> Self {
        let u = C64::from_polar(1.0, phi);
        QuadraticDifferential {
            a: self.a * u,
            b: self.b * u,
            ..self.clone()
        }
    }

    pub fn t(&self) -> &[C64; 5] {
        &self.config.t
    }

    /// Index of the puncture equal to t(q), if any.
    pub fn nodal_index(&self) -> Option<usize> {
        match self.ramification_point() {
            ProjPoint::Finite(beta) => {
                (0..5).find(|&j| (beta - self.config.t[j]).norm() < NODAL_TOL)
            }
            ProjPoint::Infinity => None,
        }
    }

    pub fn ramification_point(&self) -> ProjPoint {
        if self.a.norm() == 0.0 {
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(self.b / self.a)
        }
    }

    /// Branch points with multiplicity (a nodal puncture counts twice).
    pub fn branch_points(&self) -> Vec<(C64, u8)> {
        let nodal = self.nodal_index();
        let mut out: Vec<(C64, u8)> = (0..5)
            .map(|j| (self.config.t[j], if Some(j) == nodal { 2 } else { 1 }))
            .collect();
        if nodal.is_none() {
            if let ProjPoint::Finite(beta) = self.ramification_point() {
                out.push((beta, 1));
            }
        }
        out
    }

    /// Branch points carrying a cut (simple ones).
    pub fn cut_points(&self) -> Vec<C64> {
        self.branch_points()
            .into_iter()
            .filter(|p| p.1 == 1)
            .map(|p| p.0)
            .collect()
    }

    pub fn eval_q(&self, z: C64) -> Result<C64> {
        let mut den = C64::new(1.0, 0.0);
        for (j, tj) in self.config.t.iter().enumerate() {
            if z == *tj {
                return Err(Error::Pole(j));
            }
            den *= z - tj;
        }
        Ok(self.r * (self.a * z - self.b) / den)
    }

    /// tau_j for the unit-scale differential (R factored out).
    pub fn residues(&self) -> [C64; 5] {
        let t = &self.config.t;
        std::array::from_fn(|j| (self.a * t[j] - self.b) / self.config.derivative_at(j))
    }

    fn raw_root(&self, z: C64) -> C64 {
        let nodal = self.nodal_index();
        let mut den = C64::new(1.0, 0.0);
        for j in 0..5 {
            if Some(j) != nodal {
                den *= sqrt_up(z - self.config.t[j]);
            }
        }
        let num = match (self.ramification_point(), nodal) {
            (ProjPoint::Finite(beta), None) => self.a.sqrt() * sqrt_up(z - beta),
            (ProjPoint::Finite(_), Some(_)) => self.a.sqrt(),
            (ProjPoint::Infinity, _) => (-self.b).sqrt(),
        };
        num / den
    }

    /// Sign making the root at the anchor point have argument in [0, pi).
    fn anchor_sign(&self) -> f64 {
        let mut anchor = C64::new(0.5, 0.0);
        if self
            .branch_points()
            .iter()
            .any(|p| (p.0 - anchor).norm() < 1e-3)
        {
            anchor = C64::new(0.5, -0.3);
        }
        let v = self.raw_root(anchor);
        let arg = v.arg();
        if (0.0..PI).contains(&arg) {
            1.0
        } else {
            -1.0
        }
    }

    /// Coefficient of Z_+ for the unit-scale differential: the root of
    /// (a z - b)/prod(z - t_j) continued below the punctures from the anchor.
    pub fn root_unit(&self, z: C64) -> C64 {
        self.anchor_sign() * self.raw_root(z)
    }

    /// `root_unit(z) * sqrt_up(z - at)`, computed without the singular factor
    /// when `at` is a puncture so that it stays finite at z = at.
    pub fn root_unit_regularized(&self, z: C64, at: C64) -> C64 {
        let nodal = self.nodal_index();
        let hit = (0..5).find(|&j| Some(j) != nodal && (self.config.t[j] - at).norm() < 1e-14);
        match hit {
            None => self.root_unit(z) * sqrt_up(z - at),
            Some(k) => {
                let mut den = C64::new(1.0, 0.0);
                for j in 0..5 {
                    if Some(j) != nodal && j != k {
                        den *= sqrt_up(z - self.config.t[j]);
                    }
                }
                let num = match (self.ramification_point(), nodal) {
                    (ProjPoint::Finite(beta), None) => self.a.sqrt() * sqrt_up(z - beta),
                    (ProjPoint::Finite(_), Some(_)) => self.a.sqrt(),
                    (ProjPoint::Infinity, _) => (-self.b).sqrt(),
                };
                self.anchor_sign() * num / den
            }
        }
    }

    /// sqrt(R) times `root_unit`, with sheet sign.
    pub fn sqrt_z(&self, p: SheetedPoint) -> Result<C64> {
        for (bp, _) in self.branch_points() {
            if (p.z - bp).norm() < 1e-14 {
                return Err(Error::BranchPoint(bp));
            }
        }
        Ok(p.sheet as f64 * self.r.sqrt() * self.root_unit(p.z))
    }

    /// lim_{z -> t_j} root_unit(z) sqrt_up(z - t_j); zero at a nodal puncture.
    pub fn local_coefficient(&self, j: usize) -> C64 {
        let nodal = self.nodal_index();
        if nodal == Some(j) {
            return C64::new(0.0, 0.0);
        }
        let tj = self.config.t[j];
        let mut den = C64::new(1.0, 0.0);
        for k in 0..5 {
            if k != j && Some(k) != nodal {
                den *= sqrt_up(tj - self.config.t[k]);
            }
        }
        let num = match (self.ramification_point(), nodal) {
            (ProjPoint::Finite(beta), None) => self.a.sqrt() * sqrt_up(tj - beta),
            (ProjPoint::Finite(_), Some(_)) => self.a.sqrt(),
            (ProjPoint::Infinity, _) => (-self.b).sqrt(),
        };
        self.anchor_sign() * num / den
    }

    /// sqrt(tau_j) fixed by int_{sigma_j} Z_+ ~ -2 sqrt(tau_j r0) for the
    /// segment sigma_j = [t_j, t_j + r0].
    pub fn sqrt_tau(&self) -> [C64; 5] {
        std::array::from_fn(|j| -self.local_coefficient(j))
    }

    /// Number of cut crossings of the segment [p, q] (cuts are upward rays).
    pub fn cut_crossings(&self, p: C64, q: C64) -> Result<u32> {
        let mut n = 0;
        for bp in self.cut_points() {
            n += ray_crossings(bp, p, q)?;
        }
        Ok(n)
    }

    /// Sheet after following the path from `start_sheet`.
    pub fn end_sheet(&self, path: &ParamPath, start_sheet: i8) -> Result<i8> {
        let mut s = start_sheet;
        for (p, q) in path.segments() {
            if self.cut_crossings(p, q)? % 2 == 1 {
                s = -s;
            }
        }
        Ok(s)
    }
}

/// Crossings of the segment [p, q] with the upward ray from `bp`.
pub fn ray_crossings(bp: C64, p: C64, q: C64) -> Result<u32> {
    let (x0, x1) = (p.re - bp.re, q.re - bp.re);
    if x0 == 0.0 && x1 == 0.0 {
        if p.im.max(q.im) >= bp.im {
            return Err(Error::CutCrossing(format!(
                "segment runs along the cut of {bp}"
            )));
        }
        return Ok(0);
    }
    // half-open rule: count sign changes of Re(z - bp) from < 0 to >= 0 and back
    if (x0 < 0.0) == (x1 < 0.0) {
        return Ok(0);
    }
    let t = x0 / (x0 - x1);
    let y = p.im + t * (q.im - p.im);
    if (y - bp.im).abs() < 1e-14 {
        return Err(Error::CutCrossing(format!(
            "segment passes through branch point {bp}"
        )));
    }
    Ok(if y > bp.im { 1 } else { 0 })
}

/// Winding number of a closed polygon around `p`.
pub fn winding_number(path: &ParamPath, p: C64) -> Result<i64> {
    let mut total = 0.0;
    for (a, b) in path.segments() {
        let (u, v) = (a - p, b - p);
        let ab = b - a;
        let t = (-(u.re * ab.re + u.im * ab.im) / ab.norm_sqr()).clamp(0.0, 1.0);
        if (u + ab * t).norm() < 1e-13 {
            return Err(Error::PointOnPath);
        }
        total += (v / u).arg();
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Parity of branch points enclosed by the loop, counted with multiplicity.
pub fn sheet_parity(path: &ParamPath, q: &QuadraticDifferential) -> Result<u8> {
    if !path.closed {
        return Err(Error::Domain("sheet parity needs a closed loop".into()));
    }
    let mut n: i64 = 0;
    for (bp, mult) in q.branch_points() {
        n += mult as i64 * winding_number(path, bp)?;
    }
    Ok(n.rem_euclid(2) as u8)
}

/// Analytic continuation of a root of Q along a path by nearest-root
/// tracking on a fine subdivision. Used as an independent check of the
/// closed-form branch.
pub fn continue_root(
    q: &QuadraticDifferential,
    path: &ParamPath,
    start: C64,
    steps_per_segment: usize,
) -> Result<C64> {
    let mut w = start;
    for (a, b) in path.segments() {
        for s in 1..=steps_per_segment {
            let z = a + (b - a) * (s as f64 / steps_per_segment as f64);
            let r = q.eval_q(z)?.sqrt();
            w = if (r - w).norm() <= (r + w).norm() {
                r
            } else {
                -r
            };
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_q(a: C64, b: C64, r: f64) -> QuadraticDifferential {
        QuadraticDifferential::new(a, b, r, PunctureConfig::legendre(0.5).unwrap()).unwrap()
    }

    fn cr(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn eval_q_values() {
        let q = legendre_q(cr(1.0), cr(0.0), 1.0);
        let v = q.eval_q(cr(3.0)).unwrap();
        // 3 / prod(3 - t_j) = 3 / (3 * 40)
        assert!((v - cr(1.0 / 40.0)).norm() < 1e-15);
        assert!(matches!(q.eval_q(cr(1.0)), Err(Error::Pole(2))));
        let g = legendre_q(C64::new(0.3, 0.1), C64::new(-0.2, 0.5), 1.0);
        let beta = match g.ramification_point() {
            ProjPoint::Finite(z) => z,
            _ => unreachable!(),
        };
        assert!(g.eval_q(beta).unwrap().norm() < 1e-15);
        let z = C64::new(0.7, 0.2);
        assert!((g.with_r(4.0).eval_q(z).unwrap() - 4.0 * g.eval_q(z).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn ramification_point_cases() {
        assert_eq!(
            legendre_q(cr(1.0), cr(0.0), 1.0).ramification_point(),
            ProjPoint::Finite(cr(0.0))
        );
        assert_eq!(
            legendre_q(cr(0.0), cr(1.0), 1.0).ramification_point(),
            ProjPoint::Infinity
        );
        let g = legendre_q(C64::new(0.3, 0.1), C64::new(-0.2, 0.5), 1.0);
        if let (ProjPoint::Finite(x), ProjPoint::Finite(y)) =
            (g.ramification_point(), g.rotated(1.3).ramification_point())
        {
            assert!((x - y).norm() < 1e-15);
        } else {
            panic!();
        }
    }

    #[test]
    fn legendre_residues() {
        let q = legendre_q(cr(1.0), cr(0.0), 1.0);
        let tau = q.residues();
        assert!((tau[2] - cr(-1.0 / 6.0)).norm() < 1e-15);
        // closed form a / (2 (1 - 1/k^2))
        assert!((tau[2] - cr(1.0 / (2.0 * (1.0 - 4.0)))).norm() < 1e-15);
        assert!((tau[3] + tau[2]).norm() < 1e-15);
        assert_eq!(tau[1], cr(0.0));
        assert!((tau[0] - cr(-1.0 / 12.0)).norm() < 1e-15);
        assert!((tau[0] - 0.5 * tau[2]).norm() < 1e-15);
        assert!((tau[4] - cr(1.0 / 12.0)).norm() < 1e-15);
        for j in 0..5 {
            assert!(tau[j].norm() <= q.config.tau_bound() + 1e-15);
        }
    }

    #[test]
    fn determination_on_real_axis() {
        let q = legendre_q(cr(1.0), cr(0.0), 1.0);
        let w = |x: f64| q.sqrt_z(SheetedPoint::new(cr(x), 1)).unwrap();
        let expect = 1.0 / ((0.25f64 - 1.0) * (0.25 - 4.0)).sqrt();
        assert!((w(0.5) - cr(expect)).norm() < 1e-15);
        assert!(w(-3.0).re < 0.0 && w(-3.0).im.abs() < 1e-15);
        assert!(w(-1.5).im > 0.0 && w(-1.5).re.abs() < 1e-15);
        assert!(w(1.5).im < 0.0 && w(1.5).re.abs() < 1e-15);
        assert!(w(3.0).re < 0.0 && w(3.0).im.abs() < 1e-15);
        let p = SheetedPoint::new(C64::new(0.3, -0.2), 1);
        let m = SheetedPoint::new(p.z, -1);
        assert_eq!(q.sqrt_z(p).unwrap(), -q.sqrt_z(m).unwrap());
        let s4 = q.with_r(4.0).sqrt_z(p).unwrap();
        assert!((s4 - 2.0 * q.sqrt_z(p).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn sqrt_tau_legendre() {
        let q = legendre_q(cr(1.0), cr(0.0), 1.0);
        let st = q.sqrt_tau();
        let tau = q.residues();
        for j in 0..5 {
            assert!((st[j] * st[j] - tau[j]).norm() < 1e-15);
        }
        assert!(st[3].re < 0.0);
        assert!(st[2].im > 0.0);
    }

    #[test]
    fn sheet_parity_examples() {
        let q = legendre_q(C64::new(1.0, 0.0), C64::new(0.3, 0.4), 1.0);
        let around_t0 = ParamPath::circle(cr(-2.0), 0.1, 12, 0.0);
        assert_eq!(sheet_parity(&around_t0, &q).unwrap(), 1);
        let big = ParamPath::circle(cr(0.0), 10.0, 12, 0.0);
        assert_eq!(sheet_parity(&big, &q).unwrap(), 0);
        let nodal = legendre_q(cr(1.0), cr(0.0), 1.0);
        let around_t1 = ParamPath::circle(cr(0.0), 0.1, 12, 0.0);
        assert_eq!(sheet_parity(&around_t1, &nodal).unwrap(), 0);
    }

    #[test]
    fn continuation_matches_closed_form() {
        let q = legendre_q(C64::new(0.6, 0.2), C64::new(0.1, 0.5), 1.0);
        let path = ParamPath::new(vec![
            cr(0.5),
            C64::new(0.5, -0.4),
            C64::new(2.5, -0.4),
            cr(2.5),
        ])
        .unwrap();
        let w0 = q.sqrt_z(SheetedPoint::new(cr(0.5), 1)).unwrap();
        let w1 = continue_root(&q, &path, w0, 2000).unwrap();
        assert!((w1 - q.sqrt_z(SheetedPoint::new(cr(2.5), 1)).unwrap()).norm() < 1e-8);
        // a small loop around t_0 negates the value
        let loop_ = ParamPath::circle(cr(-2.0), 0.2, 64, 0.0);
        let z0 = loop_.start();
        let v0 = q.root_unit(z0);
        let v1 = continue_root(&q, &loop_, v0, 200).unwrap();
        assert!((v1 + v0).norm() < 1e-8);
    }

    #[test]
    fn hopf_roundtrip() {
        let h = HopfCoords {
            theta: 0.4,
            varphi: 5.0,
            phi: 2.1,
        };
        let (a, b) = h.to_ab();
        assert!(((a.norm_sqr() + b.norm_sqr()) - 1.0).abs() < 1e-15);
        let g = HopfCoords::from_ab(a, b);
        assert!((g.theta - h.theta).abs() < 1e-14);
        assert!((g.varphi - h.varphi).abs() < 1e-14);
        assert!((g.phi - h.phi).abs() < 1e-14);
    }

    #[test]
    fn residue_half_weight() {
        let q = legendre_q(C64::new(0.6, 0.2), C64::new(0.1, 0.5), 1.0);
        let phi = 0.9;
        let (t0, t1) = (q.residues(), q.rotated(phi).residues());
        for j in 0..5 {
            assert!((t1[j].norm() - t0[j].norm()).abs() < 1e-15);
            let d = (t1[j].arg() - t0[j].arg() - phi).rem_euclid(2.0 * PI);
            assert!(d < 1e-12 || 2.0 * PI - d < 1e-12);
        }
    }
}
