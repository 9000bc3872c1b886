//! Flat model connection: abelian holonomy, diagonal transports along the
//! pants contours, circle monodromies and the loop monodromies.

use crate::error::{Error, Result};
use crate::fenchel_nielsen::{extract, Extraction, PantsSystem, SqrtBranch};
use crate::fiducial::{rh_xi, Chart, CircleData, FiducialKind, FiducialSolution};
use crate::hitchin_base::QuadraticDifferential;
use crate::numerics::{LMat2, LogComplex, ParamPath, C64, I};
use crate::periods::{
    abelian_integral, compute_periods, sheeted_pieces, Contour, PantsData, PeriodSet,
    DEFAULT_QUAD_TOL,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Phases (h_1, .., h_4) of the flat unitary line bundle on the spectral curve,
/// in the basis A1, A2, B1, B2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbelianHolonomy {
    pub h: [f64; 4],
    /// Orientation of each basis cycle relative to the lifted contours.
    pub orientation_signs: [i8; 4],
}

impl Default for AbelianHolonomy {
    fn default() -> Self {
        AbelianHolonomy {
            h: [0.0; 4],
            orientation_signs: [1; 4],
        }
    }
}

impl AbelianHolonomy {
    /// Phases reduced to [0, 2 pi).
    pub fn new(h: [f64; 4]) -> Self {
        Self::with_orientation(h, [1; 4]).expect("unit orientation signs")
    }

    pub fn with_orientation(h: [f64; 4], orientation_signs: [i8; 4]) -> Result<Self> {
        if h.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("holonomy phases must be finite".into()));
        }
        if orientation_signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::Domain("orientation signs must be +1 or -1".into()));
        }
        Ok(AbelianHolonomy {
            h: h.map(|x| x.rem_euclid(TAU)),
            orientation_signs,
        })
    }

    pub fn signed(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.h[i] * self.orientation_signs[i] as f64)
    }

    pub fn is_trivial(&self) -> bool {
        self.h.iter().all(|&x| x == 0.0)
    }
}

/// Path on which a diagonal transport is taken.
#[derive(Clone, Debug)]
pub enum PathSpec {
    Named(Contour),
    /// Arbitrary path; only admissible for trivial holonomy since its B_L
    /// integral is not decomposed in the cycle basis.
    Free(ParamPath),
}

/// Everything needed to evaluate the model connection at one R.
#[derive(Clone, Debug)]
pub struct ModelConnection {
    /// Quadratic differential with its scale R.
    pub q: QuadraticDifferential,
    pub holonomy: AbelianHolonomy,
    pub pants: PantsData,
    pub periods: PeriodSet,
    pub chart: Chart,
    pub fiducial: FiducialSolution,
    pub tol: f64,
}

impl ModelConnection {
    pub fn new(
        q: QuadraticDifferential,
        holonomy: AbelianHolonomy,
        pants: PantsData,
        chart: Chart,
    ) -> Result<Self> {
        let unit = q.with_r(1.0);
        let periods = compute_periods(&unit, &pants, DEFAULT_QUAD_TOL)?;
        Self::with_periods(q, holonomy, pants, periods, chart)
    }

    /// Reuses periods computed for the unit-scale differential.
    pub fn with_periods(
        q: QuadraticDifferential,
        holonomy: AbelianHolonomy,
        pants: PantsData,
        periods: PeriodSet,
        chart: Chart,
    ) -> Result<Self> {
        if !(q.r > 0.0) {
            return Err(Error::Domain(format!("R must be positive, got {}", q.r)));
        }
        let fiducial = FiducialSolution::solve_default(FiducialKind::Logarithmic, q.r)?;
        Ok(ModelConnection {
            q,
            holonomy,
            pants,
            periods,
            chart,
            fiducial,
            tol: DEFAULT_QUAD_TOL,
        })
    }

    /// Same connection with another abelian holonomy.
    pub fn with_holonomy(&self, holonomy: AbelianHolonomy) -> Self {
        ModelConnection {
            holonomy,
            ..self.clone()
        }
    }

    pub fn sqrt_r(&self) -> f64 {
        self.q.r.sqrt()
    }

    /// Unit-scale integral of Z_+ along a named contour.
    fn z_integral(&self, c: Contour) -> Result<C64> {
        Ok(match c {
            Contour::Eta(j) => self.periods.eta[j],
            Contour::Psi2 => self.periods.psi2,
            Contour::Psi3 => self.periods.psi3,
            Contour::Cycle(_) => {
                return Err(Error::Undecomposable(
                    "cycle has no single-sheet Z integral".into(),
                ))
            }
        })
    }

    /// Diagonal exponent X with transport diag(e^X, e^-X) along a named
    /// contour lying on one sheet.
    pub fn diagonal_exponent(&self, c: Contour, sheet: i8) -> Result<C64> {
        let z = sheet as f64 * self.z_integral(c)?;
        Ok(abelian_integral(c, sheet, &self.holonomy) + 2.0 * self.sqrt_r() * z.re)
    }

    /// Transport of the diagonal model connection. Along a free path the
    /// sheets are tracked and the frame is swapped at every cut crossing.
    /// Returns the transport and the final sheet.
    pub fn diagonal_transport(&self, path: &PathSpec, sheet: i8) -> Result<(LMat2, i8)> {
        match path {
            PathSpec::Named(c) => {
                let x = self.diagonal_exponent(*c, sheet)?;
                Ok((diag_exp(x), sheet))
            }
            PathSpec::Free(p) => {
                if !self.holonomy.is_trivial() {
                    return Err(Error::Undecomposable(
                        "free path with nontrivial holonomy".into(),
                    ));
                }
                let pieces = sheeted_pieces(&self.q.with_r(1.0), p, sheet, self.tol)?;
                let mut m = LMat2::identity();
                let mut prev = sheet;
                for (z, s) in &pieces {
                    if *s != prev {
                        m = LMat2::swap() * m;
                        prev = *s;
                    }
                    m = diag_exp(C64::new(2.0 * self.sqrt_r() * z.re, 0.0)) * m;
                }
                let end = pieces.last().map(|p| p.1).unwrap_or(sheet);
                Ok((m, end))
            }
        }
    }

    pub fn circle_data(&self, j: usize) -> CircleData {
        if self.q.nodal_index() == Some(j) {
            return CircleData {
                r_scale: self.q.r,
                r_j: 0.0,
                upsilon: 0.0,
            };
        }
        match self.chart {
            Chart::Exact => CircleData::exact(self.q.r, self.periods.sigma[j]),
            Chart::Linear => {
                CircleData::linear(self.q.r, self.periods.sqrt_tau[j], self.pants.radius(j))
            }
        }
    }

    /// Monodromy of the model connection around the circle xi_j, read at the
    /// base point of t_j: D^-1 RH D with D the transport along eta_j.
    pub fn circle_monodromy(&self, j: usize) -> Result<LMat2> {
        let rh = rh_xi(&self.fiducial, &self.circle_data(j))?;
        let (d, _) = self.diagonal_transport(&PathSpec::Named(Contour::Eta(j)), 1)?;
        Ok(d.inv_sl2() * rh * d)
    }

    pub fn circle_monodromies(&self) -> Result<[LMat2; 5]> {
        let v: Vec<LMat2> = (0..5)
            .map(|j| self.circle_monodromy(j))
            .collect::<Result<_>>()?;
        Ok([v[0], v[1], v[2], v[3], v[4]])
    }

    pub fn loop_monodromy(&self, which: Loop) -> Result<LMat2> {
        Ok(match which {
            Loop::Zeta2 => self.circle_monodromy(2)? * self.circle_monodromy(1)?,
            Loop::Zeta3 => self.circle_monodromy(4)? * self.circle_monodromy(0)?,
        })
    }

    /// Generators of the pants restrictions: xi_j = M_j^-1 at t_2, t_3, t_4,
    /// xi_1 = M_1, xi_0 = M_0^-1, rho_2 = M_2 M_1, rho_3 = M_4^-1 M_0^-1.
    pub fn pants_system(&self) -> Result<PantsSystem<LogComplex>> {
        let m = self.circle_monodromies()?;
        let xi = [
            m[0].inv_sl2(),
            m[1],
            m[2].inv_sl2(),
            m[3].inv_sl2(),
            m[4].inv_sl2(),
        ];
        Ok(PantsSystem {
            xi,
            rho2: m[2] * m[1],
            rho3: xi[4] * xi[0],
            psi: self.gluing_transports()?,
        })
    }

    /// Fenchel-Nielsen coordinates of the model connection.
    pub fn coordinates(&self, branch: SqrtBranch) -> Result<Extraction<LogComplex>> {
        extract(&self.pants_system()?, branch)
    }

    /// Gluing transports psi_2 (x_2 to x_3) and psi_3 (x_3 to x_4).
    pub fn gluing_transports(&self) -> Result<[LMat2; 2]> {
        Ok([
            self.diagonal_transport(&PathSpec::Named(Contour::Psi2), 1)?
                .0,
            self.diagonal_transport(&PathSpec::Named(Contour::Psi3), 1)?
                .0,
        ])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loop {
    Zeta2,
    Zeta3,
}

/// diag(e^x, e^-x).
pub fn diag_exp(x: C64) -> LMat2 {
    LMat2::diag(LogComplex::exp(x), LogComplex::exp(-x))
}

/// exp(i h) for a phase, as a scalar.
pub fn unit_phase(h: f64) -> C64 {
    (I * h).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hitchin_base::PunctureConfig;

    fn connection(r: f64, hol: [f64; 4]) -> ModelConnection {
        let q = QuadraticDifferential::new(
            C64::new(0.0, 1.0),
            C64::new(-0.4, 0.3),
            r,
            PunctureConfig::legendre(0.5).unwrap(),
        )
        .unwrap();
        let pants = PantsData::legendre(&q, 0.05, [0.01, 0.01, 0.01], 0.1).unwrap();
        ModelConnection::new(q, AbelianHolonomy::new(hol), pants, Chart::Exact).unwrap()
    }

    #[test]
    fn holonomy_normalization() {
        let h = AbelianHolonomy::new([-1.0, 7.0, TAU, 0.5]);
        assert!((h.h[0] - (TAU - 1.0)).abs() < 1e-15);
        assert!((h.h[1] - (7.0 - TAU)).abs() < 1e-15);
        assert_eq!(h.h[2], 0.0);
        assert!(AbelianHolonomy::with_orientation([0.0; 4], [1, 0, 1, 1]).is_err());
        let s = AbelianHolonomy::with_orientation([1.0, 2.0, 3.0, 4.0], [1, -1, 1, -1]).unwrap();
        assert_eq!(s.signed(), [1.0, -2.0, 3.0, -4.0]);
    }

    #[test]
    fn circle_monodromies_have_unit_determinant() {
        let m = connection(100.0, [0.3, 0.7, 1.1, 2.9]);
        for j in 0..5 {
            let mj = m.circle_monodromy(j).unwrap();
            let (n, s) = mj.normalized();
            let det = n.det() * (2.0 * s).exp();
            assert!((det - C64::new(1.0, 0.0)).norm() < 1e-8, "j={j} det={det}");
        }
    }

    #[test]
    fn transport_inverse_and_sheet_symmetry() {
        let m = connection(400.0, [0.3, 0.7, 1.1, 2.9]);
        for c in [Contour::Eta(2), Contour::Psi2, Contour::Psi3] {
            let (p, _) = m.diagonal_transport(&PathSpec::Named(c), 1).unwrap();
            let (q, _) = m.diagonal_transport(&PathSpec::Named(c), -1).unwrap();
            let swapped = LMat2::swap() * p * LMat2::swap();
            assert!(swapped.rel_diff(&q) < 1e-12);
            let id = p * p.inv_sl2();
            assert!(id.rel_diff(&LMat2::identity()) < 1e-12);
        }
    }

    #[test]
    fn free_path_composition() {
        let m = connection(50.0, [0.0; 4]);
        let a = C64::new(-0.5, -0.4);
        let b = C64::new(0.5, -0.4);
        let c = C64::new(0.5, 0.6);
        let p1 = ParamPath::new(vec![a, b]).unwrap();
        let p2 = ParamPath::new(vec![b, c]).unwrap();
        let (t1, s1) = m
            .diagonal_transport(&PathSpec::Free(p1.clone()), 1)
            .unwrap();
        let (t2, s2) = m
            .diagonal_transport(&PathSpec::Free(p2.clone()), s1)
            .unwrap();
        let (t12, s12) = m
            .diagonal_transport(&PathSpec::Free(p1.concat(&p2).unwrap()), 1)
            .unwrap();
        assert_eq!(s2, s12);
        assert!((t2 * t1).rel_diff(&t12) < 1e-9);
        let (back, sb) = m
            .diagonal_transport(&PathSpec::Free(p1.reversed()), s1)
            .unwrap();
        assert_eq!(sb, 1);
        assert!((back * t1).rel_diff(&LMat2::identity()) < 1e-9);
    }

    #[test]
    fn free_path_rejects_nontrivial_holonomy() {
        let m = connection(50.0, [0.1, 0.0, 0.0, 0.0]);
        let p = ParamPath::new(vec![C64::new(-0.5, -0.4), C64::new(0.5, -0.4)]).unwrap();
        assert!(matches!(
            m.diagonal_transport(&PathSpec::Free(p), 1),
            Err(Error::Undecomposable(_))
        ));
    }
}
