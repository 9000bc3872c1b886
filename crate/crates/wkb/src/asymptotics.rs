//! Closed-form large-R predictions for lengths and twists, the twist case
//! table, critical Hopf angles, the corner point q* and the divisor phases.

use crate::error::{Error, Result};
use crate::fiducial::Chart;
use crate::hitchin_base::{PunctureConfig, QuadraticDifferential};
use crate::numerics::{bracket_root, LogComplex, Scalar, C64};
use crate::periods::{
    abelian_integral, compute_periods, Contour, PantsData, PeriodSet, DEFAULT_QUAD_TOL,
};
use crate::transport::AbelianHolonomy;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Absolute tolerance for equalities in the case table.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthIndex {
    L2,
    L3,
}

/// Period data entering the predictions, at unit scale.
#[derive(Clone, Debug)]
pub struct PredictionInputs<'a> {
    pub periods: &'a PeriodSet,
    pub pants: &'a PantsData,
    pub holonomy: &'a AbelianHolonomy,
    pub chart: Chart,
}

impl PredictionInputs<'_> {
    /// sqrt(s tau_j) with s the radius of the disc about t_j: -sigma_j / 2 in
    /// the exact chart.
    pub fn root_s_tau(&self, j: usize) -> C64 {
        match self.chart {
            Chart::Exact => -0.5 * self.periods.sigma[j],
            Chart::Linear => self.pants.radius(j).sqrt() * self.periods.sqrt_tau[j],
        }
    }

    /// Imaginary part of int B_L along eta_a - eta_b on sheet +.
    fn b_eta(&self, a: usize, b: usize) -> f64 {
        (abelian_integral(Contour::Eta(a), 1, self.holonomy)
            - abelian_integral(Contour::Eta(b), 1, self.holonomy))
        .im
    }
}

/// -2 cosh(2 int_{eta_2 - eta_1} B + 4 sqrt(R) Re(pi_2 - pi_1)) (resp. the
/// eta_4 - eta_0 analogue) in log form.
pub fn predict_l(inp: &PredictionInputs, r_scale: f64, which: LengthIndex) -> Result<LogComplex> {
    let p = &inp.periods.pi;
    let (d, b) = match which {
        LengthIndex::L2 => (p[2] - p[1], inp.b_eta(2, 1)),
        LengthIndex::L3 => (p[4] - p[0], inp.b_eta(4, 0)),
    };
    if d.re.abs() < TIE_TOL {
        return Err(Error::Degenerate(
            "real part of the period difference vanishes".into(),
        ));
    }
    let x = C64::new(4.0 * r_scale.sqrt() * d.re, 2.0 * b);
    let two_cosh = LogComplex::exp(x) + LogComplex::exp(-x);
    Ok(-two_cosh)
}

/// One evaluated inequality lhs < rhs (or equality for `tie` entries).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistLimit {
    /// [1 : 0]
    OneZero,
    /// [0 : 1]
    ZeroOne,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistCaseReport {
    pub which: u8,
    /// Case number. Twist 2: 1..8 in the standard case order. Twist 3: 1
    /// (cosh dominant), 2 (sinh dominant), 5/7 (matched, congruent, leading
    /// q_3 term from the first summand), 6/8 (matched, not congruent), 3
    /// (matched and congruent with the reverse leading term; no limit predicted).
    pub case_id: u8,
    /// The case was found for -Z_+.
    pub mirrored: bool,
    pub inequalities: Vec<Inequality>,
    pub predicted_limit: Option<TwistLimit>,
    /// Coefficient of sqrt(R) in log|p/q| for the [0:1] cases.
    pub predicted_rate: Option<f64>,
    /// For twist 3: the rate 8 K_4 - 2 psi_3 obtained from the leading-order
    /// expansion, which differs from `predicted_rate`.
    pub alternative_rate: Option<f64>,
    /// Phase of the prefactor of p/q in the [0:1] cases.
    pub predicted_phase: Option<f64>,
}

fn congruent(x: f64, target: f64) -> bool {
    // x == target mod pi
    let r = (x - target).rem_euclid(PI);
    r < TIE_TOL || PI - r < TIE_TOL
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= TIE_TOL * (1.0 + x.abs().max(y.abs()))
}

struct Twist2Data {
    psi: f64,
    k1: f64,
    k3: f64,
    d: f64,
    e: f64,
    b_eta: f64,
    b_psi: f64,
}

fn classify2(t: &Twist2Data) -> Result<Option<(u8, Option<TwistLimit>, Option<f64>)>> {
    let (psi, k1, d, e) = (t.psi, t.k1, t.d, t.e);
    if near(psi, k1) {
        return Err(Error::BoundaryTie(
            "int_psi2 Re Z versus 2 Re(sqrt(s2 tau2) - sqrt(s3 tau3))".into(),
        ));
    }
    let below = psi < k1;
    let rate = -8.0 * t.k3 + 4.0 * psi;
    let matched_limit = |c: u8| {
        if psi < 2.0 * t.k3 {
            Some((c, Some(TwistLimit::ZeroOne), Some(rate)))
        } else {
            Some((c, Some(TwistLimit::OneZero), None))
        }
    };
    if near(d, e) && e > 0.0 {
        if !below {
            return Ok(None);
        }
        return Ok(if congruent(t.b_eta, 0.0) {
            matched_limit(5)
        } else {
            Some((6, Some(TwistLimit::OneZero), None))
        });
    }
    if near(d, -e) && e < 0.0 {
        if !below {
            return Ok(None);
        }
        return Ok(if congruent(t.b_eta, 0.5 * PI) {
            matched_limit(7)
        } else {
            Some((8, Some(TwistLimit::OneZero), None))
        });
    }
    if near(d, e.abs()) {
        return Err(Error::BoundaryTie(
            "|Re(pi1 - pi2)| versus 2 sqrt(s2) |Re(sqrt tau1 - sqrt tau2)|".into(),
        ));
    }
    let id = match (below, e.abs() < d) {
        (true, true) => 1,
        (true, false) => 2,
        (false, true) => 3,
        (false, false) => 4,
    };
    Ok(Some((id, Some(TwistLimit::OneZero), None)))
}

/// Case classification for [p_2 : q_2] (which = 2) or [p_3 : q_3] (which = 3).
/// When no case applies for Z_+ the classification is repeated for -Z_+.
pub fn predict_twist(inp: &PredictionInputs, which: u8) -> Result<TwistCaseReport> {
    let p = &inp.periods;
    let hs = inp.holonomy.signed();
    let run = |sign: f64| -> Result<Option<TwistCaseReport>> {
        let rt = |j: usize| sign * inp.root_s_tau(j);
        match which {
            2 => {
                if (p.pi[1] - p.pi[2]).re.abs() < TIE_TOL {
                    return Err(Error::Degenerate("Re(pi1 - pi2) vanishes".into()));
                }
                let t = Twist2Data {
                    psi: sign * p.psi2.re,
                    k1: 2.0 * (rt(2) - rt(3)).re,
                    k3: (2.0 * rt(2) - rt(1) - rt(3)).re,
                    d: (p.pi[1] - p.pi[2]).re.abs(),
                    e: 2.0 * (rt(1) - rt(2)).re,
                    b_eta: sign * 0.5 * hs[0],
                    b_psi: sign * 0.5 * hs[2],
                };
                let ineqs = vec![
                    Inequality {
                        name: "psi2_vs_k1".into(),
                        lhs: t.psi,
                        rhs: t.k1,
                    },
                    Inequality {
                        name: "tie_d_e".into(),
                        lhs: t.d,
                        rhs: t.e,
                    },
                    Inequality {
                        name: "inequality3".into(),
                        lhs: t.psi,
                        rhs: 2.0 * t.k3,
                    },
                ];
                Ok(classify2(&t)?.map(|(case_id, lim, rate)| TwistCaseReport {
                    which,
                    case_id,
                    mirrored: sign < 0.0,
                    inequalities: ineqs,
                    predicted_limit: lim,
                    predicted_rate: rate,
                    alternative_rate: None,
                    predicted_phase: rate.map(|_| 2.0 * t.b_psi),
                }))
            }
            3 => {
                if (p.pi[4] - p.pi[0]).re.abs() < TIE_TOL {
                    return Err(Error::Degenerate("Re(pi4 - pi0) vanishes".into()));
                }
                let psi = sign * p.psi3.re;
                let d = (p.pi[0] - p.pi[4]).re.abs();
                let e = 2.0 * (rt(0) - rt(4)).re;
                let k4 = (rt(3) + rt(0) - 2.0 * rt(4)).re;
                let case1 = 2.0 * (rt(3) - rt(4)).re;
                let b_eta = sign * (-0.5 * hs[1]);
                let b_psi = sign * 0.5 * hs[3];
                let ineqs = vec![
                    Inequality {
                        name: "tie_d_e".into(),
                        lhs: d,
                        rhs: e,
                    },
                    Inequality {
                        name: "inequality_case1".into(),
                        lhs: case1,
                        rhs: psi,
                    },
                    Inequality {
                        name: "inequality4".into(),
                        lhs: 2.0 * k4,
                        rhs: psi,
                    },
                ];
                let report = |case_id, lim, rate: Option<f64>, alt: Option<f64>| TwistCaseReport {
                    which,
                    case_id,
                    mirrored: sign < 0.0,
                    inequalities: ineqs.clone(),
                    predicted_limit: lim,
                    predicted_rate: rate,
                    alternative_rate: alt,
                    predicted_phase: rate.map(|_| -2.0 * b_psi),
                };
                let matched = |c: u8| -> Result<Option<TwistCaseReport>> {
                    if near(psi, case1) {
                        return Err(Error::BoundaryTie("inequality_case1".into()));
                    }
                    if psi < case1 {
                        return Ok(Some(report(3, None, None, None)));
                    }
                    if near(psi, 2.0 * k4) {
                        return Err(Error::BoundaryTie("inequality4".into()));
                    }
                    let alt = Some(8.0 * k4 - 2.0 * psi);
                    if psi > 2.0 * k4 {
                        Ok(Some(report(
                            c,
                            Some(TwistLimit::ZeroOne),
                            Some(8.0 * k4 - 4.0 * psi),
                            alt,
                        )))
                    } else {
                        Ok(Some(report(c, Some(TwistLimit::OneZero), None, alt)))
                    }
                };
                if near(d, e) && e > 0.0 {
                    return if congruent(b_eta, 0.0) {
                        matched(5)
                    } else {
                        Ok(Some(report(6, Some(TwistLimit::OneZero), None, None)))
                    };
                }
                if near(d, -e) && e < 0.0 {
                    return if congruent(b_eta, 0.5 * PI) {
                        matched(7)
                    } else {
                        Ok(Some(report(8, Some(TwistLimit::OneZero), None, None)))
                    };
                }
                if near(d, e.abs()) {
                    return Err(Error::BoundaryTie(
                        "|Re(pi0 - pi4)| versus 2 sqrt(s4) |Re(sqrt tau0 - sqrt tau4)|".into(),
                    ));
                }
                Ok(Some(report(
                    if d > e.abs() { 1 } else { 2 },
                    Some(TwistLimit::OneZero),
                    None,
                    None,
                )))
            }
            _ => Err(Error::Domain(format!(
                "twist index must be 2 or 3, got {which}"
            ))),
        }
    };
    if let Some(r) = run(1.0)? {
        return Ok(r);
    }
    run(-1.0)?.ok_or_else(|| Error::Degenerate("no case of the table applies".into()))
}

/// Which matching condition defines the critical angle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleMode {
    /// Re of the period difference equals the tau-side term.
    #[default]
    TauMatched,
    /// Re of the period difference vanishes.
    Bounded,
}

/// Complex number whose real part, after rotation by e^{i phi/2}, is the
/// matching function.
fn matching_vector(p: &PeriodSet, which: u8, mode: AngleMode) -> Result<C64> {
    let (a, s) = match which {
        2 => (p.pi[1] - p.pi[2], p.sigma[2] - p.sigma[1]),
        3 => (p.pi[0] - p.pi[4], p.sigma[4] - p.sigma[0]),
        _ => {
            return Err(Error::Domain(format!(
                "angle index must be 2 or 3, got {which}"
            )))
        }
    };
    Ok(match mode {
        AngleMode::TauMatched => a - s,
        AngleMode::Bounded => a,
    })
}

/// Residual of the matching condition for the differential e^{i phi} q, from
/// the periods of q.
pub fn matching_residual(p: &PeriodSet, which: u8, mode: AngleMode, phi: f64) -> Result<f64> {
    Ok((C64::from_polar(1.0, 0.5 * phi) * matching_vector(p, which, mode)?).re)
}

/// The unique phi in [0, 2 pi) for which e^{i phi} q satisfies the matching
/// condition: 64-point scan, doubled on ambiguity, then bracketing.
pub fn critical_angle(p: &PeriodSet, which: u8, mode: AngleMode) -> Result<f64> {
    let v = matching_vector(p, which, mode)?;
    if v.norm() < TIE_TOL {
        return Err(Error::Degenerate(
            "matching function vanishes identically".into(),
        ));
    }
    let f = |phi: f64| (C64::from_polar(1.0, 0.5 * phi) * v).re;
    let mut n = 64;
    loop {
        let xs: Vec<f64> = (0..=n).map(|k| TAU * k as f64 / n as f64).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let mut roots = Vec::new();
        for k in 0..n {
            if vals[k] == 0.0 {
                roots.push((xs[k], xs[k]));
            } else if vals[k] * vals[k + 1] < 0.0 {
                roots.push((xs[k], xs[k + 1]));
            }
        }
        match roots.len() {
            1 => {
                let (lo, hi) = roots[0];
                let r = if lo == hi {
                    lo
                } else {
                    bracket_root(&f, lo, hi, 1e-15)?
                };
                return Ok(r.rem_euclid(TAU));
            }
            0 => return Err(Error::NoRoot("critical angle".into())),
            _ if n < 1024 => n *= 2,
            _ => return Err(Error::MultipleRoots("critical angle".into())),
        }
    }
}

/// Result of the q* construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QStarResult {
    pub qstar: QuadraticDifferential,
    pub epsilon: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub x4: f64,
    pub phi_star2: f64,
    pub phi_star3: f64,
    /// Margins of the twist-2 and twist-3 inequalities, positive when they hold.
    pub inequality_margins: [f64; 2],
    /// Im(d3/d2)/|d3/d2| at the found radii.
    pub slope_residual: f64,
    /// Sign of Z_+ for which the margins are positive.
    pub z_sign: f64,
}

pub const QSTAR_DEPTH: f64 = 0.1;
pub const QSTAR_S23: f64 = 0.01;

impl QStarResult {
    pub fn pants(&self) -> Result<PantsData> {
        PantsData::legendre(
            &self.qstar,
            self.epsilon,
            [self.s2, self.s3, self.s4],
            QSTAR_DEPTH,
        )
    }
}

fn slope_mismatch(p: &PeriodSet) -> f64 {
    let d2 = (p.pi[1] - p.pi[2]) - (p.sigma[2] - p.sigma[1]);
    let d3 = (p.pi[0] - p.pi[4]) - (p.sigma[4] - p.sigma[0]);
    let v = d3 / d2;
    v.im / v.norm()
}

/// Twist-2 and twist-3 inequality margins with Z_+ multiplied by `sign`.
pub fn qstar_margins(p: &PeriodSet, sign: f64) -> [f64; 2] {
    let s = p.sigma.map(|x| sign * x);
    let m3 = (-2.0 * s[2] + s[1] + s[3]).re - sign * p.psi2.re;
    let m4 = sign * p.psi3.re - (-s[3] - s[0] + 2.0 * s[4]).re;
    [m3, m4]
}

/// Corner point q* for the Legendre configuration: s2 = s3 fixed, s4 by
/// bisection until the two matching segments are parallel, then the common
/// critical rotation of the nodal differential.
pub fn find_qstar(config: &PunctureConfig, epsilon: f64) -> Result<QStarResult> {
    let k = config
        .k
        .ok_or_else(|| Error::Domain("q* needs a Legendre configuration".into()))?;
    let nodal = QuadraticDifferential::new(
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        1.0,
        PunctureConfig::legendre(k)?,
    )?;
    let periods_at = |s4: f64| -> Result<PeriodSet> {
        let pants = PantsData::legendre(&nodal, epsilon, [QSTAR_S23, QSTAR_S23, s4], QSTAR_DEPTH)?;
        compute_periods(&nodal, &pants, DEFAULT_QUAD_TOL)
    };
    let t = nodal.t();
    let x4 = crate::periods::legendre_x4(k, epsilon)?;
    let s_max = 0.9 * (x4 - t[4].re).min(0.5 * (t[4].re - t[3].re).abs());
    let grid: Vec<f64> = (0..=24)
        .map(|i| 1e-4 * (s_max / 1e-4).powf(i as f64 / 24.0))
        .collect();
    let g = |s: f64| {
        periods_at(s)
            .map(|p| slope_mismatch(&p))
            .unwrap_or(f64::NAN)
    };
    let vals: Vec<f64> = grid.iter().map(|&s| g(s)).collect();
    let idx = (0..grid.len() - 1)
        .find(|&i| vals[i].is_finite() && vals[i + 1].is_finite() && vals[i] * vals[i + 1] <= 0.0)
        .ok_or_else(|| {
            Error::MarginViolation("no radius s4 makes the matching segments parallel".into())
        })?;
    let s4 = bracket_root(&g, grid[idx], grid[idx + 1], 1e-14)?;
    let p = periods_at(s4)?;
    let phi2 = critical_angle(&p, 2, AngleMode::TauMatched)?;
    let phi3 = critical_angle(&p, 3, AngleMode::TauMatched)?;
    let qstar = nodal.rotated(phi2);
    let pants = PantsData::legendre(&qstar, epsilon, [QSTAR_S23, QSTAR_S23, s4], QSTAR_DEPTH)?;
    let ps = compute_periods(&qstar, &pants, DEFAULT_QUAD_TOL)?;
    let (z_sign, margins) = [1.0, -1.0]
        .into_iter()
        .map(|s| (s, qstar_margins(&ps, s)))
        .find(|(_, m)| m[0] > 0.0 && m[1] > 0.0)
        .ok_or_else(|| {
            Error::MarginViolation("inequality margins are not positive; shrink epsilon".into())
        })?;
    Ok(QStarResult {
        qstar,
        epsilon,
        s2: QSTAR_S23,
        s3: QSTAR_S23,
        s4,
        x4,
        phi_star2: phi2,
        phi_star3: phi3,
        inequality_margins: margins,
        slope_residual: slope_mismatch(&p),
        z_sign,
    })
}

/// Holonomy meeting the congruence conditions: h_1 = h_2 = 0 (mod 2 pi).
pub fn congruence_holonomy(h3: f64, h4: f64) -> AbelianHolonomy {
    AbelianHolonomy::new([0.0, 0.0, h3, h4])
}

/// Phases of the divisor-defining coordinates (l_2, twist_2, l_3, twist_3)
/// near the corner: (-e^{i h1}, e^{i h3}, -e^{i h2}, e^{i h4}).
pub fn phase_predictions(h: &AbelianHolonomy) -> [C64; 4] {
    let e = |x: f64| C64::from_polar(1.0, x);
    [-e(h.h[0]), e(h.h[2]), -e(h.h[1]), e(h.h[3])]
}

/// Phase of a log-form value; used for winding counts.
pub fn phase_of<S: Scalar>(z: S) -> f64 {
    z.arg()
}

/// Total winding (in turns) of a sampled closed sequence of phases.
pub fn winding_of(phases: &[f64]) -> f64 {
    let mut tot = 0.0;
    for w in phases.windows(2) {
        let d = (w[1] - w[0] + PI).rem_euclid(TAU) - PI;
        tot += d;
    }
    tot / TAU
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::elliptic_k;

    fn nodal() -> QuadraticDifferential {
        QuadraticDifferential::new(
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            1.0,
            PunctureConfig::legendre(0.5).unwrap(),
        )
        .unwrap()
    }

    fn setup(q: &QuadraticDifferential) -> (PeriodSet, PantsData) {
        let pants = PantsData::legendre(q, 0.05, [0.01, 0.01, 0.05], QSTAR_DEPTH).unwrap();
        (compute_periods(q, &pants, DEFAULT_QUAD_TOL).unwrap(), pants)
    }

    #[test]
    fn predict_l_legendre_value() {
        let q = nodal();
        let (p, pants) = setup(&q);
        let h = AbelianHolonomy::default();
        let inp = PredictionInputs {
            periods: &p,
            pants: &pants,
            holonomy: &h,
            chart: Chart::Exact,
        };
        let l = predict_l(&inp, 100.0, LengthIndex::L2).unwrap();
        let kk = 0.5 * elliptic_k(0.5).unwrap();
        assert!((l.ln_abs() - 40.0 * kk).abs() < 1e-8);
        assert!((l.arg().abs() - PI).abs() < 1e-12);
        // invariant under a shift of pi in the A1 phase (2 int B shifts by pi i... twice)
        let h2 = AbelianHolonomy::new([2.0 * PI - 1e-12, 0.0, 0.0, 0.0]);
        let inp2 = PredictionInputs {
            holonomy: &h2,
            ..inp.clone()
        };
        let l2 = predict_l(&inp2, 100.0, LengthIndex::L2).unwrap();
        assert!((l2.ln_abs() - l.ln_abs()).abs() < 1e-9);
    }

    #[test]
    fn critical_angle_properties() {
        let q = nodal();
        let (p, _) = setup(&q);
        let phi = critical_angle(&p, 2, AngleMode::TauMatched).unwrap();
        // sqrt(tau_2) = i/sqrt(6) in this determination puts the angle in (pi, 2 pi)
        assert!(phi > PI && phi < TAU, "phi = {phi}");
        assert!(
            matching_residual(&p, 2, AngleMode::TauMatched, phi)
                .unwrap()
                .abs()
                < 1e-10
        );
        // direct re-evaluation on the rotated differential
        let (pr, _) = setup(&q.rotated(phi));
        assert!(
            matching_residual(&pr, 2, AngleMode::TauMatched, 0.0)
                .unwrap()
                .abs()
                < 1e-10
        );
        // equivariance
        for phi0 in [0.4, 2.5] {
            let (p0, _) = setup(&q.rotated(phi0));
            let a = critical_angle(&p0, 2, AngleMode::TauMatched).unwrap();
            let d = (a - (phi - phi0)).rem_euclid(TAU);
            assert!(d < 1e-9 || TAU - d < 1e-9);
        }
        let b = critical_angle(&p, 2, AngleMode::Bounded).unwrap();
        assert!(
            matching_residual(&p, 2, AngleMode::Bounded, b)
                .unwrap()
                .abs()
                < 1e-10
        );
    }

    #[test]
    fn critical_angle_small_radius_limit() {
        let q = nodal();
        let mut last = f64::INFINITY;
        for s in [0.05, 0.01, 0.001] {
            let pants = PantsData::legendre(&q, 0.05, [s, s, 0.05], QSTAR_DEPTH).unwrap();
            let p = compute_periods(&q, &pants, DEFAULT_QUAD_TOL).unwrap();
            let phi = critical_angle(&p, 2, AngleMode::TauMatched).unwrap();
            // phi/2 - pi/2 measured mod pi; approaches 0
            let dev = (0.5 * phi - 0.5 * PI)
                .rem_euclid(PI)
                .min(PI - (0.5 * phi - 0.5 * PI).rem_euclid(PI));
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 0.05);
    }

    #[test]
    fn qstar_construction() {
        let r = find_qstar(&PunctureConfig::legendre(0.5).unwrap(), 0.05).unwrap();
        assert!(r.slope_residual.abs() < 1e-10);
        assert!(r.inequality_margins.iter().all(|&m| m > 0.0));
        let d = (r.phi_star2 - r.phi_star3).rem_euclid(TAU);
        assert!(
            d < 1e-8 || TAU - d < 1e-8,
            "{} {}",
            r.phi_star2,
            r.phi_star3
        );
        let pants = r.pants().unwrap();
        let p = compute_periods(&r.qstar, &pants, DEFAULT_QUAD_TOL).unwrap();
        let h = congruence_holonomy(0.3, 0.7);
        let inp = PredictionInputs {
            periods: &p,
            pants: &pants,
            holonomy: &h,
            chart: Chart::Exact,
        };
        for which in [2, 3] {
            let rep = predict_twist(&inp, which).unwrap();
            assert_eq!(rep.predicted_limit, Some(TwistLimit::ZeroOne), "{rep:?}");
            assert!(rep.predicted_rate.unwrap() < 0.0);
        }
    }

    #[test]
    fn generic_point_converges_to_one_zero() {
        let q = QuadraticDifferential::new(
            C64::new(0.0, 1.0),
            C64::new(-0.4, 0.3),
            1.0,
            PunctureConfig::legendre(0.5).unwrap(),
        )
        .unwrap();
        let (p, pants) = setup(&q);
        let h = AbelianHolonomy::new([0.3, 0.2, 0.1, 0.5]);
        let inp = PredictionInputs {
            periods: &p,
            pants: &pants,
            holonomy: &h,
            chart: Chart::Exact,
        };
        for which in [2, 3] {
            let rep = predict_twist(&inp, which).unwrap();
            assert_eq!(rep.predicted_limit, Some(TwistLimit::OneZero));
            // mirrored input gives the same limit
            let neg = PeriodSet {
                pi: p.pi.map(|x| -x),
                psi2: -p.psi2,
                psi3: -p.psi3,
                sqrt_tau: p.sqrt_tau.map(|x| -x),
                sigma: p.sigma.map(|x| -x),
                eta: p.eta.map(|x| -x),
            };
            let inp_neg = PredictionInputs {
                periods: &neg,
                ..inp.clone()
            };
            assert_eq!(
                predict_twist(&inp_neg, which).unwrap().predicted_limit,
                rep.predicted_limit
            );
        }
    }

    #[test]
    fn phases() {
        let z = phase_predictions(&AbelianHolonomy::default());
        let want = [-1.0, 1.0, -1.0, 1.0];
        for i in 0..4 {
            assert!((z[i] - want[i]).norm() < 1e-15);
        }
        let a = phase_predictions(&AbelianHolonomy::new([1.0, 2.0, 3.0, 4.0]));
        let b = phase_predictions(&AbelianHolonomy::new([1.0 + TAU, 2.0, 3.0, 4.0]));
        assert!((0..4).all(|i| (a[i] - b[i]).norm() < 1e-12));
        let ph: Vec<f64> = (0..=32)
            .map(|k| {
                phase_predictions(&AbelianHolonomy::new([
                    TAU * k as f64 / 32.0,
                    0.0,
                    0.0,
                    0.0,
                ]))[0]
                    .arg()
            })
            .collect();
        assert!((winding_of(&ph) - 1.0).abs() < 1e-12);
    }
}
