//! Named experiments: convergence of the model monodromies to their large-R
//! predictions, twist rates, holonomy winding sweeps and single-R reports.

use crate::asymptotics::{
    find_qstar, phase_predictions, predict_l, predict_twist, LengthIndex, PredictionInputs,
    QStarResult, TwistCaseReport, QSTAR_DEPTH,
};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::fenchel_nielsen::{pair_ratio, FNCoordsJson, JsonComplex, SqrtBranch};
use crate::fiducial::{rh_xi, Chart};
use crate::hitchin_base::{PunctureConfig, QuadraticDifferential};
use crate::numerics::{linfit, LogComplex, Scalar, C64};
use crate::periods::{compute_periods, PantsData, PeriodSet};
use crate::transport::{AbelianHolonomy, Loop, ModelConnection};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Radii used for a differential given by its coefficients when none are configured.
pub const DEFAULT_RADII: [f64; 3] = [0.01, 0.01, 0.05];

/// Puncture index whose disc monodromy is tracked by the rh-xi experiment.
pub const RH_XI_PUNCTURE: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prop {
    RhXi,
    L2,
    L3,
    Twist2,
    Twist3,
}

impl Prop {
    pub fn name(self) -> &'static str {
        match self {
            Prop::RhXi => "rh-xi",
            Prop::L2 => "l2",
            Prop::L3 => "l3",
            Prop::Twist2 => "twist2",
            Prop::Twist3 => "twist3",
        }
    }

    /// Names of the experiment-specific columns in `ConvergeRow::extra`.
    pub fn extra_names(self) -> &'static [&'static str] {
        match self {
            Prop::RhXi => &["log_abs_a", "log_abs_d"],
            Prop::L2 | Prop::L3 => &[],
            Prop::Twist2 | Prop::Twist3 => &["shape_residual"],
        }
    }
}

/// Differential, pants layout and unit-scale periods shared by all R.
#[derive(Clone, Debug)]
pub struct Setup {
    pub q: QuadraticDifferential,
    pub pants: PantsData,
    pub periods: PeriodSet,
    pub chart: Chart,
    pub qstar: Option<QStarResult>,
}

impl Setup {
    /// The corner point q* of the configured Legendre family, with the
    /// configured radii if present.
    pub fn qstar(config: &ExperimentConfig) -> Result<Self> {
        let qs = find_qstar(&PunctureConfig::legendre(config.k)?, config.epsilon)?;
        let pants = match &config.radii {
            Some(r) => {
                PantsData::legendre(&qs.qstar, config.epsilon, [r.s2, r.s3, r.s4], QSTAR_DEPTH)?
            }
            None => qs.pants()?,
        };
        let periods = compute_periods(&qs.qstar, &pants, config.tolerance("quad"))?;
        Ok(Setup {
            q: qs.qstar.clone(),
            pants,
            periods,
            chart: Chart::Exact,
            qstar: Some(qs),
        })
    }

    /// The differential with the configured coefficients a, b.
    pub fn from_coefficients(config: &ExperimentConfig) -> Result<Self> {
        let q = QuadraticDifferential::new(
            config.a_c64(),
            config.b_c64(),
            1.0,
            PunctureConfig::legendre(config.k)?,
        )?;
        let radii = config
            .radii
            .map(|r| [r.s2, r.s3, r.s4])
            .unwrap_or(DEFAULT_RADII);
        let pants = PantsData::legendre(&q, config.epsilon, radii, QSTAR_DEPTH)?;
        let periods = compute_periods(&q, &pants, config.tolerance("quad"))?;
        Ok(Setup {
            q,
            pants,
            periods,
            chart: Chart::Exact,
            qstar: None,
        })
    }

    pub fn connection(&self, r: f64, holonomy: AbelianHolonomy) -> Result<ModelConnection> {
        ModelConnection::with_periods(
            self.q.with_r(r),
            holonomy,
            self.pants.clone(),
            self.periods.clone(),
            self.chart,
        )
    }

    pub fn inputs<'a>(&'a self, holonomy: &'a AbelianHolonomy) -> PredictionInputs<'a> {
        PredictionInputs {
            periods: &self.periods,
            pants: &self.pants,
            holonomy,
            chart: self.chart,
        }
    }
}

/// Holonomy from the configured phases and orientation signs.
pub fn holonomy(config: &ExperimentConfig, h: [f64; 4]) -> Result<AbelianHolonomy> {
    AbelianHolonomy::with_orientation(h, config.orientation_signs)
        .map_err(|e| Error::Config(e.to_string()))
}

/// One grid point of a convergence experiment.
#[derive(Clone, Debug)]
pub struct ConvergeRow {
    pub r: f64,
    /// None when the prediction is an unbounded limit.
    pub predicted: Option<LogComplex>,
    pub computed: LogComplex,
    pub extra: Vec<f64>,
}

impl ConvergeRow {
    /// ln|computed - predicted|.
    pub fn log_abs_err(&self) -> f64 {
        self.predicted
            .map_or(f64::NAN, |p| (self.computed - p).ln_abs())
    }

    /// |computed / predicted - 1|.
    pub fn rel_err(&self) -> f64 {
        self.predicted.map_or(f64::NAN, |p| {
            let ratio = self.computed / p;
            (ratio - LogComplex::from(C64::new(1.0, 0.0)))
                .ln_abs()
                .exp()
        })
    }
}

fn converge_point(setup: &Setup, prop: Prop, hol: &AbelianHolonomy, r: f64) -> Result<ConvergeRow> {
    let conn = setup.connection(r, *hol)?;
    let inp = setup.inputs(hol);
    match prop {
        Prop::RhXi => {
            let d = conn.circle_data(RH_XI_PUNCTURE);
            if d.r_j == 0.0 {
                return Err(Error::Degenerate(format!(
                    "puncture {RH_XI_PUNCTURE} is nodal"
                )));
            }
            let m = rh_xi(&conn.fiducial, &d)?;
            let predicted = LogComplex::from_polar_log(-d.c(), 0.5 * PI);
            Ok(ConvergeRow {
                r,
                predicted: Some(predicted),
                computed: m.b,
                extra: vec![m.a.ln_abs(), m.d.ln_abs()],
            })
        }
        Prop::L2 | Prop::L3 => {
            let (lp, which) = if prop == Prop::L2 {
                (Loop::Zeta2, LengthIndex::L2)
            } else {
                (Loop::Zeta3, LengthIndex::L3)
            };
            let computed = conn.loop_monodromy(lp)?.trace();
            Ok(ConvergeRow {
                r,
                predicted: Some(predict_l(&inp, r, which)?),
                computed,
                extra: vec![],
            })
        }
        Prop::Twist2 | Prop::Twist3 => {
            let which = if prop == Prop::Twist2 { 2 } else { 3 };
            let ex = conn.coordinates(SqrtBranch::Principal)?;
            let t = if which == 2 {
                ex.coords.twist2
            } else {
                ex.coords.twist3
            };
            let rep = predict_twist(&inp, which)?;
            let predicted = rep.predicted_rate.map(|rate| {
                LogComplex::from_polar_log(rate * r.sqrt(), rep.predicted_phase.unwrap_or(0.0))
            });
            Ok(ConvergeRow {
                r,
                predicted,
                computed: pair_ratio(t),
                extra: vec![ex.shape_residual[which as usize - 2]],
            })
        }
    }
}

/// Computed and predicted values of one quantity along the R grid, in grid order.
pub fn converge(
    setup: &Setup,
    prop: Prop,
    hol: &AbelianHolonomy,
    grid: &[f64],
) -> Result<Vec<ConvergeRow>> {
    grid.par_iter()
        .map(|&r| converge_point(setup, prop, hol, r))
        .collect()
}

/// Rows with R in the top decade of the grid.
pub fn top_decade(rows: &[ConvergeRow]) -> Vec<&ConvergeRow> {
    let top = rows.iter().map(|r| r.r).fold(f64::NEG_INFINITY, f64::max);
    rows.iter()
        .filter(|r| r.r >= 0.1 * top * (1.0 - 1e-12))
        .collect()
}

/// Least-squares slope of ln|value| against sqrt(R).
pub fn sqrt_r_slope<'a>(rows: impl IntoIterator<Item = (&'a ConvergeRow, f64)>) -> f64 {
    let pts: Vec<(f64, f64)> = rows.into_iter().map(|(row, v)| (row.r.sqrt(), v)).collect();
    linfit(&pts).0
}

/// Fitted sqrt(R)-slopes of ln|a| and ln|d| over the top decade and the
/// prediction -(8 - |upsilon|) sqrt(r_j).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RhXiSlopes {
    pub slope_a: f64,
    pub slope_d: f64,
    pub predicted: f64,
}

pub fn rh_xi_slopes(setup: &Setup, rows: &[ConvergeRow]) -> Result<RhXiSlopes> {
    let top = top_decade(rows);
    let conn_r = rows
        .last()
        .ok_or_else(|| Error::Domain("empty grid".into()))?
        .r;
    let d = setup
        .connection(conn_r, AbelianHolonomy::default())?
        .circle_data(RH_XI_PUNCTURE);
    Ok(RhXiSlopes {
        slope_a: sqrt_r_slope(top.iter().map(|r| (*r, r.extra[0]))),
        slope_d: sqrt_r_slope(top.iter().map(|r| (*r, r.extra[1]))),
        predicted: -(8.0 - d.upsilon.abs()) * d.r_j.sqrt(),
    })
}

/// Fitted sqrt(R)-rate of ln|computed| over the top decade.
pub fn fitted_rate(rows: &[ConvergeRow]) -> f64 {
    sqrt_r_slope(
        top_decade(rows)
            .into_iter()
            .map(|r| (r, r.computed.ln_abs())),
    )
}

/// The tracked coordinates (l_2, p_2/q_2, l_3, p_3/q_3) at one holonomy.
#[derive(Clone, Copy, Debug)]
pub struct WindingRow {
    pub phase: f64,
    pub values: [LogComplex; 4],
}

/// Labels of the tracked coordinates and the holonomy index whose phase
/// each one is predicted to follow.
pub const TRACKED: [(&str, usize); 4] = [("l2", 0), ("twist2", 2), ("l3", 1), ("twist3", 3)];

/// Sweep of phase `index` (0-based, h_1..h_4) over [0, 2 pi] in `samples`
/// steps at fixed R; the last row closes the loop.
pub fn winding_sweep(
    setup: &Setup,
    base: &AbelianHolonomy,
    index: usize,
    r: f64,
    samples: usize,
) -> Result<Vec<WindingRow>> {
    if index > 3 {
        return Err(Error::Domain(format!(
            "holonomy index must be 0..3, got {index}"
        )));
    }
    if samples < 4 {
        return Err(Error::Domain(
            "winding sweep needs at least 4 samples".into(),
        ));
    }
    let conn = setup.connection(r, *base)?;
    (0..=samples)
        .into_par_iter()
        .map(|k| {
            let phase = TAU * k as f64 / samples as f64;
            let mut h = base.h;
            h[index] = base.h[index] + phase;
            let hol = AbelianHolonomy::with_orientation(h, base.orientation_signs)?;
            let c = conn
                .with_holonomy(hol)
                .coordinates(SqrtBranch::Principal)?
                .coords;
            Ok(WindingRow {
                phase,
                values: [c.l2, pair_ratio(c.twist2), c.l3, pair_ratio(c.twist3)],
            })
        })
        .collect()
}

/// Winding number (turns) of each tracked coordinate and its largest phase
/// excursion from the starting value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WindingSummary {
    pub windings: [f64; 4],
    pub max_excursion: [f64; 4],
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

pub fn winding_summary(rows: &[WindingRow]) -> WindingSummary {
    let mut windings = [0.0; 4];
    let mut max_excursion = [0.0; 4];
    for i in 0..4 {
        let ph: Vec<f64> = rows.iter().map(|r| r.values[i].arg()).collect();
        windings[i] = crate::asymptotics::winding_of(&ph);
        max_excursion[i] = ph.iter().map(|p| wrap(p - ph[0]).abs()).fold(0.0, f64::max);
    }
    WindingSummary {
        windings,
        max_excursion,
    }
}

/// Everything known about the model connection at one R.
#[derive(Clone, Debug, Serialize)]
pub struct MonodromyReport {
    pub r: f64,
    pub holonomy: [f64; 4],
    pub coords: FNCoordsJson,
    pub predicted_l2: JsonComplex,
    pub predicted_l3: JsonComplex,
    pub twist2_case: Option<TwistCaseReport>,
    pub twist3_case: Option<TwistCaseReport>,
    pub shape_residual: [f64; 2],
    pub relation_residual: f64,
    pub predicted_phases: [[f64; 2]; 4],
}

pub fn monodromy_report(setup: &Setup, hol: &AbelianHolonomy, r: f64) -> Result<MonodromyReport> {
    let conn = setup.connection(r, *hol)?;
    let ex = conn.coordinates(SqrtBranch::Principal)?;
    let inp = setup.inputs(hol);
    let sys = conn.pants_system()?;
    Ok(MonodromyReport {
        r,
        holonomy: hol.h,
        coords: ex.coords.to_json(),
        predicted_l2: JsonComplex::from_scalar(predict_l(&inp, r, LengthIndex::L2)?),
        predicted_l3: JsonComplex::from_scalar(predict_l(&inp, r, LengthIndex::L3)?),
        twist2_case: predict_twist(&inp, 2).ok(),
        twist3_case: predict_twist(&inp, 3).ok(),
        shape_residual: ex.shape_residual,
        relation_residual: sys.relation_residual(),
        predicted_phases: phase_predictions(hol).map(|z| [z.re, z.im]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        vec![100.0, 300.0, 1000.0]
    }

    #[test]
    fn lengths_approach_prediction() {
        let setup = Setup::qstar(&ExperimentConfig::default()).unwrap();
        let h = AbelianHolonomy::new([0.4, 1.1, 0.0, 0.0]);
        for prop in [Prop::L2, Prop::L3] {
            let rows = converge(&setup, prop, &h, &grid()).unwrap();
            assert_eq!(rows.iter().map(|r| r.r).collect::<Vec<_>>(), grid());
            assert!(rows.last().unwrap().rel_err() < 1e-6, "{prop:?}");
            assert!(rows.windows(2).all(|w| w[1].rel_err() <= w[0].rel_err()));
        }
    }

    #[test]
    fn rh_xi_entries() {
        let setup = Setup::qstar(&ExperimentConfig::default()).unwrap();
        let rows = converge(&setup, Prop::RhXi, &AbelianHolonomy::default(), &grid()).unwrap();
        for r in &rows {
            assert!(r.rel_err() < 0.05, "{}", r.rel_err());
            assert!(r.extra[0] < 0.0 && (r.extra[0] - r.extra[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn winding_summary_counts_turns() {
        let rows: Vec<WindingRow> = (0..=16)
            .map(|k| {
                let p = TAU * k as f64 / 16.0;
                let v = [
                    LogComplex::from_polar_log(0.0, p),
                    LogComplex::from_polar_log(3.0, 0.2),
                    LogComplex::from_polar_log(0.0, -2.0 * p),
                    LogComplex::from(C64::new(1.0, 0.0)),
                ];
                WindingRow {
                    phase: p,
                    values: v,
                }
            })
            .collect();
        let s = winding_summary(&rows);
        assert!((s.windings[0] - 1.0).abs() < 1e-12);
        assert!((s.windings[2] + 2.0).abs() < 1e-12);
        assert_eq!(s.windings[1], 0.0);
        assert_eq!(s.max_excursion[3], 0.0);
    }

    #[test]
    fn top_decade_selection() {
        let rows: Vec<ConvergeRow> = [1.0, 5.0, 10.0, 50.0, 100.0]
            .iter()
            .map(|&r| ConvergeRow {
                r,
                predicted: None,
                computed: LogComplex::from_polar_log(2.0 * r.sqrt(), 0.0),
                extra: vec![],
            })
            .collect();
        assert_eq!(top_decade(&rows).len(), 3);
        assert!((fitted_rate(&rows) - 2.0).abs() < 1e-12);
    }
}
