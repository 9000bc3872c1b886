use crate::output::{complex_fields, num, write_json, Table};
use crate::{At, CliError, Command, KindArg};
use serde::Serialize;
use std::path::PathBuf;
use wkb::asymptotics::find_qstar;
use wkb::config::ExperimentConfig;
use wkb::experiments::{
    converge, fitted_rate, holonomy, monodromy_report, rh_xi_slopes, winding_summary,
    winding_sweep, Prop, Setup, TRACKED,
};
use wkb::fiducial::{FiducialKind, FiducialSolution};
use wkb::hitchin_base::PunctureConfig;
use wkb::numerics::C64;
use wkb::periods::{legendre_period_closed_form, LegendreDifference, PeriodSet};

fn setup(config: &ExperimentConfig, at: At) -> Result<Setup, CliError> {
    Ok(match at {
        At::Coefficients => Setup::from_coefficients(config)?,
        At::Qstar => Setup::qstar(config)?,
    })
}

fn first_holonomy(config: &ExperimentConfig) -> Result<wkb::transport::AbelianHolonomy, CliError> {
    Ok(holonomy(
        config,
        config.holonomies.first().copied().unwrap_or([0.0; 4]),
    )?)
}

#[derive(Serialize)]
struct PeriodsOut {
    a: C64,
    b: C64,
    periods: PeriodSet,
    pi1_minus_pi2: C64,
    pi0_minus_pi4: C64,
    closed_form_pi1_minus_pi2: f64,
    closed_form_pi0_minus_pi4: f64,
}

pub fn run(
    cmd: &Command,
    config: &ExperimentConfig,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    match cmd {
        Command::Periods => {
            let s = Setup::from_coefficients(config)?;
            let p = &s.periods;
            let res = PeriodsOut {
                a: s.q.a,
                b: s.q.b,
                pi1_minus_pi2: p.pi1_minus_pi2(),
                pi0_minus_pi4: p.pi0_minus_pi4(),
                closed_form_pi1_minus_pi2: legendre_period_closed_form(
                    config.k,
                    LegendreDifference::P1MinusP2,
                )?,
                closed_form_pi0_minus_pi4: legendre_period_closed_form(
                    config.k,
                    LegendreDifference::P0MinusP4,
                )?,
                periods: p.clone(),
            };
            write_json(out, config, "periods", &res)
        }
        Command::Fiducial { r, kind } => {
            if !(*r > 0.0 && r.is_finite()) {
                return Err(CliError::Config(format!("--r must be positive, got {r}")));
            }
            let k = match kind {
                KindArg::Logarithmic => FiducialKind::Logarithmic,
                KindArg::Ramification => FiducialKind::Ramification,
            };
            let sol = FiducialSolution::solve_default(k, *r)?;
            let mut t = Table::new(vec!["r".into(), "m".into(), "r_dm_dr".into()]);
            for i in 0..sol.grid.len() {
                t.rows
                    .push(vec![num(sol.grid[i]), num(sol.m[i]), num(sol.rdm[i])]);
            }
            t.write(out, config, &format!("fiducial r={r} kind={kind:?}"))
        }
        Command::Monodromy { r, at } => {
            if !(*r > 0.0 && r.is_finite()) {
                return Err(CliError::Config(format!("--r must be positive, got {r}")));
            }
            let s = setup(config, *at)?;
            let rep = monodromy_report(&s, &first_holonomy(config)?, *r)?;
            write_json(out, config, "monodromy", &rep)
        }
        Command::Converge { prop, at } => {
            let prop: Prop = (*prop).into();
            let at = at.unwrap_or(match prop {
                Prop::Twist2 | Prop::Twist3 => At::Qstar,
                _ => At::Coefficients,
            });
            let s = setup(config, at)?;
            let hol = first_holonomy(config)?;
            let rows = converge(&s, prop, &hol, &config.r_grid.values())?;
            let mut header: Vec<String> = [
                "R",
                "predicted_re",
                "predicted_im",
                "predicted_log_abs",
                "predicted_phase",
                "computed_re",
                "computed_im",
                "computed_log_abs",
                "computed_phase",
                "abs_err",
                "log_abs_err",
                "rel_err",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            header.extend(prop.extra_names().iter().map(|s| s.to_string()));
            let mut t = Table::new(header);
            for row in &rows {
                let [pr, pi, pl, pp] = complex_fields(row.predicted);
                let [cr, ci, cl, cp] = complex_fields(Some(row.computed));
                let lae = row.log_abs_err();
                let mut rec = vec![
                    num(row.r),
                    pr,
                    pi,
                    pl,
                    pp,
                    cr,
                    ci,
                    cl,
                    cp,
                    num(lae.exp()),
                    num(lae),
                    num(row.rel_err()),
                ];
                rec.extend(row.extra.iter().map(|&x| num(x)));
                t.rows.push(rec);
            }
            match prop {
                Prop::RhXi => {
                    let sl = rh_xi_slopes(&s, &rows)?;
                    eprintln!(
                        "sqrt(R) slopes over the top decade: a {} d {} predicted {}",
                        sl.slope_a, sl.slope_d, sl.predicted
                    );
                }
                Prop::Twist2 | Prop::Twist3 => eprintln!(
                    "fitted sqrt(R) rate over the top decade: {}",
                    fitted_rate(&rows)
                ),
                _ => {}
            }
            t.write(
                out,
                config,
                &format!("converge prop={} at={at:?}", prop.name()),
            )
        }
        Command::FindQstar => {
            let r = find_qstar(&PunctureConfig::legendre(config.k)?, config.epsilon)?;
            write_json(out, config, "find-qstar", &r)
        }
        Command::Winding {
            phase,
            r,
            samples,
            at,
        } => {
            if !(*r > 0.0 && r.is_finite()) {
                return Err(CliError::Config(format!("--r must be positive, got {r}")));
            }
            let s = setup(config, *at)?;
            let base = first_holonomy(config)?;
            let rows = winding_sweep(&s, &base, *phase as usize - 1, *r, *samples)?;
            let mut header = vec!["phase".to_string()];
            for (name, _) in TRACKED {
                header.push(format!("{name}_log_abs"));
                header.push(format!("{name}_phase"));
            }
            let mut t = Table::new(header);
            for row in &rows {
                let mut rec = vec![num(row.phase)];
                for v in &row.values {
                    let f = complex_fields(Some(*v));
                    rec.push(f[2].clone());
                    rec.push(f[3].clone());
                }
                t.rows.push(rec);
            }
            let sm = winding_summary(&rows);
            eprintln!(
                "windings {:?} max phase excursion {:?}",
                sm.windings, sm.max_excursion
            );
            t.write(
                out,
                config,
                &format!("winding phase=h{phase} r={r} samples={samples} at={at:?}"),
            )
        }
    }
}
