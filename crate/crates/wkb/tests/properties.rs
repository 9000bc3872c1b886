mod common;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use std::f64::consts::TAU;
use wkb::asymptotics::{phase_predictions, winding_of};
use wkb::fenchel_nielsen::{
    build_representation, domain_margin, extract_coords, simpson_scalars, FNCoords, SqrtBranch,
};
use wkb::hitchin_base::{sheet_parity, PunctureConfig, QuadraticDifferential};
use wkb::numerics::{expm_neg_symmetric, LogComplex, Mat2, ParamPath};
use wkb::transport::AbelianHolonomy;

fn cplx(r: f64) -> impl Strategy<Value = C> {
    (-r..r, -r..r).prop_map(|(a, b)| C::new(a, b))
}

fn coords() -> impl Strategy<Value = FNCoords<C>> {
    (
        cplx(4.0),
        cplx(4.0),
        cplx(3.0),
        cplx(3.0),
        cplx(3.0),
        cplx(3.0),
    )
        .prop_map(|(l2, l3, p2, q2, p3, q3)| FNCoords {
            l2,
            l3,
            twist2: [p2, q2],
            twist3: [p3, q3],
        })
        .prop_filter("inside the domain", |c| {
            domain_margin(c) > 1e-2 && c.twist2[1].norm() > 1e-2 && c.twist3[1].norm() > 1e-2
        })
}

fn det(m: &Mat2) -> C {
    m.a * m.d - m.b * m.c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn build_extract_roundtrip(c in coords(), alt in any::<bool>()) {
        let branch = if alt { SqrtBranch::Alternate } else { SqrtBranch::Principal };
        let sys = build_representation(&c, branch).unwrap();
        if branch == SqrtBranch::Principal {
            prop_assert!(sys.relation_residual() < 1e-10, "{}", sys.relation_residual());
        }
        let back = extract_coords(&sys, branch).unwrap();
        prop_assert!(back.distance(&c) < 1e-9, "{}", back.distance(&c));
    }

    #[test]
    fn extraction_is_conjugation_invariant(c in coords(), g in (cplx(2.0), cplx(2.0), cplx(2.0))) {
        let (a, b, cc) = g;
        let d = (C::new(1.0, 0.0) + b * cc) / a;
        prop_assume!(a.norm() > 0.2 && d.norm() < 20.0);
        let gm = wkb::numerics::M2::new(a, b, cc, d);
        let sys = build_representation(&c, SqrtBranch::Principal).unwrap();
        let back = extract_coords(&sys.conjugated(&gm), SqrtBranch::Principal).unwrap();
        prop_assert!(back.distance(&c) < 1e-7, "{}", back.distance(&c));
    }

    #[test]
    fn symmetric_exponential_determinant(a in cplx(3.0), b in cplx(3.0), c in cplx(3.0)) {
        let m = expm_neg_symmetric(a, b, c);
        let want = (-2.0 * a).exp();
        prop_assert!((det(&m) - want).norm() <= 1e-10 * (1.0 + m.a.norm() + m.b.norm()).powi(2));
        prop_assert!((m.b - m.c).norm() <= 1e-12 * (1.0 + m.b.norm()));
    }

    #[test]
    fn log_complex_matches_c64(x in cplx(50.0), y in cplx(50.0)) {
        let (lx, ly) = (LogComplex::from(x), LogComplex::from(y));
        let close = |a: LogComplex, b: C| (a.to_c64() - b).norm() <= 1e-12 * (1.0 + b.norm().max(x.norm() * y.norm()));
        prop_assert!(close(lx + ly, x + y));
        prop_assert!(close(lx - ly, x - y));
        prop_assert!(close(lx * ly, x * y));
        prop_assume!(y.norm() > 1e-3);
        prop_assert!(((lx / ly).to_c64() - x / y).norm() <= 1e-12 * (1.0 + (x / y).norm()));
    }

    #[test]
    fn log_complex_exp_is_additive(x in cplx(800.0), y in cplx(800.0)) {
        let p = LogComplex::exp(x) * LogComplex::exp(y);
        let q = LogComplex::exp(x + y);
        prop_assert!((p.ln_abs() - q.ln_abs()).abs() < 1e-9);
        prop_assert!((((p.arg() - q.arg()) + 1.0).rem_euclid(TAU) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn phase_predictions_periodic(h in prop::array::uniform4(-10.0..10.0f64), j in 0usize..4) {
        let mut g = h;
        g[j] += TAU;
        let a = phase_predictions(&AbelianHolonomy::new(h));
        let b = phase_predictions(&AbelianHolonomy::new(g));
        for k in 0..4 {
            prop_assert!((a[k] - b[k]).norm() < 1e-12);
            prop_assert!((a[k].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn winding_counts_turns(n in -3i32..=3, start in 0.0..TAU, samples in 16usize..80) {
        let phases: Vec<f64> = (0..=samples).map(|k| start + n as f64 * TAU * k as f64 / samples as f64).collect();
        prop_assert!((winding_of(&phases) - n as f64).abs() < 1e-9);
    }

    #[test]
    fn simpson_scalars_formula(l in prop::array::uniform4(cplx(5.0))) {
        let s = simpson_scalars(l);
        let i = C::new(0.0, 1.0);
        for k in 0..3 {
            let u = (l[k] + i * l[k + 1]) / (2.0 * i);
            prop_assert!((s.u[k] - u).norm() < 1e-12 * (1.0 + u.norm()));
            let w = u * (l[k + 1] - u) - 1.0;
            prop_assert!((s.w[k] - w).norm() < 1e-11 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn sheet_parity_counts_windings(center in cplx(2.0), rad in 0.1..3.0f64, turns in 1usize..3) {
        let q = QuadraticDifferential::new(C::new(1.0, 0.0), C::new(0.3, 0.1), 1.0, PunctureConfig::legendre(0.5).unwrap()).unwrap();
        let bps = q.branch_points();
        prop_assume!(bps.iter().all(|(p, _)| ((p - center).norm() - rad).abs() > 0.05));
        let mut pts = Vec::new();
        let n = 48 * turns;
        for k in 0..=n {
            pts.push(if k == n { pts[0] } else { center + C::from_polar(rad, TAU * k as f64 / 48.0) });
        }
        let expected: i64 = bps.iter().map(|(p, m)| *m as i64 * common::winding(&pts, *p)).sum::<i64>().rem_euclid(2);
        let path = ParamPath::new(pts).unwrap();
        prop_assert_eq!(sheet_parity(&path, &q).unwrap() as i64, expected);
        prop_assert_eq!(sheet_parity(&path.reversed(), &q).unwrap() as i64, expected);
    }
}
