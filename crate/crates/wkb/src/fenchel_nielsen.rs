//! Complex length and twist coordinates: Simpson scalars, normalization of the
//! pants restrictions, gluing comparisons, extraction and the inverse
//! construction. Generic over `C64` and `LogComplex` entries.

use crate::error::{Error, Result};
use crate::numerics::{LogComplex, Scalar, C64, I, M2};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_4;

/// Boundary eigenvalues c^+ = i, c^- = -i.
pub const C_PLUS: C64 = C64::new(0.0, 1.0);
pub const C_MINUS: C64 = C64::new(0.0, -1.0);

/// Choice of A^{1/2} for A = diag(i, -i).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqrtBranch {
    /// diag(e^{i pi/4}, e^{-i pi/4}).
    #[default]
    Principal,
    /// diag(e^{i pi/4}, -e^{-i pi/4}). Build and extraction invert each other
    /// on this branch, but the built gluing does not satisfy the middle pants
    /// relation for twist-shaped Q.
    Alternate,
}

impl SqrtBranch {
    pub fn sqrt_a<S: Scalar>(self) -> M2<S> {
        let s = if self == SqrtBranch::Principal {
            1.0
        } else {
            -1.0
        };
        M2::diag(
            S::from_c64(C64::from_polar(1.0, FRAC_PI_4)),
            S::from_c64(s * C64::from_polar(1.0, -FRAC_PI_4)),
        )
    }
    pub fn inv_sqrt_a<S: Scalar>(self) -> M2<S> {
        let s = if self == SqrtBranch::Principal {
            1.0
        } else {
            -1.0
        };
        M2::diag(
            S::from_c64(C64::from_polar(1.0, -FRAC_PI_4)),
            S::from_c64(s * C64::from_polar(1.0, FRAC_PI_4)),
        )
    }
}

/// Simpson scalars for i = 2, 3, 4.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimpsonScalars<S> {
    pub u: [S; 3],
    pub w: [S; 3],
}

/// u_i = (l_{i-1} - c^- l_i)/(c^+ - c^-), w_i = u_i (l_i - u_i) - 1.
pub fn simpson_scalars<S: Scalar>(l: [S; 4]) -> SimpsonScalars<S> {
    let cp = S::from_c64(C_PLUS);
    let cm = S::from_c64(C_MINUS);
    let u: [S; 3] = std::array::from_fn(|k| (l[k] - cm * l[k + 1]) / (cp - cm));
    let w = std::array::from_fn(|k| u[k] * (l[k + 1] - u[k]) - S::one());
    SimpsonScalars { u, w }
}

fn unipotent<S: Scalar>(u: S) -> M2<S> {
    M2::new(S::one(), S::zero(), u, S::one())
}

fn std_r<S: Scalar>(u: S, w: S, l: S) -> M2<S> {
    M2::new(u, S::one(), w, l - u)
}

fn a_matrix<S: Scalar>() -> M2<S> {
    M2::diag(S::from_c64(C_PLUS), S::from_c64(C_MINUS))
}

fn max_entry<S: Scalar>(m: &M2<S>) -> S {
    let e = m.entries();
    let mut best = e[0];
    for x in e {
        if x.ln_abs() > best.ln_abs() {
            best = x;
        }
    }
    best
}

/// Eigenvectors of m for the known eigenvalues (lambda_+, lambda_-), each of
/// the form (b, lambda - a) or (lambda - d, c). One form is used for both
/// when it gives two non-negligible vectors, so that the eigenvector
/// determinant has no cancellation; otherwise each takes the larger form.
fn eigenvectors<S: Scalar>(m: &M2<S>, lp: S, lm: S) -> ([S; 2], [S; 2]) {
    let f1 = |l: S| [m.b, l - m.a];
    let f2 = |l: S| [l - m.d, m.c];
    let size = |v: &[S; 2]| v[0].ln_abs().max(v[1].ln_abs());
    let floor = m.max_ln_abs() - 30.0;
    let (pp, pm) = if m.b.ln_abs() >= m.c.ln_abs() {
        (f1(lp), f1(lm))
    } else {
        (f2(lp), f2(lm))
    };
    if size(&pp) > floor && size(&pm) > floor {
        return (pp, pm);
    }
    let best = |l: S| {
        let (u, v) = (f1(l), f2(l));
        if size(&u) >= size(&v) {
            u
        } else {
            v
        }
    };
    (best(lp), best(lm))
}

/// The isomorphism h with h xi h^-1 = diag(i, -i) and (h n h^-1)_{12} =
/// `target`, largest entry scaled to 1. The eigenvalues of `xi` are taken to
/// be the boundary values +-i.
pub fn normalize_pants<S: Scalar>(xi: &M2<S>, n: &M2<S>, target: C64) -> Result<M2<S>> {
    let (vp, vm) = eigenvectors(xi, S::from_c64(C_PLUS), S::from_c64(C_MINUS));
    let g = M2::new(vp[0], vm[0], vp[1], vm[1]);
    let det = g.det();
    let scale = (vp[0] * vm[1]).ln_abs().max((vm[0] * vp[1]).ln_abs());
    if !(det.ln_abs() - scale > -30.0) {
        return Err(Error::EigenCollision(
            "eigenvectors of the boundary monodromy are parallel".into(),
        ));
    }
    let gi = g.inv();
    let k = gi * *n * g;
    if !(k.b.ln_abs() - k.max_ln_abs() > -30.0) {
        return Err(Error::Reducible(
            "restriction preserves an eigenline".into(),
        ));
    }
    let r = S::from_c64(target) / k.b;
    let h = M2::diag(r, S::one()) * gi;
    let top = max_entry(&h);
    Ok(h.scale(S::one() / top))
}

/// Projective pair [p : q] of a matrix proportional to [[p, q], [-q, p + l q]].
pub fn twist_from_q<S: Scalar>(q: &M2<S>, l: S, tol: f64) -> Result<[S; 2]> {
    let res = shape_residual(q, l);
    if !(res <= tol) {
        return Err(Error::ShapeViolation(res));
    }
    Ok([q.a, q.b])
}

/// Deviation from the twist shape relative to the largest entry.
pub fn shape_residual<S: Scalar>(q: &M2<S>, l: S) -> f64 {
    let top = q.max_ln_abs();
    let r1 = (q.c + q.b).ln_abs();
    let r2 = (q.d - q.a - l * q.b).ln_abs();
    (r1.max(r2) - top).exp()
}

/// Representation restricted to the three pants. `xi[j]` is the monodromy
/// around the puncture t_j read at its pants base point, `rho2` at x_2,
/// `rho3` at x_4, `psi` the gluing transports x_2 -> x_3 -> x_4. The
/// relations are xi_1 = xi_2 rho_2, psi_2 rho_2 psi_2^-1 = xi_3 rho_3(x_3),
/// rho_3 = xi_4 xi_0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PantsSystem<S> {
    pub xi: [M2<S>; 5],
    pub rho2: M2<S>,
    pub rho3: M2<S>,
    pub psi: [M2<S>; 2],
}

impl<S: Scalar> PantsSystem<S> {
    pub fn rho2_at_x3(&self) -> M2<S> {
        self.psi[0] * self.rho2 * self.psi[0].inv()
    }

    pub fn rho3_at_x3(&self) -> M2<S> {
        self.psi[1].inv() * self.rho3 * self.psi[1]
    }

    /// Largest relative violation of the three pants relations.
    pub fn relation_residual(&self) -> f64 {
        let r1 = (self.xi[2] * self.rho2).rel_diff(&self.xi[1]);
        let r2 = (self.xi[3] * self.rho3_at_x3()).rel_diff(&self.rho2_at_x3());
        let r3 = (self.xi[4] * self.xi[0]).rel_diff(&self.rho3);
        r1.max(r2).max(r3)
    }

    /// g M g^-1 on every generator.
    pub fn conjugated(&self, g: &M2<S>) -> Self {
        let gi = g.inv();
        let c = |m: &M2<S>| *g * *m * gi;
        PantsSystem {
            xi: std::array::from_fn(|j| c(&self.xi[j])),
            rho2: c(&self.rho2),
            rho3: c(&self.rho3),
            psi: [c(&self.psi[0]), c(&self.psi[1])],
        }
    }

    pub fn to_log(&self) -> PantsSystem<LogComplex> {
        let f = |m: &M2<S>| m.map(|x| LogComplex::from(x.to_c64()));
        PantsSystem {
            xi: std::array::from_fn(|j| f(&self.xi[j])),
            rho2: f(&self.rho2),
            rho3: f(&self.rho3),
            psi: [f(&self.psi[0]), f(&self.psi[1])],
        }
    }
}

/// Lengths and twists. Twists are projective pairs [p : q].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FNCoords<S> {
    pub l2: S,
    pub l3: S,
    pub twist2: [S; 2],
    pub twist3: [S; 2],
}

/// Intermediate data of an extraction, kept for diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct Extraction<S> {
    pub coords: FNCoords<S>,
    pub h: [M2<S>; 3],
    pub q: [M2<S>; 2],
    /// Twist-shape residuals of Q_2, Q_3.
    pub shape_residual: [f64; 2],
}

/// Lengths from traces, twists from Q_{i-1} = A^{-1/2} U_i P_{i-1} U_{i-1}^-1
/// with P_{i-1} = h_i psi_{i-1} h_{i-1}^-1.
pub fn extract<S: Scalar>(sys: &PantsSystem<S>, branch: SqrtBranch) -> Result<Extraction<S>> {
    let l2 = sys.rho2.trace();
    let l3 = sys.rho3.trace();
    let h2 = normalize_pants(&sys.xi[2], &sys.xi[1], C_PLUS)?;
    let h3 = normalize_pants(&sys.xi[3], &sys.rho2_at_x3(), C_PLUS)?;
    let h4 = normalize_pants(&sys.xi[4], &sys.xi[0], C64::new(1.0, 0.0))?;
    let p2 = h3 * sys.psi[0] * h2.inv();
    let p3 = h4 * sys.psi[1] * h3.inv();
    let s = simpson_scalars([S::zero(), l2, l3, S::zero()]);
    let ai = branch.inv_sqrt_a::<S>();
    let q2 = ai * unipotent(s.u[1]) * p2 * unipotent(-s.u[0]);
    let q3 = ai * unipotent(s.u[2]) * p3 * unipotent(-s.u[1]);
    let twist2 = [q2.a, q2.b];
    let twist3 = [q3.d - l3 * q3.b, q3.b];
    Ok(Extraction {
        coords: FNCoords {
            l2,
            l3,
            twist2,
            twist3,
        },
        h: [h2, h3, h4],
        q: [q2, q3],
        shape_residual: [shape_residual(&q2, l2), shape_residual(&q3, l3)],
    })
}

pub fn extract_coords<S: Scalar>(sys: &PantsSystem<S>, branch: SqrtBranch) -> Result<FNCoords<S>> {
    Ok(extract(sys, branch)?.coords)
}

/// Minimal distance of the coordinates from the excluded loci l = +-2 and
/// p^2 + l p q + q^2 = 0 (pairs scaled to unit norm).
pub fn domain_margin(c: &FNCoords<C64>) -> f64 {
    let pair = |t: [C64; 2], l: C64| {
        let n = (t[0].norm_sqr() + t[1].norm_sqr()).sqrt();
        let (p, q) = (t[0] / n, t[1] / n);
        (p * p + l * p * q + q * q).norm() / (1.0 + l.norm())
    };
    [
        (c.l2 - 2.0).norm(),
        (c.l2 + 2.0).norm(),
        (c.l3 - 2.0).norm(),
        (c.l3 + 2.0).norm(),
        pair(c.twist2, c.l2),
        pair(c.twist3, c.l3),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

/// Standard generators with xi_j = A and gluing transports
/// psi_{i-1} = U_i^-1 A^{1/2} Q_{i-1} U_{i-1}, Q in twist shape with det 1.
pub fn build_representation(c: &FNCoords<C64>, branch: SqrtBranch) -> Result<PantsSystem<C64>> {
    let margin = domain_margin(c);
    if !(margin > 1e-12) {
        return Err(Error::Domain(format!(
            "coordinates outside the domain (margin {margin:e})"
        )));
    }
    let zero = C64::new(0.0, 0.0);
    let s = simpson_scalars([zero, c.l2, c.l3, zero]);
    let l = [c.l2, c.l3, zero];
    let r: [M2<C64>; 3] = std::array::from_fn(|k| std_r(s.u[k], s.w[k], l[k]));
    let a = a_matrix::<C64>();
    let qmat = |t: [C64; 2], l: C64| {
        let m = M2::new(t[0], t[1], -t[1], t[0] + l * t[1]);
        m.scale(C64::new(1.0, 0.0) / m.det().sqrt())
    };
    let q2 = qmat(c.twist2, c.l2);
    let q3 = qmat(c.twist3, c.l3);
    let ah = branch.sqrt_a::<C64>();
    let psi2 = unipotent(-s.u[1]) * ah * q2 * unipotent(s.u[0]);
    let psi3 = unipotent(-s.u[2]) * ah * q3 * unipotent(s.u[1]);
    Ok(PantsSystem {
        xi: [r[2], a * r[0], a, a, a],
        rho2: r[0],
        rho3: a * r[2],
        psi: [psi2, psi3],
    })
}

/// |p q' - q p'| / (|(p, q)| |(p', q')|), overflow-safe.
pub fn projective_distance<S: Scalar>(x: [S; 2], y: [S; 2]) -> f64 {
    let nx = x[0].ln_abs().max(x[1].ln_abs());
    let ny = y[0].ln_abs().max(y[1].ln_abs());
    let cross = x[0] * y[1] - x[1] * y[0];
    (cross.ln_abs() - nx - ny).exp()
}

/// Ratio p/q as a log-form number.
pub fn pair_ratio<S: Scalar>(t: [S; 2]) -> LogComplex {
    LogComplex::from_polar_log(t[0].ln_abs() - t[1].ln_abs(), t[0].arg() - t[1].arg())
}

/// Complex value in JSON: [re, im], or log magnitude and phase when out of
/// double range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonComplex {
    Plain([f64; 2]),
    Log {
        form: LogForm,
        log_abs: f64,
        phase: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogForm {
    Log,
}

/// |ln|z|| beyond which values are written in log form.
pub const LOG_FORM_THRESHOLD: f64 = 600.0;

impl JsonComplex {
    pub fn from_scalar<S: Scalar>(z: S) -> Self {
        let la = z.ln_abs();
        if la.is_finite() && la.abs() > LOG_FORM_THRESHOLD {
            JsonComplex::Log {
                form: LogForm::Log,
                log_abs: la,
                phase: z.arg(),
            }
        } else {
            let v = z.to_c64();
            JsonComplex::Plain([v.re, v.im])
        }
    }

    pub fn to_log(self) -> LogComplex {
        match self {
            JsonComplex::Plain([re, im]) => LogComplex::from(C64::new(re, im)),
            JsonComplex::Log { log_abs, phase, .. } => LogComplex::from_polar_log(log_abs, phase),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FNCoordsJson {
    pub l2: JsonComplex,
    pub l3: JsonComplex,
    pub twist2: [JsonComplex; 2],
    pub twist3: [JsonComplex; 2],
}

impl<S: Scalar> FNCoords<S> {
    /// Twist pairs rescaled so that the larger entry has modulus 1.
    pub fn normalized_pairs(&self) -> Self {
        let n = |t: [S; 2]| {
            let top = if t[0].ln_abs() >= t[1].ln_abs() {
                t[0].ln_abs()
            } else {
                t[1].ln_abs()
            };
            let f = S::from_c64(C64::new(1.0, 0.0)) / S::from_log(top);
            [t[0] * f, t[1] * f]
        };
        FNCoords {
            l2: self.l2,
            l3: self.l3,
            twist2: n(self.twist2),
            twist3: n(self.twist3),
        }
    }

    pub fn to_json(&self) -> FNCoordsJson {
        let c = self.normalized_pairs();
        let j = JsonComplex::from_scalar;
        FNCoordsJson {
            l2: j(c.l2),
            l3: j(c.l3),
            twist2: c.twist2.map(j),
            twist3: c.twist3.map(j),
        }
    }

    pub fn to_log(&self) -> FNCoords<LogComplex> {
        let f = |x: S| LogComplex::from_polar_log(x.ln_abs(), x.arg());
        FNCoords {
            l2: f(self.l2),
            l3: f(self.l3),
            twist2: self.twist2.map(f),
            twist3: self.twist3.map(f),
        }
    }

    /// Largest of the length differences (relative) and twist projective
    /// distances.
    pub fn distance(&self, other: &Self) -> f64 {
        let rel = |a: S, b: S| {
            let top = a.ln_abs().max(b.ln_abs()).max(0.0);
            ((a - b).ln_abs() - top).exp()
        };
        rel(self.l2, other.l2)
            .max(rel(self.l3, other.l3))
            .max(projective_distance(self.twist2, other.twist2))
            .max(projective_distance(self.twist3, other.twist3))
    }
}

impl FNCoordsJson {
    pub fn to_coords(&self) -> FNCoords<LogComplex> {
        FNCoords {
            l2: self.l2.to_log(),
            l3: self.l3.to_log(),
            twist2: self.twist2.map(|z| z.to_log()),
            twist3: self.twist3.map(|z| z.to_log()),
        }
    }
}

/// e^{i h}.
pub fn phase(h: f64) -> C64 {
    (I * h).exp()
}
