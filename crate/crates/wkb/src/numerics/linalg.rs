//! 2x2 complex matrices over plain and log-magnitude scalars, and the
//! closed-form exponential of a symmetric 2x2 block.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type C64 = Complex64;
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Complex number stored as mantissa times e^{exponent}. Never overflows;
/// precision is that of the mantissa.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub mantissa: C64,
    pub exponent: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        mantissa: C64::new(0.0, 0.0),
        exponent: 0.0,
    };

    pub fn new(mantissa: C64, exponent: f64) -> Self {
        let mut z = LogComplex { mantissa, exponent };
        z.normalize();
        z
    }

    /// e^z without overflow.
    pub fn exp(z: C64) -> Self {
        LogComplex {
            mantissa: C64::from_polar(1.0, z.im),
            exponent: z.re,
        }
    }

    fn normalize(&mut self) {
        let s = self.mantissa.norm();
        if s == 0.0 || !s.is_finite() {
            if s == 0.0 {
                self.exponent = 0.0;
            }
            return;
        }
        if !(0.5..=2.0).contains(&s) {
            self.mantissa /= s;
            self.exponent += s.ln();
        }
    }

    /// e^{ln_abs + i arg}; zero for ln_abs = -inf.
    pub fn from_polar_log(ln_abs: f64, arg: f64) -> Self {
        if ln_abs == f64::NEG_INFINITY {
            return LogComplex::ZERO;
        }
        LogComplex {
            mantissa: C64::from_polar(1.0, arg),
            exponent: ln_abs,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == C64::new(0.0, 0.0)
    }

    /// ln|z|; -inf for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.norm().ln() + self.exponent
        }
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// Principal logarithm.
    pub fn ln(&self) -> C64 {
        C64::new(self.ln_abs(), self.arg())
    }

    pub fn to_c64(&self) -> C64 {
        if self.is_zero() {
            return C64::new(0.0, 0.0);
        }
        self.mantissa * self.exponent.exp()
    }
}

impl From<C64> for LogComplex {
    fn from(z: C64) -> Self {
        LogComplex::new(z, 0.0)
    }
}

impl Add for LogComplex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let e = self.exponent.max(o.exponent);
        let m = self.mantissa * (self.exponent - e).exp() + o.mantissa * (o.exponent - e).exp();
        LogComplex::new(m, e)
    }
}

impl Neg for LogComplex {
    type Output = Self;
    fn neg(self) -> Self {
        LogComplex {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Sub for LogComplex {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for LogComplex {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.mantissa * o.mantissa, self.exponent + o.exponent)
    }
}

impl Div for LogComplex {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        if self.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.mantissa / o.mantissa, self.exponent - o.exponent)
    }
}

/// Field operations shared by `C64` and `LogComplex`.
pub trait Scalar:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_c64(z: C64) -> Self;
    fn to_c64(self) -> C64;
    fn sqrt(self) -> Self;
    fn ln_abs(self) -> f64;
    fn arg(self) -> f64;
    /// The positive real e^{ln_abs}.
    fn from_log(ln_abs: f64) -> Self;
    fn zero() -> Self {
        Self::from_c64(C64::new(0.0, 0.0))
    }
    fn one() -> Self {
        Self::from_c64(C64::new(1.0, 0.0))
    }
    /// |self / other|, computed without overflow.
    fn ratio_abs(self, other: Self) -> f64 {
        (self.ln_abs() - other.ln_abs()).exp()
    }
}

impl Scalar for C64 {
    fn from_c64(z: C64) -> Self {
        z
    }
    fn from_log(ln_abs: f64) -> Self {
        C64::new(ln_abs.exp(), 0.0)
    }
    fn to_c64(self) -> C64 {
        self
    }
    fn sqrt(self) -> Self {
        C64::sqrt(self)
    }
    fn ln_abs(self) -> f64 {
        self.norm().ln()
    }
    fn arg(self) -> f64 {
        C64::arg(self)
    }
}

impl Scalar for LogComplex {
    fn from_c64(z: C64) -> Self {
        z.into()
    }
    fn from_log(ln_abs: f64) -> Self {
        LogComplex::from_polar_log(ln_abs, 0.0)
    }
    fn to_c64(self) -> C64 {
        LogComplex::to_c64(&self)
    }
    fn sqrt(self) -> Self {
        if self.is_zero() {
            return self;
        }
        LogComplex::new(self.mantissa.sqrt(), 0.5 * self.exponent)
    }
    fn ln_abs(self) -> f64 {
        LogComplex::ln_abs(&self)
    }
    fn arg(self) -> f64 {
        LogComplex::arg(&self)
    }
}

/// [[a, b], [c, d]].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct M2<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub d: S,
}

pub type Mat2 = M2<C64>;
pub type LMat2 = M2<LogComplex>;

impl<S: Scalar> M2<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Self {
        M2 { a, b, c, d }
    }
    pub fn identity() -> Self {
        M2::new(S::one(), S::zero(), S::zero(), S::one())
    }
    pub fn diag(x: S, y: S) -> Self {
        M2::new(x, S::zero(), S::zero(), y)
    }
    /// The transposition [[0,1],[1,0]].
    pub fn swap() -> Self {
        M2::new(S::zero(), S::one(), S::one(), S::zero())
    }
    pub fn det(&self) -> S {
        self.a * self.d - self.b * self.c
    }
    pub fn trace(&self) -> S {
        self.a + self.d
    }
    /// Inverse by the adjugate.
    pub fn inv(&self) -> Self {
        let det = self.det();
        M2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }
    /// Inverse of a unimodular matrix, exact up to rounding.
    pub fn inv_sl2(&self) -> Self {
        M2::new(self.d, -self.b, -self.c, self.a)
    }
    pub fn scale(&self, s: S) -> Self {
        M2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
    pub fn map<T>(&self, f: impl Fn(S) -> T) -> M2<T> {
        M2 {
            a: f(self.a),
            b: f(self.b),
            c: f(self.c),
            d: f(self.d),
        }
    }
    pub fn to_c64(&self) -> Mat2 {
        self.map(|x| x.to_c64())
    }
    pub fn from_c64(m: &Mat2) -> Self {
        m.map(S::from_c64)
    }
    pub fn entries(&self) -> [S; 4] {
        [self.a, self.b, self.c, self.d]
    }
    /// Largest ln|entry|.
    pub fn max_ln_abs(&self) -> f64 {
        self.entries()
            .iter()
            .map(|x| x.ln_abs())
            .fold(f64::NEG_INFINITY, f64::max)
    }
    /// Divide by the largest entry magnitude (phase kept). Returns the
    /// normalized matrix and the removed log factor.
    pub fn normalized(&self) -> (Mat2, f64) {
        let l = self.max_ln_abs();
        let f = S::from_c64(C64::new((-l).exp().min(f64::MAX), 0.0));
        if l.abs() < 700.0 {
            (self.scale(f).to_c64(), l)
        } else {
            let m = self.map(|x| {
                if x.ln_abs() == f64::NEG_INFINITY {
                    C64::new(0.0, 0.0)
                } else {
                    C64::from_polar((x.ln_abs() - l).exp(), x.arg())
                }
            });
            (m, l)
        }
    }
    /// Entrywise max |self - other| relative to the largest entry of `other`.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let l = other.max_ln_abs();
        let diff = *self - *other;
        (diff.max_ln_abs() - l).exp()
    }
}

impl<S: Scalar> Mul for M2<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        M2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl<S: Scalar> Add for M2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        M2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl<S: Scalar> Sub for M2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        M2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl From<Mat2> for LMat2 {
    fn from(m: Mat2) -> Self {
        LMat2::from_c64(&m)
    }
}

/// Matrix e^{log_scale} m with the largest |entry| of m kept in [0.5, 2].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledMatrix {
    pub m: Mat2,
    pub log_scale: f64,
}

impl ScaledMatrix {
    pub fn new(m: Mat2, log_scale: f64) -> Self {
        let mut s = ScaledMatrix { m, log_scale };
        s.renormalize();
        s
    }
    pub fn identity() -> Self {
        ScaledMatrix {
            m: Mat2::identity(),
            log_scale: 0.0,
        }
    }
    pub fn renormalize(&mut self) {
        let mx = self
            .m
            .entries()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if mx > 0.0 && mx.is_finite() && !(0.5..=2.0).contains(&mx) {
            self.m = self.m.scale(C64::new(1.0 / mx, 0.0));
            self.log_scale += mx.ln();
        }
    }
    pub fn to_log(&self) -> LMat2 {
        let f = LogComplex {
            mantissa: C64::new(1.0, 0.0),
            exponent: self.log_scale,
        };
        LMat2::from_c64(&self.m).scale(f)
    }
    pub fn from_log(m: &LMat2) -> Self {
        let (n, l) = m.normalized();
        ScaledMatrix::new(n, l)
    }
    /// The represented matrix; overflows for large log_scale.
    pub fn value(&self) -> Mat2 {
        self.m.scale(C64::new(self.log_scale.exp(), 0.0))
    }
    pub fn det(&self) -> LogComplex {
        LogComplex::new(self.m.det(), 2.0 * self.log_scale)
    }
    pub fn inv(&self) -> Self {
        let det = self.m.det();
        ScaledMatrix::new(
            Mat2::new(
                self.m.d / det,
                -self.m.b / det,
                -self.m.c / det,
                self.m.a / det,
            ),
            -self.log_scale,
        )
    }
}

impl Mul for ScaledMatrix {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        ScaledMatrix::new(self.m * o.m, self.log_scale + o.log_scale)
    }
}

/// sinh(d)/d, stable near 0.
fn sinhc(d: C64) -> C64 {
    if d.norm() < 1e-3 {
        let d2 = d * d;
        1.0 + d2 / 6.0 + d2 * d2 / 120.0 + d2 * d2 * d2 / 5040.0
    } else {
        d.sinh() / d
    }
}

/// exp(-[[A - C, B], [B, A + C]]) in log-magnitude form. `b` may be far below
/// f64 range relative to `c`.
pub fn expm_neg_symmetric_log(a: C64, b: LogComplex, c: C64) -> LMat2 {
    let lc = LogComplex::from(c);
    let d2 = b * b + lc * lc;
    let mut d = Scalar::sqrt(d2).to_c64();
    if d.re < 0.0 {
        d = -d;
    }
    let ld = LogComplex::from(d);
    let em = LogComplex::exp(-d);
    let (cosh_d, s) = if d.norm() < 1e-3 {
        (LogComplex::from(d.cosh()), LogComplex::from(sinhc(d)))
    } else {
        // cosh d = e^d (1 + e^{-2d}) / 2, sinh d / d = e^d (1 - e^{-2d}) / (2d)
        let ep = LogComplex::exp(d);
        let e2 = (-2.0 * d).exp();
        (
            ep * LogComplex::from(0.5 * (1.0 + e2)),
            ep * LogComplex::from(0.5 * (1.0 - e2)) / ld,
        )
    };
    let b2 = b * b;
    // The smaller of cosh d +- s c is rewritten through d^2 - c^2 = b^2.
    let (d11, d22) = if c.re >= 0.0 {
        let denom = ld + lc;
        let small = if denom.is_zero() {
            cosh_d - s * lc
        } else {
            em + s * b2 / denom
        };
        (cosh_d + s * lc, small)
    } else {
        let denom = ld - lc;
        let small = if denom.is_zero() {
            cosh_d + s * lc
        } else {
            em + s * b2 / denom
        };
        (small, cosh_d - s * lc)
    };
    let off = -(s * b);
    LMat2::new(d11, off, off, d22).scale(LogComplex::exp(-a))
}

/// exp(-[[A - C, B], [B, A + C]]) through the closed form
/// e^{-A} (cosh D I - sinh(D)/D N), N = [[-C, B], [B, C]], D^2 = B^2 + C^2.
pub fn expm_neg_symmetric(a: C64, b: C64, c: C64) -> Mat2 {
    expm_neg_symmetric_log(a, b.into(), c).to_c64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: C64, y: C64, tol: f64) -> bool {
        (x - y).norm() <= tol * (1.0 + y.norm())
    }

    #[test]
    fn log_complex_arithmetic() {
        let x = LogComplex::exp(c(800.0, 0.3));
        let y = LogComplex::exp(c(-790.0, -0.3));
        let p = x * y;
        assert!((p.ln_abs() - 10.0).abs() < 1e-12);
        assert!(p.arg().abs() < 1e-12);
        let s = LogComplex::from(c(1.0, 2.0)) + LogComplex::from(c(-3.0, 0.5));
        assert!(close(s.to_c64(), c(-2.0, 2.5), 1e-15));
        let q = LogComplex::from(c(3.0, 4.0)) / LogComplex::from(c(0.0, 2.0));
        assert!(close(q.to_c64(), c(2.0, -1.5), 1e-15));
        assert!(close(
            Scalar::sqrt(LogComplex::from(c(-4.0, 0.0))).to_c64(),
            c(0.0, 2.0),
            1e-15
        ));
        assert!((LogComplex::ZERO + x).ln_abs() == x.ln_abs());
        assert_eq!((LogComplex::ZERO * x).ln_abs(), f64::NEG_INFINITY);
    }

    #[test]
    fn matrix_inverse_and_det() {
        let m = Mat2::new(c(1.0, 2.0), c(0.5, 0.0), c(-1.0, 1.0), c(3.0, 0.0));
        let p = m * m.inv();
        assert!(p.rel_diff(&Mat2::identity()) < 1e-15);
        let l: LMat2 = m.into();
        assert!(close(l.det().to_c64(), m.det(), 1e-14));
    }

    #[test]
    fn scaled_matrix_renormalizes() {
        let s = ScaledMatrix::new(Mat2::diag(c(1e10, 0.0), c(1.0, 0.0)), 0.0);
        assert!((s.log_scale - 1e10f64.ln()).abs() < 1e-12);
        assert!((s.m.a.norm() - 1.0).abs() < 1e-15);
        let v = (s * s.inv()).value();
        assert!(v.rel_diff(&Mat2::identity()) < 1e-14);
    }

    #[test]
    fn expm_diagonal_case() {
        let m = expm_neg_symmetric(c(0.0, 0.0), c(0.0, 0.0), c(1.3, 0.0));
        assert!(close(m.a, c(1.3f64.exp(), 0.0), 1e-15));
        assert!(close(m.d, c((-1.3f64).exp(), 0.0), 1e-15));
        assert_eq!(m.b, c(0.0, 0.0));
    }

    #[test]
    fn expm_off_diagonal_case() {
        let b = 0.7f64;
        let m = expm_neg_symmetric(c(0.0, 0.0), c(b, 0.0), c(0.0, 0.0));
        assert!(close(m.a, c(b.cosh(), 0.0), 1e-15));
        assert!(close(m.b, c(-b.sinh(), 0.0), 1e-15));
        assert!(close(m.d, c(b.cosh(), 0.0), 1e-15));
    }

    #[test]
    fn expm_zero_discriminant() {
        // B = i, C = 1 gives D = 0: exp(-N) = I - N
        let m = expm_neg_symmetric(c(0.0, 0.0), I, c(1.0, 0.0));
        let e = Mat2::new(c(2.0, 0.0), -I, -I, c(0.0, 0.0));
        assert!(m.rel_diff(&e) < 1e-14);
    }

    #[test]
    fn expm_determinant() {
        let a = c(0.3, 1.1);
        let m = expm_neg_symmetric(a, c(0.4, -2.0), c(-1.5, 0.2));
        assert!(close(m.det(), (-2.0 * a).exp(), 1e-13));
    }

    #[test]
    fn expm_log_form_survives_huge_arguments() {
        let m =
            expm_neg_symmetric_log(c(0.0, 1.0), LogComplex::exp(c(-900.0, 0.0)), c(1200.0, 0.0));
        let expect = 1200.0 - 1800.0 - (4.0f64 * 1200.0 * 1200.0).ln();
        assert!((m.d.ln_abs() - expect).abs() < 1e-9);
        assert!((m.a.ln_abs() - 1200.0).abs() < 1e-9);
    }
}
