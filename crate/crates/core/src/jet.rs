//! Order-4 truncated Taylor (jet) arithmetic over complex numbers in the
//! traveling coordinate. Evaluating a solution formula on jets yields its
//! value and first four derivatives in one pass, which is exactly what the
//! residual checks need: the governing equation's highest derivative is
//! fourth order and every mixed partial reduces to a pure derivative in
//! the traveling coordinate.

pub use num_complex::Complex64;
use thiserror::Error;

/// Highest retained derivative order.
pub const JET_ORDER: usize = 4;

/// Default closeness floor for divisions and pole-adjacent compositions.
pub const DEFAULT_POLE_FLOOR: f64 = 1e-12;

/// Taylor coefficients `[f, f', f''/2!, f'''/3!, f''''/4!]` about a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [Complex64; JET_ORDER + 1],
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JetError {
    /// Division hit a value-coefficient smaller than the configured floor;
    /// the sampled point sits too close to a solution singularity.
    #[error("DivisionNearPole: |denominator| = {magnitude:.3e} below floor {floor:.3e}")]
    DivisionNearPole { magnitude: f64, floor: f64 },
    #[error("DomainError: {function} undefined at value {value}")]
    DomainError {
        function: &'static str,
        value: Complex64,
    },
}

pub type JetResult = Result<Jet, JetError>;

impl Jet {
    pub fn constant(z: Complex64) -> Jet {
        let mut c = [Complex64::ZERO; 5];
        c[0] = z;
        Jet { c }
    }

    pub fn real_constant(x: f64) -> Jet {
        Jet::constant(Complex64::new(x, 0.0))
    }

    /// The identity jet: value `z0`, unit first derivative.
    pub fn variable(z0: Complex64) -> Jet {
        let mut c = [Complex64::ZERO; 5];
        c[0] = z0;
        c[1] = Complex64::ONE;
        Jet { c }
    }

    pub fn zero() -> Jet {
        Jet::constant(Complex64::ZERO)
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// k-th derivative (Taylor coefficient times k!).
    pub fn derivative(&self, k: usize) -> Complex64 {
        const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];
        self.c[k] * FACT[k]
    }

    pub fn scale(mut self, z: Complex64) -> Jet {
        for ck in &mut self.c {
            *ck *= z;
        }
        self
    }

    pub fn div(self, rhs: Jet, floor: f64) -> JetResult {
        Ok(self * rhs.recip(floor)?)
    }

    /// Reciprocal series 1/b, guarded by the pole floor.
    pub fn recip(self, floor: f64) -> JetResult {
        let b0 = self.c[0];
        if b0.norm() < floor {
            return Err(JetError::DivisionNearPole {
                magnitude: b0.norm(),
                floor,
            });
        }
        let r0 = b0.finv();
        let mut r = [Complex64::ZERO; 5];
        r[0] = r0;
        for k in 1..=JET_ORDER {
            let mut acc = Complex64::ZERO;
            for j in 1..=k {
                acc += self.c[j] * r[k - j];
            }
            r[k] = -r0 * acc;
        }
        Ok(Jet { c: r })
    }

    /// Compose a univariate Taylor series (in h, about the jet's value) with
    /// this jet. The inner offset h = self - value has no constant term, so
    /// Horner evaluation is exact at this order.
    fn compose(self, series: [Complex64; 5]) -> Jet {
        let mut h = self;
        h.c[0] = Complex64::ZERO;
        let mut out = Jet::constant(series[JET_ORDER]);
        for k in (0..JET_ORDER).rev() {
            out = out * h + Jet::constant(series[k]);
        }
        out
    }

    pub fn exp(self) -> Jet {
        let e0 = self.c[0].exp();
        let series = [e0, e0, e0 / 2.0, e0 / 6.0, e0 / 24.0];
        self.compose(series)
    }

    pub fn ln(self, floor: f64) -> JetResult {
        let z0 = self.c[0];
        if z0.norm() < floor || (z0.im == 0.0 && z0.re < 0.0) {
            return Err(JetError::DomainError {
                function: "ln",
                value: z0,
            });
        }
        // ln(z0+h) = ln z0 + h/z0 - h^2/(2 z0^2) + ...
        let inv = z0.finv();
        let series = [
            z0.ln(),
            inv,
            -inv * inv / 2.0,
            inv * inv * inv / 3.0,
            -inv * inv * inv * inv / 4.0,
        ];
        Ok(self.compose(series))
    }

    pub fn sqrt(self, floor: f64) -> JetResult {
        let z0 = self.c[0];
        if z0.norm() < floor || (z0.im == 0.0 && z0.re < 0.0) {
            return Err(JetError::DomainError {
                function: "sqrt",
                value: z0,
            });
        }
        let s0 = z0.sqrt();
        let inv = z0.finv();
        // binomial series of sqrt(z0)*(1+h/z0)^(1/2)
        let series = [
            s0,
            s0 * inv / 2.0,
            -s0 * inv * inv / 8.0,
            s0 * inv * inv * inv / 16.0,
            -s0 * inv * inv * inv * inv * (5.0 / 128.0),
        ];
        Ok(self.compose(series))
    }

    pub fn tanh(self) -> Jet {
        self.compose(ode_series_sq(self.c[0].tanh(), -1.0))
    }

    pub fn tan(self, floor: f64) -> JetResult {
        let c0 = self.c[0].cos();
        if c0.norm() < floor {
            return Err(JetError::DomainError {
                function: "tan",
                value: self.c[0],
            });
        }
        Ok(self.compose(ode_series_sq(self.c[0].tan(), 1.0)))
    }

    pub fn coth(self, floor: f64) -> JetResult {
        let s0 = self.c[0].sinh();
        if s0.norm() < floor {
            return Err(JetError::DomainError {
                function: "coth",
                value: self.c[0],
            });
        }
        // coth' = 1 - coth^2, same quadratic flow as tanh
        Ok(self.compose(ode_series_sq(self.c[0].cosh() / s0, -1.0)))
    }

    pub fn sech(self, floor: f64) -> JetResult {
        let c0 = self.c[0].cosh();
        if c0.norm() < floor {
            return Err(JetError::DomainError {
                function: "sech",
                value: self.c[0],
            });
        }
        let (s, _) = pair_series(c0.finv(), self.c[0].tanh(), 1.0);
        Ok(self.compose(s))
    }

    pub fn csch(self, floor: f64) -> JetResult {
        let s0 = self.c[0].sinh();
        if s0.norm() < floor {
            return Err(JetError::DomainError {
                function: "csch",
                value: self.c[0],
            });
        }
        let (s, _) = pair_series(s0.finv(), self.c[0].cosh() / s0, -1.0);
        Ok(self.compose(s))
    }

    pub fn sinh(self) -> Jet {
        let (s0, c0) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose(sin_like_series(s0, c0, 1.0))
    }

    pub fn cosh(self) -> Jet {
        let (s0, c0) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose(sin_like_series(c0, s0, 1.0))
    }

    pub fn sin(self) -> Jet {
        let (s0, c0) = (self.c[0].sin(), self.c[0].cos());
        self.compose(sin_like_series(s0, c0, -1.0))
    }

    pub fn cos(self) -> Jet {
        let (s0, c0) = (self.c[0].sin(), self.c[0].cos());
        self.compose(sin_like_series(c0, -s0, -1.0))
    }

    /// Degree-4 Taylor prediction of the value at an offset h.
    pub fn predict(&self, h: Complex64) -> Complex64 {
        let mut acc = self.c[JET_ORDER];
        for k in (0..JET_ORDER).rev() {
            acc = acc * h + self.c[k];
        }
        acc
    }
}

/// Series of y with y' = 1 + sign*y^2 (tanh/coth: sign=-1, tan: sign=+1).
fn ode_series_sq(y0: Complex64, sign: f64) -> [Complex64; 5] {
    let mut y = [Complex64::ZERO; 5];
    y[0] = y0;
    for k in 0..JET_ORDER {
        // (y*y)_k from coefficients known so far
        let mut sq = Complex64::ZERO;
        for j in 0..=k {
            sq += y[j] * y[k - j];
        }
        let rhs = if k == 0 {
            Complex64::ONE + sign * sq
        } else {
            sign * sq
        };
        y[k + 1] = rhs / (k as f64 + 1.0);
    }
    y
}

/// Series of u in the pair flow u' = -u*v, v' = sign * u^2, covering
/// sech against tanh (sign=+1: sech' = -sech*tanh, tanh' = sech^2) and
/// csch against coth (sign=-1: csch' = -csch*coth, coth' = -csch^2).
fn pair_series(u0: Complex64, v0: Complex64, sign: f64) -> ([Complex64; 5], [Complex64; 5]) {
    let mut u = [Complex64::ZERO; 5];
    let mut v = [Complex64::ZERO; 5];
    u[0] = u0;
    v[0] = v0;
    for k in 0..JET_ORDER {
        let mut uv = Complex64::ZERO;
        let mut uu = Complex64::ZERO;
        for j in 0..=k {
            uv += u[j] * v[k - j];
            uu += u[j] * u[k - j];
        }
        u[k + 1] = -uv / (k as f64 + 1.0);
        v[k + 1] = sign * uu / (k as f64 + 1.0);
    }
    (u, v)
}

/// Series for the sin/cos/sinh/cosh family: y with y'=d, d'=sign*y.
fn sin_like_series(y0: Complex64, d0: Complex64, sign: f64) -> [Complex64; 5] {
    let mut y = [Complex64::ZERO; 5];
    let mut d = [Complex64::ZERO; 5];
    y[0] = y0;
    d[0] = d0;
    for k in 0..JET_ORDER {
        y[k + 1] = d[k] / (k as f64 + 1.0);
        d[k + 1] = sign * y[k] / (k as f64 + 1.0);
    }
    y
}

impl std::ops::Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for k in 0..=JET_ORDER {
            self.c[k] += rhs.c[k];
        }
        self
    }
}

impl std::ops::Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        for k in 0..=JET_ORDER {
            self.c[k] -= rhs.c[k];
        }
        self
    }
}

impl std::ops::Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for ck in &mut self.c {
            *ck = -*ck;
        }
        self
    }
}

impl std::ops::Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = [Complex64::ZERO; 5];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for j in 0..=k {
                acc += self.c[j] * rhs.c[k - j];
            }
            *slot = acc;
        }
        Jet { c: out }
    }
}
