//! Symbols on phase space with exact partial derivatives, and their seminorms
//! `|s|_{N,m} = sup_{|a| <= N} sup_z |d^a s(z)| <z>^{-m}`.

mod jet;
mod parse;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{bracket_pow, PhaseSpacePoint};

pub use jet::{Jet, MAX_ORDER};
pub use parse::parse_symbol;

/// One-variable profiles used by the separable families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "snake_case")]
pub enum Profile {
    /// `exp(-a t^2)`
    Gauss(f64),
    /// `(1 + t^2)^{m/2}`
    Bracket(f64),
    /// `sin(a t)`
    Sin(f64),
    /// `cos(a t)`
    Cos(f64),
}

impl Profile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Profile::Gauss(a) => (-a * t * t).exp(),
            Profile::Bracket(m) => (1.0 + t * t).powf(0.5 * m),
            Profile::Sin(a) => (a * t).sin(),
            Profile::Cos(a) => (a * t).cos(),
        }
    }

    fn jet(&self, t: &Jet) -> Jet {
        let c = |v: f64| Complex64::new(v, 0.0);
        match *self {
            Profile::Gauss(a) => t.mul(t).scale(c(-a)).exp(),
            Profile::Bracket(m) => t.mul(t).add_scalar(c(1.0)).powf(0.5 * m),
            Profile::Sin(a) => t.scale(c(a)).sin(),
            Profile::Cos(a) => t.scale(c(a)).cos(),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Gauss(a) => write!(f, "gauss({a})"),
            Profile::Bracket(m) => write!(f, "bracket({m})"),
            Profile::Sin(a) => write!(f, "sin({a})"),
            Profile::Cos(a) => write!(f, "cos({a})"),
        }
    }
}

/// Symbol families, closed under finite sums and products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum SymbolSpec {
    Constant(f64),
    /// `<z>^m`
    BracketPower(f64),
    /// `h(x)`
    SeparableX(Profile),
    /// `h(omega)`
    SeparableOmega(Profile),
    /// `sin(a x) cos(b omega)`
    Trig { a: f64, b: f64 },
    /// `exp(pi i c |z|^2)`; bounded but not in `S^0` for `c != 0`.
    Chirp(f64),
    Sum(Vec<SymbolSpec>),
    Product(Vec<SymbolSpec>),
}

impl SymbolSpec {
    /// `separable_x` with a Gaussian profile `exp(-a x^2)`.
    pub fn separable_x(a: f64) -> Self {
        SymbolSpec::SeparableX(Profile::Gauss(a))
    }

    pub fn separable_omega(a: f64) -> Self {
        SymbolSpec::SeparableOmega(Profile::Gauss(a))
    }

    /// Plain value, without derivative bookkeeping.
    pub fn value(&self, x: f64, w: f64) -> Complex64 {
        let re = |v: f64| Complex64::new(v, 0.0);
        match self {
            SymbolSpec::Constant(c) => re(*c),
            SymbolSpec::BracketPower(m) => re(bracket_pow(&[x, w], *m)),
            SymbolSpec::SeparableX(p) => re(p.value(x)),
            SymbolSpec::SeparableOmega(p) => re(p.value(w)),
            SymbolSpec::Trig { a, b } => re((a * x).sin() * (b * w).cos()),
            SymbolSpec::Chirp(c) => Complex64::from_polar(1.0, PI * c * (x * x + w * w)),
            SymbolSpec::Sum(v) => v.iter().map(|s| s.value(x, w)).sum(),
            SymbolSpec::Product(v) => v.iter().map(|s| s.value(x, w)).product(),
        }
    }

    /// Taylor jet of the symbol at `(x, w)` up to total order `order`.
    pub fn jet(&self, x: f64, w: f64, order: usize) -> Result<Jet> {
        if order > MAX_ORDER {
            return Err(Error::DerivativeOrder {
                order,
                max: MAX_ORDER,
            });
        }
        Ok(self.jet_unchecked(&Jet::var_x(order, x), &Jet::var_y(order, w)))
    }

    fn jet_unchecked(&self, jx: &Jet, jw: &Jet) -> Jet {
        let n = jx.order();
        let c = |v: f64| Complex64::new(v, 0.0);
        match self {
            SymbolSpec::Constant(v) => Jet::constant(n, c(*v)),
            SymbolSpec::BracketPower(m) => jx.mul(jx).add(&jw.mul(jw)).add_scalar(c(1.0)).powf(0.5 * m),
            SymbolSpec::SeparableX(p) => p.jet(jx),
            SymbolSpec::SeparableOmega(p) => p.jet(jw),
            SymbolSpec::Trig { a, b } => jx.scale(c(*a)).sin().mul(&jw.scale(c(*b)).cos()),
            SymbolSpec::Chirp(k) => jx
                .mul(jx)
                .add(&jw.mul(jw))
                .scale(Complex64::new(0.0, PI * k))
                .exp(),
            SymbolSpec::Sum(v) => v
                .iter()
                .fold(Jet::constant(n, c(0.0)), |acc, s| acc.add(&s.jet_unchecked(jx, jw))),
            SymbolSpec::Product(v) => v
                .iter()
                .fold(Jet::constant(n, c(1.0)), |acc, s| acc.mul(&s.jet_unchecked(jx, jw))),
        }
    }

    /// True when the symbol is real valued everywhere.
    pub fn is_real(&self) -> bool {
        match self {
            SymbolSpec::Chirp(c) => *c == 0.0,
            SymbolSpec::Sum(v) | SymbolSpec::Product(v) => v.iter().all(|s| s.is_real()),
            _ => true,
        }
    }
}

impl fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolSpec::Constant(c) => write!(f, "constant({c})"),
            SymbolSpec::BracketPower(m) => write!(f, "bracket_power({m})"),
            SymbolSpec::SeparableX(p) => write!(f, "separable_x({p})"),
            SymbolSpec::SeparableOmega(p) => write!(f, "separable_omega({p})"),
            SymbolSpec::Trig { a, b } => write!(f, "trig({a}, {b})"),
            SymbolSpec::Chirp(c) => write!(f, "chirp({c})"),
            SymbolSpec::Sum(v) => {
                for (i, s) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{s}")?;
                }
                Ok(())
            }
            SymbolSpec::Product(v) => {
                for (i, s) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    if matches!(s, SymbolSpec::Sum(_)) {
                        write!(f, "({s})")?;
                    } else {
                        write!(f, "{s}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

impl std::str::FromStr for SymbolSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_symbol(s)
    }
}

/// `d^alpha s(z)` with `alpha = (alpha_x, alpha_omega)`.
pub fn eval_symbol(sym: &SymbolSpec, z: PhaseSpacePoint, alpha: (usize, usize)) -> Result<Complex64> {
    if !z.is_finite() {
        return Err(Error::NonFinite(format!("{z:?}")));
    }
    let order = alpha.0 + alpha.1;
    Ok(sym.jet(z.x, z.omega, order)?.derivative(alpha.0, alpha.1))
}

/// Sampled seminorm with a growth probe at doubled radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub order: usize,
    pub m: f64,
    /// Sup over the box `[-r, r]^2`.
    pub value: f64,
    pub region_radius: f64,
    pub resolution: usize,
    /// Sups over the boxes of radius `r`, `2r`, `4r`.
    pub values_by_radius: [f64; 3],
    /// Set when the sup grows by more than [`DIVERGENCE_GROWTH`] on both doublings.
    pub divergence_flag: bool,
}

/// Per-doubling growth that counts as divergence.
pub const DIVERGENCE_GROWTH: f64 = 1.05;

fn box_sup(sym: &SymbolSpec, order: usize, m: f64, radius: f64, resolution: usize) -> f64 {
    let step = 2.0 * radius / (resolution - 1) as f64;
    let mut sup: f64 = 0.0;
    for i in 0..resolution {
        let x = -radius + i as f64 * step;
        for j in 0..resolution {
            let w = -radius + j as f64 * step;
            let jet = sym.jet_unchecked(&Jet::var_x(order, x), &Jet::var_y(order, w));
            let weight = bracket_pow(&[x, w], -m);
            for d in 0..=order {
                for k in 0..=d {
                    sup = sup.max(jet.derivative(d - k, k).norm() * weight);
                }
            }
        }
    }
    sup
}

/// `|sym|_{N,m}` sampled on `resolution^2` points of `[-r, r]^2` (resolution is rounded up to odd).
pub fn seminorm(sym: &SymbolSpec, order: usize, m: f64, region_radius: f64, resolution: usize) -> Result<SeminormReport> {
    if order > MAX_ORDER {
        return Err(Error::DerivativeOrder {
            order,
            max: MAX_ORDER,
        });
    }
    if !(region_radius.is_finite() && region_radius > 0.0) {
        return Err(Error::OutOfRange {
            name: "region_radius",
            detail: format!("{region_radius} must be positive"),
        });
    }
    let resolution = (resolution.max(3)) | 1;
    let v = [1.0, 2.0, 4.0].map(|s| box_sup(sym, order, m, s * region_radius, resolution));
    let divergence_flag = v[1] > DIVERGENCE_GROWTH * v[0] && v[2] > DIVERGENCE_GROWTH * v[1];
    Ok(SeminormReport {
        order,
        m,
        value: v[0],
        region_radius,
        resolution,
        values_by_radius: v,
        divergence_flag,
    })
}

/// `|FD(h) - d^alpha s(z)|` with nested second-order central differences.
pub fn finite_difference_crosscheck(sym: &SymbolSpec, z: PhaseSpacePoint, alpha: (usize, usize), step: f64) -> Result<f64> {
    if alpha.0 + alpha.1 > 4 {
        return Err(Error::DerivativeOrder {
            order: alpha.0 + alpha.1,
            max: 4,
        });
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::OutOfRange {
            name: "step",
            detail: format!("{step} must be positive"),
        });
    }
    let exact = eval_symbol(sym, z, alpha)?;
    let stencil = |k: usize| -> Vec<(f64, f64)> {
        // (offset in steps, coefficient) of the k-th central difference
        (0..=k)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                (k as f64 / 2.0 - i as f64, sign * binomial(k, i))
            })
            .collect()
    };
    let (sx, sw) = (stencil(alpha.0), stencil(alpha.1));
    let mut acc = Complex64::new(0.0, 0.0);
    for &(ox, cx) in &sx {
        for &(ow, cw) in &sw {
            acc += sym.value(z.x + ox * step, z.omega + ow * step) * (cx * cw);
        }
    }
    let fd = acc / step.powi((alpha.0 + alpha.1) as i32);
    Ok((fd - exact).norm())
}

fn binomial(n: usize, k: usize) -> f64 {
    jet::factorial(n) / (jet::factorial(k) * jet::factorial(n - k))
}
