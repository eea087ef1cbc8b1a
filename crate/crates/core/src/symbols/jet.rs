//! Truncated two-variable Taylor expansions with complex coefficients.

use num_complex::Complex64;

/// Highest total derivative order carried by a jet.
pub const MAX_ORDER: usize = 8;
const LEN: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[inline]
const fn idx(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// `sum_{i + j <= order} c_ij dx^i dy^j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    order: usize,
    c: [Complex64; LEN],
}

impl Jet {
    pub fn constant(order: usize, v: Complex64) -> Self {
        let mut c = [ZERO; LEN];
        c[0] = v;
        Self { order, c }
    }

    /// The coordinate function `x` expanded at `x0`.
    pub fn var_x(order: usize, x0: f64) -> Self {
        let mut j = Self::constant(order, Complex64::new(x0, 0.0));
        if order >= 1 {
            j.c[idx(1, 0)] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn var_y(order: usize, y0: f64) -> Self {
        let mut j = Self::constant(order, Complex64::new(y0, 0.0));
        if order >= 1 {
            j.c[idx(0, 1)] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        if i + j > self.order {
            ZERO
        } else {
            self.c[idx(i, j)]
        }
    }

    /// `d^{i+j} / dx^i dy^j` at the expansion point.
    pub fn derivative(&self, i: usize, j: usize) -> Complex64 {
        self.coeff(i, j) * (factorial(i) * factorial(j))
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut r = *self;
        for k in 0..self.len() {
            r.c[k] += o.c[k];
        }
        r
    }

    pub fn scale(&self, s: Complex64) -> Jet {
        let mut r = *self;
        for k in 0..self.len() {
            r.c[k] *= s;
        }
        r
    }

    pub fn add_scalar(&self, s: Complex64) -> Jet {
        let mut r = *self;
        r.c[0] += s;
        r
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.order;
        let mut c = [ZERO; LEN];
        for d1 in 0..=n {
            for j1 in 0..=d1 {
                let a = self.c[idx(d1 - j1, j1)];
                if a == ZERO {
                    continue;
                }
                for d2 in 0..=(n - d1) {
                    for j2 in 0..=d2 {
                        c[idx(d1 - j1 + d2 - j2, j1 + j2)] += a * o.c[idx(d2 - j2, j2)];
                    }
                }
            }
        }
        Jet { order: n, c }
    }

    /// `h(self)` given `derivs[r] = h^{(r)}(self.value())` for `r = 0..=order`.
    pub fn compose(&self, derivs: &[Complex64]) -> Jet {
        let n = self.order;
        let mut delta = *self;
        delta.c[0] = ZERO;
        let mut out = Jet::constant(n, derivs[0]);
        let mut power = Jet::constant(n, Complex64::new(1.0, 0.0));
        for (r, d) in derivs.iter().enumerate().take(n + 1).skip(1) {
            power = power.mul(&delta);
            out = out.add(&power.scale(*d / factorial(r)));
        }
        out
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose(&vec![e; self.order + 1])
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = (self.value().sin(), self.value().cos());
        let d: Vec<Complex64> = (0..=self.order).map(|r| [s, c, -s, -c][r % 4]).collect();
        self.compose(&d)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = (self.value().sin(), self.value().cos());
        let d: Vec<Complex64> = (0..=self.order).map(|r| [c, -s, -c, s][r % 4]).collect();
        self.compose(&d)
    }

    /// `self^p` for a jet whose value is real and positive.
    pub fn powf(&self, p: f64) -> Jet {
        let u = self.value().re;
        let mut d = Vec::with_capacity(self.order + 1);
        let mut coef = 1.0;
        for r in 0..=self.order {
            d.push(Complex64::new(coef * u.powf(p - r as f64), 0.0));
            coef *= p - r as f64;
        }
        self.compose(&d)
    }

    fn len(&self) -> usize {
        (self.order + 1) * (self.order + 2) / 2
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}
