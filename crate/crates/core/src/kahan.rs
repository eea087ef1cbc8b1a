//! Compensated summation.
//!
//! Every reduction over a grid goes through these accumulators, in index
//! order, so results do not depend on scheduling.

use num_complex::Complex64;

/// Neumaier variant of Kahan summation for `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of complex values (real and imaginary parts tracked separately).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSumC {
    re: KahanSum,
    im: KahanSum,
}

impl KahanSumC {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl std::iter::FromIterator<Complex64> for KahanSumC {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = KahanSumC::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<KahanSum>().value()
}

pub fn sum_c(values: impl IntoIterator<Item = Complex64>) -> Complex64 {
    values.into_iter().collect::<KahanSumC>().value()
}
