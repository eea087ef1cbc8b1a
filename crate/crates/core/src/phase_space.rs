//! Grids, lattices, weights and elementary phase-space geometry in `d = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dft::CenteredDft;
use crate::error::{ensure_finite, Error, Result};
use crate::kahan::{KahanSum, KahanSumC};

/// Uniform centered grid `t_j = origin + j * spacing`, `j = -n/2 .. n/2 - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_samples: usize,
    spacing: f64,
    origin: f64,
}

impl Grid {
    pub fn new(n_samples: usize, spacing: f64, origin: f64) -> Result<Self> {
        if n_samples < 8 || !n_samples.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_samples = {n_samples} must be a power of two >= 8"
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing = {spacing} must be positive")));
        }
        ensure_finite("origin", origin)?;
        Ok(Self {
            n_samples,
            spacing,
            origin,
        })
    }

    /// Centered grid with `origin = 0`.
    pub fn centered(n_samples: usize, spacing: f64) -> Result<Self> {
        Self::new(n_samples, spacing, 0.0)
    }

    pub fn len(&self) -> usize {
        self.n_samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// Total extent `n * spacing`.
    pub fn extent(&self) -> f64 {
        self.n_samples as f64 * self.spacing
    }

    pub fn half_extent(&self) -> f64 {
        0.5 * self.extent()
    }

    /// Position of storage index `p` (`p = j + n/2`).
    pub fn point(&self, p: usize) -> f64 {
        self.origin + (p as f64 - (self.n_samples / 2) as f64) * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_samples).map(move |p| self.point(p))
    }

    /// The implied frequency grid: spacing `1/(n * spacing)`, centered at 0.
    pub fn frequency_grid(&self) -> Grid {
        Grid {
            n_samples: self.n_samples,
            spacing: 1.0 / self.extent(),
            origin: 0.0,
        }
    }

    /// Nyquist band edge `1/(2 * spacing)`.
    pub fn band_edge(&self) -> f64 {
        0.5 / self.spacing
    }

    pub fn dft(&self) -> CenteredDft {
        CenteredDft::new(self.n_samples, self.spacing, self.origin)
    }

    /// Nearest storage-index offset for a displacement `x`, plus the rounding residual.
    pub fn round_shift(&self, x: f64) -> (i64, f64) {
        let s = (x / self.spacing).round();
        (s as i64, x - s * self.spacing)
    }

    /// Storage index of the grid point nearest to `t`, if inside the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let p = ((t - self.origin) / self.spacing).round() + (self.n_samples / 2) as f64;
        if p >= 0.0 && p < self.n_samples as f64 {
            Some(p as usize)
        } else {
            None
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n_samples == other.n_samples
            && (self.spacing - other.spacing).abs() <= 1e-14 * self.spacing
            && (self.origin - other.origin).abs() <= 1e-14 * self.spacing.max(self.origin.abs())
    }
}

/// Complex samples of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSignal {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} samples",
                values.len(),
                grid.len()
            )));
        }
        if let Some(p) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(format!("sample {p}")));
        }
        Ok(Self { grid, values })
    }

    /// Caller guarantees matching length and finite values.
    pub(crate) fn from_raw(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `<self, other> = dt * sum self * conj(other)`.
    pub fn inner(&self, other: &SampledSignal) -> Result<Complex64> {
        self.check_grid(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &SampledSignal) -> Complex64 {
        let acc: KahanSumC = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .collect();
        acc.value() * self.grid.spacing
    }

    pub fn norm_sqr(&self) -> f64 {
        let acc: KahanSum = self.values.iter().map(|v| v.norm_sqr()).collect();
        acc.value() * self.grid.spacing
    }

    /// L2 norm on the grid.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> SampledSignal {
        SampledSignal {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn normalized(&self) -> Result<SampledSignal> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::OutOfRange {
                name: "signal",
                detail: "cannot normalize the zero signal".into(),
            });
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// Relative L2 distance `||self - other|| / ||other||`.
    pub fn rel_error(&self, reference: &SampledSignal) -> Result<f64> {
        self.check_grid(reference)?;
        let acc: KahanSum = self
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .collect();
        Ok((acc.value() * self.grid.spacing).sqrt() / reference.norm())
    }

    /// Forward centered DFT, returned on the implied frequency grid.
    pub fn spectrum(&self) -> SampledSignal {
        let dft = self.grid.dft();
        SampledSignal {
            grid: self.grid.frequency_grid(),
            values: dft.forward(&self.values),
        }
    }

    pub(crate) fn check_grid(&self, other: &SampledSignal) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)))
        }
    }
}

/// A point `z = (x, omega)` of phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    pub x: f64,
    pub omega: f64,
}

impl PhaseSpacePoint {
    pub const ORIGIN: PhaseSpacePoint = PhaseSpacePoint { x: 0.0, omega: 0.0 };

    pub fn new(x: f64, omega: f64) -> Self {
        Self { x, omega }
    }

    pub fn checked(x: f64, omega: f64) -> Result<Self> {
        ensure_finite("x", x)?;
        ensure_finite("omega", omega)?;
        Ok(Self { x, omega })
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.omega)
    }

    /// Japanese bracket `(1 + |z|^2)^{1/2}`.
    pub fn bracket(&self) -> f64 {
        (1.0 + self.x * self.x + self.omega * self.omega).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.omega.is_finite()
    }
}

impl std::ops::Add for PhaseSpacePoint {
    type Output = PhaseSpacePoint;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.omega + o.omega)
    }
}

impl std::ops::Sub for PhaseSpacePoint {
    type Output = PhaseSpacePoint;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.omega - o.omega)
    }
}

impl std::ops::Neg for PhaseSpacePoint {
    type Output = PhaseSpacePoint;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.omega)
    }
}

/// `<v>^s = (1 + |v|^2)^{s/2}` for a vector of any dimension.
pub fn bracket_pow(v: &[f64], s: f64) -> f64 {
    let r2: f64 = v.iter().map(|c| c * c).sum();
    (1.0 + r2).powf(0.5 * s)
}

/// Separable lattice `alpha Z x beta Z`, truncated to `|k|, |l| <= radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    alpha: f64,
    beta: f64,
    radius: usize,
}

impl Lattice {
    pub fn new(alpha: f64, beta: f64, radius: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                detail: format!("{alpha} must be positive"),
            });
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::OutOfRange {
                name: "beta",
                detail: format!("{beta} must be positive"),
            });
        }
        if radius == 0 {
            return Err(Error::OutOfRange {
                name: "radius",
                detail: "must be a positive integer".into(),
            });
        }
        Ok(Self { alpha, beta, radius })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn count(&self) -> usize {
        self.side() * self.side()
    }

    /// Index pair at enumeration position `i` (lexicographic in `(k, l)`).
    pub fn indices(&self, i: usize) -> (i64, i64) {
        let side = self.side();
        let r = self.radius as i64;
        ((i / side) as i64 - r, (i % side) as i64 - r)
    }

    /// Enumeration position of `(k, l)`, if inside the truncation.
    pub fn position(&self, k: i64, l: i64) -> Option<usize> {
        let r = self.radius as i64;
        if k.abs() > r || l.abs() > r {
            return None;
        }
        Some(((k + r) as usize) * self.side() + (l + r) as usize)
    }

    pub fn point(&self, k: i64, l: i64) -> PhaseSpacePoint {
        PhaseSpacePoint::new(k as f64 * self.alpha, l as f64 * self.beta)
    }

    pub fn point_at(&self, i: usize) -> PhaseSpacePoint {
        let (k, l) = self.indices(i);
        self.point(k, l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.count()).map(move |i| self.indices(i))
    }

    /// Lattice of all index differences of this truncation (radius doubled).
    pub fn difference_lattice(&self) -> Lattice {
        Lattice {
            alpha: self.alpha,
            beta: self.beta,
            radius: 2 * self.radius,
        }
    }

    pub fn density(&self) -> f64 {
        self.alpha * self.beta
    }
}

/// Polynomial weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `v_s(z) = <z>^s`.
    Polynomial { s: f64 },
    /// `(z, zeta) -> <z>^m <zeta>^s`.
    Tensor { m: f64, s: f64 },
}

impl WeightSpec {
    pub fn polynomial(s: f64) -> Self {
        WeightSpec::Polynomial { s }
    }

    pub fn tensor(m: f64, s: f64) -> Self {
        WeightSpec::Tensor { m, s }
    }

    pub fn unit() -> Self {
        WeightSpec::Polynomial { s: 0.0 }
    }

    /// Evaluate on a single phase-space point. Tensor weights split it as `(x, omega)`.
    pub fn eval(&self, z: PhaseSpacePoint) -> Result<f64> {
        if !z.is_finite() {
            return Err(Error::NonFinite(format!("weight argument {z:?}")));
        }
        Ok(match *self {
            WeightSpec::Polynomial { s } => bracket_pow(&[z.x, z.omega], s),
            WeightSpec::Tensor { m, s } => bracket_pow(&[z.x], m) * bracket_pow(&[z.omega], s),
        })
    }

    /// Evaluate on a pair of arguments of any (equal or not) dimension.
    /// Polynomial weights act on the concatenation.
    pub fn eval_pair(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.iter().chain(b).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("weight argument".into()));
        }
        Ok(match *self {
            WeightSpec::Polynomial { s } => {
                let v: Vec<f64> = a.iter().chain(b).copied().collect();
                bracket_pow(&v, s)
            }
            WeightSpec::Tensor { m, s } => bracket_pow(a, m) * bracket_pow(b, s),
        })
    }

    /// Evaluate a polynomial weight on a vector; tensor weights use only the `s` factor.
    pub fn eval_slice(&self, v: &[f64]) -> f64 {
        match *self {
            WeightSpec::Polynomial { s } => bracket_pow(v, s),
            WeightSpec::Tensor { s, .. } => bracket_pow(v, s),
        }
    }
}

/// Result of a moderateness probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModerateReport {
    /// `sup w(z1 + z2) / (v(z1) w(z2))` over the sampled pairs.
    pub max_ratio: f64,
    pub pairs: usize,
}

pub fn weight_eval(w: &WeightSpec, z: PhaseSpacePoint) -> Result<f64> {
    w.eval(z)
}

/// Largest observed moderation ratio; the caller compares it with a candidate constant.
pub fn check_moderate(
    w: &WeightSpec,
    v: &WeightSpec,
    sample_pairs: &[(PhaseSpacePoint, PhaseSpacePoint)],
) -> Result<ModerateReport> {
    if sample_pairs.is_empty() {
        return Err(Error::InsufficientData("no sample pairs".into()));
    }
    let mut max_ratio: f64 = 0.0;
    for &(z1, z2) in sample_pairs {
        let r = w.eval(z1 + z2)? / (v.eval(z1)? * w.eval(z2)?);
        max_ratio = max_ratio.max(r);
    }
    Ok(ModerateReport {
        max_ratio,
        pairs: sample_pairs.len(),
    })
}

/// `pi(z) f(t) = exp(2 pi i omega t) f(t - x)`.
///
/// `x` is rounded to the nearest grid point and applied as a circular
/// rotation; use [`tf_shift_with_residual`] to see the rounding residual.
pub fn tf_shift(f: &SampledSignal, z: PhaseSpacePoint) -> Result<SampledSignal> {
    tf_shift_with_residual(f, z).map(|(s, _)| s)
}

pub fn tf_shift_with_residual(f: &SampledSignal, z: PhaseSpacePoint) -> Result<(SampledSignal, f64)> {
    if !z.is_finite() {
        return Err(Error::NonFinite(format!("shift {z:?}")));
    }
    let grid = *f.grid();
    if z.x.abs() >= grid.half_extent() {
        return Err(Error::ShiftTooLarge {
            x: z.x,
            half_extent: grid.half_extent(),
        });
    }
    let (s, residual) = grid.round_shift(z.x);
    let n = grid.len() as i64;
    let values = (0..grid.len())
        .map(|p| {
            let src = (p as i64 - s).rem_euclid(n) as usize;
            let phase = Complex64::from_polar(1.0, 2.0 * PI * z.omega * grid.point(p));
            f.values()[src] * phase
        })
        .collect();
    Ok((SampledSignal { grid, values }, residual))
}

/// `T_tau(z, u) = ((1 - tau) z1 + tau u1, tau z2 + (1 - tau) u2)`.
pub fn t_tau(z: PhaseSpacePoint, u: PhaseSpacePoint, tau: f64) -> Result<PhaseSpacePoint> {
    check_tau(tau)?;
    Ok(t_tau_unchecked(z, u, tau))
}

#[inline]
pub(crate) fn t_tau_unchecked(z: PhaseSpacePoint, u: PhaseSpacePoint, tau: f64) -> PhaseSpacePoint {
    PhaseSpacePoint::new(
        (1.0 - tau) * z.x + tau * u.x,
        tau * z.omega + (1.0 - tau) * u.omega,
    )
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if (0.0..=1.0).contains(&tau) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "tau",
            detail: format!("{tau} not in [0, 1]"),
        })
    }
}

/// `J(z) = (z2, -z1)`.
pub fn j_rot(z: PhaseSpacePoint) -> PhaseSpacePoint {
    PhaseSpacePoint::new(z.omega, -z.x)
}

/// `J^{-1}(t) = (-t2, t1)`.
pub fn j_rot_inv(t: PhaseSpacePoint) -> PhaseSpacePoint {
    PhaseSpacePoint::new(-t.omega, t.x)
}

/// Inverse of `(z, u) -> (T_tau(z, u), J(u - z))`:
/// `z = y - U_tau J^{-1} t`, `u = y + (I - U_tau) J^{-1} t`, `U_tau = diag(tau, 1 - tau)`.
pub fn invert_change_of_variables(
    y: PhaseSpacePoint,
    t: PhaseSpacePoint,
    tau: f64,
) -> Result<(PhaseSpacePoint, PhaseSpacePoint)> {
    check_tau(tau)?;
    let d = j_rot_inv(t);
    let ud = PhaseSpacePoint::new(tau * d.x, (1.0 - tau) * d.omega);
    let z = y - ud;
    let u = y + (d - ud);
    Ok((z, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: f64, w: f64) -> PhaseSpacePoint {
        PhaseSpacePoint::new(x, w)
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::centered(6, 0.1).is_err());
        assert!(Grid::centered(12, 0.1).is_err());
        assert!(Grid::centered(16, 0.0).is_err());
        let g = Grid::centered(16, 0.25).unwrap();
        assert_eq!(g.point(0), -2.0);
        assert_eq!(g.point(8), 0.0);
        let fg = g.frequency_grid();
        assert_eq!(fg.spacing(), 0.25);
        assert_eq!(fg.point(0), -2.0);
        assert_eq!(g.band_edge(), 2.0);
    }

    #[test]
    fn weight_examples() {
        let w2 = WeightSpec::polynomial(2.0);
        assert_eq!(weight_eval(&w2, pt(0.0, 0.0)).unwrap(), 1.0);
        assert!((weight_eval(&w2, pt(1.0, 0.0)).unwrap() - 2.0).abs() < 1e-15);
        let w = weight_eval(&WeightSpec::polynomial(-3.0), pt(0.0, 2.0)).unwrap();
        assert!((w - 5f64.powf(-1.5)).abs() < 1e-15);
        assert!((w - 0.08944).abs() < 1e-5);
        assert!(weight_eval(&w2, pt(f64::NAN, 0.0)).is_err());
        let t = WeightSpec::tensor(1.0, 2.0);
        assert!((t.eval(pt(1.0, 1.0)).unwrap() - 2f64.sqrt() * 2.0).abs() < 1e-14);
    }

    #[test]
    fn moderation_constant_weight() {
        let pairs = vec![(pt(1.0, 2.0), pt(-3.0, 0.5)), (pt(0.0, 0.0), pt(4.0, 4.0))];
        let r = check_moderate(&WeightSpec::unit(), &WeightSpec::unit(), &pairs).unwrap();
        assert_eq!(r.max_ratio, 1.0);
        assert!(check_moderate(&WeightSpec::unit(), &WeightSpec::unit(), &[]).is_err());
    }

    #[test]
    fn peetre_bound_on_grid() {
        // Peetre: <z1 + z2>^2 <= 2 <z1>^2 <z2>^2, so the ratio never exceeds 2.
        let axis: Vec<f64> = (0..20).map(|i| -5.0 + 10.0 * i as f64 / 19.0).collect();
        let pts: Vec<PhaseSpacePoint> = axis
            .iter()
            .flat_map(|&x| axis.iter().map(move |&w| pt(x, w)))
            .collect();
        let pairs: Vec<_> = pts
            .iter()
            .flat_map(|&a| pts.iter().map(move |&b| (a, b)))
            .collect();
        let w = WeightSpec::polynomial(2.0);
        let r = check_moderate(&w, &w, &pairs).unwrap();
        assert!(r.max_ratio <= 2.0, "{}", r.max_ratio);
        assert!(r.max_ratio >= 1.0);
    }

    #[test]
    fn bounded_v_is_not_a_moderating_weight() {
        let pairs = vec![(pt(10.0, 0.0), pt(0.0, 0.0))];
        let r = check_moderate(&WeightSpec::polynomial(1.0), &WeightSpec::unit(), &pairs).unwrap();
        assert!(r.max_ratio >= 101f64.sqrt() - 1e-12);
    }

    #[test]
    fn t_tau_examples() {
        let z = pt(1.0, 2.0);
        let u = pt(3.0, 4.0);
        assert_eq!(t_tau(z, u, 0.0).unwrap(), pt(1.0, 4.0));
        assert_eq!(t_tau(z, u, 1.0).unwrap(), pt(3.0, 2.0));
        assert_eq!(t_tau(z, u, 0.5).unwrap(), pt(2.0, 3.0));
        assert!(t_tau(z, u, 1.5).is_err());
        assert!(t_tau(z, u, -0.1).is_err());
    }

    #[test]
    fn j_examples() {
        assert_eq!(j_rot(pt(1.0, 0.0)), pt(0.0, -1.0));
        assert_eq!(j_rot(pt(0.0, 0.0)), pt(0.0, 0.0));
        assert_eq!(j_rot_inv(j_rot(pt(0.3, -0.7))), pt(0.3, -0.7));
    }

    #[test]
    fn change_of_variables_examples() {
        let (z, u) = invert_change_of_variables(pt(0.0, 0.0), pt(0.0, 0.0), 0.3).unwrap();
        assert_eq!((z, u), (pt(0.0, 0.0), pt(0.0, 0.0)));
        let t = j_rot(pt(2.0, 2.0));
        assert_eq!(t, pt(2.0, -2.0));
        let (z, u) = invert_change_of_variables(pt(1.0, 4.0), t, 0.0).unwrap();
        assert!((z - pt(1.0, 2.0)).norm() < 1e-15);
        assert!((u - pt(3.0, 4.0)).norm() < 1e-15);
    }

    #[test]
    fn tf_shift_identity_and_rejection() {
        let grid = Grid::centered(64, 0.125).unwrap();
        let f = SampledSignal::from_fn(grid, |t| Complex64::new((-t * t).exp(), 0.1 * t)).unwrap();
        assert_eq!(tf_shift(&f, PhaseSpacePoint::ORIGIN).unwrap(), f);
        assert!(matches!(
            tf_shift(&f, pt(4.0, 0.0)),
            Err(Error::ShiftTooLarge { .. })
        ));
        let (_, res) = tf_shift_with_residual(&f, pt(0.13, 0.0)).unwrap();
        assert!((res - 0.005).abs() < 1e-12);
    }

    #[test]
    fn lattice_enumeration() {
        let l = Lattice::new(0.5, 0.25, 2).unwrap();
        assert_eq!(l.count(), 25);
        assert_eq!(l.indices(0), (-2, -2));
        assert_eq!(l.indices(1), (-2, -1));
        assert_eq!(l.indices(24), (2, 2));
        for i in 0..l.count() {
            let (k, m) = l.indices(i);
            assert_eq!(l.position(k, m), Some(i));
        }
        assert_eq!(l.point(2, -1), pt(1.0, -0.25));
        assert!(Lattice::new(0.0, 1.0, 1).is_err());
        assert!(Lattice::new(1.0, 1.0, 0).is_err());
    }

    fn arb_point() -> impl Strategy<Value = PhaseSpacePoint> {
        (-50.0f64..50.0, -50.0f64..50.0).prop_map(|(x, w)| pt(x, w))
    }

    proptest! {
        #[test]
        fn t_tau_affine_symmetry(z in arb_point(), u in arb_point(), tau in 0.0f64..=1.0) {
            let s = t_tau(z, u, tau).unwrap() + t_tau(u, z, tau).unwrap();
            let e = z + u;
            prop_assert!((s - e).norm() <= 1e-14 * (1.0 + e.norm()));
        }

        #[test]
        fn change_of_variables_round_trip(z in arb_point(), u in arb_point(), tau in 0.0f64..=1.0) {
            let y = t_tau(z, u, tau).unwrap();
            let t = j_rot(u - z);
            let (z2, u2) = invert_change_of_variables(y, t, tau).unwrap();
            let scale = 1.0 + z.norm() + u.norm();
            prop_assert!((z2 - z).norm() <= 1e-14 * scale);
            prop_assert!((u2 - u).norm() <= 1e-14 * scale);
            prop_assert!(((u2 - z2) - j_rot_inv(t)).norm() <= 1e-14 * scale);
        }

        #[test]
        fn polynomial_weight_reciprocal(z in arb_point(), s in -6.0f64..6.0) {
            let a = WeightSpec::polynomial(s).eval(z).unwrap();
            let b = WeightSpec::polynomial(-s).eval(z).unwrap();
            prop_assert!((a * b - 1.0).abs() <= 1e-14);
        }

        #[test]
        fn tf_shift_preserves_norm(k in -20i64..20, w in -3.0f64..3.0, seed in 0u64..1000) {
            let grid = Grid::centered(128, 1.0 / 8.0).unwrap();
            let c = seed as f64 * 0.01;
            let f = SampledSignal::from_fn(grid, |t| {
                Complex64::new((-(t - c).powi(2)).exp(), (t * c).sin() * (-t * t).exp())
            }).unwrap();
            let s = tf_shift(&f, pt(k as f64 * grid.spacing(), w)).unwrap();
            prop_assert!((s.norm() - f.norm()).abs() <= 1e-12 * f.norm());
        }
    }
}
