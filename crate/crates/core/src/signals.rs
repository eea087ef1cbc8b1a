//! Test signal families on a grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::phase_space::{tf_shift, Grid, PhaseSpacePoint, SampledSignal};
use crate::stft::gaussian_window;

/// `exp(-pi (t - x0)^2 / w^2 + 2 pi i omega0 t + pi i c t^2)`, unit norm.
pub fn gaussian_atom(grid: Grid, width: f64, x0: f64, omega0: f64, chirp: f64) -> Result<SampledSignal> {
    SampledSignal::from_fn(grid, |t| {
        let s = (t - x0) / width;
        Complex64::from_polar((-PI * s * s).exp(), 2.0 * PI * omega0 * t + PI * chirp * t * t)
    })?
    .normalized()
}

/// `t exp(-pi t^2)`, unit norm.
pub fn hermite_like(grid: Grid) -> Result<SampledSignal> {
    SampledSignal::from_fn(grid, |t| Complex64::new(t * (-PI * t * t).exp(), 0.0))?.normalized()
}

/// `(4 pi t^2 - 1) exp(-pi t^2)`, unit norm.
pub fn hermite2_like(grid: Grid) -> Result<SampledSignal> {
    SampledSignal::from_fn(grid, |t| Complex64::new((4.0 * PI * t * t - 1.0) * (-PI * t * t).exp(), 0.0))?
        .normalized()
}

/// Random superposition of `atoms` time-frequency shifted Gaussians with
/// centers in `|x| <= spread`, `|omega| <= spread`; unit norm.
pub fn random_atoms(grid: Grid, atoms: usize, spread: f64, seed: u64) -> Result<SampledSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_window(grid, 0.8)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for _ in 0..atoms {
        let x = grid.spacing() * (rng.random_range(-spread..=spread) / grid.spacing()).round();
        let w = rng.random_range(-spread..=spread);
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let a = tf_shift(&g, PhaseSpacePoint::new(x, w))?;
        for (s, v) in acc.iter_mut().zip(a.values()) {
            *s += c * v;
        }
    }
    SampledSignal::new(grid, acc)?.normalized()
}

/// Labels of [`norm_family`], in order.
pub const NORM_FAMILY: [&str; 10] = [
    "gauss_w1",
    "gauss_w0.7",
    "gauss_w1.5",
    "gauss_x1.5",
    "gauss_w2",
    "hermite1",
    "hermite2",
    "chirp1",
    "chirp2",
    "tf_shift",
];

/// One member of the norm family by label.
pub fn family_member(grid: Grid, name: &str) -> Result<SampledSignal> {
    match name {
        "gauss_w1" => gaussian_atom(grid, 1.0, 0.0, 0.0, 0.0),
        "gauss_w0.7" => gaussian_atom(grid, 0.7, 0.0, 0.0, 0.0),
        "gauss_w1.5" => gaussian_atom(grid, 1.5, 0.0, 0.0, 0.0),
        "gauss_x1.5" => gaussian_atom(grid, 1.0, 1.5, 0.0, 0.0),
        "gauss_w2" => gaussian_atom(grid, 1.0, 0.0, 2.0, 0.0),
        "hermite1" => hermite_like(grid),
        "hermite2" => hermite2_like(grid),
        "chirp1" => gaussian_atom(grid, 1.0, 0.0, 0.0, 1.0),
        "chirp2" => gaussian_atom(grid, 1.0, 0.0, 0.0, 2.0),
        "tf_shift" => gaussian_atom(grid, 1.0, 1.0, -1.5, 0.0),
        other => Err(Error::OutOfRange {
            name: "signal",
            detail: format!("unknown signal `{other}`"),
        }),
    }
}

/// The ten-signal family used by the norm comparisons, with labels.
pub fn norm_family(grid: Grid) -> Result<Vec<(&'static str, SampledSignal)>> {
    NORM_FAMILY.iter().map(|&n| Ok((n, family_member(grid, n)?))).collect()
}

/// Modulations `M_w g` of a width-1.5 Gaussian at `w` in `{0, 1, 2, 4, 7}`, in increasing order.
pub fn modulation_family(grid: Grid) -> Result<Vec<SampledSignal>> {
    [0.0, 1.0, 2.0, 4.0, 7.0]
        .iter()
        .map(|&w| gaussian_atom(grid, 1.5, 0.0, w, 0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_is_normalized_and_deterministic() {
        let grid = Grid::centered(256, 1.0 / 16.0).unwrap();
        let fam = norm_family(grid).unwrap();
        assert_eq!(fam.len(), 10);
        for (name, f) in &fam {
            assert!((f.norm() - 1.0).abs() < 1e-12, "{name}");
        }
        let a = random_atoms(grid, 6, 2.0, 7).unwrap();
        let b = random_atoms(grid, 6, 2.0, 7).unwrap();
        assert_eq!(a, b);
    }
}
