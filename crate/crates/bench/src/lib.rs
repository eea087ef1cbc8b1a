//! Shared fixtures for the benches.

use tfdecay_core::signals::family_member;
use tfdecay_core::stft::gaussian_window;
use tfdecay_core::{Grid, Lattice, SampledSignal};

pub fn grid(n: usize) -> Grid {
    Grid::centered(n, 1.0 / 16.0).expect("power of two")
}

pub fn window(n: usize) -> SampledSignal {
    gaussian_window(grid(n), 1.0).expect("resolved window")
}

pub fn chirp(n: usize) -> SampledSignal {
    family_member(grid(n), "chirp1").expect("family member")
}

pub fn lattice(radius: usize) -> Lattice {
    Lattice::new(0.5, 0.5, radius).expect("valid lattice")
}
