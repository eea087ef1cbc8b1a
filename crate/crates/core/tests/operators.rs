use num_complex::Complex64;
use tfdecay_core::phase_space::tf_shift;
use tfdecay_core::quantization::{apply_operator, born_jordan_matrix, gabor_matrix_direct, gabor_matrix_stft};
use tfdecay_core::signals::{gaussian_atom, random_atoms};
use tfdecay_core::stft::gaussian_window;
use tfdecay_core::{Grid, Lattice, Quadrature, SampledSignal, SymbolSpec};

fn desk() -> Grid {
    Grid::centered(256, 1.0 / 16.0).unwrap()
}

fn rel_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).norm())) / scale
}

/// `<A pi(mu) g, pi(lambda) g>` for an operator given as a closure on signals.
fn oracle_matrix(g: &SampledSignal, lat: &Lattice, op: impl Fn(&SampledSignal) -> SampledSignal) -> Vec<Complex64> {
    let atoms: Vec<SampledSignal> = (0..lat.count()).map(|i| tf_shift(g, lat.point_at(i)).unwrap()).collect();
    let images: Vec<SampledSignal> = atoms.iter().map(&op).collect();
    let mut out = Vec::new();
    for a in &atoms {
        for im in &images {
            out.push(im.inner(a).unwrap());
        }
    }
    out
}

#[test]
fn multiplication_symbol_is_tau_independent() {
    let g = gaussian_window(desk(), 1.0).unwrap();
    let lat = Lattice::new(0.5, 0.5, 3).unwrap();
    let sym = SymbolSpec::separable_x(1.0);
    let oracle = oracle_matrix(&g, &lat, |f| {
        SampledSignal::from_fn(*f.grid(), |t| {
            let i = f.grid().index_of(t).unwrap();
            f.values()[i] * (-t * t).exp()
        })
        .unwrap()
    });
    for tau in [0.0, 0.5, 1.0] {
        let m = gabor_matrix_direct(&sym, &g, &lat, tau).unwrap();
        assert!(rel_dev(m.entries(), &oracle) < 1e-7, "tau={tau}");
    }
}

#[test]
fn fourier_multiplier_symbol() {
    let grid = desk();
    let g = gaussian_window(grid, 1.0).unwrap();
    let lat = Lattice::new(0.5, 0.5, 3).unwrap();
    let sym = SymbolSpec::separable_omega(0.5);
    let fg = grid.frequency_grid();
    let oracle = oracle_matrix(&g, &lat, |f| {
        let dft = grid.dft();
        let mut s = dft.forward(f.values());
        for (q, v) in s.iter_mut().enumerate() {
            let w = fg.point(q);
            *v *= (-0.5 * w * w).exp();
        }
        dft.inverse_in_place(&mut s);
        SampledSignal::new(grid, s).unwrap()
    });
    for tau in [0.0, 0.5, 1.0] {
        let m = gabor_matrix_direct(&sym, &g, &lat, tau).unwrap();
        assert!(rel_dev(m.entries(), &oracle) < 1e-7, "tau={tau}");
    }
}

#[test]
fn identity_magnitudes_follow_the_gaussian_stft() {
    let g = gaussian_window(desk(), 1.0).unwrap();
    let lat = Lattice::new(0.5, 0.5, 3).unwrap();
    let m = gabor_matrix_stft(&SymbolSpec::Constant(1.0), &g, &lat, 0.5).unwrap();
    for (r, (k, l)) in lat.iter().enumerate() {
        for (c, (k2, l2)) in lat.iter().enumerate() {
            let d = lat.point(k, l) - lat.point(k2, l2);
            let exact = (-std::f64::consts::PI * (d.x * d.x + d.omega * d.omega) / 2.0).exp();
            assert!((m.get(r, c).norm() - exact).abs() < 1e-8);
        }
    }
}

#[test]
fn tau_sensitivity() {
    let g = gaussian_window(desk(), 1.0).unwrap();
    let lat = Lattice::new(0.5, 0.5, 3).unwrap();
    let trig = SymbolSpec::Trig { a: 1.0, b: 1.0 };
    let a = gabor_matrix_direct(&trig, &g, &lat, 0.0).unwrap();
    let b = gabor_matrix_direct(&trig, &g, &lat, 1.0).unwrap();
    assert!(a.max_abs_diff(&b).unwrap() > 1e-3);
    let sx = SymbolSpec::separable_x(1.0);
    let a = gabor_matrix_direct(&sx, &g, &lat, 0.0).unwrap();
    let b = gabor_matrix_direct(&sx, &g, &lat, 1.0).unwrap();
    assert!(a.max_abs_diff(&b).unwrap() < 1e-7 * a.max_abs());
}

#[test]
fn born_jordan_of_multiplication_and_quadrature_convergence() {
    let g = gaussian_window(desk(), 1.0).unwrap();
    let lat = Lattice::new(0.5, 0.5, 3).unwrap();
    let sx = SymbolSpec::separable_x(1.0);
    let bj = born_jordan_matrix(&sx, &g, &lat, &Quadrature::gauss_legendre(4).unwrap()).unwrap();
    let weyl = gabor_matrix_direct(&sx, &g, &lat, 0.5).unwrap();
    assert!(bj.max_abs_diff(&weyl).unwrap() < 1e-7 * weyl.max_abs());

    let bp = SymbolSpec::BracketPower(1.0);
    let a = born_jordan_matrix(&bp, &g, &lat, &Quadrature::gauss_legendre(8).unwrap()).unwrap();
    let b = born_jordan_matrix(&bp, &g, &lat, &Quadrature::gauss_legendre(16).unwrap()).unwrap();
    assert!(a.max_abs_diff(&b).unwrap() < 1e-8);
}

#[test]
fn identity_operator_reproduces_localized_signals() {
    let grid = desk();
    let g = gaussian_window(grid, 1.0).unwrap();
    let f = gaussian_atom(grid, 0.7, 0.5, 0.5, 0.3).unwrap();
    let mut errs = Vec::new();
    for radius in [4, 6, 8] {
        let lat = Lattice::new(0.5, 0.5, radius).unwrap();
        let m = gabor_matrix_direct(&SymbolSpec::Constant(1.0), &g, &lat, 0.5).unwrap();
        errs.push(apply_operator(&m, &f, &g).unwrap().rel_error(&f).unwrap());
    }
    assert!(errs[2] <= 1e-2, "{errs:?}");
    // past radius 6 the frame ripple of the non-tight system dominates
    assert!(errs[0] > errs[1] && errs[2] <= 1.05 * errs[1], "{errs:?}");
}

#[test]
fn multiplication_operator_application() {
    let grid = desk();
    let g = gaussian_window(grid, 1.0).unwrap();
    let f = gaussian_atom(grid, 1.0, -0.5, 1.0, 0.0).unwrap();
    let lat = Lattice::new(0.5, 0.5, 8).unwrap();
    let m = gabor_matrix_direct(&SymbolSpec::separable_x(1.0), &g, &lat, 0.0).unwrap();
    let expected = SampledSignal::from_fn(grid, |t| {
        f.values()[grid.index_of(t).unwrap()] * (-t * t).exp()
    })
    .unwrap();
    assert!(apply_operator(&m, &f, &g).unwrap().rel_error(&expected).unwrap() <= 1e-2);
}

#[test]
fn operator_norm_is_uniform_in_tau() {
    let grid = desk();
    let g = gaussian_window(grid, 1.0).unwrap();
    let lat = Lattice::new(0.5, 0.5, 6).unwrap();
    let sym = SymbolSpec::Trig { a: 1.0, b: 1.0 };
    let inputs: Vec<SampledSignal> = (0..20).map(|s| random_atoms(grid, 4, 1.5, s).unwrap()).collect();
    let mut sups = Vec::new();
    for tau in [0.0, 0.5, 1.0] {
        let m = gabor_matrix_direct(&sym, &g, &lat, tau).unwrap();
        let sup = inputs
            .iter()
            .map(|f| apply_operator(&m, f, &g).unwrap().norm())
            .fold(0.0f64, f64::max);
        sups.push(sup);
    }
    let hi = sups.iter().cloned().fold(0.0f64, f64::max);
    let lo = sups.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi < 2.0 && hi / lo < 1.5, "{sups:?}");
}
