//! Subcommand bodies. Each returns the contract violations it found; artifacts are
//! written either way.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use tfdecay_core::decay::{bj_decay_check, envelope, envelope_norm, tau_sweep, verify_th34};
use tfdecay_core::io::{write_envelope_csv, write_matrix_csv, write_phase_space_csv, write_table_csv, Dump};
use tfdecay_core::norms::{besov_norm, check_embedding, embedding_suite, modulation_norm_decomp, modulation_norm_stft};
use tfdecay_core::phase_space::{invert_change_of_variables, j_rot, PhaseSpacePoint};
use tfdecay_core::quantization::{born_jordan_matrix, compare_routes, gabor_matrix_direct, gabor_matrix_stft};
use tfdecay_core::signals::norm_family;
use tfdecay_core::stft::{adjoint_stft, frame_bounds, stft};
use tfdecay_core::symbols::{eval_symbol, finite_difference_crosscheck, seminorm};
use tfdecay_core::wigner::{born_jordan_dist, tau_wigner, wigner_covariance_check};
use tfdecay_core::{Error, Lattice, PhaseSpaceArray, Quadrature, SymbolSpec, WeightSpec};

use crate::config::{ConfigError, Params, RawConfig, Route};
use crate::output::Artifacts;
use crate::{RunError, RunResult};

type Violations = Vec<String>;

pub fn dispatch(command: &str, p: &Params, raw: &RawConfig) -> RunResult {
    let mut art = Artifacts::create(&p.out, command, raw)?;
    let violations = match command {
        "stft" => cmd_stft(p, &mut art)?,
        "wigner" => cmd_wigner(p, &mut art)?,
        "frames" => cmd_frames(p, &mut art)?,
        "matrix" => cmd_matrix(p, &mut art)?,
        "decay" => cmd_decay(p, &mut art)?,
        "tausweep" => cmd_tausweep(p, &mut art)?,
        "norms" => cmd_norms(p, &mut art)?,
        "embed" => cmd_embed(p, &mut art)?,
        "selftest" => cmd_selftest(p, &mut art)?,
        other => unreachable!("unknown subcommand {other}"),
    };
    art.finish(raw)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(RunError::Contract(violations.join("; ")))
    }
}

fn table(art: &mut Artifacts, name: &str, columns: &[&str], rows: &[Vec<String>]) -> RunResult {
    let hash = art.hash_hex.clone();
    let mut w = art.file(name)?;
    write_table_csv(&mut w, columns, rows, &hash)?;
    w.flush()?;
    Ok(())
}

fn phase_space(art: &mut Artifacts, p: &Params, stem: &str, a: &PhaseSpaceArray) -> RunResult {
    let hash = art.hash_hex.clone();
    let mut w = art.file(&format!("{stem}.csv"))?;
    write_phase_space_csv(&mut w, a, &hash)?;
    w.flush()?;
    if p.binary {
        art.dump(&format!("{stem}.bin"), &Dump::phase_space(a, art.hash))?;
    }
    Ok(())
}

fn quadrature(p: &Params) -> RunResult<Quadrature> {
    Ok(Quadrature::gauss_legendre(p.nodes)?)
}

fn check(violations: &mut Violations, what: &str, value: f64, limit: f64) {
    if value.is_nan() || value > limit {
        violations.push(format!("{what} = {value:e} exceeds {limit:e}"));
    }
}

fn cmd_stft(p: &Params, art: &mut Artifacts) -> RunResult<Violations> {
    let f = p.test_signal();
    let t = Instant::now();
    let v = stft(&f, &p.window, p.x_step, p.padding)?;
    let rec = adjoint_stft(&v, &p.window)?.scaled(Complex64::new(1.0 / p.window.norm_sqr(), 0.0));
    let err = rec.rel_error(&f)?;
    art.time("stft", t);
    phase_space(art, p, "stft", &v)?;
    art.json(
        "stft.json",
        "tfdecay.stft/1",
        &json!({
            "signal": p.signal,
            "x_step": p.x_step,
            "padding": p.padding,
            "n_x": v.n_x(),
            "n_omega": v.n_omega(),
            "max_abs": v.max_abs(),
            "reconstruction_error": err,
        }),
    )?;
    let mut out = Violations::new();
    check(&mut out, "reconstruction error", err, p.tolerance);
    Ok(out)
}

fn rel_dev(a: &[Complex64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).norm())) / scale
}

fn cmd_wigner(p: &Params, art: &mut Artifacts) -> RunResult<Violations> {
    let f = p.test_signal();
    let t = Instant::now();
    let (w, label) = if p.route == Route::BornJordan {
        (born_jordan_dist(&f, &f, &quadrature(p)?)?, format!("born_jordan({})", p.nodes))
    } else {
        (tau_wigner(&f, &f, p.tau)?, format!("{}", p.tau))
    };
    art.time("wigner", t);
    let density: Vec<f64> = f.values().iter().map(|v| v.norm_sqr()).collect();
    let spectral: Vec<f64> = f.spectrum().values().iter().map(|v| v.norm_sqr()).collect();
    let time_err = rel_dev(&w.time_marginal(), &density);
    let freq_err = rel_dev(&w.frequency_marginal(), &spectral);
    phase_space(art, p, "wigner", &w)?;
    art.json(
        "wigner.json",
        "tfdecay.wigner/1",
        &json!({
            "signal": p.signal,
            "tau": label,
            "integral_re": w.integral().re,
            "integral_im": w.integral().im,
            "time_marginal_error": time_err,
            "frequency_marginal_error": freq_err,
        }),
    )?;
    let mut out = Violations::new();
    check(&mut out, "time marginal error", time_err, p.tolerance);
    check(&mut out, "frequency marginal error", freq_err, p.tolerance);
    Ok(out)
}

fn cmd_frames(p: &Params, art: &mut Artifacts) -> RunResult<Violations> {
    let lat = p.lattice();
    let t = Instant::now();
    let rep = match frame_bounds(&p.window, &lat) {
        Err(Error::LatticeGrid(msg)) => {
            return Err(ConfigError {
                field: "beta".into(),
                message: msg,
            }
            .into())
        }
        r => r?,
    };
    art.time("frame_bounds", t);
    let density = 1.0 / (lat.alpha() * lat.beta());
    art.json(
        "frames.json",
        "tfdecay.frames/1",
        &json!({
            "alpha": lat.alpha(),
            "beta": lat.beta(),
            "density": density,
            "report": rep,
            "condition_number": rep.condition_number(),
        }),
    )?;
    table(
        art,
        "frames.csv",
        &["alpha", "beta", "density", "lower", "upper", "condition", "periodic"],
        &[vec![
            lat.alpha().to_string(),
            lat.beta().to_string(),
            density.to_string(),
            rep.lower_bound_estimate.to_string(),
            rep.upper_bound_estimate.to_string(),
            rep.condition_number().to_string(),
            rep.periodic.to_string(),
        ]],
    )?;
    Ok(Violations::new())
}

fn cmd_matrix(p: &Params, art: &mut Artifacts) -> RunResult<Violations> {
    let lat = p.lattice();
    let g = &p.window;
    let t = Instant::now();
    let mut out = Violations::new();
    let mut summary = json!({ "symbol": p.symbol.to_string(), "route": format!("{:?}", p.route).to_lowercase() });
    let m = match p.route {
        Route::Direct => gabor_matrix_direct(&p.symbol, g, &lat, p.tau)?,
        Route::Stft => gabor_matrix_stft(&p.symbol, g, &lat, p.tau)?,
        Route::BornJordan => born_jordan_matrix(&p.symbol, g, &lat, &quadrature(p)?)?,
        Route::Both => {
            let d = gabor_matrix_direct(&p.symbol, g, &lat, p.tau)?;
            let s = gabor_matrix_stft(&p.symbol, g, &lat, p.tau)?;
            let cmp = compare_routes(&d, &s)?;
            check(&mut out, "route deviation", cmp.max_rel_deviation, p.tolerance);
            summary["route_deviation"] = serde_json::to_value(cmp).expect("plain struct");
            d
        }
    };
    art.time("matrix", t);
    summary["tau"] = json!(m.tau);
    summary["size"] = json!(m.size());
    summary["max_abs"] = json!(m.max_abs());
    summary["magnitude_only"] = json!(m.magnitude_only);
    summary["window_id"] = json!(m.window_id);
    let hash = art.hash_hex.clone();
    let mut w = art.file("matrix.csv")?;
    write_matrix_csv(&mut w, &m, &hash)?;
    w.flush()?;
    if p.binary {
        art.dump("matrix.bin", &Dump::gabor_matrix(&m, art.hash))?;
    }
    art.json("matrix.json", "tfdecay.matrix/1", &summary)?;
    Ok(out)
}

fn envelope_artifacts(art: &mut Artifacts, p: &Params, h: &tfdecay_core::LatticeArray) -> RunResult {
    let hash = art.hash_hex.clone();
    let mut w = art.file("envelope.csv")?;
    write_envelope_csv(&mut w, h, &hash)?;
    w.flush()?;
    if p.binary {
        art.dump("envelope.bin", &Dump::envelope(h, art.hash))?;
    }
    Ok(())
}

fn cmd_decay(p: &Params, art: &mut Artifacts) -> RunResult<Violations> {
    let lat = p.lattice();
    let t = Instant::now();
    let mut out = Violations::new();
    if p.route == Route::BornJordan {
        let rep = bj_decay_check(&p.symbol, &p.window, &lat, &quadrature(p)?, p.m, p.q, p.s)?;
        art.time("bj_decay_check", t);
        envelope_artifacts(art, p, &rep.bj_envelope)?;
        art.json("decay.json", "tfdecay.bj_decay_report/1", &rep)?;
        check(&mut out, "domination ratio", rep.domination_ratio, 1.0 + p.tolerance);
        return Ok(out);
    }
    match verify_th34(&p.symbol, &p.window, &lat, p.tau, p.order, p.m) {
        Ok(rep) => {
            art.time("verify", t);
            envelope_artifacts(art, p, &rep.envelope)?;
            art.json("decay.json", "tfdecay.decay_report/1", &rep)?;
        }
        Err(Error::NotInClass { seminorm }) => {
            art.json(
                "decay.json",
                "tfdecay.decay_rejection/1",
                &json!({ "symbol": p.symbol.to_string(), "m": p.m, "n": p.order, "failing_seminorm": seminorm }),
            )?;
            out.push(format!("symbol not in class: {seminorm}"));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

fn cmd_tausweep(p: &Params, art: &mut Artifacts) -> RunResult<Violations> {
    let t = Instant::now();
    let rep = tau_sweep(&p.symbol, &p.window, &p.lattice(), &p.taus, p.m, p.q, p.s)?;
    art.time("tau_sweep", t);
    art.json("tausweep.json", "tfdecay.tau_sweep/1", &rep)?;
    let rows: Vec<Vec<String>> = rep.taus.iter().zip(&rep.norms).map(|(t, n)| vec![t.to_string(), n.to_string()]).collect();
    table(art, "tausweep.csv", &["tau", "norm"], &rows)?;
    Ok(Violations::new())
}

/// Bracket for the STFT and decomposition norms on the signal family.
const NORM_BRACKET: f64 = 10.0;

fn cmd_norms(p: &Params, art: &mut Artifacts) -> RunResult<Violations> {
    let t = Instant::now();
    let params = format!("p={};q={};s={}", p.p, p.q, p.s);
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for (name, f) in norm_family(p.grid)? {
        let a = modulation_norm_stft(&f, &p.window, p.p, p.q, &WeightSpec::tensor(0.0, p.s))?;
        let b = modulation_norm_decomp(&f, p.p, p.q, &WeightSpec::unit(), &WeightSpec::polynomial(p.s))?;
        let c = besov_norm(&f, p.p, p.q, p.s)?;
        for (norm, v) in [("modulation_stft", a), ("modulation_decomp", b), ("besov", c)] {
            rows.push(vec![name.to_string(), norm.to_string(), params.clone(), v.to_string()]);
        }
        ratios.push(b / a);
    }
    art.time("norms", t);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    table(art, "norms.csv", &["signal_id", "norm_name", "parameters", "value"], &rows)?;
    art.json(
        "norms.json",
        "tfdecay.norms/1",
        &json!({ "parameters": params, "decomp_over_stft": ratios, "spread": hi / lo }),
    )?;
    let mut out = Violations::new();
    check(&mut out, "decomposition/STFT spread", hi / lo, NORM_BRACKET);
    Ok(out)
}

fn cmd_embed(p: &Params, art: &mut Artifacts) -> RunResult<Violations> {
    let t = Instant::now();
    let cases = embedding_suite(&p.window, p.seed)?;
    art.time("embedding_suite", t);
    art.json("embed.json", "tfdecay.embedding_suite/1", &cases)?;
    let rows: Vec<Vec<String>> = cases
        .iter()
        .map(|c| {
            vec![
                c.suite.clone(),
                c.name.clone(),
                c.expect_violation.to_string(),
                c.report.violated.to_string(),
                c.report.growth.to_string(),
                c.report.max_ratio.to_string(),
                c.report.min_ratio.to_string(),
            ]
        })
        .collect();
    table(
        art,
        "embed.csv",
        &["suite", "name", "expect_violation", "violated", "growth", "max_ratio", "min_ratio"],
        &rows,
    )?;
    Ok(cases
        .iter()
        .filter(|c| !c.as_expected())
        .map(|c| format!("{}/{}: violated = {}", c.suite, c.name, c.report.violated))
        .collect())
}

#[derive(Serialize)]
struct SelfCheck {
    module: &'static str,
    check: &'static str,
    deviation: f64,
    tolerance: f64,
    pass: bool,
}

fn cmd_selftest(p: &Params, art: &mut Artifacts) -> RunResult<Violations> {
    let t = Instant::now();
    let g = &p.window;
    let grid = p.grid;
    let lat = Lattice::new(p.alpha, p.beta, p.radius.min(2)).expect("validated");
    let origin = PhaseSpacePoint::new(0.0, 0.0);
    let z = PhaseSpacePoint::new(0.7, -1.3);
    let mut checks: Vec<(&'static str, &'static str, f64, f64)> = Vec::new();

    checks.push(("phase_space", "J(0,0) = (0,0)", j_rot(origin).norm(), 0.0));
    let (a, b) = invert_change_of_variables(origin, origin, p.tau)?;
    checks.push(("phase_space", "change of variables at the origin", a.norm() + b.norm(), 0.0));

    checks.push(("stft_frames", "<g, g> = 1", (g.inner(g)? - 1.0).norm(), 1e-12));
    let zero = PhaseSpaceArray::zeros(grid, grid.frequency_grid());
    checks.push(("stft_frames", "adjoint of zero is zero", adjoint_stft(&zero, g)?.norm(), 0.0));

    checks.push(("wigner", "covariance at w = 0", wigner_covariance_check(g, origin, 0.5)?, 1e-14));

    let one = SymbolSpec::Constant(1.0);
    checks.push(("symbols", "constant(1) value", (eval_symbol(&one, z, (0, 0))? - 1.0).norm(), 0.0));
    checks.push(("symbols", "constant(1) derivative", eval_symbol(&one, z, (1, 0))?.norm(), 0.0));
    let c = seminorm(&SymbolSpec::Constant(2.5), 3, 0.0, 4.0, 33)?;
    let flag = if c.divergence_flag { 1.0 } else { 0.0 };
    checks.push(("symbols", "|constant(2.5)|_{3,0} = 2.5", (c.value - 2.5).abs() + flag, 1e-12));
    let bp = seminorm(&SymbolSpec::BracketPower(2.0), 0, 2.0, 4.0, 33)?;
    let flag = if bp.divergence_flag { 1.0 } else { 0.0 };
    checks.push(("symbols", "|bracket_power(2)|_{0,2} = 1", (bp.value - 1.0).abs() + flag, 1e-12));
    checks.push((
        "symbols",
        "finite differences of a constant",
        finite_difference_crosscheck(&SymbolSpec::Constant(2.5), z, (1, 1), 1e-2)?,
        1e-12,
    ));

    let gram = gabor_matrix_direct(&one, g, &lat, 0.5)?;
    let bj = born_jordan_matrix(&one, g, &lat, &Quadrature::gauss_legendre(4)?)?;
    checks.push(("quantization", "Born-Jordan of constant(1) is the Gram matrix", bj.max_abs_diff(&gram)?, 1e-10));

    let f = p.test_signal();
    let two = f.scaled(Complex64::new(0.0, 2.0));
    let w = WeightSpec::tensor(0.0, 1.0);
    let (n1, n2) = (modulation_norm_stft(&f, g, 2.0, 1.0, &w)?, modulation_norm_stft(&two, g, 2.0, 1.0, &w)?);
    checks.push(("norms", "homogeneity", (n2 - 2.0 * n1).abs() / n2, 1e-12));
    let same = check_embedding(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0])?;
    let flag = if same.violated { 1.0 } else { 0.0 };
    checks.push(("norms", "identical norms embed", (same.max_ratio - 1.0).abs() + flag, 1e-15));

    let zero_sym = gabor_matrix_direct(&SymbolSpec::Constant(0.0), g, &lat, 0.5)?;
    checks.push(("decay", "zero matrix has zero envelope", envelope_norm(&envelope(&zero_sym, 0.0)?, 1.0, 3.0)?, 0.0));
    let single = tau_sweep(&SymbolSpec::BracketPower(1.0), g, &lat, &[0.5], 1.0, 1.0, 3.0)?;
    checks.push(("decay", "single tau sweep", (single.max_over_tau - single.norms[0]).abs(), 0.0));
    let bjrep = bj_decay_check(&one, g, &lat, &Quadrature::gauss_legendre(4)?, 0.0, 1.0, 3.0)?;
    let id = envelope(&gram, 0.0)?;
    let dev = bjrep
        .bj_envelope
        .values()
        .iter()
        .zip(id.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    checks.push(("decay", "Born-Jordan envelope of constant(1)", dev, 1e-10));
    art.time("selftest", t);

    let results: Vec<SelfCheck> = checks
        .into_iter()
        .map(|(module, check, deviation, tolerance)| SelfCheck {
            module,
            check,
            deviation,
            tolerance,
            pass: deviation <= tolerance,
        })
        .collect();
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.module.to_string(),
                format!("\"{}\"", r.check),
                r.deviation.to_string(),
                r.tolerance.to_string(),
                r.pass.to_string(),
            ]
        })
        .collect();
    table(art, "selftest.csv", &["module", "check", "deviation", "tolerance", "pass"], &rows)?;
    art.json("selftest.json", "tfdecay.selftest/1", &results)?;
    Ok(results
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}: {} ({:e})", r.module, r.check, r.deviation))
        .collect())
}
