use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tfdecay_core::io::{read_dump, DumpKind};

fn scratch(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn tfdecay(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfdecay"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn selftest_on_defaults() {
    let out = scratch("selftest");
    let r = tfdecay(&out, &["selftest"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let doc = json(out.join("selftest.json"));
    let checks = doc["data"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    let modules: std::collections::BTreeSet<&str> = checks.iter().map(|c| c["module"].as_str().unwrap()).collect();
    for m in ["phase_space", "stft_frames", "wigner", "symbols", "quantization", "norms", "decay"] {
        assert!(modules.contains(m), "{m}");
    }
}

#[test]
fn matrix_route_both_reports_deviation() {
    let out = scratch("matrix");
    let r = tfdecay(&out, &["matrix", "--symbol", "bracket_power(1)", "--tau", "0.5", "--route", "both", "--radius", "4"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let doc = json(out.join("matrix.json"));
    assert_eq!(doc["schema"], "tfdecay.matrix/1");
    assert!(doc["data"]["route_deviation"]["max_rel_deviation"].as_f64().unwrap() <= 1e-6);
    let csv = std::fs::read_to_string(out.join("matrix.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("lambda_k,lambda_l,mu_k,mu_l,re,im,abs"));
    assert_eq!(csv.lines().count(), 2 + 81 * 81);
}

#[test]
fn decay_of_identity_symbol() {
    let out = scratch("decay");
    let r = tfdecay(&out, &["decay", "--symbol", "constant(1)", "--m", "0", "--n", "4"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let doc = json(out.join("decay.json"));
    assert_eq!(doc["schema"], "tfdecay.decay_report/1");
    assert!(doc["data"]["fitted_order"].as_f64().unwrap() > 6.0);
    assert_eq!(doc["data"]["n"], 4);

    let hash = doc["config_hash"].as_str().unwrap().to_string();
    let dump = read_dump(&mut std::fs::File::open(out.join("envelope.bin")).unwrap()).unwrap();
    assert_eq!(dump.kind, DumpKind::Envelope);
    assert_eq!(hex(&dump.config_hash), hash);
    let csv = std::fs::read_to_string(out.join("envelope.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), format!("# config_hash={hash}"));
}

fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

#[test]
fn non_member_exits_with_contract_violation() {
    let out = scratch("chirp");
    let r = tfdecay(&out, &["decay", "--symbol", "chirp(1)", "--n", "1", "--radius", "3"]);
    assert_eq!(r.status.code(), Some(3));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("|chirp(1)|_{1,0}"), "{err}");
    assert_eq!(json(out.join("decay.json"))["schema"], "tfdecay.decay_rejection/1");
    assert!(out.join("run_manifest.json").exists());
}

#[test]
fn config_errors_name_one_field() {
    for (args, field) in [
        (&["stft", "--samples", "100"][..], "samples"),
        (&["matrix", "--route", "both", "--tau", "0.3"][..], "tau"),
        (&["decay", "--n", "7"][..], "n"),
        (&["frames", "--beta", "3", "--radius", "2"][..], "beta"),
        (&["norms", "--q", "-1"][..], "q"),
    ] {
        let out = scratch("config-error");
        let r = tfdecay(&out, args);
        assert_eq!(r.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&r.stderr);
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.contains(&format!("field `{field}`")), "{err}");
    }
    let r = tfdecay(&scratch("unknown"), &["stft", "--no-such-flag", "1"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let out = scratch("precedence");
    std::fs::create_dir_all(&out).unwrap();
    let cfg = out.join("run.cfg");
    std::fs::write(&cfg, "# sweep\nradius = 3\ntau = 0.25\nsymbol = trig(1, 1)\n").unwrap();
    let r = tfdecay(&out, &["tausweep", "--config", cfg.to_str().unwrap(), "--radius", "2"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let manifest = json(out.join("run_manifest.json"));
    assert_eq!(manifest["config"]["radius"], "2");
    assert_eq!(manifest["config"]["tau"], "0.25");
    assert_eq!(manifest["config"]["symbol"], "trig(1, 1)");
    assert!(manifest["config"].get("threads").is_none());
    assert_eq!(manifest["artifacts"], serde_json::json!(["tausweep.csv", "tausweep.json"]));

    std::fs::write(&cfg, "radius = 3\nwidth = 2\n").unwrap();
    let r = tfdecay(&out, &["tausweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("field `width`"));
}

#[test]
fn every_command_writes_a_manifest() {
    for (cmd, extra) in [
        ("stft", &["--x-step", "2", "--padding", "2"][..]),
        ("wigner", &["--route", "bj", "--nodes", "4"][..]),
        ("frames", &["--beta", "1"][..]),
        ("norms", &["--s", "2"][..]),
    ] {
        let out = scratch(cmd);
        let mut args = vec![cmd];
        args.extend_from_slice(extra);
        let r = tfdecay(&out, &args);
        assert_eq!(r.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&r.stderr));
        let m = json(out.join("run_manifest.json"));
        assert_eq!(m["schema"], "tfdecay.run_manifest/1");
        assert_eq!(m["command"], cmd);
        assert!(out.join("timings.log").exists());
        for a in m["artifacts"].as_array().unwrap() {
            let name = a.as_str().unwrap();
            let bytes = std::fs::read(out.join(name)).unwrap();
            let h = m["config_hash"].as_str().unwrap();
            if name.ends_with(".csv") {
                assert!(String::from_utf8_lossy(&bytes).starts_with(&format!("# config_hash={h}\n")));
            } else if name.ends_with(".json") {
                assert_eq!(json(out.join(name))["config_hash"], h);
            } else {
                assert_eq!(hex(&bytes[56..88]), h);
            }
        }
    }
}
