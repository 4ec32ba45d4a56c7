//! End-to-end runs of the `couette-lab` binary.

use sha2::{Digest, Sha256};
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

const SEEDED: &str = "
seed = [[1, 1.0, 1.0, 0.3], [2, -2.0, 0.5]]

[grid]
k_max = 3
eta_max = 8.0
l_y = 3.141592653589793

[sim]
epsilon = 0.0
dt = 0.1
t_end = 2.0
";

fn lab(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_couette-lab"));
    cmd.args(args).env_remove("COUETTE_LAB_OUT");
    if let Some(dir) = env_out {
        cmd.env("COUETTE_LAB_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &TempDir, text: &str) -> String {
    let path = dir.path().join("lab.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn weight_profile_shows_the_resonant_dip() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("w");
    let o = lab(
        &[
            "weight",
            "-o",
            out.to_str().unwrap(),
            "-s",
            "weight_profile.mu=4",
            "-s",
            "weight_profile.ks=[2]",
            "-s",
            "weight_profile.eta=400",
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (h, rows) = csv(&out.join("weight_profile.csv"));
    let (t, w, w_nr) = (column(&h, "t"), column(&h, "w"), column(&h, "w_nr"));
    let dip =
        |row: &Vec<String>| row[w].parse::<f64>().unwrap() / row[w_nr].parse::<f64>().unwrap();
    let at = |time: f64| {
        rows.iter()
            .find(|r| r[t].parse::<f64>().unwrap() == time)
            .unwrap()
    };
    assert!((dip(at(200.0)) - 0.01).abs() < 1e-12);
    // the dip is confined to the resonant interval around t = 200
    assert!(dip(at(100.0)) == 1.0 && dip(at(300.0)) == 1.0);
    assert!(dip(at(180.0)) > 0.01 && dip(at(220.0)) > 0.01);
}

#[test]
fn manifest_hashes_every_artifact() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("m");
    let o = lab(
        &[
            "weight",
            "-o",
            out.to_str().unwrap(),
            "-s",
            "weight_profile.samples=11",
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let manifest = json(&out.join("manifest.json"));
    let entries = manifest.as_array().unwrap();
    assert_eq!(entries.len(), 2);
    for e in entries {
        let bytes = std::fs::read(out.join(e["file"].as_str().unwrap())).unwrap();
        assert_eq!(e["bytes"].as_u64().unwrap(), bytes.len() as u64);
        assert_eq!(
            e["sha256"].as_str().unwrap(),
            hex::encode(Sha256::digest(&bytes))
        );
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        &SEEDED
            .replace("epsilon = 0.0", "epsilon = 1e-3")
            .replace("seed = ", "profile = { k_modes = 2, width = 1.0 }\nseed = "),
    );
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = tmp.path().join(name);
            let o = lab(
                &[
                    "simulate",
                    "-c",
                    &cfg,
                    "-o",
                    out.to_str().unwrap(),
                    "-s",
                    "sim.snapshot_every=10",
                ],
                None,
            );
            assert_eq!(code(&o), 0, "{}", stderr(&o));
            out
        })
        .collect();
    let a = std::fs::read_to_string(runs[0].join("manifest.json")).unwrap();
    assert_eq!(
        a,
        std::fs::read_to_string(runs[1].join("manifest.json")).unwrap()
    );
    assert!(a.contains("snapshot_000010.bin") && a.contains("final.bin"));
}

#[test]
fn verify_trichotomy_has_no_uncovered_tuples() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("v");
    let o = lab(
        &[
            "verify",
            "--lemma",
            "TRICHOTOMY",
            "-o",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = json(&out.join("TRICHOTOMY.json"));
    assert_eq!(report["uncovered"].as_u64(), Some(0));
    assert!(report["samples"].as_u64().unwrap() >= 100_000);
    let (h, rows) = csv(&out.join("verify_summary.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][column(&h, "pass")], "true");
}

#[test]
fn verify_exits_one_when_a_ceiling_is_exceeded() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("v");
    let o = lab(
        &[
            "verify",
            "--lemma",
            "J_GENERAL",
            "-o",
            out.to_str().unwrap(),
            "-s",
            "sweep.samples=2000",
            "-s",
            "sweep.ceiling=1e-3",
        ],
        None,
    );
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(out.join("J_GENERAL.json").exists());
}

#[test]
fn verify_runs_toolbox_checks() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("t");
    let o = lab(
        &[
            "verify",
            "--tool",
            "triangle_s",
            "-o",
            out.to_str().unwrap(),
            "-s",
            "sweep.samples=2000",
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.join("TRIANGLE_S.json").exists());
}

#[test]
fn zero_amplitude_run_is_flat_zero() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, SEEDED);
    let out = tmp.path().join("z");
    let o = lab(&["simulate", "-c", &cfg, "-o", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (h, rows) = csv(&out.join("energy.csv"));
    assert_eq!(rows.len(), 21);
    for name in ["energy", "l2", "norm_ux", "norm_uy", "nonlinear"] {
        let c = column(&h, name);
        assert!(
            rows.iter().all(|r| r[c].parse::<f64>().unwrap() == 0.0),
            "{name}"
        );
    }
}

#[test]
fn blow_up_is_a_numerical_abort() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        &tmp,
        "[grid]\nk_max = 4\neta_max = 16.0\nl_y = 3.141592653589793\n[sim]\nepsilon = 1e3\nt_end = 20.0\n[profile]\nk_modes = 2\nwidth = 1.0\n",
    );
    let out = tmp.path().join("x");
    let o = lab(&["simulate", "-c", &cfg, "-o", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("numerical abort"));
    // partial results are still written
    assert!(out.join("energy.csv").exists() && out.join("manifest.json").exists());
}

#[test]
fn invalid_override_names_its_key() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, SEEDED);
    let out = tmp.path().join("bad");
    for (arg, key) in [
        ("sim.dt=-1", "sim.dt"),
        ("grid.bogus=1", "grid.bogus"),
        ("sim.policy=sideways", "sim.policy"),
        ("weight.sigma=5", "weight.sigma"),
    ] {
        let o = lab(
            &[
                "simulate",
                "-c",
                &cfg,
                "-o",
                out.to_str().unwrap(),
                "-s",
                "sim.t_end=1",
                "-s",
                arg,
            ],
            None,
        );
        assert_eq!(code(&o), 2, "{arg}");
        assert!(stderr(&o).contains(key), "{arg}: {}", stderr(&o));
    }
    assert!(!out.exists());
    let o = lab(
        &["toy", "-o", out.to_str().unwrap(), "-s", "toy.gamma"],
        None,
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("toy.gamma"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("u");
    let o = lab(&["transmogrify"], None);
    assert_eq!(code(&o), 2);
    let o = lab(
        &["verify", "--lemma", "NOPE", "-o", out.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("NOPE"));
    let bad = write_config(&tmp, "[grid\nk_max = 3");
    let o = lab(&["simulate", "-c", &bad, "-o", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("lab.toml"));
    // without seeds or a profile there is nothing to evolve
    let o = lab(&["simulate", "-o", out.to_str().unwrap()], None);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("seed"));
}

#[test]
fn unwritable_output_exits_two() {
    let tmp = TempDir::new().unwrap();
    let file = tmp.path().join("plain");
    std::fs::write(&file, "x").unwrap();
    let o = lab(&["toy", "-o", file.join("sub").to_str().unwrap()], None);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("plain"));
}

#[test]
fn output_directory_from_environment_and_flag() {
    let tmp = TempDir::new().unwrap();
    let env_dir = tmp.path().join("env");
    let flag_dir = tmp.path().join("flag");
    let args = ["weight", "-s", "weight_profile.samples=3"];
    assert_eq!(code(&lab(&args, Some(&env_dir))), 0);
    assert!(env_dir.join("manifest.json").exists());
    let mut with_flag = args.to_vec();
    with_flag.extend(["-o", flag_dir.to_str().unwrap()]);
    std::fs::remove_dir_all(&env_dir).unwrap();
    assert_eq!(code(&lab(&with_flag, Some(&env_dir))), 0);
    assert!(flag_dir.join("manifest.json").exists());
    assert!(!env_dir.exists());
}

#[test]
fn linear_reports_damping_slopes() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("l");
    let o = lab(
        &[
            "linear",
            "-o",
            out.to_str().unwrap(),
            "-s",
            "grid.eta_max=64",
            "-s",
            "grid.l_y=12.566370614359172",
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let slopes = json(&out.join("slopes.json"));
    assert!((slopes["slope_ux"].as_f64().unwrap() + 1.0).abs() <= 0.1);
    assert!((slopes["slope_uy"].as_f64().unwrap() + 2.0).abs() <= 0.1);
    let (_, rows) = csv(&out.join("damping.csv"));
    assert_eq!(rows.len(), 200);
}

#[test]
fn toy_writes_trajectory_and_envelope() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("t");
    let o = lab(
        &["toy", "-o", out.to_str().unwrap(), "-s", "toy.gamma=4"],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let env = json(&out.join("envelope.json"));
    assert_eq!(env["gamma"].as_f64(), Some(4.0));
    assert!(env["fitted"]["overall"].as_f64().unwrap().is_finite());
    let (h, rows) = csv(&out.join("trajectory.csv"));
    assert_eq!(h, ["tau", "f_r", "f_nr"]);
    assert!(rows.len() > 100);
}
