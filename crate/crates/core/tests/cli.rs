use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use geoconnect::cli::read_table;

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoconnect")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn toml_file(path: &Path) -> toml::Table {
    std::fs::read_to_string(path).unwrap().parse().unwrap()
}

fn float(table: &toml::Table, section: &str, key: &str) -> f64 {
    let value = match section {
        "" => &table[key],
        s => &table[s][key],
    };
    value.as_float().unwrap()
}

#[test]
fn verify_reproduces_reported_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for name in ["flat-lightlike", "stationary-flat"] {
        let file = scenario(&format!("{name}.scn"));
        let res = run(&["connect", "--out", out, &file]);
        assert_eq!(code(&res), 0, "{}", stderr(&res));
        let verdict = toml_file(&dir.path().join(name).join("verdict.toml"));
        assert_eq!(verdict["verdict"].as_str(), Some("Geodesic"));
        let path = dir.path().join(name).join("path.csv");
        let res = run(&["verify", "--out", out, "--path", path.to_str().unwrap(), &file]);
        assert_eq!(code(&res), 0, "{}", stderr(&res));
        let report = toml_file(&dir.path().join(name).join("verify.toml"));
        let (a, b) = (float(&verdict, "geodesic", "residual"), float(&report, "", "residual"));
        assert!((a - b).abs() <= 1e-12, "{name}: {a} vs {b}");
        assert_ne!(report["condition_ii"].as_str(), Some("sign-change"));
        assert_eq!(report["passed"].as_bool(), Some(true));
    }
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        assert_eq!(code(&run(&["connect", "--out", out, "--seed", "7", &scenario("gpw-oscillator.scn")])), 0);
        assert_eq!(code(&run(&["sweep", "--out", out, "--seed", "7", &scenario("flat-lightlike.scn")])), 0);
        assert_eq!(code(&run(&["obstruct", "--out", out, "--seed", "7", &scenario("slit-plane.scn")])), 2);
    }
    for file in ["gpw-oscillator/path.csv", "flat-lightlike/sweep.csv", "slit-plane/certificate.toml"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{file} differs between runs");
    }
}

#[test]
fn sweep_table_has_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&run(&["sweep", "--out", out, &scenario("flat-lightlike.scn")])), 0);
    let (header, rows) = read_table(&dir.path().join("flat-lightlike/sweep.csv")).unwrap();
    assert_eq!(
        &header[..6],
        ["n", "Jn", "xdot_l2", "tdot_l2", "h1_gap", "residual"].map(String::from)
    );
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][0], 8.0);
    assert_eq!(rows[10][0], 8192.0);
    assert!(rows[0][4].is_nan(), "first row has no predecessor");
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run(&["connect", "--out", out, &scenario("cos3-wall.scn")]);
    assert_eq!(code(&res), 2);
    let verdict = toml_file(&dir.path().join("cos3-wall/verdict.toml"));
    assert_eq!(verdict["certificate"]["axes"].as_array().unwrap()[0].as_integer(), Some(1));
    assert!(verdict["diagnostics"]["records"].as_array().unwrap().len() == 11);

    // Several scenarios: the largest code wins.
    let res = run(&["obstruct", "--jobs", "2", "--out", out, &scenario("flat-lightlike.scn"), "--scenario", &scenario("slit-plane.scn")]);
    assert_eq!(code(&res), 2, "{}", stderr(&res));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("flat-lightlike: obstruct Reachable") && stdout.contains("slit-plane: obstruct Obstructed"));
    assert!(dir.path().join("flat-lightlike/witness.csv").exists());

    // Obstruction search does not apply when β does not vanish.
    assert_eq!(code(&run(&["obstruct", "--out", out, &scenario("stationary-flat.scn")])), 3);

    // Any error makes the whole run fail.
    let res = run(&["connect", "--out", out, &scenario("stationary-flat.scn"), "/nonexistent.scn"]);
    assert_eq!(code(&res), 1);
    assert!(stderr(&res).contains("/nonexistent.scn"));
    assert_eq!(code(&run(&["gpw-connect", "--out", out, &scenario("cos3-wall.scn")])), 1);
    assert_eq!(code(&run(&["connect", "--out", out])), 1);
    assert_eq!(code(&run(&["bogus"])), 1);
}

#[test]
fn scenario_errors_are_reported_together() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.scn");
    std::fs::write(
        &file,
        r#"
        [model]
        kind = "split"
        dim = 2
        delta = "[1, sin(]"
        beta = "0"
        [endpoints]
        p = { x = [0, 0, 0], t = 0 }
        [solver]
        nodes = 3
        "#,
    )
    .unwrap();
    let res = run(&["connect", "--out", dir.path().to_str().unwrap(), file.to_str().unwrap()]);
    assert_eq!(code(&res), 1);
    let err = stderr(&res);
    for needle in ["model.delta", "endpoints.p.x", "endpoints.q", "nodes"] {
        assert!(err.contains(needle), "missing {needle} in {err}");
    }
}

#[test]
fn flags_override_scenario_settings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run(&[
        "connect", "--out", out, "--nodes", "32", "--k-max", "3", "--tol-grad", "1e-9", "--grid", "128", "--seed", "11",
        &scenario("flat-lightlike.scn"),
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let verdict = toml_file(&dir.path().join("flat-lightlike/verdict.toml"));
    let config = verdict["config"].as_table().unwrap();
    assert_eq!(config["nodes"].as_integer(), Some(32));
    assert_eq!(config["k_max"].as_integer(), Some(3));
    assert_eq!(config["grid"].as_integer(), Some(128));
    assert_eq!(config["seed"].as_integer(), Some(11));
    assert_eq!(config["tol_grad"].as_float(), Some(1e-9));
    assert_eq!(code(&run(&["connect", "--out", out, "--tol-lim", "-1", &scenario("flat-lightlike.scn")])), 1);
}

#[test]
fn gnuplot_layout_and_arrival() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run(&["gpw-connect", "--emit", "gnuplot-data", "--out", out, &scenario("gpw-oscillator.scn")]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let text = std::fs::read_to_string(dir.path().join("gpw-oscillator/path.dat")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# s x1 x2 u v"));
    assert_eq!(lines.next().unwrap().split(' ').count(), 5);
    let (header, rows) = read_table(&dir.path().join("gpw-oscillator/path.dat")).unwrap();
    assert_eq!(header.len(), 5);
    assert_eq!(rows.len(), 1001);

    // Arrival time of the straight segment (3, 4) in the n = 4 perturbation:
    // |ẋ|² = 25, ⟨δ, ẋ⟩ = 3, β = 1/4 ⇒ ṫ = (3 + √(9 + 25/4)) · 4.
    let path = dir.path().join("line.csv");
    let mut csv = String::from("s,x1,x2\n");
    for i in 0..=10 {
        let s = i as f64 / 10.0;
        csv.push_str(&format!("{s:.16e},{:.16e},{:.16e}\n", 3.0 * s, 4.0 * s));
    }
    std::fs::write(&path, csv).unwrap();
    let res = run(&["arrival", "--out", out, "--path", path.to_str().unwrap(), "--n", "4", &scenario("flat-lightlike.scn")]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let report = toml_file(&dir.path().join("flat-lightlike/arrival.toml"));
    let expected = (3.0 + (9.0f64 + 25.0 / 4.0).sqrt()) * 4.0;
    assert!((float(&report, "", "arrival_time") - expected).abs() < 1e-12);
    // Without a perturbation β vanishes and the lift is undefined.
    assert_eq!(code(&run(&["arrival", "--out", out, "--path", path.to_str().unwrap(), &scenario("flat-lightlike.scn")])), 1);
}
