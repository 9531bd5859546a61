use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const HOMOGENEOUS: &str = "\
[operator]
length = pi

[orders]
alpha = 0.8, 0.4
q = 1, 1

[scenario]
kind = solve-homogeneous
initial = mode:1
modes = 8
x = interior:7
times = 0.1, 1
";

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(cfg: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlfrac"))
        .arg(cfg)
        .args(extra)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    let s = String::from_utf8_lossy(&out.stdout);
    let line = s.lines().last().unwrap_or_else(|| {
        panic!(
            "no stdout; stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    });
    serde_json::from_str(line).unwrap()
}

fn errors(out: &Output) -> Vec<String> {
    stdout_json(out)["errors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e.as_str().unwrap().to_string())
        .collect()
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

#[test]
fn minimal_homogeneous_scenario_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "h.cfg",
        &format!("{HOMOGENEOUS}\n[output]\ncsv = u.csv\n"),
    );
    let out = run(&cfg, &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout_json(&out)["status"], "ok");
    let csv = std::fs::read_to_string(dir.path().join("u.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,u"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2 * 7);
    // row-major over time, then space
    assert!(rows[0].starts_with("1.0000000000000001e-1,"));
    assert!(rows[7].starts_with("1.0000000000000000e0,"));
    let mantissa = rows[0]
        .split(',')
        .nth(2)
        .unwrap()
        .split('e')
        .next()
        .unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
}

#[test]
fn decreasing_order_violation_names_the_constraint() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "bad.cfg",
        &HOMOGENEOUS.replace("alpha = 0.8, 0.4", "alpha = 0.4, 0.8"),
    );
    let out = run(&cfg, &[]);
    assert_eq!(out.status.code(), Some(1));
    let e = errors(&out);
    assert!(e.iter().any(|m| m.contains("1>α₁>⋯>α_m>0")), "{e:?}");
}

#[test]
fn missing_q_is_listed_with_every_other_violation() {
    let dir = TempDir::new().unwrap();
    let text = HOMOGENEOUS
        .replace("q = 1, 1\n", "")
        .replace("modes = 8", "modes = many")
        + "colour = blue\n";
    let out = run(&write(&dir, "bad.cfg", &text), &[]);
    assert_eq!(out.status.code(), Some(1));
    let e = errors(&out);
    assert!(e.iter().any(|m| m.contains("orders.q")), "{e:?}");
    assert!(e.iter().any(|m| m.contains("scenario.modes")), "{e:?}");
    assert!(
        e.iter().any(|m| m.contains("unknown key scenario.colour")),
        "{e:?}"
    );
}

#[test]
fn unknown_keys_depend_on_the_kind() {
    let dir = TempDir::new().unwrap();
    // x0 is meaningful for some kinds but not this one
    let out = run(
        &write(&dir, "h.cfg", &format!("{HOMOGENEOUS}x0 = 1\n")),
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(errors(&out)
        .iter()
        .any(|m| m.contains("unknown key scenario.x0")));
}

#[test]
fn ml_eval_at_the_origin_is_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "ml.cfg",
        "kind = ml-eval\nbeta0 = 1\nbeta = 0.7, 0.3\nz = 0, 0\n",
    );
    let out = run(&cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "ml-eval");
    assert_eq!(v["value"].as_f64(), Some(1.0));
}

#[test]
fn failed_expectation_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "ml.cfg",
        "kind = ml-eval\nbeta = 1\nz = 1\nexpect = 2.7\nexpect_tol = 1e-9\n",
    );
    let out = run(&cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["status"], "fail");
}

#[test]
fn overrides_replace_and_validate() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "ml.cfg", "kind = ml-eval\nbeta = 1\nz = 1\n");
    let out = run(&cfg, &["--override", "z=0"]);
    assert_eq!(stdout_json(&out)["value"].as_f64(), Some(1.0));
    let out = run(&cfg, &["--override", "scenario.nonsense=3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(errors(&out).iter().any(|m| m.contains("scenario.nonsense")));
}

#[test]
fn asymptotics_artifact_carries_the_predicted_amplitude() {
    let dir = TempDir::new().unwrap();
    let json = dir.path().join("a.json");
    let out = run(
        &shipped("07_asymptotics.cfg"),
        &["--override", &format!("output.json={}", json.display())],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    // 1/Γ(0.6), Γ(0.6) = 1.4891922488128171
    let a = v["predicted_amplitude"].as_f64().unwrap();
    assert!(
        (a - 1.0 / 1.4891922488128171).abs() < 1e-12 && (a - 0.671505).abs() < 1e-6,
        "{a}"
    );
    assert_eq!(v["predicted_exponent"].as_f64(), Some(0.4));
}

#[test]
fn zero_data_inversion_gives_zero_density() {
    let dir = TempDir::new().unwrap();
    let text = "\
[operator]
length = pi
[orders]
alpha = 0.8, 0.4
q = 1, 1
[scenario]
kind = invert
rho = zero
g = mode:1
modes = 4
x0 = pi/2
horizon = 1
steps = 64
[output]
csv = rho.csv
json = rho.json
observation = obs.csv
";
    let out = run(&write(&dir, "inv.cfg", text), &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("rho.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,rho,mu_cofactor"));
    let mut rows = 0;
    for l in lines {
        let cols: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!((cols[1], cols[2]), (0.0, 0.0));
        rows += 1;
    }
    assert_eq!(rows, 65);
    let side: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rho.json")).unwrap())
            .unwrap();
    assert_eq!(side["residual"].as_f64(), Some(0.0));
    assert!(side["conditioning"]["min_diagonal"].as_f64().unwrap() > 0.0);
    let obs = std::fs::read_to_string(dir.path().join("obs.csv")).unwrap();
    assert!(obs.starts_with("# x0 = ") && obs.contains("# g_nonnegative = true\nt,u\n"));
}

#[test]
fn identical_configs_give_identical_artifacts() {
    let dir = TempDir::new().unwrap();
    let text = |tag: &str| {
        format!(
            "\
[operator]
length = pi
[orders]
alpha = 0.8, 0.4
q = 1, 1
[scenario]
kind = invert
rho = spline:4, 0.5, 2, 2
g = bump:0.5, 2.5
modes = 64
trunc_tol = 1e-8
x0 = pi/2
horizon = 1
steps = 128
noise = 1e-3
seed = 5
[output]
csv = {tag}.csv
observation = {tag}_obs.csv
"
        )
    };
    for tag in ["a", "b"] {
        let out = run(&write(&dir, &format!("{tag}.cfg"), &text(tag)), &[]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("a_obs.csv"), read("b_obs.csv"));
}

#[test]
fn saved_observations_can_be_inverted() {
    let dir = TempDir::new().unwrap();
    let head = "\
[operator]
length = pi
[orders]
alpha = 0.8, 0.4
q = 1, 1
[scenario]
kind = invert
g = mode:1
modes = 4
x0 = pi/2
";
    let synth = format!("{head}rho = affine:1, 0.5\nhorizon = 1\nsteps = 256\ntolerance = 1e-2\n[output]\nobservation = obs.csv\n");
    let out = run(&write(&dir, "synth.cfg", &synth), &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let from_file = format!("{head}observation = obs.csv\n[output]\ncsv = rho.csv\n");
    let out = run(&write(&dir, "file.cfg", &from_file), &[]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("rho.csv")).unwrap();
    let last: Vec<f64> = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert!((last[1] - 1.5).abs() < 1e-2, "{last:?}");
}

#[test]
fn missing_input_files_are_reported_at_parse_time() {
    let dir = TempDir::new().unwrap();
    let text = HOMOGENEOUS.replace("length = pi", "length = pi\na = missing.csv");
    let out = run(&write(&dir, "h.cfg", &text), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(errors(&out)
        .iter()
        .any(|m| m.contains("operator.a") && m.contains("missing.csv")));
}

#[test]
fn thread_cap_must_be_positive() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "ml.cfg", "kind = ml-eval\nbeta = 1\nz = 0\n");
    let out = Command::new(env!("CARGO_BIN_EXE_mlfrac"))
        .arg(&cfg)
        .env("MLFRAC_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_mlfrac"))
        .arg(&cfg)
        .env("MLFRAC_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn every_shipped_scenario_parses() {
    // one stray key stops the run after full validation; it must be the only complaint
    for entry in std::fs::read_dir(shipped("")).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().and_then(|e| e.to_str()) != Some("cfg") {
            continue;
        }
        let out = run(&p, &["--override", "output.unused=1"]);
        assert_eq!(out.status.code(), Some(1), "{}", p.display());
        let e = errors(&out);
        assert_eq!(
            e,
            vec!["override: unknown key output.unused for this scenario".to_string()],
            "{}",
            p.display()
        );
    }
}
