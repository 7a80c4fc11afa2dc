use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn sarl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sarl"))
        .args(args)
        .env_remove("SARL_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    sarl(args).status.code().expect("exit code")
}

fn ok(args: &[&str]) -> Value {
    let out = sarl(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn read_json(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("timings_ms");
    v
}

struct Synth {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Synth {
    fn new(n: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        ok(&["synth", "--n", n, "--seed", "3", "--out", s(&root.join("data"))]);
        Synth { _dir: dir, root }
    }

    fn data(&self, file: &str) -> String {
        s(&self.root.join("data").join(file)).to_string()
    }

    fn out(&self, name: &str) -> String {
        s(&self.root.join(name)).to_string()
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_is_byte_identical_per_seed() {
    let a = Synth::new("200");
    let b = Synth::new("200");
    for f in ["train.csv", "test.csv", "spec.toml"] {
        assert_eq!(fs::read(a.data(f)).unwrap(), fs::read(b.data(f)).unwrap());
    }
    let meta = read_json(Path::new(&a.data("synth.json")));
    assert_eq!(meta["config"]["seed"], 3);
    assert!(meta["rng"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn solve_reruns_reproduce_reports() {
    let d = Synth::new("400");
    let (train, spec, out) = (d.data("train.csv"), d.data("spec.toml"), d.out("solve"));
    let args = ["solve", "--train", &train, "--spec", &spec, "--lambda", "0.5", "--out", &out];
    ok(&args);
    let first = read_json(&Path::new(&out).join("report.json"));
    let params = fs::read(Path::new(&out).join("encoder.csv")).unwrap();
    ok(&args);
    assert_eq!(first, read_json(&Path::new(&out).join("report.json")));
    assert_eq!(params, fs::read(Path::new(&out).join("encoder.csv")).unwrap());
    assert_eq!(first["r"], 1);
    let b = &first["bounds"];
    let js = first["adversary_loss"].as_f64().unwrap();
    assert!(js >= b["alpha_min"].as_f64().unwrap() - 1e-9 && js <= b["alpha_max"].as_f64().unwrap() + 1e-9);
}

#[test]
fn sweep_is_ordered_and_within_bounds() {
    let d = Synth::new("400");
    let (train, spec, test) = (d.data("train.csv"), d.data("spec.toml"), d.data("test.csv"));
    let out = d.out("sweep");
    let report = ok(&["sweep", "--train", &train, "--spec", &spec, "--points", "6", "--evaluate", "--test", &test, "--out", &out]);
    let points = report["points"].as_array().unwrap();
    assert_eq!(points.len(), 6);
    let (lo, hi) = (report["bounds"]["alpha_min"].as_f64().unwrap(), report["bounds"]["alpha_max"].as_f64().unwrap());
    let mut last = -1.0;
    for p in points {
        let (lambda, js) = (p["lambda"].as_f64().unwrap(), p["adversary_loss"].as_f64().unwrap());
        assert!(lambda > last);
        last = lambda;
        assert!(js >= lo - 1e-9 && js <= hi + 1e-9);
        assert!(p["target_accuracy"].is_number());
    }
    let csv = fs::read_to_string(Path::new(&out).join("tradeoff.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn out_dir_environment_override() {
    let d = Synth::new("40");
    let env_dir = d.out("from_env");
    let status = Command::new(env!("CARGO_BIN_EXE_sarl"))
        .args(["bounds", "--train", &d.data("train.csv"), "--spec", &d.data("spec.toml"), "--out", &d.out("flag")])
        .env("SARL_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    assert!(Path::new(&env_dir).join("bounds.json").exists());
    assert!(!Path::new(&d.out("flag")).exists());
}

#[test]
fn linear_kernel_bounds_match_linear_mode() {
    let d = Synth::new("200");
    let (train, spec) = (d.data("train.csv"), d.data("spec.toml"));
    let lin = ok(&["bounds", "--train", &train, "--spec", &spec]);
    let ker = ok(&["bounds", "--train", &train, "--spec", &spec, "--mode", "kernel", "--kernel", "linear"]);
    for key in ["alpha_min", "alpha_max", "gamma_min", "gamma_max"] {
        let (a, b) = (lin["bounds"][key].as_f64().unwrap(), ker["bounds"][key].as_f64().unwrap());
        assert!((a - b).abs() < 1e-8, "{key}: {a} vs {b}");
    }
}

#[test]
fn invariant_encoder_evaluates_at_prior() {
    let d = Synth::new("400");
    let (train, spec, test) = (d.data("train.csv"), d.data("spec.toml"), d.data("test.csv"));
    let enc_dir = d.out("enc");
    ok(&["solve", "--train", &train, "--spec", &spec, "--lambda", "1", "--out", &enc_dir]);
    let enc = format!("{enc_dir}/encoder.json");
    let emb = d.out("emb");
    ok(&["embed", "--encoder", &enc, "--data", &train, "--name", "train.csv", "--out", &emb]);
    ok(&["embed", "--encoder", &enc, "--data", &test, "--name", "test.csv", "--out", &emb]);
    let report = ok(&["eval", "--train", &format!("{emb}/train.csv"), "--test", &format!("{emb}/test.csv")]);
    assert_eq!(report["r"], 0);
    // a constant embedding predicts the training majority class for every sample
    let rows: Vec<String> = fs::read_to_string(&train).unwrap().lines().skip(1).map(str::to_string).collect();
    let red = rows.iter().filter(|r| r.ends_with(",red")).count();
    let majority = if 2 * red > rows.len() { "red" } else { "blue" };
    let test_rows: Vec<String> = fs::read_to_string(&test).unwrap().lines().skip(1).map(str::to_string).collect();
    let hits = test_rows.iter().filter(|r| r.ends_with(&format!(",{majority}"))).count();
    let acc = report["heads"]["sensitive"]["accuracy"].as_f64().unwrap();
    assert!((acc - hits as f64 / test_rows.len() as f64).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let d = Synth::new("40");
    let (train, spec) = (d.data("train.csv"), d.data("spec.toml"));
    assert_eq!(code(&[]), 64);
    assert_eq!(code(&["solve", "--train", &train, "--spec", &spec]), 64);
    assert_eq!(code(&["solve", "--train", &train, "--spec", &spec, "--lambda", "0.5", "--alpha-tol", "0.4"]), 64);
    assert_eq!(code(&["solve", "--train", &train, "--spec", &spec, "--lambda", "1.5"]), 64);
    assert_eq!(code(&["synth", "--n", "6", "--out", &d.out("bad")]), 65);
    assert_eq!(code(&["solve", "--train", &train, "--spec", &spec, "--alpha-tol", "10"]), 66);
    assert_eq!(code(&["bounds", "--train", &d.out("missing.csv"), "--spec", &spec]), 2);
    assert_eq!(code(&["--help"]), 0);

    let enc_dir = d.out("enc");
    ok(&["solve", "--train", &train, "--spec", &spec, "--lambda", "0.5", "--out", &enc_dir]);
    let other = d.out("other.csv");
    fs::write(&other, "x0,x1,shape,color\n1,2,circle,red\n").unwrap();
    assert_eq!(code(&["embed", "--encoder", &format!("{enc_dir}/encoder.json"), "--data", &other, "--out", &d.out("e")]), 65);
}

#[test]
fn kernel_encoder_artifact_reloads_bit_exactly() {
    use sarl::cli::artifact::{load_encoder, save_encoder};
    use sarl::data::{gen_gaussian_mixture, write_csv};
    use sarl::kernels::{KernelModel, KernelSpec};
    use sarl::numerics::RankTolerance;
    use sarl::solver::{build_problem_kernel, build_problem_linear, solve, SolverConfig};

    let dir = tempfile::tempdir().unwrap();
    let train = gen_gaussian_mixture(200, 8).unwrap();
    let fresh = gen_gaussian_mixture(20, 9).unwrap();
    let train_path = dir.path().join("train.csv");
    write_csv(&train, &train_path).unwrap();
    let tol = RankTolerance::default();
    let model = KernelModel::fit(&KernelSpec::rbf_median(), train.x.as_ref()).unwrap();
    let kernel = build_problem_kernel(model, train.y.as_ref(), train.s.as_ref(), tol).unwrap();
    let linear = build_problem_linear(train.x.as_ref(), train.y.as_ref(), train.s.as_ref(), tol).unwrap();
    for (name, problem) in [("kernel", &kernel), ("linear", &linear)] {
        let sol = solve(problem, &SolverConfig::new(0.4)).unwrap();
        let out = dir.path().join(name);
        let sidecar = save_encoder(&sol.encoder, sol.lambda, &train.schema, &train_path, &out).unwrap();
        let (loaded, meta) = load_encoder(&sidecar).unwrap();
        assert_eq!(meta.r, sol.encoder.dim());
        assert_eq!(loaded.params(), sol.encoder.params());
        assert_eq!(
            loaded.embed_batch(fresh.x.as_ref()).unwrap(),
            sol.encoder.embed_batch(fresh.x.as_ref()).unwrap()
        );
    }
}
