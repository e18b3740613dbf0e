use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use besn::cli::JobConfig;
use tempfile::TempDir;

fn besn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn run_reports_theory_verdict() {
    let tmp = TempDir::new().unwrap();
    let out = path(tmp.path(), "run");
    let o = besn(&[
        "run", "--n", "1000", "--k", "22", "--d", "0.25", "--t", "300", "--seed", "1", "--out",
        &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("theory: frozen (k_c = 8.0)"),
        "{}",
        stdout(&o)
    );
    let csv = fs::read_to_string(tmp.path().join("run/trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("step,energy,activity,entropy"));
    assert_eq!(csv.lines().count(), 302);
    for file in ["config.json", "summary.json"] {
        assert!(tmp.path().join("run").join(file).exists(), "{file}");
    }
}

#[test]
fn defaults_need_only_command_and_seed() {
    let tmp = TempDir::new().unwrap();
    let out = path(tmp.path(), "o");
    let o = besn(&["run", "--seed", "4", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let config: JobConfig =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("o/config.json")).unwrap())
            .unwrap();
    let besn::cli::Job::Run(p) = config.job else {
        panic!("wrong job")
    };
    assert_eq!(
        (p.network.n_neurons, p.horizon, p.burn_in),
        (1000, 300, 100)
    );
}

#[test]
fn toy_sweep_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let mut csvs = Vec::new();
    for name in ["a", "b"] {
        let out = path(tmp.path(), name);
        let o = besn(&[
            "sweep-phase",
            "--k",
            "4,40",
            "--d",
            "0.05,0.3",
            "--replicates",
            "1",
            "--n",
            "200",
            "--seed",
            "9",
            "--out",
            &out,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        csvs.push(fs::read(tmp.path().join(name).join("sweep.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(String::from_utf8_lossy(&csvs[0]).lines().count(), 5);
}

#[test]
fn thread_count_does_not_change_results() {
    let tmp = TempDir::new().unwrap();
    let mut csvs = Vec::new();
    for jobs in ["1", "3"] {
        let out = path(tmp.path(), jobs);
        let o = besn(&[
            "--jobs",
            jobs,
            "sweep-noise",
            "--k",
            "50",
            "--nu",
            "0,0.2",
            "--d",
            "0:0.3:4",
            "--n",
            "150",
            "--replicates",
            "2",
            "--t",
            "60",
            "--t0",
            "20",
            "--out",
            &out,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        csvs.push(fs::read(tmp.path().join(jobs).join("sweep.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

fn rerun_from_config(tmp: &Path, first: &str, file: &str) {
    let text = fs::read_to_string(tmp.join(first).join("config.json")).unwrap();
    let mut config: JobConfig = serde_json::from_str(&text).unwrap();
    config.output_dir = tmp.join("again");
    let config_path = tmp.join("again.json");
    fs::write(&config_path, serde_json::to_string(&config).unwrap()).unwrap();
    let o = besn(&["--config", config_path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(tmp.join(first).join(file)).unwrap(),
        fs::read(tmp.join("again").join(file)).unwrap()
    );
}

#[test]
fn config_round_trip_reproduces_sweep() {
    let tmp = TempDir::new().unwrap();
    let out = path(tmp.path(), "first");
    let o = besn(&[
        "sweep-signal",
        "--signal",
        "white-noise",
        "--k",
        "30",
        "--gain",
        "0,1.5",
        "--d",
        "0:0.3:7",
        "--n",
        "120",
        "--replicates",
        "2",
        "--t",
        "50",
        "--t0",
        "10",
        "--seed",
        "3",
        "--out",
        &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    rerun_from_config(tmp.path(), "first", "sweep.csv");
}

#[test]
fn config_round_trip_reproduces_noisy_run() {
    let tmp = TempDir::new().unwrap();
    let out = path(tmp.path(), "first");
    let o = besn(&[
        "run",
        "--n",
        "300",
        "--k",
        "40",
        "--d",
        "0.1",
        "--nu",
        "0.05",
        "--signal",
        "multisine",
        "--gain",
        "2",
        "--t",
        "80",
        "--t0",
        "20",
        "--dump-states",
        "--seed",
        "8",
        "--out",
        &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    rerun_from_config(tmp.path(), "first", "trajectory.csv");
    let states = fs::read_to_string(tmp.path().join("again/states.csv")).unwrap();
    assert_eq!(states.lines().count(), 82);
}

#[test]
fn fit_boundary_on_noise_sweep() {
    let tmp = TempDir::new().unwrap();
    let sweep = path(tmp.path(), "sweep");
    let o = besn(&[
        "sweep-noise",
        "--k",
        "200",
        "--nu",
        "0:0.3:7",
        "--d",
        "0:0.35:15",
        "--replicates",
        "1",
        "--seed",
        "0",
        "--out",
        &sweep,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fit = path(tmp.path(), "fit");
    let input = path(tmp.path(), "sweep/sweep.csv");
    let o = besn(&["fit-boundary", "--input", &input, "--out", &fit]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("fit/boundary.json")).unwrap())
            .unwrap();
    let slope = json["slope"].as_f64().unwrap();
    assert!((0.45..=0.85).contains(&slope), "slope {slope}");
}

#[test]
fn invalid_parameter_names_key() {
    let tmp = TempDir::new().unwrap();
    let out = path(tmp.path(), "x");
    for (args, key) in [
        (vec!["run", "--d", "0.6"], "--d"),
        (vec!["run", "--k", "-3"], "--k"),
        (vec!["perturb", "--copies", "0"], "--copies"),
        (vec!["sweep-noise", "--nu", "0,-0.1"], "--nu"),
        (vec!["run", "--t", "50", "--t0", "60"], "--t0"),
        (vec!["sweep-signal", "--signal", "zero"], "--signal"),
    ] {
        let mut args = args.clone();
        args.extend(["--out", &out]);
        let o = besn(&args);
        assert!(!o.status.success(), "{args:?}");
        assert!(
            stderr(&o).contains(&format!("`{key}`")),
            "{args:?}: {}",
            stderr(&o)
        );
    }
    assert!(!tmp.path().join("x").exists());
}

#[test]
fn unwritable_output_dir_fails() {
    let tmp = TempDir::new().unwrap();
    let file = tmp.path().join("plain");
    fs::write(&file, "").unwrap();
    let out = path(&file, "sub");
    let o = besn(&["generate", "--n", "10", "--k", "2", "--out", &out]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("i/o error"), "{}", stderr(&o));
}

#[test]
fn emit_config_does_not_run() {
    let tmp = TempDir::new().unwrap();
    let out = path(tmp.path(), "never");
    let o = besn(&["--emit-config", "perturb", "--copies", "7", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let config: JobConfig = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(matches!(config.job, besn::cli::Job::Perturb(p) if p.copies == 7));
    assert!(!tmp.path().join("never").exists());
}

#[test]
fn generate_writes_loadable_reservoir() {
    let tmp = TempDir::new().unwrap();
    let out = path(tmp.path(), "g");
    let o = besn(&[
        "generate", "--n", "80", "--k", "5", "--d", "-0.2", "--seed", "2", "--out", &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("g/reservoir.json")).unwrap();
    let loaded: besn::Reservoir = serde_json::from_str(&text).unwrap();
    let fresh = besn::generate_reservoir(besn::ReservoirParams::new(80, 5.0, -0.2, 2)).unwrap();
    assert_eq!(loaded, fresh);
}
