use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use samweb::report::{CommandOutput, Status};
use samweb::{from_json, load_config, run, to_json};
use samweb_core::numlab::Sequential;

fn samweb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_samweb")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SUM_PRODUCT: &str = "name = sp\nf = x+y\ng = x*y\ndomain = [1, 2, 3, 4]\ncommands = [curvature, rank]\n";

#[test]
fn successful_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sp.job", SUM_PRODUCT);
    let out = samweb(&["analyze", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[rank]"));
    assert!(text.contains("conditions hold for every w"));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("both.job", "f = x+y\nS = x*y\ndomain = [1,2,1,2]\ncommands = [rank]\n", "line 2"),
        ("syntax.job", "f = x+*y\ndomain = [1,2,1,2]\ncommands = [rank]\n", "line 1"),
        ("dependent.job", "f = x+y\ng = 2*(x+y)\ndomain = [1,2,3,4]\ncommands = [rank]\n", "nondegeneracy"),
        ("empty-domain.job", "f = x+y\ndomain = [2,1,1,2]\ncommands = [rank]\n", "line 2"),
    ];
    for (name, text, needle) in cases {
        let cfg = write(dir.path(), name, text);
        let out = samweb(&["analyze", &cfg]);
        assert_eq!(out.status.code(), Some(1), "{name}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{name}: {err}");
        assert!(out.stdout.is_empty());
    }
    let out = samweb(&["analyze", dir.path().join("missing.job").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn command_errors_exit_two_and_keep_going() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "margin.job",
        "f = x+y\ndomain = [0, 1, 0, 1]\ncommands = [hexagon(center = 0.1 0.5; eps = 0.1), curvature]\n",
    );
    let json = dir.path().join("out.json");
    let out = samweb(&["analyze", &cfg, "--format", "json", "--output", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report = from_json(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report.results[0].status, Status::Error);
    assert_eq!(report.results[0].error.as_ref().unwrap().kind, "MarginViolation");
    assert_eq!(report.results[1].status, Status::Ok);
}

#[test]
fn json_round_trip_matches_the_in_memory_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "mixed.job",
        "name = mixed\nf = x^2+x*y+y^2\ng = x-y\ndomain = [1/2, 3/2, -1/5, 6/5]\ncommands = [curvature, rank,\n  hexagon(center = 1 0.2; eps = 0.1 0.05)]\n",
    );
    let json = dir.path().join("out.json");
    let out = samweb(&["analyze", &cfg, "--format", "json", "--output", json.to_str().unwrap(), "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&json).unwrap();
    let parsed = from_json(&text).unwrap();

    let mut job = load_config(Path::new(&cfg)).unwrap();
    job.seed = 42;
    let in_memory = run(&job, &Sequential).report;
    assert_eq!(parsed, in_memory);
    assert_eq!(to_json(&parsed), text);
    assert_eq!(parsed.schema, 1);
    assert_eq!(parsed.config.seed, 42);
    assert!(!text.contains("time"));
}

#[test]
fn json_goes_to_stdout_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sp.job", SUM_PRODUCT);
    let out = samweb(&["analyze", &cfg, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    match report.results[0].result.as_ref().unwrap() {
        CommandOutput::Curvature(k) => assert_eq!(k.k, "0"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn hexagon_csv_closes_for_the_linear_web() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "hex.job",
        "f = x+y\ndomain = [-1, 1, -1, 1]\ncommands = [hexagon(center = 0 0; eps = 0.1 0.05)]\n",
    );
    let plots = dir.path().join("plots");
    let out = samweb(&["analyze", &cfg, "--plot-dir", plots.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for k in 0..2 {
        let csv = fs::read_to_string(plots.join(format!("01-hexagon-{k}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,y"));
        let rows: Vec<(f64, f64)> = lines
            .map(|l| {
                let (x, y) = l.split_once(',').unwrap();
                assert_eq!(x.split_once('.').unwrap().1.len(), 6);
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect();
        assert_eq!(rows.len(), 7);
        assert!((rows[0].0 - rows[6].0).abs() < 1e-6 && (rows[0].1 - rows[6].1).abs() < 1e-6);
    }
}

#[test]
fn area_plots_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "area.job",
        "f = x+y\ndomain = [1, 2, 1/2, 5]\ncommands = [area-test(u = x; v = x*y; u_levels = 1.1 1.5 1.9; v_levels = 2 3 4)]\n",
    );
    let plots = dir.path().join("plots");
    let out = samweb(&["analyze", &cfg, "--plot-dir", plots.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut names: Vec<String> = fs::read_dir(&plots)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["01-area-u0.csv", "01-area-u1.csv", "01-area-u2.csv", "01-area-v0.csv", "01-area-v1.csv", "01-area-v2.csv"]);
}

#[test]
fn unwritable_plot_dir_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "hex.job",
        "f = x+y\ndomain = [-1, 1, -1, 1]\ncommands = [hexagon(center = 0 0; eps = 0.1)]\n",
    );
    // A path below a regular file cannot be created.
    let blocker = write(dir.path(), "file", "");
    let plots = format!("{blocker}/plots");
    let out = samweb(&["analyze", &cfg, "--plot-dir", &plots]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn example_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 5);
}
