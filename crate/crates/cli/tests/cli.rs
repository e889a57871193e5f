use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn streamprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_streamprop"))
        .args(args)
        .env_remove("STREAMPROP_THREADS")
        .output()
        .unwrap()
}

fn path(p: &Path) -> String {
    p.to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn synth(dir: &Path, count: &str) {
    let o = streamprop(&[
        "synth",
        "--out-dir",
        dir.to_str().unwrap(),
        "--count",
        count,
        "--size",
        "64",
        "--min-side",
        "12",
        "--max-side",
        "40",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn synth_then_propose() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "2");
    assert!(d.join("img_000.ppm").is_file() && d.join("img_001.ppm").is_file());
    let ann = fs::read_to_string(d.join("annotations.csv")).unwrap();
    assert_eq!(ann.lines().count(), 3);
    assert_eq!(
        fs::read_to_string(d.join("model.txt"))
            .unwrap()
            .lines()
            .count(),
        64
    );

    let run = |out: &str, extra: &[&str]| {
        let out = d.join(out);
        let mut args: Vec<String> = vec![
            "propose".into(),
            "--image".into(),
            path(&d.join("img_000.ppm")),
        ];
        args.extend([
            "--model".into(),
            path(&d.join("model.txt")),
            "--out".into(),
            path(&out),
        ]);
        args.extend(extra.iter().map(|s| s.to_string()));
        let o = streamprop(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        (
            stdout(&o).trim().to_owned(),
            fs::read_to_string(out).unwrap(),
        )
    };
    let (digest, csv) = run("a.csv", &[]);
    assert_eq!(digest.len(), 64);
    assert!(csv.starts_with("x0,y0,x1,y1,score\n"));
    let (digest2, csv2) = run(
        "b.csv",
        &[
            "--threads",
            "3",
            "--scheduler",
            "pingpong",
            "--pipelined-stages",
        ],
    );
    assert_eq!((digest2, csv2), (digest, csv));
    let (_, few) = run("c.csv", &["--top-k", "5"]);
    assert_eq!(few.lines().count(), 6);
}

#[test]
fn eval_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "4");
    fs::remove_file(d.join("img_003.ppm")).unwrap();
    fs::write(
        d.join("cfg.toml"),
        "model_path = \"model.txt\"\nbudgets = [1, 1000]\niou_thresh = 0.5\n",
    )
    .unwrap();
    let out = d.join("out");
    let o = streamprop(&[
        "eval",
        "--images",
        d.to_str().unwrap(),
        "--ann",
        d.join("annotations.csv").to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
        "--config",
        d.join("cfg.toml").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("3 images, 3 objects, 1 missing"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("#WIN")).count(), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("img_003"));
    for f in ["dr.csv", "mabo.csv"] {
        assert_eq!(fs::read_to_string(out.join(f)).unwrap().lines().count(), 3);
    }
    assert_eq!(fs::read_dir(out.join("proposals")).unwrap().count(), 3);
}

#[test]
fn bench_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "2");
    let report = d.join("bench.json");
    let o = Command::new(env!("CARGO_BIN_EXE_streamprop"))
        .args([
            "bench",
            "--images",
            d.to_str().unwrap(),
            "--model",
            d.join("model.txt").to_str().unwrap(),
        ])
        .args(["--repeats", "2", "--report", report.to_str().unwrap()])
        .env("STREAMPROP_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["images"], 2);
    assert_eq!(json["threads"], 2);
    assert_eq!(json["deterministic"], true);
    assert_eq!(json["timing_samples"].as_array().unwrap().len(), 2);
    assert!(json["svm_items"].as_u64().unwrap() > 0);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let bad = d.join("bad.ppm");
    fs::write(&bad, b"P3\n1 1\n255\n0 0 0\n").unwrap();
    let model = d.join("m.txt");
    fs::write(&model, "1\n2\n").unwrap();
    let out = d.join("o.csv");
    let (b, m, o) = (
        bad.to_str().unwrap(),
        model.to_str().unwrap(),
        out.to_str().unwrap(),
    );

    for args in [
        vec!["propose", "--image", b, "--model", m, "--out", o],
        vec![
            "propose",
            "--image",
            "/nonexistent.ppm",
            "--model",
            m,
            "--out",
            o,
        ],
        vec!["propose", "--image", b, "--out", o],
        vec![
            "propose", "--image", b, "--model", m, "--out", o, "--top-k", "0",
        ],
        vec!["bench", "--images", d.to_str().unwrap(), "--model", m],
    ] {
        let r = streamprop(&args);
        assert_eq!(r.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&r.stderr).starts_with("error:"));
    }
    assert!(!out.exists());
}
