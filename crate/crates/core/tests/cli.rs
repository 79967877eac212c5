use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

mod common;

fn finsent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Relative path → contents for every file under `dir`.
fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

#[test]
fn indicators_match_golden_files() {
    let out = TempDir::new().unwrap();
    let cfg = common::fixture("small/finsent.toml");
    let res = finsent(&["indicators", "--config", s(&cfg), "--out", s(out.path())]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let got = read_tree(&out.path().join("indicators"));
    let want = read_tree(&common::fixture("small/golden"));
    assert_eq!(got.keys().collect::<Vec<_>>(), want.keys().collect::<Vec<_>>());
    for (name, bytes) in &want {
        assert_eq!(
            String::from_utf8_lossy(&got[name]),
            String::from_utf8_lossy(bytes),
            "{name}"
        );
    }
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("finsent.toml");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn missing_lexicon_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    fs::copy(common::fixture("small/news.jsonl"), dir.path().join("news.jsonl")).unwrap();
    let cfg = write_config(
        dir.path(),
        "[indicators]\nfrom = \"2011-08-04\"\nto = \"2011-08-07\"\nnews = \"news.jsonl\"\nnegative_lexicon = \"nowhere.txt\"\n",
    );
    let res = finsent(&["indicators", "--config", s(&cfg), "--out", s(&dir.path().join("out"))]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("nowhere.txt"), "{stderr}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn empty_corpus_gives_empty_indicators() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("news.jsonl"), "").unwrap();
    fs::write(dir.path().join("messages.tsv"), "").unwrap();
    fs::copy(common::fixture("small/negative.txt"), dir.path().join("negative.txt")).unwrap();
    fs::copy(common::fixture("small/terms.txt"), dir.path().join("terms.txt")).unwrap();
    let cfg = write_config(
        dir.path(),
        r#"[indicators]
from = "2011-08-04"
to = "2011-08-07"
news = "news.jsonl"
negative_lexicon = "negative.txt"
messages = "messages.tsv"
terms = "terms.txt"
"#,
    );
    let out = dir.path().join("out");
    let res = finsent(&["indicators", "--config", s(&cfg), "--out", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(String::from_utf8_lossy(&res.stderr).contains("empty"));
    for name in ["nns", "tis", "tv_fst", "volume_dow_jones", "volume_bullish"] {
        let text = fs::read_to_string(out.join(format!("indicators/{name}.csv"))).unwrap();
        assert_eq!(text, "date,value\n", "{name}");
    }
}

fn synth_pair(dir: &Path) {
    let res = finsent(&["synth-pair", "--seed", "3", "--out", s(dir)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn granger_flags_the_true_direction() {
    let dir = TempDir::new().unwrap();
    synth_pair(dir.path());
    let cfg = write_config(
        dir.path(),
        r#"[series.x]
path = "x.csv"
[series.y]
path = "y.csv"
[[granger]]
name = "pair"
pairs = [["x", "y"]]
lags = [1, 2]
"#,
    );
    let out = dir.path().join("out");
    let res = finsent(&["granger", "--config", s(&cfg), "--out", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let table = fs::read_to_string(out.join("granger/pair.txt")).unwrap();
    let forward = table.lines().find(|l| l.starts_with("x→y")).expect("x→y row");
    let lag1 = forward.split_whitespace().nth(1).unwrap();
    assert!(lag1.ends_with("***"), "{table}");
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("granger/pair.json")).unwrap()).unwrap();
    assert!(json[0]["results"][0]["p_value"].as_f64().unwrap() < 0.01);
}

#[test]
fn ccf_against_itself_peaks_at_one() {
    let dir = TempDir::new().unwrap();
    synth_pair(dir.path());
    let cfg = write_config(
        dir.path(),
        r#"[series.x]
path = "x.csv"
[series.x2]
source = "x"
[[ccf]]
name = "self"
x = "x"
y = "x2"
max_lag = 3
"#,
    );
    let out = dir.path().join("out");
    let res = finsent(&["ccf", "--config", s(&cfg), "--out", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let table = fs::read_to_string(out.join("ccf/self.txt")).unwrap();
    let zero = table.lines().find(|l| l.starts_with("0 ")).expect("lag 0 row");
    assert_eq!(zero.split_whitespace().nth(1), Some("1.0000"), "{table}");
}

#[test]
fn forecast_with_equal_specs_gives_equal_rows() {
    let dir = TempDir::new().unwrap();
    synth_pair(dir.path());
    let cfg = write_config(
        dir.path(),
        r#"[series.y]
path = "y.csv"
[series.level]
source = "y"
transforms = ["ma:5"]
[[forecast]]
name = "same"
target = "level"
exogenous = []
n_lags = 2
test_window = 30
"#,
    );
    let out = dir.path().join("out");
    let res = finsent(&["forecast", "--config", s(&cfg), "--out", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let table = fs::read_to_string(out.join("forecast/same.txt")).unwrap();
    let rows: Vec<Vec<&str>> = table
        .lines()
        .filter(|l| l.contains("Model "))
        .map(|l| l.split("Model ").nth(1).unwrap().split_whitespace().skip(1).collect())
        .collect();
    assert_eq!(rows.len(), 2, "{table}");
    assert_eq!(rows[0], rows[1], "{table}");
}

#[test]
fn unknown_series_fails_before_computation() {
    let dir = TempDir::new().unwrap();
    synth_pair(dir.path());
    let cfg = write_config(
        dir.path(),
        r#"[series.x]
path = "x.csv"
[[correlate]]
name = "c"
pairs = [["x", "missing"]]
"#,
    );
    let out = dir.path().join("out");
    let res = finsent(&["report", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("\"missing\""));
    assert!(!out.exists());
}

#[test]
fn computational_failure_exits_one() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("flat.csv"), "date,value\n2011-01-01,1\n2011-01-02,1\n2011-01-03,1\n").unwrap();
    let cfg = write_config(
        dir.path(),
        r#"[series.a]
path = "flat.csv"
[series.b]
source = "a"
[[correlate]]
name = "flat"
pairs = [["a", "b"]]
"#,
    );
    let res = finsent(&["correlate", "--config", s(&cfg), "--out", s(&dir.path().join("out"))]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("correlate \"flat\""));
}

#[test]
fn demo_generator_reproduces_the_bundled_fixture() {
    let dir = TempDir::new().unwrap();
    let res = finsent(&["demo-data", "--seed", "7", "--out", s(dir.path())]);
    assert!(res.status.success());
    assert!(read_tree(dir.path()) == read_tree(&common::fixture("report")));
}

#[test]
fn report_is_deterministic() {
    let cfg = common::fixture("report/finsent.toml");
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let res = finsent(&["report", "--config", s(&cfg), "--out", s(d.path())]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    assert!(ta == tb);
    let hash = common::tree_hash(ta.iter().map(|(k, v)| (k.as_str(), v.as_slice())));
    assert_eq!(hash, common::REPORT_HASH);
}

#[test]
fn forecast_can_score_on_raw_levels() {
    let dir = TempDir::new().unwrap();
    synth_pair(dir.path());
    let mut lines = vec!["date,value".to_string()];
    for line in fs::read_to_string(dir.path().join("y.csv")).unwrap().lines().skip(1) {
        let (d, v) = line.split_once(',').unwrap();
        lines.push(format!("{d},{}", (v.parse::<f64>().unwrap() + 5.0).exp()));
    }
    fs::write(dir.path().join("level.csv"), lines.join("\n") + "\n").unwrap();
    let body = |scale: &str, transforms: &str| {
        format!(
            "[series.x]\npath = \"x.csv\"\n[series.level]\npath = \"level.csv\"\n[series.t]\nsource = \"level\"\ntransforms = [{transforms}]\n\
             [[forecast]]\nname = \"f\"\ntarget = \"t\"\nexogenous = [\"x\"]\nn_lags = 1\ntest_window = 20\nmape_scale = \"{scale}\"\n"
        )
    };
    let mape_of = |scale: &str| {
        let cfg = write_config(dir.path(), &body(scale, "\"log\""));
        let out = dir.path().join(scale);
        let res = finsent(&["forecast", "--config", s(&cfg), "--out", s(&out)]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("forecast/f.json")).unwrap()).unwrap();
        json["model1"]["mape"].as_f64().unwrap()
    };
    let (log_scale, raw) = (mape_of("transformed"), mape_of("raw"));
    assert!(raw > log_scale, "{raw} vs {log_scale}");

    let cfg = write_config(dir.path(), &body("raw", ""));
    let res = finsent(&["forecast", "--config", s(&cfg), "--out", s(&dir.path().join("bad"))]);
    assert_eq!(res.status.code(), Some(2));
}
