use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use tverberg::arith::rat;
use tverberg::{parse_rat, random_instance, solve, Distribution, Point, Rat, SolverConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tverberg"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const LINE: &str = r#"{"d": 1, "r": 2, "points": [[0], [1], [2]]}"#;
const SQUARE: &str = r#"{"d": 2, "r": 2, "points": [[0, 0], [1, 0], [0, 1], [1, 1]]}"#;

#[test]
fn solve_line_example() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "line.json", LINE);
    let out = run(&["solve", s(&input)]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["partition"], serde_json::json!([[0, 2], [1]]));
    assert_eq!(doc["z"], serde_json::json!(["1"]));
    assert_eq!(doc["alpha"], serde_json::json!(["1/2", "1", "1/2"]));
    assert_eq!(doc["certified_for"], "original");
    assert!(doc.get("perturbed_points").is_none());
}

#[test]
fn same_seed_gives_identical_documents() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("inst.json");
    assert!(run(&[
        "gen",
        "--d",
        "2",
        "--r",
        "3",
        "--seed",
        "11",
        "-o",
        s(&input)
    ])
    .status
    .success());
    let mut results = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("res{k}.json"));
        let trace = dir.path().join("trace.jsonl");
        let status = run(&[
            "solve",
            s(&input),
            "--seed",
            "7",
            "--trace",
            s(&trace),
            "-o",
            s(&out),
        ]);
        assert!(status.status.success());
        results.push((fs::read(&out).unwrap(), fs::read(&trace).unwrap()));
    }
    assert_eq!(results[0], results[1]);
}

/// Hull vertices of a block of at most three planar points, by cases.
fn brute_hull(points: &[Point], block: &[usize]) -> Vec<usize> {
    let cross = |o: &Point, a: &Point, b: &Point| -> Rat {
        (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
    };
    let between = |a: &Point, m: &Point, b: &Point| -> bool {
        (0..2).all(|k| (a[k] <= m[k] && m[k] <= b[k]) || (b[k] <= m[k] && m[k] <= a[k]))
    };
    let mut out: Vec<usize> = match block {
        [a, b, c] if cross(&points[*a], &points[*b], &points[*c]) == rat(0) => {
            let (a, b, c) = (*a, *b, *c);
            [(a, b, c), (b, c, a), (c, a, b)]
                .into_iter()
                .find(|(x, y, z)| between(&points[*x], &points[*y], &points[*z]))
                .map(|(x, _, z)| vec![x, z])
                .unwrap()
        }
        _ => block.to_vec(),
    };
    out.sort();
    out
}

#[test]
fn svg_draws_each_block_hull_and_z() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("inst.json");
    assert!(run(&[
        "gen",
        "--d",
        "2",
        "--r",
        "3",
        "--seed",
        "4",
        "-o",
        s(&input)
    ])
    .status
    .success());
    let svg = dir.path().join("out.svg");
    let out = run(&["solve", s(&input), "--svg", s(&svg)]);
    assert!(out.status.success());
    let doc = json(&out);
    let inst = random_instance(2, 3, Distribution::default(), 4);
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<polygon").count(), 3);
    assert_eq!(text.matches(r#"class="z""#).count(), 1);
    let partition: Vec<Vec<usize>> = serde_json::from_value(doc["partition"].clone()).unwrap();
    for (p, block) in partition.iter().enumerate() {
        let tag = format!(r#"data-block="{p}" data-vertices=""#);
        let start = text.find(&tag).unwrap() + tag.len();
        let end = start + text[start..].find('"').unwrap();
        let mut drawn: Vec<usize> = text[start..end]
            .split_whitespace()
            .map(|v| v.parse().unwrap())
            .collect();
        drawn.sort();
        assert_eq!(drawn, brute_hull(inst.points(), block));
    }
}

#[test]
fn svg_rejected_outside_the_plane() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("inst.json");
    assert!(run(&["gen", "--d", "3", "--r", "2", "-o", s(&input)])
        .status
        .success());
    let out = run(&["solve", s(&input), "--svg", s(&dir.path().join("x.svg"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("only supported for d = 2"));
}

#[test]
fn verify_round_trip_relabeling_and_failures() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("inst.json");
    assert!(run(&[
        "gen",
        "--d",
        "2",
        "--r",
        "3",
        "--seed",
        "2",
        "-o",
        s(&input)
    ])
    .status
    .success());
    let res = dir.path().join("res.json");
    assert!(run(&["solve", s(&input), "-o", s(&res)]).status.success());
    let out = run(&["verify", s(&input), s(&res)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "valid");

    let doc: Value = serde_json::from_str(&fs::read_to_string(&res).unwrap()).unwrap();
    let mut blocks: Vec<Vec<usize>> = serde_json::from_value(doc["partition"].clone()).unwrap();
    blocks.reverse();
    let swapped = write(
        dir.path(),
        "swapped.json",
        &serde_json::json!({ "partition": blocks }).to_string(),
    );
    let out = run(&["verify", s(&input), s(&swapped)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["alpha"], doc["alpha"]);

    let square = write(dir.path(), "square.json", SQUARE);
    let corner = write(
        dir.path(),
        "corner.json",
        r#"{"partition": [[0, 1, 2], [3]]}"#,
    );
    let out = run(&["verify", s(&square), s(&corner)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "negative");

    // Opposite sides are parallel, so their affine hulls never meet.
    let sides = write(
        dir.path(),
        "sides.json",
        r#"{"partition": [[0, 1], [2, 3]]}"#,
    );
    let out = run(&["verify", s(&square), s(&sides)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "singular");

    let line4 = write(
        dir.path(),
        "collinear.json",
        r#"{"d": 2, "r": 2, "points": [[0,0],[1,0],[2,0],[3,0]]}"#,
    );
    let pairs = write(
        dir.path(),
        "pairs.json",
        r#"{"partition": [[0, 2], [1, 3]]}"#,
    );
    let out = run(&["verify", s(&line4), s(&pairs)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "singular");

    let broken = write(
        dir.path(),
        "broken.json",
        r#"{"partition": [[0, 1], [1, 2, 3]]}"#,
    );
    assert_eq!(
        run(&["verify", s(&square), s(&broken)]).status.code(),
        Some(2)
    );
}

#[test]
fn oracle_reports_unique_radon_partitions() {
    let dir = TempDir::new().unwrap();
    let line = write(dir.path(), "line.json", LINE);
    let doc = json(&run(&["oracle", s(&line)]));
    assert_eq!(doc["valid"].as_array().unwrap().len(), 1);
    assert_eq!(
        doc["valid"][0]["partition"],
        serde_json::json!([[0, 2], [1]])
    );

    let square = write(dir.path(), "square.json", SQUARE);
    let doc = json(&run(&["oracle", s(&square)]));
    assert_eq!(doc["valid"].as_array().unwrap().len(), 1);
    assert_eq!(
        doc["valid"][0]["partition"],
        serde_json::json!([[0, 3], [1, 2]])
    );
    assert_eq!(doc["total_proper_partitions"], "7");

    let input = dir.path().join("inst.json");
    assert!(run(&[
        "gen",
        "--d",
        "2",
        "--r",
        "3",
        "--seed",
        "8",
        "-o",
        s(&input)
    ])
    .status
    .success());
    let report = json(&run(&["oracle", s(&input)]));
    let solved = json(&run(&["solve", s(&input)]));
    let valid = report["valid"].as_array().unwrap();
    assert!(!valid.is_empty());
    assert!(valid
        .iter()
        .any(|v| v["partition"] == solved["partition"] && v["alpha"] == solved["alpha"]));
}

#[test]
fn gen_is_sized_and_deterministic() {
    let a = run(&["gen", "--d", "2", "--r", "3", "--seed", "5"]);
    let b = run(&["gen", "--d", "2", "--r", "3", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    assert_eq!(doc["points"].as_array().unwrap().len(), 7);
    let cube = json(&run(&[
        "gen", "--d", "3", "--r", "2", "--dist", "cube", "--seed", "1",
    ]));
    for p in cube["points"].as_array().unwrap() {
        for x in p.as_array().unwrap() {
            let v = match x {
                Value::String(t) => parse_rat(t).unwrap(),
                other => parse_rat(&other.to_string()).unwrap(),
            };
            assert!(v >= rat(0) && v <= rat(1));
        }
    }
    assert_eq!(run(&["gen", "--d", "0", "--r", "3"]).status.code(), Some(2));
}

#[test]
fn generated_instances_rarely_restart() {
    let zero_restarts = (0..100)
        .filter(|&seed| {
            let inst = random_instance(2, 3, Distribution::default(), seed);
            solve(&inst, &SolverConfig::with_seed(seed))
                .unwrap()
                .stats
                .restarts
                == 0
        })
        .count();
    assert!(zero_restarts >= 99, "{zero_restarts}/100");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(run(&["solve", s(&bad)]).status.code(), Some(2));
    let short = write(
        dir.path(),
        "short.json",
        r#"{"d": 2, "r": 3, "points": [[0, 0]]}"#,
    );
    assert_eq!(run(&["solve", s(&short)]).status.code(), Some(2));
    let frac = write(
        dir.path(),
        "frac.json",
        r#"{"d": 1, "r": 2, "points": [["1/0"], [1], [2]]}"#,
    );
    assert_eq!(run(&["solve", s(&frac)]).status.code(), Some(2));

    // Without any pivots allowed every attempt fails, and with no perturbed
    // certificate to fall back on the solver reports an internal error.
    let input = dir.path().join("inst.json");
    assert!(run(&[
        "gen",
        "--d",
        "2",
        "--r",
        "3",
        "--seed",
        "3",
        "-o",
        s(&input)
    ])
    .status
    .success());
    let out = run(&[
        "solve",
        s(&input),
        "--pivot-cap",
        "0",
        "--max-restarts",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn decimal_and_fraction_inputs_are_exact() {
    let dir = TempDir::new().unwrap();
    let input = write(
        dir.path(),
        "mixed.json",
        r#"{"d": 1, "points": [["0.5"], ["7/2"], [1.5]]}"#,
    );
    let out = run(&["solve", s(&input), "--r", "2"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["z"], serde_json::json!(["3/2"]));
    assert_eq!(doc["alpha"], serde_json::json!(["2/3", "1/3", "1"]));
}
