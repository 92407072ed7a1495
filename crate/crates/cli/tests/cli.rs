use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use i3rab_cli::{run, EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_USAGE};

const PADT: &str = include_str!("../../core/data/sample_padt.conll");
const GOLD: &str = include_str!("../../core/data/sample_i3rab.conll");

fn workdir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn file(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn i3rab(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("i3rab").chain(args.iter().copied()), &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

#[test]
fn eval_identical_files() {
    let dir = workdir("eval");
    let gold = file(&dir, "gold.conll", GOLD);
    let r = i3rab(&["eval", &gold, &gold]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out, "UAS 100.00 / LAS 100.00\n");
    let r = i3rab(&["eval", "--machine", "--exclude-punct", &gold, &gold]);
    assert!(r.out.starts_with("uas\t100.00\nlas\t100.00\n"));
}

#[test]
fn usage_errors() {
    let dir = workdir("usage");
    let gold = file(&dir, "gold.conll", GOLD);
    let r = i3rab(&["eval", &gold]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("usage: i3rab"));
    assert_eq!(i3rab(&[]).code, EXIT_USAGE);
    assert_eq!(i3rab(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(i3rab(&["render", "--format", "png", &gold, "x"]).code, EXIT_USAGE);
    assert_eq!(i3rab(&["crossval", "--k", "99", &gold]).code, EXIT_USAGE);
    assert_eq!(i3rab(&["--help"]).code, EXIT_OK);
}

#[test]
fn file_errors() {
    let dir = workdir("io");
    let missing = dir.join("missing.conll").display().to_string();
    assert_eq!(i3rab(&["validate", &missing]).code, EXIT_IO);
    let broken = file(&dir, "broken.conll", "1\tword\n");
    assert_eq!(i3rab(&["validate", &broken]).code, EXIT_IO);
    let gold = file(&dir, "gold.conll", GOLD);
    assert_eq!(i3rab(&["validate", "--schema", &missing, &gold]).code, EXIT_IO);
    let model = file(&dir, "model.txt", "not a model\n");
    let out = dir.join("out.conll").display().to_string();
    assert_eq!(i3rab(&["parse", "--model", &model, &gold, &out]).code, EXIT_IO);
}

#[test]
fn validate_corpus_and_invalid_file() {
    let dir = workdir("validate");
    let gold = file(&dir, "sample.conll", GOLD);
    let r = i3rab(&["validate", "--schema", "default", &gold]);
    assert_eq!(r.code, EXIT_OK, "{}", r.out);
    assert!(r.out.ends_with("16 sentences, 0 errors, 0 warnings\n"));

    let cyclic = "1\tالشمس\t_\tN\tN-\t_\t2\tTOPIC\t_\t_\n2\tمشرقة\t_\tA\tA-\t_\t1\tPRED-NOUN\t_\t_\n\n";
    let bad = file(&dir, "bad.conll", cyclic);
    let r = i3rab(&["validate", "--machine", &bad]);
    assert_eq!(r.code, EXIT_INVALID);
    assert!(r.out.contains("\tCYCLE\t"));
}

#[test]
fn convert_reproduces_gold() {
    let dir = workdir("convert");
    let input = file(&dir, "padt.conll", PADT);
    let out = dir.join("i3rab.conll");
    let rep = dir.join("report.txt");
    let r = i3rab(&[
        "convert",
        "--schema",
        "default",
        "--rules",
        "default",
        &input,
        out.to_str().unwrap(),
        "--report",
        rep.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(fs::read_to_string(&out).unwrap(), GOLD);
    let report = fs::read_to_string(&rep).unwrap();
    assert!(report.contains("dropped_pronoun\t3\n"));
    assert_eq!(fs::read_to_string(&input).unwrap(), PADT);

    let rules = file(&dir, "rules.conf", "[label_map]\nSb -> NOT-A-LABEL\n");
    let r = i3rab(&["convert", "--rules", &rules, &input, out.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_IO);
}

#[test]
fn train_parse_is_deterministic() {
    let dir = workdir("train");
    let gold = file(&dir, "gold.conll", GOLD);
    let (m1, m2) = (dir.join("a.model"), dir.join("b.model"));
    for m in [&m1, &m2] {
        let r = i3rab(&[
            "train",
            "--schema",
            "default",
            "--epochs",
            "5",
            "--seed",
            "3",
            &gold,
            m.to_str().unwrap(),
        ]);
        assert_eq!(r.code, EXIT_OK, "{}", r.err);
    }
    assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());

    let parsed = dir.join("parsed.conll");
    let r = i3rab(&[
        "parse",
        "--model",
        m1.to_str().unwrap(),
        "--schema",
        "default",
        &gold,
        parsed.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let r = i3rab(&["eval", &gold, parsed.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.starts_with("UAS "));
}

#[test]
fn stats_blocks() {
    let dir = workdir("stats");
    let gold = file(&dir, "gold.conll", GOLD);
    let r = i3rab(&["stats", "--schema", "default", "--exclude-root-dot", &gold]);
    assert_eq!(r.code, EXIT_OK);
    for block in [
        "direction\n",
        "distance (root arcs)\n",
        "distance (other arcs)\n",
        "cardinality\n",
    ] {
        assert!(r.out.contains(block), "missing {block}");
    }
    let r = i3rab(&["stats", "--machine", &gold]);
    assert!(r.out.lines().all(|l| l.split('\t').count() >= 3));
}

#[test]
fn crossval_table() {
    let dir = workdir("crossval");
    let gold = file(&dir, "gold.conll", GOLD);
    let r = i3rab(&[
        "crossval", "--schema", "default", "--k", "4", "--epochs", "3", "--seed", "1", &gold,
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines[0], "fold\tuas\tlas");
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("avg\t"));
}

#[test]
fn render_outputs() {
    let dir = workdir("render");
    let one = file(&dir, "one.conll", "1\tنعم\t_\tF\tF-\t_\t0\tTOPIC\t_\t_\n\n");
    let out = dir.join("one.txt");
    assert_eq!(i3rab(&["render", &one, out.to_str().unwrap()]).code, EXIT_OK);
    assert_eq!(fs::read_to_string(&out).unwrap(), "ROOT → نعم (F) [TOPIC]\n");

    let gold = file(&dir, "gold.conll", GOLD);
    let svg = dir.join("tree.svg");
    let r = i3rab(&[
        "render",
        "--format",
        "svg",
        "--rtl",
        "--sentence",
        "1",
        &gold,
        svg.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    assert_eq!(
        i3rab(&["render", "--sentence", "99", &gold, svg.to_str().unwrap()]).code,
        EXIT_USAGE
    );
}

#[test]
fn binary_exit_codes() {
    let dir = workdir("binary");
    let gold = file(&dir, "gold.conll", GOLD);
    let exe = env!("CARGO_BIN_EXE_i3rab");
    let ok = Command::new(exe).args(["eval", &gold, &gold]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "UAS 100.00 / LAS 100.00\n");
    let usage = Command::new(exe).args(["eval", &gold]).output().unwrap();
    assert_eq!(usage.status.code(), Some(EXIT_USAGE));
}
