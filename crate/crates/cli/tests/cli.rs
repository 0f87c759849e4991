use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use wachlab_cli::run_text;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wachlab-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn wachlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wachlab")).args(args).output().unwrap()
}

const SWAP: &str = "p = 3\ncommands = [\"check\", \"slopes\", \"wach\", \"tam\", \"cep\"]\n\n[[modules]]\njumps = [0, 1]\nmatrix = [[0, 1], [1, 0]]\n";

#[test]
fn run_swap_module() {
    let dir = scratch("swap");
    let input = dir.join("swap.toml");
    fs::write(&input, SWAP).unwrap();
    let out = wachlab(&["run", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema"], "wachlab-report/1");
    let results = report["modules"][0]["results"].as_array().unwrap();
    assert!(results.iter().all(|r| r["status"] == "ok"));
    assert_eq!(results[1]["output"]["slopes"], serde_json::json!(["1/2", "1/2"]));
}

#[test]
fn failing_verdicts_set_the_exit_code() {
    let dir = scratch("trivial");
    let input = dir.join("trivial.toml");
    fs::write(&input, "p = 3\ncommands = [\"tam\"]\n[[modules]]\njumps = [0]\nmatrix = [[1]]\n").unwrap();
    let out = wachlab(&["run", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["modules"][0]["results"][0]["error"]["kind"], "Degenerate");
}

#[test]
fn overrides_and_output_file() {
    let dir = scratch("overrides");
    let input = dir.join("swap.toml");
    let output = dir.join("report.json");
    fs::write(&input, SWAP).unwrap();
    let out = wachlab(&[
        "run",
        input.to_str().unwrap(),
        "--commands",
        "slopes,iwasawa-check",
        "--n",
        "12",
        "--m-t",
        "8",
        "--seed",
        "5",
        "-o",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(report["precision"]["n"], 12);
    assert_eq!(report["seed"], 5);
    assert_eq!(report["modules"][0]["results"].as_array().unwrap().len(), 2);
    assert_eq!(wachlab(&["run", input.to_str().unwrap(), "--commands", "nope"]).status.code(), Some(2));
}

#[test]
fn generate_then_run() {
    let dir = scratch("generate");
    let out = wachlab(&["generate", "--p", "5", "--d-max", "2", "--count", "3", "--seed", "9", "--out-dir", dir.to_str().unwrap()]);
    assert!(out.status.success());
    for i in 0..3 {
        let path = dir.join(format!("job-{i:04}.toml"));
        let run = wachlab(&["run", path.to_str().unwrap(), "--commands", "check,tam"]);
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stdout));
    }
}

#[test]
fn corpus_output_is_independent_of_threads() {
    let args = ["corpus", "--p", "3", "--d-max", "2", "--count", "4", "--seed", "3"];
    let one = wachlab(&[&["--threads", "1"], &args[..]].concat());
    let four = wachlab(&[&["--threads", "4"], &args[..]].concat());
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stdout));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn malformed_documents_never_crash() {
    let cases = [
        "",
        "p = ",
        "p = 3\n[[modules]]\n",
        "p = 3\n[[modules]]\njumps = [0, 1]\nmatrix = [[1]]\n",
        "p = 3\n[[modules]]\njumps = [1, 0]\nmatrix = [[1, 0], [0, 1]]\n",
        "p = 4\n[[modules]]\njumps = [0]\nmatrix = [[1]]\n",
        "p = 3\nf = 0\n",
        "p = 3\n[precision]\nn = 80\n",
        "p = 3\n[precision]\nm = 1\n",
        "p = 3\n[precision]\nm_t = 0\n",
        "p = 3\ngamma = 6\n",
        "p = 3\n[[modules]]\njumps = [0]\nmatrix = [[\"12a\"]]\n",
        "p = 3\n[[modules]]\njumps = [0]\nmatrix = [[\"-\"]]\n",
        "p = 3\n[[modules]]\njumps = [0]\nmatrix = [[1.5]]\n",
        "p = 3\n[[modules]]\njumps = []\nmatrix = []\n",
        "p = 3\nbogus = 1\n",
        "p = 3\ncommands = [\"wach\"]\n[[modules]]\njumps = [0, 2]\nmatrix = [[1, 0], [1, 1]]\n[precision]\nn = 6\nm = 6\n",
    ];
    for text in cases {
        let report = run_text(text);
        let errors = report.document_errors.len()
            + report.modules.iter().flat_map(|m| &m.results).filter(|r| r.error.is_some()).count();
        assert!(errors > 0, "{text:?} was accepted");
        assert!(!report.all_passed());
        serde_json::from_str::<Value>(&report.to_json()).unwrap();
    }
}
