use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use vdelta_core::cube::Subset;
use vdelta_core::subdivision::SubsetFunction;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdelta")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Values grouped by subset size, each group as its sorted distinct values.
fn by_size(p: &SubsetFunction) -> Vec<Vec<String>> {
    (0..=p.n())
        .map(|k| {
            let mut v: Vec<String> = Subset::all(p.n()).filter(|s| s.len() == k).map(|s| p.get(s).to_string()).collect();
            v.sort();
            v.dedup();
            v
        })
        .collect()
}

#[test]
fn check_rejects_counterexample_with_antipodal_edge() {
    let out = run(&["check", "--input", &data("counterexample_p.json")]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["result"]["valuated"], false);
    assert_eq!(r["result"]["certificate"]["edge"], serde_json::json!(["", "123"]));
}

#[test]
fn minors_of_violating_matrix_give_counterexample() {
    let out = run(&["minors", "--input", &data("violating_hermitian.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    let p = SubsetFunction::from_json(&r["result"]["p"]).unwrap();
    assert_eq!(by_size(&p), vec![vec!["0"], vec!["2"], vec!["1"], vec!["0"]]);
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(data("counterexample_p.json")).unwrap()).unwrap();
    assert_eq!(p, SubsetFunction::from_json(&expected).unwrap());
}

#[test]
fn cone_dimension_of_codimension_one_witness() {
    let out = run(&["cone-dim", "--input", &data("dimdr4.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"], serde_json::json!({ "dim": 15, "codim": 1 }));
}

#[test]
fn minors_then_check_on_first_example() {
    let out = run(&["minors", "--input", &data("first_example.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    let p = SubsetFunction::from_json(&r["result"]["p"]).unwrap();
    assert_eq!(by_size(&p), vec![vec!["0"], vec!["1"], vec!["0"], vec!["1"]]);
    assert_eq!(r["result"]["minors"]["123"], "-3*t+t^3");

    let path = std::env::temp_dir().join(format!("vdelta-minors-{}.json", std::process::id()));
    std::fs::write(&path, &out.stdout).unwrap();
    let checked = run(&["check", "--input", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code(&checked), 0);
    assert_eq!(report(&checked)["result"]["valuated"], true);
}

#[test]
fn rayleigh_and_factorization_of_first_example() {
    let out = run(&["rayleigh", "--input", &data("first_example_rayleigh.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["delta"], "x3^2+2*t*x3+(1+t^2)");
    assert_eq!(r["result"]["residue"], "x3^2+1");

    let out = run(&["factorize", "--input", &data("first_example_rayleigh.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["holds"], true);
    assert_eq!(r["result"]["branch"], "independent");
    assert_eq!(r["result"]["product"], r["result"]["rayleigh"]);
}

#[test]
fn eisenstein_examples_are_accepted() {
    for (file, sizes) in [("eisenstein_hermitian.json", ["0", "0", "1", "3"]), ("eisenstein_skew.json", ["0", "inf", "0", "1"])] {
        let out = run(&["minors", "--input", &data(file)]);
        assert_eq!(code(&out), 0, "{file}");
        let p = SubsetFunction::from_json(&report(&out)["result"]["p"]).unwrap();
        let expected: Vec<Vec<String>> = sizes.iter().map(|s| vec![s.to_string()]).collect();
        assert_eq!(by_size(&p), expected, "{file}");
        let out = run(&["check", "--input", &String::from_utf8(out.stdout).unwrap()]);
        assert_eq!(code(&out), 0, "{file}");
    }
}

#[test]
fn edges_and_cells() {
    let out = run(&["edges", "--input", &data("counterexample_p.json")]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["result"]["edges"], serde_json::json!([["", "123"]]));

    let out = run(&["edges", "--min-len", "4", "--input", &data("dimdr4.json")]);
    assert_eq!(code(&out), 0);

    let ex = report(&run(&["cells", "--mode", "exhaustive", "--input", &data("dimdr4.json")]));
    let bfs = report(&run(&["cells", "--mode", "bfs", "--input", &data("dimdr4.json")]));
    assert_eq!(ex["result"]["cells"], bfs["result"]["cells"]);
    assert_eq!(ex["result"]["mode"], "exhaustive");
    assert_eq!(bfs["result"]["mode"], "bfs");
}

#[test]
fn delta_matroid_commands() {
    let out = run(&["dom-check", "--input", &data("delta3.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["result"]["delta_matroid"], true);

    let out = run(&["dom-check", "--input", r#"{"n": 3, "bases": ["", "123"]}"#]);
    assert_eq!(code(&out), 1);
    assert!(report(&out)["result"]["violation"].is_object());

    let out = run(&["rank", "--input", &data("delta3.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    // r(S) = n − min_B |B Δ S|, checked directly.
    let bases = [0b000u32, 0b011, 0b101, 0b110, 0b111];
    for s in Subset::all(3) {
        let expected = 3 - bases.iter().map(|b| (b ^ s.bits).count_ones()).min().unwrap();
        assert_eq!(r["result"]["rank"][s.to_string()], expected, "{s}");
    }
    let neg = SubsetFunction::from_json(&r["result"]["neg_rank"]).unwrap();
    let out = run(&["check", "--input", &serde_json::to_string(&neg.to_json()).unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn isotropic_and_realize() {
    let out = run(&["isotropic", "--input", &data("isotropic_odd.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["isotropic"], true);
    assert_eq!(r["result"]["minors_agree"], true);

    let out = run(&["realize3", "--input", &data("counterexample_p.json")]);
    assert_eq!(code(&out), 1);

    let p = r#"{"n": 3, "values": {"": "0", "1": "1", "2": "1", "3": "1", "12": "0", "13": "0", "23": "0", "123": "1"}}"#;
    let out = run(&["realize3", "--input", p]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["pass"], true);
    assert!(r["result"]["hypdet_sign"].as_i64().unwrap() <= 0);
}

#[test]
fn circuits_of_four_cube() {
    let out = run(&["circuits", "--input", &data("circuits4.json")]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["count"], 48);
    let mut sizes: Vec<u64> = r["result"]["orbits"].as_array().unwrap().iter().map(|o| o["size"].as_u64().unwrap()).collect();
    sizes.sort();
    assert_eq!(sizes, vec![8, 16, 24]);
}

#[test]
fn reports_are_deterministic_across_job_counts() {
    let input = data("search_eis.json");
    let a = run(&["search", "--seed", "11", "--trials", "40", "--jobs", "1", "--input", &input]);
    let b = run(&["search", "--seed", "11", "--trials", "40", "--jobs", "2", "--input", &input]);
    let c = run(&["search", "--seed", "11", "--trials", "40", "--input", &input]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let r = report(&a);
    assert_eq!(r["result"]["trials_run"], 40);
    assert_eq!(r["input"]["spec"]["valuation"]["kind"], "p-adic");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));

    let x = run(&["check", "--jobs", "1", "--input", &data("dimdr4.json")]);
    let y = run(&["check", "--input", &data("dimdr4.json")]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn embedded_inputs_round_trip() {
    let out = run(&["check", "--input", &data("dimdr4.json")]);
    let original: Value = serde_json::from_str(&std::fs::read_to_string(data("dimdr4.json")).unwrap()).unwrap();
    assert_eq!(SubsetFunction::from_json(&report(&out)["input"]).unwrap(), SubsetFunction::from_json(&original).unwrap());

    let out = run(&["minors", "--input", &data("first_example.json")]);
    let embedded = &report(&out)["input"];
    let again = run(&["minors", "--input", &serde_json::to_string(embedded).unwrap()]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("vdelta-out-{}.json", std::process::id()));
    let out = run(&["cone-dim", "--input", &data("dimdr4.json"), "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(r["result"]["dim"], 15);
}

#[test]
fn input_errors_exit_two() {
    let out = run(&["check", "--input", r#"{"n": 3"#]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed JSON"));

    let out = run(&["check", "--input", "/nonexistent/p.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/p.json"));

    let out = run(&["search", "--input", &data("search_eis.json")]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));

    let out = run(&["minors", "--input", r#"{"spec": "nope", "entries": [["1"]]}"#]);
    assert_eq!(code(&out), 2);

    let out = run(&["cone-dim", "--input", &data("delta3.json")]);
    assert_eq!(code(&out), 2);
}
