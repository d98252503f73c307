//! Golden corpus for the command-line surface: twenty invocations covering
//! every command, compared byte-for-byte against checked-in json, with exit
//! codes from the documented table. Values in the output must reparse and
//! re-evaluate to themselves.

use std::process::Command;
use std::time::Instant;

struct Case {
    name: &'static str,
    args: &'static [&'static str],
    exit: i32,
}

const CASES: &[Case] = &[
    Case {
        name: "01_eval_half_exponent",
        args: &["--format", "json", "--group", "Z/2", "eval", "x*t^(1/2) + t^3 + O(t^5)"],
        exit: 0,
    },
    Case {
        name: "02_eval_geometric_inverse",
        args: &["--format", "json", "--field", "Q", "--bound", "4", "eval", "1/(1-t)"],
        exit: 0,
    },
    Case {
        name: "03_derive_twisted",
        args: &["--format", "json", "--cmap", "1 -> 1", "derive", "x*t^2"],
        exit: 0,
    },
    Case {
        name: "04_dagger_unit_cmap",
        args: &["--format", "json", "--cmap", "1 -> 1", "dagger", "t"],
        exit: 0,
    },
    Case {
        name: "05_valuation_finite",
        args: &["--format", "json", "valuation", "3*t^2 + t^5"],
        exit: 0,
    },
    Case {
        name: "06_residue_constant_term",
        args: &["--format", "json", "residue", "2/3 + t"],
        exit: 0,
    },
    Case {
        name: "07_residue_outside_ring",
        args: &["--format", "json", "residue", "t^-1"],
        exit: 3,
    },
    Case {
        name: "08_constant_monomial",
        args: &["--format", "json", "--cmap", "1 -> 1/x", "constant?", "(1/x)*t"],
        exit: 0,
    },
    Case {
        name: "09_solve_linear_particular",
        args: &["--format", "json", "solve-linear", "Y' - Y", "x"],
        exit: 0,
    },
    Case {
        name: "10_solve_dagger_solution",
        args: &["--format", "json", "--cmap", "1 -> 1", "solve-dagger", "1"],
        exit: 0,
    },
    Case {
        name: "11_solve_dagger_unsat",
        args: &["--format", "json", "--cmap", "1 -> x", "solve-dagger", "1"],
        exit: 1,
    },
    Case {
        name: "12_solve_dagger_unknown",
        args: &[
            "--format", "json", "--cmap", "1 -> 1/x", "--search-bound", "5", "solve-dagger",
            "1/(2*x)",
        ],
        exit: 2,
    },
    Case {
        name: "13_lift_untwisted",
        args: &[
            "--format", "json", "--cmap", "1 -> 0", "--bound", "10", "lift", "Y' + Y - 1 - t",
        ],
        exit: 0,
    },
    Case {
        name: "14_lift_surjectivity_failure",
        args: &["--format", "json", "--field", "Q", "--cmap", "0", "lift", "Y' - 1"],
        exit: 1,
    },
    Case {
        name: "15_lift_not_quasilinear",
        args: &["--format", "json", "lift", "Y*Y' - 1"],
        exit: 4,
    },
    Case {
        name: "16_nth_root_binomial",
        args: &[
            "--format", "json", "--field", "Q", "--n", "2", "--bound", "4", "nth-root", "1+t",
        ],
        exit: 0,
    },
    Case {
        name: "17_kernel_z2",
        args: &[
            "--format", "json", "--field", "Q", "--group", "Z^2lex", "--cmap",
            "e1 -> 1, e2 -> 2", "--bound", "(10,0)", "kernel",
        ],
        exit: 0,
    },
    Case {
        name: "18_classify_many_constants",
        args: &["--format", "json", "--cmap", "1 -> 1/x", "classify"],
        exit: 0,
    },
    Case {
        name: "19_purity_z_in_half",
        args: &["--format", "json", "--group", "Z/2", "purity", "1"],
        exit: 0,
    },
    Case {
        name: "20_examples_e1",
        args: &["--format", "json", "examples", "run", "--only", "E1"],
        exit: 0,
    },
];

fn run_case(case: &Case) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_hahnlab"))
        .args(case.args)
        .env_remove("HAHNLAB_BOUND")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_11_golden_corpus() {
    let start = Instant::now();
    assert_eq!(CASES.len(), 20);
    for case in CASES {
        let golden = std::fs::read(format!(
            "{}/tests/golden/{}.json",
            env!("CARGO_MANIFEST_DIR"),
            case.name
        ))
        .unwrap_or_else(|e| panic!("missing golden for {}: {}", case.name, e));
        let (exit, stdout) = run_case(case);
        assert_eq!(exit, case.exit, "{}: wrong exit code", case.name);
        assert_eq!(
            stdout,
            golden,
            "{}: output drifted\n got: {}\nwant: {}",
            case.name,
            String::from_utf8_lossy(&stdout),
            String::from_utf8_lossy(&golden)
        );
    }
    let elapsed = start.elapsed();
    println!("[PASS] criterion 11: golden corpus ({:.2?})", elapsed);
    assert!(elapsed.as_secs() < 10, "golden corpus too slow: {:.2?}", elapsed);
}

/// Values printed by the CLI reparse and re-evaluate to themselves under the
/// same session flags.
#[test]
fn json_values_round_trip() {
    for case in CASES {
        if case.exit != 0 {
            continue;
        }
        let (_, stdout) = run_case(case);
        let v: serde_json::Value = serde_json::from_slice(&stdout).expect("valid json");
        let value_field = v
            .get("value")
            .or_else(|| v.get("witness"))
            .and_then(|x| x.as_str());
        let Some(value) = value_field else { continue };
        // rebuild the session flags, replace the command with eval <value>
        let mut args: Vec<&str> = Vec::new();
        let mut it = case.args.iter().peekable();
        while let Some(&a) = it.next() {
            if a.starts_with("--") {
                if a == "--search-bound" || a == "--n" || a == "--only" {
                    it.next();
                    continue;
                }
                args.push(a);
                if let Some(&&val) = it.peek() {
                    args.push(val);
                    it.next();
                }
            } else {
                break;
            }
        }
        args.push("eval");
        args.push(value);
        let out = Command::new(env!("CARGO_BIN_EXE_hahnlab"))
            .args(&args)
            .env_remove("HAHNLAB_BOUND")
            .output()
            .expect("binary runs");
        assert_eq!(out.status.code(), Some(0), "{}: value failed to re-evaluate", case.name);
        let round: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(
            round.get("value").and_then(|x| x.as_str()),
            Some(value),
            "{}: value not canonical under re-evaluation",
            case.name
        );
    }
}
