use std::ffi::OsString;
use std::path::PathBuf;

use satcut::cli::run;
use satcut::textio::parse_proof;
use satcut_core::sequent::g_rule_table;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn satcut(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<OsString> = std::iter::once("satcut").chain(args.iter().copied()).map(OsString::from).collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("satcut-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn prove_in_g_prints_records() {
    let (code, out, _) = satcut(&["prove", "--calculus", "g", "P, Q |- P & Q"]);
    assert_eq!(code, 0);
    assert_eq!(out, "and_right :: P, Q |- P & Q\n  axiom {P} :: P, Q |- P\n  axiom {Q} :: P, Q |- Q\n");
}

#[test]
fn printed_proof_checks() {
    let (_, out, _) = satcut(&["prove", "--calculus", "g", "(P | (P -> Q)) -> Q |- Q"]);
    parse_proof(&out, &g_rule_table()).unwrap();
    let path = temp_file("named.proof", &out);
    let (code, out, _) = satcut(&["check", "--calculus", "g", "--report-cuts", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("OK\n"));
    assert!(out.contains("general cut at"));
}

#[test]
fn unprovable_exits_one() {
    for calc in ["g", "k", "d"] {
        let (code, out, _) = satcut(&["prove", "--calculus", calc, "|- P | (P -> Q)"]);
        assert_eq!((code, out.as_str()), (1, "UNPROVABLE\n"), "{calc}");
    }
}

#[test]
fn sequent_from_file() {
    let (code, out, _) = satcut(&["prove", "--calculus", "k", &format!("@{}", data("named.seq"))]);
    assert_eq!(code, 0);
    assert!(out.contains("contr_imp_left"));
}

#[test]
fn invalid_proof_is_rejected() {
    let path = temp_file("bad.proof", "axiom {P} :: Q |- P\n");
    let (code, out, _) = satcut(&["check", "--calculus", "g", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.starts_with("INVALID"));
}

#[test]
fn decide_worked_example() {
    let (code, out, _) = satcut(&["decide", &data("system_s.apds"), "S(a b)", "--proof"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "TRUE");
    assert!(lines[1].ends_with(":: S(a b)"));
    assert_eq!(lines.len(), 5);
    let (code, out, _) = satcut(&["decide", &data("system_s.apds"), "P(eps)"]);
    assert_eq!((code, out.as_str()), (1, "FALSE\n"));
}

#[test]
fn saturated_system_round_trips() {
    let out_path = temp_file("s.sat.apds", "");
    let (code, _, _) = satcut(&["saturate", &data("system_s.apds"), "-o", out_path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.matches("# sat").count(), 8);
    let again = temp_file("s.sat2.apds", "");
    satcut(&["saturate", out_path.to_str().unwrap(), "-o", again.to_str().unwrap()]);
    let second = std::fs::read_to_string(&again).unwrap();
    assert_eq!(second.matches("# sat").count(), 0);
    assert_eq!(second.lines().filter(|l| l.contains(" : ")).count(), 15);
}

#[test]
fn proof_from_decide_checks_against_system() {
    let (_, out, _) = satcut(&["decide", &data("system_s.apds"), "S(a b)", "--proof"]);
    let proof: String = out.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let path = temp_file("sab.proof", &proof);
    let (code, out, _) = satcut(&["check", "--calculus", "apds", "--system", &data("system_s.apds"), "--report-cuts", path.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (0, "OK\n"));
}

#[test]
fn fsa_runs() {
    let file = data("odd_even.fsa");
    assert_eq!(satcut(&["fsa", "--file", &file, "--word", "a a a", "--state", "odd"]).1, "ACCEPT\n");
    let (code, out, _) = satcut(&["fsa", "--file", &file, "--word", "a a", "--state", "odd"]);
    assert_eq!((code, out.as_str()), (1, "REJECT\n"));
}

#[test]
fn fdl_eval_and_prove() {
    let model = data("one_point.fdl");
    assert_eq!(satcut(&["fdl-eval", "--model", &model, "forall x. P(x)"]), (0, "TRUE\n".into(), String::new()));
    assert_eq!(satcut(&["fdl-eval", "--model", &model, "exists x. ~P(x)"]).0, 1);
    let (code, out, _) = satcut(&["prove", "--calculus", "fdl", "--model", &model, "|- forall x. P(x) | ~P(x)"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("forall_intro"));
}

#[test]
fn compare_enumerates_in_order() {
    let (code, out, _) = satcut(&["compare", "--max-connectives", "1", "--jobs", "3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4 + 48);
    assert_eq!(lines[0], "|- p\tfalse\tfalse\tfalse\tfalse");
    assert_eq!(lines[2], "|- top\ttrue\ttrue\ttrue\ttrue");
    let (_, quiet, _) = satcut(&["compare", "--max-connectives", "2", "--quiet"]);
    assert_eq!(quiet, "");
}

#[test]
fn compare_from_file() {
    let path = temp_file("seqs.txt", "|- p -> p\n(p | (p -> q)) -> q |- q\n|- p | (p -> q)\n");
    let (code, out, _) = satcut(&["compare", "--file", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let verdicts: Vec<&str> = out.lines().map(|l| l.rsplit('\t').next().unwrap()).collect();
    assert_eq!(verdicts, ["true", "true", "false"]);
}

#[test]
fn usage_and_input_errors_exit_three() {
    assert_eq!(satcut(&["bogus"]).0, 3);
    assert_eq!(satcut(&["prove", "--calculus", "g"]).0, 3);
    let (code, _, err) = satcut(&["prove", "--calculus", "g", "P |-"]);
    assert_eq!(code, 3);
    assert!(err.contains("1:5"), "{err}");
    assert_eq!(satcut(&["decide", "/nonexistent/system.apds", "S(a)"]).0, 3);
    assert_eq!(satcut(&["prove", "--calculus", "fdl", "|- P"]).0, 3);
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, err) = satcut(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("saturate"));
    assert!(err.is_empty());
}
