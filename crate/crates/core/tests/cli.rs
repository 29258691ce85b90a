use std::io::Write;

use clap::Parser;
use prs_core::cli::{run, Cli};
use prs_core::Error;

fn prs(args: &[&str]) -> prs_core::Result<(String, i32)> {
    let mut argv = vec!["prs"];
    argv.extend_from_slice(args);
    run(Cli::try_parse_from(argv).expect("arguments parse"))
}

#[test]
fn table_json_is_deterministic_and_matches_its_golden() {
    let args = ["table", "--n-max", "2", "--samples", "2", "--seed", "9"];
    let (a, code) = prs(&args).unwrap();
    assert_eq!(code, 0);
    let (b, _) = prs(&args).unwrap();
    assert_eq!(a, b);

    let mut golden = tempfile::NamedTempFile::new().unwrap();
    golden.write_all(a.as_bytes()).unwrap();
    let path = golden.path().to_str().unwrap().to_string();
    let mut with_golden = args.to_vec();
    with_golden.extend(["--golden", &path]);
    assert_eq!(prs(&with_golden).unwrap().1, 0);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    bad.write_all(a.replacen("\"unobstructed\"", "\"obstructed\"", 1).as_bytes()).unwrap();
    let path = bad.path().to_str().unwrap().to_string();
    let mut with_bad = args.to_vec();
    with_bad.extend(["--golden", &path]);
    assert_eq!(prs(&with_bad).unwrap().1, 1);
}

#[test]
fn table_markdown_lists_every_row() {
    let (md, code) = prs(&["table", "--n-max", "1", "--samples", "1", "--format", "md"]).unwrap();
    assert_eq!(code, 0);
    for label in ["S0", "twisted", "Sn", "A0", "A-1"] {
        assert!(md.contains(label), "{} missing from\n{}", label, md);
    }
}

#[test]
fn cohomology_reports_hp() {
    let (out, _) = prs(&["cohomology", "--family", "sn", "--n", "1", "--coeffs", "a0=0,c0=1"]).unwrap();
    assert!(out.contains("HP = (1, 2, 1)"), "{}", out);
    let (out, _) = prs(&["cohomology", "--family", "s0", "--coeffs", "1,2,3"]).unwrap();
    assert!(out.contains("HP = (2, 3, 1)"), "{}", out);
}

#[test]
fn obstruction_and_verify_family() {
    let (out, _) = prs(&["obstruction", "--family", "sn", "--n", "3", "--coeffs", "a0=0,c0=1,c1=2,c2=3"]).unwrap();
    assert!(out.contains("witness found") && out.contains("verdict: obstructed"), "{}", out);
    let (out, code) = prs(&["verify-family", "--family", "s0", "--coeffs", "A=1,B=2,C=3"]).unwrap();
    assert_eq!(code, 0, "{}", out);
    assert!(out.contains("KS rank: 3/3"), "{}", out);
    let (_, code) = prs(&["verify-family", "--family", "sn", "--n", "2", "--coeffs", "0,0,0"]).unwrap();
    assert_eq!(code, 1);
}

#[test]
fn bracket_on_s0() {
    let (out, _) = prs(&[
        "bracket", "--family", "s0", "--chart", "0",
        "--lhs", "d_xi^d_u + 2 xi d_xi^d_u + 3 xi^2 d_xi^d_u",
        "--rhs", "5 d_u + 7 d_xi + 11 xi d_xi + 13 xi^2 d_xi",
    ])
    .unwrap();
    assert_eq!(out.trim(), "-3*d_xi^d_u - 16*xi*d_xi^d_u - 7*xi^2*d_xi^d_u");
    let (out, _) = prs(&["bracket", "--family", "s0", "--lhs", "d_xi^d_u", "--rhs", "xi d_xi^d_u"]).unwrap();
    assert!(out.starts_with("0 "));
}

#[test]
fn input_errors() {
    assert!(matches!(prs(&["cohomology", "--family", "s0", "--coeffs", "1,2"]), Err(Error::Arity(_))));
    assert!(matches!(
        prs(&["bracket", "--family", "s0", "--lhs", "1 + d_u", "--rhs", "d_u"]),
        Err(Error::Parse(_))
    ));
    assert!(prs(&["table", "--n-max", "0"]).is_err());
    assert!(Cli::try_parse_from(["prs", "cohomology", "--family", "s7"]).is_err());
}
