use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rfext_cli::helper_file::HelperFile;

fn rfext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfext")).args(args).output().expect("spawn rfext")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn field(out: &str, key: &str) -> Option<String> {
    out.lines().find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
}

const W64: &str = "1011001110001111000010101100110010101111000011110000111100001010";

#[test]
fn params_reports_key_lengths() {
    let new = rfext(&["params", "--n", "1024", "--m", "768", "--logd", "64", "--variant", "new"]);
    assert_eq!(new.status.code(), Some(0));
    assert_eq!(field(&stdout(&new), "ell").as_deref(), Some("192"));
    let post = rfext(&["params", "--n", "1024", "--m", "768", "--logd", "64", "--variant", "dkrs-post"]);
    assert_eq!(post.status.code(), Some(0));
    assert_eq!(field(&stdout(&post), "ell").as_deref(), Some("128"));
}

#[test]
fn params_names_the_violated_constraint() {
    let o = rfext(&["params", "--n", "64", "--m", "30"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("uniformity constraint"), "{}", stderr(&o));
}

#[test]
fn params_for_a_code() {
    let o = rfext(&["params", "--code", "bch-255-8", "--logd", "8", "--loge", "2", "--truncate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for key in ["v", "ell", "beta", "L", "log2_B", "n_prime", "k"] {
        assert!(field(&out, key).is_some(), "missing {key} in {out}");
    }
    assert_eq!(field(&out, "truncated").as_deref(), Some("true"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(rfext(&["params"]).status.code(), Some(2));
    assert_eq!(rfext(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(rfext(&["params", "--n", "64", "--variant", "nope"]).status.code(), Some(2));
    assert_eq!(rfext(&["--help"]).status.code(), Some(0));
}

#[test]
fn gen_then_rep_reproduces_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let (w, helper) = (dir.path().join("w.txt"), dir.path().join("p.bin"));
    fs::write(&w, W64).unwrap();
    for variant in ["new", "new-short", "dkrs-pre", "dkrs-post", "dkrs-improved-pre", "dkrs-improved-post"] {
        let g = rfext(&[
            "gen", "--variant", variant, "--n", "64", "--m", "60", "--logd", "3", "--input", path(&w), "--helper",
            path(&helper),
        ]);
        assert_eq!(g.status.code(), Some(0), "{variant}: {}", stderr(&g));
        let r = rfext(&["rep", "--input", path(&w), "--helper", path(&helper)]);
        assert_eq!(r.status.code(), Some(0), "{variant}: {}", stderr(&r));
        assert_eq!(stdout(&r), stdout(&g), "{variant}");
    }
}

#[test]
fn seeded_gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.hex");
    fs::write(&w, "b38f0acaf0f0f0a\n0").unwrap();
    let mut runs = Vec::new();
    for name in ["a.bin", "b.bin"] {
        let helper = dir.path().join(name);
        let o = rfext(&[
            "gen", "--n", "64", "--m", "60", "--logd", "3", "--seed", "42", "--input", path(&w), "--helper",
            path(&helper),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stderr(&o).contains("uniformly random seed"));
        runs.push((stdout(&o), fs::read(&helper).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn tampered_helper_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (w, helper) = (dir.path().join("w.txt"), dir.path().join("p.bin"));
    fs::write(&w, W64).unwrap();
    let g = rfext(&["gen", "--n", "64", "--m", "60", "--logd", "3", "--input", path(&w), "--helper", path(&helper)]);
    assert_eq!(g.status.code(), Some(0));
    let mut bytes = fs::read(&helper).unwrap();
    // sigma is the last field; flip its first bit.
    let file = HelperFile::from_bytes(&bytes).unwrap();
    let at = bytes.len() - file.sigma.len().div_ceil(8);
    bytes[at] ^= 0x80;
    fs::write(&helper, &bytes).unwrap();
    let r = rfext(&["rep", "--input", path(&w), "--helper", path(&helper)]);
    assert_eq!(r.status.code(), Some(1));
    assert_eq!(stdout(&r).trim(), "REJECT");
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (w, helper) = (dir.path().join("w.txt"), dir.path().join("p.bin"));
    fs::write(&w, W64).unwrap();
    fs::write(&helper, b"RFEXTv01\x7f").unwrap();
    assert_eq!(rfext(&["rep", "--input", path(&w), "--helper", path(&helper)]).status.code(), Some(2));
    fs::write(&w, "0101").unwrap();
    let g = rfext(&["gen", "--n", "64", "--m", "60", "--logd", "3", "--input", path(&w), "--helper", path(&helper)]);
    assert_eq!(g.status.code(), Some(2));
    let missing = dir.path().join("absent");
    assert_eq!(rfext(&["rep", "--input", path(&missing), "--helper", path(&helper)]).status.code(), Some(2));
}

#[test]
fn fuzzy_gen_then_rep_with_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (w, wp, helper) = (dir.path().join("w.txt"), dir.path().join("wp.txt"), dir.path().join("p.bin"));
    let bits: String = (0..255).map(|i| if (i * 7 + i / 3) % 5 < 2 { '1' } else { '0' }).collect();
    fs::write(&w, &bits).unwrap();
    let mut noisy: Vec<u8> = bits.clone().into_bytes();
    for pos in [0, 17, 40, 99, 128, 200, 230, 254] {
        noisy[pos] ^= 1;
    }
    fs::write(&wp, &noisy).unwrap();
    let g = rfext(&[
        "fuzzy-gen", "--code", "bch-255-8", "--logd", "8", "--loge", "2", "--truncate", "--input", path(&w),
        "--helper", path(&helper),
    ]);
    assert_eq!(g.status.code(), Some(0), "{}", stderr(&g));
    let r = rfext(&["fuzzy-rep", "--input", path(&wp), "--helper", path(&helper)]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    assert_eq!(stdout(&r), stdout(&g));
    // An errorless rep refuses a fuzzy helper file.
    assert_eq!(rfext(&["rep", "--input", path(&w), "--helper", path(&helper)]).status.code(), Some(2));
}

#[test]
fn fuzzy_rep_rejects_tampered_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let (w, helper) = (dir.path().join("w.txt"), dir.path().join("p.bin"));
    fs::write(&w, "1011001").unwrap();
    let g = rfext(&[
        "fuzzy-gen", "--code", "hamming-7-1", "--v", "1", "--ell", "1", "--seed", "3", "--input", path(&w),
        "--helper", path(&helper),
    ]);
    assert_eq!(g.status.code(), Some(0), "{}", stderr(&g));
    let mut bytes = fs::read(&helper).unwrap();
    *bytes.last_mut().unwrap() ^= 0x80;
    fs::write(&helper, &bytes).unwrap();
    let r = rfext(&["fuzzy-rep", "--input", path(&w), "--helper", path(&helper)]);
    assert_eq!(r.status.code(), Some(1));
    assert_eq!(stdout(&r).trim(), "REJECT");
}

#[test]
fn attack_reports_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("attack.csv");
    let o = rfext(&[
        "attack", "--n", "56", "--m", "54", "--logd", "2", "--trials", "20000", "--seed", "5", "--csv", path(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert_eq!(field(&out, "result").as_deref(), Some("PASS"));
    assert_eq!(field(&out, "bound").as_deref(), Some("0.125000"));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("variant,"));
}

#[test]
fn attack_on_new_construction_stays_below_delta() {
    let o = rfext(&["attack", "--variant", "new", "--n", "56", "--m", "54", "--logd", "2", "--trials", "20000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    let rate: f64 = field(&out, "rate").unwrap().parse().unwrap();
    let delta: f64 = field(&out, "delta").unwrap().parse().unwrap();
    assert!(rate <= delta);
}

#[test]
fn attack_argument_errors_exit_2() {
    assert_eq!(rfext(&["attack", "--n", "56", "--m", "54", "--logd", "2", "--trials", "0"]).status.code(), Some(2));
    // Robustness target too strong for any tag: outside the regime.
    assert_eq!(rfext(&["attack", "--n", "16", "--m", "8", "--logd", "40"]).status.code(), Some(2));
}

#[test]
fn verify_field_suite() {
    let o = rfext(&["verify", "--suite", "field"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("PASS field.ring_laws"));
    assert!(out.contains("PASS field.half_swap"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn verify_robustness_suite_at_n8() {
    let o = rfext(&["verify", "--suite", "robustness", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS robustness.bad_sets"));
    assert!(stdout(&o).contains("PASS robustness.optimal_forgery"));
}

#[test]
fn verify_uniformity_suite_at_n12() {
    let o = rfext(&["verify", "--suite", "uniformity", "--n", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS uniformity.extractor"));
}

#[test]
fn verify_rejects_oversized_instances() {
    assert_eq!(rfext(&["verify", "--suite", "robustness", "--n", "30"]).status.code(), Some(2));
}
