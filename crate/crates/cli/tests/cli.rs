use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn registry(name: &str) -> String {
    format!("{}/../core/registries/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_with_stdin(args: &[&str], stdin: &[u8]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("semrep").chain(args.iter().copied());
    let status = semrep_cli::run(argv, &mut &stdin[..], &mut out, &mut err);
    (status.code(), String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_with_stdin(args, b"")
}

#[test]
fn validate_golden() {
    let (code, out, err) = run(&["validate", &fixture("golden.xml")]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "valid: 0 errors, 0 warnings\n");
    assert!(err.is_empty(), "{err}");
}

#[test]
fn validate_with_registry_file() {
    let (code, out, _) = run(&["--registry", &registry("default.reg"), "validate", &fixture("golden.xml")]);
    assert_eq!(code, 0);
    assert_eq!(out, "valid: 0 errors, 0 warnings\n");
}

#[test]
fn strict_turns_unknown_categories_into_errors() {
    let reg = registry("quant.reg");
    let (code, out, _) = run(&["--registry", &reg, "validate", &fixture("golden.xml")]);
    assert_eq!(code, 0);
    assert!(out.contains("warning") && out.contains("unknown-category"), "{out}");
    let (code, out, _) = run(&["--registry", &reg, "--strict", "validate", &fixture("golden.xml")]);
    assert_eq!(code, 1);
    assert!(out.lines().last().unwrap().starts_with("invalid:"), "{out}");
}

#[test]
fn validate_several_files_prefixes_lines() {
    let (code, out, _) = run(&["validate", &fixture("golden.xml"), &fixture("speech.xml")]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
    assert!(out.lines().all(|l| l.contains(".xml: valid: 0 errors")), "{out}");
}

#[test]
fn readings_and_best() {
    let (code, out, _) = run(&["readings", &fixture("golden.xml")]);
    assert_eq!(code, 0);
    assert_eq!(out, "0.8 Order\n0.3 Inform\n");
    let (code, out, err) = run(&["best", &fixture("golden.xml")]);
    assert_eq!(code, 0);
    assert!(out.contains(">Order<") && !out.contains("Inform"), "{out}");
    assert_eq!(err, "score: 0.8 (Order)\n");
}

#[test]
fn readings_cap_notes_truncation() {
    let (code, out, err) = run(&["--cap", "1", "readings", &fixture("golden.xml")]);
    assert_eq!(code, 0);
    assert_eq!(out, "0.8 Order\n");
    assert!(err.contains("showing 1 of 2"), "{err}");
}

#[test]
fn stats_counts() {
    let (code, out, _) = run(&["stats", &fixture("golden.xml")]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "nodes: 6\nevents: 2\nparticipants: 4\nrelations: 3\ngroups: 1\nalternatives: 2\nvariables: 0\nreadings: 2\n"
    );
}

#[test]
fn canon_is_byte_deterministic_and_idempotent() {
    for name in ["golden.xml", "speech.xml", "gesture.xml", "speech_gesture.xml", "prosody.xml"] {
        let (code, first, _) = run(&["canon", &fixture(name)]);
        assert_eq!(code, 0);
        let (_, second, _) = run(&["canon", &fixture(name)]);
        assert_eq!(first, second, "{name}");
        let (code, again, _) = run_with_stdin(&["canon", "-"], first.as_bytes());
        assert_eq!(code, 0);
        assert_eq!(again, first, "{name}");
    }
}

#[test]
fn prune_and_bind() {
    let (code, out, _) = run(&["prune", &fixture("golden.xml"), "--group", "a1", "--keep", "1"]);
    assert_eq!(code, 0);
    let (_, readings, _) = run_with_stdin(&["readings", "-"], out.as_bytes());
    assert_eq!(readings, "0.3 Inform\n");
    let (code, _, err) = run(&["prune", &fixture("golden.xml"), "--group", "a1", "--keep", "5"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
    let (code, _, _) = run(&["bind", &fixture("golden.xml"), "--var", "v9", "--node", "x"]);
    assert_eq!(code, 2);
}

#[test]
fn bind_resolves_a_variable() {
    let doc = r#"<semRep xmlns="urn:semrep:1" id="d">
  <event id="e1"/>
  <participant id="y"/>
  <participant id="z"/>
  <var id="v1" domain="y z"/>
  <relation source="v1" target="e1"><role>goal</role></relation>
</semRep>"#;
    let (code, out, _) = run_with_stdin(&["readings", "-"], doc.as_bytes());
    assert_eq!(code, 0);
    assert_eq!(out, "1 v1=y\n1 v1=z\n");
    let (code, out, _) = run_with_stdin(&["bind", "-", "--var", "v1", "--node", "z"], doc.as_bytes());
    assert_eq!(code, 0);
    assert!(out.contains(r#"source="z""#) && !out.contains("<var"), "{out}");
}

#[test]
fn merge_speech_and_gesture() {
    let (code, out, err) =
        run(&["merge", &fixture("speech.xml"), &fixture("gesture.xml"), "--corr", "x=pointer_agent"]);
    assert_eq!(code, 0, "{err}");
    assert!(err.lines().all(|l| l.starts_with("warning:")), "{err}");
    let (_, expected, _) = run(&["canon", &fixture("speech_gesture.xml")]);
    let (_, stats, _) = run_with_stdin(&["stats", "-"], out.as_bytes());
    let (_, expected_stats, _) = run_with_stdin(&["stats", "-"], expected.as_bytes());
    assert_eq!(stats, expected_stats);
}

#[test]
fn merge_with_correspondence_file() {
    let dir = scratch("corr_file");
    let corr = dir.join("pairs.txt");
    fs::write(&corr, "# speech gesture\nx pointer_agent\n").unwrap();
    let (code, via_file, _) =
        run(&["merge", &fixture("speech.xml"), &fixture("gesture.xml"), "--corr-file", corr.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (_, via_flag, _) =
        run(&["merge", &fixture("speech.xml"), &fixture("gesture.xml"), "--corr", "x=pointer_agent"]);
    assert_eq!(via_file, via_flag);
}

#[test]
fn merge_conflict_exits_one() {
    let (code, out, _) = run(&["merge", &fixture("speech.xml"), &fixture("contradictory.xml"), "--corr", "e0=e0"]);
    assert_eq!(code, 1);
    assert!(out.contains("conflict on e0 dialAct") && out.contains("empty-intersection"), "{out}");
}

#[test]
fn merge_prosody_keeps_order() {
    let (code, out, _) = run(&["merge", &fixture("speech.xml"), &fixture("prosody.xml"), "--corr", "e0=e0"]);
    assert_eq!(code, 0);
    let (_, readings, _) = run_with_stdin(&["readings", "-"], out.as_bytes());
    // 0.8 x 0.5; the other alternatives have no counterpart.
    assert_eq!(readings, "0.4 Order\n");
}

#[test]
fn map_renames_categories() {
    let dir = scratch("map");
    let m = dir.join("m.txt");
    fs::write(&m, "dialAct act Order=Directive\n").unwrap();
    let (code, out, _) = run(&["map", &fixture("golden.xml"), "--mapping", m.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("<act>Directive</act>") && !out.contains("dialAct"), "{out}");
}

#[test]
fn regdiff_lists_differences() {
    let (code, out, _) = run(&["regdiff", &registry("default.reg"), &registry("default.reg")]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let (code, out, _) = run(&["regdiff", &registry("default.reg"), &registry("quant.reg")]);
    assert_eq!(code, 0);
    assert!(out.contains("dialAct") && out.contains("cardinality"), "{out}");
}

#[test]
fn custom_profile() {
    let dir = scratch("profile");
    let p = dir.join("p.toml");
    fs::write(&p, "[elements]\nevent = \"evt\"\n").unwrap();
    // The profile governs input too, so the default vocabulary no longer parses.
    let (code, _, _) = run(&["--profile", p.to_str().unwrap(), "canon", &fixture("golden.xml")]);
    assert_eq!(code, 2);
    let (_, default, _) = run(&["canon", &fixture("golden.xml")]);
    let custom = default.replace("<event ", "<evt ").replace("</event>", "</evt>");
    let (code, out, err) = run_with_stdin(&["--profile", p.to_str().unwrap(), "canon", "-"], custom.as_bytes());
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, custom);
    let (_, readings, _) = run_with_stdin(&["--profile", p.to_str().unwrap(), "readings", "-"], custom.as_bytes());
    assert_eq!(readings, "0.8 Order\n0.3 Inform\n");
    fs::write(&p, "[elements]\nbogus = \"x\"\n").unwrap();
    let (code, _, _) = run(&["--profile", p.to_str().unwrap(), "canon", &fixture("golden.xml")]);
    assert_eq!(code, 2);
}

#[test]
fn exit_code_matrix() {
    let cases: &[(&[&str], i32)] = &[
        (&["validate", &fixture("golden.xml")], 0),
        (&["validate", &fixture("original.xml")], 2),
        (&["validate", "/nonexistent/doc.xml"], 2),
        (&["--registry", "/nonexistent/r.reg", "validate", &fixture("golden.xml")], 2),
        (&["frobnicate"], 2),
        (&["readings"], 2),
        (&["--cap", "many", "readings", &fixture("golden.xml")], 2),
        (&["merge", &fixture("speech.xml"), &fixture("gesture.xml"), "--corr", "nonsense"], 2),
        (&["merge", &fixture("speech.xml"), &fixture("gesture.xml"), "--corr", "x=nobody"], 2),
        (&["merge", &fixture("speech.xml"), &fixture("contradictory.xml"), "--corr", "e0=e0"], 1),
        (&["--help"], 0),
        (&["--version"], 0),
    ];
    for (args, expected) in cases {
        assert_eq!(run(args).0, *expected, "{args:?}");
    }
}

#[test]
fn binary_exit_codes_and_determinism() {
    let bin = env!("CARGO_BIN_EXE_semrep");
    let golden = fixture("golden.xml");
    let a = Command::new(bin).args(["canon", &golden]).output().unwrap();
    let b = Command::new(bin).args(["canon", &golden]).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(bin).args(["validate", &fixture("original.xml")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let conflict = Command::new(bin)
        .args(["merge", &fixture("speech.xml"), &fixture("contradictory.xml"), "--corr", "e0=e0"])
        .output()
        .unwrap();
    assert_eq!(conflict.status.code(), Some(1));
}

#[test]
fn assimilate_session() {
    let dir = scratch("session");
    let s = dir.to_str().unwrap();
    let (code, _, _) = run(&["assimilate", "--session", s, &fixture("speech.xml")]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["assimilate", "--session", s, &fixture("gesture.xml"), "--corr", "x=pointer_agent"]);
    assert_eq!(code, 0);
    let after_two = fs::read_to_string(dir.join("current.xml")).unwrap();
    let (_, stats, _) = run(&["stats", dir.join("current.xml").to_str().unwrap()]);
    let (_, expected, _) = run(&["stats", &fixture("speech_gesture.xml")]);
    assert_eq!(stats, expected);

    let (code, out, _) = run(&["assimilate", "--session", s, &fixture("contradictory.xml"), "--corr", "e0=e0"]);
    assert_eq!(code, 1);
    assert!(out.contains("empty-intersection"));
    // A failed assimilation leaves the session document untouched.
    assert_eq!(fs::read_to_string(dir.join("current.xml")).unwrap(), after_two);

    let log = fs::read_to_string(dir.join("history.log")).unwrap();
    let lines: Vec<Vec<&str>> = log.lines().map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], ["speech1", "1200", "merged"]);
    assert_eq!(lines[1], ["gesture1", "1350", "merged"]);
    assert_eq!(lines[2][2], "conflict");
}

#[test]
fn assimilate_rejects_a_corrupt_log() {
    let dir = scratch("bad_log");
    fs::write(dir.join("history.log"), "speech1 notanumber merged\n").unwrap();
    let (code, _, err) = run(&["assimilate", "--session", dir.to_str().unwrap(), &fixture("speech.xml")]);
    assert_eq!(code, 2);
    assert!(err.contains("history.log:1"), "{err}");
}
