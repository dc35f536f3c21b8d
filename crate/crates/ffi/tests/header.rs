use std::path::{Path, PathBuf};
use std::process::Command;

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(manifest().join("include/semiband.h")).unwrap();
    for name in [
        "SB_STATUS_OK",
        "SB_STATUS_BUDGET",
        "typedef struct SbOperator SbOperator",
        "sb_operator_from_json",
        "sb_operator_free",
        "sb_operator_dim",
        "sb_operator_is_sbp",
        "sb_operator_is_scp",
        "sb_operator_is_projection",
        "sb_operator_analyze_json",
        "sb_interval_analyze_json",
        "sb_probe_json",
        "sb_selftest",
        "sb_string_free",
        "sb_last_error_message",
        "sb_version",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// `target/<profile>` for this test binary.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = profile_dir().join("libsemiband_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is installed");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
