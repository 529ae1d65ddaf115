//! Golden-file checks: generated scenes and perturbed detections must
//! reproduce the committed fixtures byte for byte, keeping the generator
//! portable across platforms and releases.

use std::fs;
use std::path::Path;
use std::process::Command;

#[test]
fn synth_reproduces_committed_fixtures() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("golden-regen");
    let _ = fs::remove_dir_all(&out);
    fs::create_dir_all(&out).unwrap();

    let status = Command::new(env!("CARGO_BIN_EXE_lseval"))
        .args([
            "synth",
            "--n",
            "12",
            "--width",
            "320",
            "--height",
            "320",
            "--seed",
            "7",
            "--images",
            "2",
            "--perturb",
            "rotate=3,scale=0.8,tx=1.5,ty=-0.5,split=2,conf=0.85",
            "--quiet",
            "--out-dir",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    for (generated, fixture) in [
        ("gt.jsonl", "scenes-seed7.gt.jsonl"),
        ("pred.jsonl", "scenes-seed7.pred.jsonl"),
    ] {
        let got = fs::read(out.join(generated)).unwrap();
        let want = fs::read(fixtures.join(fixture)).unwrap();
        assert_eq!(
            got, want,
            "{generated} no longer matches the committed fixture {fixture}"
        );
    }
}
