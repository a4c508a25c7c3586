mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;
use lesionmask::pipeline::export_mask;
use lesionmask::{BinaryMask, RgbImage};

fn lesionmask(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lesionmask"))
        .args(args)
        .env_remove("LESIONMASK_JOBS")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Fixture images, metadata and a manifest built by the `manifest` subcommand.
fn manifest_fixture(root: &Path, items: &[(&str, &str)]) -> std::path::PathBuf {
    let (meta, images) = write_fixture(root, items);
    let manifest = root.join("manifest.csv");
    let o = lesionmask(&["manifest", "--metadata", s(&meta), "--images", s(&images), "--out", s(&manifest)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    manifest
}

#[test]
fn help_lists_flags_for_every_subcommand() {
    let expected: [(&str, &[&str]); 5] = [
        ("segment", &["--input", "--config", "--out-mask", "--out-applied", "--mode"]),
        ("sweep", &["--manifest", "--pairs", "--mode", "--out", "--config"]),
        ("evaluate", &["--pred", "--truth", "--report", "--reference"]),
        ("relabel", &["--metadata", "--mapping", "--out"]),
        ("manifest", &["--metadata", "--images", "--truth", "--mapping", "--out"]),
    ];
    for (cmd, flags) in expected {
        let o = lesionmask(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        let text = stdout(&o);
        for flag in flags {
            assert!(text.contains(flag), "{cmd} --help lacks {flag}");
        }
        assert!(text.contains("--jobs"), "{cmd} --help lacks --jobs");
    }
    assert_eq!(lesionmask(&["--help"]).status.code(), Some(0));
    assert_eq!(lesionmask(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lesionmask(&[]).status.code(), Some(2));
    assert_eq!(lesionmask(&["frobnicate"]).status.code(), Some(2));
    let o = lesionmask(&["sweep", "--manifest", "m.csv", "--pairs", "5", "--mode", "ablate", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains('5'));
    let o = lesionmask(&["sweep", "--manifest", "m.csv", "--pairs", "10_10", "--mode", "blur", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));
    let o = lesionmask(&["sweep", "--manifest", "m.csv", "--pairs", "10_10,10_10", "--mode", "ablate", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn segment_reports_threshold_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (img, truth) = disk_image(64, 10.0, 40.0, 200.0, 10.0, 4);
    let input = dir.path().join("lesion.png");
    img.save_png(&input).unwrap();
    let mask = dir.path().join("mask.png");
    let applied = dir.path().join("applied.png");
    let o = lesionmask(&[
        "segment", "--input", s(&input), "--out-mask", s(&mask), "--out-applied", s(&applied), "--mode", "isolate",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    assert!(line.contains("threshold=otsu:") && line.contains("flags=none"), "{line}");
    let got = lesionmask::pipeline::import_mask(&mask, 127).unwrap();
    assert!(dice_oracle(&got, &truth) >= 0.95);
    assert_eq!(RgbImage::open(&applied).unwrap().dimensions(), (64, 64));

    let flat = dir.path().join("flat.png");
    RgbImage::filled(8, 8, [120, 120, 120]).unwrap().save_png(&flat).unwrap();
    let o = lesionmask(&["segment", "--input", s(&flat), "--out-mask", s(&mask)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("degenerate_histogram"));

    let o = lesionmask(&["segment", "--input", s(&dir.path().join("absent.png")), "--out-mask", s(&mask)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("absent.png"));
}

#[test]
fn segment_honours_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let (img, _) = disk_image(32, 6.0, 40.0, 200.0, 0.0, 0);
    let input = dir.path().join("in.png");
    img.save_png(&input).unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "smoothing = \"none\"\nthreshold = { global = 100 }\nclean_side = 0\n").unwrap();
    let o = lesionmask(&["segment", "--input", s(&input), "--config", s(&cfg), "--out-mask", s(&dir.path().join("m.png"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("threshold=global:100"));

    std::fs::write(&cfg, "clean_sid = 3\n").unwrap();
    let o = lesionmask(&["segment", "--input", s(&input), "--config", s(&cfg), "--out-mask", s(&dir.path().join("m.png"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_emits_pair_directories_and_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = manifest_fixture(dir.path(), &[("a", "mel"), ("b", "nv"), ("c", "bkl")]);
    let run = |out: &Path, jobs: &str| {
        let o = lesionmask(&[
            "--jobs", jobs, "sweep", "--manifest", s(&manifest), "--pairs", "0_0,10_5", "--mode", "maskonly", "--out", s(out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        o
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = run(&a, "1");
    run(&b, "4");
    assert!(stdout(&o).contains("0_0: written=3 flagged=0"));
    assert!(stdout(&o).contains("images=3 benign=2 malignant=1 failed=0"));
    assert_eq!(snapshot(&a), snapshot(&b));
    assert!(a.join("0_0/masks/a.png").is_file());
    assert!(a.join("0_0/maskonly/a.png").is_file());
}

#[test]
fn jobs_env_fallback_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = manifest_fixture(dir.path(), &[("a", "mel")]);
    let out = dir.path().join("o");
    let o = Command::new(env!("CARGO_BIN_EXE_lesionmask"))
        .args(["sweep", "--manifest", s(&manifest), "--pairs", "5_5", "--mode", "ablate", "--out", s(&out)])
        .env("LESIONMASK_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = lesionmask(&["--jobs", "many", "sweep", "--manifest", s(&manifest), "--pairs", "5_5", "--mode", "ablate", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn evaluate_self_and_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("pred");
    let truth = dir.path().join("truth");
    std::fs::create_dir_all(&pred).unwrap();
    std::fs::create_dir_all(&truth).unwrap();
    let t = BinaryMask::from_fn(10, 10, |x, y| x < 3 && y < 3 || (x, y) == (9, 9));
    export_mask(&t, pred.join("x.png")).unwrap();
    export_mask(&t, truth.join("x_segmentation.png")).unwrap();
    let report = dir.path().join("r.csv");
    let o = lesionmask(&["evaluate", "--pred", s(&pred), "--truth", s(&truth), "--report", s(&report)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("macro: acc=1.0000 se=1.0000 sp=1.0000 precision=1.0000 f1=1.0000 dice=1.0000"));

    // 8 tp, 2 fp, 2 fn, 88 tn
    let p = BinaryMask::from_fn(10, 10, |x, y| (x < 3 && y < 3 && (x, y) != (0, 0)) || (x, y) == (5, 5) || (x, y) == (6, 6));
    export_mask(&p, pred.join("x.png")).unwrap();
    let reference = dir.path().join("ref.csv");
    std::fs::write(&reference, "method,acc,se,sp,f1,dice\nPix2PixGAN,0.94,0.91,0.93,0.89,0.89\n").unwrap();
    let json = dir.path().join("r.json");
    let o = lesionmask(&["evaluate", "--pred", s(&pred), "--truth", s(&truth), "--report", s(&json), "--reference", s(&reference)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("micro: acc=0.9600 se=0.8000 sp=0.9778 precision=0.8000 f1=0.8000 dice=0.8000"), "{text}");
    assert!(text.contains("| Pix2PixGAN | 0.94 | 0.91 | 0.93 | 0.89 | 0.89 |"), "{text}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["items"][0]["dice"], 0.8);

    let empty = dir.path().join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let o = lesionmask(&["evaluate", "--pred", s(&pred), "--truth", s(&empty), "--report", s(&report)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn evaluate_flags_undefined_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let empty = BinaryMask::empty(4, 4);
    export_mask(&empty, dir.path().join("p.png")).unwrap();
    export_mask(&empty, dir.path().join("t.png")).unwrap();
    let pairs = dir.path().join("pairs.csv");
    std::fs::write(&pairs, "id,pred,truth\nblank,p.png,t.png\n").unwrap();
    let report = dir.path().join("r.csv");
    let o = lesionmask(&["evaluate", "--pred", s(&pairs), "--truth", s(dir.path()), "--report", s(&report)]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&report).unwrap();
    assert!(csv.contains("blank,0,0,16,0,1.0000,NA,1.0000,NA,NA,NA,undefined_se;undefined_precision;undefined_f1;undefined_dice"), "{csv}");
}

#[test]
fn relabel_maps_and_rejects_unknown_codes() {
    let dir = tempfile::tempdir().unwrap();
    let meta = dir.path().join("meta.csv");
    std::fs::write(&meta, "lesion_id,image_id,dx\nL1,I1,mel\nL2,I2,nv\nL3,I3,bcc\n").unwrap();
    let out = dir.path().join("labels.csv");
    let o = lesionmask(&["relabel", "--metadata", s(&meta), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("rows=3 benign=1 malignant=2 malformed=0"));
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        "image_id,dx,label\nI1,mel,malignant\nI2,nv,benign\nI3,bcc,malignant\n"
    );

    std::fs::write(&meta, "lesion_id,image_id,dx\nL1,I1,mel\nL2,I2,zzz\n").unwrap();
    let o = lesionmask(&["relabel", "--metadata", s(&meta), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("zzz"));

    let mapping = dir.path().join("map.csv");
    std::fs::write(&mapping, "dx,label\nmel,malignant\n").unwrap();
    let o = lesionmask(&["relabel", "--metadata", s(&meta), "--mapping", s(&mapping), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3));
}
