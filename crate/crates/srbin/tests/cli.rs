use std::path::Path;
use std::process::{Command, Output};

use srbin::load_image;
use srbin_core::Raster;

fn srbin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srbin"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn save(img: &Raster, path: &Path) {
    srbin::save_image(img, path).unwrap();
}

fn ramp(w: u32, h: u32) -> Raster {
    Raster::from_fn_gray(w, h, |x, y| ((x * 13 + y * 7) % 256) as u8).unwrap()
}

#[test]
fn downscale_and_upscale_dimensions() {
    let d = tempfile::tempdir().unwrap();
    let (src, half, big) = (
        d.path().join("a.png"),
        d.path().join("h.pgm"),
        d.path().join("b.png"),
    );
    save(&ramp(9, 7), &src);
    assert!(srbin(&["downscale", "--in", s(&src), "--out", s(&half)])
        .status
        .success());
    assert_eq!(load_image(&half).unwrap().dims(), (4, 3));
    let out = srbin(&[
        "upscale",
        "--in",
        s(&half),
        "--out",
        s(&big),
        "--scale",
        "3",
        "--kernel",
        "lanczos3",
    ]);
    assert!(out.status.success());
    assert_eq!(load_image(&big).unwrap().dims(), (12, 9));
}

#[test]
fn upscale_rejects_box_as_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let src = d.path().join("a.png");
    save(&ramp(4, 4), &src);
    let out = srbin(&[
        "upscale",
        "--in",
        s(&src),
        "--out",
        s(&d.path().join("b.png")),
        "--kernel",
        "box",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn binarize_writes_black_text() {
    let d = tempfile::tempdir().unwrap();
    let (src, out) = (d.path().join("page.png"), d.path().join("mask.png"));
    save(
        &Raster::from_fn_gray(8, 8, |x, _| if x < 3 { 20 } else { 230 }).unwrap(),
        &src,
    );
    assert!(srbin(&[
        "binarize",
        "--in",
        s(&src),
        "--out",
        s(&out),
        "--method",
        "otsu"
    ])
    .status
    .success());
    let mask = load_image(&out).unwrap();
    assert_eq!(mask.get(0, 0, 0), 0);
    assert_eq!(mask.get(7, 7, 0), 255);

    let even = srbin(&[
        "binarize",
        "--in",
        s(&src),
        "--out",
        s(&out),
        "--method",
        "sauvola",
        "--window",
        "4",
    ]);
    assert_eq!(even.status.code(), Some(1));
}

#[test]
fn binarize_external_reads_stem() {
    let d = tempfile::tempdir().unwrap();
    let ext = d.path().join("ext");
    std::fs::create_dir(&ext).unwrap();
    let src = d.path().join("page.png");
    save(&ramp(6, 5), &src);
    save(&Raster::filled(6, 5, 1, 0).unwrap(), &ext.join("page.png"));
    let out = d.path().join("m.png");
    let run = srbin(&[
        "binarize",
        "--in",
        s(&src),
        "--out",
        s(&out),
        "--method",
        "external",
        "--dir",
        s(&ext),
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(load_image(&out).unwrap().samples().iter().all(|&v| v == 0));

    save(&Raster::filled(5, 5, 1, 0).unwrap(), &ext.join("page.png"));
    let bad = srbin(&[
        "binarize",
        "--in",
        s(&src),
        "--out",
        s(&out),
        "--method",
        "external",
        "--dir",
        s(&ext),
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains("6x5") && err.contains("5x5"), "{err}");
}

#[test]
fn eval_prints_json_metrics() {
    let d = tempfile::tempdir().unwrap();
    let (a, b) = (d.path().join("a.png"), d.path().join("b.png"));
    save(&Raster::filled(16, 16, 1, 0).unwrap(), &a);
    let mut px = vec![0u8; 256];
    px[37] = 255;
    save(&Raster::new(16, 16, 1, px).unwrap(), &b);
    let out = srbin(&["eval", "--pred", s(&a), "--gt", s(&b)]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let db = v["psnr_db"].as_f64().unwrap();
    assert!((db - 10.0 * 256f64.log10()).abs() < 1e-9);
    assert_eq!(v["binary"]["fp"].as_u64(), Some(1));

    let same = srbin(&["eval", "--pred", s(&a), "--gt", s(&a), "--format", "csv"]);
    let text = String::from_utf8(same.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with(",0,1,"), "{text}");
}

#[test]
fn scan_reports_unpaired_files() {
    let d = tempfile::tempdir().unwrap();
    let img = ramp(4, 4);
    for name in ["1.png", "1_GT.png", "2.png"] {
        save(&img, &d.path().join(name));
    }
    let manifest = d.path().join("m.json");
    let out = srbin(&["scan", "--dir", s(d.path()), "--out", s(&manifest)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("2.png unpaired"));
    assert_eq!(srbin::Manifest::load(&manifest).unwrap().entries.len(), 1);

    let lonely = tempfile::tempdir().unwrap();
    save(&img, &lonely.path().join("1.png"));
    let empty = srbin(&["scan", "--dir", s(lonely.path()), "--out", s(&manifest)]);
    assert_eq!(empty.status.code(), Some(2));
}

#[test]
fn synth_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = srbin(&[
            "synth",
            "--seed",
            "9",
            "--w",
            "64",
            "--h",
            "80",
            "--count",
            "2",
            "--noise",
            "10",
            "--out-dir",
            s(d.path()),
        ]);
        assert!(out.status.success());
    }
    for name in [
        "doc_000.png",
        "doc_000_GT.png",
        "doc_001.png",
        "doc_001_GT.png",
    ] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    assert_ne!(
        std::fs::read(a.path().join("doc_000.png")).unwrap(),
        std::fs::read(a.path().join("doc_001.png")).unwrap()
    );
}

#[test]
fn experiment_report_and_montage() {
    let d = tempfile::tempdir().unwrap();
    let docs = d.path().join("docs");
    assert!(srbin(&[
        "synth",
        "--seed",
        "3",
        "--w",
        "65",
        "--h",
        "70",
        "--count",
        "2",
        "--noise",
        "8",
        "--out-dir",
        s(&docs),
    ])
    .status
    .success());
    let manifest = d.path().join("m.json");
    assert!(srbin(&["scan", "--dir", s(&docs), "--out", s(&manifest)])
        .status
        .success());
    let report = d.path().join("r.json");
    let run = srbin(&[
        "experiment",
        "--manifest",
        s(&manifest),
        "--sr",
        "bilinear",
        "--seg",
        "niblack",
        "--k",
        "-0.3",
        "--branches",
        "without",
        "--out",
        s(&report),
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );

    let md = srbin(&["report", "--in", s(&report), "--format", "markdown"]);
    let text = String::from_utf8(md.stdout).unwrap();
    assert!(text.contains("| w/o SR |") && !text.contains("Δ"), "{text}");
    assert!(text.contains("k=-0.3"), "{text}");

    let csv = srbin(&["report", "--in", s(&report), "--format", "csv"]);
    let mut rdr = csv::Reader::from_reader(&csv.stdout[..]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "without_sr");
    assert_eq!(&rows[0][4], "2");

    let sr_with_bad_scale = srbin(&[
        "experiment",
        "--manifest",
        s(&manifest),
        "--sr",
        "identity",
        "--seg",
        "otsu",
        "--out",
        s(&report),
    ]);
    assert_eq!(sr_with_bad_scale.status.code(), Some(1));

    let gt = docs.join("doc_000_GT.png");
    let panel = d.path().join("panel.png");
    let out = srbin(&[
        "montage",
        "--input",
        s(&docs.join("doc_000.png")),
        "--gt",
        s(&gt),
        "--with-sr",
        s(&gt),
        "--without-sr",
        s(&gt),
        "--out",
        s(&panel),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(load_image(&panel).unwrap().dims(), (4 * 65 + 3 * 4, 70));
}
