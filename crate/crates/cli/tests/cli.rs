use std::fs;
use std::path::Path;
use std::process::{Command as Process, Output};

use modgap::emission::{dominant_maxima, Spectrum};
use modgap_cli::config::{apply_pairs, parse_config_text, Method};
use modgap_cli::{build_config, Command, Overrides, RunConfig, Table};
use proptest::prelude::*;
use serde_json::Value;

fn modgap(args: &[&str], dir: &Path) -> Output {
    Process::new(env!("CARGO_BIN_EXE_modgap")).args(args).current_dir(dir).output().expect("binary runs")
}

fn read_csv(path: &Path) -> (String, Vec<[f64; 2]>, Vec<String>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let mut rows = Vec::new();
    let mut comments = Vec::new();
    for line in lines {
        if line.starts_with('#') {
            comments.push(line.to_string());
            continue;
        }
        let (a, b) = line.split_once(',').unwrap();
        rows.push([a.parse().unwrap(), b.parse().unwrap()]);
    }
    (header, rows, comments)
}

fn as_spectrum(rows: &[[f64; 2]]) -> Spectrum {
    Spectrum {
        t: 1200.0,
        omega0: 1.0,
        omega_g: 0.5,
        omegas: rows.iter().map(|r| r[0]).collect(),
        values: rows.iter().map(|r| r[1]).collect(),
    }
}

#[test]
fn default_spectrum_has_three_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let out = modgap(&["spectrum", "--out", "fig3.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows, _) = read_csv(&dir.path().join("fig3.csv"));
    assert_eq!(header, "omega,value");
    assert_eq!(rows.len(), 4001);
    let peaks = dominant_maxima(&as_spectrum(&rows), 0.05);
    let pos: Vec<f64> = peaks.iter().map(|p| p.omega).collect();
    assert_eq!(pos.len(), 3, "{pos:?}");
    for (p, x) in pos.iter().zip([0.9, 1.0, 1.1]) {
        assert!((p - x).abs() <= 0.005, "{pos:?}");
    }
    assert!(peaks[0].height > peaks[2].height);
}

#[test]
fn static_spectrum_has_one_peak() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        modgap(&["spectrum", "--xi-bar", "0", "--omega-g", "0.5", "--t", "1200", "--out", "fig2.csv"], dir.path());
    assert!(out.status.success());
    let (_, rows, _) = read_csv(&dir.path().join("fig2.csv"));
    let peaks = dominant_maxima(&as_spectrum(&rows), 0.05);
    assert_eq!(peaks.len(), 1);
    assert!((peaks[0].omega - 1.0).abs() <= 0.005);
}

#[test]
fn decay_tail_follows_static_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        modgap(&["decay", "--xi-bar", "0", "--t-max", "2000", "--t-points", "9", "--out", "decay.csv"], dir.path());
    assert!(out.status.success());
    let (header, rows, _) = read_csv(&dir.path().join("decay.csv"));
    assert_eq!(header, "t,probability");
    assert_eq!(rows.len(), 9);
    let n = rows.len();
    let slope = (rows[n - 1][1] - rows[n - 2][1]) / (rows[n - 1][0] - rows[n - 2][0]);
    assert!((slope / 2.82843 - 1.0).abs() < 0.02, "slope {slope}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let inside = modgap(&["spectrum", "--omega-g", "1.5"], d);
    assert_eq!(inside.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&inside.stderr).contains("omega_g"));

    let empty = modgap(&["spectrum", "--points", "0"], d);
    assert_eq!(empty.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&empty.stderr).contains("points"));

    let malformed = modgap(&["spectrum", "--xi-bar", "abc"], d);
    assert_eq!(malformed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&malformed.stderr).contains("xi-bar"));

    fs::write(d.join("bad.cfg"), "omega_g = 0.5\nbogus_key = 1\n").unwrap();
    let unknown = modgap(&["spectrum", "--config", "bad.cfg"], d);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("bogus_key"));

    fs::write(d.join("typo.cfg"), "xi_bar = 0.0x1\n").unwrap();
    let typo = modgap(&["spectrum", "--config", "typo.cfg"], d);
    assert_eq!(typo.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&typo.stderr).contains("xi_bar"));

    let io = modgap(&["spectrum", "--points", "3", "--out", "missing/dir/x.csv"], d);
    assert_eq!(io.status.code(), Some(2));
    let io = modgap(&["spectrum", "--config", "no-such.cfg"], d);
    assert_eq!(io.status.code(), Some(2));

    let breakdown = modgap(&["spectrum", "--model-source", "crystal", "--n0", "1", "--points", "3"], d);
    assert_eq!(breakdown.status.code(), Some(3));

    assert_eq!(modgap(&["--help"], d).status.code(), Some(0));
    assert_eq!(modgap(&[], d).status.code(), Some(1));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("run.cfg"), "# edge\nomega_g = 0.4\nxi_bar = 0.02\npoints = 11\n").unwrap();
    let out = modgap(&["spectrum", "--config", "run.cfg", "--omega-g", "0.45", "--out", "r.json"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(v["meta"]["omega_g"], 0.45);
    assert_eq!(v["meta"]["xi_bar"], 0.02);
    assert_eq!(v["omega"].as_array().unwrap().len(), 11);
    assert_eq!(v["value"].as_array().unwrap().len(), 11);
}

#[test]
fn json_meta_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = modgap(&["spectrum", "--points", "21", "--oracle", "--t", "300", "--out", "s.json"], d);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
    let meta: RunConfig = serde_json::from_value(v["meta"].clone()).unwrap();
    let flags = Overrides {
        points: Some(21),
        oracle: true,
        t: Some(300.0),
        out: Some("s.json".into()),
        ..Overrides::default()
    };
    let expected = build_config(Command::Spectrum, &flags).unwrap();
    assert_eq!(meta, expected);
    assert_eq!(meta.method, Method::Oracle);
}

#[test]
fn outputs_are_byte_identical() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let args =
            ["sweep", "--t", "12000", "--omega-c-points", "4", "--noise", "0.01", "--seed", "9", "--out", "s.json"];
        assert!(modgap(&args, dir.path()).status.success());
        fs::read_to_string(dir.path().join("s.json")).unwrap()
    };
    assert!(run() == run(), "reruns differ");
}

#[test]
fn sweep_csv_flags_unresolved_entries() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = modgap(
        &[
            "sweep",
            "--t",
            "1200",
            "--omega-c-min",
            "0.05",
            "--omega-c-max",
            "0.3",
            "--omega-c-points",
            "6",
            "--out",
            "s.csv",
        ],
        d,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows, comments) = read_csv(&d.join("s.csv"));
    assert_eq!(header, "omega_c,ratio");
    assert_eq!(rows.len(), 6);
    // 0.05 is below 20 * 2 pi / 1200.
    assert!(rows[0][1].is_nan());
    assert!(rows[5][1] > 1.0);
    assert!(comments.iter().any(|c| c.starts_with("# fitted_omega_g = ")));

    let out = modgap(
        &[
            "sweep",
            "--t",
            "1200",
            "--omega-c-min",
            "0.05",
            "--omega-c-max",
            "0.3",
            "--omega-c-points",
            "6",
            "--out",
            "s.json",
        ],
        d,
    );
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(d.join("s.json")).unwrap()).unwrap();
    assert!(v["ratio"][0].is_null());
    assert_eq!(v["status"][0], "unresolved");
}

#[test]
fn long_time_sweep_recovers_edge() {
    let dir = tempfile::tempdir().unwrap();
    let out = modgap(&["sweep", "--out", "s.json"], dir.path());
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    let wg = v["fitted_omega_g"].as_f64().unwrap();
    assert!((wg - 0.5).abs() < 0.01, "{wg}");
    assert_eq!(v["meta"]["t"], 1.2e6);
}

#[test]
fn dispersion_and_dos_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = modgap(&["dispersion", "--modulation", "none", "--k-points", "7", "--out", "k.csv"], d);
    assert!(out.status.success());
    let (header, rows, _) = read_csv(&d.join("k.csv"));
    assert_eq!(header, "k,omega");
    assert_eq!(rows.len(), 7);
    assert!(rows.windows(2).all(|p| p[1][1] >= p[0][1]));

    let out = modgap(&["dos", "--xi-bar", "0", "--points", "50", "--out", "rho.csv"], d);
    assert!(out.status.success());
    let (header, rows, _) = read_csv(&d.join("rho.csv"));
    assert_eq!(header, "omega,value");
    let c0 = rows[0][1] * (rows[0][0] - 0.5).sqrt();
    for r in &rows {
        assert!((r[1] * (r[0] - 0.5).sqrt() / c0 - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_values_survive_the_file_format(wg in 0.0f64..0.99, xi in 0.0f64..0.05, points in 1u64..100_000) {
        let text = format!("omega_g = {wg}\nxi_bar = {xi:e}\npoints = {points}\n");
        let cfg = apply_pairs(RunConfig::defaults(Command::Spectrum), &parse_config_text(&text).unwrap()).unwrap();
        prop_assert_eq!(cfg.omega_g.to_bits(), wg.to_bits());
        prop_assert_eq!(cfg.xi_bar.to_bits(), xi.to_bits());
        prop_assert_eq!(cfg.points, points);
    }

    #[test]
    fn csv_numbers_round_trip(a in any::<f64>().prop_filter("finite", |x| x.is_finite()), b in -1e300f64..1e300) {
        let table = Table { columns: ["omega", "value"], rows: vec![[a, b]], footer: Vec::new(), extra: Default::default() };
        let csv = table.to_csv();
        let line = csv.lines().nth(1).unwrap();
        let (x, y) = line.split_once(',').unwrap();
        prop_assert_eq!(x.parse::<f64>().unwrap().to_bits(), a.to_bits());
        prop_assert_eq!(y.parse::<f64>().unwrap().to_bits(), b.to_bits());
    }
}
