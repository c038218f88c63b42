use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use poisson_compact_cli::artifact::{write_json, Artifact, BivectorJson};
use poisson_compact_cli::gallery::Config;
use poisson_compact::exterior::MultivectorField;
use poisson_compact::patch::Region;
use poisson_compact_cli::seeds;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_poisson-compact"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn raw_artifact(dir: &Path, name: &str, pi: &MultivectorField, domain: Region) -> PathBuf {
    let a = Artifact {
        provenance: Config::default().provenance("fixture"),
        support: None,
        domain,
        bivector: BivectorJson::from_field(pi),
        certificate: Vec::new(),
    };
    let path = dir.join(name);
    write_json(&a, &path).unwrap();
    path
}

#[test]
fn so3_from_json_constructs_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("so3.json");
    let o = run(&["construct", "lie-algebra", "--input", fixture("so3.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let a = Artifact::read(&out).unwrap();
    assert_eq!(a.provenance.kind, "lie-algebra");
    assert_eq!(a.bivector.dim, 3);
    let o = run(&["verify", out.to_str().unwrap(), "--all", "--grid", "500"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn constant_rank_needs_dim_and_rank() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = run(&["construct", "constant-rank", "--dim", "2", "--rank", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = run(&["construct", "constant-rank", "--dim", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn schema_errors_name_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let o = run(&["construct", "lie-algebra", "--input", fixture("bad_field.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":3:") && err.contains("c[0]"), "{err}");
}

#[test]
fn non_poisson_fixture_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = raw_artifact(dir.path(), "np.json", &seeds::non_poisson_r3(), Region::Ball { radius: 1.0 });
    let report = dir.path().join("report.json");
    let o = run(&["verify", path.to_str().unwrap(), "--jacobi", "--out", report.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let text = std::fs::read_to_string(report).unwrap();
    assert!(text.contains("\"witness\""), "{text}");
}

#[test]
fn zero_bivector_passes_and_exports_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let path = raw_artifact(dir.path(), "zero.json", &MultivectorField::zero(2, 2), Region::Ball { radius: 1.0 });
    assert_eq!(code(&run(&["verify", path.to_str().unwrap()])), 0);
    let csv = dir.path().join("zero.csv");
    let o = run(&["export", path.to_str().unwrap(), "--grid", "9", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,pi_1_2"));
    assert!(lines.all(|l| l.ends_with(",0")));
}

#[test]
fn jacobi_export_peaks_at_the_far_corner() {
    let dir = tempfile::tempdir().unwrap();
    let cube = Region::Box { bounds: vec![(0.0, 1.0); 3] };
    let path = raw_artifact(dir.path(), "np.json", &seeds::non_poisson_r3(), cube);
    let out = dir.path().join("j.csv");
    let o = run(&["export", path.to_str().unwrap(), "--fields", "jacobi", "--grid", "6", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(out).unwrap();
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    let best = rows.iter().max_by(|a, b| a[3].total_cmp(&b[3])).unwrap();
    assert_eq!(&best[..3], &[1.0, 1.0, 1.0]);
}

#[test]
fn patchwork_rank_export_shows_zero_and_two() {
    let dir = tempfile::tempdir().unwrap();
    let art = dir.path().join("pw.json");
    let o = run(&["construct", "patchwork", "--input", fixture("square.json").to_str().unwrap(), "--grid", "100", "--out", art.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let csv = dir.path().join("pw.csv");
    let o = run(&["export", art.to_str().unwrap(), "--fields", "rank", "--grid", "200", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(csv).unwrap();
    let ranks: std::collections::BTreeSet<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(ranks.into_iter().collect::<Vec<_>>(), vec!["0", "2"]);
}

#[test]
fn cosymplectic_extension_certificate_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ext.json");
    let o = run(&["construct", "extension", "--input", fixture("cosymplectic.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
    assert!(!Artifact::read(&out).unwrap().certificate.is_empty());
}

#[test]
fn single_regime_extension_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ext.json");
    let o = run(&["construct", "extension", "--model", "contact-ball", "--taper-regime", "single", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn gallery_report_is_reproducible_and_finite() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("r{k}.json"));
        let arts = dir.path().join(format!("a{k}"));
        let o = run(&["gallery", "--grid", "300", "--seed", "11", "--out", out.to_str().unwrap(), "--artifacts", arts.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
        reports.push(std::fs::read(out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    for entry in std::fs::read_dir(dir.path().join("a0")).unwrap() {
        let path = entry.unwrap().path();
        let csv = dir.path().join("e.csv");
        let o = run(&["export", path.to_str().unwrap(), "--fields", "components,rank,jacobi", "--grid", "5", "--out", csv.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        let text = std::fs::read_to_string(&csv).unwrap();
        assert!(!text.contains("NaN") && !text.contains("inf"), "{}", path.display());
    }
}
