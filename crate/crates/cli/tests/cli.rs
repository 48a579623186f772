use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn ridgekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridgekit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ridgekit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_regular_point_of_disc() {
    let out = ridgekit(&["classify", "--builtin", "disc", "--point", "0.5,0"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["classification"], "RegularPoint");
    assert!((v["d"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((v["rho_star"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn rho_at_ellipse_vertex() {
    let out = ridgekit(&["rho", "--builtin", "ellipse", "--param", "a=2,b=1", "--at", "vertex"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["rho"]["value"].as_f64().unwrap() - 0.5).abs() <= 1e-3);
    assert_eq!(v["rho_from_curvature"]["value"].as_f64().unwrap(), 0.5);
}

#[test]
fn invalid_input_exits_2_with_json_error() {
    let out = ridgekit(&["classify", "--builtin", "disc", "--point", "2,0"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "QueryOutsideClipBox");

    let out = ridgekit(&["skeleton", "--builtin", "disc", "--grid-res", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "GridTooCoarse");

    let out = ridgekit(&["rho", "--builtin", "nowhere"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_overrides_apply() {
    let out = ridgekit(&["classify", "--builtin", "disc", "--point", "0.5,0", "--tol", "resolution=0.7"]);
    let v = json(&out);
    assert_eq!(v["resolution"].as_f64().unwrap(), 0.7);
    assert_eq!(v["classification"], "BoundaryCase");
    let out = ridgekit(&["classify", "--builtin", "disc", "--point", "0.5,0", "--tol", "nonsense=1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical() {
    let args = ["distfield", "--builtin", "ellipse", "--grid-res", "0.0625", "--format", "csv"];
    let a = ridgekit(&args);
    let b = ridgekit(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let args = ["rho", "--builtin", "disc_halfplane", "--format", "json"];
    assert_eq!(ridgekit(&args).stdout, ridgekit(&args).stdout);
}

#[test]
fn domain_json_round_trip() {
    let spec = ridgekit::DomainSpec::ellipse(2.0, 1.0);
    let path = scratch("ellipse.json");
    std::fs::write(&path, serde_json::to_string(&spec).unwrap()).unwrap();
    let from_file = ridgekit(&[
        "distfield",
        "--domain",
        path.to_str().unwrap(),
        "--point",
        "0.3,0.2",
        "--point",
        "1,0",
    ]);
    let builtin = ridgekit(&["distfield", "--builtin", "ellipse", "--point", "0.3,0.2", "--point", "1,0"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, builtin.stdout);
    let text = String::from_utf8(builtin.stdout).unwrap();
    assert!(text.starts_with("x,y,d,n_clusters,proj_x_1,proj_y_1,proj_x_2,proj_y_2\n"), "{text}");
}

#[test]
fn exports_have_expected_shape() {
    let pgm = scratch("disc.pgm");
    let out = ridgekit(&["skeleton", "--builtin", "disc", "--out", pgm.to_str().unwrap()]);
    assert!(out.status.success());
    let bytes = std::fs::read(&pgm).unwrap();
    let header = b"P5\n145 145\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 145 * 145);

    let out = ridgekit(&["eikonal", "--builtin", "disc", "--grid-res", "0.03125", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,y,u,state\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",accepted") || l.ends_with(",exterior")));

    let out = ridgekit(&["rho", "--builtin", "disc_halfplane"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("arc_param,x,y,rho,rho_uncertainty,rho_star\n"));
    assert!(text.contains(",inf,"));

    let svg = scratch("e.svg");
    let out = ridgekit(&["render", "--builtin", "ellipse", "--grid-res", "0.0625", "--out", svg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert!(text.contains("id=\"skeleton\"") && text.contains("id=\"boundary\""));
}

#[test]
fn verify_reports_the_corner_regression() {
    let out = ridgekit(&["verify", "--builtin", "disc_halfplane"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.contains("class=BoundaryCase"));
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}
