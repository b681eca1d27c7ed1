mod common;

use std::path::PathBuf;

use serde_json::Value;

use radflux::balance::{integral_balance_residual, BalanceData};
use radflux::radiance::ScalarRadianceField;
use radflux::region::Region;
use radflux::sphere::Direction;
use radflux_cli::scene::Scene;
use radflux_cli::{run, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};

use common::*;

fn scene_path() -> String {
    golden_dir().join("radiometry.json").display().to_string()
}

fn argv(rest: &str) -> Vec<String> {
    std::iter::once("radflux".to_string())
        .chain(rest.split_whitespace().map(|s| s.replace("SCENE", &scene_path())))
        .collect()
}

fn results(stdout: &str) -> Value {
    serde_json::from_str::<Value>(stdout).expect("json report")["results"].clone()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("radflux-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn directional_power_of_the_ramp_is_one() {
    let out = run(argv("power --scene SCENE --field ramp --region cube --direction 1,0,0"));
    assert_eq!(out.code, EXIT_PASS, "{}", out.stderr);
    let p = results(&out.stdout)["directional_power"].as_f64().unwrap();
    assert!((p - 1.0).abs() <= 1e-9);
}

#[test]
fn conforming_tensor_passes_the_radiation_assumption() {
    let out = run(argv("verify radiation-assumption --scene SCENE --tensor hemi --point 0.2,0.2,0.2"));
    assert_eq!(out.code, EXIT_PASS, "{}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn undefined_names_are_input_errors_without_output() {
    for (cmd, missing) in [
        ("irradiance --scene SCENE --field nope --point 0,0,0 --normal 0,0,1", "nope"),
        ("power --scene SCENE --field ramp --region moon", "moon"),
        ("flux-vector --scene SCENE --tensor ghost --point 0,0,0", "ghost"),
        ("verify virtual-power --scene SCENE --field ramp --balance exact --region cube --direction 1,0,0 --meter dial", "dial"),
    ] {
        let out = run(argv(cmd));
        assert_eq!(out.code, EXIT_INPUT, "{cmd}");
        assert!(out.stdout.is_empty(), "{cmd}");
        assert!(out.stderr.contains(missing), "{cmd}: {}", out.stderr);
    }
}

#[test]
fn malformed_scenes_report_their_location() {
    let path = scratch("broken.json", "{\n  \"schema_version\": 1,\n  \"fields\": [\n    { \"name\": \"f\" \"kind\": 1 }\n  ]\n}\n");
    let out = run(vec![
        "radflux".to_string(),
        "power".into(),
        "--scene".into(),
        path.display().to_string(),
        "--field".into(),
        "f".into(),
        "--region".into(),
        "r".into(),
    ]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("line 4"), "{}", out.stderr);

    let path = scratch("typo.json", r#"{"schema_version": 1, "fields": [{"name": "f", "kind": "isotropic", "intensity": 1, "colour": 2}]}"#);
    let out = run(vec![
        "radflux".to_string(),
        "flux-vector".into(),
        "--scene".into(),
        path.display().to_string(),
        "--field".into(),
        "f".into(),
        "--point".into(),
        "0,0,0".into(),
    ]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("`f`") && out.stderr.contains("colour"), "{}", out.stderr);
}

#[test]
fn bad_arguments_are_input_errors() {
    for cmd in [
        "power --scene SCENE --field ramp --region cube --direction 0,0,0",
        "irradiance --scene SCENE --field lamp --point 0,0 --normal 0,0,1",
        "verify cauchy --scene SCENE --field ramp --point 0,0,0 --normal 0,0,1 --sizes 1,-1",
        "verify ray --scene SCENE --field beam --direction 0,1,0 --from 0,0,0 --to 1,1,0",
        "total-distribution --scene SCENE --tensor hemi --region cube --subset hemisphere",
        "frobnicate",
    ] {
        let out = run(argv(cmd));
        assert_eq!(out.code, EXIT_INPUT, "{cmd}");
        assert!(out.stdout.is_empty(), "{cmd}");
    }
    let missing = run(argv("power --scene /nonexistent/scene.json --field f --region r"));
    assert_eq!(missing.code, EXIT_INPUT);
}

#[test]
fn help_succeeds() {
    let out = run(argv("--help"));
    assert_eq!(out.code, EXIT_PASS);
    assert!(out.stdout.contains("verify"));
}

#[test]
fn verdict_matches_the_library_predicate() {
    let field = ScalarRadianceField::linear(0.0, nalgebra::Vector3::x()).unwrap();
    let lib = integral_balance_residual(&field, &BalanceData::zero(), &Region::unit_cube(), &Direction::x_axis())
        .unwrap()
        .residual;
    for (tol, code) in [(lib * 0.5, EXIT_FAIL), (lib * 2.0, EXIT_PASS)] {
        let out = run(argv(&format!(
            "verify balance --scene SCENE --field ramp --balance none --region cube --direction 1,0,0 --tolerance {tol:e}"
        )));
        assert_eq!(out.code, code, "tolerance {tol}");
        assert_eq!(results(&out.stdout)["integral_residual"].as_f64().unwrap(), lib);
    }
}

#[test]
fn csv_output_is_flat() {
    let out = run(argv("--csv power --scene SCENE --field ramp --region cube --direction 1,0,0"));
    assert_eq!(out.code, EXIT_PASS);
    assert!(out.stdout.starts_with("key,value\n"));
    assert!(out.stdout.contains("directional_power,"));
}

#[test]
fn scene_round_trips() {
    let text = std::fs::read_to_string(golden_dir().join("radiometry.json")).unwrap();
    let scene = Scene::from_json(&text).unwrap();
    let again = Scene::from_json(&scene.to_json()).unwrap();
    assert_eq!(scene, again);
}

#[test]
fn digest_covers_mesh_files() {
    let mesh = std::fs::read_to_string(golden_dir().join("octahedron.tri")).unwrap();
    let scene = r#"{"schema_version": 1, "quadrature_level": 1,
        "regions": [{"name": "m", "kind": "mesh", "path": "shape.tri"}],
        "fields": [{"name": "f", "kind": "isotropic", "intensity": 1}]}"#;
    let path = scratch("mesh_scene.json", scene);
    scratch("shape.tri", &mesh);
    let cmd = vec![
        "radflux".to_string(),
        "power".into(),
        "--scene".into(),
        path.display().to_string(),
        "--field".into(),
        "f".into(),
        "--region".into(),
        "m".into(),
        "--direction".into(),
        "1,0,0".into(),
    ];
    let digest = |s: &str| serde_json::from_str::<Value>(s).unwrap()["inputs_sha256"].clone();
    let first = run(cmd.clone());
    assert_eq!(first.code, EXIT_PASS, "{}", first.stderr);
    // Same geometry, different bytes.
    scratch("shape.tri", &format!("# moved\n{mesh}"));
    let second = run(cmd);
    assert_eq!(second.code, EXIT_PASS);
    assert_ne!(digest(&first.stdout), digest(&second.stdout));
    assert_eq!(results(&first.stdout), results(&second.stdout));
}
