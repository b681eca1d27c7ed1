//! Command-line front end: loads a scene, runs one computation or
//! verification and renders a report.
//!
//! Exit codes: 0 success or pass, 1 verification failure, 2 input error.
//! On an input error nothing is written to stdout.

pub mod args;
pub mod report;
pub mod scene;

use std::path::Path;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::Parser;
use nalgebra::Vector3;
use serde_json::{json, Map, Value};

use radflux::balance::{
    boundedness_constant, differential_balance_residual, integral_balance_residual,
    ray_conservation_residual, tetrahedron_sweep, virtual_power_residual, CauchyMap, EvaluationMode,
};
use radflux::measure::measure_of;
use radflux::radiance::{directional_power, energy_flux_vector, irradiance, total_power, total_power_by_direction};
use radflux::region::Point;
use radflux::sphere::{SphereSubset, SphericalQuadrature};
use radflux::tensor::{
    energy_flux_vector_measure, total_distribution, total_power_from_distribution, verify_radiation_assumption,
};

use args::{Cli, Command, ModeArg, Verify};
use report::Report;
use scene::Model;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "RADFLUX_THREADS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Execution {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        Execution {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

/// Sizes the global thread pool from [`THREADS_ENV`]. Only the first call in
/// a process has an effect.
pub fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))?;
    // Fails only when a pool already exists, which is fine.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one command line; `argv[0]` is the program name.
pub fn run<I, S>(argv: I) -> Execution
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Execution {
                    code: EXIT_PASS,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Execution {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    if let Err(e) = configure_threads() {
        return Execution::input_error(e);
    }
    let command: Vec<String> = argv.iter().skip(1).cloned().collect();
    match execute(&cli.command) {
        Ok((digest, results, pass)) => {
            let report = Report {
                command,
                inputs_sha256: digest,
                results,
                pass,
            };
            let stdout = if cli.csv { report.to_csv() } else { report.to_json() };
            Execution {
                code: if pass == Some(false) { EXIT_FAIL } else { EXIT_PASS },
                stdout,
                stderr: String::new(),
            }
        }
        Err(msg) => Execution::input_error(msg),
    }
}

type Outcome = Result<(String, Map<String, Value>, Option<bool>), String>;

fn load(path: &Path) -> Result<Model, String> {
    scene::load(path).map(|(_, m)| m).map_err(|e| e.0)
}

fn to_point(v: &Vector3<f64>) -> Point {
    Point::from(*v)
}

fn results(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn lib<T>(r: radflux::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn scene_err<T>(r: Result<T, scene::SceneError>) -> Result<T, String> {
    r.map_err(|e| e.0)
}

fn execute(command: &Command) -> Outcome {
    match command {
        Command::Irradiance { scene, field, point, normal, subset } => {
            let model = load(&scene.scene)?;
            let f = scene_err(model.field(field))?;
            let d = subset.resolve(Some(normal))?;
            let quad = match subset.axis(Some(normal)) {
                Some(axis) => lib(SphericalQuadrature::with_pole(model.quad.level(), axis))?,
                None => (*model.quad).clone(),
            };
            let x = to_point(point);
            let e = lib(irradiance(f, &x, normal, &quad, &d))?;
            Ok((
                model.digest,
                results(vec![
                    ("irradiance", json!(e)),
                    ("point", report::vec3(point)),
                    ("normal", report::direction(normal)),
                    ("quadrature_nodes", json!(quad.len())),
                ]),
                None,
            ))
        }
        Command::Power { scene, field, region, direction } => {
            let model = load(&scene.scene)?;
            let f = scene_err(model.field(field))?;
            let r = scene_err(model.region(region))?;
            let res = match direction {
                Some(u) => results(vec![
                    ("directional_power", json!(lib(directional_power(f, r, u))?)),
                    ("direction", report::direction(u)),
                ]),
                None => {
                    let p = lib(total_power(f, r, &model.quad))?;
                    let swapped = lib(total_power_by_direction(f, r, &model.quad))?;
                    results(vec![
                        ("total_power", json!(p)),
                        ("total_power_by_direction", json!(swapped)),
                    ])
                }
            };
            Ok((model.digest, res, None))
        }
        Command::FluxVector { scene, field, tensor, point } => {
            let model = load(&scene.scene)?;
            let x = to_point(point);
            let q = match (field, tensor) {
                (Some(f), _) => lib(energy_flux_vector(scene_err(model.field(f))?, &x, &model.quad))?,
                (None, Some(t)) => lib(energy_flux_vector_measure(scene_err(model.tensor(t))?, &x))?,
                (None, None) => return Err("one of --field and --tensor is required".into()),
            };
            Ok((
                model.digest,
                results(vec![("flux_vector", report::vec3(&q)), ("point", report::vec3(point))]),
                None,
            ))
        }
        Command::TotalDistribution { scene, tensor, region, subset } => {
            let model = load(&scene.scene)?;
            let t = scene_err(model.tensor(tensor))?;
            let r = scene_err(model.region(region))?;
            let phi = lib(total_distribution(t, r))?;
            let mut res = results(vec![
                ("distribution", report::measure_summary(&phi.measure)),
                ("total_power", json!(total_power_from_distribution(&phi))),
            ]);
            if let Some(s) = subset {
                let d = s.resolve(None)?;
                res.insert("subset_measure".into(), json!(measure_of(&phi.measure, &d)));
            }
            Ok((model.digest, res, None))
        }
        Command::Verify(v) => verify(v),
    }
}

fn verify(v: &Verify) -> Outcome {
    match v {
        Verify::Cauchy {
            scene,
            field,
            tensor,
            direction,
            point,
            normal,
            sizes,
            mode,
            tolerance,
            min_ratio,
        } => {
            let model = load(&scene.scene)?;
            let map = match (field, tensor) {
                (Some(f), _) => {
                    let f = scene_err(model.field(f))?.clone();
                    match direction {
                        Some(u) => CauchyMap::directional(f, *u),
                        None => {
                            let quad = Arc::clone(&model.quad);
                            CauchyMap::scalar(move |x, n| {
                                irradiance(&f, x, n, &quad, &SphereSubset::Full).unwrap_or(f64::NAN)
                            })
                        }
                    }
                }
                (None, Some(t)) => CauchyMap::from_tensor(scene_err(model.tensor(t))?.clone()),
                (None, None) => return Err("one of --field and --tensor is required".into()),
            };
            let eval_mode = match mode {
                ModeArg::Frozen => EvaluationMode::Frozen,
                ModeArg::FaceCentroid => EvaluationMode::FaceCentroid,
            };
            let residuals = lib(tetrahedron_sweep(&map, to_point(point), *normal, sizes, eval_mode))?;
            if let Some(bad) = residuals.iter().find(|r| !r.is_finite()) {
                return Err(format!("non-finite tetrahedron residual {bad}"));
            }
            let mut pass = true;
            let mut sweep = Vec::with_capacity(sizes.len());
            for (k, (h, r)) in sizes.iter().zip(&residuals).enumerate() {
                let ok = match eval_mode {
                    EvaluationMode::Frozen => {
                        sweep.push(json!({ "h": h, "residual": r }));
                        *r <= *tolerance
                    }
                    EvaluationMode::FaceCentroid => {
                        let ratio = (k > 0).then(|| residuals[k - 1] / r);
                        sweep.push(json!({ "h": h, "residual": r, "ratio": ratio }));
                        *r <= *tolerance || ratio.is_none_or(|q| q >= *min_ratio)
                    }
                };
                pass &= ok;
            }
            let res = results(vec![
                ("mode", json!(match mode { ModeArg::Frozen => "frozen", ModeArg::FaceCentroid => "face-centroid" })),
                ("sweep", Value::Array(sweep)),
                ("tolerance", json!(tolerance)),
                ("min_ratio", json!(min_ratio)),
            ]);
            Ok((model.digest, res, Some(pass)))
        }
        Verify::Balance {
            scene,
            field,
            balance,
            region,
            direction,
            point,
            tolerance,
            differential_tolerance,
        } => {
            let model = load(&scene.scene)?;
            let f = scene_err(model.field(field))?;
            let data = scene_err(model.balance_data(balance))?;
            let r = scene_err(model.region(region))?;
            let ib = lib(integral_balance_residual(f, data, r, direction))?;
            let mut pass = ib.residual <= *tolerance;
            let mut res = results(vec![
                ("storage", json!(ib.storage)),
                ("outflow", json!(ib.outflow)),
                ("production", json!(ib.production)),
                ("integral_residual", json!(ib.residual)),
                ("tolerance", json!(tolerance)),
            ]);
            if let Some(p) = point {
                let d = lib(differential_balance_residual(f, data, &to_point(p), direction))?;
                pass &= d <= *differential_tolerance;
                res.insert("differential_residual".into(), json!(d));
                res.insert("differential_tolerance".into(), json!(differential_tolerance));
            }
            Ok((model.digest, res, Some(pass)))
        }
        Verify::Boundedness { scene, field, region, direction } => {
            let model = load(&scene.scene)?;
            let f = scene_err(model.field(field))?;
            let r = scene_err(model.region(region))?;
            let b = lib(boundedness_constant(f, direction, r))?;
            Ok((
                model.digest,
                results(vec![
                    ("constant", json!(b.constant)),
                    ("power", json!(b.power)),
                    ("volume", json!(b.volume)),
                ]),
                Some(b.verified),
            ))
        }
        Verify::Ray {
            scene,
            field,
            direction,
            from,
            to,
            samples,
            tolerance,
            endpoint_tolerance,
        } => {
            let model = load(&scene.scene)?;
            let f = scene_err(model.field(field))?;
            let rc = lib(ray_conservation_residual(f, direction, (to_point(from), to_point(to)), *samples))?;
            let pass = rc.max_directional_derivative <= *tolerance && rc.endpoint_difference <= *endpoint_tolerance;
            Ok((
                model.digest,
                results(vec![
                    ("max_directional_derivative", json!(rc.max_directional_derivative)),
                    ("endpoint_difference", json!(rc.endpoint_difference)),
                    ("tolerance", json!(tolerance)),
                    ("endpoint_tolerance", json!(endpoint_tolerance)),
                ]),
                Some(pass),
            ))
        }
        Verify::RadiationAssumption { scene, tensor, points, tolerance } => {
            let model = load(&scene.scene)?;
            let t = scene_err(model.tensor(tensor))?;
            let mut pass = true;
            let mut per_point = Vec::with_capacity(points.len());
            for p in points {
                let rep = lib(verify_radiation_assumption(t, &to_point(p), *tolerance))?;
                pass &= rep.pass;
                per_point.push(json!({
                    "point": report::vec3(p),
                    "max_angular_deviation": rep.max_angular_deviation,
                    "unit_norm_residual": rep.unit_norm_residual,
                    "checked_points": rep.checked_points,
                    "pass": rep.pass,
                }));
            }
            Ok((
                model.digest,
                results(vec![("points", Value::Array(per_point)), ("tolerance", json!(tolerance))]),
                Some(pass),
            ))
        }
        Verify::VirtualPower {
            scene,
            field,
            balance,
            region,
            direction,
            meter,
            tolerance,
        } => {
            let model = load(&scene.scene)?;
            let f = scene_err(model.field(field))?;
            let data = scene_err(model.balance_data(balance))?;
            let r = scene_err(model.region(region))?;
            let w = *scene_err(model.meter(meter))?;
            let vp = lib(virtual_power_residual(f, data, r, direction, |x| w.eval(x)))?;
            Ok((
                model.digest,
                results(vec![
                    ("surface", json!(vp.surface)),
                    ("volume", json!(vp.volume)),
                    ("gradient_term", json!(vp.gradient_term)),
                    ("residual", json!(vp.residual)),
                    ("tolerance", json!(tolerance)),
                ]),
                Some(vp.residual <= *tolerance),
            ))
        }
    }
}
