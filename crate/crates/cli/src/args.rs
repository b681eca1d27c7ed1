//! Command-line grammar and the small value parsers it relies on.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;

use radflux::balance::{
    DEFAULT_DECAY_RATIO, DEFAULT_DIFFERENTIAL_BALANCE_TOLERANCE, DEFAULT_ENDPOINT_TOLERANCE,
    DEFAULT_INTEGRAL_BALANCE_TOLERANCE, DEFAULT_LINEARITY_TOLERANCE, DEFAULT_RAY_TOLERANCE,
    DEFAULT_VIRTUAL_POWER_TOLERANCE,
};
use radflux::sphere::{Direction, SphereSubset};
use radflux::tensor::DEFAULT_ASSUMPTION_TOLERANCE;

/// Parses `x,y,z` into a finite 3-vector.
pub fn parse_vec3(s: &str) -> Result<Vector3<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z but got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        let x: f64 = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
        if !x.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
        *slot = x;
    }
    Ok(Vector3::from(v))
}

/// A nonzero `x,y,z`, normalized.
pub fn parse_direction(s: &str) -> Result<Direction, String> {
    Direction::normalize(parse_vec3(s)?).map_err(|e| e.to_string())
}

/// A finite positive size.
pub fn parse_size(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(h) if h.is_finite() && h > 0.0 => Ok(h),
        _ => Err(format!("`{s}` is not a positive size")),
    }
}

/// Sphere subset syntax: `full`, `hemisphere` (about the query normal, when
/// one exists), `hemisphere:x,y,z` or `cap:x,y,z:alpha` with `alpha` in
/// radians.
#[derive(Debug, Clone, PartialEq)]
pub enum SubsetArg {
    Full,
    NormalHemisphere,
    Hemisphere(Direction),
    Cap(Direction, f64),
}

impl SubsetArg {
    pub fn resolve(&self, normal: Option<&Direction>) -> Result<SphereSubset, String> {
        Ok(match self {
            SubsetArg::Full => SphereSubset::Full,
            SubsetArg::NormalHemisphere => match normal {
                Some(n) => SphereSubset::hemisphere(*n),
                None => return Err("`hemisphere` needs an axis here: use hemisphere:x,y,z".into()),
            },
            SubsetArg::Hemisphere(a) => SphereSubset::hemisphere(*a),
            SubsetArg::Cap(a, alpha) => SphereSubset::cap(*a, *alpha).map_err(|e| e.to_string())?,
        })
    }

    /// Axis about which a quadrature should be aligned for this subset.
    pub fn axis(&self, normal: Option<&Direction>) -> Option<Direction> {
        match self {
            SubsetArg::Full => None,
            SubsetArg::NormalHemisphere => normal.copied(),
            SubsetArg::Hemisphere(a) | SubsetArg::Cap(a, _) => Some(*a),
        }
    }
}

pub fn parse_subset(s: &str) -> Result<SubsetArg, String> {
    let s = s.trim();
    if s == "full" {
        return Ok(SubsetArg::Full);
    }
    if s == "hemisphere" {
        return Ok(SubsetArg::NormalHemisphere);
    }
    if let Some(rest) = s.strip_prefix("hemisphere:") {
        return Ok(SubsetArg::Hemisphere(parse_direction(rest)?));
    }
    if let Some(rest) = s.strip_prefix("cap:") {
        let (axis, alpha) = rest
            .rsplit_once(':')
            .ok_or_else(|| format!("expected cap:x,y,z:alpha but got `{s}`"))?;
        let alpha: f64 = alpha
            .trim()
            .parse()
            .map_err(|_| format!("`{alpha}` is not an angle"))?;
        if !(0.0..=std::f64::consts::PI).contains(&alpha) {
            return Err(format!("cap half-angle {alpha} outside [0, π]"));
        }
        return Ok(SubsetArg::Cap(parse_direction(axis)?, alpha));
    }
    Err(format!("unknown subset `{s}`"))
}

#[derive(Debug, Parser)]
#[command(name = "radflux", version, about = "Radiometric fluxes, radiance tensors and balance-law checks")]
pub struct Cli {
    /// Emit a flat CSV table instead of a JSON report.
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SceneArg {
    /// Scene file (JSON).
    #[arg(long)]
    pub scene: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Irradiance `∫_D i_u(x)(u·n) dω` of a field.
    Irradiance {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        field: String,
        #[arg(long, value_parser = parse_vec3)]
        point: Vector3<f64>,
        #[arg(long, value_parser = parse_direction)]
        normal: Direction,
        #[arg(long, value_parser = parse_subset, default_value = "full")]
        subset: SubsetArg,
    },
    /// Directional power through a region's boundary, or total power when no
    /// direction is given.
    Power {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        field: String,
        #[arg(long)]
        region: String,
        #[arg(long, value_parser = parse_direction)]
        direction: Option<Direction>,
    },
    /// Energy flux vector of a field or a tensor at a point.
    FluxVector {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long, conflicts_with = "tensor", required_unless_present = "tensor")]
        field: Option<String>,
        #[arg(long)]
        tensor: Option<String>,
        #[arg(long, value_parser = parse_vec3)]
        point: Vector3<f64>,
    },
    /// Total distribution of a tensor over a region's boundary.
    TotalDistribution {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        tensor: String,
        #[arg(long)]
        region: String,
        #[arg(long, value_parser = parse_subset)]
        subset: Option<SubsetArg>,
    },
    /// Numerical verification of a structural law.
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Frozen,
    FaceCentroid,
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// Tetrahedron residuals of the Cauchy map of a field or tensor.
    Cauchy {
        #[command(flatten)]
        scene: SceneArg,
        /// Irradiance map of this field, or its directional flux with `--direction`.
        #[arg(long, conflicts_with = "tensor", required_unless_present = "tensor")]
        field: Option<String>,
        #[arg(long)]
        tensor: Option<String>,
        #[arg(long, value_parser = parse_direction, conflicts_with = "tensor")]
        direction: Option<Direction>,
        #[arg(long, value_parser = parse_vec3)]
        point: Vector3<f64>,
        #[arg(long, value_parser = parse_direction)]
        normal: Direction,
        /// Comma-separated tetrahedron sizes.
        #[arg(long, value_parser = parse_size, value_delimiter = ',', default_value = "1,0.5,0.25,0.125")]
        sizes: Vec<f64>,
        #[arg(long, value_enum, default_value = "frozen")]
        mode: ModeArg,
        /// Largest residual accepted outright.
        #[arg(long, default_value_t = DEFAULT_LINEARITY_TOLERANCE)]
        tolerance: f64,
        /// Smallest accepted ratio between successive residuals (face-centroid mode).
        #[arg(long, default_value_t = DEFAULT_DECAY_RATIO)]
        min_ratio: f64,
    },
    /// Integral balance over a region, optionally the differential balance at a point.
    Balance {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        field: String,
        #[arg(long)]
        balance: String,
        #[arg(long)]
        region: String,
        #[arg(long, value_parser = parse_direction)]
        direction: Direction,
        #[arg(long, value_parser = parse_vec3)]
        point: Option<Vector3<f64>>,
        #[arg(long, default_value_t = DEFAULT_INTEGRAL_BALANCE_TOLERANCE)]
        tolerance: f64,
        #[arg(long, default_value_t = DEFAULT_DIFFERENTIAL_BALANCE_TOLERANCE)]
        differential_tolerance: f64,
    },
    /// `|P_{R,u}| ≤ C|R|` with an empirical constant.
    Boundedness {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        field: String,
        #[arg(long)]
        region: String,
        #[arg(long, value_parser = parse_direction)]
        direction: Direction,
    },
    /// Conservation of radiance along a segment parallel to the direction.
    Ray {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        field: String,
        #[arg(long, value_parser = parse_direction)]
        direction: Direction,
        #[arg(long, value_parser = parse_vec3)]
        from: Vector3<f64>,
        #[arg(long, value_parser = parse_vec3)]
        to: Vector3<f64>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_RAY_TOLERANCE)]
        tolerance: f64,
        #[arg(long, default_value_t = DEFAULT_ENDPOINT_TOLERANCE)]
        endpoint_tolerance: f64,
    },
    /// The radiation assumption `Î(x)(u) = u` at one or more points.
    RadiationAssumption {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        tensor: String,
        #[arg(long = "point", value_parser = parse_vec3, required = true)]
        points: Vec<Vector3<f64>>,
        #[arg(long, default_value_t = DEFAULT_ASSUMPTION_TOLERANCE)]
        tolerance: f64,
    },
    /// Virtual-power identity for a meter variation.
    VirtualPower {
        #[command(flatten)]
        scene: SceneArg,
        #[arg(long)]
        field: String,
        #[arg(long)]
        balance: String,
        #[arg(long)]
        region: String,
        #[arg(long, value_parser = parse_direction)]
        direction: Direction,
        #[arg(long)]
        meter: String,
        #[arg(long, default_value_t = DEFAULT_VIRTUAL_POWER_TOLERANCE)]
        tolerance: f64,
    },
}
