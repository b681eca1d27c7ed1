//! Numerical checks of the structural laws of a flux theory: linearity of
//! the Cauchy map via shrinking tetrahedra, boundedness, integral and
//! differential balance, conservation along rays and the virtual-power
//! identity.
//!
//! Derivatives are central finite differences with step `1e-4 ×` a
//! characteristic length (truncation O(step²)), so the fields under test
//! should have two continuous derivatives.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{check_finite, Location, RadfluxError, Result};
use crate::measure::{combine, norm, SphereMeasure};
use crate::numeric::{central_directional, fd_step, pairwise_sum};
use crate::radiance::{directional_power, ScalarRadianceField};
use crate::region::{boundary_integrate, make_tetrahedron, volume_integrate, Point, Region};
use crate::sphere::Direction;
use crate::tensor::{apply_to_normal, RadianceTensor};

pub const DEFAULT_LINEARITY_TOLERANCE: f64 = 1e-12;
/// Minimum ratio between residuals at successive halvings of `h` for
/// face-centroid evaluation.
pub const DEFAULT_DECAY_RATIO: f64 = 1.8;
pub const DEFAULT_INTEGRAL_BALANCE_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_DIFFERENTIAL_BALANCE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_RAY_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_ENDPOINT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_VIRTUAL_POWER_TOLERANCE: f64 = 1e-6;
/// Absolute slack in `|P| ≤ C|R| + slack`.
pub const BOUNDEDNESS_SLACK: f64 = 1e-9;

pub type ScalarMapFn = Arc<dyn Fn(&Point, &Direction) -> f64 + Send + Sync>;
pub type MeasureMapFn = Arc<dyn Fn(&Point, &Direction) -> Result<SphereMeasure> + Send + Sync>;
pub type PointDirectionFn = Arc<dyn Fn(&Point, &Direction) -> f64 + Send + Sync>;

/// A Cauchy map `(x, n) ↦ flux density`, scalar or measure-valued.
#[derive(Clone)]
pub enum CauchyMap {
    Scalar(ScalarMapFn),
    Measure(MeasureMapFn),
}

impl fmt::Debug for CauchyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CauchyMap::Scalar(_) => write!(f, "CauchyMap::Scalar(..)"),
            CauchyMap::Measure(_) => write!(f, "CauchyMap::Measure(..)"),
        }
    }
}

impl CauchyMap {
    pub fn scalar<F>(f: F) -> Self
    where
        F: Fn(&Point, &Direction) -> f64 + Send + Sync + 'static,
    {
        CauchyMap::Scalar(Arc::new(f))
    }

    pub fn measure<F>(f: F) -> Self
    where
        F: Fn(&Point, &Direction) -> Result<SphereMeasure> + Send + Sync + 'static,
    {
        CauchyMap::Measure(Arc::new(f))
    }

    /// Directional flux `(x, n) ↦ i_u(x)(u·n)` of a radiance field.
    pub fn directional(field: ScalarRadianceField, u: Direction) -> Self {
        Self::scalar(move |x, n| field.eval(x, &u) * u.dot(n))
    }

    /// `(x, n) ↦ 𝕀(x)(n)`.
    pub fn from_tensor(tensor: RadianceTensor) -> Self {
        Self::measure(move |x, n| apply_to_normal(&tensor, x, n))
    }
}

/// Where the Cauchy map is evaluated on each tetrahedron face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvaluationMode {
    /// At the tetrahedron's anchor point on every face; linear maps give
    /// residuals at rounding level.
    #[default]
    Frozen,
    /// At each face centroid; smooth maps give residuals of order `h`.
    FaceCentroid,
}

/// `|Σₐ τ(xₐ, nₐ) Aₐ| / A₀` (scalar maps) or `‖Σₐ J(xₐ, nₐ) Aₐ‖ / A₀`
/// (measure maps) over the tetrahedron of size `h` around `x` whose slant
/// face has outward normal `normal`.
pub fn tetrahedron_residual(
    map: &CauchyMap,
    x: Point,
    normal: Direction,
    h: f64,
    mode: EvaluationMode,
) -> Result<f64> {
    let tet = make_tetrahedron(x, h, normal)?;
    let a0 = tet.faces[0].area;
    let at = |face_centroid: Point| match mode {
        EvaluationMode::Frozen => x,
        EvaluationMode::FaceCentroid => face_centroid,
    };
    match map {
        CauchyMap::Scalar(f) => {
            let mut terms = [0.0; 4];
            for (t, face) in terms.iter_mut().zip(&tet.faces) {
                let p = at(face.centroid);
                *t = check_finite("Cauchy map", Location::Point(p), f(&p, &face.normal))? * face.area;
            }
            Ok(pairwise_sum(&terms).abs() / a0)
        }
        CauchyMap::Measure(f) => {
            let mut acc: Option<SphereMeasure> = None;
            for face in &tet.faces {
                let j = f(&at(face.centroid), &face.normal)?;
                acc = Some(match acc {
                    None => j.scaled(face.area)?,
                    Some(prev) => combine(1.0, &prev, face.area, &j)?,
                });
            }
            Ok(norm(&acc.expect("four faces")) / a0)
        }
    }
}

/// [`tetrahedron_residual`] over several sizes, evaluated in parallel and
/// returned in the order of `sizes`.
pub fn tetrahedron_sweep(
    map: &CauchyMap,
    x: Point,
    normal: Direction,
    sizes: &[f64],
    mode: EvaluationMode,
) -> Result<Vec<f64>> {
    sizes
        .par_iter()
        .map(|h| tetrahedron_residual(map, x, normal, *h, mode))
        .collect()
}

/// Source and storage terms of the directional balance law.
#[derive(Clone)]
pub struct BalanceData {
    /// `ρ̇_u(x)`.
    pub rho_dot: PointDirectionFn,
    /// `s_u(x)`.
    pub source: PointDirectionFn,
}

impl fmt::Debug for BalanceData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BalanceData(..)")
    }
}

impl BalanceData {
    pub fn new<R, S>(rho_dot: R, source: S) -> Self
    where
        R: Fn(&Point, &Direction) -> f64 + Send + Sync + 'static,
        S: Fn(&Point, &Direction) -> f64 + Send + Sync + 'static,
    {
        BalanceData {
            rho_dot: Arc::new(rho_dot),
            source: Arc::new(source),
        }
    }

    pub fn zero() -> Self {
        Self::new(|_, _| 0.0, |_, _| 0.0)
    }

    /// `ρ̇ = 0` and `s_u = ∇i_u·u`, the data that balances `field` exactly.
    /// Uses the closed-form gradient where the field has one.
    pub fn consistent_with(field: ScalarRadianceField) -> Self {
        Self::new(
            |_, _| 0.0,
            move |x, u| match field.analytic_gradient(x, u) {
                Some(g) => g.dot(u.as_vector()),
                None => central_directional(
                    |p| field.eval(p, u),
                    x,
                    u.as_vector(),
                    fd_step(x.coords.norm().max(1.0)),
                ),
            },
        )
    }
}

/// `∇i_u(x)·u` by central differences.
fn transport_derivative(field: &ScalarRadianceField, x: &Point, u: &Direction, step: f64) -> Result<f64> {
    let d = central_directional(|p| field.eval(p, u), x, u.as_vector(), step);
    check_finite("radiance derivative", Location::Point(*x), d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundednessCheck {
    /// `C = max |∇i_u·u|` over the volume rule's points.
    pub constant: f64,
    pub power: f64,
    pub volume: f64,
    /// `|P_{R,u}| ≤ C |R| + 1e-9`.
    pub verified: bool,
}

pub fn boundedness_constant(
    field: &ScalarRadianceField,
    u: &Direction,
    region: &Region,
) -> Result<BoundednessCheck> {
    let step = fd_step(region.characteristic_length());
    let derivatives: Vec<f64> = region
        .volume_rule()
        .par_iter()
        .map(|(p, _)| transport_derivative(field, p, u, step).map(f64::abs))
        .collect::<Result<_>>()?;
    let constant = derivatives.iter().copied().fold(0.0, f64::max);
    let power = directional_power(field, region, u)?;
    let volume = region.volume();
    Ok(BoundednessCheck {
        constant,
        power,
        volume,
        verified: power.abs() <= constant * volume + BOUNDEDNESS_SLACK,
    })
}

/// `|∇i_u·u + ρ̇_u − s_u|` at `x`.
pub fn differential_balance_residual(
    field: &ScalarRadianceField,
    data: &BalanceData,
    x: &Point,
    u: &Direction,
) -> Result<f64> {
    let d = transport_derivative(field, x, u, fd_step(x.coords.norm().max(1.0)))?;
    let rho = check_finite("rho_dot", Location::Point(*x), (data.rho_dot)(x, u))?;
    let s = check_finite("source", Location::Point(*x), (data.source)(x, u))?;
    Ok((d + rho - s).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayCheck {
    /// `max |∇i_u·u|` over the sample points.
    pub max_directional_derivative: f64,
    /// `max |i_u(xₖ) − i_u(x₀)|` over the sample points; includes the
    /// endpoint difference.
    pub endpoint_difference: f64,
}

/// Conservation of `i_u` along a segment parallel to `u`.
pub fn ray_conservation_residual(
    field: &ScalarRadianceField,
    u: &Direction,
    segment: (Point, Point),
    samples: usize,
) -> Result<RayCheck> {
    let (a, b) = segment;
    let chord = b - a;
    let length = chord.norm();
    if !(length > 0.0 && length.is_finite()) {
        return Err(RadfluxError::InvalidArgument("ray segment has zero length".into()));
    }
    if chord.cross(u.as_vector()).norm() > 1e-9 * length {
        return Err(RadfluxError::InvalidArgument(
            "ray segment is not parallel to the direction".into(),
        ));
    }
    if samples < 2 {
        return Err(RadfluxError::InvalidArgument(
            "ray check needs at least 2 samples".into(),
        ));
    }
    let step = fd_step(length.max(1.0));
    let start = check_finite("radiance field", Location::Point(a), field.eval(&a, u))?;
    let mut max_d: f64 = 0.0;
    let mut max_diff: f64 = 0.0;
    for k in 0..samples {
        let t = k as f64 / (samples - 1) as f64;
        let p = a + chord * t;
        max_d = max_d.max(transport_derivative(field, &p, u, step)?.abs());
        let v = check_finite("radiance field", Location::Point(p), field.eval(&p, u))?;
        max_diff = max_diff.max((v - start).abs());
    }
    Ok(RayCheck {
        max_directional_derivative: max_d,
        endpoint_difference: max_diff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralBalance {
    /// `∫_R ρ̇_u dV`.
    pub storage: f64,
    /// `P_{R,u}`.
    pub outflow: f64,
    /// `∫_R s_u dV`.
    pub production: f64,
    pub residual: f64,
}

/// `|∫_R ρ̇_u dV + P_{R,u} − ∫_R s_u dV|`.
pub fn integral_balance_residual(
    field: &ScalarRadianceField,
    data: &BalanceData,
    region: &Region,
    u: &Direction,
) -> Result<IntegralBalance> {
    let storage = volume_integrate(region, |x| (data.rho_dot)(x, u))?;
    let outflow = directional_power(field, region, u)?;
    let production = volume_integrate(region, |x| (data.source)(x, u))?;
    Ok(IntegralBalance {
        storage,
        outflow,
        production,
        residual: (storage + outflow - production).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualPowerCheck {
    /// `∫_{∂R} i_u (u·n) w dA`.
    pub surface: f64,
    /// `∫_R w (ρ̇_u − s_u) dV`.
    pub volume: f64,
    /// `∫_R i_u (∇w·u) dV`.
    pub gradient_term: f64,
    pub residual: f64,
}

/// Weak form of the directional balance tested against a meter
/// distribution variation `w`:
/// `|∫_{∂R} i_u (u·n) w dA + ∫_R w(ρ̇_u − s_u) dV − ∫_R i_u (∇w·u) dV|`.
pub fn virtual_power_residual<W>(
    field: &ScalarRadianceField,
    data: &BalanceData,
    region: &Region,
    u: &Direction,
    w: W,
) -> Result<VirtualPowerCheck>
where
    W: Fn(&Point) -> f64,
{
    let surface = boundary_integrate(region, |x, n| field.eval(x, u) * u.dot(n) * w(x))?;
    let volume = volume_integrate(region, |x| w(x) * ((data.rho_dot)(x, u) - (data.source)(x, u)))?;
    let step = fd_step(region.characteristic_length());
    let gradient_term = volume_integrate(region, |x| {
        field.eval(x, u) * central_directional(&w, x, u.as_vector(), step)
    })?;
    Ok(VirtualPowerCheck {
        surface,
        volume,
        gradient_term,
        residual: (surface + volume - gradient_term).abs(),
    })
}

/// Convenience: the constant flux-vector map `(x, n) ↦ T·n`.
pub fn constant_vector_map(t: Vector3<f64>) -> CauchyMap {
    CauchyMap::scalar(move |_, n| t.dot(n.as_vector()))
}
