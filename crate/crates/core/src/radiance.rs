//! Classical radiance: scalar fields `i_u(x)` obeying the cosine rule,
//! irradiance, directional and total power, the energy flux vector and the
//! radiant intensity.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::error::{check_finite, Location, RadfluxError, Result};
use crate::numeric::{central_gradient, fd_step, pairwise_sum, pairwise_sum_vec3};
use crate::region::{boundary_integrate, Point, Region};
use crate::sphere::{
    integrate_sphere, integrate_subset, Direction, SphereSubset,
    SphericalQuadrature,
};

pub type RadianceFn = Arc<dyn Fn(&Point, &Direction) -> f64 + Send + Sync>;
pub type ProfileFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Cross-sectional profile of a transported field, evaluated at the
/// projection of `x` onto the plane orthogonal to the transport axis.
#[derive(Clone)]
pub enum Profile {
    /// `exp(−k·x⊥)`.
    Exponential { rate: Vector3<f64> },
    /// `exp(−|x⊥ − c⊥|² / 2w²)`.
    Gaussian { center: Point, width: f64 },
    Custom(ProfileFn),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Exponential { rate } => f.debug_struct("Exponential").field("rate", rate).finish(),
            Profile::Gaussian { center, width } => f
                .debug_struct("Gaussian")
                .field("center", center)
                .field("width", width)
                .finish(),
            Profile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// A classical radiance field `(x, u) ↦ i_u(x)`.
///
/// The analytic builders have closed-form gradients; [`Self::custom`] is an
/// escape hatch whose smoothness is the caller's responsibility.
#[derive(Clone)]
pub enum ScalarRadianceField {
    /// `i_u(x) = i₀` for every direction.
    Isotropic { intensity: f64 },
    /// `i_u(x) = c + a·x`, the same for every direction. Nonnegative only
    /// on the half-space `c + a·x ≥ 0`; values are not clamped.
    Linear { offset: f64, gradient: Vector3<f64> },
    /// Constant along `axis`: `i_u(x) = profile(x − (x·d)d)`.
    Transported { axis: Direction, profile: Profile },
    /// `i₀` on the open hemisphere `u·axis > 0`, zero elsewhere.
    LambertSurface { intensity: f64, axis: Direction },
    /// `Σ cₖ fₖ`.
    Combination(Vec<(f64, ScalarRadianceField)>),
    /// Arbitrary evaluation function. Unless `allow_negative` is set,
    /// debug builds assert `i_u(x) ≥ 0` on every evaluation.
    Custom { eval: RadianceFn, allow_negative: bool },
}

impl fmt::Debug for ScalarRadianceField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ScalarRadianceField::*;
        match self {
            Isotropic { intensity } => f.debug_struct("Isotropic").field("intensity", intensity).finish(),
            Linear { offset, gradient } => f
                .debug_struct("Linear")
                .field("offset", offset)
                .field("gradient", gradient)
                .finish(),
            Transported { axis, profile } => f
                .debug_struct("Transported")
                .field("axis", axis)
                .field("profile", profile)
                .finish(),
            LambertSurface { intensity, axis } => f
                .debug_struct("LambertSurface")
                .field("intensity", intensity)
                .field("axis", axis)
                .finish(),
            Combination(terms) => f.debug_tuple("Combination").field(terms).finish(),
            Custom { allow_negative, .. } => f
                .debug_struct("Custom")
                .field("allow_negative", allow_negative)
                .finish_non_exhaustive(),
        }
    }
}

fn require_finite(name: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(RadfluxError::InvalidArgument(format!("{name} must be finite")))
    }
}

fn require_nonnegative(name: &str, v: f64) -> Result<()> {
    require_finite(name, &[v])?;
    if v < 0.0 {
        return Err(RadfluxError::InvalidArgument(format!(
            "{name} must be nonnegative, got {v}"
        )));
    }
    Ok(())
}

impl ScalarRadianceField {
    pub fn zero() -> Self {
        ScalarRadianceField::Isotropic { intensity: 0.0 }
    }

    pub fn isotropic(intensity: f64) -> Result<Self> {
        require_nonnegative("isotropic intensity", intensity)?;
        Ok(ScalarRadianceField::Isotropic { intensity })
    }

    pub fn linear(offset: f64, gradient: Vector3<f64>) -> Result<Self> {
        require_finite("linear field offset", &[offset])?;
        require_finite("linear field gradient", gradient.as_slice())?;
        Ok(ScalarRadianceField::Linear { offset, gradient })
    }

    pub fn transported(axis: Direction, profile: Profile) -> Result<Self> {
        match &profile {
            Profile::Exponential { rate } => require_finite("exponential rate", rate.as_slice())?,
            Profile::Gaussian { center, width } => {
                require_finite("gaussian center", center.coords.as_slice())?;
                if !(width.is_finite() && *width > 0.0) {
                    return Err(RadfluxError::InvalidArgument(format!(
                        "gaussian width must be positive, got {width}"
                    )));
                }
            }
            Profile::Custom(_) => {}
        }
        Ok(ScalarRadianceField::Transported { axis, profile })
    }

    pub fn lambert_surface(intensity: f64, axis: Direction) -> Result<Self> {
        require_nonnegative("lambert intensity", intensity)?;
        Ok(ScalarRadianceField::LambertSurface { intensity, axis })
    }

    pub fn combination(terms: Vec<(f64, ScalarRadianceField)>) -> Result<Self> {
        require_finite(
            "combination coefficient",
            &terms.iter().map(|(c, _)| *c).collect::<Vec<_>>(),
        )?;
        Ok(ScalarRadianceField::Combination(terms))
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&Point, &Direction) -> f64 + Send + Sync + 'static,
    {
        ScalarRadianceField::Custom {
            eval: Arc::new(f),
            allow_negative: false,
        }
    }

    /// Like [`Self::custom`] but permits negative values, for signed
    /// perturbations in tests and verifiers.
    pub fn custom_signed<F>(f: F) -> Self
    where
        F: Fn(&Point, &Direction) -> f64 + Send + Sync + 'static,
    {
        ScalarRadianceField::Custom {
            eval: Arc::new(f),
            allow_negative: true,
        }
    }

    /// `i_u(x)`.
    pub fn eval(&self, x: &Point, u: &Direction) -> f64 {
        use ScalarRadianceField::*;
        match self {
            Isotropic { intensity } => *intensity,
            Linear { offset, gradient } => offset + gradient.dot(&x.coords),
            Transported { axis, profile } => {
                let d = axis.as_vector();
                let perp = Point::from(x.coords - d * x.coords.dot(d));
                match profile {
                    Profile::Exponential { rate } => (-rate.dot(&perp.coords)).exp(),
                    Profile::Gaussian { center, width } => {
                        let c = center.coords - d * center.coords.dot(d);
                        (-(perp.coords - c).norm_squared() / (2.0 * width * width)).exp()
                    }
                    Profile::Custom(p) => p(&perp),
                }
            }
            LambertSurface { intensity, axis } => {
                if u.dot(axis) > 0.0 {
                    *intensity
                } else {
                    0.0
                }
            }
            Combination(terms) => terms.iter().map(|(c, f)| c * f.eval(x, u)).sum(),
            Custom {
                eval,
                allow_negative,
            } => {
                let v = eval(x, u);
                debug_assert!(
                    *allow_negative || !(v < 0.0),
                    "custom radiance field returned {v} < 0"
                );
                v
            }
        }
    }

    /// `∇_x i_u(x)` in closed form, when the field has one.
    pub fn analytic_gradient(&self, x: &Point, u: &Direction) -> Option<Vector3<f64>> {
        use ScalarRadianceField::*;
        match self {
            Isotropic { .. } | LambertSurface { .. } => Some(Vector3::zeros()),
            Linear { gradient, .. } => Some(*gradient),
            Transported { axis, profile } => {
                let d = axis.as_vector();
                let proj = Matrix3::identity() - d * d.transpose();
                let value = self.eval(x, u);
                match profile {
                    Profile::Exponential { rate } => Some(-value * (proj * rate)),
                    Profile::Gaussian { center, width } => {
                        Some(-value * (proj * (x.coords - center.coords)) / (width * width))
                    }
                    Profile::Custom(_) => None,
                }
            }
            Combination(terms) => {
                let mut g = Vector3::zeros();
                for (c, f) in terms {
                    g += *c * f.analytic_gradient(x, u)?;
                }
                Some(g)
            }
            Custom { .. } => None,
        }
    }

    /// Central-difference gradient with step `step`.
    pub fn fd_gradient(&self, x: &Point, u: &Direction, step: f64) -> Vector3<f64> {
        central_gradient(|p| self.eval(p, u), x, step)
    }

    pub(crate) fn eval_checked(&self, x: &Point, u: &Direction) -> Result<f64> {
        check_finite("radiance field", Location::Point(*x), self.eval(x, u))
    }
}

/// Signed cosine-rule flux density `i_u(x)(u·n)`: positive for outgoing
/// directions, negative for incoming ones.
pub fn lambert_density(field: &ScalarRadianceField, x: &Point, u: &Direction, n: &Direction) -> f64 {
    field.eval(x, u) * u.dot(n)
}

/// `E(x, n) = ∫_D i_u(x)(u·n) dω`; with `D` the full sphere this is the
/// signed irradiance, with a hemisphere about `n` the emission-only one.
pub fn irradiance(
    field: &ScalarRadianceField,
    x: &Point,
    n: &Direction,
    quad: &SphericalQuadrature,
    subset: &SphereSubset,
) -> Result<f64> {
    integrate_subset(|u| lambert_density(field, x, u, n), quad, subset)
}

/// `P_{R,u} = ∫_{∂R} i_u (u·n) dA`.
pub fn directional_power(field: &ScalarRadianceField, region: &Region, u: &Direction) -> Result<f64> {
    boundary_integrate(region, |x, n| field.eval(x, u) * u.dot(n))
}

/// `P_R = ∫_{∂R} ∫_{S²} i_u(x)(u·n) dω dA`, sphere integral inside.
///
/// Boundary samples are processed in parallel; partial results are
/// collected in sample order and summed with a fixed tree.
pub fn total_power(
    field: &ScalarRadianceField,
    region: &Region,
    quad: &SphericalQuadrature,
) -> Result<f64> {
    let samples = region.boundary_samples();
    let per_sample: Vec<f64> = samples
        .par_iter()
        .map(|s| {
            integrate_sphere(|u| lambert_density(field, &s.point, u, &s.normal), quad)
                .map(|e| e * s.area_weight)
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&per_sample))
}

/// `∫_{S²} P_{R,u} dω`, the same quantity with the order of integration
/// swapped.
pub fn total_power_by_direction(
    field: &ScalarRadianceField,
    region: &Region,
    quad: &SphericalQuadrature,
) -> Result<f64> {
    let per_direction: Vec<f64> = quad
        .nodes()
        .par_iter()
        .zip(quad.weights().par_iter())
        .map(|(u, w)| directional_power(field, region, u).map(|p| p * w))
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&per_direction))
}

/// `q(x) = ∫_{S²} i_u(x) u dω`.
pub fn energy_flux_vector(
    field: &ScalarRadianceField,
    x: &Point,
    quad: &SphericalQuadrature,
) -> Result<Vector3<f64>> {
    let values: Vec<f64> = quad
        .nodes()
        .iter()
        .map(|u| field.eval_checked(x, u))
        .collect::<Result<_>>()?;
    let terms: Vec<Vector3<f64>> = quad
        .iter()
        .zip(&values)
        .map(|((u, w), i)| u.as_vector() * (w * i))
        .collect();
    Ok(pairwise_sum_vec3(&terms))
}

/// `S_u = ∫_{∂R} i_u(x) n dA`.
pub fn radiant_intensity(
    field: &ScalarRadianceField,
    region: &Region,
    u: &Direction,
) -> Result<Vector3<f64>> {
    let samples = region.boundary_samples();
    let mut terms = Vec::with_capacity(samples.len());
    for s in &samples {
        let i = field.eval_checked(&s.point, u)?;
        terms.push(s.normal.as_vector() * (i * s.area_weight));
    }
    Ok(pairwise_sum_vec3(&terms))
}

/// `∫_R ∇i_u dV` by finite differences; the volume side of the Green
/// identity for [`radiant_intensity`].
pub fn radiant_intensity_volume(
    field: &ScalarRadianceField,
    region: &Region,
    u: &Direction,
) -> Result<Vector3<f64>> {
    let h = fd_step(region.characteristic_length());
    let rule = region.volume_rule();
    let mut terms = Vec::with_capacity(rule.len());
    for (p, w) in &rule {
        let g = field.fd_gradient(p, u, h);
        for k in 0..3 {
            check_finite("radiance gradient", Location::Point(*p), g[k])?;
        }
        terms.push(g * *w);
    }
    Ok(pairwise_sum_vec3(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quad() -> SphericalQuadrature {
        SphericalQuadrature::new(4).unwrap()
    }

    fn unit_x_linear() -> ScalarRadianceField {
        ScalarRadianceField::linear(0.0, Vector3::x()).unwrap()
    }

    #[test]
    fn cosine_rule_values() {
        let f = ScalarRadianceField::isotropic(2.0).unwrap();
        let x = Point::origin();
        let n = Direction::z_axis();
        assert_eq!(lambert_density(&f, &x, &n, &n), 2.0);
        let u = Direction::from_components((PI / 3.0).sin(), 0.0, 0.5).unwrap();
        assert!((lambert_density(&f, &x, &u, &n) - 1.0).abs() < 1e-15);
        assert_eq!(lambert_density(&f, &x, &Direction::x_axis(), &n), 0.0);
        assert_eq!(
            lambert_density(&f, &x, &u, &n),
            -lambert_density(&f, &x, &u, &-n)
        );
    }

    #[test]
    fn builders_reject_bad_parameters() {
        assert!(ScalarRadianceField::isotropic(-1.0).is_err());
        assert!(ScalarRadianceField::lambert_surface(f64::NAN, Direction::z_axis()).is_err());
        assert!(ScalarRadianceField::linear(0.0, Vector3::new(f64::INFINITY, 0.0, 0.0)).is_err());
        assert!(ScalarRadianceField::transported(
            Direction::z_axis(),
            Profile::Gaussian { center: Point::origin(), width: 0.0 }
        )
        .is_err());
    }

    #[test]
    fn lambert_irradiance_over_hemisphere_is_pi() {
        let n = Direction::z_axis();
        let f = ScalarRadianceField::lambert_surface(1.0, n).unwrap();
        let e = irradiance(&f, &Point::origin(), &n, &quad(), &SphereSubset::hemisphere(n)).unwrap();
        assert!((e - PI).abs() < 1e-6);
    }

    #[test]
    fn isotropic_irradiance_vanishes() {
        let f = ScalarRadianceField::isotropic(1.0).unwrap();
        let n = Direction::normalize(Vector3::new(0.3, -0.2, 0.9)).unwrap();
        let e = irradiance(&f, &Point::new(1.0, 2.0, 3.0), &n, &quad(), &SphereSubset::Full).unwrap();
        assert!(e.abs() < 1e-12);
        let z = irradiance(&ScalarRadianceField::zero(), &Point::origin(), &n, &quad(), &SphereSubset::Full)
            .unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn directional_power_of_linear_field_on_cube() {
        let p = directional_power(&unit_x_linear(), &Region::unit_cube(), &Direction::x_axis()).unwrap();
        assert!((p - 1.0).abs() < 1e-9);
        let iso = ScalarRadianceField::isotropic(3.0).unwrap();
        let u = Direction::normalize(Vector3::new(1.0, 2.0, 3.0)).unwrap();
        assert!(directional_power(&iso, &Region::unit_cube(), &u).unwrap().abs() < 1e-9);
    }

    #[test]
    fn total_power_examples() {
        let cube = Region::unit_cube();
        let q = quad();
        let iso = ScalarRadianceField::isotropic(1.0).unwrap();
        assert!(total_power(&iso, &cube, &q).unwrap().abs() < 1e-9);
        let lam = ScalarRadianceField::lambert_surface(1.0, Direction::z_axis()).unwrap();
        assert!(total_power(&lam, &cube, &q).unwrap().abs() < 1e-9);
        // c + a·x has the u-independent gradient a, so ∫ a·u dω = 0.
        let lin = ScalarRadianceField::linear(2.0, Vector3::x()).unwrap();
        assert!(total_power(&lin, &cube, &q).unwrap().abs() < 1e-9);
        // ∇i_u·u = u₁² here, which does integrate to 4π/3.
        let tilted = ScalarRadianceField::custom(|x, u| 1.0 + x.x * u[0]);
        let p = total_power(&tilted, &cube, &q).unwrap();
        assert!((p - 4.0 * PI / 3.0).abs() < 1e-6, "{p}");
    }

    #[test]
    fn energy_flux_vector_examples() {
        let q = energy_flux_vector(&ScalarRadianceField::isotropic(1.0).unwrap(), &Point::origin(), &quad())
            .unwrap();
        assert!(q.norm() < 1e-12);
        let lam = ScalarRadianceField::lambert_surface(1.0, Direction::z_axis()).unwrap();
        let q = energy_flux_vector(&lam, &Point::origin(), &quad()).unwrap();
        assert!((q - Vector3::new(0.0, 0.0, PI)).norm() < 1e-6);
    }

    #[test]
    fn radiant_intensity_examples() {
        let u = Direction::y_axis();
        let one = ScalarRadianceField::isotropic(1.0).unwrap();
        assert!(radiant_intensity(&one, &Region::unit_cube(), &u).unwrap().norm() < 1e-9);
        let s = radiant_intensity(&unit_x_linear(), &Region::unit_cube(), &u).unwrap();
        assert!((s - Vector3::x()).norm() < 1e-9);
        let ball = Region::ball(Point::origin(), 1.0).unwrap();
        let s = radiant_intensity(&unit_x_linear(), &ball, &u).unwrap();
        assert!((s - Vector3::new(4.0 * PI / 3.0, 0.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn transported_gradient_is_orthogonal_to_axis() {
        let f = ScalarRadianceField::transported(
            Direction::y_axis(),
            Profile::Exponential { rate: Vector3::x() },
        )
        .unwrap();
        let x = Point::new(0.4, 7.0, -1.0);
        assert!((f.eval(&x, &Direction::y_axis()) - (-0.4f64).exp()).abs() < 1e-15);
        let g = f.analytic_gradient(&x, &Direction::y_axis()).unwrap();
        assert_eq!(g.y, 0.0);
        let fd = f.fd_gradient(&x, &Direction::y_axis(), 1e-4);
        assert!((g - fd).norm() < 1e-8);
    }

    #[test]
    fn custom_field_errors_propagate() {
        let bad = ScalarRadianceField::custom(|x, _| if x.x > 0.5 { f64::NAN } else { 1.0 });
        assert!(directional_power(&bad, &Region::unit_cube(), &Direction::x_axis()).is_err());
        assert!(energy_flux_vector(&bad, &Point::new(1.0, 0.0, 0.0), &quad()).is_err());
    }
}
