//! Directions on the unit sphere, spherical quadrature and sphere subsets.
//!
//! The quadrature family is a composite product rule: Gauss-Legendre in
//! the polar coordinate `z = cos θ`, applied separately on `[0, 1]` and its
//! mirror `[-1, 0]`, times the periodic midpoint rule in the azimuth. For
//! refinement level `L` the rule uses `n = 4L` polar nodes per hemisphere
//! and `m = 8L` azimuthal nodes, `2·n·m = 64·L²` nodes in total.
//!
//! | level | nodes | polynomial degree integrated exactly |
//! |-------|-------|--------------------------------------|
//! | 1     | 64    | 7                                    |
//! | 2     | 256   | 15                                   |
//! | 4     | 1024  | 31                                   |
//! | 8     | 4096  | 63                                   |
//!
//! In general the exact degree is `8L − 1`. Because the polar split sits on
//! the equator of the rule's pole, integrands that are smooth on each
//! hemisphere about the pole (cosine lobes, hemisphere indicators) are
//! integrated to Gauss accuracy as well.
//!
//! Nodes are stored in antipodal pairs `[u₀, −u₀, u₁, −u₁, …]` with equal
//! weights, and the antipode is produced by exact negation, so odd
//! integrands cancel to rounding.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Rotation3, Unit, Vector3};

use crate::error::{check_finite, Location, RadfluxError, Result};
use crate::numeric::{gauss_legendre_on, pairwise_sum};

pub const FOUR_PI: f64 = 4.0 * PI;

/// Level used when none is requested: 1024 nodes, exact through degree 31.
pub const DEFAULT_LEVEL: usize = 4;

/// Tolerance on `‖u‖ − 1` accepted for a direction.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// A unit vector; used both for radiation directions and surface normals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(Vector3<f64>);

impl Direction {
    /// Normalizes `v`. Vectors whose norm lies outside `[0.5, 2]` are
    /// rejected rather than silently rescaled.
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || !(0.5..=2.0).contains(&norm) {
            return Err(RadfluxError::InvalidArgument(format!(
                "direction ({}, {}, {}) has norm {norm}, expected a unit vector",
                v.x, v.y, v.z
            )));
        }
        Ok(Direction(v / norm))
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalize(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(RadfluxError::InvalidArgument(format!(
                "cannot normalize vector ({}, {}, {})",
                v.x, v.y, v.z
            )));
        }
        Ok(Direction(v / norm))
    }

    pub fn from_components(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vector3::new(x, y, z))
    }

    pub(crate) fn from_unit_unchecked(v: Vector3<f64>) -> Self {
        debug_assert!((v.norm() - 1.0).abs() <= UNIT_TOLERANCE);
        Direction(v)
    }

    pub fn x_axis() -> Self {
        Direction(Vector3::x())
    }

    pub fn y_axis() -> Self {
        Direction(Vector3::y())
    }

    pub fn z_axis() -> Self {
        Direction(Vector3::z())
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn into_vector(self) -> Vector3<f64> {
        self.0
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.0.dot(&other.0)
    }

    /// Angle to `other` in `[0, π]`, accurate near 0 and π.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        self.0.cross(&other.0).norm().atan2(self.0.dot(&other.0))
    }

    pub fn antipode(&self) -> Direction {
        Direction(-self.0)
    }

    /// Component-wise equality within [`UNIT_TOLERANCE`]; the atom
    /// coincidence test.
    pub fn coincides(&self, other: &Direction) -> bool {
        (self.0 - other.0).amax() <= UNIT_TOLERANCE
    }
}

impl std::ops::Index<usize> for Direction {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::Neg for Direction {
    type Output = Direction;

    fn neg(self) -> Direction {
        self.antipode()
    }
}

/// Antipodally symmetric product quadrature on S².
#[derive(Debug, Clone)]
pub struct SphericalQuadrature {
    nodes: Vec<Direction>,
    weights: Vec<f64>,
    level: usize,
    pole: Direction,
}

impl SphericalQuadrature {
    /// Rule of the given level with its pole on the z axis.
    pub fn new(level: usize) -> Result<Self> {
        Self::with_pole(level, Direction::z_axis())
    }

    /// Rule of the given level rotated so its pole is `pole`.
    ///
    /// Hemisphere and cap integrals about `pole` then enjoy the polar
    /// split of the rule.
    pub fn with_pole(level: usize, pole: Direction) -> Result<Self> {
        if level < 1 {
            return Err(RadfluxError::InvalidArgument(format!(
                "quadrature level must be >= 1, got {level}"
            )));
        }
        let n_polar = 4 * level;
        let n_azimuth = 8 * level;
        let (z, wz) = gauss_legendre_on(n_polar, 0.0, 1.0);
        let dphi = 2.0 * PI / n_azimuth as f64;

        let rotation = pole_rotation(&pole);
        let mut nodes = Vec::with_capacity(2 * n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(2 * n_polar * n_azimuth);
        for (zi, wi) in z.iter().zip(&wz) {
            let s = (1.0 - zi * zi).sqrt();
            for k in 0..n_azimuth {
                let phi = (k as f64 + 0.5) * dphi;
                let local = Vector3::new(s * phi.cos(), s * phi.sin(), *zi);
                let v = match &rotation {
                    Some(r) => r * local,
                    None => local,
                };
                let v = v / v.norm();
                let w = wi * dphi;
                nodes.push(Direction(v));
                weights.push(w);
                nodes.push(Direction(-v));
                weights.push(w);
            }
        }
        Ok(SphericalQuadrature {
            nodes,
            weights,
            level,
            pole,
        })
    }

    pub fn nodes(&self) -> &[Direction] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn pole(&self) -> &Direction {
        &self.pole
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest total degree of spherical polynomial integrated exactly.
    pub fn exact_degree(&self) -> usize {
        8 * self.level - 1
    }

    /// Whether two rules have identical nodes (same level and pole).
    pub fn same_grid(&self, other: &SphericalQuadrature) -> bool {
        std::ptr::eq(self, other) || (self.level == other.level && self.pole == other.pole)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Direction, f64)> {
        self.nodes.iter().zip(self.weights.iter().copied())
    }
}

fn pole_rotation(pole: &Direction) -> Option<Rotation3<f64>> {
    let z = Vector3::z();
    if pole.0 == z {
        return None;
    }
    Some(
        Rotation3::rotation_between(&z, &pole.0)
            .unwrap_or_else(|| Rotation3::from_axis_angle(&Unit::new_unchecked(Vector3::x()), PI)),
    )
}

/// `build_quadrature(level)`.
pub fn build_quadrature(level: usize) -> Result<SphericalQuadrature> {
    SphericalQuadrature::new(level)
}

/// `Σₖ wₖ f(uₖ)`, summed pairwise in node order.
pub fn integrate_sphere<F>(f: F, quad: &SphericalQuadrature) -> Result<f64>
where
    F: Fn(&Direction) -> f64,
{
    let mut terms = Vec::with_capacity(quad.len());
    for (u, w) in quad.iter() {
        let value = check_finite("sphere integrand", Location::Direction(u.0), f(u))?;
        terms.push(w * value);
    }
    Ok(pairwise_sum(&terms))
}

/// Integral restricted to the nodes inside `subset`.
pub fn integrate_subset<F>(f: F, quad: &SphericalQuadrature, subset: &SphereSubset) -> Result<f64>
where
    F: Fn(&Direction) -> f64,
{
    if matches!(subset, SphereSubset::Full) {
        return integrate_sphere(f, quad);
    }
    integrate_sphere(|u| if subset.contains(u) { f(u) } else { 0.0 }, quad)
}

/// Componentwise integral of a vector-valued integrand.
pub fn integrate_sphere_vec3<F>(f: F, quad: &SphericalQuadrature) -> Result<Vector3<f64>>
where
    F: Fn(&Direction) -> Vector3<f64>,
{
    let mut xs = Vec::with_capacity(quad.len());
    let mut ys = Vec::with_capacity(quad.len());
    let mut zs = Vec::with_capacity(quad.len());
    for (u, w) in quad.iter() {
        let v = f(u);
        for k in 0..3 {
            check_finite("sphere integrand", Location::Direction(u.0), v[k])?;
        }
        xs.push(w * v.x);
        ys.push(w * v.y);
        zs.push(w * v.z);
    }
    Ok(Vector3::new(
        pairwise_sum(&xs),
        pairwise_sum(&ys),
        pairwise_sum(&zs),
    ))
}

pub type DirectionPredicate = Arc<dyn Fn(&Direction) -> bool + Send + Sync>;

/// A Borel subset of the sphere.
///
/// Caps and hemispheres carry analytic solid angles. Predicate subsets are
/// only resolved at node resolution: their measure is the weight of the
/// quadrature nodes for which the predicate holds.
#[derive(Clone)]
pub enum SphereSubset {
    Full,
    Hemisphere(Direction),
    Cap { axis: Direction, half_angle: f64 },
    Predicate(DirectionPredicate),
}

impl SphereSubset {
    pub fn hemisphere(axis: Direction) -> Self {
        SphereSubset::Hemisphere(axis)
    }

    pub fn cap(axis: Direction, half_angle: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&half_angle) {
            return Err(RadfluxError::InvalidArgument(format!(
                "cap half-angle {half_angle} outside [0, π]"
            )));
        }
        Ok(SphereSubset::Cap { axis, half_angle })
    }

    pub fn predicate<F>(f: F) -> Self
    where
        F: Fn(&Direction) -> bool + Send + Sync + 'static,
    {
        SphereSubset::Predicate(Arc::new(f))
    }

    /// Membership; points on a cap boundary (within 1e-12 in `u·axis`)
    /// count as inside.
    pub fn contains(&self, u: &Direction) -> bool {
        match self {
            SphereSubset::Full => true,
            SphereSubset::Hemisphere(axis) => u.dot(axis) >= -UNIT_TOLERANCE,
            SphereSubset::Cap { axis, half_angle } => {
                u.dot(axis) >= half_angle.cos() - UNIT_TOLERANCE
            }
            SphereSubset::Predicate(p) => p(u),
        }
    }
}

impl fmt::Debug for SphereSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SphereSubset::Full => write!(f, "Full"),
            SphereSubset::Hemisphere(a) => f.debug_tuple("Hemisphere").field(a).finish(),
            SphereSubset::Cap { axis, half_angle } => f
                .debug_struct("Cap")
                .field("axis", axis)
                .field("half_angle", half_angle)
                .finish(),
            SphereSubset::Predicate(_) => write!(f, "Predicate(..)"),
        }
    }
}

/// Solid angle `ω(D)` in steradians.
pub fn solid_angle(subset: &SphereSubset, quad: &SphericalQuadrature) -> f64 {
    match subset {
        SphereSubset::Full => FOUR_PI,
        SphereSubset::Hemisphere(_) => 2.0 * PI,
        SphereSubset::Cap { half_angle, .. } => 2.0 * PI * (1.0 - half_angle.cos()),
        SphereSubset::Predicate(p) => {
            let inside: Vec<f64> = quad
                .iter()
                .map(|(u, w)| if p(u) { w } else { 0.0 })
                .collect();
            pairwise_sum(&inside)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(level: usize) -> SphericalQuadrature {
        build_quadrature(level).unwrap()
    }

    #[test]
    fn level_zero_is_rejected() {
        assert!(matches!(
            build_quadrature(0),
            Err(RadfluxError::InvalidArgument(_))
        ));
    }

    #[test]
    fn weights_sum_to_four_pi_and_are_positive() {
        for level in 1..=6 {
            let q = quad(level);
            assert!(q.weights().iter().all(|w| *w > 0.0));
            assert!((pairwise_sum(q.weights()) - FOUR_PI).abs() < 1e-10);
            for u in q.nodes() {
                assert!((u.as_vector().norm() - 1.0).abs() < UNIT_TOLERANCE);
            }
        }
    }

    #[test]
    fn node_count_grows_with_level() {
        let counts: Vec<usize> = (1..=5).map(|l| quad(l).len()).collect();
        assert_eq!(counts, vec![64, 256, 576, 1024, 1600]);
    }

    #[test]
    fn nodes_come_in_antipodal_pairs() {
        let q = SphericalQuadrature::with_pole(3, Direction::normalize(Vector3::new(1.0, 2.0, -0.5)).unwrap())
            .unwrap();
        for pair in q.nodes().chunks(2) {
            assert_eq!(pair[0].as_vector(), &(-pair[1].as_vector()));
        }
        for pair in q.weights().chunks(2) {
            assert_eq!(pair[0], pair[1]);
        }
    }

    #[test]
    fn constant_and_odd_integrands() {
        let q = quad(2);
        assert!((integrate_sphere(|_| 1.0, &q).unwrap() - 12.566370614359172).abs() < 1e-10);
        assert!(integrate_sphere(|u| u[2], &q).unwrap().abs() < 1e-12);
        assert_eq!(integrate_sphere(|_| 0.0, &q).unwrap(), 0.0);
    }

    #[test]
    fn clamped_cosine_integrates_to_pi() {
        let q = quad(1);
        let v = integrate_sphere(|u| u[2].max(0.0), &q).unwrap();
        assert!((v - PI).abs() < 1e-6);
    }

    #[test]
    fn squared_projection_integrates_to_four_pi_over_three() {
        let a = Direction::from_components(0.3, -0.4, 0.866).unwrap();
        let q = quad(2);
        let v = integrate_sphere(|u| u.dot(&a).powi(2), &q).unwrap();
        assert!((v - FOUR_PI / 3.0).abs() < 1e-8);
    }

    #[test]
    fn non_finite_integrand_reports_node() {
        let q = quad(1);
        let err = integrate_sphere(|u| if u[2] > 0.9 { f64::NAN } else { 1.0 }, &q).unwrap_err();
        match err {
            RadfluxError::Evaluation {
                location: Location::Direction(u),
                ..
            } => assert!(u.z > 0.9),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn solid_angles_of_standard_subsets() {
        let q = quad(2);
        let z = Direction::z_axis();
        assert_eq!(solid_angle(&SphereSubset::Full, &q), FOUR_PI);
        assert!((solid_angle(&SphereSubset::hemisphere(z), &q) - 2.0 * PI).abs() < 1e-15);
        let cap = SphereSubset::cap(z, PI / 3.0).unwrap();
        assert!((solid_angle(&cap, &q) - PI).abs() < 1e-12);
        let upper = SphereSubset::predicate(|u| u[2] > 0.0);
        assert!((solid_angle(&upper, &q) - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn cap_rejects_bad_half_angle() {
        assert!(SphereSubset::cap(Direction::z_axis(), -0.1).is_err());
        assert!(SphereSubset::cap(Direction::z_axis(), 3.2).is_err());
    }

    #[test]
    fn direction_constructor_bounds() {
        assert!(Direction::new(Vector3::new(0.0, 0.0, 1.5)).is_ok());
        assert!(Direction::new(Vector3::new(0.0, 0.0, 0.4)).is_err());
        assert!(Direction::new(Vector3::new(0.0, 3.0, 0.0)).is_err());
        assert!(Direction::new(Vector3::new(f64::NAN, 0.0, 1.0)).is_err());
        let d = Direction::new(Vector3::new(1.0, 1.0, 0.0)).unwrap();
        assert!((d.as_vector().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_points_count_as_inside_cap() {
        let z = Direction::z_axis();
        let cap = SphereSubset::cap(z, PI / 2.0).unwrap();
        assert!(cap.contains(&Direction::x_axis()));
        assert!(SphereSubset::hemisphere(z).contains(&Direction::y_axis()));
        assert!(!cap.contains(&-z));
    }
}
