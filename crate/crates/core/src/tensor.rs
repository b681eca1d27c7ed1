//! Measure-valued radiance tensors `x ↦ (𝕀₁, 𝕀₂, 𝕀₃)(x)`.
//!
//! A tensor lives on one quadrature grid for all `x`. Its flux measure
//! through a surface element of normal `n` is `𝕀(n) = Σⱼ nⱼ 𝕀ⱼ`.
//! Conforming tensors are built from a scalar measure `μ_x` as
//! `𝕀 = ι ⊙ μ_x` with `ι` the identity map of the sphere, so that
//! `𝕀(n) = (u ↦ u·n) ⊙ μ_x`; general tensors may violate that.

use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::error::{RadfluxError, Result};
use crate::measure::{
    decompose, measure_of, multiply, pair, Atom, SphereMeasure, UnitValue, VectorSphereMeasure,
};
use crate::radiance::ScalarRadianceField;
use crate::region::{Point, Region};
use crate::sphere::{Direction, SphereSubset, SphericalQuadrature};

pub type MeasureFn = Arc<dyn Fn(&Point) -> Result<SphereMeasure> + Send + Sync>;
pub type VectorMeasureFn = Arc<dyn Fn(&Point) -> Result<VectorSphereMeasure> + Send + Sync>;
pub type WeightFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

#[derive(Clone)]
enum TensorKind {
    /// `𝕀 = ι ⊙ μ_x`.
    Conforming(MeasureFn),
    /// `𝕀ⱼ = (u ↦ (M u)ⱼ) ⊙ μ_x`.
    Mapped(Matrix3<f64>, MeasureFn),
    General(VectorMeasureFn),
}

#[derive(Clone)]
pub struct RadianceTensor {
    quad: Arc<SphericalQuadrature>,
    kind: TensorKind,
}

impl std::fmt::Debug for RadianceTensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.kind {
            TensorKind::Conforming(_) => "conforming",
            TensorKind::Mapped(..) => "mapped",
            TensorKind::General(_) => "general",
        };
        f.debug_struct("RadianceTensor")
            .field("kind", &kind)
            .field("level", &self.quad.level())
            .finish()
    }
}

impl RadianceTensor {
    /// Conforming tensor from a nonnegative scalar measure `μ_x`.
    pub fn conforming<F>(quad: Arc<SphericalQuadrature>, mu: F) -> Self
    where
        F: Fn(&Point) -> Result<SphereMeasure> + Send + Sync + 'static,
    {
        RadianceTensor {
            quad,
            kind: TensorKind::Conforming(Arc::new(mu)),
        }
    }

    /// Conforming tensor whose `μ_x` has density `i_u(x)`.
    pub fn conforming_from_field(quad: Arc<SphericalQuadrature>, field: ScalarRadianceField) -> Self {
        let q = quad.clone();
        Self::conforming(quad, move |x| {
            SphereMeasure::from_density_fn(q.clone(), |u| field.eval(x, u))
        })
    }

    /// Conforming tensor whose `μ_x` is a sum of atoms with
    /// position-dependent weights.
    pub fn conforming_from_atoms(
        quad: Arc<SphericalQuadrature>,
        atoms: Vec<(Direction, WeightFn)>,
    ) -> Self {
        let q = quad.clone();
        Self::conforming(quad, move |x| {
            SphereMeasure::new(
                q.clone(),
                vec![0.0; q.len()],
                atoms.iter().map(|(d, w)| Atom::new(*d, w(x))),
            )
        })
    }

    /// `𝕀ⱼ = (u ↦ (M u)ⱼ) ⊙ μ_x`; conforming when `M` is the identity.
    pub fn mapped<F>(quad: Arc<SphericalQuadrature>, map: Matrix3<f64>, mu: F) -> Self
    where
        F: Fn(&Point) -> Result<SphereMeasure> + Send + Sync + 'static,
    {
        RadianceTensor {
            quad,
            kind: TensorKind::Mapped(map, Arc::new(mu)),
        }
    }

    pub fn general<F>(quad: Arc<SphericalQuadrature>, components: F) -> Self
    where
        F: Fn(&Point) -> Result<VectorSphereMeasure> + Send + Sync + 'static,
    {
        RadianceTensor {
            quad,
            kind: TensorKind::General(Arc::new(components)),
        }
    }

    pub fn zero(quad: Arc<SphericalQuadrature>) -> Self {
        let q = quad.clone();
        Self::conforming(quad, move |_| Ok(SphereMeasure::zero(q.clone())))
    }

    pub fn quadrature(&self) -> &Arc<SphericalQuadrature> {
        &self.quad
    }

    pub fn is_conforming(&self) -> bool {
        matches!(self.kind, TensorKind::Conforming(_))
    }

    fn scalar_measure(&self, f: &MeasureFn, x: &Point) -> Result<SphereMeasure> {
        let mu = f(x)?;
        if !self.quad.same_grid(mu.quadrature()) {
            return Err(RadfluxError::GridMismatch);
        }
        Ok(mu)
    }

    /// The component triple `𝕀(x)`.
    pub fn eval(&self, x: &Point) -> Result<VectorSphereMeasure> {
        let v = match &self.kind {
            TensorKind::Conforming(f) => {
                VectorSphereMeasure::from_vector_multiplier(|u| *u.as_vector(), &self.scalar_measure(f, x)?)?
            }
            TensorKind::Mapped(m, f) => {
                VectorSphereMeasure::from_vector_multiplier(|u| m * u.as_vector(), &self.scalar_measure(f, x)?)?
            }
            TensorKind::General(f) => f(x)?,
        };
        if !self.quad.same_grid(v.quadrature()) {
            return Err(RadfluxError::GridMismatch);
        }
        Ok(v)
    }

    /// `𝕀(x)(v) = Σⱼ vⱼ 𝕀ⱼ(x)` for any vector `v`.
    pub fn apply_to_vector(&self, x: &Point, v: &Vector3<f64>) -> Result<SphereMeasure> {
        match &self.kind {
            TensorKind::Conforming(f) => {
                multiply(|u| u.as_vector().dot(v), &self.scalar_measure(f, x)?)
            }
            TensorKind::Mapped(m, f) => {
                let mt = m.transpose() * v;
                multiply(|u| u.as_vector().dot(&mt), &self.scalar_measure(f, x)?)
            }
            TensorKind::General(_) => Ok(self.eval(x)?.contract(v)),
        }
    }
}

/// Flux measure `J(x, n) = 𝕀(x)(n)` through a surface element of normal
/// `n`. For conforming tensors this is `(u ↦ u·n) ⊙ μ_x`.
pub fn apply_to_normal(t: &RadianceTensor, x: &Point, n: &Direction) -> Result<SphereMeasure> {
    t.apply_to_vector(x, n.as_vector())
}

/// `J(x, n)(D)`.
pub fn radiance_measure_of(
    t: &RadianceTensor,
    x: &Point,
    n: &Direction,
    subset: &SphereSubset,
) -> Result<f64> {
    Ok(measure_of(&apply_to_normal(t, x, n)?, subset))
}

/// The total `Φ_R`, a measure in power per steradian.
#[derive(Debug, Clone)]
pub struct TotalDistribution {
    pub measure: SphereMeasure,
}

/// `Φ_R = ∫_{∂R} 𝕀(x)(n(x)) dA`. Samples are evaluated in parallel, then
/// accumulated support point by support point in boundary-sample order.
pub fn total_distribution(t: &RadianceTensor, region: &Region) -> Result<TotalDistribution> {
    let quad = t.quadrature().clone();
    let mut density = vec![0.0; quad.len()];
    let mut atoms: Vec<Atom> = Vec::new();
    let samples = region.boundary_samples();
    let per_sample: Vec<SphereMeasure> = samples
        .par_iter()
        .map(|s| apply_to_normal(t, &s.point, &s.normal))
        .collect::<Result<_>>()?;
    for (s, j) in samples.iter().zip(&per_sample) {
        for (acc, rho) in density.iter_mut().zip(j.density()) {
            *acc += s.area_weight * rho;
        }
        for a in j.atoms() {
            let w = s.area_weight * a.weight;
            match atoms.iter_mut().find(|b| b.direction.coincides(&a.direction)) {
                Some(b) => b.weight += w,
                None => atoms.push(Atom::new(a.direction, w)),
            }
        }
    }
    Ok(TotalDistribution {
        measure: SphereMeasure::new(quad, density, atoms)?,
    })
}

/// `P_R = Φ_R(S²)`.
pub fn total_power_from_distribution(phi: &TotalDistribution) -> f64 {
    pair(&phi.measure, |_| 1.0).expect("constant test function is finite")
}

/// `q(x) = 𝕀(x)(S²)`.
pub fn energy_flux_vector_measure(t: &RadianceTensor, x: &Point) -> Result<Vector3<f64>> {
    let v = t.eval(x)?;
    Ok(Vector3::from_fn(|j, _| measure_of(&v.component(j), &SphereSubset::Full)))
}

pub const DEFAULT_ASSUMPTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiationAssumptionReport {
    /// Largest angle between `Î(u)` and `u` over nonzero support points.
    pub max_angular_deviation: f64,
    /// Largest `|‖Î(u)‖ − 1|` over nonzero support points.
    pub unit_norm_residual: f64,
    pub checked_points: usize,
    pub pass: bool,
}

/// Checks `Î(x)(u) = u` on the support of `|𝕀(x)|`. Points of zero
/// magnitude are skipped; with none left the check passes vacuously.
pub fn verify_radiation_assumption(
    t: &RadianceTensor,
    x: &Point,
    tol: f64,
) -> Result<RadiationAssumptionReport> {
    let v = t.eval(x)?;
    let dec = decompose(&v);
    let mut max_angle: f64 = 0.0;
    let mut max_norm: f64 = 0.0;
    let mut checked = 0;
    let nodes = v.quadrature().nodes().iter().zip(&dec.node_units);
    let atoms = dec.atom_directions.iter().zip(&dec.atom_units);
    for (u, unit) in nodes.chain(atoms) {
        if let UnitValue::Unit(w) = unit {
            let angle = w.cross(u.as_vector()).norm().atan2(w.dot(u.as_vector()));
            max_angle = max_angle.max(angle);
            max_norm = max_norm.max((w.norm() - 1.0).abs());
            checked += 1;
        }
    }
    Ok(RadiationAssumptionReport {
        max_angular_deviation: max_angle,
        unit_norm_residual: max_norm,
        checked_points: checked,
        pass: max_angle <= tol && max_norm <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::norm;
    use std::f64::consts::PI;

    fn grid() -> Arc<SphericalQuadrature> {
        Arc::new(SphericalQuadrature::new(3).unwrap())
    }

    fn atom_tensor(weight: f64) -> RadianceTensor {
        RadianceTensor::conforming_from_atoms(
            grid(),
            vec![(Direction::z_axis(), Arc::new(move |_: &Point| weight) as WeightFn)],
        )
    }

    #[test]
    fn atom_flux_follows_cosine() {
        let t = atom_tensor(2.5);
        let x = Point::origin();
        let j = apply_to_normal(&t, &x, &Direction::z_axis()).unwrap();
        assert_eq!(j.atoms()[0].weight, 2.5);
        let n = Direction::from_components((PI / 3.0).sin(), 0.0, 0.5).unwrap();
        let j = apply_to_normal(&t, &x, &n).unwrap();
        assert!((j.atoms()[0].weight - 1.25).abs() < 1e-15);
    }

    #[test]
    fn isotropic_density_has_zero_net_flux() {
        let q = grid();
        let t = RadianceTensor::conforming_from_field(q, ScalarRadianceField::isotropic(3.0).unwrap());
        let n = Direction::normalize(Vector3::new(0.2, 0.5, -1.0)).unwrap();
        let j = apply_to_normal(&t, &Point::origin(), &n).unwrap();
        assert!(pair(&j, |_| 1.0).unwrap().abs() < 1e-12);
        assert!(energy_flux_vector_measure(&t, &Point::origin()).unwrap().norm() < 1e-12);
    }

    #[test]
    fn radiance_measure_of_caps() {
        let t = atom_tensor(2.5);
        let x = Point::origin();
        let z = Direction::z_axis();
        let inside = SphereSubset::cap(z, 0.2).unwrap();
        let outside = SphereSubset::cap(Direction::x_axis(), 0.2).unwrap();
        assert_eq!(radiance_measure_of(&t, &x, &z, &inside).unwrap(), 2.5);
        assert_eq!(radiance_measure_of(&t, &x, &z, &outside).unwrap(), 0.0);
        let dense = RadianceTensor::conforming_from_field(grid(), ScalarRadianceField::isotropic(1.0).unwrap());
        let v = radiance_measure_of(&dense, &x, &z, &SphereSubset::hemisphere(z)).unwrap();
        assert!((v - PI).abs() < 1e-6);
    }

    #[test]
    fn flux_vector_of_atom_and_hemisphere() {
        let q = energy_flux_vector_measure(&atom_tensor(2.5), &Point::origin()).unwrap();
        assert_eq!(q, Vector3::new(0.0, 0.0, 2.5));
        let hemi = RadianceTensor::conforming_from_field(
            grid(),
            ScalarRadianceField::lambert_surface(1.0, Direction::z_axis()).unwrap(),
        );
        let q = energy_flux_vector_measure(&hemi, &Point::origin()).unwrap();
        assert!((q - Vector3::new(0.0, 0.0, PI)).norm() < 1e-6);
    }

    #[test]
    fn totals_of_uniform_and_zero_tensors_vanish() {
        let cube = Region::unit_cube();
        let t = RadianceTensor::conforming_from_field(grid(), ScalarRadianceField::isotropic(1.0).unwrap());
        let phi = total_distribution(&t, &cube).unwrap();
        assert!(norm(&phi.measure) < 1e-10);
        let z = total_distribution(&RadianceTensor::zero(grid()), &cube).unwrap();
        assert!(z.measure.is_zero());
        assert_eq!(total_power_from_distribution(&z), 0.0);
    }

    #[test]
    fn radiation_assumption_reports() {
        let x = Point::new(0.1, 0.2, 0.3);
        let conforming = RadianceTensor::conforming_from_field(
            grid(),
            ScalarRadianceField::linear(2.0, Vector3::new(0.5, -0.3, 0.1)).unwrap(),
        );
        let r = verify_radiation_assumption(&conforming, &x, DEFAULT_ASSUMPTION_TOLERANCE).unwrap();
        assert!(r.pass);
        assert!(r.max_angular_deviation <= 1e-12);

        let q = grid();
        let rot = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        let qq = q.clone();
        let rotated = RadianceTensor::mapped(q, rot, move |_| SphereMeasure::atom(qq.clone(), Direction::x_axis(), 1.0));
        let r = verify_radiation_assumption(&rotated, &x, 1e-6).unwrap();
        assert!(!r.pass);
        assert!((r.max_angular_deviation - PI / 2.0).abs() < 1e-12);

        let r = verify_radiation_assumption(&RadianceTensor::zero(grid()), &x, 1e-9).unwrap();
        assert!(r.pass);
        assert_eq!(r.checked_points, 0);
    }

    #[test]
    fn foreign_grid_is_a_mismatch() {
        let other = Arc::new(SphericalQuadrature::new(1).unwrap());
        let t = RadianceTensor::conforming(grid(), move |_| Ok(SphereMeasure::zero(other.clone())));
        assert_eq!(
            apply_to_normal(&t, &Point::origin(), &Direction::z_axis()).unwrap_err(),
            RadfluxError::GridMismatch
        );
    }
}
