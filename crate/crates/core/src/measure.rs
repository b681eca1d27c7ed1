//! Borel measures on the sphere as finite objects.
//!
//! A [`SphereMeasure`] is an absolutely continuous part, stored as density
//! samples at the nodes of a [`SphericalQuadrature`], plus a finite list of
//! Dirac atoms. The representation is closed under linear combination and
//! under multiplication by continuous functions, which is all the radiance
//! tensor machinery needs.

use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{check_finite, Location, RadfluxError, Result};
use crate::numeric::pairwise_sum;
use crate::sphere::{Direction, SphereSubset, SphericalQuadrature};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub direction: Direction,
    pub weight: f64,
}

impl Atom {
    pub fn new(direction: Direction, weight: f64) -> Self {
        Atom { direction, weight }
    }
}

/// Density samples on a quadrature grid plus Dirac atoms.
///
/// Atom directions are kept pairwise distinct: atoms whose directions
/// coincide within 1e-12 are merged by summing weights, and atoms whose
/// merged weight is exactly zero are dropped.
#[derive(Debug, Clone)]
pub struct SphereMeasure {
    quad: Arc<SphericalQuadrature>,
    density: Vec<f64>,
    atoms: Vec<Atom>,
}

impl SphereMeasure {
    pub fn new(
        quad: Arc<SphericalQuadrature>,
        density: Vec<f64>,
        atoms: impl IntoIterator<Item = Atom>,
    ) -> Result<Self> {
        if density.len() != quad.len() {
            return Err(RadfluxError::InvalidArgument(format!(
                "density has {} samples but the grid has {} nodes",
                density.len(),
                quad.len()
            )));
        }
        for (u, rho) in quad.nodes().iter().zip(&density) {
            check_finite("measure density", Location::Direction(*u.as_vector()), *rho)?;
        }
        let mut merged: Vec<Atom> = Vec::new();
        for atom in atoms {
            check_finite(
                "atom weight",
                Location::Direction(*atom.direction.as_vector()),
                atom.weight,
            )?;
            push_merged(&mut merged, atom);
        }
        merged.retain(|a| a.weight != 0.0);
        Ok(SphereMeasure {
            quad,
            density,
            atoms: merged,
        })
    }

    pub fn zero(quad: Arc<SphericalQuadrature>) -> Self {
        let n = quad.len();
        SphereMeasure {
            quad,
            density: vec![0.0; n],
            atoms: Vec::new(),
        }
    }

    /// Absolutely continuous measure with density `f` sampled at the nodes.
    pub fn from_density_fn<F>(quad: Arc<SphericalQuadrature>, f: F) -> Result<Self>
    where
        F: Fn(&Direction) -> f64,
    {
        let density = quad.nodes().iter().map(&f).collect();
        Self::new(quad, density, [])
    }

    pub fn uniform(quad: Arc<SphericalQuadrature>, value: f64) -> Result<Self> {
        let n = quad.len();
        Self::new(quad, vec![value; n], [])
    }

    pub fn atom(quad: Arc<SphericalQuadrature>, direction: Direction, weight: f64) -> Result<Self> {
        let n = quad.len();
        Self::new(quad, vec![0.0; n], [Atom::new(direction, weight)])
    }

    pub fn quadrature(&self) -> &Arc<SphericalQuadrature> {
        &self.quad
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.density.iter().all(|d| *d == 0.0)
    }

    pub fn same_grid(&self, other: &SphereMeasure) -> bool {
        Arc::ptr_eq(&self.quad, &other.quad) || self.quad.same_grid(&other.quad)
    }

    /// Weight of the atom at `direction`, or zero.
    pub fn atom_weight_at(&self, direction: &Direction) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.direction.coincides(direction))
            .map_or(0.0, |a| a.weight)
    }

    pub fn scaled(&self, factor: f64) -> Result<SphereMeasure> {
        SphereMeasure::new(
            self.quad.clone(),
            self.density.iter().map(|d| factor * d).collect(),
            self.atoms
                .iter()
                .map(|a| Atom::new(a.direction, factor * a.weight)),
        )
    }
}

fn push_merged(atoms: &mut Vec<Atom>, atom: Atom) {
    match atoms
        .iter_mut()
        .find(|a| a.direction.coincides(&atom.direction))
    {
        Some(existing) => existing.weight += atom.weight,
        None => atoms.push(atom),
    }
}

/// `∫ v dμ = Σₖ wₖ ρₖ v(uₖ) + Σᵢ aᵢ v(uᵢ)`.
pub fn pair<F>(mu: &SphereMeasure, v: F) -> Result<f64>
where
    F: Fn(&Direction) -> f64,
{
    let mut terms = Vec::with_capacity(mu.density.len());
    for ((u, w), rho) in mu.quad.iter().zip(&mu.density) {
        let value = check_finite("test function", Location::Direction(*u.as_vector()), v(u))?;
        terms.push(w * rho * value);
    }
    let smooth = pairwise_sum(&terms);
    let mut atomic = Vec::with_capacity(mu.atoms.len());
    for a in &mu.atoms {
        let value = check_finite(
            "test function",
            Location::Direction(*a.direction.as_vector()),
            v(&a.direction),
        )?;
        atomic.push(a.weight * value);
    }
    Ok(smooth + pairwise_sum(&atomic))
}

/// `μ(D)`. The density part is resolved at node resolution.
pub fn measure_of(mu: &SphereMeasure, subset: &SphereSubset) -> f64 {
    let smooth: Vec<f64> = mu
        .quad
        .iter()
        .zip(&mu.density)
        .map(|((u, w), rho)| if subset.contains(u) { w * rho } else { 0.0 })
        .collect();
    let atomic: Vec<f64> = mu
        .atoms
        .iter()
        .map(|a| if subset.contains(&a.direction) { a.weight } else { 0.0 })
        .collect();
    pairwise_sum(&smooth) + pairwise_sum(&atomic)
}

/// Total variation norm `Σₖ wₖ|ρₖ| + Σᵢ |aᵢ|`, which realizes the supremum
/// of `|pair(μ, v)|` over test functions with `|v| ≤ 1` for this
/// representation.
pub fn norm(mu: &SphereMeasure) -> f64 {
    let smooth: Vec<f64> = mu
        .quad
        .weights()
        .iter()
        .zip(&mu.density)
        .map(|(w, rho)| w * rho.abs())
        .collect();
    let atomic: Vec<f64> = mu.atoms.iter().map(|a| a.weight.abs()).collect();
    pairwise_sum(&smooth) + pairwise_sum(&atomic)
}

/// `a·μ + b·ν` on a shared grid.
pub fn combine(a: f64, mu: &SphereMeasure, b: f64, nu: &SphereMeasure) -> Result<SphereMeasure> {
    if !mu.same_grid(nu) {
        return Err(RadfluxError::GridMismatch);
    }
    let density = mu
        .density
        .iter()
        .zip(&nu.density)
        .map(|(x, y)| a * x + b * y)
        .collect();
    let atoms = mu
        .atoms
        .iter()
        .map(|at| Atom::new(at.direction, a * at.weight))
        .chain(nu.atoms.iter().map(|at| Atom::new(at.direction, b * at.weight)));
    SphereMeasure::new(mu.quad.clone(), density, atoms)
}

/// `φ ⊙ μ`, defined by `(φ ⊙ μ)(f) = μ(φ f)`.
pub fn multiply<F>(phi: F, mu: &SphereMeasure) -> Result<SphereMeasure>
where
    F: Fn(&Direction) -> f64,
{
    let mut density = Vec::with_capacity(mu.density.len());
    for (u, rho) in mu.quad.nodes().iter().zip(&mu.density) {
        let value = check_finite("multiplier", Location::Direction(*u.as_vector()), phi(u))?;
        density.push(value * rho);
    }
    let mut atoms = Vec::with_capacity(mu.atoms.len());
    for a in &mu.atoms {
        let value = check_finite(
            "multiplier",
            Location::Direction(*a.direction.as_vector()),
            phi(&a.direction),
        )?;
        atoms.push(Atom::new(a.direction, value * a.weight));
    }
    SphereMeasure::new(mu.quad.clone(), density, atoms)
}

/// Three sphere measures on one grid with one shared atom support.
///
/// Components that lack an atom present in another component carry an
/// explicit zero weight there.
#[derive(Debug, Clone)]
pub struct VectorSphereMeasure {
    quad: Arc<SphericalQuadrature>,
    density: [Vec<f64>; 3],
    atom_directions: Vec<Direction>,
    atom_weights: [Vec<f64>; 3],
}

impl VectorSphereMeasure {
    pub fn new(components: [SphereMeasure; 3]) -> Result<Self> {
        let [c0, c1, c2] = &components;
        if !c0.same_grid(c1) || !c0.same_grid(c2) {
            return Err(RadfluxError::GridMismatch);
        }
        let mut atom_directions: Vec<Direction> = Vec::new();
        for c in &components {
            for a in &c.atoms {
                if !atom_directions.iter().any(|d| d.coincides(&a.direction)) {
                    atom_directions.push(a.direction);
                }
            }
        }
        let atom_weights = [0, 1, 2].map(|j| {
            atom_directions
                .iter()
                .map(|d| components[j].atom_weight_at(d))
                .collect::<Vec<_>>()
        });
        let quad = c0.quad.clone();
        let [d0, d1, d2] = components.map(|c| c.density);
        Ok(VectorSphereMeasure {
            quad,
            density: [d0, d1, d2],
            atom_directions,
            atom_weights,
        })
    }

    /// `Vⱼ = (u ↦ f(u)ⱼ) ⊙ μ` for a vector-valued `f`.
    pub fn from_vector_multiplier<F>(f: F, mu: &SphereMeasure) -> Result<Self>
    where
        F: Fn(&Direction) -> Vector3<f64>,
    {
        let components = [
            multiply(|u| f(u)[0], mu)?,
            multiply(|u| f(u)[1], mu)?,
            multiply(|u| f(u)[2], mu)?,
        ];
        Self::new(components)
    }

    pub fn quadrature(&self) -> &Arc<SphericalQuadrature> {
        &self.quad
    }

    pub fn atom_directions(&self) -> &[Direction] {
        &self.atom_directions
    }

    pub fn density(&self, j: usize) -> &[f64] {
        &self.density[j]
    }

    pub fn atom_weights(&self, j: usize) -> &[f64] {
        &self.atom_weights[j]
    }

    pub fn component(&self, j: usize) -> SphereMeasure {
        SphereMeasure::new(
            self.quad.clone(),
            self.density[j].clone(),
            self.atom_directions
                .iter()
                .zip(&self.atom_weights[j])
                .map(|(d, w)| Atom::new(*d, *w)),
        )
        .expect("components are finite by construction")
    }

    /// `Σⱼ nⱼ Vⱼ` for an arbitrary (not necessarily unit) vector `n`.
    pub fn contract(&self, n: &Vector3<f64>) -> SphereMeasure {
        let density = (0..self.quad.len())
            .map(|k| n[0] * self.density[0][k] + n[1] * self.density[1][k] + n[2] * self.density[2][k])
            .collect();
        let atoms = self.atom_directions.iter().enumerate().map(|(i, d)| {
            let w = n[0] * self.atom_weights[0][i]
                + n[1] * self.atom_weights[1][i]
                + n[2] * self.atom_weights[2][i];
            Atom::new(*d, w)
        });
        SphereMeasure::new(self.quad.clone(), density, atoms)
            .expect("contraction of finite components with a finite vector is finite")
    }

    /// Component vector at node `k`.
    pub fn node_vector(&self, k: usize) -> Vector3<f64> {
        Vector3::new(self.density[0][k], self.density[1][k], self.density[2][k])
    }

    /// Component vector at atom `i` of [`Self::atom_directions`].
    pub fn atom_vector(&self, i: usize) -> Vector3<f64> {
        Vector3::new(
            self.atom_weights[0][i],
            self.atom_weights[1][i],
            self.atom_weights[2][i],
        )
    }

    /// Componentwise total mass `(V₁(S²), V₂(S²), V₃(S²))`.
    pub fn total(&self) -> Vector3<f64> {
        Vector3::from_fn(|j, _| measure_of(&self.component(j), &SphereSubset::Full))
    }
}

/// The unit field value at one support point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnitValue {
    Unit(Vector3<f64>),
    /// The magnitude vanishes here; the unit field is undefined.
    Zero,
}

impl UnitValue {
    pub fn vector(&self) -> Vector3<f64> {
        match self {
            UnitValue::Unit(v) => *v,
            UnitValue::Zero => Vector3::zeros(),
        }
    }

    fn of(v: Vector3<f64>) -> (f64, UnitValue) {
        let m = v.norm();
        if m > 0.0 {
            (m, UnitValue::Unit(v / m))
        } else {
            (0.0, UnitValue::Zero)
        }
    }
}

/// Output of [`decompose`]: `V = Î ⊙ |V|` on the shared support.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub magnitude: SphereMeasure,
    pub node_units: Vec<UnitValue>,
    pub atom_directions: Vec<Direction>,
    pub atom_units: Vec<UnitValue>,
}

impl Decomposition {
    /// Rebuilds `Vⱼ = Îⱼ ⊙ |V|` from the parts.
    pub fn multiply_back(&self) -> VectorSphereMeasure {
        let quad = self.magnitude.quadrature().clone();
        let density = [0, 1, 2].map(|j| {
            self.magnitude
                .density()
                .iter()
                .zip(&self.node_units)
                .map(|(m, u)| m * u.vector()[j])
                .collect::<Vec<_>>()
        });
        let atom_weights = [0, 1, 2].map(|j| {
            self.atom_directions
                .iter()
                .zip(&self.atom_units)
                .map(|(d, u)| self.magnitude.atom_weight_at(d) * u.vector()[j])
                .collect::<Vec<_>>()
        });
        VectorSphereMeasure {
            quad,
            density,
            atom_directions: self.atom_directions.clone(),
            atom_weights,
        }
    }
}

/// Pointwise Radon–Nikodym split of a vector measure into the magnitude
/// `|V| = (Σⱼ Vⱼ²)^½` and the unit field `Î = V / |V|`.
///
/// Both are computed per node and per atom on the shared discrete support.
/// Points where the magnitude vanishes get [`UnitValue::Zero`].
pub fn decompose(v: &VectorSphereMeasure) -> Decomposition {
    let (mag_density, node_units): (Vec<f64>, Vec<UnitValue>) = (0..v.quad.len())
        .map(|k| UnitValue::of(v.node_vector(k)))
        .unzip();
    let (mag_atoms, atom_units): (Vec<f64>, Vec<UnitValue>) = (0..v.atom_directions.len())
        .map(|i| UnitValue::of(v.atom_vector(i)))
        .unzip();
    let magnitude = SphereMeasure::new(
        v.quad.clone(),
        mag_density,
        v.atom_directions
            .iter()
            .zip(mag_atoms)
            .map(|(d, w)| Atom::new(*d, w)),
    )
    .expect("norms of finite vectors are finite");
    Decomposition {
        magnitude,
        node_units,
        atom_directions: v.atom_directions.clone(),
        atom_units,
    }
}
