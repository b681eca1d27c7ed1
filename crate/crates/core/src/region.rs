//! Bounded regions of space with oriented boundary samplers and volume
//! rules.
//!
//! Every region exposes two deterministic rules:
//!
//! * a boundary rule, a list of [`FluxSample`]s realizing `∫_{∂R} · dA`;
//! * a volume rule, a list of weighted points realizing `∫_R · dV`.
//!
//! Both refine with the region's `resolution`:
//!
//! | kind        | boundary rule                                   | volume rule                                   |
//! |-------------|-------------------------------------------------|-----------------------------------------------|
//! | box         | r×r cells per face, 3×3 Gauss (degree 5)        | r³ cells, 3×3×3 Gauss (degree 5)              |
//! | ball        | sphere quadrature of level r (degree 8r−1)      | same angular rule × (r+4)-point radial Gauss  |
//! | tetrahedron | r² sub-triangles per face, 3-point (degree 2)   | collapsed Gauss, (r+2)³ points (degree 2r+1)  |
//! | mesh        | r² sub-triangles per face, 3-point (degree 2)   | signed cone decomposition, collapsed Gauss    |
//!
//! All rules integrate affine functions exactly, so the closure identity
//! `Σ n dA = 0` and the Gauss identity for affine fields hold to rounding.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{Point3, Rotation3, Unit, Vector3};

use crate::error::{check_finite, Location, RadfluxError, Result};
use crate::numeric::{
    central_gradient, fd_step, gauss_legendre_on, pairwise_sum, pairwise_sum_vec3,
};
use crate::sphere::{Direction, SphericalQuadrature};

pub type Point = Point3<f64>;

/// One node of a boundary rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSample {
    pub point: Point,
    pub normal: Direction,
    pub area_weight: f64,
}

/// A triangle; counter-clockwise seen from outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle(pub [Point; 3]);

impl Triangle {
    /// Half the cross product of the edges: area times outward normal.
    pub fn area_vector(&self) -> Vector3<f64> {
        let [a, b, c] = self.0;
        0.5 * (b - a).cross(&(c - a))
    }

    pub fn area(&self) -> f64 {
        self.area_vector().norm()
    }

    pub fn centroid(&self) -> Point {
        let [a, b, c] = self.0;
        Point::from((a.coords + b.coords + c.coords) / 3.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegionKind {
    Box { min: Point, max: Point },
    Ball { center: Point, radius: f64 },
    Tetrahedron([Point; 4]),
    Mesh(Arc<Vec<Triangle>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    kind: RegionKind,
    resolution: usize,
}

/// Default boundary resolution per region kind.
pub const DEFAULT_BOX_RESOLUTION: usize = 2;
pub const DEFAULT_BALL_RESOLUTION: usize = 4;
pub const DEFAULT_TETRAHEDRON_RESOLUTION: usize = 2;
pub const DEFAULT_MESH_RESOLUTION: usize = 1;

const TRIANGLE_GAUSS_POINTS: usize = 4;

impl Region {
    pub fn cuboid(min: Point, max: Point) -> Result<Self> {
        if !(min.coords.iter().chain(max.coords.iter()).all(|c| c.is_finite())) {
            return Err(RadfluxError::Geometry("box corners must be finite".into()));
        }
        if (0..3).any(|k| min[k] >= max[k]) {
            return Err(RadfluxError::Geometry(format!(
                "box min {:?} is not below max {:?} componentwise",
                min.coords.as_slice(),
                max.coords.as_slice()
            )));
        }
        Ok(Region {
            kind: RegionKind::Box { min, max },
            resolution: DEFAULT_BOX_RESOLUTION,
        })
    }

    pub fn unit_cube() -> Self {
        Self::cuboid(Point::origin(), Point::new(1.0, 1.0, 1.0)).expect("unit cube is valid")
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || !center.coords.iter().all(|c| c.is_finite()) {
            return Err(RadfluxError::Geometry(format!(
                "ball needs a finite center and positive radius, got radius {radius}"
            )));
        }
        Ok(Region {
            kind: RegionKind::Ball { center, radius },
            resolution: DEFAULT_BALL_RESOLUTION,
        })
    }

    pub fn tetrahedron(vertices: [Point; 4]) -> Result<Self> {
        if !vertices.iter().all(|v| v.coords.iter().all(|c| c.is_finite())) {
            return Err(RadfluxError::Geometry("tetrahedron vertices must be finite".into()));
        }
        let vol = signed_tet_volume(&vertices).abs();
        let scale = max_edge(&vertices);
        if !(vol > 1e-14 * scale.powi(3)) {
            return Err(RadfluxError::Geometry(format!(
                "degenerate tetrahedron (volume {vol})"
            )));
        }
        Ok(Region {
            kind: RegionKind::Tetrahedron(vertices),
            resolution: DEFAULT_TETRAHEDRON_RESOLUTION,
        })
    }

    /// A closed triangle mesh. Rejected unless every directed edge is
    /// matched by exactly one reversed edge, the area-weighted normals sum
    /// to at most 1e-9 of the total area, and the enclosed volume is
    /// positive (outward orientation).
    pub fn mesh(triangles: Vec<Triangle>) -> Result<Self> {
        validate_mesh(&triangles)?;
        Ok(Region {
            kind: RegionKind::Mesh(Arc::new(triangles)),
            resolution: DEFAULT_MESH_RESOLUTION,
        })
    }

    pub fn with_resolution(mut self, resolution: usize) -> Result<Self> {
        if resolution < 1 {
            return Err(RadfluxError::InvalidArgument(
                "boundary resolution must be >= 1".into(),
            ));
        }
        self.resolution = resolution;
        Ok(self)
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Diameter-like length used to scale finite-difference steps.
    pub fn characteristic_length(&self) -> f64 {
        match &self.kind {
            RegionKind::Box { min, max } => (max - min).norm(),
            RegionKind::Ball { radius, .. } => 2.0 * radius,
            RegionKind::Tetrahedron(v) => max_edge(v),
            RegionKind::Mesh(tris) => {
                let (lo, hi) = bounding_box(tris);
                (hi - lo).norm()
            }
        }
    }

    /// Deterministic boundary rule.
    pub fn boundary_samples(&self) -> Vec<FluxSample> {
        let r = self.resolution;
        match &self.kind {
            RegionKind::Box { min, max } => box_boundary(min, max, r),
            RegionKind::Ball { center, radius } => {
                let quad = SphericalQuadrature::new(r).expect("resolution >= 1");
                quad.iter()
                    .map(|(u, w)| FluxSample {
                        point: center + u.as_vector() * *radius,
                        normal: *u,
                        area_weight: w * radius * radius,
                    })
                    .collect()
            }
            RegionKind::Tetrahedron(v) => tetrahedron_faces(v)
                .iter()
                .flat_map(|t| triangle_samples(t, r))
                .collect(),
            RegionKind::Mesh(tris) => tris.iter().flat_map(|t| triangle_samples(t, r)).collect(),
        }
    }

    /// Deterministic volume rule as `(point, weight)` pairs. Mesh weights
    /// may be negative (signed cones).
    pub fn volume_rule(&self) -> Vec<(Point, f64)> {
        let r = self.resolution;
        match &self.kind {
            RegionKind::Box { min, max } => box_volume(min, max, r),
            RegionKind::Ball { center, radius } => {
                let quad = SphericalQuadrature::new(r).expect("resolution >= 1");
                let (t, wt) = gauss_legendre_on(r + 4, 0.0, 1.0);
                let mut rule = Vec::with_capacity(quad.len() * t.len());
                for (u, w) in quad.iter() {
                    for (ti, wi) in t.iter().zip(&wt) {
                        let rho = ti * radius;
                        rule.push((
                            center + u.as_vector() * rho,
                            w * wi * ti * ti * radius.powi(3),
                        ));
                    }
                }
                rule
            }
            RegionKind::Tetrahedron(v) => {
                let mut v = *v;
                if signed_tet_volume(&v) < 0.0 {
                    v.swap(1, 2);
                }
                collapsed_tet_rule(&v, r + 2)
            }
            RegionKind::Mesh(tris) => {
                let apex = vertex_mean(tris);
                tris.iter()
                    .flat_map(|t| collapsed_tet_rule(&[apex, t.0[0], t.0[1], t.0[2]], r + 2))
                    .collect()
            }
        }
    }

    /// `|R|`: analytic for box, ball and tetrahedron; from the boundary
    /// integral of `x·n / 3` for meshes.
    pub fn volume(&self) -> f64 {
        match &self.kind {
            RegionKind::Box { min, max } => {
                let d = max - min;
                d.x * d.y * d.z
            }
            RegionKind::Ball { radius, .. } => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
            RegionKind::Tetrahedron(v) => signed_tet_volume(v).abs(),
            RegionKind::Mesh(tris) => mesh_volume(tris),
        }
    }

    /// Analytic boundary area (mesh: sum of triangle areas).
    pub fn boundary_area(&self) -> f64 {
        match &self.kind {
            RegionKind::Box { min, max } => {
                let d = max - min;
                2.0 * (d.x * d.y + d.y * d.z + d.z * d.x)
            }
            RegionKind::Ball { radius, .. } => 4.0 * std::f64::consts::PI * radius * radius,
            RegionKind::Tetrahedron(v) => tetrahedron_faces(v).iter().map(Triangle::area).sum(),
            RegionKind::Mesh(tris) => tris.iter().map(Triangle::area).sum(),
        }
    }

    pub fn centroid(&self) -> Point {
        match &self.kind {
            RegionKind::Box { min, max } => nalgebra::center(min, max),
            RegionKind::Ball { center, .. } => *center,
            RegionKind::Tetrahedron(v) => {
                Point::from(v.iter().map(|p| p.coords).sum::<Vector3<f64>>() / 4.0)
            }
            RegionKind::Mesh(tris) => vertex_mean(tris),
        }
    }
}

fn max_edge(v: &[Point; 4]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            m = m.max((v[i] - v[j]).norm());
        }
    }
    m
}

fn signed_tet_volume(v: &[Point; 4]) -> f64 {
    (v[1] - v[0]).dot(&(v[2] - v[0]).cross(&(v[3] - v[0]))) / 6.0
}

/// Faces of a tetrahedron, oriented outward.
pub(crate) fn tetrahedron_faces(v: &[Point; 4]) -> [Triangle; 4] {
    let face = |i: usize| {
        let others: Vec<Point> = (0..4).filter(|&k| k != i).map(|k| v[k]).collect();
        let t = Triangle([others[0], others[1], others[2]]);
        if t.area_vector().dot(&(v[i] - others[0])) > 0.0 {
            Triangle([others[0], others[2], others[1]])
        } else {
            t
        }
    };
    [face(0), face(1), face(2), face(3)]
}

fn box_boundary(min: &Point, max: &Point, r: usize) -> Vec<FluxSample> {
    let (g, gw) = gauss_legendre_on(3, 0.0, 1.0);
    let d = max - min;
    let mut out = Vec::with_capacity(6 * r * r * 9);
    for axis in 0..3 {
        let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
        for (side, sign) in [(min[axis], -1.0), (max[axis], 1.0)] {
            let mut n = Vector3::zeros();
            n[axis] = sign;
            let normal = Direction::from_unit_unchecked(n);
            let cell = (d[a1] / r as f64) * (d[a2] / r as f64);
            for i in 0..r {
                for j in 0..r {
                    for (s, ws) in g.iter().zip(&gw) {
                        for (t, wt) in g.iter().zip(&gw) {
                            let mut p = Point::origin();
                            p[axis] = side;
                            p[a1] = min[a1] + d[a1] * (i as f64 + s) / r as f64;
                            p[a2] = min[a2] + d[a2] * (j as f64 + t) / r as f64;
                            out.push(FluxSample {
                                point: p,
                                normal,
                                area_weight: cell * ws * wt,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

fn box_volume(min: &Point, max: &Point, r: usize) -> Vec<(Point, f64)> {
    let (g, gw) = gauss_legendre_on(3, 0.0, 1.0);
    let d = max - min;
    let cell = d.x * d.y * d.z / (r * r * r) as f64;
    let mut out = Vec::with_capacity(r * r * r * 27);
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for (a, wa) in g.iter().zip(&gw) {
                    for (b, wb) in g.iter().zip(&gw) {
                        for (c, wc) in g.iter().zip(&gw) {
                            let p = Point::new(
                                min.x + d.x * (i as f64 + a) / r as f64,
                                min.y + d.y * (j as f64 + b) / r as f64,
                                min.z + d.z * (k as f64 + c) / r as f64,
                            );
                            out.push((p, cell * wa * wb * wc));
                        }
                    }
                }
            }
        }
    }
    out
}

/// r² sub-triangles, each with a 4×4 collapsed Gauss rule (exact through
/// degree 7).
fn triangle_samples(t: &Triangle, r: usize) -> Vec<FluxSample> {
    let av = t.area_vector();
    let area = av.norm();
    if area == 0.0 {
        return Vec::new();
    }
    let normal = Direction::from_unit_unchecked(av / area);
    let [a, b, c] = t.0;
    let grid = |i: usize, j: usize| -> Point {
        a + (b - a) * (i as f64 / r as f64) + (c - a) * (j as f64 / r as f64)
    };
    let sub_area = area / (r * r) as f64;
    let (g, gw) = gauss_legendre_on(TRIANGLE_GAUSS_POINTS, 0.0, 1.0);
    let mut out = Vec::with_capacity(TRIANGLE_GAUSS_POINTS * TRIANGLE_GAUSS_POINTS * r * r);
    let mut emit = |p0: Point, p1: Point, p2: Point| {
        for (s, ws) in g.iter().zip(&gw) {
            for (t, wt) in g.iter().zip(&gw) {
                let l1 = *s;
                let l2 = (1.0 - s) * t;
                let p = p0 + (p1 - p0) * l1 + (p2 - p0) * l2;
                out.push(FluxSample {
                    point: p,
                    normal,
                    // Reference triangle has area 1/2, Jacobian (1 − s).
                    area_weight: 2.0 * sub_area * (1.0 - s) * ws * wt,
                });
            }
        }
    };
    for i in 0..r {
        for j in 0..(r - i) {
            emit(grid(i, j), grid(i + 1, j), grid(i, j + 1));
            if j + 1 < r - i {
                emit(grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1));
            }
        }
    }
    out
}

/// Collapsed-coordinate (Duffy) Gauss rule on a tetrahedron with signed
/// weights: the weights carry the sign of the vertex ordering.
fn collapsed_tet_rule(v: &[Point; 4], p: usize) -> Vec<(Point, f64)> {
    let (g, gw) = gauss_legendre_on(p, 0.0, 1.0);
    let e1 = v[1] - v[0];
    let e2 = v[2] - v[0];
    let e3 = v[3] - v[0];
    let det = e1.dot(&e2.cross(&e3));
    let mut out = Vec::with_capacity(p * p * p);
    for (a, wa) in g.iter().zip(&gw) {
        for (b, wb) in g.iter().zip(&gw) {
            for (c, wc) in g.iter().zip(&gw) {
                let l1 = *a;
                let l2 = (1.0 - a) * b;
                let l3 = (1.0 - a) * (1.0 - b) * c;
                let jac = (1.0 - a) * (1.0 - a) * (1.0 - b);
                out.push((v[0] + e1 * l1 + e2 * l2 + e3 * l3, det * jac * wa * wb * wc));
            }
        }
    }
    out
}

fn vertex_mean(tris: &[Triangle]) -> Point {
    let sum: Vector3<f64> = tris
        .iter()
        .flat_map(|t| t.0.iter())
        .map(|p| p.coords)
        .sum();
    Point::from(sum / (3 * tris.len()) as f64)
}

fn bounding_box(tris: &[Triangle]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in tris.iter().flat_map(|t| t.0.iter()) {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

fn mesh_volume(tris: &[Triangle]) -> f64 {
    let terms: Vec<f64> = tris
        .iter()
        .map(|t| t.centroid().coords.dot(&t.area_vector()) / 3.0)
        .collect();
    pairwise_sum(&terms)
}

fn validate_mesh(tris: &[Triangle]) -> Result<()> {
    if tris.len() < 4 {
        return Err(RadfluxError::Geometry(format!(
            "a closed mesh needs at least 4 triangles, got {}",
            tris.len()
        )));
    }
    for (i, t) in tris.iter().enumerate() {
        if !t.0.iter().all(|p| p.coords.iter().all(|c| c.is_finite())) {
            return Err(RadfluxError::Geometry(format!("triangle {i} has non-finite vertices")));
        }
        if !(t.area() > 0.0) {
            return Err(RadfluxError::Geometry(format!("triangle {i} is degenerate")));
        }
    }

    type Key = [u64; 3];
    let key = |p: &Point| -> Key { [p.x, p.y, p.z].map(|c| (c + 0.0).to_bits()) };
    let mut directed: HashMap<(Key, Key), usize> = HashMap::new();
    for t in tris {
        for e in 0..3 {
            let (a, b) = (key(&t.0[e]), key(&t.0[(e + 1) % 3]));
            if a == b {
                return Err(RadfluxError::Geometry("triangle with repeated vertex".into()));
            }
            *directed.entry((a, b)).or_default() += 1;
        }
    }
    for (&(a, b), &count) in &directed {
        if count != 1 || directed.get(&(b, a)) != Some(&1) {
            return Err(RadfluxError::Geometry(
                "mesh is not watertight and consistently oriented".into(),
            ));
        }
    }

    let total_area: f64 = tris.iter().map(Triangle::area).sum();
    let closure = pairwise_sum_vec3(&tris.iter().map(Triangle::area_vector).collect::<Vec<_>>());
    if closure.norm() > 1e-9 * total_area {
        return Err(RadfluxError::Geometry(format!(
            "area-weighted normals do not close (residual {})",
            closure.norm()
        )));
    }
    if !(mesh_volume(tris) > 0.0) {
        return Err(RadfluxError::Geometry(
            "mesh encloses non-positive volume; normals must point outward".into(),
        ));
    }
    Ok(())
}

/// `∫_R g dV` with the region's volume rule.
pub fn volume_integrate<G>(region: &Region, g: G) -> Result<f64>
where
    G: Fn(&Point) -> f64,
{
    let rule = region.volume_rule();
    let mut terms = Vec::with_capacity(rule.len());
    for (p, w) in &rule {
        let value = check_finite("volume integrand", Location::Point(*p), g(p))?;
        terms.push(w * value);
    }
    Ok(pairwise_sum(&terms))
}

/// `∫_{∂R} f(x, n) dA` with the region's boundary rule.
pub fn boundary_integrate<F>(region: &Region, f: F) -> Result<f64>
where
    F: Fn(&Point, &Direction) -> f64,
{
    let samples = region.boundary_samples();
    let mut terms = Vec::with_capacity(samples.len());
    for s in &samples {
        let value = check_finite(
            "boundary integrand",
            Location::Point(s.point),
            f(&s.point, &s.normal),
        )?;
        terms.push(s.area_weight * value);
    }
    Ok(pairwise_sum(&terms))
}

/// Both sides of the Gauss identity and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussCheck {
    pub boundary: f64,
    pub volume: f64,
    pub residual: f64,
}

/// `|∫_{∂R} F·n dA − ∫_R div F dV|` with `div F` by central differences
/// of step `1e-4 ×` the region's characteristic length.
pub fn gauss_residual<F>(region: &Region, field: F) -> Result<GaussCheck>
where
    F: Fn(&Point) -> Vector3<f64>,
{
    let boundary = boundary_integrate(region, |x, n| field(x).dot(n.as_vector()))?;
    let h = fd_step(region.characteristic_length());
    let volume = volume_integrate(region, |x| {
        (0..3)
            .map(|k| central_gradient(|p| field(p)[k], x, h)[k])
            .sum()
    })?;
    Ok(GaussCheck {
        boundary,
        volume,
        residual: (boundary - volume).abs(),
    })
}

/// One face of a [`CauchyTetrahedron`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetFace {
    pub area: f64,
    pub normal: Direction,
    pub centroid: Point,
}

/// A small tetrahedron around a point with one face of prescribed outward
/// normal; the other three faces lie in the planes of a coordinate
/// trihedron.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyTetrahedron {
    pub vertices: [Point; 4],
    /// Face 0 carries the requested normal; faces 1..=3 the trihedron
    /// faces.
    pub faces: [TetFace; 4],
    /// Frame whose coordinate planes hold faces 1..=3 (identity unless the
    /// requested normal is nearly axis-aligned).
    pub frame: Rotation3<f64>,
}

impl CauchyTetrahedron {
    pub fn region(&self) -> Region {
        Region::tetrahedron(self.vertices).expect("constructed tetrahedron is nondegenerate")
    }

    pub fn volume(&self) -> f64 {
        signed_tet_volume(&self.vertices).abs()
    }

    /// `Σₐ Aₐ nₐ`; zero up to rounding.
    pub fn closure(&self) -> Vector3<f64> {
        self.faces
            .iter()
            .map(|f| f.normal.as_vector() * f.area)
            .sum()
    }
}

/// Below this, a normal component counts as zero and the trihedron is
/// rotated.
const AXIS_ALIGNED_THRESHOLD: f64 = 1e-3;

fn fallback_frames() -> [Rotation3<f64>; 2] {
    [
        Rotation3::from_axis_angle(
            &Unit::new_normalize(Vector3::new(1.0, 2.0, 3.0)),
            0.37,
        ),
        Rotation3::from_axis_angle(
            &Unit::new_normalize(Vector3::new(-2.0, 1.0, 0.5)),
            0.61,
        ),
    ]
}

/// Builds the tetrahedron of the Cauchy argument: centroid at `x`, slant
/// face with outward normal `normal`, three faces with normals
/// `−sign(nᵢ) fᵢ` for the trihedron frame `f`, linear size `h`.
///
/// When `normal` has a component below 1e-3 in the standard frame the
/// construction degenerates; a fixed rotated frame is used instead.
pub fn make_tetrahedron(x: Point, h: f64, normal: Direction) -> Result<CauchyTetrahedron> {
    if !(h.is_finite() && h > 0.0) {
        return Err(RadfluxError::InvalidArgument(format!(
            "tetrahedron size must be positive, got {h}"
        )));
    }
    let n = *normal.as_vector();
    let min_component = |frame: &Rotation3<f64>| {
        let local = frame.inverse() * n;
        local.iter().fold(f64::INFINITY, |m, c| m.min(c.abs()))
    };
    let identity = Rotation3::identity();
    let frame = if min_component(&identity) >= AXIS_ALIGNED_THRESHOLD {
        identity
    } else {
        let [a, b] = fallback_frames();
        if min_component(&a) >= min_component(&b) {
            a
        } else {
            b
        }
    };

    let local = frame.inverse() * n;
    let axes: [Vector3<f64>; 3] = [0, 1, 2].map(|k| frame * Vector3::ith(k, 1.0));
    let offsets: [Vector3<f64>; 3] = [0, 1, 2].map(|k| axes[k] * (h / local[k]));
    let shift: Vector3<f64> = offsets.iter().sum::<Vector3<f64>>() / 4.0;
    let apex = x - shift;
    let vertices = [apex, apex + offsets[0], apex + offsets[1], apex + offsets[2]];

    let slant = Triangle([vertices[1], vertices[2], vertices[3]]);
    let slant = oriented_away(slant, &apex);
    let mut faces = [face_of(&slant); 4];
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let t = oriented_away(Triangle([apex, vertices[1 + i], vertices[1 + j]]), &vertices[1 + k]);
        faces[1 + k] = face_of(&t);
    }
    Ok(CauchyTetrahedron {
        vertices,
        faces,
        frame,
    })
}

fn oriented_away(t: Triangle, opposite: &Point) -> Triangle {
    if t.area_vector().dot(&(opposite - t.0[0])) > 0.0 {
        Triangle([t.0[0], t.0[2], t.0[1]])
    } else {
        t
    }
}

fn face_of(t: &Triangle) -> TetFace {
    let av = t.area_vector();
    let area = av.norm();
    TetFace {
        area,
        normal: Direction::from_unit_unchecked(av / area),
        centroid: t.centroid(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex() -> Region {
        Region::tetrahedron([
            Point::origin(),
            Point::new(1.0, 0.0, 0.0),
            Point::new(0.0, 1.0, 0.0),
            Point::new(0.0, 0.0, 1.0),
        ])
        .unwrap()
    }

    fn total_area(r: &Region) -> f64 {
        r.boundary_samples().iter().map(|s| s.area_weight).sum()
    }

    #[test]
    fn boundary_areas() {
        assert!((total_area(&Region::unit_cube()) - 6.0).abs() < 1e-9);
        assert!((total_area(&simplex()) - (1.5 + 3f64.sqrt() / 2.0)).abs() < 1e-9);
        let ball = Region::ball(Point::origin(), 1.0).unwrap();
        assert!((total_area(&ball) - 4.0 * std::f64::consts::PI).abs() < 1e-4);
    }

    #[test]
    fn volumes() {
        assert_eq!(Region::unit_cube().volume(), 1.0);
        assert!((simplex().volume() - 1.0 / 6.0).abs() < 1e-15);
        let ball = Region::ball(Point::origin(), 1.0).unwrap();
        assert!((ball.volume() - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn volume_integrals() {
        let cube = Region::unit_cube();
        assert!((volume_integrate(&cube, |_| 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((volume_integrate(&cube, |x| x.x).unwrap() - 0.5).abs() < 1e-12);
        let ball = Region::ball(Point::origin(), 1.0).unwrap();
        let v = volume_integrate(&ball, |_| 1.0).unwrap();
        assert!((v - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-3);
        let s = volume_integrate(&simplex(), |x| x.x * x.y).unwrap();
        assert!((s - 1.0 / 120.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_residual_examples() {
        let cube = Region::unit_cube();
        let c = gauss_residual(&cube, |_| Vector3::new(1.0, -2.0, 0.5)).unwrap();
        assert!(c.residual <= 1e-10);
        let c = gauss_residual(&cube, |x| x.coords).unwrap();
        assert!((c.boundary - 3.0).abs() < 1e-12);
        assert!((c.volume - 3.0).abs() < 1e-8);
        assert!(c.residual <= 1e-8);
        let c = gauss_residual(&cube, |x| Vector3::new(x.x * x.x, 0.0, 0.0)).unwrap();
        assert!((c.boundary - 1.0).abs() < 1e-12);
        assert!(c.residual <= 1e-6);
    }

    #[test]
    fn triangle_faces_integrate_smooth_flux() {
        // ∫ eˣ over the unit simplex is ∫₀¹ eˣ(1 − x)²/2 dx = e − 5/2.
        let flux = boundary_integrate(&simplex(), |x, n| x.x.exp() * n[0]).unwrap();
        assert!((flux - (std::f64::consts::E - 2.5)).abs() <= 1e-10, "{flux}");
    }

    #[test]
    fn invalid_regions_are_rejected() {
        assert!(Region::cuboid(Point::origin(), Point::new(1.0, 0.0, 1.0)).is_err());
        assert!(Region::ball(Point::origin(), 0.0).is_err());
        assert!(Region::tetrahedron([
            Point::origin(),
            Point::new(1.0, 0.0, 0.0),
            Point::new(2.0, 0.0, 0.0),
            Point::new(0.0, 0.0, 1.0),
        ])
        .is_err());
        assert!(Region::unit_cube().with_resolution(0).is_err());
    }

    #[test]
    fn open_and_inverted_meshes_are_rejected() {
        let faces = tetrahedron_faces(&[
            Point::origin(),
            Point::new(1.0, 0.0, 0.0),
            Point::new(0.0, 1.0, 0.0),
            Point::new(0.0, 0.0, 1.0),
        ]);
        assert!(Region::mesh(faces.to_vec()).is_ok());
        assert!(Region::mesh(faces[..3].to_vec()).is_err());
        let inverted: Vec<Triangle> = faces
            .iter()
            .map(|t| Triangle([t.0[0], t.0[2], t.0[1]]))
            .collect();
        assert!(Region::mesh(inverted).is_err());
    }

    #[test]
    fn cauchy_tetrahedron_closure_and_scaling() {
        let n = Direction::normalize(Vector3::new(1.0, 1.0, 1.0)).unwrap();
        let x = Point::new(0.2, -0.1, 0.4);
        let t = make_tetrahedron(x, 1.0, n).unwrap();
        assert!(t.closure().norm() <= 1e-12 * t.faces[0].area);
        assert!((t.faces[0].normal.as_vector() - n.as_vector()).norm() < 1e-14);
        let half = make_tetrahedron(x, 0.5, n).unwrap();
        assert!((t.volume() / half.volume() - 8.0).abs() < 1e-12);
        for k in 0..4 {
            assert!((t.faces[k].area / half.faces[k].area - 4.0).abs() < 1e-12);
        }
        let centroid = t.region().centroid();
        assert!((centroid - x).norm() < 1e-14);
    }

    #[test]
    fn axis_aligned_normal_uses_rotated_trihedron() {
        let t = make_tetrahedron(Point::origin(), 1.0, Direction::z_axis()).unwrap();
        assert_ne!(t.frame, Rotation3::identity());
        assert!((t.faces[0].normal.as_vector() - Vector3::z()).norm() < 1e-12);
        assert!(t.closure().norm() <= 1e-12 * t.faces[0].area);
        assert!(t.volume() > 0.0);
    }

    #[test]
    fn non_positive_size_is_rejected() {
        assert!(make_tetrahedron(Point::origin(), 0.0, Direction::z_axis()).is_err());
        assert!(make_tetrahedron(Point::origin(), -1.0, Direction::z_axis()).is_err());
    }
}
