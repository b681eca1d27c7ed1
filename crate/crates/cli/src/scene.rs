//! Scene files: a JSON document naming regions, radiance fields, radiance
//! tensors, balance data and meter variations.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "quadrature_level": 4,
//!   "regions": [{ "name": "cube", "kind": "box", "min": [0, 0, 0], "max": [1, 1, 1] }],
//!   "fields": [{ "name": "ramp", "kind": "linear", "offset": 0, "gradient": [1, 0, 0] }],
//!   "tensors": [{ "name": "beam", "kind": "conforming",
//!                 "atoms": [{ "direction": [0, 0, 1], "weight": { "gradient": [0, 0, 1] } }] }],
//!   "balance": [{ "name": "exact", "kind": "consistent", "field": "ramp" }],
//!   "meters": [{ "name": "w", "gradient": [1, 0, 0] }]
//! }
//! ```
//!
//! Directions are given as any nonzero 3-vector and normalized. Affine
//! functions `{ "constant": c, "gradient": g }` evaluate to `c + g·x`;
//! both keys default to zero. Mesh paths are resolved against the scene
//! file's directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use serde::de::{self, DeserializeOwned, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use radflux::balance::BalanceData;
use radflux::measure::{Atom, SphereMeasure, VectorSphereMeasure};
use radflux::radiance::{Profile, ScalarRadianceField};
use radflux::region::{Point, Region, Triangle};
use radflux::soup::parse_triangle_soup;
use radflux::sphere::{Direction, SphericalQuadrature, DEFAULT_LEVEL};
use radflux::tensor::RadianceTensor;

pub const SCHEMA_VERSION: u32 = 1;

fn default_level() -> usize {
    DEFAULT_LEVEL
}

fn is_zero3(v: &[f64; 3]) -> bool {
    v.iter().all(|c| *c == 0.0)
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub schema_version: u32,
    #[serde(default = "default_level")]
    pub quadrature_level: usize,
    #[serde(default)]
    pub regions: Vec<Named<RegionSpec>>,
    #[serde(default)]
    pub fields: Vec<Named<FieldSpec>>,
    #[serde(default)]
    pub tensors: Vec<Named<TensorSpec>>,
    #[serde(default)]
    pub balance: Vec<Named<BalanceSpec>>,
    #[serde(default)]
    pub meters: Vec<Named<Affine>>,
}

/// A spec with its `name`, stored as a sibling key in the same JSON object.
#[derive(Debug, Clone, PartialEq)]
pub struct Named<T> {
    pub name: String,
    pub spec: T,
}

impl<T: Serialize> Serialize for Named<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut obj = match serde_json::to_value(&self.spec).map_err(serde::ser::Error::custom)? {
            Value::Object(m) => m,
            _ => return Err(serde::ser::Error::custom("spec must serialize to an object")),
        };
        obj.insert("name".into(), Value::String(self.name.clone()));
        obj.serialize(serializer)
    }
}

impl<'de, T: DeserializeOwned> Deserialize<'de> for Named<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let mut obj = Map::deserialize(deserializer)?;
        let name = match obj.remove("name") {
            Some(Value::String(s)) if !s.is_empty() => s,
            Some(_) => return Err(de::Error::custom("`name` must be a nonempty string")),
            None => return Err(de::Error::missing_field("name")),
        };
        let spec = T::deserialize(Value::Object(obj))
            .map_err(|e| de::Error::custom(format_args!("in `{name}`: {e}")))?;
        Ok(Named { name, spec })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Box {
        min: [f64; 3],
        max: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    Ball {
        center: [f64; 3],
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    Tetrahedron {
        vertices: [[f64; 3]; 4],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
    /// Exactly one of `path` (triangle-soup file) and `triangles`.
    Mesh {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        triangles: Option<Vec<[f64; 9]>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Exponential { rate: [f64; 3] },
    Gaussian { center: [f64; 3], width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub weight: f64,
    pub field: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Isotropic { intensity: f64 },
    Linear { offset: f64, gradient: [f64; 3] },
    Transported { axis: [f64; 3], profile: ProfileSpec },
    LambertSurface { intensity: f64, axis: [f64; 3] },
    /// Weighted sum of other named fields.
    Combination { terms: Vec<Term> },
}

/// `c + g·x`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Affine {
    #[serde(default, skip_serializing_if = "is_zero")]
    pub constant: f64,
    #[serde(default, skip_serializing_if = "is_zero3")]
    pub gradient: [f64; 3],
}

impl Affine {
    pub fn eval(&self, x: &Point) -> f64 {
        self.constant + Vector3::from(self.gradient).dot(&x.coords)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub direction: [f64; 3],
    pub weight: Affine,
}

/// A position-dependent scalar measure: the density of a named field plus
/// atoms with affine weights.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TensorSpec {
    Conforming {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        density: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        atoms: Vec<AtomSpec>,
    },
    /// `𝕀ⱼ = (u ↦ (M u)ⱼ) ⊙ μ_x`; row-major `matrix`.
    Mapped {
        matrix: [[f64; 3]; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        density: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        atoms: Vec<AtomSpec>,
    },
    General { components: [MeasureSpec; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BalanceSpec {
    Zero,
    /// `ρ̇ = 0`, `s_u = ∇i_u·u` for the named field.
    Consistent { field: String },
    Explicit { rho_dot: Affine, source: Affine },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneError(pub String);

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SceneError {}

fn err<T>(msg: impl Into<String>) -> Result<T, SceneError> {
    Err(SceneError(msg.into()))
}

impl Scene {
    /// Parses and checks the schema version and name uniqueness. Syntax
    /// errors carry the line and column.
    pub fn from_json(text: &str) -> Result<Scene, SceneError> {
        let scene: Scene = serde_json::from_str(text).map_err(|e| SceneError(format!("scene: {e}")))?;
        if scene.schema_version != SCHEMA_VERSION {
            return err(format!(
                "scene: unsupported schema_version {} (expected {SCHEMA_VERSION})",
                scene.schema_version
            ));
        }
        if scene.quadrature_level == 0 {
            return err("scene: quadrature_level must be at least 1");
        }
        scene.check_unique_names()?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scene serializes");
        s.push('\n');
        s
    }

    fn check_unique_names(&self) -> Result<(), SceneError> {
        fn check<T>(section: &str, items: &[Named<T>]) -> Result<(), SceneError> {
            let mut seen = BTreeSet::new();
            for item in items {
                if !seen.insert(item.name.as_str()) {
                    return err(format!("{section}: duplicate name `{}`", item.name));
                }
            }
            Ok(())
        }
        check("regions", &self.regions)?;
        check("fields", &self.fields)?;
        check("tensors", &self.tensors)?;
        check("balance", &self.balance)?;
        check("meters", &self.meters)
    }
}

/// A scene with every entity built and validated.
pub struct Model {
    pub quad: Arc<SphericalQuadrature>,
    pub regions: BTreeMap<String, Region>,
    pub fields: BTreeMap<String, ScalarRadianceField>,
    pub tensors: BTreeMap<String, RadianceTensor>,
    pub balance: BTreeMap<String, BalanceData>,
    pub meters: BTreeMap<String, Affine>,
    /// SHA-256 of the scene text followed by every referenced mesh file.
    pub digest: String,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, kind: &str, name: &str) -> Result<&'a T, SceneError> {
    map.get(name)
        .ok_or_else(|| SceneError(format!("unknown {kind} `{name}`")))
}

impl Model {
    pub fn region(&self, name: &str) -> Result<&Region, SceneError> {
        lookup(&self.regions, "region", name)
    }
    pub fn field(&self, name: &str) -> Result<&ScalarRadianceField, SceneError> {
        lookup(&self.fields, "field", name)
    }
    pub fn tensor(&self, name: &str) -> Result<&RadianceTensor, SceneError> {
        lookup(&self.tensors, "tensor", name)
    }
    pub fn balance_data(&self, name: &str) -> Result<&BalanceData, SceneError> {
        lookup(&self.balance, "balance data", name)
    }
    pub fn meter(&self, name: &str) -> Result<&Affine, SceneError> {
        lookup(&self.meters, "meter", name)
    }
}

fn direction(what: &str, v: [f64; 3]) -> Result<Direction, SceneError> {
    Direction::normalize(Vector3::from(v)).map_err(|e| SceneError(format!("{what}: {e}")))
}

fn point(v: [f64; 3]) -> Point {
    Point::from(Vector3::from(v))
}

/// Reads the scene at `path` and builds it.
pub fn load(path: &Path) -> Result<(Scene, Model), SceneError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SceneError(format!("cannot read scene {}: {e}", path.display())))?;
    let scene = Scene::from_json(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let model = build(&scene, text.as_bytes(), &base)?;
    Ok((scene, model))
}

/// Builds every entity of `scene`. `source` is hashed into the digest;
/// mesh paths are resolved against `base`.
pub fn build(scene: &Scene, source: &[u8], base: &Path) -> Result<Model, SceneError> {
    let mut hasher = Sha256::new();
    hasher.update(source);
    let quad = Arc::new(
        SphericalQuadrature::new(scene.quadrature_level).map_err(|e| SceneError(format!("quadrature_level: {e}")))?,
    );

    let mut regions = BTreeMap::new();
    for Named { name, spec } in &scene.regions {
        let ctx = |e: radflux::error::RadfluxError| SceneError(format!("region `{name}`: {e}"));
        let region = build_region(spec, base, &mut hasher).map_err(|e| SceneError(format!("region `{name}`: {e}")))?;
        regions.insert(name.clone(), region.map_err(ctx)?);
    }

    let specs: BTreeMap<&str, &FieldSpec> = scene.fields.iter().map(|n| (n.name.as_str(), &n.spec)).collect();
    let mut fields = BTreeMap::new();
    for Named { name, .. } in &scene.fields {
        let mut stack = Vec::new();
        let field = build_field(name, &specs, &mut stack)?;
        fields.insert(name.clone(), field);
    }

    let mut tensors = BTreeMap::new();
    for Named { name, spec } in &scene.tensors {
        let t = build_tensor(spec, &quad, &fields).map_err(|e| SceneError(format!("tensor `{name}`: {}", e.0)))?;
        tensors.insert(name.clone(), t);
    }

    let mut balance = BTreeMap::new();
    for Named { name, spec } in &scene.balance {
        let data = match spec {
            BalanceSpec::Zero => BalanceData::zero(),
            BalanceSpec::Consistent { field } => BalanceData::consistent_with(
                lookup(&fields, "field", field)
                    .map_err(|e| SceneError(format!("balance `{name}`: {}", e.0)))?
                    .clone(),
            ),
            BalanceSpec::Explicit { rho_dot, source } => {
                check_affine(&format!("balance `{name}`"), rho_dot)?;
                check_affine(&format!("balance `{name}`"), source)?;
                let (r, s) = (*rho_dot, *source);
                BalanceData::new(move |x, _| r.eval(x), move |x, _| s.eval(x))
            }
        };
        balance.insert(name.clone(), data);
    }

    let mut meters = BTreeMap::new();
    for Named { name, spec } in &scene.meters {
        check_affine(&format!("meter `{name}`"), spec)?;
        meters.insert(name.clone(), *spec);
    }

    Ok(Model {
        quad,
        regions,
        fields,
        tensors,
        balance,
        meters,
        digest: format!("{:x}", hasher.finalize()),
    })
}

fn check_affine(ctx: &str, a: &Affine) -> Result<(), SceneError> {
    if a.constant.is_finite() && a.gradient.iter().all(|g| g.is_finite()) {
        Ok(())
    } else {
        err(format!("{ctx}: affine coefficients must be finite"))
    }
}

type RegionResult = Result<Region, radflux::error::RadfluxError>;

fn build_region(spec: &RegionSpec, base: &Path, hasher: &mut Sha256) -> Result<RegionResult, String> {
    let (region, resolution) = match spec {
        RegionSpec::Box { min, max, resolution } => (Region::cuboid(point(*min), point(*max)), *resolution),
        RegionSpec::Ball { center, radius, resolution } => (Region::ball(point(*center), *radius), *resolution),
        RegionSpec::Tetrahedron { vertices, resolution } => {
            (Region::tetrahedron(vertices.map(point)), *resolution)
        }
        RegionSpec::Mesh { path, triangles, resolution } => {
            let tris = match (path, triangles) {
                (Some(p), None) => {
                    let full: PathBuf = base.join(p);
                    let text = std::fs::read_to_string(&full)
                        .map_err(|e| format!("cannot read mesh {}: {e}", full.display()))?;
                    hasher.update(text.as_bytes());
                    parse_triangle_soup(&text).map_err(|e| format!("mesh {p}: {e}"))?
                }
                (None, Some(list)) => list
                    .iter()
                    .map(|t| {
                        Triangle([
                            Point::new(t[0], t[1], t[2]),
                            Point::new(t[3], t[4], t[5]),
                            Point::new(t[6], t[7], t[8]),
                        ])
                    })
                    .collect(),
                _ => return Err("mesh needs exactly one of `path` and `triangles`".into()),
            };
            (Region::mesh(tris), *resolution)
        }
    };
    Ok(match resolution {
        Some(r) => region.and_then(|reg| reg.with_resolution(r)),
        None => region,
    })
}

fn build_field(
    name: &str,
    specs: &BTreeMap<&str, &FieldSpec>,
    stack: &mut Vec<String>,
) -> Result<ScalarRadianceField, SceneError> {
    if stack.iter().any(|s| s == name) {
        return err(format!("field `{name}`: combination refers to itself"));
    }
    let spec = specs
        .get(name)
        .ok_or_else(|| match stack.last() {
            Some(parent) => SceneError(format!("field `{parent}`: unknown field `{name}`")),
            None => SceneError(format!("unknown field `{name}`")),
        })?;
    let ctx = |e: radflux::error::RadfluxError| SceneError(format!("field `{name}`: {e}"));
    Ok(match spec {
        FieldSpec::Isotropic { intensity } => ScalarRadianceField::isotropic(*intensity).map_err(ctx)?,
        FieldSpec::Linear { offset, gradient } => {
            ScalarRadianceField::linear(*offset, Vector3::from(*gradient)).map_err(ctx)?
        }
        FieldSpec::Transported { axis, profile } => {
            let axis = direction(&format!("field `{name}` axis"), *axis)?;
            let profile = match profile {
                ProfileSpec::Exponential { rate } => Profile::Exponential { rate: Vector3::from(*rate) },
                ProfileSpec::Gaussian { center, width } => Profile::Gaussian {
                    center: point(*center),
                    width: *width,
                },
            };
            ScalarRadianceField::transported(axis, profile).map_err(ctx)?
        }
        FieldSpec::LambertSurface { intensity, axis } => {
            let axis = direction(&format!("field `{name}` axis"), *axis)?;
            ScalarRadianceField::lambert_surface(*intensity, axis).map_err(ctx)?
        }
        FieldSpec::Combination { terms } => {
            stack.push(name.to_string());
            let mut built = Vec::with_capacity(terms.len());
            for t in terms {
                built.push((t.weight, build_field(&t.field, specs, stack)?));
            }
            stack.pop();
            ScalarRadianceField::combination(built).map_err(ctx)?
        }
    })
}

type MeasureBuilder = Arc<dyn Fn(&Point) -> radflux::error::Result<SphereMeasure> + Send + Sync>;

fn build_measure(
    spec: &MeasureSpec,
    quad: &Arc<SphericalQuadrature>,
    fields: &BTreeMap<String, ScalarRadianceField>,
) -> Result<MeasureBuilder, SceneError> {
    let density = match &spec.density {
        Some(f) => Some(lookup(fields, "field", f)?.clone()),
        None => None,
    };
    let mut atoms = Vec::with_capacity(spec.atoms.len());
    for (i, a) in spec.atoms.iter().enumerate() {
        check_affine(&format!("atom {i}"), &a.weight)?;
        atoms.push((direction(&format!("atom {i} direction"), a.direction)?, a.weight));
    }
    let q = quad.clone();
    Ok(Arc::new(move |x: &Point| {
        let rho = match &density {
            Some(f) => q.nodes().iter().map(|u| f.eval(x, u)).collect(),
            None => vec![0.0; q.len()],
        };
        SphereMeasure::new(q.clone(), rho, atoms.iter().map(|(d, w)| Atom::new(*d, w.eval(x))))
    }))
}

fn build_tensor(
    spec: &TensorSpec,
    quad: &Arc<SphericalQuadrature>,
    fields: &BTreeMap<String, ScalarRadianceField>,
) -> Result<RadianceTensor, SceneError> {
    Ok(match spec {
        TensorSpec::Conforming { density, atoms } => {
            let measure = MeasureSpec { density: density.clone(), atoms: atoms.clone() };
            let mu = build_measure(&measure, quad, fields)?;
            RadianceTensor::conforming(quad.clone(), move |x| mu(x))
        }
        TensorSpec::Mapped { matrix, density, atoms } => {
            let measure = MeasureSpec { density: density.clone(), atoms: atoms.clone() };
            if matrix.iter().flatten().any(|m| !m.is_finite()) {
                return err("matrix entries must be finite");
            }
            let m = Matrix3::from_fn(|i, j| matrix[i][j]);
            let mu = build_measure(&measure, quad, fields)?;
            RadianceTensor::mapped(quad.clone(), m, move |x| mu(x))
        }
        TensorSpec::General { components } => {
            let [a, b, c] = components;
            let parts = [
                build_measure(a, quad, fields)?,
                build_measure(b, quad, fields)?,
                build_measure(c, quad, fields)?,
            ];
            RadianceTensor::general(quad.clone(), move |x| {
                VectorSphereMeasure::new([parts[0](x)?, parts[1](x)?, parts[2](x)?])
            })
        }
    })
}
