#![allow(dead_code)]

use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use radflux::radiance::{Profile, ScalarRadianceField};
use radflux::region::Point;
use radflux::sphere::Direction;

pub fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return Direction::normalize(v).unwrap();
        }
    }
}

pub fn random_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Point {
    Point::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi))
}

pub fn random_vector(rng: &mut ChaCha8Rng, scale: f64) -> Vector3<f64> {
    Vector3::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

/// One of the analytic builders with random parameters; nonnegative on
/// the box `[-2, 3]³`.
pub fn random_builder(rng: &mut ChaCha8Rng) -> ScalarRadianceField {
    match rng.gen_range(0..5) {
        0 => ScalarRadianceField::isotropic(rng.gen_range(0.0..3.0)).unwrap(),
        1 => {
            let a = random_vector(rng, 1.0);
            let c = 3.0 * a.abs().sum() + rng.gen_range(0.0..1.0);
            ScalarRadianceField::linear(c, a).unwrap()
        }
        2 => ScalarRadianceField::transported(
            random_direction(rng),
            Profile::Exponential { rate: random_vector(rng, 0.5) },
        )
        .unwrap(),
        3 => ScalarRadianceField::transported(
            random_direction(rng),
            Profile::Gaussian {
                center: random_point(rng, -1.0, 1.0),
                width: rng.gen_range(0.5..2.0),
            },
        )
        .unwrap(),
        _ => ScalarRadianceField::lambert_surface(rng.gen_range(0.0..3.0), random_direction(rng)).unwrap(),
    }
}

/// Every builder, with fixed parameters.
pub fn builder_catalogue() -> Vec<(&'static str, ScalarRadianceField)> {
    vec![
        ("isotropic", ScalarRadianceField::isotropic(1.5).unwrap()),
        ("linear", ScalarRadianceField::linear(2.0, Vector3::new(0.5, -0.3, 0.2)).unwrap()),
        (
            "transported-exp",
            ScalarRadianceField::transported(
                Direction::normalize(Vector3::new(1.0, 2.0, -1.0)).unwrap(),
                Profile::Exponential { rate: Vector3::new(0.4, -0.2, 0.1) },
            )
            .unwrap(),
        ),
        (
            "transported-gauss",
            ScalarRadianceField::transported(
                Direction::z_axis(),
                Profile::Gaussian { center: Point::new(0.2, 0.1, 0.0), width: 0.7 },
            )
            .unwrap(),
        ),
        (
            "lambert",
            ScalarRadianceField::lambert_surface(1.0, Direction::normalize(Vector3::new(0.3, -0.5, 1.0)).unwrap())
                .unwrap(),
        ),
    ]
}

/// `∫_{S²} x^a y^b z^c dω` from the closed form
/// `4π (a−1)!! (b−1)!! (c−1)!! / (a+b+c+1)!!` (zero for any odd exponent).
pub fn monomial_integral(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return 0.0;
    }
    fn dfact(n: i64) -> f64 {
        let mut r = 1.0;
        let mut k = n;
        while k > 1 {
            r *= k as f64;
            k -= 2;
        }
        r
    }
    4.0 * std::f64::consts::PI * dfact(a as i64 - 1) * dfact(b as i64 - 1) * dfact(c as i64 - 1)
        / dfact((a + b + c) as i64 + 1)
}
