//! ASCII triangle-soup mesh format.
//!
//! One triangle per line as nine whitespace-separated floats
//! `x₁ y₁ z₁ x₂ y₂ z₂ x₃ y₃ z₃`, vertices counter-clockwise seen from
//! outside. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use crate::error::{RadfluxError, Result};
use crate::region::{Point, Triangle};

pub fn parse_triangle_soup(text: &str) -> Result<Vec<Triangle>> {
    let mut triangles = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut values = [0.0f64; 9];
        let mut count = 0;
        for token in line.split_whitespace() {
            if count == 9 {
                return Err(RadfluxError::Parse {
                    line: idx + 1,
                    message: "more than 9 values on a triangle line".into(),
                });
            }
            let v: f64 = token.parse().map_err(|_| RadfluxError::Parse {
                line: idx + 1,
                message: format!("not a number: {token:?}"),
            })?;
            if !v.is_finite() {
                return Err(RadfluxError::Parse {
                    line: idx + 1,
                    message: format!("non-finite coordinate {token:?}"),
                });
            }
            values[count] = v;
            count += 1;
        }
        if count != 9 {
            return Err(RadfluxError::Parse {
                line: idx + 1,
                message: format!("expected 9 values, found {count}"),
            });
        }
        let p = |k: usize| Point::new(values[3 * k], values[3 * k + 1], values[3 * k + 2]);
        triangles.push(Triangle([p(0), p(1), p(2)]));
    }
    Ok(triangles)
}

/// Inverse of [`parse_triangle_soup`]; shortest round-trip float format.
pub fn write_triangle_soup(triangles: &[Triangle]) -> String {
    let mut out = String::new();
    for t in triangles {
        let coords: Vec<String> = t
            .0
            .iter()
            .flat_map(|p| [p.x, p.y, p.z])
            .map(|c| format!("{c:?}"))
            .collect();
        let _ = writeln!(out, "{}", coords.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# tetra\n\n0 0 0  0 1 0  1 0 0\n";
        let tris = parse_triangle_soup(text).unwrap();
        assert_eq!(tris.len(), 1);
        assert_eq!(tris[0].0[1], Point::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn reports_line_of_malformed_row() {
        let text = "0 0 0 1 0 0 0 1 0\n0 0 0 1 0 0 0 1\n";
        match parse_triangle_soup(text) {
            Err(RadfluxError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_triangle_soup("0 0 0 1 0 0 0 1 x").is_err());
        assert!(parse_triangle_soup("0 0 0 1 0 0 0 1 0 5").is_err());
        assert!(parse_triangle_soup("0 0 0 1 0 0 0 1 inf").is_err());
    }

    #[test]
    fn write_then_parse_is_identity() {
        let tris = vec![Triangle([
            Point::new(0.1, 0.2, 0.3),
            Point::new(-1e-7, 5.0, 1.0 / 3.0),
            Point::new(2.0, 0.0, -0.0),
        ])];
        assert_eq!(parse_triangle_soup(&write_triangle_soup(&tris)).unwrap(), tris);
    }
}
