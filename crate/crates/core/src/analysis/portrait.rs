//! Vector-field samples on coordinate planes of the Bloch ball.

use serde::{Deserialize, Serialize};

use crate::bloch::BlochVector;
use crate::dynamics::{Field, VectorField};
use crate::error::{Error, Result};
use crate::models::Model;

/// Coordinate plane and its in-plane axes `(c1, c2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Plane {
    /// `y = 0`, axes `(z, x)`.
    #[serde(rename = "y0")]
    Y0,
    /// `z = 0`, axes `(x, y)`.
    #[serde(rename = "z0")]
    Z0,
    /// `x = 0`, axes `(z, y)`.
    #[serde(rename = "x0")]
    X0,
}

impl Plane {
    pub fn embed(self, c1: f64, c2: f64) -> BlochVector {
        match self {
            Plane::Y0 => BlochVector::new(c2, 0.0, c1),
            Plane::Z0 => BlochVector::new(c1, c2, 0.0),
            Plane::X0 => BlochVector::new(0.0, c2, c1),
        }
    }

    pub fn project(self, v: BlochVector) -> (f64, f64) {
        match self {
            Plane::Y0 => (v.z, v.x),
            Plane::Z0 => (v.x, v.y),
            Plane::X0 => (v.z, v.y),
        }
    }

    pub fn axes(self) -> (&'static str, &'static str) {
        match self {
            Plane::Y0 => ("z", "x"),
            Plane::Z0 => ("x", "y"),
            Plane::X0 => ("z", "y"),
        }
    }
}

impl std::str::FromStr for Plane {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "y0" | "y=0" => Ok(Plane::Y0),
            "z0" | "z=0" => Ok(Plane::Z0),
            "x0" | "x=0" => Ok(Plane::X0),
            _ => Err(Error::InvalidConfig(format!("unknown plane {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitSample {
    pub c1: f64,
    pub c2: f64,
    pub dc1: f64,
    pub dc2: f64,
}

fn grid_coord(k: usize, n: usize) -> f64 {
    if n == 1 {
        0.0
    } else {
        -1.0 + 2.0 * k as f64 / (n - 1) as f64
    }
}

/// Samples the assembled field on an `n x n` grid over `[-1, 1]^2` in
/// `plane`, rows ordered with `c1` varying slowest. Points outside the unit
/// disk are included; the field is polynomial there.
pub fn vector_field_grid(model: &Model, plane: Plane, n: usize) -> Result<Vec<PortraitSample>> {
    if n == 0 {
        return Err(Error::InvalidConfig("grid size must be >= 1".into()));
    }
    let field = VectorField::new(*model)?;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (c1, c2) = (grid_coord(i, n), grid_coord(j, n));
            let (dc1, dc2) = plane.project(field.eval(plane.embed(c1, c2)));
            out.push(PortraitSample { c1, c2, dc1, dc2 });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_grid() {
        let m = Model::Hopf {
            delta: 0.9,
            epsilon: 0.25,
            b: 0.2,
        };
        let g = vector_field_grid(&m, Plane::Y0, 21).unwrap();
        assert_eq!(g.len(), 441);
        let origin = g[220];
        assert_eq!((origin.c1, origin.c2), (0.0, 0.0));
        assert!(origin.dc1.abs() < 1e-15 && origin.dc2.abs() < 1e-15);
        // Rotation: at (z, x) = (0.1, 0) the x velocity is b z > 0.
        let p = g.iter().find(|s| (s.c1 - 0.1).abs() < 1e-12 && s.c2 == 0.0).unwrap();
        assert!((p.dc2 - 0.02).abs() < 1e-12);
    }

    #[test]
    fn pitchfork_root_row() {
        let m = Model::Pitchfork { alpha: 0.5, t: -0.25 };
        let g = vector_field_grid(&m, Plane::Y0, 5).unwrap();
        for s in g.iter().filter(|s| s.c1 == 0.5) {
            assert!(s.dc1.abs() < 1e-15, "{s:?}");
        }
    }

    #[test]
    fn planes_round_trip() {
        let v = BlochVector::new(0.1, 0.2, 0.3);
        for p in [Plane::Y0, Plane::Z0, Plane::X0] {
            let (a, b) = p.project(v);
            let w = p.embed(a, b);
            assert_eq!(p.project(w), (a, b));
            assert_eq!(p, p.to_string_key().parse().unwrap());
        }
        assert_eq!(vector_field_grid(&Model::Pitchfork { alpha: 0.5, t: 0.0 }, Plane::Z0, 1).unwrap().len(), 1);
    }

    trait Key {
        fn to_string_key(self) -> &'static str;
    }

    impl Key for Plane {
        fn to_string_key(self) -> &'static str {
            match self {
                Plane::Y0 => "y0",
                Plane::Z0 => "z0",
                Plane::X0 => "x0",
            }
        }
    }
}
