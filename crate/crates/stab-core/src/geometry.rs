//! Phase spaces, points, wrap-around metrics and deterministic samplers.
//!
//! All dynamics in this crate live on one of three flat quotient spaces:
//! the circle `S¹ = ℝ/ℤ`, the torus `T² = ℝ²/ℤ²`, or the product
//! `S¹ × T²`. Coordinates are kept as canonical representatives in
//! `[0, 1)`. Distances use the minimum-image convention per axis,
//! combined Euclidean-style within each factor and with `max` across the
//! two factors of the product space, so ε-balls of the product are
//! products of factor balls.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The three concrete phase spaces of the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseSpace {
    Circle,
    Torus2,
    CircleTimesTorus2,
}

impl PhaseSpace {
    /// Dimension of the space (1, 2 or 3).
    pub fn dimension(self) -> usize {
        match self {
            PhaseSpace::Circle => 1,
            PhaseSpace::Torus2 => 2,
            PhaseSpace::CircleTimesTorus2 => 3,
        }
    }

    /// Upper bound for the distance between any two points of the space.
    pub fn diameter(self) -> f64 {
        match self {
            PhaseSpace::Circle => 0.5,
            // both axes maximally wrapped
            PhaseSpace::Torus2 => 0.5_f64.sqrt(),
            // max of factor diameters
            PhaseSpace::CircleTimesTorus2 => 0.5_f64.sqrt(),
        }
    }
}

/// Reduce a real number to its canonical representative in `[0, 1)`.
pub fn wrap(c: f64) -> Result<f64> {
    if !c.is_finite() {
        return Err(Error::NonFiniteCoordinate);
    }
    Ok(wrap_unchecked(c))
}

/// `wrap` without the finiteness check, for hot paths on trusted values.
#[inline]
pub fn wrap_unchecked(c: f64) -> f64 {
    let r = c.rem_euclid(1.0);
    // rem_euclid of a tiny negative number can round up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Wrapped per-axis difference in `[0, 0.5]`.
#[inline]
pub fn axis_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// Signed representative of `a - b` in `[-0.5, 0.5)`.
#[inline]
pub fn signed_axis_difference(a: f64, b: f64) -> f64 {
    let d = wrap_unchecked(a - b);
    if d >= 0.5 {
        d - 1.0
    } else {
        d
    }
}

/// A point of a phase space, stored as canonical coordinates in `[0, 1)`.
///
/// Points are small copyable values; the unused tail of `coords` is kept
/// at zero so derived equality is well defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: u8,
}

impl Point {
    /// Build a point from raw coordinates, wrapping each into `[0, 1)`.
    pub fn new(coords: &[f64]) -> Result<Point> {
        if coords.is_empty() || coords.len() > 3 {
            return Err(Error::InvalidParameter(format!(
                "point dimension {} out of range",
                coords.len()
            )));
        }
        let mut c = [0.0; 3];
        for (slot, &v) in c.iter_mut().zip(coords) {
            *slot = wrap(v)?;
        }
        Ok(Point {
            coords: c,
            dim: coords.len() as u8,
        })
    }

    /// Point on the circle.
    pub fn circle(theta: f64) -> Point {
        Point::new(&[theta]).expect("finite circle coordinate")
    }

    /// Point on the 2-torus.
    pub fn torus(x: f64, y: f64) -> Point {
        Point::new(&[x, y]).expect("finite torus coordinates")
    }

    /// Point on the product space.
    pub fn product(theta: f64, x: f64, y: f64) -> Point {
        Point::new(&[theta, x, y]).expect("finite product coordinates")
    }

    /// Coordinates in axis order.
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    pub fn dimension(&self) -> usize {
        self.dim as usize
    }

    /// True when the point belongs to `space`.
    pub fn lives_in(&self, space: PhaseSpace) -> bool {
        self.dimension() == space.dimension()
    }

    /// Split a product-space point into its circle and torus factors.
    pub fn split_product(&self) -> (Point, Point) {
        debug_assert_eq!(self.dimension(), 3);
        (
            Point::circle(self.coords[0]),
            Point::torus(self.coords[1], self.coords[2]),
        )
    }

    /// Join factor points into a product-space point.
    pub fn join_product(circle: &Point, torus: &Point) -> Point {
        debug_assert_eq!(circle.dimension(), 1);
        debug_assert_eq!(torus.dimension(), 2);
        Point::product(circle.coords[0], torus.coords[0], torus.coords[1])
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(serializer)
    }
}

/// Distance between two points of `space` under the flat quotient metric.
///
/// Circle factor: wrapped absolute difference. Torus factor: Euclidean
/// norm of the wrapped differences. Product: max of the two factor
/// distances.
pub fn distance(space: PhaseSpace, x: &Point, y: &Point) -> Result<f64> {
    if !x.lives_in(space) || !y.lives_in(space) {
        return Err(Error::SpaceMismatch);
    }
    Ok(distance_unchecked(space, x, y))
}

/// `distance` without the membership check.
#[inline]
pub fn distance_unchecked(space: PhaseSpace, x: &Point, y: &Point) -> f64 {
    let xc = &x.coords;
    let yc = &y.coords;
    match space {
        PhaseSpace::Circle => axis_distance(xc[0], yc[0]),
        PhaseSpace::Torus2 => {
            let d0 = axis_distance(xc[0], yc[0]);
            let d1 = axis_distance(xc[1], yc[1]);
            (d0 * d0 + d1 * d1).sqrt()
        }
        PhaseSpace::CircleTimesTorus2 => {
            let dc = axis_distance(xc[0], yc[0]);
            let d1 = axis_distance(xc[1], yc[1]);
            let d2 = axis_distance(xc[2], yc[2]);
            dc.max((d1 * d1 + d2 * d2).sqrt())
        }
    }
}

/// Deterministic point source on a phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplerScheme {
    /// Full lattice `{k/r}^d`, row-major in axis order.
    UniformGrid { resolution: usize },
    /// Seeded pseudo-uniform points; identical seed gives identical output.
    RandomUniform { count: usize, seed: u64 },
}

/// Sampler wrapper; see [`SamplerScheme`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampler {
    pub scheme: SamplerScheme,
}

impl Sampler {
    pub fn grid(resolution: usize) -> Sampler {
        Sampler {
            scheme: SamplerScheme::UniformGrid { resolution },
        }
    }

    pub fn random(count: usize, seed: u64) -> Sampler {
        Sampler {
            scheme: SamplerScheme::RandomUniform { count, seed },
        }
    }

    /// Produce the point sequence for `space`, in deterministic order.
    pub fn points(&self, space: PhaseSpace) -> Result<Vec<Point>> {
        let dim = space.dimension();
        match self.scheme {
            SamplerScheme::UniformGrid { resolution } => {
                if resolution == 0 {
                    return Err(Error::EmptySampler);
                }
                let r = resolution;
                let step = 1.0 / r as f64;
                let total = r.pow(dim as u32);
                let mut out = Vec::with_capacity(total);
                let mut idx = vec![0usize; dim];
                for _ in 0..total {
                    let mut c = [0.0; 3];
                    for (k, &i) in idx.iter().enumerate() {
                        c[k] = i as f64 * step;
                    }
                    out.push(Point {
                        coords: c,
                        dim: dim as u8,
                    });
                    // row-major increment, last axis fastest
                    for k in (0..dim).rev() {
                        idx[k] += 1;
                        if idx[k] < r {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
                Ok(out)
            }
            SamplerScheme::RandomUniform { count, seed } => {
                if count == 0 {
                    return Err(Error::EmptySampler);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut out = Vec::with_capacity(count);
                for _ in 0..count {
                    let mut c = [0.0; 3];
                    for slot in c.iter_mut().take(dim) {
                        *slot = rng.gen::<f64>();
                    }
                    out.push(Point {
                        coords: c,
                        dim: dim as u8,
                    });
                }
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_identity_and_mod_one() {
        assert_eq!(wrap(0.0).unwrap(), 0.0);
        assert!((wrap(1.25).unwrap() - 0.25).abs() < 1e-15);
        assert!((wrap(-0.1).unwrap() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn wrap_rejects_non_finite() {
        assert!(matches!(wrap(f64::NAN), Err(Error::NonFiniteCoordinate)));
        assert!(matches!(
            wrap(f64::INFINITY),
            Err(Error::NonFiniteCoordinate)
        ));
    }

    #[test]
    fn wrap_is_idempotent() {
        for &c in &[0.0, 0.3, -2.7, 15.1, -1e-17, 0.999999999] {
            let w = wrap(c).unwrap();
            assert_eq!(wrap(w).unwrap(), w);
            assert!((0.0..1.0).contains(&w));
        }
    }

    #[test]
    fn circle_distance_wraps() {
        let x = Point::circle(0.05);
        let y = Point::circle(0.95);
        let d = distance(PhaseSpace::Circle, &x, &y).unwrap();
        assert!((d - 0.1).abs() < 1e-15);
        let z = Point::circle(0.0);
        assert_eq!(distance(PhaseSpace::Circle, &z, &z).unwrap(), 0.0);
    }

    #[test]
    fn torus_distance_both_axes_maximal() {
        let x = Point::torus(0.25, 0.25);
        let y = Point::torus(0.75, 0.75);
        let d = distance(PhaseSpace::Torus2, &x, &y).unwrap();
        assert!((d - 0.5_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn distance_rejects_space_mismatch() {
        let x = Point::circle(0.1);
        let y = Point::torus(0.1, 0.2);
        assert!(matches!(
            distance(PhaseSpace::Torus2, &x, &y),
            Err(Error::SpaceMismatch)
        ));
    }

    #[test]
    fn grid_sampler_circle() {
        let pts = Sampler::grid(4).points(PhaseSpace::Circle).unwrap();
        let got: Vec<f64> = pts.iter().map(|p| p.coords()[0]).collect();
        assert_eq!(got, vec![0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn grid_sampler_torus_lattice() {
        let pts = Sampler::grid(2).points(PhaseSpace::Torus2).unwrap();
        assert_eq!(pts.len(), 4);
        for p in &pts {
            for &c in p.coords() {
                assert!(c == 0.0 || c == 0.5);
            }
        }
    }

    #[test]
    fn random_sampler_is_deterministic() {
        let a = Sampler::random(3, 7).points(PhaseSpace::Circle).unwrap();
        let b = Sampler::random(3, 7).points(PhaseSpace::Circle).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_samplers_rejected() {
        assert!(matches!(
            Sampler::grid(0).points(PhaseSpace::Circle),
            Err(Error::EmptySampler)
        ));
        assert!(matches!(
            Sampler::random(0, 1).points(PhaseSpace::Circle),
            Err(Error::EmptySampler)
        ));
    }

    #[test]
    fn metric_axioms_on_sampled_triples() {
        for &space in &[
            PhaseSpace::Circle,
            PhaseSpace::Torus2,
            PhaseSpace::CircleTimesTorus2,
        ] {
            let pts = Sampler::random(25, 11).points(space).unwrap();
            for a in &pts {
                for b in &pts {
                    let dab = distance_unchecked(space, a, b);
                    let dba = distance_unchecked(space, b, a);
                    assert_eq!(dab, dba);
                    assert!(dab <= space.diameter() + 1e-15);
                    for c in &pts {
                        let dac = distance_unchecked(space, a, c);
                        let dcb = distance_unchecked(space, c, b);
                        assert!(dab <= dac + dcb + 1e-12);
                    }
                }
            }
        }
    }
}
