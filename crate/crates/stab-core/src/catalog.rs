//! Concrete diffeomorphisms: hyperbolic toral automorphisms, north-south
//! circle maps, derived-from-Anosov deformations, products and composites.
//!
//! Every map carries declared hyperbolicity metadata (expansiveness
//! constant on the non-wandering set, contraction rate, the name of its
//! spectral decomposition) and supports exact forward evaluation plus a
//! numerically certified inverse.

use serde::{Deserialize, Serialize};

use crate::geometry::{
    distance_unchecked, signed_axis_difference, wrap_unchecked, PhaseSpace, Point, Sampler,
};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// 2x2 integer matrices and the hyperbolic eigenframe
// ---------------------------------------------------------------------------

/// A 2×2 integer matrix acting on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix2(pub [[i64; 2]; 2]);

impl IntMatrix2 {
    pub fn det(&self) -> i64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn mul(&self, other: &IntMatrix2) -> IntMatrix2 {
        let a = self.0;
        let b = other.0;
        IntMatrix2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn identity() -> IntMatrix2 {
        IntMatrix2([[1, 0], [0, 1]])
    }

    pub fn pow(&self, n: u32) -> IntMatrix2 {
        let mut out = IntMatrix2::identity();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Integer inverse; exists exactly when `det = ±1`.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix2> {
        let d = self.det();
        if d != 1 && d != -1 {
            return None;
        }
        let m = self.0;
        Some(IntMatrix2([
            [d * m[1][1], -d * m[0][1]],
            [-d * m[1][0], d * m[0][0]],
        ]))
    }

    /// Matrix-vector product over the reals.
    #[inline]
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = self.0;
        [
            m[0][0] as f64 * v[0] + m[0][1] as f64 * v[1],
            m[1][0] as f64 * v[0] + m[1][1] as f64 * v[1],
        ]
    }
}

/// Stable/unstable eigenframe of a hyperbolic integer matrix, with the
/// dual (co-vector) frame for non-orthogonal projections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicFrame {
    pub e_s: [f64; 2],
    pub e_u: [f64; 2],
    pub dual_s: [f64; 2],
    pub dual_u: [f64; 2],
    pub lambda_s: f64,
    pub lambda_u: f64,
}

impl HyperbolicFrame {
    #[inline]
    pub fn stable_coordinate(&self, v: [f64; 2]) -> f64 {
        self.dual_s[0] * v[0] + self.dual_s[1] * v[1]
    }

    #[inline]
    pub fn unstable_coordinate(&self, v: [f64; 2]) -> f64 {
        self.dual_u[0] * v[0] + self.dual_u[1] * v[1]
    }

    #[inline]
    pub fn combine(&self, s: f64, u: f64) -> [f64; 2] {
        [
            s * self.e_s[0] + u * self.e_u[0],
            s * self.e_s[1] + u * self.e_u[1],
        ]
    }
}

fn unit_eigenvector(m: &IntMatrix2, lambda: f64) -> Result<[f64; 2]> {
    let a = m.0;
    // rows of (A - λI) are both orthogonal to the eigenvector
    let v1 = [a[0][1] as f64, lambda - a[0][0] as f64];
    let v2 = [lambda - a[1][1] as f64, a[1][0] as f64];
    let n1 = (v1[0] * v1[0] + v1[1] * v1[1]).sqrt();
    let n2 = (v2[0] * v2[0] + v2[1] * v2[1]).sqrt();
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    if n < 1e-12 {
        return Err(Error::NotHyperbolic);
    }
    let mut e = [v[0] / n, v[1] / n];
    // canonical sign: first nonzero component positive
    let lead = if e[0].abs() > 1e-12 { e[0] } else { e[1] };
    if lead < 0.0 {
        e = [-e[0], -e[1]];
    }
    Ok(e)
}

/// Eigenpairs `|λ_s| < 1 < |λ_u|` with the dual frame.
///
/// Rejects matrices with complex spectrum or an eigenvalue of modulus
/// within `1e-9` of 1.
pub fn stable_unstable_frame(m: &IntMatrix2) -> Result<HyperbolicFrame> {
    let tr = m.trace() as f64;
    let det = m.det() as f64;
    let disc = tr * tr - 4.0 * det;
    if disc <= 0.0 {
        return Err(Error::NotHyperbolic);
    }
    let root = disc.sqrt();
    let l1 = (tr + root) / 2.0;
    let l2 = (tr - root) / 2.0;
    let (lambda_s, lambda_u) = if l1.abs() < l2.abs() { (l1, l2) } else { (l2, l1) };
    if (lambda_s.abs() - 1.0).abs() < 1e-9 || (lambda_u.abs() - 1.0).abs() < 1e-9 {
        return Err(Error::NotHyperbolic);
    }
    if lambda_s.abs() >= 1.0 || lambda_u.abs() <= 1.0 {
        return Err(Error::NotHyperbolic);
    }
    let e_s = unit_eigenvector(m, lambda_s)?;
    let e_u = unit_eigenvector(m, lambda_u)?;
    let det_p = e_s[0] * e_u[1] - e_s[1] * e_u[0];
    if det_p.abs() < 1e-12 {
        return Err(Error::NotHyperbolic);
    }
    let dual_s = [e_u[1] / det_p, -e_u[0] / det_p];
    let dual_u = [-e_s[1] / det_p, e_s[0] / det_p];
    Ok(HyperbolicFrame {
        e_s,
        e_u,
        dual_s,
        dual_u,
        lambda_s,
        lambda_u,
    })
}

// ---------------------------------------------------------------------------
// Periodic point counts for linear automorphisms
// ---------------------------------------------------------------------------

/// Number of `n`-periodic points of a hyperbolic toral automorphism,
/// `|det(Aⁿ − I)|`.
pub fn periodic_point_count_linear(m: &IntMatrix2, n: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidParameter("period must be >= 1".into()));
    }
    if n > 60 {
        return Err(Error::InvalidParameter(
            "period too large for exact integer count".into(),
        ));
    }
    let a = m.pow(n);
    let d = (a.0[0][0] as i128 - 1) * (a.0[1][1] as i128 - 1)
        - (a.0[0][1] as i128) * (a.0[1][0] as i128);
    Ok(d.unsigned_abs() as u64)
}

/// Independent brute-force lattice count of `n`-periodic points, for
/// cross-checking [`periodic_point_count_linear`]. Exact integer
/// arithmetic; intended for `n ≤ 6`.
pub fn periodic_point_count_brute_force(m: &IntMatrix2, n: u32) -> Result<u64> {
    if n == 0 || n > 6 {
        return Err(Error::InvalidParameter(
            "brute-force count supports 1 <= n <= 6".into(),
        ));
    }
    let a = m.pow(n);
    let mm = [
        [a.0[0][0] - 1, a.0[0][1]],
        [a.0[1][0], a.0[1][1] - 1],
    ];
    let det = mm[0][0] * mm[1][1] - mm[0][1] * mm[1][0];
    if det == 0 {
        return Err(Error::NotHyperbolic);
    }
    // adj(M) * (p, q) gives det * x; x in [0,1)^2 iff each component of
    // adj(M)(p,q) lies in [0, det) after aligning signs.
    let adj = [[mm[1][1], -mm[0][1]], [-mm[1][0], mm[0][0]]];
    let lo = |row: [i64; 2]| row[0].min(0) + row[1].min(0);
    let hi = |row: [i64; 2]| row[0].max(0) + row[1].max(0);
    let mut count = 0u64;
    for p in lo(mm[0])..=hi(mm[0]) {
        for q in lo(mm[1])..=hi(mm[1]) {
            let n0 = adj[0][0] * p + adj[0][1] * q;
            let n1 = adj[1][0] * p + adj[1][1] * q;
            let inside = |num: i64| {
                if det > 0 {
                    (0..det).contains(&num)
                } else {
                    num <= 0 && num > det
                }
            };
            if inside(n0) && inside(n1) {
                count += 1;
            }
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Periodic perturbation fields
// ---------------------------------------------------------------------------

/// Harmonic kind of a Fourier term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Harmonic {
    Sin,
    Cos,
}

/// One term `coeff · sin/cos(2π (m x + n y))` of a periodic vector field.
///
/// A `Cos` term with zero frequency encodes a constant field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub freq: [i64; 2],
    pub coeff: [f64; 2],
    pub harmonic: Harmonic,
}

/// Smooth 1-periodic vector field on the torus.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FourierField {
    pub terms: Vec<FourierTerm>,
}

impl FourierField {
    /// The default perturbation `p(x, y) = (sin 2πy, 0) / 2π`.
    pub fn default_perturbation() -> FourierField {
        FourierField {
            terms: vec![FourierTerm {
                freq: [0, 1],
                coeff: [1.0 / (2.0 * std::f64::consts::PI), 0.0],
                harmonic: Harmonic::Sin,
            }],
        }
    }

    /// Constant field `p ≡ c`.
    pub fn constant(c: [f64; 2]) -> FourierField {
        FourierField {
            terms: vec![FourierTerm {
                freq: [0, 0],
                coeff: c,
                harmonic: Harmonic::Cos,
            }],
        }
    }

    #[inline]
    pub fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0, 0.0];
        for t in &self.terms {
            let phase =
                2.0 * std::f64::consts::PI * (t.freq[0] as f64 * x[0] + t.freq[1] as f64 * x[1]);
            let w = match t.harmonic {
                Harmonic::Sin => phase.sin(),
                Harmonic::Cos => phase.cos(),
            };
            out[0] += w * t.coeff[0];
            out[1] += w * t.coeff[1];
        }
        out
    }

    /// Jacobian matrix of the field at `x`.
    pub fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let mut j = [[0.0; 2]; 2];
        let tau = 2.0 * std::f64::consts::PI;
        for t in &self.terms {
            let phase = tau * (t.freq[0] as f64 * x[0] + t.freq[1] as f64 * x[1]);
            let dw = match t.harmonic {
                Harmonic::Sin => phase.cos(),
                Harmonic::Cos => -phase.sin(),
            };
            for (row, &c) in t.coeff.iter().enumerate() {
                j[row][0] += dw * tau * t.freq[0] as f64 * c;
                j[row][1] += dw * tau * t.freq[1] as f64 * c;
            }
        }
        j
    }

    /// Upper bound for the sup norm of the field.
    pub fn sup_bound(&self) -> f64 {
        let mut b = [0.0, 0.0];
        for t in &self.terms {
            b[0] += t.coeff[0].abs();
            b[1] += t.coeff[1].abs();
        }
        (b[0] * b[0] + b[1] * b[1]).sqrt()
    }
}

// ---------------------------------------------------------------------------
// Diffeomorphisms
// ---------------------------------------------------------------------------

/// Hyperbolicity metadata declared for a catalog map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityMeta {
    /// Expansiveness constant of the map restricted to its non-wandering set.
    pub epsilon0: f64,
    /// Contraction rate in (0, 1).
    pub lambda: f64,
    /// Hyperbolicity constant C ≥ 1.
    pub big_c: f64,
    /// Name of the declared spectral decomposition for the chains module.
    pub spectral_spec: String,
}

impl HyperbolicityMeta {
    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidParameter("lambda must lie in (0,1)".into()));
        }
        if self.big_c < 1.0 {
            return Err(Error::InvalidParameter("C must be >= 1".into()));
        }
        if self.epsilon0 <= 0.0 {
            return Err(Error::InvalidParameter("epsilon0 must be positive".into()));
        }
        Ok(())
    }
}

/// Derived-from-Anosov deformation data, cached with its eigenframe.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedFromAnosov {
    pub matrix: IntMatrix2,
    pub radius: f64,
    pub strength: f64,
    pub center: [f64; 2],
    pub frame: HyperbolicFrame,
}

/// Bump profile used by the derived-from-Anosov push.
///
/// `(1 - v²)⁴` on `[0, 1]`: flat at 0, C¹ at the support edge, and with
/// `min_v (φ + v φ′) ≈ -0.185` shallow enough that the pushed fiber maps
/// stay strictly increasing for push strengths up to `λ_s / 0.185`.
#[inline]
pub fn da_bump(v: f64) -> f64 {
    if v >= 1.0 {
        return 0.0;
    }
    let w = 1.0 - v * v;
    let w2 = w * w;
    w2 * w2
}

#[inline]
fn da_bump_derivative(v: f64) -> f64 {
    if v >= 1.0 {
        return 0.0;
    }
    let w = 1.0 - v * v;
    -8.0 * v * w * w * w
}

impl DerivedFromAnosov {
    /// Signed offset of `x` from the deformation center, in `[-0.5, 0.5)²`.
    #[inline]
    pub fn offset(&self, x: &Point) -> [f64; 2] {
        let c = x.coords();
        [
            signed_axis_difference(c[0], self.center[0]),
            signed_axis_difference(c[1], self.center[1]),
        ]
    }

    /// Stable-fiber image coordinate `s ↦ (λ_s + k φ(ρ/r)) s` at unstable
    /// coordinate `u`.
    #[inline]
    fn fiber_image(&self, s: f64, u: f64) -> f64 {
        let w = self.frame.combine(s, u);
        let rho = (w[0] * w[0] + w[1] * w[1]).sqrt();
        (self.frame.lambda_s + self.strength * da_bump(rho / self.radius)) * s
    }
}

/// Map body variants of the catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum DiffeoBody {
    LinearAnosov {
        matrix: IntMatrix2,
        inverse: IntMatrix2,
    },
    AffinePerturbedAnosov {
        matrix: IntMatrix2,
        inverse: IntMatrix2,
        perturbation: FourierField,
        epsilon: f64,
    },
    NorthSouthCircle {
        a: f64,
    },
    DerivedFromAnosov(DerivedFromAnosov),
    Product {
        circle: Box<Diffeo>,
        torus: Box<Diffeo>,
    },
    /// Composition `f₁^{n₁} ∘ f₂^{n₂} ∘ …` applied right to left.
    Composite {
        factors: Vec<(Diffeo, i64)>,
    },
}

/// An invertible self-map of a phase space with hyperbolicity metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Diffeo {
    pub name: String,
    pub space: PhaseSpace,
    pub body: DiffeoBody,
    pub meta: HyperbolicityMeta,
}

const INVERSE_TOL: f64 = 1e-13;
const INVERSE_CAP: usize = 200;

fn linear_apply(matrix: &IntMatrix2, x: &Point) -> Point {
    let c = x.coords();
    let v = matrix.apply([c[0], c[1]]);
    Point::torus(wrap_unchecked(v[0]), wrap_unchecked(v[1]))
}

impl Diffeo {
    /// Hyperbolic linear automorphism of the torus.
    pub fn linear_anosov(name: &str, matrix: IntMatrix2, meta: HyperbolicityMeta) -> Result<Diffeo> {
        meta.validate()?;
        if matrix.det().abs() != 1 {
            return Err(Error::InvalidMap(
                "linear map must have determinant ±1".into(),
            ));
        }
        stable_unstable_frame(&matrix)?;
        let inverse = matrix
            .inverse_unimodular()
            .ok_or_else(|| Error::InvalidMap("matrix is not unimodular".into()))?;
        Ok(Diffeo {
            name: name.into(),
            space: PhaseSpace::Torus2,
            body: DiffeoBody::LinearAnosov { matrix, inverse },
            meta,
        })
    }

    /// Perturbation `g = A + ε p` of a linear automorphism.
    pub fn affine_perturbed(
        name: &str,
        matrix: IntMatrix2,
        perturbation: FourierField,
        epsilon: f64,
        meta: HyperbolicityMeta,
    ) -> Result<Diffeo> {
        meta.validate()?;
        if !epsilon.is_finite() {
            return Err(Error::NonFiniteCoordinate);
        }
        stable_unstable_frame(&matrix)?;
        let inverse = matrix
            .inverse_unimodular()
            .ok_or_else(|| Error::InvalidMap("matrix is not unimodular".into()))?;
        let d = Diffeo {
            name: name.into(),
            space: PhaseSpace::Torus2,
            body: DiffeoBody::AffinePerturbedAnosov {
                matrix,
                inverse,
                perturbation,
                epsilon,
            },
            meta,
        };
        d.check_inverse_contract()?;
        Ok(d)
    }

    /// North-south circle map `θ ↦ θ + a sin(2πθ)`.
    pub fn north_south(name: &str, a: f64, meta: HyperbolicityMeta) -> Result<Diffeo> {
        meta.validate()?;
        let limit = 1.0 / (2.0 * std::f64::consts::PI);
        if !(a > 0.0 && a < limit) {
            return Err(Error::InvalidMap(format!(
                "north-south parameter must lie in (0, {limit})"
            )));
        }
        Ok(Diffeo {
            name: name.into(),
            space: PhaseSpace::Circle,
            body: DiffeoBody::NorthSouthCircle { a },
            meta,
        })
    }

    /// Derived-from-Anosov deformation: the linear map pushed along the
    /// stable direction inside a ball around a fixed point, turning it
    /// into a repeller while preserving the linear stable foliation.
    pub fn derived_from_anosov(
        name: &str,
        matrix: IntMatrix2,
        radius: f64,
        strength: f64,
        center: [f64; 2],
        meta: HyperbolicityMeta,
    ) -> Result<Diffeo> {
        meta.validate()?;
        if !(radius > 0.0 && radius < 0.2) {
            return Err(Error::InvalidMap(
                "bump radius must lie in (0, 0.2) to avoid wrap ambiguity".into(),
            ));
        }
        let frame = stable_unstable_frame(&matrix)?;
        if frame.lambda_s + strength <= 1.0 {
            return Err(Error::InvalidMap(
                "push strength too small: fixed point stays attracting along the fiber".into(),
            ));
        }
        // center must be a fixed point of the linear map mod 1
        let fixed = matrix.apply(center);
        for k in 0..2 {
            if signed_axis_difference(fixed[k], center[k]).abs() > 1e-12 {
                return Err(Error::InvalidMap("center is not a fixed point".into()));
            }
        }
        let da = DerivedFromAnosov {
            matrix,
            radius,
            strength,
            center,
            frame,
        };
        // numeric injectivity check on a grid of the support: the fiber
        // image s ↦ (λ_s + k φ(ρ/r)) s must be strictly increasing on
        // every unstable slice
        let slices = 41;
        let nodes = 201;
        for iu in 0..slices {
            let u = radius * (2.0 * iu as f64 / (slices - 1) as f64 - 1.0);
            let mut prev = f64::NEG_INFINITY;
            for is in 0..nodes {
                let s = 1.2 * radius * (2.0 * is as f64 / (nodes - 1) as f64 - 1.0);
                let img = da.fiber_image(s, u);
                if img <= prev {
                    return Err(Error::InvalidMap(
                        "derived-from-Anosov push is not injective on the bump support".into(),
                    ));
                }
                prev = img;
            }
        }
        let d = Diffeo {
            name: name.into(),
            space: PhaseSpace::Torus2,
            body: DiffeoBody::DerivedFromAnosov(da),
            meta,
        };
        d.check_inverse_contract()?;
        Ok(d)
    }

    /// Product map on `S¹ × T²`.
    pub fn product(name: &str, circle: Diffeo, torus: Diffeo, meta: HyperbolicityMeta) -> Result<Diffeo> {
        meta.validate()?;
        if circle.space != PhaseSpace::Circle || torus.space != PhaseSpace::Torus2 {
            return Err(Error::SpaceMismatch);
        }
        Ok(Diffeo {
            name: name.into(),
            space: PhaseSpace::CircleTimesTorus2,
            body: DiffeoBody::Product {
                circle: Box::new(circle),
                torus: Box::new(torus),
            },
            meta,
        })
    }

    /// Composite of integer powers, applied right to left.
    pub fn composite(name: &str, space: PhaseSpace, factors: Vec<(Diffeo, i64)>) -> Result<Diffeo> {
        for (f, _) in &factors {
            if f.space != space {
                return Err(Error::SpaceMismatch);
            }
        }
        Ok(Diffeo {
            name: name.into(),
            space,
            body: DiffeoBody::Composite { factors },
            meta: HyperbolicityMeta {
                epsilon0: 0.1,
                lambda: 0.5,
                big_c: 1.0,
                spectral_spec: "composite".into(),
            },
        })
    }

    /// The identity map of a space, as an empty composite.
    pub fn identity(space: PhaseSpace) -> Diffeo {
        Diffeo::composite("id", space, Vec::new()).expect("identity composite")
    }

    fn check_inverse_contract(&self) -> Result<()> {
        let sample = Sampler::random(200, 0x5eed).points(self.space)?;
        for x in &sample {
            let y = self.evaluate_inverse(x)?;
            let roundtrip = self.evaluate(&y)?;
            if distance_unchecked(self.space, &roundtrip, x) > 1e-10 {
                return Err(Error::InvalidMap(
                    "forward and inverse evaluation are not mutually inverse".into(),
                ));
            }
        }
        Ok(())
    }

    /// Forward evaluation.
    pub fn evaluate(&self, x: &Point) -> Result<Point> {
        if !x.lives_in(self.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.evaluate_unchecked(x))
    }

    #[inline]
    pub(crate) fn evaluate_unchecked(&self, x: &Point) -> Point {
        match &self.body {
            DiffeoBody::LinearAnosov { matrix, .. } => linear_apply(matrix, x),
            DiffeoBody::AffinePerturbedAnosov {
                matrix,
                perturbation,
                epsilon,
                ..
            } => {
                let c = x.coords();
                let lin = matrix.apply([c[0], c[1]]);
                let p = perturbation.eval([c[0], c[1]]);
                Point::torus(
                    wrap_unchecked(lin[0] + epsilon * p[0]),
                    wrap_unchecked(lin[1] + epsilon * p[1]),
                )
            }
            DiffeoBody::NorthSouthCircle { a } => {
                let theta = x.coords()[0];
                Point::circle(wrap_unchecked(
                    theta + a * (2.0 * std::f64::consts::PI * theta).sin(),
                ))
            }
            DiffeoBody::DerivedFromAnosov(da) => {
                let w = da.offset(x);
                let rho = (w[0] * w[0] + w[1] * w[1]).sqrt();
                if rho >= da.radius {
                    // exactly the linear map outside the support
                    return linear_apply(&da.matrix, x);
                }
                let s = da.frame.stable_coordinate(w);
                let push = da.strength * da_bump(rho / da.radius) * s;
                let lin = da.matrix.apply(w);
                Point::torus(
                    wrap_unchecked(da.center[0] + lin[0] + push * da.frame.e_s[0]),
                    wrap_unchecked(da.center[1] + lin[1] + push * da.frame.e_s[1]),
                )
            }
            DiffeoBody::Product { circle, torus } => {
                let (xc, xt) = x.split_product();
                let yc = circle.evaluate_unchecked(&xc);
                let yt = torus.evaluate_unchecked(&xt);
                Point::join_product(&yc, &yt)
            }
            DiffeoBody::Composite { factors } => {
                let mut y = *x;
                for (f, n) in factors.iter().rev() {
                    y = f.apply_power(&y, *n).expect("composite factor evaluation");
                }
                y
            }
        }
    }

    /// Inverse evaluation: returns `y` with `d(f(y), x) < 1e-12`.
    pub fn evaluate_inverse(&self, x: &Point) -> Result<Point> {
        if !x.lives_in(self.space) {
            return Err(Error::SpaceMismatch);
        }
        self.evaluate_inverse_unchecked(x)
    }

    pub(crate) fn evaluate_inverse_unchecked(&self, x: &Point) -> Result<Point> {
        match &self.body {
            DiffeoBody::LinearAnosov { inverse, .. } => Ok(linear_apply(inverse, x)),
            DiffeoBody::AffinePerturbedAnosov {
                matrix,
                inverse,
                perturbation,
                epsilon,
            } => {
                // Newton iteration from the linear inverse
                let mut z = linear_apply(inverse, x);
                for _ in 0..INVERSE_CAP {
                    let img = self.evaluate_unchecked(&z);
                    let r = [
                        signed_axis_difference(img.coords()[0], x.coords()[0]),
                        signed_axis_difference(img.coords()[1], x.coords()[1]),
                    ];
                    let err = (r[0] * r[0] + r[1] * r[1]).sqrt();
                    if err < INVERSE_TOL {
                        return Ok(z);
                    }
                    let zc = z.coords();
                    let jp = perturbation.jacobian([zc[0], zc[1]]);
                    let m = matrix.0;
                    let j = [
                        [m[0][0] as f64 + epsilon * jp[0][0], m[0][1] as f64 + epsilon * jp[0][1]],
                        [m[1][0] as f64 + epsilon * jp[1][0], m[1][1] as f64 + epsilon * jp[1][1]],
                    ];
                    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                    if det.abs() < 1e-12 {
                        return Err(Error::InverseSolveFailed);
                    }
                    let dx = (r[0] * j[1][1] - r[1] * j[0][1]) / det;
                    let dy = (r[1] * j[0][0] - r[0] * j[1][0]) / det;
                    z = Point::torus(
                        wrap_unchecked(zc[0] - dx),
                        wrap_unchecked(zc[1] - dy),
                    );
                }
                Err(Error::InverseSolveFailed)
            }
            DiffeoBody::NorthSouthCircle { a } => {
                let target = x.coords()[0];
                // solve F(θ) = θ + a sin 2πθ = target on the lift;
                // F is strictly increasing so θ ∈ [target - a, target + a]
                let mut lo = target - a;
                let mut hi = target + a;
                let f = |t: f64| t + a * (2.0 * std::f64::consts::PI * t).sin() - target;
                let fp = |t: f64| 1.0 + 2.0 * std::f64::consts::PI * a
                    * (2.0 * std::f64::consts::PI * t).cos();
                let mut t = target;
                for _ in 0..INVERSE_CAP {
                    let val = f(t);
                    if val.abs() < 1e-15 {
                        return Ok(Point::circle(wrap_unchecked(t)));
                    }
                    if val > 0.0 {
                        hi = t;
                    } else {
                        lo = t;
                    }
                    let newton = t - val / fp(t);
                    // bisection fallback when Newton leaves the bracket
                    t = if newton > lo && newton < hi {
                        newton
                    } else {
                        0.5 * (lo + hi)
                    };
                    if hi - lo < 1e-16 {
                        return Ok(Point::circle(wrap_unchecked(t)));
                    }
                }
                Err(Error::InverseSolveFailed)
            }
            DiffeoBody::DerivedFromAnosov(da) => {
                let inverse = da
                    .matrix
                    .inverse_unimodular()
                    .ok_or_else(|| Error::InvalidMap("matrix is not unimodular".into()))?;
                let x_lin = linear_apply(&inverse, x);
                let w_lin = da.offset(&x_lin);
                let rho_lin = (w_lin[0] * w_lin[0] + w_lin[1] * w_lin[1]).sqrt();
                if rho_lin >= da.radius {
                    // the preimage lies outside the support, where the map
                    // is exactly linear
                    return Ok(x_lin);
                }
                // preimage is in the support: its unstable coordinate
                // matches the linear preimage, the stable coordinate
                // solves the monotone fiber equation
                let u = da.frame.unstable_coordinate(w_lin);
                let w_y = da.offset(x);
                let target = da.frame.stable_coordinate(w_y);
                let bound = target.abs() / da.frame.lambda_s.abs().max(1e-6) + 1.0;
                let mut lo = -bound;
                let mut hi = bound;
                for _ in 0..INVERSE_CAP {
                    let mid = 0.5 * (lo + hi);
                    let val = da.fiber_image(mid, u) - target;
                    if val.abs() < 1e-16 || hi - lo < 1e-17 {
                        let w = da.frame.combine(mid, u);
                        return Ok(Point::torus(
                            wrap_unchecked(da.center[0] + w[0]),
                            wrap_unchecked(da.center[1] + w[1]),
                        ));
                    }
                    if val > 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let mid = 0.5 * (lo + hi);
                let w = da.frame.combine(mid, u);
                Ok(Point::torus(
                    wrap_unchecked(da.center[0] + w[0]),
                    wrap_unchecked(da.center[1] + w[1]),
                ))
            }
            DiffeoBody::Product { circle, torus } => {
                let (xc, xt) = x.split_product();
                let yc = circle.evaluate_inverse_unchecked(&xc)?;
                let yt = torus.evaluate_inverse_unchecked(&xt)?;
                Ok(Point::join_product(&yc, &yt))
            }
            DiffeoBody::Composite { factors } => {
                let mut y = *x;
                for (f, n) in factors.iter() {
                    y = f.apply_power(&y, -n)?;
                }
                Ok(y)
            }
        }
    }

    /// Apply `f^n` (negative `n` uses the inverse).
    pub fn apply_power(&self, x: &Point, n: i64) -> Result<Point> {
        let mut y = *x;
        if n >= 0 {
            for _ in 0..n {
                y = self.evaluate_unchecked(&y);
            }
        } else {
            for _ in 0..(-n) {
                y = self.evaluate_inverse_unchecked(&y)?;
            }
        }
        Ok(y)
    }

    /// Orbit segment `fⁿ(x)` for `n` in `[n_min, n_max]`, computed from
    /// `n = 0` outward.
    pub fn orbit(&self, x: &Point, n_min: i64, n_max: i64) -> Result<Vec<(i64, Point)>> {
        if n_min > n_max {
            return Err(Error::InvalidParameter("orbit range is empty".into()));
        }
        if !x.lives_in(self.space) {
            return Err(Error::SpaceMismatch);
        }
        let mut forward = Vec::new();
        if n_max >= 0 {
            let mut y = *x;
            for n in 0..=n_max {
                if n >= n_min.max(0) {
                    forward.push((n, y));
                }
                if n < n_max {
                    y = self.evaluate_unchecked(&y);
                }
            }
        }
        let mut backward = Vec::new();
        if n_min < 0 {
            let mut y = *x;
            for n in 1..=(-n_min) {
                y = self.evaluate_inverse_unchecked(&y)?;
                if -n <= n_max {
                    backward.push((-n, y));
                }
            }
        }
        backward.reverse();
        backward.extend(forward);
        Ok(backward)
    }
}

// ---------------------------------------------------------------------------
// Built-in catalog and JSON catalog files
// ---------------------------------------------------------------------------

/// The Fibonacci-style cat map matrix `[[2,1],[1,1]]`.
pub fn cat_matrix() -> IntMatrix2 {
    IntMatrix2([[2, 1], [1, 1]])
}

/// Default catalog parameters.
pub mod defaults {
    pub const NORTH_SOUTH_A: f64 = 0.1;
    pub const DA_RADIUS: f64 = 0.15;
    pub const DA_STRENGTH: f64 = 1.0;
    pub const MOSER_EPSILON: f64 = 0.01;
}

/// Built-in `cat` map.
pub fn cat_map() -> Diffeo {
    Diffeo::linear_anosov(
        "cat",
        cat_matrix(),
        HyperbolicityMeta {
            epsilon0: 0.3,
            lambda: 0.382,
            big_c: 1.0,
            spectral_spec: "cat".into(),
        },
    )
    .expect("builtin cat map")
}

/// Built-in north-south circle map with `a = 0.1`.
pub fn north_south_map() -> Diffeo {
    Diffeo::north_south(
        "northsouth",
        defaults::NORTH_SOUTH_A,
        HyperbolicityMeta {
            epsilon0: 0.45,
            lambda: 0.63,
            big_c: 1.0,
            spectral_spec: "northsouth".into(),
        },
    )
    .expect("builtin north-south map")
}

/// Built-in derived-from-Anosov deformation of the cat map.
pub fn derived_from_anosov_map() -> Diffeo {
    Diffeo::derived_from_anosov(
        "da",
        cat_matrix(),
        defaults::DA_RADIUS,
        defaults::DA_STRENGTH,
        [0.0, 0.0],
        HyperbolicityMeta {
            epsilon0: 0.3,
            lambda: 0.382,
            big_c: 1.0,
            spectral_spec: "da".into(),
        },
    )
    .expect("builtin derived-from-Anosov map")
}

/// Built-in product map `northsouth × cat` on `S¹ × T²`.
pub fn product_map() -> Diffeo {
    Diffeo::product(
        "product",
        north_south_map(),
        cat_map(),
        HyperbolicityMeta {
            epsilon0: 0.3,
            lambda: 0.63,
            big_c: 1.0,
            spectral_spec: "product".into(),
        },
    )
    .expect("builtin product map")
}

/// Built-in perturbed cat map `A + ε p` with the default perturbation.
pub fn perturbed_cat_map(epsilon: f64) -> Result<Diffeo> {
    Diffeo::affine_perturbed(
        "cat-perturbed",
        cat_matrix(),
        FourierField::default_perturbation(),
        epsilon,
        HyperbolicityMeta {
            epsilon0: 0.25,
            lambda: 0.4,
            big_c: 1.0,
            spectral_spec: "cat".into(),
        },
    )
}

/// All built-in catalog maps.
pub fn builtin_catalog() -> Vec<Diffeo> {
    vec![
        cat_map(),
        north_south_map(),
        derived_from_anosov_map(),
        product_map(),
    ]
}

/// Look up a built-in map by name.
pub fn builtin(name: &str) -> Result<Diffeo> {
    match name {
        "cat" => Ok(cat_map()),
        "northsouth" => Ok(north_south_map()),
        "da" => Ok(derived_from_anosov_map()),
        "product" => Ok(product_map()),
        other => Err(Error::InvalidParameter(format!(
            "unknown catalog map '{other}'"
        ))),
    }
}

/// Serializable body description for catalog files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodySpec {
    LinearAnosov {
        matrix: [[i64; 2]; 2],
    },
    AffinePerturbedAnosov {
        matrix: [[i64; 2]; 2],
        epsilon: f64,
        perturbation: Vec<FourierTerm>,
    },
    NorthSouthCircle {
        a: f64,
    },
    DerivedFromAnosov {
        matrix: [[i64; 2]; 2],
        radius: f64,
        strength: f64,
        center: [f64; 2],
    },
    Product {
        circle: Box<BodySpec>,
        torus: Box<BodySpec>,
    },
}

/// One named map in a catalog file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub body: BodySpec,
    pub metadata: HyperbolicityMeta,
}

/// A catalog file: a list of named maps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogFile {
    pub maps: Vec<CatalogEntry>,
}

impl CatalogEntry {
    /// Construct the runtime map, running all construction-time checks.
    pub fn build(&self) -> Result<Diffeo> {
        build_body(&self.name, &self.body, &self.metadata)
    }
}

fn build_body(name: &str, body: &BodySpec, meta: &HyperbolicityMeta) -> Result<Diffeo> {
    match body {
        BodySpec::LinearAnosov { matrix } => {
            Diffeo::linear_anosov(name, IntMatrix2(*matrix), meta.clone())
        }
        BodySpec::AffinePerturbedAnosov {
            matrix,
            epsilon,
            perturbation,
        } => Diffeo::affine_perturbed(
            name,
            IntMatrix2(*matrix),
            FourierField {
                terms: perturbation.clone(),
            },
            *epsilon,
            meta.clone(),
        ),
        BodySpec::NorthSouthCircle { a } => Diffeo::north_south(name, *a, meta.clone()),
        BodySpec::DerivedFromAnosov {
            matrix,
            radius,
            strength,
            center,
        } => Diffeo::derived_from_anosov(
            name,
            IntMatrix2(*matrix),
            *radius,
            *strength,
            *center,
            meta.clone(),
        ),
        BodySpec::Product { circle, torus } => {
            let c = build_body(&format!("{name}.circle"), circle, meta)?;
            let t = build_body(&format!("{name}.torus"), torus, meta)?;
            Diffeo::product(name, c, t, meta.clone())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::distance;

    #[test]
    fn cat_map_fixed_point_and_arithmetic() {
        let f = cat_map();
        let origin = Point::torus(0.0, 0.0);
        assert_eq!(f.evaluate(&origin).unwrap(), origin);
        let y = f.evaluate(&Point::torus(0.5, 0.5)).unwrap();
        assert!((y.coords()[0] - 0.5).abs() < 1e-15);
        assert!(y.coords()[1].abs() < 1e-15);
    }

    #[test]
    fn cat_map_inverse_closed_form() {
        let f = cat_map();
        let y = f.evaluate_inverse(&Point::torus(0.5, 0.0)).unwrap();
        assert!((y.coords()[0] - 0.5).abs() < 1e-15);
        assert!((y.coords()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn north_south_forward_and_inverse() {
        let f = north_south_map();
        let y = f.evaluate(&Point::circle(0.25)).unwrap();
        assert!((y.coords()[0] - 0.35).abs() < 1e-14);
        let x = f.evaluate_inverse(&Point::circle(0.35)).unwrap();
        assert!((x.coords()[0] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn north_south_derivative_positive_on_fine_grid() {
        let a = defaults::NORTH_SOUTH_A;
        for i in 0..20_000 {
            let theta = i as f64 / 20_000.0;
            let d = 1.0
                + 2.0 * std::f64::consts::PI * a * (2.0 * std::f64::consts::PI * theta).cos();
            assert!(d > 0.0, "derivative non-positive at {theta}");
        }
    }

    #[test]
    fn inverse_contract_on_catalog_maps() {
        for f in builtin_catalog() {
            let pts = Sampler::random(500, 42).points(f.space).unwrap();
            for x in &pts {
                let y = f.evaluate_inverse(x).unwrap();
                let back = f.evaluate(&y).unwrap();
                assert!(
                    distance(f.space, &back, x).unwrap() < 1e-10,
                    "inverse contract failed for {}",
                    f.name
                );
            }
        }
    }

    #[test]
    fn orbit_of_fixed_point() {
        let f = cat_map();
        let orbit = f.orbit(&Point::torus(0.0, 0.0), -3, 3).unwrap();
        assert_eq!(orbit.len(), 7);
        for (n, p) in &orbit {
            assert_eq!(*p, Point::torus(0.0, 0.0), "moved at n={n}");
        }
        assert_eq!(orbit.first().unwrap().0, -3);
        assert_eq!(orbit.last().unwrap().0, 3);
    }

    #[test]
    fn north_south_orbit_converges_to_poles() {
        let f = north_south_map();
        let orbit = f.orbit(&Point::circle(0.25), -60, 200).unwrap();
        let mut prev_forward = 0.25;
        for (n, p) in &orbit {
            let theta = p.coords()[0];
            if *n >= 0 {
                assert!(theta >= prev_forward - 1e-12);
                prev_forward = theta;
            }
        }
        let last = orbit.last().unwrap().1.coords()[0];
        assert!((last - 0.5).abs() < 1e-6, "forward limit S=0.5, got {last}");
        let first = orbit.first().unwrap().1.coords()[0];
        assert!(first < 0.01, "backward limit N=0, got {first}");
    }

    #[test]
    fn periodic_counts_match_examples_and_oracle() {
        let a = cat_matrix();
        assert_eq!(periodic_point_count_linear(&a, 1).unwrap(), 1);
        assert_eq!(periodic_point_count_linear(&a, 2).unwrap(), 5);
        assert_eq!(periodic_point_count_linear(&a, 3).unwrap(), 16);
        for n in 1..=6 {
            assert_eq!(
                periodic_point_count_linear(&a, n).unwrap(),
                periodic_point_count_brute_force(&a, n).unwrap(),
                "mismatch at period {n}"
            );
        }
    }

    #[test]
    fn frame_matches_hand_computation() {
        let frame = stable_unstable_frame(&cat_matrix()).unwrap();
        let sqrt5 = 5.0_f64.sqrt();
        assert!((frame.lambda_u - (3.0 + sqrt5) / 2.0).abs() < 1e-12);
        assert!((frame.lambda_s - (3.0 - sqrt5) / 2.0).abs() < 1e-12);
        assert!((frame.lambda_s * frame.lambda_u - 1.0).abs() < 1e-12);
        // e_u ∝ (1, (√5−1)/2)
        let ratio = frame.e_u[1] / frame.e_u[0];
        assert!((ratio - (sqrt5 - 1.0) / 2.0).abs() < 1e-12);
        // dual frame inverts the column frame
        assert!((frame.dual_s[0] * frame.e_s[0] + frame.dual_s[1] * frame.e_s[1] - 1.0).abs() < 1e-12);
        assert!((frame.dual_s[0] * frame.e_u[0] + frame.dual_s[1] * frame.e_u[1]).abs() < 1e-12);
    }

    #[test]
    fn non_hyperbolic_matrices_rejected() {
        assert!(matches!(
            stable_unstable_frame(&IntMatrix2([[1, 0], [0, 1]])),
            Err(Error::NotHyperbolic)
        ));
        assert!(matches!(
            stable_unstable_frame(&IntMatrix2([[0, -1], [1, 0]])),
            Err(Error::NotHyperbolic)
        ));
        assert!(Diffeo::linear_anosov(
            "bad",
            IntMatrix2([[2, 0], [0, 2]]),
            cat_map().meta.clone()
        )
        .is_err());
    }

    #[test]
    fn da_equals_cat_outside_support_exactly() {
        let da = derived_from_anosov_map();
        let cat = cat_map();
        let pts = Sampler::random(5_000, 9).points(PhaseSpace::Torus2).unwrap();
        for x in &pts {
            let w = match &da.body {
                DiffeoBody::DerivedFromAnosov(d) => d.offset(x),
                _ => unreachable!(),
            };
            if (w[0] * w[0] + w[1] * w[1]).sqrt() >= defaults::DA_RADIUS {
                assert_eq!(da.evaluate(x).unwrap(), cat.evaluate(x).unwrap());
            }
        }
    }

    #[test]
    fn da_rejects_insufficient_push() {
        let err = Diffeo::derived_from_anosov(
            "weak",
            cat_matrix(),
            0.15,
            0.2,
            [0.0, 0.0],
            cat_map().meta.clone(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn da_center_is_repelling_along_fiber() {
        let da = derived_from_anosov_map();
        let frame = stable_unstable_frame(&cat_matrix()).unwrap();
        // a point on the stable axis close to the center moves outward
        let s0 = 1e-4;
        let w = frame.combine(s0, 0.0);
        let x = Point::torus(wrap_unchecked(w[0]), wrap_unchecked(w[1]));
        let y = da.evaluate(&x).unwrap();
        let wy = [
            signed_axis_difference(y.coords()[0], 0.0),
            signed_axis_difference(y.coords()[1], 0.0),
        ];
        let s1 = frame.stable_coordinate(wy);
        assert!(s1 > s0 * 1.3, "fiber coordinate should expand: {s0} -> {s1}");
    }

    #[test]
    fn composite_and_product_evaluate() {
        let f = cat_map();
        let sq = Diffeo::composite("cat^2", PhaseSpace::Torus2, vec![(f.clone(), 2)]).unwrap();
        let x = Point::torus(0.3, 0.7);
        let expect = f.evaluate(&f.evaluate(&x).unwrap()).unwrap();
        assert_eq!(sq.evaluate(&x).unwrap(), expect);

        let p = product_map();
        let z = Point::product(0.25, 0.3, 0.7);
        let img = p.evaluate(&z).unwrap();
        assert!((img.coords()[0] - 0.35).abs() < 1e-14);
        let (_, t) = img.split_product();
        assert_eq!(t, cat_map().evaluate(&Point::torus(0.3, 0.7)).unwrap());
    }

    #[test]
    fn catalog_file_roundtrip() {
        let file = CatalogFile {
            maps: vec![CatalogEntry {
                name: "cat".into(),
                body: BodySpec::LinearAnosov {
                    matrix: [[2, 1], [1, 1]],
                },
                metadata: cat_map().meta.clone(),
            }],
        };
        let text = serde_json::to_string(&file).unwrap();
        let parsed: CatalogFile = serde_json::from_str(&text).unwrap();
        let f = parsed.maps[0].build().unwrap();
        assert_eq!(f.space, PhaseSpace::Torus2);
    }
}
