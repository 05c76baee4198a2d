//! Intrinsic metric of the unit sphere recovered from the Euclidean ball.
//!
//! For `A, B` on the sphere and a third surface point `C`, the plane through
//! `A, B, C` cuts the sphere in a circle. Points of that circle are ordered by
//! `τ ∈ [0, 1]` through
//!
//! ```text
//! ρ_E(A, R) (1 − τ) = ρ_E(B, R) τ
//! ```
//!
//! which has one root on each of the two arcs between `A` and `B`. The root with
//! the smaller `ρ_E(A, R)` is kept (this is always the minor arc). The length of
//! the resulting curve is accumulated from chord lengths, and the infimum over
//! `C` approximates the great-circle distance `2 arcsin(ρ_E / 2)`.
//!
//! On the circle with centre `c`, radius `r` and `A` at angle 0, a point at
//! angle `φ` has `ρ_E(A, R) = 2r |sin(φ/2)|`, so with `β` half the angle of `B`
//! along the chosen arc the root is `φ/2 = atan2(τ sin β, 1 − τ + τ cos β)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub const DEFAULT_QUADRATURE_STEPS: usize = 4096;
pub const DEFAULT_CANDIDATES: usize = 512;
pub const MIN_QUADRATURE_STEPS: usize = 16;

const UNIT_SLACK: f64 = 1e-9;
const DISTINCT_EPS: f64 = 1e-12;

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// Euclidean chord length ρ_E.
pub fn chord(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

/// Great-circle distance `2 arcsin(ρ_E / 2)` between unit vectors.
pub fn great_circle_distance(a: Vec3, b: Vec3) -> f64 {
    2.0 * (chord(a, b) / 2.0).min(1.0).asin()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicCurvePoint {
    pub tau: f64,
    pub position: Vec3,
    /// 1: the arc swept with increasing angle from `A`; 2: the other arc.
    pub branch: u8,
}

/// The circle through three surface points with `A` at angle 0.
#[derive(Debug, Clone, Copy)]
struct Circle {
    center: Vec3,
    radius: f64,
    u: Vec3,
    v: Vec3,
    /// Half of `B`'s angle along branch 1 (in `(0, π)`) and along branch 2 (in `(−π, 0)`).
    half_b: [f64; 2],
}

fn check_unit(p: Vec3, name: &str) -> Result<()> {
    if p.iter().any(|v| !v.is_finite()) || (dot(p, p) - 1.0).abs() > UNIT_SLACK {
        return Err(Error::InvalidArgument(format!(
            "{name} = {p:?} is not a unit vector"
        )));
    }
    Ok(())
}

impl Circle {
    fn through(a: Vec3, b: Vec3, c: Vec3) -> Result<Self> {
        check_unit(a, "A")?;
        check_unit(b, "B")?;
        check_unit(c, "C")?;
        if chord(a, b) <= DISTINCT_EPS || chord(a, c) <= DISTINCT_EPS || chord(b, c) <= DISTINCT_EPS
        {
            return Err(Error::InvalidArgument("A, B and C must be distinct".into()));
        }
        let (ea, eb) = (sub(a, c), sub(b, c));
        let n = cross(ea, eb);
        let n2 = dot(n, n);
        if n2 <= DISTINCT_EPS * DISTINCT_EPS * dot(ea, ea) * dot(eb, eb) {
            return Err(Error::CollinearPoints);
        }
        let offset = scale(
            cross(sub(scale(eb, dot(ea, ea)), scale(ea, dot(eb, eb))), n),
            1.0 / (2.0 * n2),
        );
        let center = add(c, offset);
        let radius = chord(a, center);
        let u = scale(sub(a, center), 1.0 / radius);
        let v = cross(normalize(n), u);
        let rel = sub(b, center);
        let mut phi_b = dot(rel, v).atan2(dot(rel, u));
        if phi_b <= 0.0 {
            phi_b += 2.0 * PI;
        }
        Ok(Self {
            center,
            radius,
            u,
            v,
            half_b: [phi_b / 2.0, (phi_b - 2.0 * PI) / 2.0],
        })
    }

    /// Root of the ordering equation on one branch: (half-angle, position).
    fn root(&self, tau: f64, branch: usize) -> (f64, Vec3) {
        let beta = self.half_b[branch];
        let alpha = (tau * beta.sin()).atan2(1.0 - tau + tau * beta.cos());
        let phi = 2.0 * alpha;
        let p = add(
            self.center,
            scale(
                add(scale(self.u, phi.cos()), scale(self.v, phi.sin())),
                self.radius,
            ),
        );
        (alpha, p)
    }

    /// `ρ_E(A, R)` for a root at half-angle `alpha`.
    fn dist_from_a(&self, alpha: f64) -> f64 {
        2.0 * self.radius * alpha.sin().abs()
    }
}

fn ordered_points(circle: &Circle, taus: &[f64]) -> Result<Vec<GeodesicCurvePoint>> {
    let pick = |tau: f64| {
        let (a0, p0) = circle.root(tau, 0);
        let (a1, p1) = circle.root(tau, 1);
        (circle.dist_from_a(a0), p0, circle.dist_from_a(a1), p1)
    };
    let (d0, _, d1, _) = pick(0.5);
    let mut current = if d1 < d0 { 1 } else { 0 };
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidArgument(format!(
                "tau = {tau} outside [0, 1]"
            )));
        }
        let (d0, p0, d1, p1) = pick(tau);
        let (dc, do_) = if current == 0 { (d0, d1) } else { (d1, d0) };
        if do_ < dc - 1e-12 * (1.0 + dc) {
            if chord(p0, p1) > 1e-9 && tau > 0.0 && tau < 1.0 && !out.is_empty() {
                return Err(Error::BranchSwitch { tau });
            }
            current = 1 - current;
        }
        let position = if current == 0 { p0 } else { p1 };
        out.push(GeodesicCurvePoint {
            tau,
            position,
            branch: current as u8 + 1,
        });
    }
    Ok(out)
}

/// Points `R_AB(τ, C)` on the circle through `A, B, C`, following the minor arc.
pub fn curve_points(a: Vec3, b: Vec3, c: Vec3, taus: &[f64]) -> Result<Vec<GeodesicCurvePoint>> {
    let circle = Circle::through(a, b, c)?;
    ordered_points(&circle, taus)
}

/// Length of the curve `R_AB(·, C)` by chord-sum quadrature over uniform `τ` steps.
pub fn curve_length(a: Vec3, b: Vec3, c: Vec3, quadrature_steps: usize) -> Result<f64> {
    if quadrature_steps < MIN_QUADRATURE_STEPS {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least {MIN_QUADRATURE_STEPS} steps, got {quadrature_steps}"
        )));
    }
    let circle = Circle::through(a, b, c)?;
    let taus: Vec<f64> = (0..=quadrature_steps)
        .map(|k| k as f64 / quadrature_steps as f64)
        .collect();
    let pts = ordered_points(&circle, &taus)?;
    Ok(pts
        .windows(2)
        .map(|w| chord(w[0].position, w[1].position))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicEstimate {
    pub length: f64,
    pub best_c: Vec3,
    pub best_index: usize,
    pub evaluated: usize,
}

/// Minimum curve length over the candidate third points.
///
/// Candidates coinciding with `A` or `B` (or otherwise unusable) are skipped.
pub fn intrinsic_metric(
    a: Vec3,
    b: Vec3,
    candidate_cs: &[Vec3],
    quadrature_steps: usize,
) -> Result<IntrinsicEstimate> {
    check_unit(a, "A")?;
    check_unit(b, "B")?;
    if chord(a, b) <= DISTINCT_EPS {
        return Err(Error::InvalidArgument("A and B must be distinct".into()));
    }
    if quadrature_steps < MIN_QUADRATURE_STEPS {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least {MIN_QUADRATURE_STEPS} steps, got {quadrature_steps}"
        )));
    }
    let lengths: Vec<Option<f64>> = candidate_cs
        .par_iter()
        .map(|&c| curve_length(a, b, c, quadrature_steps).ok())
        .collect();
    let mut best: Option<(usize, f64)> = None;
    let mut evaluated = 0;
    for (i, l) in lengths.iter().enumerate() {
        if let Some(l) = *l {
            evaluated += 1;
            if best.is_none_or(|(_, b)| l < b) {
                best = Some((i, l));
            }
        }
    }
    let (best_index, length) = best.ok_or_else(|| {
        Error::InvalidArgument("no usable third point among the candidates".into())
    })?;
    Ok(IntrinsicEstimate {
        length,
        best_c: candidate_cs[best_index],
        best_index,
        evaluated,
    })
}

/// Quasi-uniform sample of `n` points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - y * y).max(0.0).sqrt();
            let theta = golden * i as f64;
            [r * theta.cos(), y, r * theta.sin()]
        })
        .collect()
}

/// A point on the great circle through `a` and `b`, distinct from both.
pub fn great_circle_point(a: Vec3, b: Vec3) -> Vec3 {
    let mid = add(a, b);
    if norm(mid) > 1e-6 {
        return normalize(mid);
    }
    // antipodal: every plane through a and b contains the centre
    let helper = if a[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    normalize(cross(a, helper))
}

/// Fibonacci sample plus the great-circle point for `(a, b)`.
pub fn default_candidates(a: Vec3, b: Vec3, count: usize) -> Vec<Vec3> {
    let mut cs = fibonacci_sphere(count);
    cs.push(great_circle_point(a, b));
    cs
}

/// Seeded uniform unit vectors (rejection sampling from the cube).
pub fn random_unit_vectors(count: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p: Vec3 = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n2 = dot(p, p);
        if n2 > 1e-6 && n2 <= 1.0 {
            out.push(normalize(p));
        }
    }
    out
}

/// Seeded pairs of distinct unit vectors.
pub fn random_pairs(count: usize, seed: u64) -> Vec<(Vec3, Vec3)> {
    random_unit_vectors(2 * count, seed)
        .chunks(2)
        .map(|c| (c[0], c[1]))
        .collect()
}
