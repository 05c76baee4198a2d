//! Scalar σ-products, the F_n determinant series and multivectors.
//!
//! Everything here is derived from σ alone. The scalar σ-product of two
//! vectors with a common origin is
//!
//! ```text
//! Γ(P0, P1, P2) = σ(P0,P1) + σ(P0,P2) − σ(P1,P2)
//! ```
//!
//! and the product of two n-th order multivectors sharing their origin is
//! `det ‖Γ(P0, Pi, Qk)‖`. `F_n` is the product of a multivector with itself;
//! in a proper Euclidean space it equals `(n! · volume)²` of the simplex.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Square;
use crate::sigma::{FiniteSigmaSpace, PointId, WorldFunction};
use crate::tolerance::{Sign, TolerancePolicy};

pub fn gamma(wf: &WorldFunction, p0: PointId, p1: PointId, p2: PointId) -> Result<f64> {
    wf.check_all(&[p0, p1, p2])?;
    Ok(wf.gamma_at(p0.0, p1.0, p2.0))
}

/// Γ(P0, Pi, Pk) over `points[1..]` with `points[0]` as origin.
pub(crate) fn gram_matrix_at(wf: &WorldFunction, points: &[usize]) -> Square {
    let o = points[0];
    let rest = &points[1..];
    Square::from_fn(rest.len(), |i, k| wf.gamma_at(o, rest[i], rest[k]))
}

/// `F_n` of a finite σ-space. A single point gives the empty determinant, 1.
pub fn gram_determinant(fs: &FiniteSigmaSpace) -> f64 {
    fs.gram_matrix().determinant()
}

/// Simplex volume `(1/n!)·√F_n`, undefined when `F_n < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SimplexVolume {
    Defined { volume: f64 },
    Undefined { f_n: f64 },
}

impl SimplexVolume {
    pub fn value(self) -> Option<f64> {
        match self {
            SimplexVolume::Defined { volume } => Some(volume),
            SimplexVolume::Undefined { .. } => None,
        }
    }
}

pub fn simplex_volume(fs: &FiniteSigmaSpace) -> SimplexVolume {
    let f_n = gram_determinant(fs);
    if f_n < 0.0 {
        return SimplexVolume::Undefined { f_n };
    }
    let factorial: f64 = (1..=fs.order()).map(|k| k as f64).product();
    SimplexVolume::Defined {
        volume: f_n.sqrt() / factorial,
    }
}

/// Ordered points with the origin first, plus an orientation sign.
#[derive(Debug, Clone)]
pub struct Multivector<'a> {
    wf: &'a WorldFunction,
    points: Vec<PointId>,
    sign: i8,
}

impl<'a> Multivector<'a> {
    pub fn new(wf: &'a WorldFunction, points: Vec<PointId>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointList);
        }
        wf.check_all(&points)?;
        Ok(Self {
            wf,
            points,
            sign: 1,
        })
    }

    pub fn vector(wf: &'a WorldFunction, origin: PointId, end: PointId) -> Result<Self> {
        Self::new(wf, vec![origin, end])
    }

    pub fn world_function(&self) -> &'a WorldFunction {
        self.wf
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn origin(&self) -> PointId {
        self.points[0]
    }

    pub fn order(&self) -> usize {
        self.points.len() - 1
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn negated(&self) -> Self {
        Self {
            sign: -self.sign,
            ..self.clone()
        }
    }

    /// Reorders the points and compensates the sign by the permutation parity,
    /// so the result represents the same multivector.
    pub fn permuted(&self, order: &[PointId]) -> Result<Self> {
        let parity = permutation_sign(&self.points, order)?;
        Ok(Self {
            wf: self.wf,
            points: order.to_vec(),
            sign: self.sign * parity,
        })
    }

    fn raw(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn finite_space(&self) -> FiniteSigmaSpace {
        crate::sigma::extract_finite_subspace(self.wf, &self.points)
            .expect("multivector points were validated on construction")
    }
}

fn cross_gram(wf: &WorldFunction, origin: usize, rows: &[usize], cols: &[usize]) -> Square {
    Square::from_fn(rows.len(), |i, k| wf.gamma_at(origin, rows[i], cols[k]))
}

fn check_pair(a: &Multivector<'_>, b: &Multivector<'_>) -> Result<()> {
    if a.order() != b.order() {
        return Err(Error::OrderMismatch {
            left: a.order(),
            right: b.order(),
        });
    }
    if a.origin() != b.origin() {
        return Err(Error::OriginMismatch {
            left: a.origin(),
            right: b.origin(),
        });
    }
    if !std::ptr::eq(a.wf, b.wf) {
        return Err(Error::InvalidArgument(
            "multivectors belong to different world functions".into(),
        ));
    }
    Ok(())
}

/// Scalar σ-product of two multivectors with a common origin.
pub fn multivector_dot(a: &Multivector<'_>, b: &Multivector<'_>) -> Result<f64> {
    check_pair(a, b)?;
    let (pa, pb) = (a.raw(), b.raw());
    let det = cross_gram(a.wf, pa[0], &pa[1..], &pb[1..]).determinant();
    Ok(f64::from(a.sign * b.sign) * det)
}

/// Scalar σ-product evaluated at a shared point `anchor` of `a`, which must be `b`'s origin.
///
/// The anchor is moved to the front of `a`; the rows keep the relative order of
/// the remaining points and the value picks up `(−1)^j` for anchor position `j`.
/// With `anchor = a.origin()` this equals [`multivector_dot`].
pub fn multivector_dot_at(
    a: &Multivector<'_>,
    b: &Multivector<'_>,
    anchor: PointId,
) -> Result<f64> {
    let j = a
        .points
        .iter()
        .position(|&p| p == anchor)
        .ok_or(Error::AnchorNotInMultivector(anchor))?;
    if a.order() != b.order() {
        return Err(Error::OrderMismatch {
            left: a.order(),
            right: b.order(),
        });
    }
    if b.origin() != anchor {
        return Err(Error::OriginMismatch {
            left: anchor,
            right: b.origin(),
        });
    }
    let rows: Vec<usize> = a
        .points
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, p)| p.0)
        .collect();
    let pb = b.raw();
    let det = cross_gram(a.wf, anchor.0, &rows, &pb[1..]).determinant();
    let parity = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(parity * f64::from(a.sign * b.sign) * det)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthClass {
    Real,
    Null,
    Imaginary,
}

/// Squared length `(a.a) = F_n` with its real/null/imaginary class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthValue {
    pub squared: f64,
    pub klass: LengthClass,
}

impl LengthValue {
    /// `√|squared|`; the imaginary unit is carried by `klass`.
    pub fn magnitude(&self) -> f64 {
        self.squared.abs().sqrt()
    }
}

pub fn classify_length(
    squared: f64,
    max_entry: f64,
    order: usize,
    tol: &TolerancePolicy,
) -> LengthValue {
    let klass = match tol.sign(squared, max_entry, order) {
        Sign::Positive => LengthClass::Real,
        Sign::Zero => LengthClass::Null,
        Sign::Negative => LengthClass::Imaginary,
    };
    LengthValue { squared, klass }
}

pub fn multivector_length(a: &Multivector<'_>, tol: &TolerancePolicy) -> Result<LengthValue> {
    if a.order() < 1 {
        return Err(Error::TooFewPoints {
            required: 2,
            got: a.points.len(),
        });
    }
    let g = gram_matrix_at(a.wf, &a.raw());
    Ok(classify_length(
        g.determinant(),
        g.max_abs(),
        a.order(),
        tol,
    ))
}

/// Parity of the permutation taking `before` to `after`: `+1` even, `-1` odd.
pub fn permutation_sign(before: &[PointId], after: &[PointId]) -> Result<i8> {
    if before.len() != after.len() {
        return Err(Error::NotAPermutation(format!(
            "lengths differ: {} vs {}",
            before.len(),
            after.len()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(p) = before.iter().find(|p| !seen.insert(**p)) {
        return Err(Error::NotAPermutation(format!("{p} repeats")));
    }
    let mut perm = Vec::with_capacity(after.len());
    let mut used = vec![false; before.len()];
    for p in after {
        let i = before
            .iter()
            .position(|q| q == p)
            .ok_or_else(|| Error::NotAPermutation(format!("{p} is not in the original list")))?;
        if std::mem::replace(&mut used[i], true) {
            return Err(Error::NotAPermutation(format!("{p} repeats")));
        }
        perm.push(i);
    }
    // parity = (−1)^(n − cycles)
    let mut visited = vec![false; perm.len()];
    let mut transpositions = 0;
    for start in 0..perm.len() {
        let mut len = 0;
        let mut i = start;
        while !visited[i] {
            visited[i] = true;
            i = perm[i];
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    Ok(if transpositions % 2 == 0 { 1 } else { -1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Collinearity {
    Parallel,
    Antiparallel,
    CollinearIndefinite,
    NotCollinear,
}

impl Collinearity {
    pub fn is_collinear(self) -> bool {
        self != Collinearity::NotCollinear
    }
}

/// Collinearity of two same-order multivectors with a common origin.
///
/// When both squared lengths are negative the product of the two imaginary
/// lengths is the real number `−√(|a|²|b|²)`, and orientation follows from that.
/// A product `|a|²·|b|² ≤ 0` leaves orientation undefined.
pub fn collinear(
    a: &Multivector<'_>,
    b: &Multivector<'_>,
    tol: &TolerancePolicy,
) -> Result<Collinearity> {
    check_pair(a, b)?;
    if a.order() < 1 {
        return Err(Error::TooFewPoints {
            required: 2,
            got: a.points.len(),
        });
    }
    let (pa, pb) = (a.raw(), b.raw());
    let o = pa[0];
    let gaa = cross_gram(a.wf, o, &pa[1..], &pa[1..]);
    let gbb = cross_gram(a.wf, o, &pb[1..], &pb[1..]);
    let gab = cross_gram(a.wf, o, &pa[1..], &pb[1..]);
    let m = gaa.max_abs().max(gbb.max_abs()).max(gab.max_abs());
    let n = a.order();
    let dot = f64::from(a.sign * b.sign) * gab.determinant();
    let (la, lb) = (gaa.determinant(), gbb.determinant());
    let product = la * lb;
    if !tol.is_zero(dot * dot - product, m, 2 * n) {
        return Ok(Collinearity::NotCollinear);
    }
    let sa = tol.sign(la, m, n);
    let sb = tol.sign(lb, m, n);
    let verdict = match (sa, sb) {
        (Sign::Positive, Sign::Positive) => {
            if dot > 0.0 {
                Collinearity::Parallel
            } else {
                Collinearity::Antiparallel
            }
        }
        (Sign::Negative, Sign::Negative) => {
            if dot < 0.0 {
                Collinearity::Parallel
            } else {
                Collinearity::Antiparallel
            }
        }
        _ => Collinearity::CollinearIndefinite,
    };
    Ok(verdict)
}

fn matches_for_all_q(
    wf: &WorldFunction,
    origin: usize,
    r: usize,
    rhs: impl Fn(usize) -> (f64, f64),
    tol: &TolerancePolicy,
) -> bool {
    (0..wf.len()).all(|q| {
        let lhs = wf.gamma_at(origin, r, q);
        let (value, m) = rhs(q);
        tol.is_zero(lhs - value, m.max(lhs.abs()), 1)
    })
}

/// Candidates `R` with `(P0R.P0Q) = (P0P1.P0Q) + (P0P2.P0Q)` for every `Q` of the domain.
pub fn find_vector_sum(
    wf: &WorldFunction,
    origin: PointId,
    p1: PointId,
    p2: PointId,
    candidates: &[PointId],
    tol: &TolerancePolicy,
) -> Result<Vec<PointId>> {
    wf.check_all(&[origin, p1, p2])?;
    wf.check_all(candidates)?;
    let (o, a, b) = (origin.0, p1.0, p2.0);
    Ok(candidates
        .par_iter()
        .filter(|r| {
            matches_for_all_q(
                wf,
                o,
                r.0,
                |q| {
                    let (x, y) = (wf.gamma_at(o, a, q), wf.gamma_at(o, b, q));
                    (x + y, x.abs().max(y.abs()))
                },
                tol,
            )
        })
        .copied()
        .collect())
}

/// Candidates `R` with `(P0R.P0Q) = a·(P0P.P0Q)` for every `Q` of the domain.
pub fn find_vector_scale(
    wf: &WorldFunction,
    origin: PointId,
    p: PointId,
    a: f64,
    candidates: &[PointId],
    tol: &TolerancePolicy,
) -> Result<Vec<PointId>> {
    wf.check_all(&[origin, p])?;
    wf.check_all(candidates)?;
    if !a.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "scale factor {a} is not finite"
        )));
    }
    let (o, pe) = (origin.0, p.0);
    Ok(candidates
        .par_iter()
        .filter(|r| {
            matches_for_all_q(
                wf,
                o,
                r.0,
                |q| {
                    let v = a * wf.gamma_at(o, pe, q);
                    (v, v.abs())
                },
                tol,
            )
        })
        .copied()
        .collect())
}
