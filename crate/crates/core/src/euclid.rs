//! Euclidean structure expressed through σ alone.
//!
//! A σ-space carries n-dimensional Euclidean structure when some `(n+1)`-point
//! basis with `F_n ≠ 0` exists, every `(n+2)`-point subset has `F_{n+1} = 0`,
//! and
//!
//! ```text
//! Γ(P0, P, Q) = Σ g^{ik} Γ(P0, Pi, P) Γ(P0, Pk, Q)      for all P, Q
//! ```
//!
//! with `g^{ik}` the inverse of `g_ik = Γ(P0, Pi, Pk)`. Coordinates of a point
//! are its covariant components `x_i = Γ(P0, P, Pi)`. Whether every real
//! coordinate vector is attained cannot be decided from finite data, so only
//! injectivity of the coordinate map is checked.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::gram_matrix_at;
use crate::linalg::Square;
use crate::sigma::{FiniteSigmaSpace, PointId, WorldFunction};
use crate::subsets::index_subsets;
use crate::tolerance::TolerancePolicy;
use crate::tube::TubeBasis;

/// Exhaustive tuple enumeration below this count, seeded sampling of this many above it.
pub const MAX_RANK_TUPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTensor {
    pub basis: Vec<PointId>,
    /// `g_ik = Γ(P0, Pi, Pk)`
    pub covariant: Vec<Vec<f64>>,
    /// `g^ik`, the inverse of `covariant`.
    pub contravariant: Vec<Vec<f64>>,
}

fn to_rows(m: &Square) -> Vec<Vec<f64>> {
    (0..m.order()).map(|i| m.row(i).to_vec()).collect()
}

fn raw(points: &[PointId]) -> Vec<usize> {
    points.iter().map(|p| p.0).collect()
}

fn coordinates_at(wf: &WorldFunction, basis: &[usize], p: usize) -> Vec<f64> {
    basis[1..]
        .iter()
        .map(|&pi| wf.gamma_at(basis[0], p, pi))
        .collect()
}

/// `x_i = Γ(P0, P, Pi)` for `i = 1..n`.
pub fn covariant_coordinates(basis: &TubeBasis<'_>, p: PointId) -> Result<Vec<f64>> {
    let wf = basis.world_function();
    wf.check(p)?;
    Ok(coordinates_at(wf, &raw(basis.points()), p.0))
}

fn metric_squares(wf: &WorldFunction, basis: &[usize]) -> Result<(Square, Square)> {
    let g = gram_matrix_at(wf, basis);
    let inv = g
        .inverse()
        .ok_or_else(|| Error::Internal("covariant metric of a valid basis is singular".into()))?;
    Ok((g, inv))
}

pub fn metric_tensor(basis: &TubeBasis<'_>) -> Result<MetricTensor> {
    let (g, inv) = metric_squares(basis.world_function(), &raw(basis.points()))?;
    Ok(MetricTensor {
        basis: basis.points().to_vec(),
        covariant: to_rows(&g),
        contravariant: to_rows(&inv),
    })
}

fn bilinear(g: &Square, x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(g.mul_vec(y)).map(|(a, b)| a * b).sum()
}

/// `|Γ(P0, P, Q) − Σ g^{ik} x_i(P) x_k(Q)|`; zero when the pair fits the Euclidean σ-form.
pub fn sigma_form_residual(basis: &TubeBasis<'_>, p: PointId, q: PointId) -> Result<f64> {
    let wf = basis.world_function();
    wf.check_all(&[p, q])?;
    let b = raw(basis.points());
    let (_, inv) = metric_squares(wf, &b)?;
    let (x, y) = (coordinates_at(wf, &b, p.0), coordinates_at(wf, &b, q.0));
    Ok((wf.gamma_at(b[0], p.0, q.0) - bilinear(&inv, &x, &y)).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    EuclideanStructure,
    Fails,
}

/// The condition of the structure theorem that was violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailingCondition {
    /// No non-degenerate basis, or some `(n+2)`-tuple has `F_{n+1} ≠ 0`.
    #[serde(rename = "a3.4_rank")]
    Rank,
    /// Some pair violates the Euclidean σ-form.
    #[serde(rename = "a3.5_sigma_form")]
    SigmaForm,
    /// Two distinct points share their coordinates.
    #[serde(rename = "a3.12_uniqueness")]
    Uniqueness,
}

impl FailingCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            FailingCondition::Rank => "a3.4_rank",
            FailingCondition::SigmaForm => "a3.5_sigma_form",
            FailingCondition::Uniqueness => "a3.12_uniqueness",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub verdict: Verdict,
    pub failing_condition: Option<FailingCondition>,
    /// Largest violation of the condition being reported (or of the σ-form on success).
    pub max_residual: f64,
    pub witness: Option<Vec<PointId>>,
    /// Covariant coordinates, one row per candidate, when the verdict is positive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricTensor>,
    pub tuples_checked: usize,
    /// Existence of a point for every coordinate vector is not decidable on finite data.
    pub surjectivity: String,
}

impl EmbeddingReport {
    fn failure(
        condition: FailingCondition,
        residual: f64,
        witness: Vec<PointId>,
        tuples: usize,
    ) -> Self {
        Self {
            verdict: Verdict::Fails,
            failing_condition: Some(condition),
            max_residual: residual,
            witness: Some(witness),
            coordinates: None,
            metric: None,
            tuples_checked: tuples,
            surjectivity: NOT_TESTABLE.into(),
        }
    }

    /// `½ Σ g^{ik} (x_i − y_i)(x_k − y_k)` between two returned coordinate rows.
    pub fn sigma_between(&self, i: usize, j: usize) -> Option<f64> {
        let coords = self.coordinates.as_ref()?;
        let g = &self.metric.as_ref()?.contravariant;
        let d: Vec<f64> = coords[i]
            .iter()
            .zip(&coords[j])
            .map(|(a, b)| a - b)
            .collect();
        let n = d.len();
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += g[a][b] * d[a] * d[b];
            }
        }
        Some(0.5 * s)
    }
}

const NOT_TESTABLE: &str = "not_testable";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureOptions {
    pub seed: u64,
    pub max_tuples: usize,
}

impl Default for StructureOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            max_tuples: MAX_RANK_TUPLES,
        }
    }
}

/// Greedy basis: the pair with the largest |F_1|, then repeatedly the point maximizing |F_k|.
fn greedy_basis(wf: &WorldFunction, candidates: &[usize], n: usize) -> (Vec<usize>, f64, f64) {
    if n == 0 {
        return (vec![candidates[0]], 1.0, 0.0);
    }
    let mut best = (candidates[0], candidates[0], -1.0);
    for (a, &i) in candidates.iter().enumerate() {
        for &j in &candidates[a + 1..] {
            let f = (2.0 * wf.sigma_at(i, j)).abs();
            if f > best.2 {
                best = (i, j, f);
            }
        }
    }
    let mut basis = vec![best.0, best.1];
    while basis.len() < n + 1 {
        let mut pick = None;
        let mut best_f = -1.0;
        for &c in candidates {
            if basis.contains(&c) {
                continue;
            }
            basis.push(c);
            let f = gram_matrix_at(wf, &basis).determinant().abs();
            basis.pop();
            if f > best_f {
                best_f = f;
                pick = Some(c);
            }
        }
        match pick {
            Some(c) => basis.push(c),
            None => break,
        }
    }
    let g = gram_matrix_at(wf, &basis);
    (basis, g.determinant(), g.max_abs())
}

fn rank_tuples(count: usize, k: usize, opts: &StructureOptions) -> Vec<Vec<usize>> {
    index_subsets(count, k, opts.max_tuples, opts.seed)
}

/// Tests whether σ restricted to `candidates` has n-dimensional Euclidean structure.
pub fn euclidean_structure_check(
    wf: &WorldFunction,
    candidates: &[PointId],
    n: usize,
    tol: &TolerancePolicy,
    opts: &StructureOptions,
) -> Result<EmbeddingReport> {
    wf.check_all(candidates)?;
    if candidates.len() < n + 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} candidates for order {n}, got {}",
            n + 2,
            candidates.len()
        )));
    }
    let cands = raw(candidates);

    let (basis, f_n, m) = greedy_basis(wf, &cands, n);
    if basis.len() < n + 1 || tol.is_zero(f_n, m, n) {
        return Ok(EmbeddingReport::failure(
            FailingCondition::Rank,
            f_n.abs(),
            basis.iter().map(|&i| PointId(i)).collect(),
            0,
        ));
    }

    let tuples = rank_tuples(cands.len(), n + 2, opts);
    let violation = tuples.par_iter().find_map_first(|t| {
        let pts: Vec<usize> = t.iter().map(|&i| cands[i]).collect();
        let g = gram_matrix_at(wf, &pts);
        let f = g.determinant();
        (!tol.is_zero(f, g.max_abs(), n + 1)).then_some((pts, f))
    });
    if let Some((pts, f)) = violation {
        return Ok(EmbeddingReport::failure(
            FailingCondition::Rank,
            f.abs(),
            pts.into_iter().map(PointId).collect(),
            tuples.len(),
        ));
    }

    let (g, inv) = metric_squares(wf, &basis)?;
    let coords: Vec<Vec<f64>> = cands
        .iter()
        .map(|&p| coordinates_at(wf, &basis, p))
        .collect();

    // (max residual, first violating pair) per row, reduced in index order
    let rows: Vec<(f64, Option<(usize, usize)>)> = (0..cands.len())
        .into_par_iter()
        .map(|a| {
            let mut worst = 0.0;
            let mut bad = None;
            for b in a..cands.len() {
                let gamma = wf.gamma_at(basis[0], cands[a], cands[b]);
                let model = bilinear(&inv, &coords[a], &coords[b]);
                let r = (gamma - model).abs();
                if r > worst {
                    worst = r;
                }
                if bad.is_none() && !tol.is_zero(r, gamma.abs().max(model.abs()), 1) {
                    bad = Some((a, b));
                }
            }
            (worst, bad)
        })
        .collect();
    let max_residual = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    if let Some(&(_, Some((a, b)))) = rows.iter().find(|r| r.1.is_some()) {
        return Ok(EmbeddingReport::failure(
            FailingCondition::SigmaForm,
            max_residual,
            vec![candidates[a], candidates[b]],
            tuples.len(),
        ));
    }

    let coord_scale = coords.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let clash = (0..cands.len()).into_par_iter().find_map_first(|a| {
        (a + 1..cands.len())
            .find(|&b| {
                coords[a]
                    .iter()
                    .zip(&coords[b])
                    .all(|(x, y)| tol.is_zero(x - y, coord_scale, 1))
            })
            .map(|b| (a, b))
    });
    if let Some((a, b)) = clash {
        return Ok(EmbeddingReport::failure(
            FailingCondition::Uniqueness,
            max_residual,
            vec![candidates[a], candidates[b]],
            tuples.len(),
        ));
    }

    Ok(EmbeddingReport {
        verdict: Verdict::EuclideanStructure,
        failing_condition: None,
        max_residual,
        witness: None,
        coordinates: Some(coords),
        metric: Some(MetricTensor {
            basis: basis.into_iter().map(PointId).collect(),
            covariant: to_rows(&g),
            contravariant: to_rows(&inv),
        }),
        tuples_checked: tuples.len(),
        surjectivity: NOT_TESTABLE.into(),
    })
}

/// Result of trying to place a finite σ-space in a proper Euclidean space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Embedding {
    Embeddable {
        dimension: usize,
        /// Cartesian coordinates with the first point at the origin.
        coordinates: Vec<Vec<f64>>,
        eigenvalues: Vec<f64>,
    },
    NotEmbeddable {
        /// The most negative eigenvalue of the Gram matrix.
        eigenvalue: f64,
    },
}

/// Embeds `fs` isometrically into ℝ^d, d minimal, via the Gram matrix `Γ(P0, Pi, Pk)`.
pub fn isometric_embed_finite(fs: &FiniteSigmaSpace, tol: &TolerancePolicy) -> Result<Embedding> {
    if fs.is_empty() {
        return Err(Error::EmptyPointList);
    }
    let g = fs.gram_matrix();
    let (values, vectors) = g.symmetric_eigen();
    let threshold = tol.rel_eps * g.inf_norm().max(1.0);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    if let Some(&worst) = order.last() {
        if values[worst] < -threshold {
            return Ok(Embedding::NotEmbeddable {
                eigenvalue: values[worst],
            });
        }
    }
    let kept: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&c| values[c] > threshold)
        .collect();
    let n = fs.order();
    let mut coordinates = vec![vec![0.0; kept.len()]; n + 1];
    for (col, &c) in kept.iter().enumerate() {
        // fix the eigenvector sign so the largest component is positive
        let flip = (0..n)
            .max_by(|&a, &b| vectors.get(a, c).abs().total_cmp(&vectors.get(b, c).abs()))
            .map_or(1.0, |i| vectors.get(i, c).signum());
        let s = values[c].sqrt() * flip;
        for p in 0..n {
            // adding 0.0 maps -0.0 to 0.0 so reports stay sign-clean
            coordinates[p + 1][col] = s * vectors.get(p, c) + 0.0;
        }
    }
    Ok(Embedding::Embeddable {
        dimension: kept.len(),
        coordinates,
        eigenvalues: order.iter().map(|&c| values[c]).collect(),
    })
}
