//! Point domains, world functions and finite σ-subspaces.
//!
//! A world function σ is half the squared "distance" between two points. No
//! sign constraint is imposed: pseudo-Euclidean generators produce negative
//! values, which is the whole point of the indefinite case.
//!
//! Evaluation always canonicalizes the pair to `(min, max)` so that
//! `σ(P, Q) == σ(Q, P)` holds bitwise.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Square;

/// Index of a point inside one domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl PointId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

impl From<usize> for PointId {
    fn from(i: usize) -> Self {
        PointId(i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Euclidean,
    PseudoEuclidean,
    SphereChordal,
    SphereIntrinsic,
    Matrix,
}

impl GeneratorKind {
    pub fn is_coordinate(self) -> bool {
        !matches!(self, GeneratorKind::Matrix)
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Self::Euclidean),
            "pseudo_euclidean" => Ok(Self::PseudoEuclidean),
            "sphere_chordal" => Ok(Self::SphereChordal),
            "sphere_intrinsic" => Ok(Self::SphereIntrinsic),
            "matrix" => Ok(Self::Matrix),
            other => Err(Error::InvalidGenerator(format!(
                "unknown generator kind {other:?}"
            ))),
        }
    }
}

/// How a world function is generated.
///
/// `metric` is an optional constant contravariant tensor `g^{ik}` for the
/// euclidean kind; it must be positive definite. `signature` carries the
/// diagonal `±1` entries for the pseudo-Euclidean kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    #[serde(default)]
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
}

impl GeneratorSpec {
    pub fn euclidean(dimension: usize) -> Self {
        Self {
            kind: GeneratorKind::Euclidean,
            dimension,
            signature: None,
            metric: None,
        }
    }

    pub fn euclidean_with_metric(metric: Vec<Vec<f64>>) -> Self {
        Self {
            kind: GeneratorKind::Euclidean,
            dimension: metric.len(),
            signature: None,
            metric: Some(metric),
        }
    }

    pub fn pseudo_euclidean(signature: Vec<i8>) -> Self {
        Self {
            kind: GeneratorKind::PseudoEuclidean,
            dimension: signature.len(),
            signature: Some(signature),
            metric: None,
        }
    }

    pub fn sphere_chordal(dimension: usize) -> Self {
        Self {
            kind: GeneratorKind::SphereChordal,
            dimension,
            signature: None,
            metric: None,
        }
    }

    pub fn sphere_intrinsic(dimension: usize) -> Self {
        Self {
            kind: GeneratorKind::SphereIntrinsic,
            dimension,
            signature: None,
            metric: None,
        }
    }

    pub fn matrix() -> Self {
        Self {
            kind: GeneratorKind::Matrix,
            dimension: 0,
            signature: None,
            metric: None,
        }
    }
}

/// Whether a table holds σ-values or distances ρ (converted by σ = ½ρ²).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    Sigma,
    Rho,
}

impl std::str::FromStr for ValueKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" => Ok(Self::Sigma),
            "rho" => Ok(Self::Rho),
            other => Err(Error::Input(format!(
                "values must be sigma or rho, got {other:?}"
            ))),
        }
    }
}

/// Raw data a world function is built from.
#[derive(Debug, Clone, Copy)]
pub enum DomainInput<'a> {
    Coordinates(&'a [Vec<f64>]),
    Table {
        values: &'a [Vec<f64>],
        kind: ValueKind,
    },
}

#[derive(Debug, Clone)]
enum Evaluator {
    /// σ = ½ Σ g^{ik} Δx_i Δx_k with a full symmetric tensor.
    Quadratic(Square),
    /// σ = ½ Σ d_i Δx_i², covers euclidean identity and ±1 signatures.
    Diagonal(Vec<f64>),
    SphereChordal,
    SphereIntrinsic,
    Table(Square),
}

/// Symmetric real-valued σ over a finite point domain.
#[derive(Debug, Clone)]
pub struct WorldFunction {
    spec: GeneratorSpec,
    coordinates: Vec<Vec<f64>>,
    evaluator: Evaluator,
    len: usize,
}

const BALL_SLACK: f64 = 1e-9;

/// Builds a world function from a generator and its coordinate cloud or value table.
pub fn make_world_function(spec: GeneratorSpec, input: DomainInput<'_>) -> Result<WorldFunction> {
    match (spec.kind, input) {
        (GeneratorKind::Matrix, DomainInput::Table { values, kind }) => {
            let table = validate_table(values, kind)?;
            let len = table.order();
            Ok(WorldFunction {
                spec,
                coordinates: Vec::new(),
                evaluator: Evaluator::Table(table),
                len,
            })
        }
        (GeneratorKind::Matrix, DomainInput::Coordinates(_)) => Err(Error::InvalidGenerator(
            "matrix generator needs a value table, not coordinates".into(),
        )),
        (_, DomainInput::Table { .. }) => Err(Error::InvalidGenerator(format!(
            "{:?} generator needs coordinates, not a value table",
            spec.kind
        ))),
        (kind, DomainInput::Coordinates(points)) => {
            let evaluator = coordinate_evaluator(&spec)?;
            for (row, p) in points.iter().enumerate() {
                if p.len() != spec.dimension {
                    return Err(Error::DimensionMismatch {
                        row,
                        len: p.len(),
                        dimension: spec.dimension,
                    });
                }
                if let Some(j) = p.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFinite {
                        i: row,
                        j,
                        value: p[j],
                    });
                }
                if matches!(
                    kind,
                    GeneratorKind::SphereChordal | GeneratorKind::SphereIntrinsic
                ) {
                    let norm2: f64 = p.iter().map(|v| v * v).sum();
                    if norm2 > 1.0 + BALL_SLACK {
                        return Err(Error::InvalidGenerator(format!(
                            "point {row} lies outside the unit ball (|x|^2 = {norm2})"
                        )));
                    }
                }
            }
            Ok(WorldFunction {
                spec,
                coordinates: points.to_vec(),
                evaluator,
                len: points.len(),
            })
        }
    }
}

fn coordinate_evaluator(spec: &GeneratorSpec) -> Result<Evaluator> {
    if spec.dimension == 0 {
        return Err(Error::InvalidGenerator("dimension must be positive".into()));
    }
    match spec.kind {
        GeneratorKind::Euclidean => {
            if spec.signature.is_some() {
                return Err(Error::InvalidGenerator(
                    "signature is only valid for pseudo_euclidean".into(),
                ));
            }
            match &spec.metric {
                None => Ok(Evaluator::Diagonal(vec![1.0; spec.dimension])),
                Some(rows) => {
                    let n = spec.dimension;
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                        return Err(Error::InvalidGenerator(format!("metric must be {n}x{n}")));
                    }
                    for i in 0..n {
                        for j in 0..n {
                            if !rows[i][j].is_finite() {
                                return Err(Error::NonFinite {
                                    i,
                                    j,
                                    value: rows[i][j],
                                });
                            }
                            if rows[i][j] != rows[j][i] {
                                return Err(Error::Asymmetric {
                                    i,
                                    j,
                                    a: rows[i][j],
                                    b: rows[j][i],
                                });
                            }
                        }
                    }
                    let g = Square::from_fn(n, |i, j| rows[i][j]);
                    if !g.is_positive_definite() {
                        return Err(Error::InvalidGenerator(
                            "euclidean metric must be positive definite".into(),
                        ));
                    }
                    Ok(Evaluator::Quadratic(g))
                }
            }
        }
        GeneratorKind::PseudoEuclidean => {
            let sig = spec.signature.as_ref().ok_or_else(|| {
                Error::InvalidGenerator("pseudo_euclidean requires a signature".into())
            })?;
            if sig.len() != spec.dimension {
                return Err(Error::InvalidGenerator(format!(
                    "signature has {} entries, dimension is {}",
                    sig.len(),
                    spec.dimension
                )));
            }
            if sig.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::InvalidGenerator(
                    "signature entries must be +1 or -1".into(),
                ));
            }
            if spec.metric.is_some() {
                return Err(Error::InvalidGenerator(
                    "general metric tensors are only accepted for the euclidean kind".into(),
                ));
            }
            Ok(Evaluator::Diagonal(
                sig.iter().map(|&s| f64::from(s)).collect(),
            ))
        }
        GeneratorKind::SphereChordal => Ok(Evaluator::SphereChordal),
        GeneratorKind::SphereIntrinsic => Ok(Evaluator::SphereIntrinsic),
        GeneratorKind::Matrix => unreachable!("matrix kind has no coordinate evaluator"),
    }
}

fn validate_table(values: &[Vec<f64>], kind: ValueKind) -> Result<Square> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyPointList);
    }
    for (row, r) in values.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
    }
    for i in 0..n {
        for j in 0..n {
            let v = values[i][j];
            if !v.is_finite() {
                return Err(Error::NonFinite { i, j, value: v });
            }
        }
    }
    for i in 0..n {
        if values[i][i] != 0.0 {
            return Err(Error::NonzeroDiagonal {
                i,
                value: values[i][i],
            });
        }
        for j in i + 1..n {
            if values[i][j] != values[j][i] {
                return Err(Error::Asymmetric {
                    i,
                    j,
                    a: values[i][j],
                    b: values[j][i],
                });
            }
            if kind == ValueKind::Rho && values[i][j] < 0.0 {
                return Err(Error::Input(format!(
                    "distance ({i}, {j}) is negative: {}",
                    values[i][j]
                )));
            }
        }
    }
    Ok(Square::from_fn(n, |i, j| match kind {
        ValueKind::Sigma => values[i][j],
        ValueKind::Rho => 0.5 * values[i][j] * values[i][j],
    }))
}

/// Chordal world function of the unit ball: σ_E = ½|x − y|².
pub fn sphere_chordal_sigma(x: &[f64], y: &[f64]) -> f64 {
    0.5 * x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

/// Intrinsic world function on the unit ball: σ = 2 (arcsin √(σ_E / 2))².
pub fn sphere_intrinsic_sigma(x: &[f64], y: &[f64]) -> f64 {
    let arg = (sphere_chordal_sigma(x, y) / 2.0).sqrt().min(1.0);
    let a = arg.asin();
    2.0 * a * a
}

impl WorldFunction {
    /// Matrix-backed world function from a σ table.
    pub fn from_sigma_table(values: &[Vec<f64>]) -> Result<Self> {
        make_world_function(
            GeneratorSpec::matrix(),
            DomainInput::Table {
                values,
                kind: ValueKind::Sigma,
            },
        )
    }

    pub fn from_points(spec: GeneratorSpec, points: &[Vec<f64>]) -> Result<Self> {
        make_world_function(spec, DomainInput::Coordinates(points))
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Registered coordinates; empty for matrix-backed functions.
    pub fn coordinates(&self) -> &[Vec<f64>] {
        &self.coordinates
    }

    pub fn point_ids(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.len).map(PointId)
    }

    pub fn check(&self, p: PointId) -> Result<()> {
        if p.0 < self.len {
            Ok(())
        } else {
            Err(Error::PointOutOfRange {
                point: p,
                len: self.len,
            })
        }
    }

    pub fn check_all(&self, points: &[PointId]) -> Result<()> {
        points.iter().try_for_each(|&p| self.check(p))
    }

    pub fn sigma(&self, p: PointId, q: PointId) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.sigma_at(p.0, q.0))
    }

    /// Unchecked evaluation by raw index; the pair is canonicalized first.
    pub(crate) fn sigma_at(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        match &self.evaluator {
            Evaluator::Table(t) => t.get(a, b),
            Evaluator::Diagonal(d) => {
                let (x, y) = (&self.coordinates[a], &self.coordinates[b]);
                0.5 * d
                    .iter()
                    .zip(x.iter().zip(y))
                    .map(|(g, (u, v))| g * (u - v) * (u - v))
                    .sum::<f64>()
            }
            Evaluator::Quadratic(g) => {
                let (x, y) = (&self.coordinates[a], &self.coordinates[b]);
                let dx: Vec<f64> = x.iter().zip(y).map(|(u, v)| u - v).collect();
                let gdx = g.mul_vec(&dx);
                0.5 * dx.iter().zip(&gdx).map(|(u, v)| u * v).sum::<f64>()
            }
            Evaluator::SphereChordal => {
                sphere_chordal_sigma(&self.coordinates[a], &self.coordinates[b])
            }
            Evaluator::SphereIntrinsic => {
                sphere_intrinsic_sigma(&self.coordinates[a], &self.coordinates[b])
            }
        }
    }

    /// Γ(P0, P1, P2) = σ(P0,P1) + σ(P0,P2) − σ(P1,P2) by raw index.
    pub(crate) fn gamma_at(&self, p0: usize, p1: usize, p2: usize) -> f64 {
        self.sigma_at(p0, p1) + self.sigma_at(p0, p2) - self.sigma_at(p1, p2)
    }

    /// Full σ table over every point of the domain.
    pub fn table(&self) -> Vec<Vec<f64>> {
        (0..self.len)
            .map(|i| (0..self.len).map(|j| self.sigma_at(i, j)).collect())
            .collect()
    }
}

/// `n + 1` ordered points with their σ table.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSigmaSpace {
    points: Vec<PointId>,
    table: Square,
}

impl FiniteSigmaSpace {
    /// Builds a space directly from a validated σ table; points are numbered `0..n`.
    pub fn from_sigma_table(values: &[Vec<f64>]) -> Result<Self> {
        let table = validate_table(values, ValueKind::Sigma)?;
        let points = (0..table.order()).map(PointId).collect();
        Ok(Self { points, table })
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Order `n` of the space: one less than the number of points.
    pub fn order(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    /// σ between the `i`-th and `j`-th listed points.
    pub fn sigma(&self, i: usize, j: usize) -> f64 {
        self.table.get(i, j)
    }

    pub fn table(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|i| self.table.row(i).to_vec())
            .collect()
    }

    /// Γ between listed positions, origin first.
    pub fn gamma(&self, o: usize, i: usize, k: usize) -> f64 {
        self.table.get(o, i) + self.table.get(o, k) - self.table.get(i, k)
    }

    /// The n×n matrix Γ(P0, Pi, Pk), i, k = 1..n.
    pub fn gram_matrix(&self) -> Square {
        Square::from_fn(self.order(), |i, k| self.gamma(0, i + 1, k + 1))
    }
}

/// Restricts σ to an ordered list of points.
pub fn extract_finite_subspace(wf: &WorldFunction, points: &[PointId]) -> Result<FiniteSigmaSpace> {
    if points.is_empty() {
        return Err(Error::EmptyPointList);
    }
    wf.check_all(points)?;
    let table = Square::from_fn(points.len(), |i, j| wf.sigma_at(points[i].0, points[j].0));
    Ok(FiniteSigmaSpace {
        points: points.to_vec(),
        table,
    })
}
