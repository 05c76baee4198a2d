//! Oracles shared by the integration tests. None of them go through the crate's
//! own linear algebra.

#![allow(dead_code)]

use tgeometry::{GeneratorSpec, PointId, WorldFunction};

/// Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * cofactor_det(&minor)
            })
            .sum(),
    }
}

pub fn euclidean(points: &[Vec<f64>]) -> WorldFunction {
    WorldFunction::from_points(GeneratorSpec::euclidean(points[0].len()), points).unwrap()
}

pub fn ids(v: &[usize]) -> Vec<PointId> {
    v.iter().map(|&i| PointId(i)).collect()
}

pub fn all_ids(wf: &WorldFunction) -> Vec<PointId> {
    wf.point_ids().collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn half_sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let d = diff(a, b);
    0.5 * dot(&d, &d)
}

/// Integer grid `{lo..=hi}^dim` scaled by `step`, in lexicographic order.
pub fn grid(dim: usize, lo: i32, hi: i32, step: f64) -> Vec<Vec<f64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |i| {
                    let mut q = p.clone();
                    q.push(f64::from(i) * step);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
