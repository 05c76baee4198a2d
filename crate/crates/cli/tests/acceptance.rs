//! Acceptance criteria, one PASS/FAIL line each with its runtime budget.
//!
//! Runs without the libtest harness so the report is always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tgeometry::euclid::{
    euclidean_structure_check, isometric_embed_finite, Embedding, StructureOptions, Verdict,
};
use tgeometry::gram::{gram_determinant, multivector_dot, multivector_dot_at, Multivector};
use tgeometry::sphere::{
    default_candidates, great_circle_distance, intrinsic_metric, random_pairs,
};
use tgeometry::tube::{degeneracy_report, tube_scan, tube_section, TubeBasis};
use tgeometry::{extract_finite_subspace, GeneratorSpec, PointId, TolerancePolicy, WorldFunction};

fn ids(v: &[usize]) -> Vec<PointId> {
    v.iter().map(|&i| PointId(i)).collect()
}

fn all(wf: &WorldFunction) -> Vec<PointId> {
    wf.point_ids().collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn cofactor_det(m: &[Vec<f64>]) -> f64 {
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

fn half_sq(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
}

fn random_cloud(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

fn volume_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for n in 1..=5 {
        for _ in 0..200 {
            let pts = random_cloud(&mut rng, n + 1, n);
            let edges: Vec<Vec<f64>> = pts[1..]
                .iter()
                .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
                .collect();
            let vol = cofactor_det(&edges);
            let wf = WorldFunction::from_points(GeneratorSpec::euclidean(n), &pts).map_err(err)?;
            let f = gram_determinant(&extract_finite_subspace(&wf, &all(&wf)).map_err(err)?);
            let rel = (f - vol * vol).abs() / (vol * vol);
            worst = worst.max(rel);
            if rel > 1e-9 {
                return Err(format!(
                    "n = {n}: F_n = {f}, oracle {}, relative error {rel:e}",
                    vol * vol
                ));
            }
        }
    }
    Ok(format!("1000 simplices, worst relative error {worst:.2e}"))
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn inversion_parity(p: &[usize]) -> f64 {
    let inv = (0..p.len())
        .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn antisymmetry() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for _ in 0..50 {
        let pts = random_cloud(&mut rng, 9, 4);
        let wf = WorldFunction::from_points(GeneratorSpec::euclidean(4), &pts).map_err(err)?;
        for k in 2..=5 {
            // a = (P0..P_{k-1}), b = (P0, P5..) share the origin P0
            let base: Vec<usize> = (0..k).collect();
            let other: Vec<usize> = std::iter::once(0).chain(5..4 + k).collect();
            let a = Multivector::new(&wf, ids(&base)).map_err(err)?;
            let b = Multivector::new(&wf, ids(&other)).map_err(err)?;
            let reference = multivector_dot(&a, &b).map_err(err)?;
            for perm in permutations(&base) {
                let pa = Multivector::new(&wf, ids(&perm)).map_err(err)?;
                let v = multivector_dot_at(&pa, &b, PointId(0)).map_err(err)?;
                let want = inversion_parity(&perm) * reference;
                if (v - want).abs() > 1e-12 * want.abs().max(f64::MIN_POSITIVE) {
                    return Err(format!("permutation {perm:?}: {v} vs {want}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} permuted products"))
}

fn light_cone() -> Result<String, String> {
    let mut pts = Vec::new();
    let mut integer = Vec::new();
    for i in -20i64..=20 {
        for j in -20i64..=20 {
            for k in -20i64..=20 {
                pts.push(vec![i as f64 / 10.0, j as f64 / 10.0, k as f64 / 10.0]);
                integer.push((i, j, k));
            }
        }
    }
    let wf = WorldFunction::from_points(GeneratorSpec::pseudo_euclidean(vec![1, -1, -1]), &pts)
        .map_err(err)?;
    let tol = TolerancePolicy::default();
    let origin = integer.iter().position(|&p| p == (0, 0, 0)).unwrap();
    let basis = TubeBasis::new(&wf, ids(&[origin]), &tol).map_err(err)?;
    let everything = all(&wf);
    let tube: Vec<PointId> = tube_scan(&basis, &everything, &tol)
        .map_err(err)?
        .into_iter()
        .filter(|r| r.member)
        .map(|r| r.point)
        .collect();
    let oracle: Vec<PointId> = everything
        .iter()
        .copied()
        .filter(|p| {
            let (i, j, k) = integer[p.0];
            i * i == j * j + k * k
        })
        .collect();
    if tube != oracle {
        return Err(format!(
            "tube has {} points, cone has {}",
            tube.len(),
            oracle.len()
        ));
    }
    for probe in [
        (1, 1, 0),
        (5, -3, 4),
        (-13, 5, -12),
        (20, 0, -20),
        (0, 0, 0),
    ] {
        let p = PointId(integer.iter().position(|&q| q == probe).unwrap());
        let mut section = tube_section(&basis, p, &everything, &tol).map_err(err)?;
        section.sort();
        if section != oracle {
            return Err(format!("section at {probe:?} has {} points", section.len()));
        }
    }
    Ok(format!(
        "{} cone points of {}, sections equal the cone",
        oracle.len(),
        pts.len()
    ))
}

fn triangle_degeneracy() -> Result<String, String> {
    let tol = TolerancePolicy::default();
    let pts: Vec<Vec<f64>> = (0..=100)
        .flat_map(|i| (0..=100).map(move |j| vec![f64::from(i) / 100.0, f64::from(j) / 100.0]))
        .collect();
    let wf = WorldFunction::from_points(GeneratorSpec::euclidean(2), &pts).map_err(err)?;
    let (p0, p1) = (PointId(0), PointId(pts.len() - 1));
    let flat = degeneracy_report(&wf, p0, p1, &all(&wf), &tol).map_err(err)?;
    if flat.interior != 0 {
        return Err(format!(
            "euclidean grid has {} interior violations",
            flat.interior
        ));
    }
    let mut ball = Vec::new();
    for i in -10..=10 {
        for j in -10..=10 {
            for k in -10..=10 {
                let p = vec![
                    f64::from(i) / 10.0,
                    f64::from(j) / 10.0,
                    f64::from(k) / 10.0,
                ];
                if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12 {
                    ball.push(p);
                }
            }
        }
    }
    let wf = WorldFunction::from_points(GeneratorSpec::sphere_intrinsic(3), &ball).map_err(err)?;
    let find = |p: [f64; 3]| ball.iter().position(|q| q[..] == p[..]).unwrap();
    let (a, b) = (find([-0.8, 0.0, 0.0]), find([0.8, 0.0, 0.0]));
    let curved = degeneracy_report(&wf, PointId(a), PointId(b), &all(&wf), &tol).map_err(err)?;
    if curved.interior == 0 {
        return Err("intrinsic ball has no interior violations".into());
    }
    Ok(format!(
        "euclidean grid interior 0 of {}, intrinsic ball interior {} of {}",
        pts.len(),
        curved.interior,
        ball.len()
    ))
}

fn theorem_round_trip() -> Result<String, String> {
    let tol = TolerancePolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for dim in 2..=4 {
        let pts = random_cloud(&mut rng, 50, dim);
        let wf = WorldFunction::from_points(GeneratorSpec::euclidean(dim), &pts).map_err(err)?;
        let r = euclidean_structure_check(&wf, &all(&wf), dim, &tol, &StructureOptions::default())
            .map_err(err)?;
        if r.verdict != Verdict::EuclideanStructure || r.max_residual > 1e-9 {
            return Err(format!(
                "dim {dim}: {:?} with residual {:e}",
                r.verdict, r.max_residual
            ));
        }
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let e = (r.sigma_between(i, j).ok_or("no coordinates")?
                    - half_sq(&pts[i], &pts[j]))
                .abs();
                worst = worst.max(e);
                if e > 1e-8 {
                    return Err(format!("dim {dim}: coordinates miss σ({i},{j}) by {e:e}"));
                }
            }
        }
    }
    let surface: Vec<Vec<f64>> = random_pairs(25, 6)
        .into_iter()
        .flat_map(|(a, b)| [a.to_vec(), b.to_vec()])
        .collect();
    let wf =
        WorldFunction::from_points(GeneratorSpec::sphere_intrinsic(3), &surface).map_err(err)?;
    let r = euclidean_structure_check(&wf, &all(&wf), 3, &tol, &StructureOptions::default())
        .map_err(err)?;
    let condition = match (r.verdict, r.failing_condition) {
        (Verdict::Fails, Some(c)) => serde_json::to_string(&c).map_err(err)?,
        other => return Err(format!("sphere_intrinsic surface gave {other:?}")),
    };
    Ok(format!(
        "coordinate error {worst:.1e}; sphere surface fails {condition}"
    ))
}

fn embeddability() -> Result<String, String> {
    let tol = TolerancePolicy::default();
    let embed = |table: Vec<Vec<f64>>| -> Result<Embedding, String> {
        let wf = WorldFunction::from_sigma_table(&table).map_err(err)?;
        isometric_embed_finite(&extract_finite_subspace(&wf, &all(&wf)).map_err(err)?, &tol)
            .map_err(err)
    };
    // unit edges: σ = ½ on every pair
    let tetra: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| if i == j { 0.0 } else { 0.5 }).collect())
        .collect();
    let square = vec![
        vec![0.0, 0.5, 1.0, 0.5],
        vec![0.5, 0.0, 0.5, 1.0],
        vec![1.0, 0.5, 0.0, 0.5],
        vec![0.5, 1.0, 0.5, 0.0],
    ];
    let negative = vec![
        vec![0.0, 1.0, -0.5],
        vec![1.0, 0.0, 1.0],
        vec![-0.5, 1.0, 0.0],
    ];
    match (embed(tetra)?, embed(square)?, embed(negative)?) {
        (
            Embedding::Embeddable { dimension: 3, .. },
            Embedding::Embeddable { dimension: 2, .. },
            Embedding::NotEmbeddable { .. },
        ) => Ok("tetrahedron 3, square 2, negative σ not embeddable".into()),
        other => Err(format!("{other:?}")),
    }
}

fn sphere_closed_form() -> Result<String, String> {
    let mut worst = 0.0f64;
    for (a, b) in random_pairs(20, 7) {
        let est = intrinsic_metric(a, b, &default_candidates(a, b, 512), 4096).map_err(err)?;
        let e = (est.length - great_circle_distance(a, b)).abs();
        worst = worst.max(e);
        if e > 1e-3 {
            return Err(format!("pair {a:?} {b:?}: error {e:e}"));
        }
    }
    Ok(format!("20 pairs, worst absolute error {worst:.2e}"))
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cloud = serde_json::json!({
        "generator": "euclidean",
        "dimension": 3,
        "points": random_cloud(&mut rng, 40, 3),
    });
    let input = dir.path().join("cloud.json");
    std::fs::write(&input, cloud.to_string()).map_err(err)?;
    let input = input.to_str().ok_or("non-utf8 temp path")?.to_string();
    let runs: [&[&str]; 4] = [
        &[
            "classify", "--input", &input, "--order", "1,2,3", "--seed", "42",
        ],
        &[
            "classify", "--input", &input, "--order", "3", "--seed", "42", "--format", "csv",
        ],
        &[
            "embed-check",
            "--input",
            &input,
            "--order",
            "2",
            "--seed",
            "42",
        ],
        &[
            "sphere-demo",
            "--pairs",
            "2",
            "--candidates",
            "32",
            "--steps",
            "256",
            "--seed",
            "42",
            "--format",
            "csv",
        ],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("run{k}-{rep}"));
            let status = Command::new(env!("CARGO_BIN_EXE_tgeo"))
                .args(*args)
                .arg("--out")
                .arg(&out)
                .status()
                .map_err(err)?;
            if status.code().is_none_or(|c| c > 1) {
                return Err(format!("{args:?} exited with {status}"));
            }
            outputs.push(std::fs::read(&out).map_err(err)?);
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            return Err(format!("{args:?} produced different outputs"));
        }
    }
    Ok(format!(
        "{} commands byte-identical across runs",
        runs.len()
    ))
}

type Criterion = (u32, &'static str, Duration, fn() -> Result<String, String>);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            1,
            "euclidean volume oracle",
            Duration::from_secs(5),
            volume_oracle,
        ),
        (
            2,
            "antisymmetry suite",
            Duration::from_secs(5),
            antisymmetry,
        ),
        (
            3,
            "light-cone reproduction",
            Duration::from_secs(10),
            light_cone,
        ),
        (
            4,
            "triangle degeneracy",
            Duration::from_secs(10),
            triangle_degeneracy,
        ),
        (
            5,
            "structure theorem round trip",
            Duration::from_secs(10),
            theorem_round_trip,
        ),
        (6, "embeddability", Duration::from_secs(1), embeddability),
        (
            7,
            "sphere closed form",
            Duration::from_secs(60),
            sphere_closed_form,
        ),
        (8, "determinism", Duration::from_secs(5), determinism),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let line = match outcome {
            Ok(detail) if elapsed <= budget => format!("PASS criterion {id} ({name}): {detail}"),
            Ok(detail) => {
                format!("FAIL criterion {id} ({name}): over the {budget:?} budget; {detail}")
            }
            Err(why) => format!("FAIL criterion {id} ({name}): {why}"),
        };
        if line.starts_with("FAIL") {
            failed += 1;
        }
        println!("{line} [{:.2}s]", elapsed.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
