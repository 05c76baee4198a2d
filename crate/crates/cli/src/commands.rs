//! Thin bindings from subcommands to the engine.

use rayon::prelude::*;
use serde::Serialize;
use tgeometry::euclid::{
    euclidean_structure_check, isometric_embed_finite, Embedding, StructureOptions, Verdict,
};
use tgeometry::gram::{classify_length, gram_determinant, LengthClass};
use tgeometry::sphere::{
    default_candidates, fibonacci_sphere, great_circle_distance, intrinsic_metric, random_pairs,
    Vec3,
};
use tgeometry::subsets::{binomial, distinct_index_subsets};
use tgeometry::tube::{
    degeneracy_report, first_order_locate, tube_scan, tube_section, DegeneracyReport, TubeBasis,
};
use tgeometry::{extract_finite_subspace, PointId, TolerancePolicy, WorldFunction};

use crate::output::{ids, json, num, Csv};
use crate::{Failure, Format, Outcome, RunArgs};

/// Subsets per order above which classify samples instead of enumerating.
pub const MAX_CLASSIFY_SUBSETS: usize = 10_000;

fn policy(run: &RunArgs) -> Result<TolerancePolicy, Failure> {
    match run.tol {
        None => Ok(TolerancePolicy::default()),
        Some(t) if t.is_finite() && t > 0.0 => Ok(TolerancePolicy::new(t)),
        Some(t) => Err(Failure::Input(format!("--tol must be positive, got {t}"))),
    }
}

fn point_ids(wf: &WorldFunction, raw: &[usize]) -> Result<Vec<PointId>, Failure> {
    let pts: Vec<PointId> = raw.iter().map(|&i| PointId(i)).collect();
    wf.check_all(&pts)?;
    Ok(pts)
}

fn all_points(wf: &WorldFunction) -> Vec<PointId> {
    wf.point_ids().collect()
}

fn success(text: String) -> Outcome {
    Outcome {
        text,
        negative: false,
    }
}

#[derive(Serialize)]
struct ClassifyRow {
    points: Vec<usize>,
    f_n: f64,
    length_class: LengthClass,
}

#[derive(Serialize, Default)]
struct ClassifySummary {
    zero: usize,
    positive: usize,
    negative: usize,
}

#[derive(Serialize)]
struct ClassifyOrder {
    order: usize,
    sampled: bool,
    rows: Vec<ClassifyRow>,
    summary: ClassifySummary,
}

#[derive(Serialize)]
struct ClassifyReport {
    points: usize,
    orders: Vec<ClassifyOrder>,
}

pub fn classify(wf: &WorldFunction, orders: &[usize], run: &RunArgs) -> Result<Outcome, Failure> {
    let tol = policy(run)?;
    if let Some(&n) = orders.iter().max() {
        if n + 1 > wf.len() {
            return Err(Failure::Input(format!(
                "order {n} needs {} points, the domain has {}",
                n + 1,
                wf.len()
            )));
        }
    }
    let mut report = ClassifyReport {
        points: wf.len(),
        orders: Vec::with_capacity(orders.len()),
    };
    for &n in orders {
        let k = n + 1;
        let sampled = binomial(wf.len(), k).is_none_or(|t| t > MAX_CLASSIFY_SUBSETS);
        let subsets = distinct_index_subsets(
            wf.len(),
            k,
            MAX_CLASSIFY_SUBSETS,
            run.seed.wrapping_add(n as u64),
        );
        let rows: Vec<ClassifyRow> = subsets
            .into_par_iter()
            .map(|s| {
                let pts: Vec<PointId> = s.iter().map(|&i| PointId(i)).collect();
                let fs = extract_finite_subspace(wf, &pts)?;
                let f = gram_determinant(&fs);
                let len = classify_length(f, fs.gram_matrix().max_abs(), n, &tol);
                Ok(ClassifyRow {
                    points: s,
                    f_n: f,
                    length_class: len.klass,
                })
            })
            .collect::<tgeometry::Result<_>>()?;
        let mut summary = ClassifySummary::default();
        for r in &rows {
            match r.length_class {
                LengthClass::Null => summary.zero += 1,
                LengthClass::Real => summary.positive += 1,
                LengthClass::Imaginary => summary.negative += 1,
            }
        }
        report.orders.push(ClassifyOrder {
            order: n,
            sampled,
            rows,
            summary,
        });
    }
    Ok(success(match run.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut csv = Csv::new(&["order", "points", "f_n", "length_class"]);
            for o in &report.orders {
                for r in &o.rows {
                    csv.row(&[
                        o.order.to_string(),
                        ids(&r.points),
                        num(r.f_n),
                        class_name(r.length_class).into(),
                    ]);
                }
            }
            csv.finish()
        }
    }))
}

fn class_name(c: LengthClass) -> &'static str {
    match c {
        LengthClass::Real => "real",
        LengthClass::Null => "null",
        LengthClass::Imaginary => "imaginary",
    }
}

#[derive(Serialize)]
struct TubeRow {
    point: usize,
    residual: f64,
    member: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    class: Option<&'static str>,
}

#[derive(Serialize)]
struct TubeReport {
    basis: Vec<usize>,
    order: usize,
    f_n: f64,
    members: usize,
    points: Vec<TubeRow>,
}

pub fn tube(wf: &WorldFunction, basis: &[usize], run: &RunArgs) -> Result<Outcome, Failure> {
    let tol = policy(run)?;
    let pts = point_ids(wf, basis)?;
    let tb = TubeBasis::new(wf, pts.clone(), &tol)?;
    let all = all_points(wf);
    let scan = tube_scan(&tb, &all, &tol)?;
    // the first-order split into segment and rays needs σ ≥ 0 around the basis
    let first_order =
        pts.len() == 2 && first_order_locate(wf, pts[0], pts[1], pts[1], &tol).is_ok();
    let rows: Vec<TubeRow> = scan
        .par_iter()
        .map(|r| TubeRow {
            point: r.point.0,
            residual: r.residual,
            member: r.member,
            class: if first_order {
                first_order_locate(wf, pts[0], pts[1], r.point, &tol)
                    .ok()
                    .map(|l| l.class.as_str())
            } else {
                None
            },
        })
        .collect();
    let report = TubeReport {
        basis: basis.to_vec(),
        order: tb.order(),
        f_n: tb.f_n(),
        members: rows.iter().filter(|r| r.member).count(),
        points: rows,
    };
    Ok(success(match run.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut csv = Csv::new(&["point", "residual", "member", "class"]);
            for r in &report.points {
                csv.row(&[
                    r.point.to_string(),
                    num(r.residual),
                    r.member.to_string(),
                    r.class.unwrap_or("").into(),
                ]);
            }
            csv.finish()
        }
    }))
}

#[derive(Serialize)]
struct SectionReport {
    basis: Vec<usize>,
    point: usize,
    section: Vec<usize>,
}

pub fn section(
    wf: &WorldFunction,
    basis: &[usize],
    point: usize,
    run: &RunArgs,
) -> Result<Outcome, Failure> {
    let tol = policy(run)?;
    let pts = point_ids(wf, basis)?;
    let p = point_ids(wf, &[point])?[0];
    let tb = TubeBasis::new(wf, pts, &tol)?;
    let mut section: Vec<usize> = tube_section(&tb, p, &all_points(wf), &tol)?
        .into_iter()
        .map(|q| q.0)
        .collect();
    section.sort_unstable();
    let report = SectionReport {
        basis: basis.to_vec(),
        point,
        section,
    };
    Ok(success(match run.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut csv = Csv::new(&["point"]);
            for q in &report.section {
                csv.row(&[q.to_string()]);
            }
            csv.finish()
        }
    }))
}

#[derive(Serialize)]
struct DegeneracyOutput {
    basis: Vec<usize>,
    #[serde(flatten)]
    report: DegeneracyReport,
}

pub fn degeneracy(wf: &WorldFunction, basis: &[usize], run: &RunArgs) -> Result<Outcome, Failure> {
    let tol = policy(run)?;
    if basis.len() != 2 {
        return Err(Failure::Input(format!(
            "degeneracy needs a basis of two points, got {}",
            basis.len()
        )));
    }
    let pts = point_ids(wf, basis)?;
    let report = degeneracy_report(wf, pts[0], pts[1], &all_points(wf), &tol)?;
    let out = DegeneracyOutput {
        basis: basis.to_vec(),
        report,
    };
    Ok(success(match run.format {
        Format::Json => json(&out)?,
        Format::Csv => {
            let r = &out.report;
            let mut csv = Csv::new(&[
                "verdict",
                "interior",
                "on_segment",
                "outside",
                "on_segment_non_basis",
            ]);
            let verdict =
                serde_json::to_value(r.verdict).map_err(|e| Failure::Internal(e.to_string()))?;
            csv.row(&[
                verdict.as_str().unwrap_or_default().into(),
                r.interior.to_string(),
                r.on_segment.to_string(),
                r.outside.to_string(),
                r.on_segment_non_basis.to_string(),
            ]);
            csv.finish()
        }
    }))
}

fn json_str<T: Serialize>(v: &T) -> Result<String, Failure> {
    let value = serde_json::to_value(v).map_err(|e| Failure::Internal(e.to_string()))?;
    Ok(match value {
        serde_json::Value::String(s) => s,
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    })
}

pub fn embed_check(
    wf: &WorldFunction,
    order: Option<usize>,
    run: &RunArgs,
) -> Result<Outcome, Failure> {
    let tol = policy(run)?;
    let all = all_points(wf);
    let header = [
        "verdict",
        "failing_condition",
        "max_residual",
        "witness",
        "dimension",
    ];
    match order {
        Some(n) => {
            let opts = StructureOptions {
                seed: run.seed,
                ..StructureOptions::default()
            };
            let report = euclidean_structure_check(wf, &all, n, &tol, &opts)?;
            let negative = report.verdict == Verdict::Fails;
            let text = match run.format {
                Format::Json => json(&report)?,
                Format::Csv => {
                    let mut csv = Csv::new(&header);
                    let witness: Vec<usize> =
                        report.witness.iter().flatten().map(|p| p.0).collect();
                    csv.row(&[
                        json_str(&report.verdict)?,
                        json_str(&report.failing_condition)?,
                        num(report.max_residual),
                        ids(&witness),
                        n.to_string(),
                    ]);
                    csv.finish()
                }
            };
            Ok(Outcome { text, negative })
        }
        None => {
            let fs = extract_finite_subspace(wf, &all)?;
            let embedding = isometric_embed_finite(&fs, &tol)?;
            let negative = matches!(embedding, Embedding::NotEmbeddable { .. });
            let text = match run.format {
                Format::Json => json(&embedding)?,
                Format::Csv => {
                    let mut csv = Csv::new(&header);
                    match &embedding {
                        Embedding::Embeddable { dimension, .. } => csv.row(&[
                            "embeddable".into(),
                            String::new(),
                            num(0.0),
                            String::new(),
                            dimension.to_string(),
                        ]),
                        Embedding::NotEmbeddable { eigenvalue } => csv.row(&[
                            "not_embeddable".into(),
                            "negative_eigenvalue".into(),
                            num(*eigenvalue),
                            String::new(),
                            String::new(),
                        ]),
                    }
                    csv.finish()
                }
            };
            Ok(Outcome { text, negative })
        }
    }
}

pub struct SphereDemo {
    pub pairs: usize,
    pub candidates: usize,
    pub steps: usize,
    pub great_circle: bool,
}

#[derive(Serialize)]
struct SphereRow {
    a: Vec3,
    b: Vec3,
    best_c: Vec3,
    l_min: f64,
    closed_form: f64,
    abs_error: f64,
}

#[derive(Serialize)]
struct SphereReport {
    candidates: usize,
    steps: usize,
    max_abs_error: f64,
    rows: Vec<SphereRow>,
}

pub fn sphere_demo(demo: &SphereDemo, run: &RunArgs) -> Result<Outcome, Failure> {
    let rows = random_pairs(demo.pairs, run.seed)
        .into_iter()
        .map(|(a, b)| {
            let cs = if demo.great_circle {
                default_candidates(a, b, demo.candidates)
            } else {
                fibonacci_sphere(demo.candidates)
            };
            let est = intrinsic_metric(a, b, &cs, demo.steps)?;
            let closed_form = great_circle_distance(a, b);
            Ok(SphereRow {
                a,
                b,
                best_c: est.best_c,
                l_min: est.length,
                closed_form,
                abs_error: (est.length - closed_form).abs(),
            })
        })
        .collect::<tgeometry::Result<Vec<_>>>()?;
    let report = SphereReport {
        candidates: demo.candidates,
        steps: demo.steps,
        max_abs_error: rows.iter().map(|r| r.abs_error).fold(0.0, f64::max),
        rows,
    };
    Ok(success(match run.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut csv = Csv::new(&[
                "a_x",
                "a_y",
                "a_z",
                "b_x",
                "b_y",
                "b_z",
                "c_x",
                "c_y",
                "c_z",
                "l_min",
                "closed_form",
                "abs_error",
            ]);
            for r in &report.rows {
                let mut fields: Vec<String> =
                    r.a.iter()
                        .chain(&r.b)
                        .chain(&r.best_c)
                        .map(|&v| num(v))
                        .collect();
                fields.extend([num(r.l_min), num(r.closed_form), num(r.abs_error)]);
                csv.row(&fields);
            }
            csv.finish()
        }
    }))
}
