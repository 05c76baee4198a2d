//! Tubes: the zero sets of `F_{n+1}` over a non-degenerate σ-basis.
//!
//! In a proper Euclidean space the n-th order tube through `n + 1` points is
//! the n-plane through them. For other world functions tubes can be cones
//! (pseudo-Euclidean, zeroth order), surfaces of revolution (intrinsic sphere
//! metric in the ball) or collapse to the basis points themselves.
//!
//! All set-valued answers are computed over caller-supplied candidate lists;
//! verdicts are therefore valid at scan resolution only.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::gram_matrix_at;
use crate::sigma::{PointId, WorldFunction};
use crate::subsets::Combinations;
use crate::tolerance::{Sign, TolerancePolicy};

/// Default number of alternative bases sampled by [`check_definiteness`].
pub const DEFAULT_MAX_BASES: usize = 64;

/// Upper bound on basis combinations examined while looking for non-degenerate ones.
const MAX_COMBINATIONS_EXAMINED: usize = 200_000;

/// `n + 1` points with `F_n ≠ 0`.
#[derive(Debug, Clone)]
pub struct TubeBasis<'a> {
    wf: &'a WorldFunction,
    points: Vec<PointId>,
    f_n: f64,
    absolute_threshold: Option<f64>,
}

impl<'a> TubeBasis<'a> {
    pub fn new(wf: &'a WorldFunction, points: Vec<PointId>, tol: &TolerancePolicy) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointList);
        }
        wf.check_all(&points)?;
        let raw: Vec<usize> = points.iter().map(|p| p.0).collect();
        let g = gram_matrix_at(wf, &raw);
        let f_n = g.determinant();
        let order = points.len() - 1;
        if tol.is_zero(f_n, g.max_abs(), order) {
            return Err(Error::DegenerateBasis { order, value: f_n });
        }
        Ok(Self {
            wf,
            points,
            f_n,
            absolute_threshold: None,
        })
    }

    /// Replaces the scaled membership threshold with a fixed absolute one.
    pub fn with_absolute_threshold(mut self, threshold: f64) -> Self {
        self.absolute_threshold = Some(threshold.abs());
        self
    }

    pub fn world_function(&self) -> &'a WorldFunction {
        self.wf
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn order(&self) -> usize {
        self.points.len() - 1
    }

    /// Cached `F_n` of the basis.
    pub fn f_n(&self) -> f64 {
        self.f_n
    }

    fn residual(&self, r: usize) -> (f64, f64) {
        let mut raw: Vec<usize> = self.points.iter().map(|p| p.0).collect();
        raw.push(r);
        let g = gram_matrix_at(self.wf, &raw);
        (g.determinant(), g.max_abs())
    }

    fn report(&self, r: PointId, tol: &TolerancePolicy) -> TubeMembershipReport {
        let (residual, m) = self.residual(r.0);
        let member = match self.absolute_threshold {
            Some(t) => residual.abs() <= t,
            None => tol.is_zero(residual, m, self.order() + 1),
        };
        TubeMembershipReport {
            point: r,
            residual,
            member,
        }
    }

    fn same_set_as(&self, other: &[PointId]) -> bool {
        let mine: HashSet<_> = self.points.iter().collect();
        let theirs: HashSet<_> = other.iter().collect();
        mine == theirs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeMembershipReport {
    pub point: PointId,
    /// `F_{n+1}` of the basis extended by `point`.
    pub residual: f64,
    pub member: bool,
}

pub fn tube_membership(
    basis: &TubeBasis<'_>,
    r: PointId,
    tol: &TolerancePolicy,
) -> Result<TubeMembershipReport> {
    basis.wf.check(r)?;
    Ok(basis.report(r, tol))
}

/// Membership for each candidate, in candidate order.
pub fn tube_scan(
    basis: &TubeBasis<'_>,
    candidates: &[PointId],
    tol: &TolerancePolicy,
) -> Result<Vec<TubeMembershipReport>> {
    basis.wf.check_all(candidates)?;
    Ok(candidates
        .par_iter()
        .map(|&r| basis.report(r, tol))
        .collect())
}

fn members(
    basis: &TubeBasis<'_>,
    candidates: &[PointId],
    tol: &TolerancePolicy,
) -> Result<Vec<PointId>> {
    Ok(tube_scan(basis, candidates, tol)?
        .into_iter()
        .filter(|r| r.member)
        .map(|r| r.point)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstOrderClass {
    /// `S_2(P0, R, P1) = 0`
    Segment,
    /// `S_2(P0, P1, R) = 0`
    RayBeyondP1,
    /// `S_2(P1, P0, R) = 0`
    RayBeyondP0,
    /// `S_2(P0, R, P1) < 0`: the triangle inequality fails.
    InteriorViolation,
    Exterior,
}

impl FirstOrderClass {
    pub fn on_tube(self) -> bool {
        matches!(
            self,
            FirstOrderClass::Segment | FirstOrderClass::RayBeyondP0 | FirstOrderClass::RayBeyondP1
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FirstOrderClass::Segment => "segment",
            FirstOrderClass::RayBeyondP1 => "ray_beyond_p1",
            FirstOrderClass::RayBeyondP0 => "ray_beyond_p0",
            FirstOrderClass::InteriorViolation => "interior_violation",
            FirstOrderClass::Exterior => "exterior",
        }
    }
}

/// Factors of `F_2(P0, P1, R) = ¼ S_+ · S_2(P0,R,P1) · S_2(P0,P1,R) · S_2(P1,P0,R)`
/// with `S = √(2σ)`, and the resulting location of `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderLocus {
    pub point: PointId,
    pub class: FirstOrderClass,
    pub s_plus: f64,
    pub s2_p0_r_p1: f64,
    pub s2_p0_p1_r: f64,
    pub s2_p1_p0_r: f64,
}

impl FirstOrderLocus {
    /// Product form of `F_2`.
    pub fn f2_from_factors(&self) -> f64 {
        0.25 * self.s_plus * self.s2_p0_r_p1 * self.s2_p0_p1_r * self.s2_p1_p0_r
    }
}

fn nonnegative_sigma(wf: &WorldFunction, p: usize, q: usize) -> Result<f64> {
    let s = wf.sigma_at(p, q);
    if s < 0.0 {
        Err(Error::IndefiniteSigma {
            p: PointId(p),
            q: PointId(q),
            value: s,
        })
    } else {
        Ok(s)
    }
}

fn check_first_order_basis(
    wf: &WorldFunction,
    p0: PointId,
    p1: PointId,
    tol: &TolerancePolicy,
) -> Result<f64> {
    wf.check_all(&[p0, p1])?;
    let s01 = (2.0 * nonnegative_sigma(wf, p0.0, p1.0)?).sqrt();
    if tol.is_zero(s01, s01, 1) {
        return Err(Error::DegenerateBasis {
            order: 1,
            value: s01 * s01,
        });
    }
    Ok(s01)
}

fn locate(
    wf: &WorldFunction,
    p0: usize,
    p1: usize,
    r: usize,
    tol: &TolerancePolicy,
) -> Result<FirstOrderLocus> {
    let s01 = (2.0 * nonnegative_sigma(wf, p0, p1)?).sqrt();
    let s0r = (2.0 * nonnegative_sigma(wf, p0, r)?).sqrt();
    let s1r = (2.0 * nonnegative_sigma(wf, p1, r)?).sqrt();
    let scale = s01.max(s0r).max(s1r);
    let s_plus = s01 + s0r + s1r;
    if tol.is_zero(s_plus, scale, 1) {
        return Err(Error::UndefinedTube);
    }
    let s2_p0_r_p1 = s0r + s1r - s01;
    let s2_p0_p1_r = s01 + s1r - s0r;
    let s2_p1_p0_r = s01 + s0r - s1r;
    let class = match tol.sign(s2_p0_r_p1, scale, 1) {
        Sign::Zero => FirstOrderClass::Segment,
        Sign::Negative => FirstOrderClass::InteriorViolation,
        Sign::Positive => {
            if tol.is_zero(s2_p0_p1_r, scale, 1) {
                FirstOrderClass::RayBeyondP1
            } else if tol.is_zero(s2_p1_p0_r, scale, 1) {
                FirstOrderClass::RayBeyondP0
            } else {
                FirstOrderClass::Exterior
            }
        }
    };
    Ok(FirstOrderLocus {
        point: PointId(r),
        class,
        s_plus,
        s2_p0_r_p1,
        s2_p0_p1_r,
        s2_p1_p0_r,
    })
}

/// Places `r` relative to the first-order tube through `p0`, `p1`.
///
/// Requires non-negative σ on all three pairs. Points on both the segment and
/// a ray (the endpoints) are reported as segment.
pub fn first_order_locate(
    wf: &WorldFunction,
    p0: PointId,
    p1: PointId,
    r: PointId,
    tol: &TolerancePolicy,
) -> Result<FirstOrderLocus> {
    check_first_order_basis(wf, p0, p1, tol)?;
    wf.check(r)?;
    locate(wf, p0.0, p1.0, r.0, tol)
}

fn sigma_profile_matches(
    wf: &WorldFunction,
    basis: &[PointId],
    p: usize,
    q: usize,
    tol: &TolerancePolicy,
) -> bool {
    basis.iter().all(|l| {
        let (a, b) = (wf.sigma_at(l.0, p), wf.sigma_at(l.0, q));
        tol.is_zero(a - b, a.abs().max(b.abs()), 1)
    })
}

/// Tube points among `candidates` sharing every basis σ-value with `p`; always contains `p`.
pub fn tube_section(
    basis: &TubeBasis<'_>,
    p: PointId,
    candidates: &[PointId],
    tol: &TolerancePolicy,
) -> Result<Vec<PointId>> {
    if !tube_membership(basis, p, tol)?.member {
        return Err(Error::NotATubeMember(p));
    }
    let mut out: Vec<PointId> = members(basis, candidates, tol)?
        .into_iter()
        .filter(|q| sigma_profile_matches(basis.wf, &basis.points, p.0, q.0, tol))
        .collect();
    if !out.contains(&p) {
        out.insert(0, p);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Definiteness {
    Holds {
        bases_tested: usize,
    },
    Fails {
        basis: Vec<PointId>,
        point: PointId,
    },
    /// No alternative non-degenerate basis exists among the scanned members.
    Vacuous,
}

impl Definiteness {
    pub fn holds(&self) -> bool {
        !matches!(self, Definiteness::Fails { .. })
    }
}

/// Checks that alternative bases drawn from the tube regenerate the same tube.
///
/// Up to `max_bases` non-degenerate `(n+1)`-subsets of the member points are
/// tried in lexicographic order of point index.
pub fn check_definiteness(
    basis: &TubeBasis<'_>,
    candidates: &[PointId],
    tol: &TolerancePolicy,
    max_bases: usize,
) -> Result<Definiteness> {
    let reference = tube_scan(basis, candidates, tol)?;
    let mut pool: Vec<PointId> = reference
        .iter()
        .filter(|r| r.member)
        .map(|r| r.point)
        .collect();
    pool.sort();
    pool.dedup();
    let k = basis.points.len();
    let mut tested = 0;
    for combo in Combinations::new(pool.len(), k).take(MAX_COMBINATIONS_EXAMINED) {
        if tested >= max_bases {
            break;
        }
        let alt: Vec<PointId> = combo.iter().map(|&i| pool[i]).collect();
        if basis.same_set_as(&alt) {
            continue;
        }
        let Ok(mut alt_basis) = TubeBasis::new(basis.wf, alt.clone(), tol) else {
            continue;
        };
        alt_basis.absolute_threshold = basis.absolute_threshold;
        tested += 1;
        for r in &reference {
            if alt_basis.report(r.point, tol).member != r.member {
                return Ok(Definiteness::Fails {
                    basis: alt,
                    point: r.point,
                });
            }
        }
    }
    Ok(if tested == 0 {
        Definiteness::Vacuous
    } else {
        Definiteness::Holds {
            bases_tested: tested,
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SectionMinimality {
    Holds,
    Fails { point: PointId, other: PointId },
}

impl SectionMinimality {
    pub fn holds(&self) -> bool {
        matches!(self, SectionMinimality::Holds)
    }
}

/// Holds iff every scanned tube member is alone in its section.
pub fn check_section_minimality(
    basis: &TubeBasis<'_>,
    candidates: &[PointId],
    tol: &TolerancePolicy,
) -> Result<SectionMinimality> {
    let mut m = members(basis, candidates, tol)?;
    m.sort();
    m.dedup();
    let witness = m.par_iter().enumerate().find_map_first(|(i, &p)| {
        m[i + 1..]
            .iter()
            .find(|q| sigma_profile_matches(basis.wf, &basis.points, p.0, q.0, tol))
            .map(|&q| (p, q))
    });
    Ok(match witness {
        Some((point, other)) => SectionMinimality::Fails { point, other },
        None => SectionMinimality::Holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Extremality {
    GeodesicTube,
    NotExtremal {
        definiteness: Definiteness,
        minimality: SectionMinimality,
    },
}

/// A geodesic tube satisfies both definiteness and section minimality on the sample.
pub fn classify_extremality(
    basis: &TubeBasis<'_>,
    candidates: &[PointId],
    tol: &TolerancePolicy,
    max_bases: usize,
) -> Result<Extremality> {
    let definiteness = check_definiteness(basis, candidates, tol, max_bases)?;
    let minimality = check_section_minimality(basis, candidates, tol)?;
    Ok(if definiteness.holds() && minimality.holds() {
        Extremality::GeodesicTube
    } else {
        Extremality::NotExtremal {
            definiteness,
            minimality,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// Some candidate violates the triangle inequality with `P0`, `P1`.
    Nondegenerate,
    /// No violations, and the segment holds points other than `P0`, `P1`.
    Degenerate,
    /// No violations and the segment is just `{P0, P1}`.
    Ultradegenerate,
}

pub const SCAN_RESOLUTION: &str = "at scan resolution";

/// Triangle-inequality census of candidates against the segment `P0P1`.
#[derive(Debug, Clone, Serialize)]
pub struct DegeneracyReport {
    pub verdict: Degeneracy,
    pub interior: usize,
    pub on_segment: usize,
    pub outside: usize,
    pub on_segment_non_basis: usize,
    pub resolution: &'static str,
}

pub fn degeneracy_report(
    wf: &WorldFunction,
    p0: PointId,
    p1: PointId,
    candidates: &[PointId],
    tol: &TolerancePolicy,
) -> Result<DegeneracyReport> {
    check_first_order_basis(wf, p0, p1, tol)?;
    wf.check_all(candidates)?;
    let loci: Vec<FirstOrderLocus> = candidates
        .par_iter()
        .map(|r| locate(wf, p0.0, p1.0, r.0, tol))
        .collect::<Result<_>>()?;
    let mut report = DegeneracyReport {
        verdict: Degeneracy::Ultradegenerate,
        interior: 0,
        on_segment: 0,
        outside: 0,
        on_segment_non_basis: 0,
        resolution: SCAN_RESOLUTION,
    };
    for l in &loci {
        match l.class {
            FirstOrderClass::InteriorViolation => report.interior += 1,
            FirstOrderClass::Segment => {
                report.on_segment += 1;
                if l.point != p0 && l.point != p1 {
                    report.on_segment_non_basis += 1;
                }
            }
            _ => report.outside += 1,
        }
    }
    report.verdict = if report.interior > 0 {
        Degeneracy::Nondegenerate
    } else if report.on_segment_non_basis > 0 {
        Degeneracy::Degenerate
    } else {
        Degeneracy::Ultradegenerate
    };
    Ok(report)
}

/// Which end of the oriented segment the second vector starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentAnchor {
    Start,
    End,
}

/// Scalar σ-product of the oriented segment `P0→P1` with `P0Q` (start) or `P1Q` (end).
pub fn oriented_segment_dot(
    wf: &WorldFunction,
    p0: PointId,
    p1: PointId,
    anchor: SegmentAnchor,
    q: PointId,
) -> Result<f64> {
    wf.check_all(&[p0, p1, q])?;
    let (s01, s0q, s1q) = (
        wf.sigma_at(p0.0, p1.0),
        wf.sigma_at(p0.0, q.0),
        wf.sigma_at(p1.0, q.0),
    );
    Ok(match anchor {
        SegmentAnchor::Start => s01 + s0q - s1q,
        SegmentAnchor::End => -s01 - s1q + s0q,
    })
}
