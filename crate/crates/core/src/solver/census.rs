//! Orbit validation, orbit grouping and the census report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::newton::System;
use super::system::{canonical_cmp, candidates};
use super::{fixed_point_system, Solution, SolverOptions};
use crate::cohomology::{predicted_count, CountPrediction};
use crate::error::{Error, Result};
use crate::families::{FamilySpec, FamilyTag, PlanarMap, Step};
use crate::poly::scalar::{format_f64, ComplexApprox};
use crate::poly::{FloatPoly, MultiPoly};
use crate::proj_map::homogenize;

/// A validated affine period-`n` point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub x: ComplexApprox,
    pub y: ComplexApprox,
    /// Closure error `|F^n(p) - p| / max(1, |p|)` along the original recurrence.
    pub residual: f64,
    /// Normwise backward error in the fixed-point system.
    pub system_residual: f64,
    pub simple: bool,
    pub multiplicity: u32,
    pub orbit_id: usize,
    /// Least period, a divisor of `n`.
    pub period: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RejectReason {
    /// A denominator fell below the pole guard.
    Pole,
    /// An iterate exceeded the overflow guard.
    Infinity,
    /// `F^n(p)` does not return to `p`.
    Closure,
}

impl RejectReason {
    pub fn code(self) -> &'static str {
        match self {
            RejectReason::Pole => "pole",
            RejectReason::Infinity => "infinity",
            RejectReason::Closure => "closure",
        }
    }
}

/// A solved candidate that is not a valid periodic point, with the orbit
/// prefix needed to re-check the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub x: ComplexApprox,
    pub y: ComplexApprox,
    pub reason: RejectReason,
    /// Step at which the reason was detected (`n` for closure).
    pub step: u32,
    pub closure_error: Option<f64>,
    pub trace: Vec<[ComplexApprox; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrbitCheck {
    /// `trace[0..=n]` is the orbit, `trace[n]` close to `trace[0]`.
    Valid { trace: Vec<[Complex64; 2]>, closure: f64 },
    Rejected(Rejection),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "MATCH")]
    Match,
    #[serde(rename = "MISMATCH")]
    Mismatch,
    #[serde(rename = "NON-ISOLATED")]
    NonIsolated,
    #[serde(rename = "UNPREDICTED")]
    Unpredicted,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Match => "MATCH",
            Verdict::Mismatch => "MISMATCH",
            Verdict::NonIsolated => "NON-ISOLATED",
            Verdict::Unpredicted => "UNPREDICTED",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub max_closure: f64,
    pub mean_closure: f64,
    pub max_system: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicReport {
    pub family: FamilyTag,
    pub params: BTreeMap<String, String>,
    pub n: u32,
    pub predicted: Option<CountPrediction>,
    pub found_distinct: usize,
    pub found_with_multiplicity: u32,
    pub points: Vec<PeriodicPoint>,
    pub rejected: Vec<Rejection>,
    pub non_isolated: bool,
    pub non_isolated_detail: Option<String>,
    pub orbit_sizes: Vec<u32>,
    pub warnings: Vec<String>,
    pub residuals: ResidualStats,
    pub seed: u64,
    pub verdict: Verdict,
}

fn approx(z: Complex64) -> ComplexApprox {
    ComplexApprox::new(z).expect("guarded before storing")
}

fn approx_pair(z: [Complex64; 2]) -> [ComplexApprox; 2] {
    [approx(z[0]), approx(z[1])]
}

fn inf_norm(z: &[Complex64; 2]) -> f64 {
    z[0].norm().max(z[1].norm())
}

fn rel_dist(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    inf_norm(&[a[0] - b[0], a[1] - b[1]]) / inf_norm(a).max(1.0)
}

/// Replays `n` steps of the family's recurrence from `start`.
pub fn validate_orbit(spec: &FamilySpec, start: [Complex64; 2], n: u32, opts: &SolverOptions) -> OrbitCheck {
    let escaped = |z: &[Complex64; 2]| z.iter().any(|c| !(c.norm() <= opts.overflow_guard));
    let reject = |reason, step, trace: &[[Complex64; 2]], closure_error| {
        OrbitCheck::Rejected(Rejection {
            x: approx(start[0]),
            y: approx(start[1]),
            reason,
            step,
            closure_error,
            trace: trace.iter().copied().map(approx_pair).collect(),
        })
    };
    if escaped(&start) {
        let s = [start[0].unscale(inf_norm(&start)), start[1].unscale(inf_norm(&start))];
        return OrbitCheck::Rejected(Rejection {
            x: approx(s[0]),
            y: approx(s[1]),
            reason: RejectReason::Infinity,
            step: 0,
            closure_error: None,
            trace: Vec::new(),
        });
    }
    let mut trace = vec![start];
    for step in 1..=n {
        match spec.planar.step(*trace.last().unwrap(), opts.pole_guard) {
            Step::Pole => return reject(RejectReason::Pole, step, &trace, None),
            Step::Point(w) if escaped(&w) => return reject(RejectReason::Infinity, step, &trace, None),
            Step::Point(w) => trace.push(w),
        }
    }
    let closure = rel_dist(&start, &trace[n as usize]);
    if !(closure <= opts.closure_tol) {
        return reject(RejectReason::Closure, n, &trace, Some(closure));
    }
    OrbitCheck::Valid { trace, closure }
}

/// Values and first partials of a planar map in floating point.
struct Jet {
    num: [FloatPoly; 2],
    den: [FloatPoly; 2],
    dnum: [[FloatPoly; 2]; 2],
    dden: [[FloatPoly; 2]; 2],
}

type Mat2 = [[Complex64; 2]; 2];

impl Jet {
    fn new(m: &PlanarMap) -> Self {
        let [f, g] = &m.components;
        let fp = |p: &MultiPoly| p.to_float();
        Self {
            num: [fp(&f.num), fp(&g.num)],
            den: [fp(&f.den), fp(&g.den)],
            dnum: [[fp(&f.num.derivative(0)), fp(&f.num.derivative(1))], [fp(&g.num.derivative(0)), fp(&g.num.derivative(1))]],
            dden: [[fp(&f.den.derivative(0)), fp(&f.den.derivative(1))], [fp(&g.den.derivative(0)), fp(&g.den.derivative(1))]],
        }
    }

    fn step(&self, z: &[Complex64; 2]) -> Option<([Complex64; 2], Mat2)> {
        let mut w = [Complex64::zero(); 2];
        let mut d = [[Complex64::zero(); 2]; 2];
        for i in 0..2 {
            let (nv, dv) = (self.num[i].eval(z), self.den[i].eval(z));
            if dv.norm() == 0.0 {
                return None;
            }
            w[i] = nv / dv;
            for k in 0..2 {
                d[i][k] = (self.dnum[i][k].eval(z) * dv - nv * self.dden[i][k].eval(z)) / (dv * dv);
            }
        }
        Some((w, d))
    }
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[Complex64::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// `F^n(z)` and its Jacobian, by the chain rule along the orbit.
fn orbit_jet(jet: &Jet, z: [Complex64; 2], n: u32, opts: &SolverOptions) -> Option<([Complex64; 2], Mat2)> {
    let mut w = z;
    let mut j: Mat2 = [[Complex64::one(), Complex64::zero()], [Complex64::zero(), Complex64::one()]];
    for _ in 0..n {
        let (w2, d) = jet.step(&w)?;
        if inf_norm(&w2) > opts.overflow_guard {
            return None;
        }
        j = mat_mul(&d, &j);
        w = w2;
    }
    Some((w, j))
}

/// `|det(DF^n - I)|` relative to its row norms; small near a multiple
/// fixed point.
fn orbit_conditioning(jet: &Jet, z: [Complex64; 2], n: u32, opts: &SolverOptions) -> f64 {
    let Some((_, j)) = orbit_jet(jet, z, n, opts) else { return 0.0 };
    let a = [[j[0][0] - 1.0, j[0][1]], [j[1][0], j[1][1] - 1.0]];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let r0 = (a[0][0].norm_sqr() + a[0][1].norm_sqr()).sqrt();
    let r1 = (a[1][0].norm_sqr() + a[1][1].norm_sqr()).sqrt();
    if r0 == 0.0 || r1 == 0.0 { 0.0 } else { det.norm() / (r0 * r1) }
}

/// Newton on `F^n(z) - z` with the orbit evaluated step by step, which avoids
/// the cancellation in the expanded fixed-point polynomials.
fn polish_orbit(jet: &Jet, start: [Complex64; 2], n: u32, opts: &SolverOptions) -> Option<[Complex64; 2]> {
    let mut z = start;
    for _ in 0..30 {
        let (w, j) = orbit_jet(jet, z, n, opts)?;
        let g = [w[0] - z[0], w[1] - z[1]];
        let a = [[j[0][0] - 1.0, j[0][1]], [j[1][0], j[1][1] - 1.0]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.norm() == 0.0 {
            break;
        }
        let d = [(g[0] * a[1][1] - g[1] * a[0][1]) / det, (a[0][0] * g[1] - a[1][0] * g[0]) / det];
        if !d.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return None;
        }
        z = [z[0] - d[0], z[1] - d[1]];
        if inf_norm(&d) <= 1e-15 * (1.0 + inf_norm(&z)) {
            break;
        }
    }
    Some(z)
}

struct Valid {
    sol: Solution,
    trace: Vec<[Complex64; 2]>,
    closure: f64,
    /// Orbit linearization conditioning, see [`orbit_conditioning`].
    conditioning: f64,
}

/// Relative radius within which near-singular valid points are one cluster.
const CLUSTER_WIDE: f64 = 1e-3;
/// Orbit conditioning under which a point may belong to a wide cluster.
const CLUSTER_SINGULAR: f64 = 1e-5;

/// Merges approximations of one multiple point: points closer than the
/// cluster radius, or within [`CLUSTER_WIDE`] when one of them is nearly
/// singular. Each cluster keeps its best-closing member and counts its size
/// as a multiplicity estimate.
fn merge_clusters(valid: Vec<Valid>, opts: &SolverOptions) -> Vec<Valid> {
    let k = valid.len();
    let mut group: Vec<usize> = (0..k).collect();
    for i in 0..k {
        for j in 0..i {
            let d = rel_dist(&valid[i].trace[0], &valid[j].trace[0]);
            let singular = valid[i].conditioning.min(valid[j].conditioning) < CLUSTER_SINGULAR;
            if d <= opts.cluster_radius || (singular && d <= CLUSTER_WIDE) {
                let (gi, gj) = (group[i], group[j]);
                group.iter_mut().filter(|g| **g == gi).for_each(|g| *g = gj);
            }
        }
    }
    let mut slots: Vec<Option<Valid>> = valid.into_iter().map(Some).collect();
    let mut out = Vec::new();
    for g in 0..k {
        let idx: Vec<usize> = (0..k).filter(|&i| group[i] == g).collect();
        let Some(&best) = idx.iter().min_by(|&&a, &&b| {
            let (a, b) = (slots[a].as_ref().unwrap(), slots[b].as_ref().unwrap());
            a.closure.total_cmp(&b.closure)
        }) else {
            continue;
        };
        let size = idx.len() as u32;
        let simple = idx.iter().all(|&i| slots[i].as_ref().unwrap().sol.simple) && size == 1;
        let mult = idx.iter().map(|&i| slots[i].as_ref().unwrap().sol.multiplicity).max().unwrap_or(1);
        let mut v = slots[best].take().unwrap();
        v.sol.simple = simple;
        v.sol.multiplicity = if simple { 1 } else { mult.max(size).max(2) };
        out.push(v);
    }
    out
}

/// Solves, validates and groups the period-`n` points of a family and
/// compares the distinct count with the registered prediction.
pub fn census(spec: &FamilySpec, n: u32, opts: &SolverOptions) -> Result<PeriodicReport> {
    if n == 0 {
        return Err(Error::Degenerate("period must be at least 1".into()));
    }
    let predicted = predicted_count(spec, n).ok();
    let mut report = PeriodicReport {
        family: spec.tag,
        params: spec.params.to_strings(),
        n,
        predicted,
        found_distinct: 0,
        found_with_multiplicity: 0,
        points: Vec::new(),
        rejected: Vec::new(),
        non_isolated: false,
        non_isolated_detail: None,
        orbit_sizes: Vec::new(),
        warnings: Vec::new(),
        residuals: ResidualStats::default(),
        seed: opts.seed,
        verdict: Verdict::Unpredicted,
    };
    let fnm = homogenize(&spec.planar)?.iterate(n, opts.degree_budget)?;
    let solved = fixed_point_system(&fnm).and_then(|(p, q)| Ok((candidates(&p, &q, opts)?, System::new(&p, &q))));
    let (cands, sys) = match solved {
        Ok(s) => s,
        Err(Error::NonIsolated(msg)) => {
            report.non_isolated = true;
            report.non_isolated_detail = Some(msg);
            report.verdict = Verdict::NonIsolated;
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let jet = Jet::new(&spec.planar);
    let mut valid: Vec<Valid> = Vec::new();
    let mut rejected: Vec<Rejection> = Vec::new();
    for c in &cands {
        // Orbit Newton is tried from the raw start and from the system
        // solution; the system solution itself is the last resort.
        let refined = sys.refine(c.start, opts.newton_tol, opts.precision);
        let solved = refined.converged(opts.newton_tol);
        let mut tries = Vec::with_capacity(4);
        tries.extend(polish_orbit(&jet, c.start, n, opts));
        if solved {
            tries.extend(polish_orbit(&jet, refined.point, n, opts));
            tries.push(refined.point);
        }
        tries.push(c.start);
        let mut hit = None;
        for z in tries {
            if let OrbitCheck::Valid { trace, closure } = validate_orbit(spec, z, n, opts) {
                hit = Some((trace, closure));
                break;
            }
        }
        match hit {
            Some((trace, closure)) => {
                let z = trace[0];
                let conditioning = orbit_conditioning(&jet, z, n, opts);
                let simple = sys.conditioning(&z) > opts.singular_threshold && conditioning > CLUSTER_SINGULAR;
                let sol = Solution {
                    x: z[0],
                    y: z[1],
                    residual: sys.residual(&z),
                    simple,
                    multiplicity: if simple { 1 } else { c.eliminant_multiplicity.max(2) },
                };
                match valid.iter_mut().find(|v| rel_dist(&v.trace[0], &z) <= opts.cluster_radius) {
                    Some(v) => {
                        v.sol.multiplicity = v.sol.multiplicity.max(sol.multiplicity);
                        v.sol.simple &= sol.simple;
                    }
                    None => valid.push(Valid { sol, trace, closure, conditioning }),
                }
            }
            None if solved => {
                if let OrbitCheck::Rejected(r) = validate_orbit(spec, refined.point, n, opts) {
                    rejected.push(r);
                }
            }
            None => {}
        }
    }
    let mut valid = merge_clusters(valid, opts);
    valid.sort_by(|a, b| canonical_cmp(&a.sol, &b.sol));
    let start_of = |r: &Rejection| [r.x.value(), r.y.value()];
    for r in rejected {
        let z = start_of(&r);
        let known = valid.iter().any(|v| rel_dist(&v.trace[0], &z) <= if v.sol.simple { opts.cluster_radius } else { CLUSTER_WIDE })
            || report.rejected.iter().any(|o| rel_dist(&start_of(o), &z) <= opts.cluster_radius);
        if !known {
            report.rejected.push(r);
        }
    }
    let tol = opts.cluster_radius.max(1e3 * opts.closure_tol);
    let mut orbit: Vec<Option<usize>> = vec![None; valid.len()];
    let mut next = 0;
    for i in 0..valid.len() {
        if orbit[i].is_some() {
            continue;
        }
        orbit[i] = Some(next);
        let period = (1..=n).find(|&k| rel_dist(&valid[i].trace[0], &valid[i].trace[k as usize]) <= tol).unwrap_or(n);
        if n % period != 0 {
            report.warnings.push(format!("orbit {next}: least period {period} does not divide {n}"));
        }
        for k in 1..period as usize {
            let z = valid[i].trace[k];
            match (0..valid.len()).find(|&j| rel_dist(&valid[j].trace[0], &z) <= tol) {
                Some(j) if orbit[j].is_none() => orbit[j] = Some(next),
                Some(j) if orbit[j] != Some(next) => {
                    report.warnings.push(format!("orbit {next}: iterate {k} already belongs to orbit {}", orbit[j].unwrap()))
                }
                Some(_) => {}
                None => report.warnings.push(format!("orbit {next}: iterate {k} is not among the solved points")),
            }
        }
        report.orbit_sizes.push(period);
        next += 1;
    }
    for (v, id) in valid.iter().zip(&orbit) {
        let id = id.expect("every point assigned");
        report.points.push(PeriodicPoint {
            x: approx(v.sol.x),
            y: approx(v.sol.y),
            residual: v.closure,
            system_residual: v.sol.residual,
            simple: v.sol.simple,
            multiplicity: v.sol.multiplicity,
            orbit_id: id,
            period: report.orbit_sizes[id],
        });
    }
    report.found_distinct = report.points.len();
    report.found_with_multiplicity = report.points.iter().map(|p| p.multiplicity).sum();
    if !valid.is_empty() {
        report.residuals = ResidualStats {
            max_closure: valid.iter().map(|v| v.closure).fold(0.0, f64::max),
            mean_closure: valid.iter().map(|v| v.closure).sum::<f64>() / valid.len() as f64,
            max_system: valid.iter().map(|v| v.sol.residual).fold(0.0, f64::max),
        };
    }
    report.verdict = match &report.predicted {
        None => Verdict::Unpredicted,
        Some(p) if p.predicted == report.found_distinct as i128 => Verdict::Match,
        Some(_) => Verdict::Mismatch,
    };
    Ok(report)
}

/// CSV rows for valid and rejected candidates:
/// `re_x,im_x,re_y,im_y,orbit_id,residual,status`.
pub fn points_csv(report: &PeriodicReport) -> String {
    let mut s = String::from("re_x,im_x,re_y,im_y,orbit_id,residual,status\n");
    let f = format_f64;
    for p in &report.points {
        let (x, y) = (p.x.value(), p.y.value());
        let _ = writeln!(s, "{},{},{},{},{},{},valid", f(x.re), f(x.im), f(y.re), f(y.im), p.orbit_id, f(p.residual));
    }
    for r in &report.rejected {
        let (x, y) = (r.x.value(), r.y.value());
        let res = r.closure_error.map(f).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{},,{},{}", f(x.re), f(x.im), f(y.re), f(y.im), res, r.reason.code());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build, int_params};

    #[test]
    fn special_linfrac_fixed_points() {
        let spec = build(FamilyTag::LinfracSpecial, int_params(&[("a", 2), ("b", 3)])).unwrap();
        let r = census(&spec, 1, &SolverOptions::default()).unwrap();
        assert_eq!(r.found_distinct, 2);
        assert_eq!(r.verdict, Verdict::Match);
        let s3 = 3f64.sqrt();
        for p in &r.points {
            let x = p.x.value();
            assert!((x - p.y.value()).norm() < 1e-10);
            assert!((x.re + 1.0 - s3).abs() < 1e-10 || (x.re + 1.0 + s3).abs() < 1e-10);
            assert!(p.residual < 1e-8);
        }
    }

    #[test]
    fn pole_rejection_and_closure_rejection() {
        let spec = build(FamilyTag::LinfracSpecial, int_params(&[("a", 2), ("b", 3)])).unwrap();
        let opts = SolverOptions::default();
        let on_pole = [Complex64::new(-3.0, 0.0), Complex64::new(1.0, 0.0)];
        match validate_orbit(&spec, [on_pole[1], on_pole[0]], 2, &opts) {
            OrbitCheck::Rejected(r) => {
                assert_eq!(r.reason, RejectReason::Pole);
                assert_eq!(r.step, 2);
            }
            v => panic!("{v:?}"),
        }
        let r = census(&spec, 1, &opts).unwrap();
        let p = &r.points[0];
        let off = [p.x.value() + 1e-3, p.y.value()];
        assert!(matches!(validate_orbit(&spec, off, 1, &opts), OrbitCheck::Rejected(Rejection { reason: RejectReason::Closure, .. })));
    }

    #[test]
    fn si_model_is_non_isolated() {
        let spec = build(FamilyTag::SiModel, int_params(&[("alpha", 3)])).unwrap();
        let r = census(&spec, 1, &SolverOptions::default()).unwrap();
        assert!(r.non_isolated);
        assert_eq!(r.verdict, Verdict::NonIsolated);
    }

    #[test]
    fn csv_has_one_row_per_candidate() {
        let spec = build(FamilyTag::LinfracSpecial, int_params(&[("a", 2), ("b", 3)])).unwrap();
        let r = census(&spec, 2, &SolverOptions::default()).unwrap();
        let csv = points_csv(&r);
        assert_eq!(csv.lines().count(), 1 + r.points.len() + r.rejected.len());
        assert!(csv.starts_with("re_x,im_x,re_y,im_y,orbit_id,residual,status"));
    }
}
