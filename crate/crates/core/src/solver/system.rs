//! Fixed-point systems and their solution by resultant elimination.

use std::cmp::Ordering;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::newton::System;
use super::SolverOptions;
use crate::error::{Error, Result};
use crate::families::random_rational;
use crate::poly::univariate::{continued_fraction, roots_dd, squarefree, squarefree_roots, squarefree_roots_dd};
use crate::poly::scalar::{rational_to_f64, ComplexDd};
use crate::poly::{gcd, resultant, MultiPoly};
use crate::proj_map::ProjectiveMap;

/// A refined solution of a bivariate system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Solution {
    pub x: Complex64,
    pub y: Complex64,
    /// Normwise backward error of the system at the point.
    pub residual: f64,
    /// Nonsingular linearization.
    pub simple: bool,
    /// 1 for simple points, otherwise a lower bound estimated from the
    /// multiplicity of the eliminant root.
    pub multiplicity: u32,
}

/// `P = num(g1 - x)`, `Q = num(g2 - y)` for the affine form `(g1, g2)` of a
/// reduced map, each divided by its gcd with the chart denominator.
pub fn fixed_point_system(fn_map: &ProjectiveMap) -> Result<(MultiPoly, MultiPoly)> {
    let [c0, c1, c2] = fn_map.affine_components();
    if c0.is_zero() {
        return Err(Error::InvalidMap("affine chart denominator vanishes identically".into()));
    }
    let x = MultiPoly::var(2, 0);
    let y = MultiPoly::var(2, 1);
    let p = &c1 - &(&x * &c0);
    let q = &c2 - &(&y * &c0);
    if p.is_zero() || q.is_zero() {
        let which = if p.is_zero() { "x" } else { "y" };
        return Err(Error::NonIsolated(format!("the map fixes the {which}-coordinate identically")));
    }
    let p = p.divide_exact(&gcd(&p, &c0)?)?.primitive();
    let q = q.divide_exact(&gcd(&q, &c0)?)?.primitive();
    let g = gcd(&p, &q)?;
    if !g.is_constant() {
        return Err(Error::NonIsolated(format!("fixed-point equations share the curve {{{} = 0}}", g.primitive())));
    }
    Ok((p, q))
}

/// Linear change of variables `(x, y) = (a u + b v, c u + d v)`.
#[derive(Clone, Debug)]
struct Chart {
    m: [[BigRational; 2]; 2],
}

impl Chart {
    fn from_ints(m: [[i64; 2]; 2]) -> Self {
        Self { m: m.map(|r| r.map(|v| BigRational::from_integer(v.into()))) }
    }

    fn apply(&self, p: &MultiPoly) -> Result<MultiPoly> {
        let u = MultiPoly::var(2, 0);
        let v = MultiPoly::var(2, 1);
        let x = &u.scale(&self.m[0][0]) + &v.scale(&self.m[0][1]);
        let y = &u.scale(&self.m[1][0]) + &v.scale(&self.m[1][1]);
        p.substitute(&[x, y])
    }

    fn to_xy(&self, u: Complex64, v: Complex64) -> [Complex64; 2] {
        let f = |r: &BigRational| rational_to_f64(r);
        [u * f(&self.m[0][0]) + v * f(&self.m[0][1]), u * f(&self.m[1][0]) + v * f(&self.m[1][1])]
    }
}

/// A starting point for refinement. Starts sharing `fibre` lie over the same
/// eliminant root, whose multiplicity is `eliminant_multiplicity`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Candidate {
    pub start: [Complex64; 2],
    pub fibre: usize,
    pub eliminant_multiplicity: u32,
}

/// Starting points covering every isolated solution of `P = Q = 0`.
///
/// Eliminates `y` by a resultant and pairs each root of its squarefree
/// factors with the roots of both fibre slices. A vanishing eliminant or a
/// failed root iteration switches to the swapped variables and then to
/// seeded random shears.
pub(crate) fn candidates(p: &MultiPoly, q: &MultiPoly, opts: &SolverOptions) -> Result<Vec<Candidate>> {
    if p.nvars() != 2 || q.nvars() != 2 {
        return Err(Error::VariableMismatch(2, p.nvars().max(q.nvars())));
    }
    if p.is_zero() || q.is_zero() {
        return Err(Error::NonIsolated("an equation vanishes identically".into()));
    }
    if !gcd(p, q)?.is_constant() {
        return Err(Error::NonIsolated("the equations share a curve".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let attempts = opts.max_attempts.max(3);
    let mut last_err = None;
    for attempt in 0..attempts {
        let chart = match attempt {
            0 => Chart::from_ints([[1, 0], [0, 1]]),
            1 => Chart::from_ints([[0, 1], [1, 0]]),
            _ => loop {
                let (s, t) = (random_rational(&mut rng, 9), random_rational(&mut rng, 9));
                if !(&s * &t).is_one() {
                    let one = BigRational::one();
                    break Chart { m: [[one.clone(), s], [t, one]] };
                }
            },
        };
        match chart_candidates(p, q, &chart) {
            Ok(s) => return Ok(s),
            Err(e @ (Error::Degenerate(_) | Error::Numerical(_))) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Genericity { attempts, msg: last_err.map(|e| e.to_string()).unwrap_or_default() })
}

fn chart_candidates(p: &MultiPoly, q: &MultiPoly, chart: &Chart) -> Result<Vec<Candidate>> {
    let (pc, qc) = (chart.apply(p)?, chart.apply(q)?);
    let eliminant = |var: usize| -> Result<MultiPoly> {
        let r = resultant(&pc, &qc, var)?;
        if r.is_zero() {
            return Err(Error::Degenerate("eliminant vanishes identically".into()));
        }
        r.remove_var(var)
    };
    let ru = eliminant(1)?;
    if ru.is_constant() {
        return Ok(Vec::new());
    }
    let rv = eliminant(0)?;
    let mut vs = Vec::new();
    for (factor, _) in squarefree(&rv)? {
        vs.extend(squarefree_roots_dd(&factor)?);
    }
    let pairing = Pairing::new(&pc, &qc);
    let (pu, qu) = (pc.to_univariate(1), qc.to_univariate(1));
    let mut out = Vec::new();
    let mut fibre = 0;
    for (factor, mult) in squarefree(&ru)? {
        for ud in squarefree_roots_dd(&factor)? {
            let u = ud.to_c64();
            let starts = match exact_root(&factor, u) {
                Some(ur) => exact_fibre(&pc, &qc, &ur)?,
                None => {
                    let at = [ud, ComplexDd::default()];
                    let mut v = pairing.partners(ud, &vs);
                    for slice in [&pu, &qu] {
                        let coeffs = slice.iter().map(|c| c.evaluate_dd(&at)).collect::<Result<Vec<_>>>()?;
                        v.extend(slice_roots(&coeffs)?);
                    }
                    v
                }
            };
            out.extend(starts.into_iter().map(|v| Candidate { start: chart.to_xy(u, v), fibre, eliminant_multiplicity: mult }));
            fibre += 1;
        }
    }
    Ok(out)
}

/// Matches roots of the two eliminants. Each coordinate is then as accurate
/// as its own eliminant root, whereas a fibre slice inherits the cancellation
/// of evaluating the coefficient polynomials at a large abscissa.
struct Pairing {
    eqs: [MultiPoly; 2],
    float: [crate::poly::FloatPoly; 2],
    norms: [f64; 2],
}

impl Pairing {
    /// Backward error of a pair accepted outright.
    const TIGHT: f64 = 1e-12;
    /// Backward error under which the best partner is still kept.
    const LOOSE: f64 = 1e-6;

    fn new(p: &MultiPoly, q: &MultiPoly) -> Self {
        let float = [p.to_float(), q.to_float()];
        let norm = |f: &crate::poly::FloatPoly| f.terms.iter().map(|(_, c)| c.abs()).sum::<f64>();
        let norms = [norm(&float[0]), norm(&float[1])];
        Self { eqs: [p.clone(), q.clone()], float, norms }
    }

    fn residual(&self, z: &[ComplexDd; 2]) -> f64 {
        let zf = [z[0].to_c64(), z[1].to_c64()];
        (0..2)
            .map(|i| {
                let v = self.eqs[i].evaluate_dd(z).map(|v| v.norm_f64()).unwrap_or(f64::INFINITY);
                v / (self.float[i].eval_with_scale(&zf).1 + self.norms[i])
            })
            .fold(0.0, f64::max)
    }

    fn partners(&self, u: ComplexDd, vs: &[ComplexDd]) -> Vec<Complex64> {
        let scored: Vec<(f64, Complex64)> = vs.iter().map(|&v| (self.residual(&[u, v]), v.to_c64())).collect();
        let mut out: Vec<Complex64> = scored.iter().filter(|(r, _)| *r <= Self::TIGHT).map(|(_, v)| *v).collect();
        if out.is_empty() {
            if let Some((r, v)) = scored.iter().min_by(|a, b| a.0.total_cmp(&b.0)) {
                if *r <= Self::LOOSE {
                    out.push(*v);
                }
            }
        }
        out
    }
}

/// The rational number a numeric root of `f` stands for, if it is one.
fn exact_root(f: &MultiPoly, u: Complex64) -> Option<BigRational> {
    if u.im.abs() > 1e-9 * (1.0 + u.re.abs()) {
        return None;
    }
    let r = continued_fraction(u.re, 1 << 20)?;
    let close = (rational_to_f64(&r) - u.re).abs() <= 1e-9 * (1.0 + u.re.abs());
    (close && f.evaluate(std::slice::from_ref(&r)).ok()?.is_zero()).then_some(r)
}

/// Over a rational abscissa the common roots are those of the exact gcd of
/// the two slices, which separates a multiple solution into one start.
fn exact_fibre(pc: &MultiPoly, qc: &MultiPoly, u: &BigRational) -> Result<Vec<Complex64>> {
    let (a, b) = (pc.eval_var(0, u), qc.eval_var(0, u));
    let g = match (a.is_zero(), b.is_zero()) {
        (true, true) => return Err(Error::NonIsolated("both equations vanish on a vertical line".into())),
        (true, false) => b,
        (false, true) => a,
        (false, false) => gcd(&a, &b)?,
    };
    let g = g.remove_var(0)?;
    let mut v = Vec::new();
    for (f, _) in squarefree(&g)? {
        v.extend(squarefree_roots(&f)?);
    }
    Ok(v)
}

/// Every isolated complex solution of `P = Q = 0` in `C^2`, each candidate
/// refined by Newton on the original system.
pub fn solve_system(p: &MultiPoly, q: &MultiPoly, opts: &SolverOptions) -> Result<Vec<Solution>> {
    let cands = candidates(p, q, opts)?;
    let sys = System::new(p, q);
    let mut out: Vec<Solution> = Vec::new();
    for group in cands.chunk_by(|a, b| a.fibre == b.fibre) {
        let mut fibre: Vec<Solution> = Vec::new();
        for c in group {
            let r = sys.refine(c.start, opts.newton_tol, opts.precision);
            if !r.converged(opts.newton_tol) {
                continue;
            }
            let cand = Solution {
                x: r.point[0],
                y: r.point[1],
                residual: r.residual,
                simple: r.conditioning > opts.singular_threshold,
                multiplicity: 1,
            };
            merge(&mut fibre, cand, opts.cluster_radius);
        }
        let on_fibre = fibre.len() as u32;
        for mut s in fibre {
            if !s.simple {
                s.multiplicity = (group[0].eliminant_multiplicity / on_fibre.max(1)).max(2);
            }
            merge(&mut out, s, opts.cluster_radius);
        }
    }
    out.sort_by(canonical_cmp);
    Ok(out)
}

fn slice_roots(coeffs: &[ComplexDd]) -> Result<Vec<Complex64>> {
    let mut roots: Vec<Complex64> = roots_dd(coeffs, 1e-28)?.into_iter().map(ComplexDd::to_c64).collect();
    roots.extend(cluster_centroids(&roots));
    Ok(roots)
}

/// Centroids of groups of nearby roots. A `k`-fold root comes back as `k`
/// approximations spread like `eps^(1/k)`; their mean is far more accurate.
fn cluster_centroids(roots: &[Complex64]) -> Vec<Complex64> {
    let near = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-3 * (1.0 + a.norm().max(b.norm()));
    let mut group: Vec<usize> = (0..roots.len()).collect();
    for i in 0..roots.len() {
        for j in 0..i {
            if near(roots[i], roots[j]) {
                let (gi, gj) = (group[i], group[j]);
                group.iter_mut().filter(|g| **g == gi).for_each(|g| *g = gj);
            }
        }
    }
    let mut out = Vec::new();
    for g in 0..roots.len() {
        let members: Vec<Complex64> = (0..roots.len()).filter(|&i| group[i] == g).map(|i| roots[i]).collect();
        if members.len() > 1 {
            out.push(members.iter().sum::<Complex64>() / members.len() as f64);
        }
    }
    out
}

fn close(a: &Solution, b: &Solution, radius: f64) -> bool {
    let scale = 1.0 + a.x.norm().max(a.y.norm());
    (a.x - b.x).norm() <= radius * scale && (a.y - b.y).norm() <= radius * scale
}

fn merge(into: &mut Vec<Solution>, s: Solution, radius: f64) {
    match into.iter_mut().find(|o| close(o, &s, radius)) {
        Some(o) => {
            let m = o.multiplicity.max(s.multiplicity);
            if s.residual < o.residual {
                *o = s;
            }
            o.multiplicity = m;
            o.simple = o.simple && s.simple;
        }
        None => into.push(s),
    }
}

/// Lexicographic order on coordinates rounded to 8 decimals.
pub(crate) fn canonical_cmp(a: &Solution, b: &Solution) -> Ordering {
    let key = |s: &Solution| [s.x.re, s.x.im, s.y.re, s.y.im].map(|v| (v * 1e8).round() as i64);
    key(a).cmp(&key(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(s: &str) -> MultiPoly {
        MultiPoly::parse(s, 2).unwrap()
    }

    #[test]
    fn line_and_parabola() {
        let s = solve_system(&p2("x^2 - 1"), &p2("y - x"), &SolverOptions::default()).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[0].x + 1.0).norm() < 1e-12 && (s[0].y + 1.0).norm() < 1e-12);
        assert!((s[1].x - 1.0).norm() < 1e-12 && (s[1].y - 1.0).norm() < 1e-12);
    }

    #[test]
    fn shared_abscissa_is_resolved() {
        let s = solve_system(&p2("x^2 + y^2 - 5"), &p2("x^2 - 1"), &SolverOptions::default()).unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|p| p.simple));
    }

    #[test]
    fn tangency_is_flagged() {
        let s = solve_system(&p2("y - x^2"), &p2("y"), &SolverOptions::default()).unwrap();
        assert_eq!(s.len(), 1);
        assert!(!s[0].simple);
        assert_eq!(s[0].multiplicity, 2);
    }

    #[test]
    fn common_curve_is_non_isolated() {
        let e = solve_system(&p2("x*y"), &p2("x*(y - 1)"), &SolverOptions::default());
        assert!(matches!(e, Err(Error::NonIsolated(_))));
    }

    #[test]
    fn identity_map_is_non_isolated() {
        assert!(matches!(fixed_point_system(&ProjectiveMap::identity()), Err(Error::NonIsolated(_))));
    }
}
