//! Critical curves: Jacobian factorization, exceptional-curve
//! classification, and the finite-horizon stability check on exceptional
//! orbits.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::indeterminacy::{is_indeterminate, univariate};
use super::{ProjPoint, ProjectiveMap};
use crate::error::{Error, Result};
use crate::families::random_rational;
use crate::poly::scalar::rational_to_f64;
use crate::poly::univariate::{rational_roots, squarefree, squarefree_roots};
use crate::poly::{determinant, MultiPoly};

/// Default number of iterates followed by [`exceptional_orbit_check`].
pub const DEFAULT_HORIZON: u32 = 20;
/// Sample points mapped per curve.
const SAMPLES: usize = 4;
const ATTEMPTS: usize = 6;
/// Images of approximate samples closer than this are the same point.
const IMAGE_TOL: f64 = 1e-7;
/// Exact orbit points are rounded once a coordinate exceeds this many bits.
const EXACT_BITS: u64 = 4096;

fn poly_text<S: Serializer>(p: &MultiPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_canonical())
}

fn poly_from_text<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<MultiPoly, D::Error> {
    MultiPoly::parse(&String::deserialize(d)?, 3).map_err(serde::de::Error::custom)
}

/// What a critical curve does under the map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveKind {
    /// Collapsed to a single point.
    Exceptional { image: ProjPoint },
    /// Mapped onto a curve; the map folds along it.
    Branch,
}

/// An irreducible-or-residual factor of the Jacobian determinant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalCurve {
    /// Primitive homogeneous defining form; divides the Jacobian.
    #[serde(serialize_with = "poly_text", deserialize_with = "poly_from_text")]
    pub poly: MultiPoly,
    pub multiplicity: u32,
    /// True for the unfactored remainder after all candidate lines.
    pub residual: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<CurveKind>,
}

impl CriticalCurve {
    pub fn image(&self) -> Option<&ProjPoint> {
        match &self.kind {
            Some(CurveKind::Exceptional { image }) => Some(image),
            _ => None,
        }
    }
}

/// Determinant of the matrix of partial derivatives of the components.
pub fn jacobian(f: &ProjectiveMap) -> Result<MultiPoly> {
    let rows: Vec<Vec<MultiPoly>> = f.components().iter().map(|c| (0..3).map(|v| c.derivative(v)).collect()).collect();
    determinant(&rows)
}

/// Splits the Jacobian by exact trial division against the coordinate lines,
/// `x1 - x2`, and every rational linear factor of a component. Whatever is
/// left is returned as one residual curve.
pub fn jacobian_factorization(f: &ProjectiveMap) -> Result<Vec<CriticalCurve>> {
    let j = jacobian(f)?;
    if j.is_zero() {
        return Err(Error::Degenerate("the Jacobian vanishes identically".into()));
    }
    let mut cands: Vec<MultiPoly> = ["x0", "x1", "x2", "x1 - x2"].iter().map(|s| MultiPoly::parse(s, 3).unwrap()).collect();
    for c in f.components() {
        for l in linear_factors(c)? {
            if !cands.contains(&l) {
                cands.push(l);
            }
        }
    }
    let mut rest = j;
    let mut out = Vec::new();
    for l in cands {
        let mut m = 0;
        while l.divides(&rest) {
            rest = rest.divide_exact(&l)?;
            m += 1;
        }
        if m > 0 {
            out.push(CriticalCurve { poly: l, multiplicity: m, residual: false, kind: None });
        }
    }
    if !rest.is_constant() {
        out.push(CriticalCurve { poly: normalize(&rest), multiplicity: 1, residual: true, kind: None });
    }
    Ok(out)
}

/// Primitive with positive leading coefficient.
fn normalize(p: &MultiPoly) -> MultiPoly {
    let q = p.primitive();
    if q.leading_coeff().is_some_and(|c| c.is_negative()) {
        -q
    } else {
        q
    }
}

/// Rational linear factors of a homogeneous form in `x0, x1, x2`.
///
/// Lines through `x0 = 0` aside, a factor `a + b x + c y` of the affine form
/// meets two generic verticals at rational points, so it is among the lines
/// through pairs of rational fibre roots; `c = 0` factors are read off a
/// horizontal slice. Every candidate is confirmed by exact division.
pub(crate) fn linear_factors(c: &MultiPoly) -> Result<Vec<MultiPoly>> {
    let mut out = Vec::new();
    if c.is_zero() {
        return Ok(out);
    }
    let x0 = MultiPoly::var(3, 0);
    let mut c = c.clone();
    while x0.divides(&c) && !c.is_constant() {
        c = c.divide_exact(&x0)?;
        if !out.contains(&x0) {
            out.push(x0.clone());
        }
    }
    let h = c.dehomogenize();
    if h.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x11e5);
    let push = |l: MultiPoly, out: &mut Vec<MultiPoly>| {
        let l = normalize(&l.homogenize());
        if l.divides(&c) && !out.contains(&l) {
            out.push(l);
        }
    };
    let slice = |var: usize, s: &BigRational| -> Result<Option<Vec<BigRational>>> {
        let u = univariate(&h.eval_var(var, s));
        if u.degree() != h.degree_in(1 - var) {
            return Ok(None);
        }
        Ok(Some(if u.is_constant() { Vec::new() } else { rational_roots(&u, 1 << 24)? }))
    };
    let (x, y) = (MultiPoly::var(2, 0), MultiPoly::var(2, 1));
    let konst = |r: &BigRational| MultiPoly::constant(2, r.clone());
    for _ in 0..ATTEMPTS {
        let (s1, s2) = (random_rational(&mut rng, 50), random_rational(&mut rng, 50));
        if s1 == s2 {
            continue;
        }
        let (Some(r1), Some(r2)) = (slice(0, &s1)?, slice(0, &s2)?) else { continue };
        // y = r1 + (r2 - r1) (x - s1) / (s2 - s1)
        for a in &r1 {
            for b in &r2 {
                let slope = (b - a) / (&s2 - &s1);
                let line = &(&y - &konst(a)) - &(&x - &konst(&s1)).scale(&slope);
                push(line, &mut out);
            }
        }
        let t = random_rational(&mut rng, 50);
        if let Some(rx) = slice(1, &t)? {
            for r in rx {
                push(&x - &konst(&r), &mut out);
            }
        }
        return Ok(out);
    }
    Err(Error::Genericity { attempts: ATTEMPTS, msg: "no generic slices for linear factor search".into() })
}

/// Two exact points spanning the line `a x0 + b x1 + c x2 = 0`.
fn line_basis(l: &MultiPoly) -> [[BigRational; 3]; 2] {
    let co: [BigRational; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]].map(|e| l.coeff(&e));
    let e = |i: usize| {
        let mut v = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
        v[i] = BigRational::one();
        v
    };
    let cross = |u: &[BigRational; 3], v: &[BigRational; 3]| {
        [&u[1] * &v[2] - &u[2] * &v[1], &u[2] * &v[0] - &u[0] * &v[2], &u[0] * &v[1] - &u[1] * &v[0]]
    };
    let mut basis = Vec::new();
    for i in 0..3 {
        let v = cross(&co, &e(i));
        if v.iter().any(|x| !x.is_zero()) && basis.len() < 2 {
            let independent = basis.first().is_none_or(|w: &[BigRational; 3]| cross(w, &v).iter().any(|x| !x.is_zero()));
            if independent {
                basis.push(v);
            }
        }
    }
    [basis[0].clone(), basis[1].clone()]
}

/// Random points of a curve: exact on lines, numeric on higher degree.
fn sample_points(c: &MultiPoly, rng: &mut ChaCha8Rng) -> Result<Vec<ProjPoint>> {
    if c.degree() == Some(1) {
        let [p, q] = line_basis(c);
        return (0..SAMPLES)
            .map(|_| {
                let t = random_rational(rng, 50);
                ProjPoint::exact([&p[0] + &q[0] * &t, &p[1] + &q[1] * &t, &p[2] + &q[2] * &t])
            })
            .collect();
    }
    // Vertical slices x1 = s x0 (or horizontal if x2 is absent) in the chart x0 = 1.
    let (fix, free) = if c.involves(2) { (1, 2) } else { (2, 1) };
    let h = c.eval_var(0, &BigRational::one());
    let mut out = Vec::new();
    for _ in 0..ATTEMPTS {
        let s = random_rational(rng, 50);
        let u = univariate(&h.eval_var(fix, &s));
        if u.degree() != c.degree_in(free) || u.is_constant() {
            continue;
        }
        let sc = Complex64::new(rational_to_f64(&s), 0.0);
        for z in squarefree_roots(&squarefree(&u)?.into_iter().fold(MultiPoly::one(1), |a, (f, _)| &a * &f))? {
            let mut pt = [Complex64::new(1.0, 0.0), sc, sc];
            pt[free] = z;
            out.push(ProjPoint::approx(pt)?);
        }
        if out.len() >= SAMPLES {
            break;
        }
    }
    Ok(out)
}

/// Exceptional with the common image when every sampled point off the
/// indeterminacy locus maps to one point, branch otherwise.
pub fn classify_critical_curve(f: &ProjectiveMap, c: &CriticalCurve, seed: u64) -> Result<CurveKind> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ATTEMPTS {
        let mut images = Vec::new();
        for p in sample_points(&c.poly, &mut rng)? {
            if let Some(im) = f.image(&p, 1e-12)? {
                images.push(im);
            }
        }
        if images.len() < 3 {
            continue;
        }
        let first = &images[0];
        return Ok(if images.iter().all(|im| im.same_as(first, IMAGE_TOL)) {
            CurveKind::Exceptional { image: first.clone() }
        } else {
            CurveKind::Branch
        });
    }
    Err(Error::Genericity { attempts: ATTEMPTS, msg: format!("samples of {{{} = 0}} keep landing in the indeterminacy locus", c.poly) })
}

/// Factors the Jacobian and classifies every factor.
pub fn critical_curves(f: &ProjectiveMap, seed: u64) -> Result<Vec<CriticalCurve>> {
    let mut curves = jacobian_factorization(f)?;
    for c in curves.iter_mut() {
        c.kind = Some(classify_critical_curve(f, c, seed)?);
    }
    Ok(curves)
}

/// Fate of one exceptional orbit within the horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OrbitVerdict {
    /// `F^step(curve)` is an indeterminacy point.
    MeetsIndeterminacy { step: u32 },
    /// `F^step(curve)` is a fixed point off the indeterminacy locus, so the
    /// orbit avoids it forever.
    LandsOnFixedPoint { step: u32 },
    /// No indeterminacy point among the first `horizon` images.
    AvoidsWithinHorizon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityEntry {
    #[serde(serialize_with = "poly_text", deserialize_with = "poly_from_text")]
    pub curve: MultiPoly,
    pub image: ProjPoint,
    pub verdict: OrbitVerdict,
    /// Orbit points were exact throughout.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub horizon: u32,
    pub entries: Vec<StabilityEntry>,
    /// Earliest step at which an exceptional orbit meets the indeterminacy locus.
    pub unstable_at: Option<u32>,
    pub note: String,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.unstable_at.is_none()
    }

    pub fn label(&self) -> String {
        match self.unstable_at {
            None => "STABLE".into(),
            Some(k) => format!("UNSTABLE at step {k}"),
        }
    }
}

fn bits(p: &ProjPoint) -> u64 {
    match p {
        ProjPoint::Exact(c) => c.iter().map(|x| x.numer().bits().max(x.denom().bits())).max().unwrap_or(0),
        ProjPoint::Approx(_) => 0,
    }
}

/// Follows the image of every exceptional curve for `horizon` steps and
/// reports the first step that lands in `ind`. Orbits reaching a fixed point
/// are settled for all iterates; the rest are evidence up to the horizon only.
pub fn exceptional_orbit_check(f: &ProjectiveMap, curves: &[CriticalCurve], ind: &[ProjPoint], horizon: u32) -> Result<StabilityReport> {
    let in_ind = |p: &ProjPoint| -> Result<bool> { Ok(ind.iter().any(|q| q.same_as(p, 1e-8)) || is_indeterminate(f, p)?) };
    let mut entries = Vec::new();
    for c in curves {
        let Some(image) = c.image() else { continue };
        let mut p = image.clone();
        let mut exact = p.is_exact();
        let mut verdict = OrbitVerdict::AvoidsWithinHorizon;
        for step in 1..=horizon {
            if in_ind(&p)? {
                verdict = OrbitVerdict::MeetsIndeterminacy { step };
                break;
            }
            let Some(next) = f.image(&p, 1e-12)? else {
                verdict = OrbitVerdict::MeetsIndeterminacy { step };
                break;
            };
            if next.same_as(&p, 1e-10) {
                verdict = OrbitVerdict::LandsOnFixedPoint { step };
                break;
            }
            p = if bits(&next) > EXACT_BITS {
                exact = false;
                ProjPoint::approx(next.to_complex())?
            } else {
                next
            };
        }
        entries.push(StabilityEntry { curve: c.poly.clone(), image: image.clone(), verdict, exact });
    }
    let unstable_at = entries
        .iter()
        .filter_map(|e| match e.verdict {
            OrbitVerdict::MeetsIndeterminacy { step } => Some(step),
            _ => None,
        })
        .min();
    let open = entries.iter().any(|e| e.verdict == OrbitVerdict::AvoidsWithinHorizon);
    let note = match (unstable_at, open) {
        (Some(_), _) => "an exceptional orbit meets the indeterminacy locus".to_string(),
        (None, true) => format!("finite-horizon evidence: no exceptional orbit meets the indeterminacy locus within {horizon} steps"),
        (None, false) => "every exceptional orbit ends on a fixed point off the indeterminacy locus".to_string(),
    };
    Ok(StabilityReport { horizon, entries, unstable_at, note })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build, int_params, FamilyTag};
    use crate::proj_map::homogenize;

    fn p3(s: &str) -> MultiPoly {
        MultiPoly::parse(s, 3).unwrap()
    }

    #[test]
    fn linear_factors_of_a_product() {
        let c = &(&p3("x0") * &p3("2*x0 + x1 - 3*x2")) * &p3("x1^2 + x2^2 + x0*x1");
        let mut got = linear_factors(&c).unwrap();
        got.sort_by_key(|p| p.to_canonical());
        assert_eq!(got.len(), 2);
        assert!(got.contains(&p3("x0")));
        assert!(got.contains(&p3("2*x0 + x1 - 3*x2")));
        let v = &p3("x1 - 5*x0") * &p3("x2^2 - 7*x0^2");
        assert_eq!(linear_factors(&v).unwrap(), vec![p3("5*x0 - x1")]);
    }

    #[test]
    fn si_model_sigma0_collapses_to_fixed_point() {
        let spec = build(FamilyTag::SiModel, int_params(&[("alpha", 2)])).unwrap();
        let f = homogenize(&spec.planar).unwrap();
        let curves = critical_curves(&f, 7).unwrap();
        let s0 = curves.iter().find(|c| c.poly == p3("x0")).expect("x0 divides the Jacobian");
        assert_eq!(s0.kind, Some(CurveKind::Exceptional { image: ProjPoint::from_ints([0, 1, -1]) }));
        let ind = crate::proj_map::indeterminacy_locus(&f).unwrap();
        let r = exceptional_orbit_check(&f, &curves, &ind, 10).unwrap();
        assert!(r.is_stable(), "{r:?}");
    }

    #[test]
    fn seed_does_not_change_images() {
        let spec = build(FamilyTag::RationalPlanar, int_params(&[("a", 2), ("b", 3), ("c", 5), ("d", 7)])).unwrap();
        let f = homogenize(&spec.planar).unwrap();
        let a = critical_curves(&f, 1).unwrap();
        let b = critical_curves(&f, 99).unwrap();
        for (x, y) in a.iter().zip(&b) {
            match (&x.kind, &y.kind) {
                (Some(CurveKind::Exceptional { image: p }), Some(CurveKind::Exceptional { image: q })) => assert!(p.same_as(q, 1e-7)),
                (k, l) => assert_eq!(k, l),
            }
        }
    }
}
