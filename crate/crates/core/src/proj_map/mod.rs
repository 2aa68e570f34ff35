//! Rational self-maps of the projective plane.
//!
//! A [`ProjectiveMap`] is a triple of homogeneous polynomials of one degree in
//! `x0, x1, x2` with no common factor. The affine chart is `[1 : x : y]` and
//! `Sigma_0 = {x0 = 0}` is the line at infinity.

mod critical;
mod indeterminacy;
mod point;
mod topdeg;

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::families::PlanarMap;
use crate::poly::{gcd_many, MultiPoly};

pub use critical::{
    classify_critical_curve, critical_curves, exceptional_orbit_check, jacobian, jacobian_factorization, CriticalCurve, CurveKind,
    OrbitVerdict, StabilityEntry, StabilityReport, DEFAULT_HORIZON,
};
pub use indeterminacy::{indeterminacy_locus, is_indeterminate, IND_TOL};
pub use point::ProjPoint;
pub use topdeg::topological_degree;

/// Default cap on the raw degree `deg F * deg G` of a composition.
pub const DEFAULT_DEGREE_BUDGET: u32 = 96;

#[derive(Clone, PartialEq)]
pub struct ProjectiveMap {
    components: [MultiPoly; 3],
    degree: u32,
}

impl fmt::Debug for ProjectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjectiveMap[{}]", self.to_text().replace('\n', " ; "))
    }
}

impl ProjectiveMap {
    /// Validates homogeneity, removes the common factor and scales the triple
    /// to integer coefficients with joint content one and a positive leading
    /// coefficient on the first nonzero component.
    pub fn new(components: [MultiPoly; 3]) -> Result<Self> {
        if components.iter().any(|c| c.nvars() != 3) {
            return Err(Error::InvalidMap("components must be in x0, x1, x2".into()));
        }
        if components.iter().all(MultiPoly::is_zero) {
            return Err(Error::InvalidMap("all components vanish identically".into()));
        }
        let degs: Vec<u32> = components.iter().filter_map(MultiPoly::degree).collect();
        if degs.iter().any(|&d| d != degs[0]) || components.iter().any(|c| !c.is_homogeneous()) {
            return Err(Error::InvalidMap("components must be homogeneous of one degree".into()));
        }
        let nonzero: Vec<MultiPoly> = components.iter().filter(|c| !c.is_zero()).cloned().collect();
        let g = gcd_many(&nonzero)?;
        let reduced: Vec<MultiPoly> = components.iter().map(|c| c.divide_exact(&g)).collect::<Result<_>>()?;
        let mut components: [MultiPoly; 3] = reduced.try_into().expect("three components");
        normalize_jointly(&mut components);
        let degree = components.iter().find_map(MultiPoly::degree).unwrap();
        Ok(Self { components, degree })
    }

    pub fn identity() -> Self {
        Self::new([MultiPoly::var(3, 0), MultiPoly::var(3, 1), MultiPoly::var(3, 2)]).unwrap()
    }

    pub fn components(&self) -> &[MultiPoly; 3] {
        &self.components
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Exact image; all-zero exactly on the indeterminacy locus.
    pub fn apply_exact(&self, p: &[BigRational; 3]) -> Result<[BigRational; 3]> {
        let v: Vec<BigRational> = self.components.iter().map(|c| c.evaluate(p)).collect::<Result<_>>()?;
        Ok(v.try_into().unwrap())
    }

    /// Floating image with, per component, the sum of absolute term values.
    pub fn apply_complex(&self, p: &[Complex64; 3]) -> ([Complex64; 3], [f64; 3]) {
        let mut out = [Complex64::zero(); 3];
        let mut scale = [0.0; 3];
        for (i, c) in self.components.iter().enumerate() {
            let (v, s) = c.to_float().eval_with_scale(p);
            out[i] = v;
            scale[i] = s;
        }
        (out, scale)
    }

    /// Image of a point, or `None` if it lies in the indeterminacy locus
    /// (exactly, or within `tol` relative to term magnitudes for approximations).
    pub fn image(&self, p: &ProjPoint, tol: f64) -> Result<Option<ProjPoint>> {
        match p {
            ProjPoint::Exact(c) => {
                let v = self.apply_exact(c)?;
                Ok(ProjPoint::exact(v).ok())
            }
            ProjPoint::Approx(c) => {
                let (v, s) = self.apply_complex(c);
                let smax = s.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
                if v.iter().all(|z| z.norm() <= tol * smax) {
                    return Ok(None);
                }
                Ok(ProjPoint::approx(v).ok())
            }
        }
    }

    /// `self ∘ g` with the common factor removed.
    pub fn compose(&self, g: &ProjectiveMap) -> Result<ProjectiveMap> {
        let raw: Vec<MultiPoly> = self.components.iter().map(|c| c.substitute(g.components())).collect::<Result<_>>()?;
        ProjectiveMap::new(raw.try_into().unwrap())
    }

    /// `self^n`, failing with a budget error once a raw degree exceeds `budget`.
    pub fn iterate(&self, n: u32, budget: u32) -> Result<ProjectiveMap> {
        if n == 0 {
            return Ok(Self::identity());
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.compose_checked(&acc, budget)?;
        }
        Ok(acc)
    }

    fn compose_checked(&self, g: &ProjectiveMap, budget: u32) -> Result<ProjectiveMap> {
        let raw = self.degree * g.degree;
        if raw > budget {
            return Err(Error::Budget(format!("raw composition degree {raw} exceeds budget {budget}")));
        }
        self.compose(g)
    }

    /// Components in the affine chart `x0 = 1`, as polynomials in `x, y`.
    pub fn affine_components(&self) -> [MultiPoly; 3] {
        self.components.clone().map(|c| c.dehomogenize())
    }

    /// Canonical text: one component per line, prefixed by the degree.
    pub fn to_text(&self) -> String {
        self.components.iter().map(|c| format!("{}: {}", self.degree, c.to_canonical())).collect::<Vec<_>>().join("\n")
    }

    /// Parses [`ProjectiveMap::to_text`] output; the degree prefixes are checked.
    pub fn from_text(s: &str) -> Result<Self> {
        let lines: Vec<&str> = s.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        if lines.len() != 3 {
            return Err(Error::Parse { pos: 0, msg: format!("expected 3 component lines, found {}", lines.len()) });
        }
        let mut comps = Vec::with_capacity(3);
        let mut declared = Vec::with_capacity(3);
        for l in lines {
            let (d, body) = l.split_once(':').ok_or_else(|| Error::Parse { pos: 0, msg: format!("missing degree prefix in {l:?}") })?;
            declared.push(d.trim().parse::<u32>().map_err(|_| Error::Parse { pos: 0, msg: format!("bad degree {d:?}") })?);
            comps.push(MultiPoly::parse(body.trim(), 3)?);
        }
        let m = Self::new(comps.try_into().unwrap())?;
        if declared.iter().any(|&d| d != m.degree) {
            return Err(Error::Parse { pos: 0, msg: "degree prefix disagrees with the components".into() });
        }
        Ok(m)
    }
}

fn normalize_jointly(c: &mut [MultiPoly; 3]) {
    let mut l = BigInt::one();
    let mut g = BigInt::zero();
    for p in c.iter() {
        for (_, x) in p.terms() {
            l = l.lcm(x.denom());
        }
    }
    for p in c.iter() {
        for (_, x) in p.terms() {
            g = g.gcd(&(x.numer() * (&l / x.denom())));
        }
    }
    let mut s = BigRational::new(l, g);
    if c.iter().find(|p| !p.is_zero()).and_then(|p| p.leading_coeff()).is_some_and(|lc| lc.is_negative()) {
        s = -s;
    }
    for p in c.iter_mut() {
        *p = p.scale(&s);
    }
}

/// Homogenizes `(N1/D1, N2/D2)` through `[1 : x : y]` as
/// `[D1 D2 : N1 D2 : N2 D1]` and reduces.
pub fn homogenize(planar: &PlanarMap) -> Result<ProjectiveMap> {
    let [f1, f2] = &planar.components;
    let raw = [&f1.den * &f2.den, &f1.num * &f2.den, &f2.num * &f1.den];
    let k = raw.iter().filter_map(MultiPoly::degree).max().unwrap_or(0);
    let comps: Vec<MultiPoly> = raw.iter().map(|p| p.homogenize_to(k)).collect::<Result<_>>()?;
    ProjectiveMap::new(comps.try_into().unwrap())
}

/// Algebraic degrees of `F, F^2, ..., F^count`.
pub fn degree_sequence(f: &ProjectiveMap, count: u32, budget: u32) -> Result<Vec<u32>> {
    if count == 0 {
        return Err(Error::Degenerate("degree sequence needs at least one term".into()));
    }
    let mut out = vec![f.degree()];
    let mut acc = f.clone();
    for _ in 1..count {
        acc = f.compose_checked(&acc, budget)?;
        out.push(acc.degree());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build, int_params, FamilyTag};

    fn p3(s: &str) -> MultiPoly {
        MultiPoly::parse(s, 3).unwrap()
    }

    #[test]
    fn linfrac_homogenization_matches_displayed_form() {
        let spec = build(FamilyTag::LinfracGeneral, int_params(&[("a0", 1), ("a1", 2), ("a2", 3), ("b0", 5), ("b1", 7), ("b2", 11)])).unwrap();
        let f = homogenize(&spec.planar).unwrap();
        let b = p3("5*x0 + 7*x1 + 11*x2");
        let a = p3("x0 + 2*x1 + 3*x2");
        let want = ProjectiveMap::new([&p3("x0") * &b, &p3("x2") * &b, &p3("x0") * &a]).unwrap();
        assert_eq!(f, want);
        assert_eq!(f.degree(), 2);
    }

    #[test]
    fn compose_with_identity() {
        let f = ProjectiveMap::new([p3("x0^2"), p3("x1*x2"), p3("x2^2 - x0*x1")]).unwrap();
        assert_eq!(f.compose(&ProjectiveMap::identity()).unwrap(), f);
        assert_eq!(ProjectiveMap::identity().compose(&f).unwrap(), f);
    }

    #[test]
    fn common_factor_is_removed() {
        let f = ProjectiveMap::new([p3("x0*(x1 - x2)"), p3("x1*(x1 - x2)"), p3("-2*x2*(x1 - x2)")]).unwrap();
        assert_eq!(f.degree(), 1);
        assert_eq!(f.components()[2], p3("-2*x2"));
        assert!(ProjectiveMap::new([p3("x0^2"), p3("x1"), p3("x2^2")]).is_err());
        assert!(ProjectiveMap::new([MultiPoly::zero(3), MultiPoly::zero(3), MultiPoly::zero(3)]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let f = ProjectiveMap::new([p3("x0^2"), p3("x1*x0 + 3/2*x1*x2"), p3("x2*x0 - x1*x2")]).unwrap();
        let t = f.to_text();
        assert!(t.starts_with("2: "));
        assert_eq!(ProjectiveMap::from_text(&t).unwrap(), f);
        assert!(ProjectiveMap::from_text("3: x0\n1: x1\n1: x2").is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let f = ProjectiveMap::new([p3("x0^3"), p3("x1^3"), p3("x2^3")]).unwrap();
        assert_eq!(degree_sequence(&f, 3, 96).unwrap(), vec![3, 9, 27]);
        assert!(matches!(degree_sequence(&f, 5, 96), Err(Error::Budget(_))));
    }
}
