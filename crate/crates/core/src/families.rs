//! Registry of the concrete recurrences and planar maps.
//!
//! Each [`FamilyTag`] has a builder that validates exact parameters, produces
//! the affine planar map `(x, y) -> (N1/D1, N2/D2)` and registers the
//! cohomology models used for prediction. Planar coordinates follow the
//! recurrence convention `x = z_{n-1}`, `y = z_n`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::{CohomologyModel, IntMatrix, SpuriousCorrection};
use crate::error::{Error, Result};
use crate::poly::scalar::{format_rational, int, parse_rational, rat};
use crate::poly::{gcd, resultant, MultiPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FamilyTag {
    /// `z' = (a0 + a1 z_{n-1} + a2 z_n) / (b0 + b1 z_{n-1} + b2 z_n)`.
    LinfracGeneral,
    /// `z' = (a + z_n) / (b + z_{n-1})`.
    LinfracSpecial,
    /// Host-parasite model, iterated through its x-only reduction.
    HostParasite,
    /// `(S, I) -> (S + aSI, I - aSI)`.
    SiModel,
    /// `(S, I) -> (S + aSI + lI, (1 - l)I - aSI)`.
    SiModelLambda,
    /// `(x, y) -> (alpha x + x / l_a, beta y + y / l_b)`.
    Competitive,
    /// `(x, y) -> ((axy + x + y)/(b + x + y), (cxy + x + y)/(d + x + y))`.
    RationalPlanar,
    /// Polynomial map with top-degree parts `f_d, g_d` having no common zero.
    HomogeneousD,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 8] = [
        FamilyTag::LinfracGeneral,
        FamilyTag::LinfracSpecial,
        FamilyTag::HostParasite,
        FamilyTag::SiModel,
        FamilyTag::SiModelLambda,
        FamilyTag::Competitive,
        FamilyTag::RationalPlanar,
        FamilyTag::HomogeneousD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::LinfracGeneral => "LINFRAC_GENERAL",
            FamilyTag::LinfracSpecial => "LINFRAC_SPECIAL",
            FamilyTag::HostParasite => "HOST_PARASITE",
            FamilyTag::SiModel => "SI_MODEL",
            FamilyTag::SiModelLambda => "SI_MODEL_LAMBDA",
            FamilyTag::Competitive => "COMPETITIVE",
            FamilyTag::RationalPlanar => "RATIONAL_PLANAR",
            FamilyTag::HomogeneousD => "HOMOGENEOUS_D",
        }
    }

    /// Scalar parameter names, in canonical order.
    pub fn scalar_params(self) -> &'static [&'static str] {
        match self {
            FamilyTag::LinfracGeneral => &["a0", "a1", "a2", "b0", "b1", "b2"],
            FamilyTag::LinfracSpecial => &["a", "b"],
            FamilyTag::HostParasite => &["alpha", "beta", "gamma"],
            FamilyTag::SiModel => &["alpha"],
            FamilyTag::SiModelLambda => &["alpha", "lambda"],
            FamilyTag::Competitive => &["alpha", "beta", "a0", "a1", "a2", "b0", "b1", "b2"],
            FamilyTag::RationalPlanar => &["a", "b", "c", "d"],
            FamilyTag::HomogeneousD => &[],
        }
    }

    /// Polynomial parameter names (in `x, y`).
    pub fn poly_params(self) -> &'static [&'static str] {
        match self {
            FamilyTag::HomogeneousD => &["f", "g"],
            _ => &[],
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        let tag = match key.as_str() {
            "LINFRAC_GENERAL" | "LINFRAC" => FamilyTag::LinfracGeneral,
            "LINFRAC_SPECIAL" => FamilyTag::LinfracSpecial,
            "HOST_PARASITE" => FamilyTag::HostParasite,
            "SI_MODEL" | "SI" => FamilyTag::SiModel,
            "SI_MODEL_LAMBDA" | "SI_LAMBDA" => FamilyTag::SiModelLambda,
            "COMPETITIVE" => FamilyTag::Competitive,
            "RATIONAL_PLANAR" => FamilyTag::RationalPlanar,
            "HOMOGENEOUS_D" | "HOMOGENEOUS" => FamilyTag::HomogeneousD,
            _ => return Err(Error::Unknown(format!("family {s:?}"))),
        };
        Ok(tag)
    }
}

/// Exact parameter values: named rationals plus named polynomials in `x, y`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FamilyParams {
    pub scalars: BTreeMap<String, BigRational>,
    pub polys: BTreeMap<String, MultiPoly>,
}

impl FamilyParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, v: BigRational) -> Self {
        self.scalars.insert(name.to_string(), v);
        self
    }

    pub fn with_poly(mut self, name: &str, p: MultiPoly) -> Self {
        self.polys.insert(name.to_string(), p);
        self
    }

    /// Parses `"a=2, b=-3/4"`; a value containing a variable is read as a
    /// polynomial in `x, y`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut out = Self::new();
        for item in s.split([',', ';']).map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| Error::Parse { pos: 0, msg: format!("expected name=value in {item:?}") })?;
            let (k, v) = (k.trim(), v.trim());
            if v.chars().any(|c| c.is_ascii_alphabetic()) {
                out.polys.insert(k.to_string(), MultiPoly::parse(v, 2)?);
            } else {
                out.scalars.insert(k.to_string(), parse_rational(v)?);
            }
        }
        Ok(out)
    }

    pub fn get(&self, name: &str) -> Result<BigRational> {
        self.scalars.get(name).cloned().ok_or_else(|| Error::Unknown(format!("missing parameter {name}")))
    }

    /// Canonical string form, the inverse of [`FamilyParams::parse`].
    pub fn to_canonical(&self) -> String {
        let mut parts: Vec<String> = self.scalars.iter().map(|(k, v)| format!("{k}={}", format_rational(v))).collect();
        parts.extend(self.polys.iter().map(|(k, p)| format!("{k}={}", p.to_canonical())));
        parts.join(",")
    }

    /// Name to exact-string map for reports.
    pub fn to_strings(&self) -> BTreeMap<String, String> {
        let mut m: BTreeMap<String, String> = self.scalars.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect();
        m.extend(self.polys.iter().map(|(k, p)| (k.clone(), p.to_canonical())));
        m
    }

    fn check_names(&self, tag: FamilyTag) -> Result<()> {
        for k in self.scalars.keys() {
            if !tag.scalar_params().contains(&k.as_str()) {
                return Err(Error::Unknown(format!("parameter {k} for {tag}")));
            }
        }
        for k in self.polys.keys() {
            if !tag.poly_params().contains(&k.as_str()) {
                return Err(Error::Unknown(format!("polynomial parameter {k} for {tag}")));
            }
        }
        for k in tag.scalar_params() {
            if !self.scalars.contains_key(*k) {
                return Err(Error::Unknown(format!("missing parameter {k} for {tag}")));
            }
        }
        for k in tag.poly_params() {
            if !self.polys.contains_key(*k) {
                return Err(Error::Unknown(format!("missing polynomial parameter {k} for {tag}")));
            }
        }
        Ok(())
    }
}

/// A reduced quotient `num / den` of polynomials in `x, y`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl RationalFunction {
    /// Reduces by the gcd and normalizes the denominator to be primitive with
    /// a positive leading coefficient.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidMap("identically zero denominator".into()));
        }
        let g = gcd(&num, &den)?;
        let (mut num, mut den) = (num.divide_exact(&g)?, den.divide_exact(&g)?);
        let c = den.rational_content() * den.leading_coeff().map(|l| if l < &BigRational::zero() { -BigRational::one() } else { BigRational::one() }).unwrap();
        num = num.scale(&c.recip());
        den = den.scale(&c.recip());
        Ok(Self { num, den })
    }

    pub fn polynomial(p: MultiPoly) -> Self {
        let n = p.nvars();
        Self { num: p, den: MultiPoly::one(n) }
    }
}

/// Affine planar map `(x, y) -> (f1, f2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarMap {
    pub components: [RationalFunction; 2],
}

/// Outcome of one floating step of a planar map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Step {
    Point([Complex64; 2]),
    /// A denominator was below the pole guard (relative to its term magnitudes).
    Pole,
}

impl PlanarMap {
    pub fn new(f1: RationalFunction, f2: RationalFunction) -> Self {
        Self { components: [f1, f2] }
    }

    /// Exact image, or `None` at a pole.
    pub fn eval_exact(&self, p: &[BigRational; 2]) -> Result<Option<[BigRational; 2]>> {
        let mut out = [BigRational::zero(), BigRational::zero()];
        for (i, c) in self.components.iter().enumerate() {
            let d = c.den.evaluate(p)?;
            if d.is_zero() {
                return Ok(None);
            }
            out[i] = c.num.evaluate(p)? / d;
        }
        Ok(Some(out))
    }

    /// Floating image with a relative pole guard on each denominator.
    pub fn step(&self, p: [Complex64; 2], pole_guard: f64) -> Step {
        let mut out = [Complex64::zero(); 2];
        for (i, c) in self.components.iter().enumerate() {
            let (d, scale) = c.den.to_float().eval_with_scale(&p);
            if d.norm() <= pole_guard * scale.max(1.0) {
                return Step::Pole;
            }
            out[i] = c.num.to_float().eval(&p) / d;
        }
        Step::Point(out)
    }
}

/// A named family with exact parameters and its planar map.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub tag: FamilyTag,
    pub params: FamilyParams,
    pub planar: PlanarMap,
    /// For the host-parasite family, the original two-population map.
    pub original: Option<PlanarMap>,
}

fn p2(s: &str) -> MultiPoly {
    MultiPoly::parse(s, 2).expect("literal polynomial")
}

fn c2(v: &BigRational) -> MultiPoly {
    MultiPoly::constant(2, v.clone())
}

fn affine_form(c: &[BigRational; 3]) -> MultiPoly {
    MultiPoly::linear_form(2, &c[1..]).add_const(&c[0])
}

trait AddConst {
    fn add_const(&self, c: &BigRational) -> MultiPoly;
}

impl AddConst for MultiPoly {
    fn add_const(&self, c: &BigRational) -> MultiPoly {
        self + &MultiPoly::constant(self.nvars(), c.clone())
    }
}

fn nonzero(tag: FamilyTag, p: &FamilyParams, names: &[&str]) -> Result<()> {
    for n in names {
        if p.get(n)?.is_zero() {
            return Err(Error::Degenerate(format!("{tag}: parameter {n} must be nonzero")));
        }
    }
    Ok(())
}

fn linfrac_map(alpha: &[BigRational; 3], beta: &[BigRational; 3]) -> Result<PlanarMap> {
    let y = MultiPoly::var(2, 1);
    let g = RationalFunction::new(affine_form(alpha), affine_form(beta))?;
    Ok(PlanarMap::new(RationalFunction::polynomial(y), g))
}

fn triple(p: &FamilyParams, names: [&str; 3]) -> Result<[BigRational; 3]> {
    Ok([p.get(names[0])?, p.get(names[1])?, p.get(names[2])?])
}

/// Builds a family after validating its parameters.
pub fn build(tag: FamilyTag, params: FamilyParams) -> Result<FamilySpec> {
    params.check_names(tag)?;
    let mut original = None;
    let planar = match tag {
        FamilyTag::LinfracGeneral => {
            let alpha = triple(&params, ["a0", "a1", "a2"])?;
            let beta = triple(&params, ["b0", "b1", "b2"])?;
            check_linfrac(tag, &alpha, &beta)?;
            linfrac_map(&alpha, &beta)?
        }
        FamilyTag::LinfracSpecial => {
            let (a, b) = (params.get("a")?, params.get("b")?);
            let alpha = [a, BigRational::zero(), BigRational::one()];
            let beta = [b, BigRational::one(), BigRational::zero()];
            check_linfrac(tag, &alpha, &beta)?;
            linfrac_map(&alpha, &beta)?
        }
        FamilyTag::HostParasite => {
            nonzero(tag, &params, &["alpha", "beta", "gamma"])?;
            let (al, be, ga) = (params.get("alpha")?, params.get("beta")?, params.get("gamma")?);
            let red = host_parasite_reduce(&al, &be, &ga)?;
            original = Some(host_parasite_map(&al, &be, &ga)?);
            linfrac_map(&red.alpha, &red.beta)?
        }
        FamilyTag::SiModel | FamilyTag::SiModelLambda => {
            nonzero(tag, &params, &["alpha"])?;
            let al = c2(&params.get("alpha")?);
            let lam = if tag == FamilyTag::SiModelLambda { params.get("lambda")? } else { BigRational::zero() };
            let lam = c2(&lam);
            let (s, i) = (p2("x"), p2("y"));
            let si = &(&al * &s) * &i;
            let f1 = &(&s + &si) + &(&lam * &i);
            let f2 = &(&(&MultiPoly::one(2) - &lam) * &i) - &si;
            PlanarMap::new(RationalFunction::polynomial(f1), RationalFunction::polynomial(f2))
        }
        FamilyTag::Competitive => {
            nonzero(tag, &params, &["a0", "a2", "b0", "b1"])?;
            let la = affine_form(&triple(&params, ["a0", "a1", "a2"])?);
            let lb = affine_form(&triple(&params, ["b0", "b1", "b2"])?);
            let (al, be) = (c2(&params.get("alpha")?), c2(&params.get("beta")?));
            let (x, y) = (p2("x"), p2("y"));
            let n1 = &x * &(&(&al * &la) + &MultiPoly::one(2));
            let n2 = &y * &(&(&be * &lb) + &MultiPoly::one(2));
            let f1 = RationalFunction::new(n1, la.clone())?;
            let f2 = RationalFunction::new(n2, lb.clone())?;
            if f1.den != la.primitive() || f2.den != lb.primitive() {
                return Err(Error::Degenerate(format!("{tag}: l_a or l_b cancels against its numerator")));
            }
            PlanarMap::new(f1, f2)
        }
        FamilyTag::RationalPlanar => {
            let [a, b, c, d] = ["a", "b", "c", "d"].map(|k| params.get(k).map(|v| c2(&v)));
            let (a, b, c, d) = (a?, b?, c?, d?);
            let (xy, s) = (p2("x*y"), p2("x + y"));
            let f1 = RationalFunction::new(&(&a * &xy) + &s, &b + &s)?;
            let f2 = RationalFunction::new(&(&c * &xy) + &s, &d + &s)?;
            if f1.den.degree() != Some(1) || f2.den.degree() != Some(1) {
                return Err(Error::Degenerate(format!("{tag}: numerator and denominator share a factor")));
            }
            PlanarMap::new(f1, f2)
        }
        FamilyTag::HomogeneousD => {
            let f = params.polys["f"].clone();
            let g = params.polys["g"].clone();
            check_homogeneous_tops(&f, &g)?;
            PlanarMap::new(RationalFunction::polynomial(f), RationalFunction::polynomial(g))
        }
    };
    Ok(FamilySpec { tag, params, planar, original })
}

fn check_linfrac(tag: FamilyTag, alpha: &[BigRational; 3], beta: &[BigRational; 3]) -> Result<()> {
    if beta.iter().all(Zero::is_zero) {
        return Err(Error::Degenerate(format!("{tag}: beta must be nonzero")));
    }
    if beta[1].is_zero() && beta[2].is_zero() {
        return Err(Error::Degenerate(format!("{tag}: denominator b0 + b1 x + b2 y must be nonconstant")));
    }
    // alpha proportional to beta makes the recurrence constant.
    let cross = |i: usize, j: usize| &alpha[i] * &beta[j] - &alpha[j] * &beta[i];
    if cross(0, 1).is_zero() && cross(0, 2).is_zero() && cross(1, 2).is_zero() {
        return Err(Error::Degenerate(format!("{tag}: numerator and denominator are proportional")));
    }
    Ok(())
}

/// Top-degree homogeneous part of a polynomial.
pub fn top_form(p: &MultiPoly) -> MultiPoly {
    let d = p.degree().unwrap_or(0);
    MultiPoly::from_terms(p.nvars(), p.terms().iter().filter(|(e, _)| e.iter().sum::<u32>() == d).cloned())
}

fn check_homogeneous_tops(f: &MultiPoly, g: &MultiPoly) -> Result<()> {
    let tag = FamilyTag::HomogeneousD;
    let (df, dg) = (f.degree(), g.degree());
    if df.is_none() || df != dg || df == Some(0) {
        return Err(Error::Degenerate(format!("{tag}: f and g must share a positive degree")));
    }
    let d = df.unwrap();
    let (fd, gd) = (top_form(f), top_form(g));
    // Both vanishing at [1:0] means both lack x^d.
    if fd.coeff(&[d, 0, 0]).is_zero() && gd.coeff(&[d, 0, 0]).is_zero() {
        return Err(Error::Degenerate(format!("{tag}: f_d and g_d share the zero (1, 0)")));
    }
    if resultant(&fd, &gd, 0)?.is_zero() {
        return Err(Error::Degenerate(format!("{tag}: f_d and g_d share a nontrivial common zero")));
    }
    Ok(())
}

/// Linear-fractional parameters `alpha = (a0, a1, a2)`, `beta = (b0, b1, b2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinfracParams {
    pub alpha: [BigRational; 3],
    pub beta: [BigRational; 3],
}

impl LinfracParams {
    pub fn to_params(&self) -> FamilyParams {
        let mut p = FamilyParams::new();
        for (i, v) in self.alpha.iter().enumerate() {
            p = p.with(&format!("a{i}"), v.clone());
        }
        for (i, v) in self.beta.iter().enumerate() {
            p = p.with(&format!("b{i}"), v.clone());
        }
        p
    }
}

/// Host-parasite reduction: `x_{n+1} = alpha x_n / (1 + gamma x_{n-1} - (gamma/alpha) x_n)`.
/// Eliminating `y` through `1 + beta y_n = 1 + gamma (x_{n-1} - x_n / alpha)` fixes the last
/// coefficient as `-gamma/alpha`; `beta` only enters the reconstruction of `y`.
pub fn host_parasite_reduce(alpha: &BigRational, beta: &BigRational, gamma: &BigRational) -> Result<LinfracParams> {
    if alpha.is_zero() || beta.is_zero() || gamma.is_zero() {
        return Err(Error::Degenerate("HOST_PARASITE: alpha, beta, gamma must be nonzero".into()));
    }
    Ok(LinfracParams {
        alpha: [BigRational::zero(), BigRational::zero(), alpha.clone()],
        beta: [BigRational::one(), gamma.clone(), -(gamma / alpha)],
    })
}

/// Recovers `y_{n+1} = (gamma/beta)(x_n - x_{n+1}/alpha)` from consecutive x-values.
pub fn host_parasite_reconstruct(alpha: f64, beta: f64, gamma: f64, x_n: f64, x_next: f64) -> f64 {
    gamma / beta * (x_n - x_next / alpha)
}

/// The original map `(x, y) -> (alpha x / (1 + beta y), gamma x y / (1 + beta y))`.
pub fn host_parasite_map(alpha: &BigRational, beta: &BigRational, gamma: &BigRational) -> Result<PlanarMap> {
    let den = &MultiPoly::one(2) + &(&c2(beta) * &p2("y"));
    let f1 = RationalFunction::new(&c2(alpha) * &p2("x"), den.clone())?;
    let f2 = RationalFunction::new(&c2(gamma) * &p2("x*y"), den)?;
    Ok(PlanarMap::new(f1, f2))
}

fn p2_model(d: i128, d_top: i128, spurious: SpuriousCorrection) -> CohomologyModel {
    CohomologyModel::new("P2", &["H"], IntMatrix::new(vec![vec![d]]).unwrap(), d_top, spurious).unwrap()
}

/// Registered cohomology models, ordered by the periods they cover.
pub fn models(spec: &FamilySpec) -> Vec<CohomologyModel> {
    match spec.tag {
        FamilyTag::LinfracGeneral | FamilyTag::HostParasite => vec![
            // On the plane: diag(1, 2, 1); e1 counted with multiplicity 2.
            p2_model(2, 1, SpuriousCorrection::constant(2)).periods(1, Some(1)),
            CohomologyModel::new("Y", &["H", "E1"], IntMatrix::from_i64(&[&[2, 1], &[-1, -1]]), 1, SpuriousCorrection::constant(2))
                .unwrap()
                .periods(2, None),
        ],
        FamilyTag::LinfracSpecial => vec![CohomologyModel::new(
            "X",
            &["H", "E1", "E2"],
            IntMatrix::from_i64(&[&[2, 1, 1], &[-1, -1, 0], &[-1, -1, -1]]),
            1,
            SpuriousCorrection::constant(0),
        )
        .unwrap()],
        FamilyTag::SiModel | FamilyTag::SiModelLambda => vec![p2_model(2, 2, SpuriousCorrection::constant(3))
            .with_caveat("equality for generic parameters; the affine fixed set contains whole lines, so the count is not oracle-verifiable where continua appear")],
        FamilyTag::Competitive => vec![p2_model(3, 4, SpuriousCorrection::constant(4))],
        FamilyTag::RationalPlanar => vec![CohomologyModel::new(
            "Z",
            &["H", "E1", "E2"],
            IntMatrix::from_i64(&[&[3, 1, 1], &[-1, 0, 0], &[-1, 0, 0]]),
            2,
            SpuriousCorrection::constant(2),
        )
        .unwrap()],
        FamilyTag::HomogeneousD => {
            let d = spec.planar.components[0].num.degree().unwrap_or(1) as i128;
            // Fixed points of the restriction to the line at infinity: 1 + d^n.
            vec![p2_model(d, d * d, SpuriousCorrection { constant: 1, power_base: Some(d) })]
        }
    }
}

/// Whether the registered count is flagged as possibly not oracle-verifiable.
pub fn non_isolated_warning(tag: FamilyTag) -> bool {
    matches!(tag, FamilyTag::SiModel | FamilyTag::SiModelLambda)
}

/// Algebraic and topological degrees asserted for each family.
pub fn expected_degrees(spec: &FamilySpec) -> (u32, u32) {
    match spec.tag {
        FamilyTag::LinfracGeneral | FamilyTag::LinfracSpecial | FamilyTag::HostParasite => (2, 1),
        FamilyTag::SiModel | FamilyTag::SiModelLambda => (2, 2),
        FamilyTag::Competitive => (3, 4),
        FamilyTag::RationalPlanar => (3, 2),
        FamilyTag::HomogeneousD => {
            let d = spec.planar.components[0].num.degree().unwrap_or(1);
            (d, d * d)
        }
    }
}

/// A random nonzero rational with numerator and denominator of height at most `h`.
pub fn random_rational<R: Rng>(rng: &mut R, h: i64) -> BigRational {
    loop {
        let n = rng.gen_range(-h..=h);
        let d = rng.gen_range(1..=h);
        if n != 0 {
            return rat(n, d);
        }
    }
}

/// Random parameters for a family, redrawn until the builder accepts them.
pub fn random_params<R: Rng>(tag: FamilyTag, rng: &mut R) -> FamilyParams {
    loop {
        let mut p = FamilyParams::new();
        for k in tag.scalar_params() {
            p = p.with(k, random_rational(rng, 9));
        }
        if tag == FamilyTag::HomogeneousD {
            let d = 2;
            let mut f = MultiPoly::zero(2);
            let mut g = MultiPoly::zero(2);
            for i in 0..=d {
                for j in 0..=(d - i) {
                    f = &f + &MultiPoly::monomial(2, [i, j, 0], random_rational(rng, 5));
                    g = &g + &MultiPoly::monomial(2, [i, j, 0], random_rational(rng, 5));
                }
            }
            p = p.with_poly("f", f).with_poly("g", g);
        }
        if build(tag, p.clone()).is_ok() {
            return p;
        }
    }
}

/// Convenience constructor for literal parameter lists such as `[("a", 2), ("b", 3)]`.
pub fn int_params(pairs: &[(&str, i64)]) -> FamilyParams {
    pairs.iter().fold(FamilyParams::new(), |p, (k, v)| p.with(k, int(*v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn special_is_a_specialization_of_general() {
        let s = build(FamilyTag::LinfracSpecial, int_params(&[("a", 2), ("b", 3)])).unwrap();
        let g = build(
            FamilyTag::LinfracGeneral,
            int_params(&[("a0", 2), ("a1", 0), ("a2", 1), ("b0", 3), ("b1", 1), ("b2", 0)]),
        )
        .unwrap();
        assert_eq!(s.planar, g.planar);
    }

    #[test]
    fn host_parasite_reduction_values() {
        let r = host_parasite_reduce(&int(1), &int(1), &int(1)).unwrap();
        assert_eq!(r.alpha, [int(0), int(0), int(1)]);
        assert_eq!(r.beta, [int(1), int(1), int(-1)]);
        assert!(host_parasite_reduce(&int(0), &int(1), &int(1)).is_err());
    }

    #[test]
    fn degeneracies_are_named() {
        let e = build(FamilyTag::LinfracGeneral, int_params(&[("a0", 1), ("a1", 2), ("a2", 3), ("b0", 2), ("b1", 4), ("b2", 6)]));
        assert!(matches!(e, Err(Error::Degenerate(m)) if m.contains("proportional")));
        let e = build(FamilyTag::SiModel, int_params(&[("alpha", 0)]));
        assert!(matches!(e, Err(Error::Degenerate(m)) if m.contains("alpha")));
        let p = FamilyParams::parse("f=x^2 + y, g=x^2").unwrap();
        assert!(build(FamilyTag::HomogeneousD, p).is_err());
        assert!(matches!(build(FamilyTag::SiModel, int_params(&[("beta", 1)])), Err(Error::Unknown(_))));
    }

    #[test]
    fn params_parse_and_print() {
        let p = FamilyParams::parse("a=2, b=-3/4").unwrap();
        assert_eq!(p.get("b").unwrap(), rat(-3, 4));
        assert_eq!(FamilyParams::parse(&p.to_canonical()).unwrap(), p);
        let h = FamilyParams::parse("f=x^2+y,g=x*y+y^2").unwrap();
        assert_eq!(h.polys["g"], p2("x*y + y^2"));
        assert!(FamilyParams::parse("a2").is_err());
        assert_eq!("si".parse::<FamilyTag>().unwrap(), FamilyTag::SiModel);
    }

    #[test]
    fn random_params_build() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for tag in FamilyTag::ALL {
            let p = random_params(tag, &mut rng);
            assert!(build(tag, p).is_ok());
        }
    }

    #[test]
    fn host_parasite_original_matches_reduced_x_sequence() {
        let (al, be, ga) = (rat(3, 2), rat(1, 3), rat(2, 5));
        let spec = build(FamilyTag::HostParasite, FamilyParams::new().with("alpha", al.clone()).with("beta", be.clone()).with("gamma", ga.clone())).unwrap();
        let orig = spec.original.as_ref().unwrap();
        let mut xy = [rat(1, 2), rat(1, 7)];
        let mut xs = vec![xy[0].clone()];
        for _ in 0..5 {
            xy = orig.eval_exact(&xy).unwrap().unwrap();
            xs.push(xy[0].clone());
        }
        let mut z = [xs[0].clone(), xs[1].clone()];
        for x in xs.iter().skip(2) {
            z = spec.planar.eval_exact(&z).unwrap().unwrap();
            assert_eq!(&z[1], x);
        }
    }
}
