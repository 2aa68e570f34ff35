//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A [`MultiPoly`] lives in a fixed number of variables (one to three). Terms
//! are kept sorted in descending graded-lexicographic order with `x0 > x1 >
//! x2`, and no zero coefficient is ever stored. The canonical variable names
//! are `x` (one variable), `x, y` (two) and `x0, x1, x2` (three).

mod gcd;
mod modular;
mod resultant;
pub mod scalar;
mod text;
pub mod univariate;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use gcd::{gcd, gcd_many, gcd_subresultant};
pub use resultant::{determinant, resultant};
pub use scalar::{ComplexApprox, ExactScalar};

use crate::error::{Error, Result};
use scalar::{rational_to_f64, ComplexDd, CompensatedSum};

pub const MAX_VARS: usize = 3;

/// Exponent vector; entries past `nvars` are always zero.
pub type Exponents = [u32; MAX_VARS];

pub fn grlex_cmp(a: &Exponents, b: &Exponents) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Orders exponent vectors by graded lex; used as a `BTreeMap` key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Grlex(Exponents);

impl Ord for Grlex {
    fn cmp(&self, other: &Self) -> Ordering {
        grlex_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Grlex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_exp(a: &Exponents, b: &Exponents) -> Exponents {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn divides_exp(d: &Exponents, m: &Exponents) -> bool {
    d.iter().zip(m).all(|(x, y)| x <= y)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: Vec<(Exponents, BigRational)>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.nvars, self)
    }
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        assert!((1..=MAX_VARS).contains(&nvars), "1 to 3 variables supported");
        Self { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.push(([0; MAX_VARS], c));
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        Self::monomial(nvars, e, BigRational::one())
    }

    pub fn monomial(nvars: usize, e: Exponents, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        debug_assert!(e[nvars..].iter().all(|&x| x == 0));
        if !c.is_zero() {
            p.terms.push((e, c));
        }
        p
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Exponents, BigRational)>>(nvars: usize, it: I) -> Self {
        let mut acc: HashMap<Exponents, BigRational> = HashMap::new();
        for (e, c) in it {
            assert!(e[nvars..].iter().all(|&x| x == 0), "exponent outside variable range");
            *acc.entry(e).or_insert_with(BigRational::zero) += c;
        }
        Self::from_map(nvars, acc)
    }

    fn from_map(nvars: usize, acc: HashMap<Exponents, BigRational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| grlex_cmp(&b.0, &a.0));
        Self { nvars, terms }
    }

    /// Linear form `sum c_i x_i` (homogeneous, no constant term).
    pub fn linear_form(nvars: usize, coeffs: &[BigRational]) -> Self {
        assert_eq!(coeffs.len(), nvars);
        Self::from_terms(
            nvars,
            coeffs.iter().enumerate().map(|(i, c)| {
                let mut e = [0; MAX_VARS];
                e[i] = 1;
                (e, c.clone())
            }),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Exponents, BigRational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == [0; MAX_VARS])
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == [0; MAX_VARS] && self.terms[0].1.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    /// Total degree; `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|(e, _)| e.iter().sum())
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e[var]).max()
    }

    pub fn min_degree_in(&self, var: usize) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e[var]).min()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.iter().any(|(e, _)| e[var] > 0)
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.degree() {
            None => true,
            Some(d) => self.terms.iter().all(|(e, _)| e.iter().sum::<u32>() == d),
        }
    }

    /// Leading term under graded lex.
    pub fn leading_term(&self) -> Option<(&Exponents, &BigRational)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn coeff(&self, e: &Exponents) -> BigRational {
        self.terms
            .binary_search_by(|(x, _)| grlex_cmp(e, x))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            Err(Error::VariableMismatch(self.nvars, other.nvars))
        } else {
            Ok(())
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect() }
    }

    /// Multiplies by the monomial `x^e`.
    pub fn shift(&self, e: &Exponents) -> Self {
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (add_exp(m, e), c.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Common denominator `L` and integer numerators so that `self = (1/L) * sum n_i m_i`.
    fn integer_form(&self) -> (BigInt, Vec<(Exponents, BigInt)>) {
        let l = self.terms.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let ints = self.terms.iter().map(|(e, c)| (*e, c.numer() * (&l / c.denom()))).collect();
        (l, ints)
    }

    /// Integer content (positive) of the numerators after clearing denominators,
    /// divided by the common denominator: `self = content * primitive`.
    pub fn rational_content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::one();
        }
        let (l, ints) = self.integer_form();
        let g = ints.iter().fold(BigInt::zero(), |acc, (_, n)| acc.gcd(n));
        BigRational::new(g, l)
    }

    /// Integer coefficients with gcd one and a positive graded-lex leading
    /// coefficient. This is the canonical representative of `self` up to a
    /// nonzero rational scalar.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.rational_content();
        if self.terms[0].1.is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    /// Scales so that the graded-lex leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading_coeff() {
            None => self.clone(),
            Some(c) => self.scale(&c.recip()),
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, c)| {
                let mut e2 = *e;
                e2[var] -= 1;
                (e2, c * BigRational::from_integer(BigInt::from(e[var])))
            }),
        )
    }

    /// Substitutes `x_var = value`; the variable count is unchanged.
    pub fn eval_var(&self, var: usize, value: &BigRational) -> Self {
        let maxe = self.degree_in(var).unwrap_or(0) as usize;
        let mut pows = vec![BigRational::one()];
        for i in 0..maxe {
            let next = &pows[i] * value;
            pows.push(next);
        }
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, c)| {
                let mut e2 = *e;
                e2[var] = 0;
                (e2, c * &pows[e[var] as usize])
            }),
        )
    }

    /// Drops variable `var`, which must not occur; later variables shift down.
    pub fn remove_var(&self, var: usize) -> Result<Self> {
        if self.nvars == 1 {
            return Err(Error::VariableMismatch(1, 0));
        }
        if self.involves(var) {
            return Err(Error::Internal(format!("variable {var} still occurs")));
        }
        Ok(Self::from_terms(
            self.nvars - 1,
            self.terms.iter().map(|(e, c)| {
                let mut e2 = [0; MAX_VARS];
                let mut j = 0;
                for (i, x) in e.iter().enumerate().take(self.nvars) {
                    if i != var {
                        e2[j] = *x;
                        j += 1;
                    }
                }
                (e2, c.clone())
            }),
        ))
    }

    /// Inserts a new variable at position `at` (absent from every term).
    pub fn insert_var(&self, at: usize) -> Self {
        assert!(self.nvars < MAX_VARS && at <= self.nvars);
        Self::from_terms(
            self.nvars + 1,
            self.terms.iter().map(|(e, c)| {
                let mut e2 = [0; MAX_VARS];
                let mut j = 0;
                for (i, slot) in e2.iter_mut().enumerate().take(self.nvars + 1) {
                    if i != at {
                        *slot = e[j];
                        j += 1;
                    }
                }
                (e2, c.clone())
            }),
        )
    }

    /// Renames variables: variable `i` of `self` becomes variable `perm[i]` in
    /// a polynomial with `nvars` variables.
    pub fn relabel(&self, nvars: usize, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.nvars);
        Self::from_terms(
            nvars,
            self.terms.iter().map(|(e, c)| {
                let mut e2 = [0; MAX_VARS];
                for (i, &t) in perm.iter().enumerate() {
                    e2[t] += e[i];
                }
                (e2, c.clone())
            }),
        )
    }

    /// Homogenizes to degree `deg` with a new leading variable `x0`.
    pub fn homogenize_to(&self, deg: u32) -> Result<Self> {
        if let Some(d) = self.degree() {
            if d > deg {
                return Err(Error::Internal(format!("cannot homogenize degree {d} to {deg}")));
            }
        }
        let lifted = self.insert_var(0);
        Ok(Self::from_terms(
            lifted.nvars,
            lifted.terms.into_iter().map(|(mut e, c)| {
                e[0] = deg - e.iter().sum::<u32>();
                (e, c)
            }),
        ))
    }

    pub fn homogenize(&self) -> Self {
        self.homogenize_to(self.degree().unwrap_or(0)).expect("degree bound holds")
    }

    /// Sets `x0 = 1` and removes it.
    pub fn dehomogenize(&self) -> Self {
        self.eval_var(0, &BigRational::one()).remove_var(0).expect("x0 eliminated")
    }

    /// Substitutes `subs[i]` for variable `i`; all substitutes share a
    /// variable count, which becomes that of the result.
    pub fn substitute(&self, subs: &[MultiPoly]) -> Result<Self> {
        if subs.len() != self.nvars {
            return Err(Error::Arity { expected: self.nvars, got: subs.len() });
        }
        let m = subs[0].nvars;
        for s in subs {
            if s.nvars != m {
                return Err(Error::VariableMismatch(m, s.nvars));
            }
        }
        let mut pows: Vec<Vec<MultiPoly>> = subs.iter().map(|s| vec![MultiPoly::one(m), s.clone()]).collect();
        for (i, s) in subs.iter().enumerate() {
            let maxe = self.degree_in(i).unwrap_or(0) as usize;
            while pows[i].len() <= maxe {
                let next = &pows[i][pows[i].len() - 1] * s;
                pows[i].push(next);
            }
        }
        // Group by the exponent prefix so that shared partial products are reused.
        let mut acc: HashMap<Exponents, BigRational> = HashMap::new();
        let mut cache: HashMap<(usize, Exponents), MultiPoly> = HashMap::new();
        for (e, c) in &self.terms {
            let prod = Self::power_product(&pows, e, self.nvars, &mut cache);
            for (pe, pc) in &prod.terms {
                *acc.entry(*pe).or_insert_with(BigRational::zero) += pc * c;
            }
        }
        Ok(Self::from_map(m, acc))
    }

    fn power_product(
        pows: &[Vec<MultiPoly>],
        e: &Exponents,
        k: usize,
        cache: &mut HashMap<(usize, Exponents), MultiPoly>,
    ) -> MultiPoly {
        let mut key = [0; MAX_VARS];
        key[..k].copy_from_slice(&e[..k]);
        if let Some(p) = cache.get(&(k, key)) {
            return p.clone();
        }
        let last = &pows[k - 1][e[k - 1] as usize];
        let p = if k == 1 { last.clone() } else { &Self::power_product(pows, e, k - 1, cache) * last };
        cache.insert((k, key), p.clone());
        p
    }

    /// Coefficients of `self` as a polynomial in `var`, indexed by exponent.
    /// The coefficient polynomials keep the variable count (without `var`).
    pub fn to_univariate(&self, var: usize) -> Vec<MultiPoly> {
        let deg = match self.degree_in(var) {
            None => return Vec::new(),
            Some(d) => d as usize,
        };
        let mut buckets: Vec<Vec<(Exponents, BigRational)>> = vec![Vec::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = *e;
            e2[var] = 0;
            buckets[e[var] as usize].push((e2, c.clone()));
        }
        buckets.into_iter().map(|b| Self::from_terms(self.nvars, b)).collect()
    }

    pub fn from_univariate(nvars: usize, var: usize, coeffs: &[MultiPoly]) -> Self {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            for (e, x) in &c.terms {
                let mut e2 = *e;
                e2[var] += k as u32;
                terms.push((e2, x.clone()));
            }
        }
        Self::from_terms(nvars, terms)
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.nvars {
            return Err(Error::Arity { expected: self.nvars, got: point.len() });
        }
        let pows = power_table(point, self, BigRational::one(), |a, b| a * b);
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..self.nvars {
                if e[i] > 0 {
                    t *= &pows[i][e[i] as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating evaluation with compensated accumulation of the monomial terms.
    pub fn evaluate_complex(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.nvars {
            return Err(Error::Arity { expected: self.nvars, got: point.len() });
        }
        Ok(self.to_float().eval(point))
    }

    pub fn evaluate_dd(&self, point: &[ComplexDd]) -> Result<ComplexDd> {
        if point.len() != self.nvars {
            return Err(Error::Arity { expected: self.nvars, got: point.len() });
        }
        let pows = power_table(point, self, ComplexDd::from_c64(Complex64::new(1.0, 0.0)), |a, b| *a * *b);
        let mut acc = ComplexDd::default();
        for (e, c) in &self.terms {
            let mut t = ComplexDd::from_rational(c);
            for i in 0..self.nvars {
                if e[i] > 0 {
                    t = t * pows[i][e[i] as usize];
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Floating copy of the coefficients for repeated numeric evaluation.
    pub fn to_float(&self) -> FloatPoly {
        FloatPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (*e, rational_to_f64(c))).collect(),
        }
    }

    /// Exact quotient `self / g`; errors unless the division leaves no remainder.
    pub fn divide_exact(&self, g: &Self) -> Result<Self> {
        self.check_same(g)?;
        if g.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        if let Some(c) = g.constant_value() {
            return Ok(self.scale(&c.recip()));
        }
        // self = (1/ls) P with P integral; g = cg * G with G primitive. By Gauss's
        // lemma an exact quotient P / G is integral, so every step must divide.
        let (ls, pi) = self.integer_form();
        let gp = g.primitive();
        let cg = g.leading_coeff().unwrap() / gp.leading_coeff().unwrap();
        let gi: Vec<(Exponents, BigInt)> = gp.terms.iter().map(|(e, c)| (*e, c.numer().clone())).collect();
        let (glm, glc) = (gi[0].0, gi[0].1.clone());
        let mut rem: BTreeMap<Grlex, BigInt> = pi.into_iter().map(|(e, c)| (Grlex(e), c)).collect();
        let mut quot: Vec<(Exponents, BigInt)> = Vec::new();
        while let Some((Grlex(m), c)) = rem.pop_last() {
            if !divides_exp(&glm, &m) {
                return Err(Error::InexactDivision);
            }
            let (q, r) = c.div_rem(&glc);
            if !r.is_zero() {
                return Err(Error::InexactDivision);
            }
            let qe = [m[0] - glm[0], m[1] - glm[1], m[2] - glm[2]];
            for (ge, gc) in gi.iter().skip(1) {
                let key = Grlex(add_exp(ge, &qe));
                let entry = rem.entry(key).or_insert_with(BigInt::zero);
                *entry -= &q * gc;
                if entry.is_zero() {
                    rem.remove(&key);
                }
            }
            quot.push((qe, q));
        }
        let factor = (cg * BigRational::from_integer(ls)).recip();
        let mut terms: Vec<_> = quot.into_iter().map(|(e, c)| (e, BigRational::from_integer(c) * &factor)).collect();
        terms.sort_by(|a, b| grlex_cmp(&b.0, &a.0));
        Ok(Self { nvars: self.nvars, terms })
    }

    pub fn divides(&self, p: &Self) -> bool {
        p.divide_exact(self).is_ok()
    }
}

fn power_table<T: Clone>(point: &[T], p: &MultiPoly, one: T, mul: impl Fn(&T, &T) -> T) -> Vec<Vec<T>> {
    point
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let maxe = p.degree_in(i).unwrap_or(0) as usize;
            let mut row = vec![one.clone()];
            for k in 0..maxe {
                let next = mul(&row[k], v);
                row.push(next);
            }
            row
        })
        .collect()
}

/// Floating-point shadow of a [`MultiPoly`] used in numeric inner loops.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    pub nvars: usize,
    pub terms: Vec<(Exponents, f64)>,
}

impl FloatPoly {
    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        self.eval_with_scale(point).0
    }

    /// Value together with `sum |c| |x^e|`, the natural scale for a
    /// backward-error residual.
    pub fn eval_with_scale(&self, point: &[Complex64]) -> (Complex64, f64) {
        let mut acc = CompensatedSum::default();
        let mut scale = 0.0;
        for (e, c) in &self.terms {
            let mut t = Complex64::new(*c, 0.0);
            for i in 0..self.nvars {
                if e[i] > 0 {
                    t *= point[i].powu(e[i]);
                }
            }
            scale += t.norm();
            acc.add(t);
        }
        (acc.value(), scale)
    }

    pub fn derivative(&self, var: usize) -> FloatPoly {
        FloatPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[var] > 0)
                .map(|(e, c)| {
                    let mut e2 = *e;
                    e2[var] -= 1;
                    (e2, c * e[var] as f64)
                })
                .collect(),
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::to_canonical(self))
    }
}

impl std::str::FromStr for MultiPoly {
    type Err = Error;
    /// Parses with the variable count inferred from the names used
    /// (`x0..x2` → 3, `y` → 2, otherwise 1).
    fn from_str(s: &str) -> Result<Self> {
        text::parse_infer(s)
    }
}

impl MultiPoly {
    /// Canonical text: descending graded lex, explicit coefficients and exponents.
    pub fn to_canonical(&self) -> String {
        text::to_canonical(self)
    }

    pub fn parse(s: &str, nvars: usize) -> Result<Self> {
        text::parse(s, nvars)
    }

    pub fn var_name(nvars: usize, i: usize) -> &'static str {
        text::var_name(nvars, i)
    }
}

fn merge(a: &MultiPoly, b: &MultiPoly, negate_b: bool) -> MultiPoly {
    assert_eq!(a.nvars, b.nvars, "variable count mismatch");
    let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() || j < b.terms.len() {
        let ord = if i == a.terms.len() {
            Ordering::Less
        } else if j == b.terms.len() {
            Ordering::Greater
        } else {
            grlex_cmp(&a.terms[i].0, &b.terms[j].0)
        };
        match ord {
            Ordering::Greater => {
                out.push(a.terms[i].clone());
                i += 1;
            }
            Ordering::Less => {
                let (e, c) = &b.terms[j];
                out.push((*e, if negate_b { -c } else { c.clone() }));
                j += 1;
            }
            Ordering::Equal => {
                let c = if negate_b { &a.terms[i].1 - &b.terms[j].1 } else { &a.terms[i].1 + &b.terms[j].1 };
                if !c.is_zero() {
                    out.push((a.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    MultiPoly { nvars: a.nvars, terms: out }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &MultiPoly) -> MultiPoly {
        merge(self, o, false)
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        merge(self, o, true)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        if self.is_zero() || o.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        let (la, ia) = self.integer_form();
        let (lb, ib) = o.integer_form();
        let mut acc: HashMap<Exponents, BigInt> = HashMap::with_capacity(ia.len() * ib.len() / 2 + 1);
        for (ea, xa) in &ia {
            for (eb, xb) in &ib {
                let prod = xa * xb;
                match acc.entry(add_exp(ea, eb)) {
                    std::collections::hash_map::Entry::Occupied(mut slot) => *slot.get_mut() += prod,
                    std::collections::hash_map::Entry::Vacant(slot) => {
                        slot.insert(prod);
                    }
                }
            }
        }
        let den = la * lb;
        let mut terms: Vec<_> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e, BigRational::new(c, den.clone())))
            .collect();
        terms.sort_by(|a, b| grlex_cmp(&b.0, &a.0));
        MultiPoly { nvars: self.nvars, terms }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, o: MultiPoly) -> MultiPoly {
                (&self).$m(&o)
            }
        }
        impl $tr<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, o: &MultiPoly) -> MultiPoly {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests;
