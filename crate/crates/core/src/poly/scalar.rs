use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational coefficient. `BigRational` keeps itself reduced with a
/// positive denominator, and zero is stored as `0/1`.
pub type ExactScalar = BigRational;

pub fn rat(num: i64, den: i64) -> ExactScalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> ExactScalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"3"`, `"-7/4"` or a plain decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<ExactScalar> {
    let t = s.trim();
    let err = |msg: &str| Error::Parse { pos: 0, msg: format!("{msg}: {t:?}") };
    if t.is_empty() {
        return Err(err("empty number"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if ip_digits.is_empty() { "0" } else { ip_digits }, fp);
        let n: BigInt = digits.parse().map_err(|_| err("bad decimal"))?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| err("bad integer"))?;
    Ok(BigRational::from_integer(n))
}

/// `"num/den"`, or just `"num"` for integers.
pub fn format_rational(r: &ExactScalar) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &ExactScalar) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Serde adapter writing exact rationals as strings.
pub mod exact_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &ExactScalar, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ExactScalar, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// A finite complex approximation. Serialized as `[re, im]` decimal strings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexApprox(Complex64);

/// Largest magnitude accepted for a stored approximation.
pub const APPROX_MAGNITUDE_LIMIT: f64 = 1e150;

impl ComplexApprox {
    pub fn new(z: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Numerical(format!("non-finite value {z}")));
        }
        if z.norm() > APPROX_MAGNITUDE_LIMIT {
            return Err(Error::Numerical(format!("value {z} exceeds magnitude bound")));
        }
        Ok(Self(z))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl Serialize for ComplexApprox {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_f64(self.0.re), format_f64(self.0.im)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexApprox {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[String; 2]>::deserialize(d)?;
        let re: f64 = re.parse().map_err(serde::de::Error::custom)?;
        let im: f64 = im.parse().map_err(serde::de::Error::custom)?;
        ComplexApprox::new(Complex64::new(re, im)).map_err(serde::de::Error::custom)
    }
}

/// Seventeen significant digits round-trip every `f64`.
pub fn format_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Double-double real: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
/// roughly 106 bits of mantissa.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn from_rational(r: &ExactScalar) -> Self {
        let hi = rational_to_f64(r);
        if !hi.is_finite() {
            return Self::from_f64(hi);
        }
        let rest = r - BigRational::from_float(hi).unwrap_or_else(BigRational::zero);
        Self { hi, lo: rational_to_f64(&rest) }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * Self::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Self::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }
}

/// Complex number over [`DoubleDouble`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexDd {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
}

impl ComplexDd {
    pub fn from_c64(z: Complex64) -> Self {
        Self { re: DoubleDouble::from_f64(z.re), im: DoubleDouble::from_f64(z.im) }
    }

    pub fn from_rational(r: &ExactScalar) -> Self {
        Self { re: DoubleDouble::from_rational(r), im: DoubleDouble::ZERO }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_f64(self) -> f64 {
        self.to_c64().norm()
    }
}

impl Add for ComplexDd {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for ComplexDd {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for ComplexDd {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl Div for ComplexDd {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let den = o.re * o.re + o.im * o.im;
        let num = self * Self { re: o.re, im: -o.im };
        Self { re: num.re / den, im: num.im / den }
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        let (sr, cr) = neumaier(self.sum.re, x.re);
        let (si, ci) = neumaier(self.sum.im, x.im);
        self.sum = Complex64::new(sr, si);
        self.comp += Complex64::new(cr, ci);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
    (t, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/-4").unwrap(), rat(-3, 2));
        assert_eq!(format_rational(&rat(-3, 2)), "-3/2");
        assert_eq!(format_rational(&int(5)), "5");
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn zero_is_canonical() {
        let z = parse_rational("0/7").unwrap();
        assert_eq!(z.denom(), &BigInt::one());
    }

    #[test]
    fn approx_rejects_nonfinite() {
        assert!(ComplexApprox::new(Complex64::new(f64::NAN, 0.0)).is_err());
        assert!(ComplexApprox::new(Complex64::new(1e200, 0.0)).is_err());
        let z = ComplexApprox::new(Complex64::new(0.1, -2.5)).unwrap();
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(serde_json::from_str::<ComplexApprox>(&s).unwrap(), z);
    }

    #[test]
    fn double_double_keeps_extra_bits() {
        let third = DoubleDouble::from_rational(&rat(1, 3));
        let back = third * DoubleDouble::from_f64(3.0);
        assert!((back - DoubleDouble::from_f64(1.0)).abs().hi < 1e-30);
        let q = DoubleDouble::from_f64(1.0) / DoubleDouble::from_f64(3.0);
        assert!((q - third).abs().hi < 1e-31);
    }
}
