//! Univariate root finding over `Q[x]`.
//!
//! Inputs are one-variable [`MultiPoly`] values. Roots are separated by
//! squarefree decomposition, located by simultaneous Aberth–Ehrlich iteration
//! in `f64` on a rescaled variable, then refined by the same iteration in
//! double-double arithmetic against the exact coefficients.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::scalar::{rational_to_f64, ComplexDd, DoubleDouble};
use super::{gcd, MultiPoly};
use crate::error::{Error, Result};

/// A complex root with its exact multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: u32,
}

fn require_univariate(p: &MultiPoly) -> Result<()> {
    if p.nvars() != 1 {
        return Err(Error::VariableMismatch(1, p.nvars()));
    }
    Ok(())
}

/// Yun's squarefree decomposition: pairwise coprime squarefree factors with
/// their multiplicities, so that `p = c * prod f_i^{m_i}`. Constant factors
/// are omitted and every factor is primitive.
pub fn squarefree(p: &MultiPoly) -> Result<Vec<(MultiPoly, u32)>> {
    require_univariate(p)?;
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut out = Vec::new();
    if p.is_constant() {
        return Ok(out);
    }
    let dp = p.derivative(0);
    let a0 = gcd(p, &dp)?;
    let mut b = p.divide_exact(&a0)?;
    let c = dp.divide_exact(&a0)?;
    let mut d = &c - &b.derivative(0);
    let mut i = 1;
    while !b.is_constant() {
        let a = gcd(&b, &d)?;
        let next_b = b.divide_exact(&a)?;
        let next_c = d.divide_exact(&a)?;
        d = &next_c - &next_b.derivative(0);
        if !a.is_constant() {
            out.push((a.primitive(), i));
        }
        b = next_b;
        i += 1;
    }
    Ok(out)
}

fn log_abs(c: &BigRational) -> f64 {
    let ln_big = |x: &BigInt| -> f64 {
        let bits = x.bits();
        if bits < 1000 {
            x.to_f64().unwrap().abs().ln()
        } else {
            let shift = bits - 60;
            (x >> shift).to_f64().unwrap().abs().ln() + shift as f64 * std::f64::consts::LN_2
        }
    };
    ln_big(c.numer()) - ln_big(c.denom())
}

/// Geometric-mean root modulus `|c_0 / c_d|^{1/d}`, used as the rescaling.
fn root_scale(p: &MultiPoly) -> f64 {
    let deg = p.degree().unwrap_or(0);
    let lead = p.terms().iter().find(|(e, _)| e[0] == deg).map(|(_, c)| log_abs(c)).unwrap();
    let low = p.terms().iter().min_by_key(|(e, _)| e[0]).unwrap();
    let s = ((log_abs(&low.1) - lead) / (deg - low.0[0]).max(1) as f64).exp();
    if s.is_finite() && s > 0.0 {
        s
    } else {
        1.0
    }
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots of a polynomial given by `f64` coefficients (low to high),
/// by Aberth–Ehrlich iteration. Fails if the iteration does not settle.
pub fn aberth(coeffs: &[Complex64], max_iter: usize) -> Result<Vec<Complex64>> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    let mut zeros = 0;
    while zeros < deg && c[zeros].norm() == 0.0 {
        zeros += 1;
    }
    let c = &c[zeros..];
    let mut roots = vec![Complex64::zero(); zeros];
    if c.len() == 1 {
        return Ok(roots);
    }
    let (z, converged) = aberth_f64(c, max_iter);
    if converged || backward_stable(c, &z) {
        roots.extend(z);
        Ok(roots)
    } else {
        Err(Error::Numerical(format!("root iteration did not converge for degree {}", c.len() - 1)))
    }
}

/// Aberth iteration on a polynomial with nonzero constant and leading
/// coefficients, from points on a circle of the geometric-mean root modulus.
/// Returns the last iterate and whether every correction stalled.
fn aberth_f64(c: &[Complex64], max_iter: usize) -> (Vec<Complex64>, bool) {
    let d = c.len() - 1;
    let r = (c[0].norm() / c[d].norm()).powf(1.0 / d as f64).max(1e-300);
    let mut z: Vec<Complex64> =
        (0..d).map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4)).collect();
    let mut done = vec![false; d];
    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (pv, dpv) = horner(c, z[i]);
            if pv.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = pv / dpv;
            let sum: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::one() - ratio * sum);
            if !w.re.is_finite() || !w.im.is_finite() {
                let nudge = Complex64::new(1e-8 * (1.0 + z[i].norm()), 1e-8);
                z[i] += nudge;
                all = false;
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            return (z, true);
        }
    }
    (z, false)
}

/// Every residual is small in backward-error terms.
fn backward_stable(c: &[Complex64], z: &[Complex64]) -> bool {
    let scale: f64 = c.iter().map(|x| x.norm()).sum();
    z.iter().all(|&zi| {
        let m: f64 = c.iter().rev().fold(0.0, |acc, a| acc * zi.norm() + a.norm());
        horner(c, zi).0.norm() <= 1e-10 * m.max(scale * f64::EPSILON)
    })
}

fn dd_coeffs(p: &MultiPoly) -> Vec<ComplexDd> {
    let deg = p.degree().unwrap_or(0) as usize;
    let mut out = vec![ComplexDd::default(); deg + 1];
    for (e, c) in p.terms() {
        out[e[0] as usize] = ComplexDd::from_rational(c);
    }
    out
}

fn horner_dd(c: &[ComplexDd], z: ComplexDd) -> (ComplexDd, ComplexDd) {
    let mut p = ComplexDd::default();
    let mut dp = ComplexDd::default();
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + *a;
    }
    (p, dp)
}

/// Aberth iteration in double-double from `f64` approximations. The mutual
/// repulsion keeps two approximations from settling on one root, which plain
/// Newton polishing cannot guarantee inside a root cluster.
fn aberth_dd(c: &[ComplexDd], start: &[Complex64], max_iter: usize) -> (Vec<ComplexDd>, bool) {
    let d = start.len();
    let one = ComplexDd::from_c64(Complex64::one());
    let mut z: Vec<ComplexDd> = start.iter().map(|&s| ComplexDd::from_c64(s)).collect();
    let mut done = vec![false; d];
    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (pv, dpv) = horner_dd(c, z[i]);
            if pv.norm_f64() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = pv / dpv;
            let mut sum = ComplexDd::default();
            for j in (0..d).filter(|&j| j != i) {
                sum = sum + one / (z[i] - z[j]);
            }
            let w = ratio / (one - ratio * sum);
            let wn = w.norm_f64();
            // Evaluation noise of Horner in double-double.
            let noise = 1e-31 * (d as f64 + 1.0) * c.iter().rev().fold(0.0, |acc, a| acc * z[i].norm_f64() + a.norm_f64());
            if pv.norm_f64() <= noise && wn.is_finite() {
                z[i] = z[i] - w;
                done[i] = true;
                continue;
            }
            if !wn.is_finite() {
                all = false;
                z[i] = z[i] + ComplexDd::from_c64(Complex64::new(1e-20 * (1.0 + z[i].norm_f64()), 1e-20));
                continue;
            }
            z[i] = z[i] - w;
            if wn <= 1e-28 * z[i].norm_f64().max(f64::MIN_POSITIVE) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            return (z, true);
        }
    }
    (z, false)
}

/// Coefficients (low to high) of `p(2^e t)`, divided by a power of two so
/// the largest has modulus near 1. The scaling is exact.
fn scaled_dd_coeffs(p: &MultiPoly, e: i64) -> Vec<ComplexDd> {
    let deg = p.degree().unwrap_or(0) as usize;
    let log2 = |c: &BigRational| log_abs(c) / std::f64::consts::LN_2;
    let top = p.terms().iter().map(|(k, c)| log2(c) + (k[0] as i64 * e) as f64).fold(f64::NEG_INFINITY, f64::max).round() as i64;
    let mut out = vec![ComplexDd::default(); deg + 1];
    for (k, c) in p.terms() {
        let shift = k[0] as i64 * e - top;
        let pow = BigRational::from_integer(BigInt::one() << shift.unsigned_abs());
        let v = if shift >= 0 { c * pow } else { c / pow };
        out[k[0] as usize] = ComplexDd::from_rational(&v);
    }
    out
}

/// All roots of a polynomial with double-double coefficients (low to high):
/// `f64` Aberth on a rescaled copy, then the same iteration in
/// double-double. Leading coefficients below `trim` times the largest are
/// treated as zero.
pub fn roots_dd(coeffs: &[ComplexDd], trim: f64) -> Result<Vec<ComplexDd>> {
    let max = coeffs.iter().map(|c| c.norm_f64()).fold(0.0, f64::max);
    if max == 0.0 || !max.is_finite() {
        return Ok(Vec::new());
    }
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().norm_f64() <= trim * max {
        c.pop();
    }
    let mut roots = Vec::new();
    while c.len() > 1 && c[0].norm_f64() == 0.0 {
        c.remove(0);
        roots.push(ComplexDd::default());
    }
    let d = c.len() - 1;
    if d == 0 {
        return Ok(roots);
    }
    // Rescale the variable and the values by powers of two, which is exact.
    let pow2 = |k: i64| ComplexDd::from_c64(Complex64::new((k as f64).exp2(), 0.0));
    let e = ((c[0].norm_f64().log2() - c[d].norm_f64().log2()) / d as f64).round() as i64;
    let top = (0..=d).map(|k| c[k].norm_f64().log2() + (k as i64 * e) as f64).filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max).round() as i64;
    let scaled: Vec<ComplexDd> = c.iter().enumerate().map(|(k, ck)| *ck * pow2(k as i64 * e - top)).collect();
    let c64: Vec<Complex64> = scaled.iter().map(|x| x.to_c64()).collect();
    let (z, f64_ok) = aberth_f64(&c64, 4000);
    let (z, dd_ok) = aberth_dd(&scaled, &z, 200);
    let z64: Vec<Complex64> = z.iter().map(|u| u.to_c64()).collect();
    if !dd_ok && !f64_ok && !backward_stable(&c64, &z64) {
        return Err(Error::Numerical(format!("root iteration did not converge for degree {d}")));
    }
    let s = pow2(e);
    roots.extend(z.into_iter().map(|u| u * s));
    Ok(roots)
}

/// Roots of a squarefree univariate polynomial, located in `f64` and refined
/// to double-double accuracy by simultaneous iteration on the exact
/// coefficients.
pub fn squarefree_roots(p: &MultiPoly) -> Result<Vec<Complex64>> {
    Ok(squarefree_roots_dd(p)?.into_iter().map(ComplexDd::to_c64).collect())
}

/// [`squarefree_roots`] without the final rounding to `f64`.
pub fn squarefree_roots_dd(p: &MultiPoly) -> Result<Vec<ComplexDd>> {
    require_univariate(p)?;
    if p.is_constant() {
        return Ok(Vec::new());
    }
    let mut roots = Vec::new();
    let low = p.terms().iter().map(|(k, _)| k[0]).min().unwrap_or(0);
    let p = if low > 0 {
        roots.push(ComplexDd::default());
        p.divide_exact(&MultiPoly::var(1, 0).pow(low))?
    } else {
        p.clone()
    };
    if p.is_constant() {
        return Ok(roots);
    }
    let e = root_scale(&p).log2().round() as i64;
    let cdd = scaled_dd_coeffs(&p, e);
    let c: Vec<Complex64> = cdd.iter().map(|x| x.to_c64()).collect();
    let (z, f64_ok) = aberth_f64(&c, 2000);
    let (z, dd_ok) = aberth_dd(&cdd, &z, 200);
    let z64: Vec<Complex64> = z.iter().map(|u| u.to_c64()).collect();
    if !dd_ok && !f64_ok && !backward_stable(&c, &z64) {
        return Err(Error::Numerical(format!("root iteration did not converge for degree {}", z.len())));
    }
    // Scaling by a power of two is exact.
    let s = ComplexDd::from_c64(Complex64::new((e as f64).exp2(), 0.0));
    roots.extend(z.into_iter().map(|u| u * s));
    Ok(roots)
}

/// All complex roots with exact multiplicities.
pub fn roots(p: &MultiPoly) -> Result<Vec<Root>> {
    let mut out = Vec::new();
    for (f, m) in squarefree(p)? {
        for value in squarefree_roots(&f)? {
            out.push(Root { value, multiplicity: m });
        }
    }
    Ok(out)
}

/// Best rational approximation of `x` with denominator at most `max_den`.
pub fn continued_fraction(x: f64, max_den: u64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
        if !r.is_finite() || r.abs() > 1e15 {
            break;
        }
    }
    if k1.is_zero() {
        return None;
    }
    Some(BigRational::new(h1, k1))
}

/// Rational roots of a univariate polynomial, each verified exactly.
///
/// Candidates come from the real numeric roots through continued fractions,
/// so only roots whose denominators are at most `max_den` are found.
pub fn rational_roots(p: &MultiPoly, max_den: u64) -> Result<Vec<BigRational>> {
    require_univariate(p)?;
    let mut out: Vec<BigRational> = Vec::new();
    for (f, _) in squarefree(p)? {
        // Linear factors are read off directly.
        if f.degree() == Some(1) {
            let a = f.coeff(&[1, 0, 0]);
            let b = f.coeff(&[0, 0, 0]);
            out.push(-b / a);
            continue;
        }
        for z in squarefree_roots(&f)? {
            if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
                continue;
            }
            if let Some(q) = continued_fraction(z.re, max_den) {
                if f.evaluate(std::slice::from_ref(&q))?.is_zero() && !out.contains(&q) {
                    out.push(q);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `f64` coefficient vector (low to high) of a univariate polynomial.
pub fn float_coeffs(p: &MultiPoly) -> Vec<f64> {
    let deg = p.degree().unwrap_or(0) as usize;
    let mut out = vec![0.0; deg + 1];
    for (e, c) in p.terms() {
        out[e[0] as usize] = rational_to_f64(c);
    }
    out
}

/// Double-double evaluation of a univariate polynomial at a real rational.
pub fn eval_dd_real(p: &MultiPoly, x: &BigRational) -> DoubleDouble {
    let c = dd_coeffs(p);
    horner_dd(&c, ComplexDd::from_rational(x)).0.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::scalar::rat;

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse(s, 1).unwrap()
    }

    #[test]
    fn yun_separates_multiplicities() {
        let f = p("3*(x - 1)^3*(x + 2)^2*(x^2 + 1)");
        let sf = squarefree(&f).unwrap();
        assert_eq!(sf.len(), 3);
        assert!(sf.contains(&(p("x^2 + 1"), 1)));
        assert!(sf.contains(&(p("x + 2"), 2)));
        assert!(sf.contains(&(p("x - 1"), 3)));
    }

    #[test]
    fn aberth_finds_roots_of_unity() {
        let r = squarefree_roots(&p("x^5 - 1")).unwrap();
        assert_eq!(r.len(), 5);
        for z in r {
            assert!((z.powu(5) - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn wide_range_roots() {
        let f = p("(x - 1/1000000)*(x - 1000000)*(x + 3)");
        let mut r: Vec<f64> = squarefree_roots(&f).unwrap().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((r[0] + 3.0).abs() < 1e-12);
        assert!((r[1] - 1e-6).abs() < 1e-18);
        assert!((r[2] - 1e6).abs() < 1e-6);
    }

    #[test]
    fn multiplicities_and_rational_roots() {
        let f = p("(2*x - 3)^2*(x + 5)*(x^2 - 2)");
        let rs = roots(&f).unwrap();
        assert_eq!(rs.len(), 4);
        assert_eq!(rs.iter().map(|r| r.multiplicity).sum::<u32>(), 5);
        assert_eq!(rational_roots(&f, 1 << 20).unwrap(), vec![rat(-5, 1), rat(3, 2)]);
        let g = p("(7*x + 4)*(x^2 + x + 1)*(3*x - 11)");
        assert_eq!(rational_roots(&g, 1000).unwrap(), vec![rat(-4, 7), rat(11, 3)]);
    }

    #[test]
    fn continued_fraction_recovers_small_fractions() {
        assert_eq!(continued_fraction(-0.4285714285714286, 100), Some(rat(-3, 7)));
        assert_eq!(continued_fraction(2.0, 100), Some(rat(2, 1)));
    }
}
