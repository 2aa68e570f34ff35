//! Polynomial gcd over the rationals.
//!
//! [`gcd`] images the inputs modulo 62-bit primes, runs Brown's dense
//! modular algorithm, lifts the lex-monic image by Chinese remaindering and
//! rational reconstruction, and accepts the candidate only after exact trial
//! division of both inputs. [`gcd_subresultant`] is the classical recursive
//! subresultant PRS and serves as an independent reference.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::modular::{gcd_p, prime, rational_reconstruct, reduce_poly, reduce_rational, MAX_PRIMES};
use super::{Exponents, MultiPoly, MAX_VARS};
use crate::error::{Error, Result};

/// Greatest common divisor, normalized to integer coefficients with gcd one
/// and a positive graded-lex leading coefficient.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
    a.check_same(b)?;
    let n = a.nvars();
    if a.is_zero() {
        return Ok(b.primitive());
    }
    if b.is_zero() {
        return Ok(a.primitive());
    }
    if a.is_constant() || b.is_constant() {
        return Ok(MultiPoly::one(n));
    }
    if a.primitive() == b.primitive() {
        return Ok(a.primitive());
    }
    let lex_lc = |f: &MultiPoly| f.terms().iter().max_by(|x, y| x.0.cmp(&y.0)).unwrap().1.clone();
    let (la, lb) = (lex_lc(a), lex_lc(b));

    // Accumulated CRT data for the current best leading monomial.
    let mut best_lm: Option<Exponents> = None;
    let mut residues: BTreeMap<Exponents, BigInt> = BTreeMap::new();
    let mut modulus = BigInt::one();
    let mut last_candidate: Option<MultiPoly> = None;

    for i in 0..MAX_PRIMES {
        let p = prime(i);
        let (Some(ap), Some(bp)) = (reduce_poly(a, p), reduce_poly(b, p)) else { continue };
        if reduce_rational(&la, p) == Some(0) || reduce_rational(&lb, p) == Some(0) {
            continue;
        }
        let g = gcd_p(&ap, &bp, n, p);
        if g.len() == 1 && g[0].0 == [0; MAX_VARS] {
            // A lucky prime with a constant image certifies coprimality.
            return Ok(MultiPoly::one(n));
        }
        let lm = g[0].0;
        match best_lm {
            Some(cur) if lm > cur => continue,
            Some(cur) if lm == cur => {
                let pb = BigInt::from(p);
                let keys: std::collections::BTreeSet<Exponents> = residues.keys().copied().chain(g.iter().map(|t| t.0)).collect();
                let image: BTreeMap<Exponents, u64> = g.iter().copied().collect();
                let inv = modulus.mod_floor(&pb).modinv(&pb).expect("distinct primes");
                for key in keys {
                    let r_old = residues.get(&key).cloned().unwrap_or_else(BigInt::zero);
                    let r_new = BigInt::from(*image.get(&key).unwrap_or(&0));
                    // x = r_old + m * ((r_new - r_old) * m^{-1} mod p)
                    let t = ((&r_new - &r_old) * &inv).mod_floor(&pb);
                    residues.insert(key, r_old + &modulus * t);
                }
                modulus *= pb;
            }
            _ => {
                best_lm = Some(lm);
                residues = g.iter().map(|&(e, c)| (e, BigInt::from(c))).collect();
                modulus = BigInt::from(p);
                last_candidate = None;
            }
        }
        let mut terms = Vec::with_capacity(residues.len());
        let mut ok = true;
        for (e, r) in &residues {
            match rational_reconstruct(r, &modulus) {
                Some(q) => {
                    if !q.is_zero() {
                        terms.push((*e, q));
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let cand = MultiPoly::from_terms(n, terms);
        // Only pay for exact verification once the reconstruction is stable.
        if last_candidate.as_ref() == Some(&cand) && cand.divides(a) && cand.divides(b) {
            return Ok(cand.primitive());
        }
        last_candidate = Some(cand);
    }
    Err(Error::Internal("modular gcd did not converge".into()))
}

/// Gcd of a list of polynomials.
pub fn gcd_many(polys: &[MultiPoly]) -> Result<MultiPoly> {
    let mut it = polys.iter();
    let first = it.next().ok_or(Error::ZeroPolynomial)?;
    let mut g = first.primitive();
    for p in it {
        if g.is_one() {
            break;
        }
        g = gcd(&g, p)?;
    }
    Ok(g)
}

/// Reference gcd by recursive subresultant pseudo-remainder sequences.
pub fn gcd_subresultant(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
    a.check_same(b)?;
    let vars: Vec<usize> = (0..a.nvars()).collect();
    Ok(prs_gcd(a, b, &vars)?.primitive())
}

fn prs_gcd(a: &MultiPoly, b: &MultiPoly, vars: &[usize]) -> Result<MultiPoly> {
    let n = a.nvars();
    if a.is_zero() {
        return Ok(b.clone());
    }
    if b.is_zero() {
        return Ok(a.clone());
    }
    // Pick the last variable that actually occurs as the main variable.
    let Some(pos) = vars.iter().rposition(|&v| a.involves(v) || b.involves(v)) else {
        return Ok(MultiPoly::one(n));
    };
    let v = vars[pos];
    let rest: Vec<usize> = vars.iter().copied().filter(|&u| u != v).collect();
    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let ca = coeff_content(&ua, &rest)?;
    let cb = coeff_content(&ub, &rest)?;
    let c = prs_gcd(&ca, &cb, &rest)?;
    let mut f: Vec<MultiPoly> = ua.iter().map(|x| x.divide_exact(&ca)).collect::<Result<_>>()?;
    let mut g: Vec<MultiPoly> = ub.iter().map(|x| x.divide_exact(&cb)).collect::<Result<_>>()?;
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    if g.len() == 1 {
        // g is free of v and primitive, hence a unit up to content.
        return Ok(c);
    }
    let mut gg = MultiPoly::one(n);
    let mut h = MultiPoly::one(n);
    loop {
        let delta = (f.len() - g.len()) as u32;
        let r = pseudo_rem(&f, &g);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return Ok(c);
        }
        let divisor = &gg * &h.pow(delta);
        let r: Vec<MultiPoly> = r.iter().map(|x| x.divide_exact(&divisor)).collect::<Result<_>>()?;
        f = std::mem::replace(&mut g, r);
        gg = f.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            gg.pow(delta).divide_exact(&h.pow(delta - 1))?
        };
    }
    let gp = coeff_content(&g, &rest)?;
    let pp: Vec<MultiPoly> = g.iter().map(|x| x.divide_exact(&gp)).collect::<Result<_>>()?;
    Ok(&c * &MultiPoly::from_univariate(n, v, &pp))
}

fn coeff_content(coeffs: &[MultiPoly], rest: &[usize]) -> Result<MultiPoly> {
    let mut g = MultiPoly::zero(coeffs[0].nvars());
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.clone() } else { prs_gcd(&g, c, rest)? };
        if g.is_constant() {
            break;
        }
    }
    Ok(g.primitive())
}

/// Pseudo-remainder of dense coefficient vectors (index = degree).
fn pseudo_rem(f: &[MultiPoly], g: &[MultiPoly]) -> Vec<MultiPoly> {
    let mut r: Vec<MultiPoly> = f.to_vec();
    let lc = g.last().unwrap();
    let dg = g.len() - 1;
    let mut steps = f.len() - g.len() + 1;
    while r.len() > dg && !r.is_empty() {
        let top = r.pop().unwrap();
        let shift = r.len() - dg;
        for x in r.iter_mut() {
            *x = &*x * lc;
        }
        for (j, gj) in g.iter().take(dg).enumerate() {
            r[shift + j] = &r[shift + j] - &(&top * gj);
        }
        steps -= 1;
        while r.last().is_some_and(|x| x.is_zero()) {
            r.pop();
        }
    }
    if steps > 0 {
        let mult = lc.pow(steps as u32);
        for x in r.iter_mut() {
            *x = &*x * &mult;
        }
    }
    r
}
