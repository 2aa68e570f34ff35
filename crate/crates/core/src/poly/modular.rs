//! Arithmetic modulo word-size primes and Brown's dense modular gcd.
//!
//! Polynomials here are sparse lists of `(exponents, residue)` pairs. The
//! recursion evaluates the last active variable at successive points,
//! computes gcds of the images, and interpolates; images whose lex-leading
//! monomial is too large are unlucky and discarded.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Exponents, MultiPoly, MAX_VARS};

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes just below 2^62, largest first.
pub(crate) fn prime(i: usize) -> u64 {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    let primes = PRIMES.get_or_init(|| {
        let mut v = Vec::with_capacity(MAX_PRIMES);
        let mut n = (1u64 << 62) - 1;
        while v.len() < MAX_PRIMES {
            if is_prime(n) {
                v.push(n);
            }
            n -= 2;
        }
        v
    });
    primes[i]
}

pub(crate) const MAX_PRIMES: usize = 256;

pub(crate) fn reduce_rational(r: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = r.denom().mod_floor(&pb).to_u64().unwrap();
    if den == 0 {
        return None;
    }
    let num = r.numer().mod_floor(&pb).to_u64().unwrap();
    Some(mul_mod(num, inv_mod(den, p), p))
}

/// Sparse polynomial mod p, sorted in descending lex order, no zero entries.
pub(crate) type PPoly = Vec<(Exponents, u64)>;

pub(crate) fn reduce_poly(f: &MultiPoly, p: u64) -> Option<PPoly> {
    let mut out = Vec::with_capacity(f.len());
    for (e, c) in f.terms() {
        let r = reduce_rational(c, p)?;
        if r != 0 {
            out.push((*e, r));
        }
    }
    out.sort_by(|a, b| b.0.cmp(&a.0));
    Some(out)
}

// ---------- dense univariate helpers (coefficients low to high) ----------

type UPoly = Vec<u64>;

fn trim(a: &mut UPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn u_eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| add_mod(mul_mod(acc, x, p), c, p))
}

fn u_mul(a: &[u64], b: &[u64], p: u64) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
        }
    }
    trim(&mut out);
    out
}

fn u_scale(a: &[u64], c: u64, p: u64) -> UPoly {
    let mut out: UPoly = a.iter().map(|&x| mul_mod(x, c, p)).collect();
    trim(&mut out);
    out
}

fn u_add(a: &[u64], b: &[u64], p: u64) -> UPoly {
    let n = a.len().max(b.len());
    let mut out: UPoly = (0..n)
        .map(|i| add_mod(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0), p))
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder.
fn u_divrem(a: &[u64], b: &[u64], p: u64) -> (UPoly, UPoly) {
    let mut r: UPoly = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = inv_mod(*b.last().unwrap(), p);
    let mut q = vec![0; r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = mul_mod(*r.last().unwrap(), inv, p);
        q[shift] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[shift + j] = sub_mod(r[shift + j], mul_mod(c, bj, p), p);
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

fn u_monic(a: &[u64], p: u64) -> UPoly {
    match a.last() {
        None => Vec::new(),
        Some(&lc) => u_scale(a, inv_mod(lc, p), p),
    }
}

fn u_gcd(a: &[u64], b: &[u64], p: u64) -> UPoly {
    let mut a: UPoly = a.to_vec();
    let mut b: UPoly = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let (_, r) = u_divrem(&a, &b, p);
        a = b;
        b = r;
    }
    u_monic(&a, p)
}

fn u_deg(a: &[u64]) -> usize {
    a.len().saturating_sub(1)
}

// ---------- sparse multivariate mod p ----------

fn is_constant(f: &PPoly) -> bool {
    f.len() == 1 && f[0].0 == [0; MAX_VARS]
}

fn monic(f: &PPoly, p: u64) -> PPoly {
    match f.first() {
        None => Vec::new(),
        Some(&(_, lc)) => {
            let inv = inv_mod(lc, p);
            f.iter().map(|&(e, c)| (e, mul_mod(c, inv, p))).collect()
        }
    }
}

/// Splits into coefficients of main monomials (variable `v` zeroed) as
/// dense polynomials in `v`.
fn split(f: &PPoly, v: usize) -> BTreeMap<Exponents, UPoly> {
    let mut out: BTreeMap<Exponents, UPoly> = BTreeMap::new();
    for &(e, c) in f {
        let mut key = e;
        key[v] = 0;
        let slot = out.entry(key).or_default();
        let k = e[v] as usize;
        if slot.len() <= k {
            slot.resize(k + 1, 0);
        }
        slot[k] = c;
    }
    out
}

fn join(m: &BTreeMap<Exponents, UPoly>, v: usize) -> PPoly {
    let mut out = Vec::new();
    for (key, u) in m {
        for (k, &c) in u.iter().enumerate() {
            if c != 0 {
                let mut e = *key;
                e[v] = k as u32;
                out.push((e, c));
            }
        }
    }
    out.sort_by(|a, b| b.0.cmp(&a.0));
    out
}

fn content(m: &BTreeMap<Exponents, UPoly>, p: u64) -> UPoly {
    let mut g: UPoly = Vec::new();
    for u in m.values() {
        g = u_gcd(&g, u, p);
        if g.len() == 1 {
            break;
        }
    }
    g
}

fn divide_content(m: &mut BTreeMap<Exponents, UPoly>, c: &[u64], p: u64) {
    for u in m.values_mut() {
        let (q, r) = u_divrem(u, c, p);
        debug_assert!(r.is_empty());
        *u = q;
    }
}

fn eval_split(m: &BTreeMap<Exponents, UPoly>, x: u64, p: u64) -> PPoly {
    let mut out: PPoly = m
        .iter()
        .map(|(e, u)| (*e, u_eval(u, x, p)))
        .filter(|&(_, c)| c != 0)
        .collect();
    out.sort_by(|a, b| b.0.cmp(&a.0));
    out
}

/// Does `d` (monic in lex) divide `f` exactly?
fn divides(d: &PPoly, f: &PPoly, p: u64) -> bool {
    if d.is_empty() {
        return f.is_empty();
    }
    let (dlm, dlc) = d[0];
    let inv = inv_mod(dlc, p);
    let mut rem: BTreeMap<Exponents, u64> = f.iter().copied().collect();
    while let Some((&m, &c)) = rem.iter().next_back() {
        if !(0..MAX_VARS).all(|i| dlm[i] <= m[i]) {
            return false;
        }
        let q = mul_mod(c, inv, p);
        let qe = [m[0] - dlm[0], m[1] - dlm[1], m[2] - dlm[2]];
        for &(de, dc) in d {
            let key = [de[0] + qe[0], de[1] + qe[1], de[2] + qe[2]];
            let cur = rem.get(&key).copied().unwrap_or(0);
            let next = sub_mod(cur, mul_mod(q, dc, p), p);
            if next == 0 {
                rem.remove(&key);
            } else {
                rem.insert(key, next);
            }
        }
    }
    true
}

/// Monic (lex) gcd of `a` and `b` in `F_p[x_0..x_{k-1}]`.
pub(crate) fn gcd_p(a: &PPoly, b: &PPoly, k: usize, p: u64) -> PPoly {
    if a.is_empty() {
        return monic(b, p);
    }
    if b.is_empty() {
        return monic(a, p);
    }
    if is_constant(a) || is_constant(b) {
        return vec![([0; MAX_VARS], 1)];
    }
    let v = k - 1;
    if k == 1 {
        let ua = split(a, 0).remove(&[0; MAX_VARS]).unwrap_or_default();
        let ub = split(b, 0).remove(&[0; MAX_VARS]).unwrap_or_default();
        let g = u_gcd(&ua, &ub, p);
        let mut m = BTreeMap::new();
        m.insert([0; MAX_VARS], g);
        return join(&m, 0);
    }
    let mut am = split(a, v);
    let mut bm = split(b, v);
    let ca = content(&am, p);
    let cb = content(&bm, p);
    let c = u_gcd(&ca, &cb, p);
    divide_content(&mut am, &ca, p);
    divide_content(&mut bm, &cb, p);
    // Lex-leading coefficients, as polynomials in v.
    let la = am.iter().next_back().unwrap().1.clone();
    let lb = bm.iter().next_back().unwrap().1.clone();
    let g = u_gcd(&la, &lb, p);
    let deg_a = am.values().map(|u| u_deg(u)).max().unwrap();
    let deg_b = bm.values().map(|u| u_deg(u)).max().unwrap();
    let bound = deg_a.min(deg_b) + u_deg(&g);
    let a_pp = join(&am, v);
    let b_pp = join(&bm, v);

    let with_content = |cm: BTreeMap<Exponents, UPoly>| -> PPoly {
        let scaled: BTreeMap<Exponents, UPoly> = cm.into_iter().map(|(e, u)| (e, u_mul(&u, &c, p))).collect();
        monic(&join(&scaled, v), p)
    };

    let mut point: u64 = 0;
    let mut restarts = 0;
    'restart: loop {
        let mut h: BTreeMap<Exponents, UPoly> = BTreeMap::new();
        let mut h_lm: Option<Exponents> = None;
        let mut q: UPoly = vec![1];
        let mut npts = 0usize;
        loop {
            point += 1;
            let x = point % p;
            let gx = u_eval(&g, x, p);
            if gx == 0 || u_eval(&la, x, p) == 0 || u_eval(&lb, x, p) == 0 {
                continue;
            }
            let ax = eval_split(&am, x, p);
            let bx = eval_split(&bm, x, p);
            let cx = gcd_p(&ax, &bx, k - 1, p);
            if is_constant(&cx) {
                let mut m = BTreeMap::new();
                m.insert([0; MAX_VARS], vec![1]);
                return with_content(m);
            }
            let lm = cx[0].0;
            match h_lm {
                Some(cur) if lm > cur => continue,
                Some(cur) if lm < cur => {
                    h.clear();
                    q = vec![1];
                    npts = 0;
                    h_lm = Some(lm);
                }
                None => h_lm = Some(lm),
                _ => {}
            }
            // Newton interpolation step: H += (gx*cx - H(x)) / q(x) * q.
            let qinv = inv_mod(u_eval(&q, x, p), p);
            let mut img: BTreeMap<Exponents, u64> = cx.iter().map(|&(e, c)| (e, mul_mod(c, gx, p))).collect();
            let keys: std::collections::BTreeSet<Exponents> = h.keys().copied().chain(img.keys().copied()).collect();
            for key in keys {
                let target = img.remove(&key).unwrap_or(0);
                let cur = h.get(&key).map(|u| u_eval(u, x, p)).unwrap_or(0);
                let delta = mul_mod(sub_mod(target, cur, p), qinv, p);
                if delta != 0 {
                    let upd = u_scale(&q, delta, p);
                    let slot = h.entry(key).or_default();
                    *slot = u_add(slot, &upd, p);
                }
            }
            h.retain(|_, u| !u.is_empty());
            q = u_mul(&q, &[sub_mod(0, x, p), 1], p);
            npts += 1;
            if npts > bound {
                let mut cm = h.clone();
                let cc = content(&cm, p);
                divide_content(&mut cm, &cc, p);
                let cand = monic(&join(&cm, v), p);
                if divides(&cand, &a_pp, p) && divides(&cand, &b_pp, p) {
                    return with_content(cm);
                }
                restarts += 1;
                assert!(restarts < 64, "modular gcd failed to stabilize");
                continue 'restart;
            }
        }
    }
}

/// Rational reconstruction of `a mod m` with both parts bounded by sqrt(m/2).
pub(crate) fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}
