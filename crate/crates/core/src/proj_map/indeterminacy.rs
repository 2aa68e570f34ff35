//! Common zeros of the three components of a projective map.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ProjPoint, ProjectiveMap};
use crate::error::{Error, Result};
use crate::families::random_rational;
use crate::poly::scalar::rational_to_f64;
use crate::poly::univariate::{aberth, rational_roots, squarefree, squarefree_roots};
use crate::poly::{gcd, gcd_many, resultant, FloatPoly, MultiPoly};

/// Largest denominator tried when reading rational roots.
const MAX_DEN: u64 = 1 << 24;
/// Relative residual an approximate indeterminacy point must reach.
pub const IND_TOL: f64 = 1e-10;
const SEED: u64 = 0x1d_5eed;
const ATTEMPTS: usize = 8;

/// All points where the three components vanish together.
///
/// Points on `x0 = 0` come from the gcd of the restricted binary forms.
/// Affine points come from the resultant of two random combinations of the
/// dehomogenized components, with exact back-substitution over rational
/// abscissae and certified numerical roots elsewhere.
pub fn indeterminacy_locus(f: &ProjectiveMap) -> Result<Vec<ProjPoint>> {
    let mut out = at_infinity(f)?;
    out.extend(affine(f)?);
    out.sort_by(|a, b| a.canonical_cmp(b));
    Ok(out)
}

/// Whether a point is a common zero, exactly or within [`IND_TOL`].
pub fn is_indeterminate(f: &ProjectiveMap, p: &ProjPoint) -> Result<bool> {
    Ok(f.image(p, IND_TOL)?.is_none())
}

/// Rewrites a polynomial involving at most one variable as univariate.
pub(crate) fn univariate(p: &MultiPoly) -> MultiPoly {
    p.relabel(1, &vec![0; p.nvars()])
}

fn at_infinity(f: &ProjectiveMap) -> Result<Vec<ProjPoint>> {
    let zero = BigRational::zero();
    let restricted: Vec<MultiPoly> = f.components().iter().map(|c| c.eval_var(0, &zero)).filter(|c| !c.is_zero()).collect();
    if restricted.is_empty() {
        return Err(Error::Internal("x0 divides every component after reduction".into()));
    }
    let g = gcd_many(&restricted)?;
    let k = g.degree().unwrap_or(0);
    if k == 0 {
        return Ok(Vec::new());
    }
    // Points [0 : 1 : t], plus e2 when the form loses degree at x1 = 1.
    let t = univariate(&g.eval_var(1, &BigRational::one()));
    let mut out = Vec::new();
    if t.degree().unwrap_or(0) < k {
        out.push(ProjPoint::from_ints([0, 0, 1]));
    }
    let zero_c = Complex64::new(0.0, 0.0);
    let one_c = Complex64::new(1.0, 0.0);
    for (root, exact) in univariate_roots(&t)? {
        let p = match exact {
            Some(r) => ProjPoint::exact([BigRational::zero(), BigRational::one(), r])?,
            None => ProjPoint::approx([zero_c, one_c, root])?,
        };
        out.push(p);
    }
    Ok(out)
}

/// Distinct roots, rational ones exactly.
fn univariate_roots(p: &MultiPoly) -> Result<Vec<(Complex64, Option<BigRational>)>> {
    if p.is_constant() {
        return Ok(Vec::new());
    }
    let rational = rational_roots(p, MAX_DEN)?;
    let x = MultiPoly::var(1, 0);
    let mut rest = MultiPoly::one(1);
    for (s, _) in squarefree(p)? {
        rest = &rest * &s;
    }
    let mut out = Vec::new();
    for r in rational {
        rest = rest.divide_exact(&(&x - &MultiPoly::constant(1, r.clone())))?;
        out.push((Complex64::new(rational_to_f64(&r), 0.0), Some(r)));
    }
    out.extend(squarefree_roots(&rest)?.into_iter().map(|z| (z, None)));
    Ok(out)
}

fn affine(f: &ProjectiveMap) -> Result<Vec<ProjPoint>> {
    let h: Vec<MultiPoly> = f.affine_components().into_iter().filter(|c| !c.is_zero()).collect();
    if h.iter().any(MultiPoly::is_constant) {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..ATTEMPTS {
        let mut combo = || h.iter().fold(MultiPoly::zero(2), |acc, c| &acc + &c.scale(&random_rational(&mut rng, 9)));
        let (g1, g2) = (combo(), combo());
        if g1.is_zero() || g2.is_zero() || !gcd(&g1, &g2)?.is_constant() {
            continue;
        }
        let r = resultant(&g1, &g2, 1)?;
        if r.is_zero() {
            continue;
        }
        return back_substitute(f.components(), &h, &g1, &g2, &univariate(&r));
    }
    Err(Error::Internal("components share a curve of common zeros".into()))
}

fn back_substitute(homogeneous: &[MultiPoly], h: &[MultiPoly], g1: &MultiPoly, g2: &MultiPoly, r: &MultiPoly) -> Result<Vec<ProjPoint>> {
    let mut out = Vec::new();
    let float: Vec<FloatPoly> = homogeneous.iter().map(MultiPoly::to_float).collect();
    for (x, exact) in univariate_roots(r)? {
        match exact {
            Some(xr) => {
                let slices: Vec<MultiPoly> = h.iter().map(|c| c.eval_var(0, &xr)).filter(|c| !c.is_zero()).collect();
                if slices.is_empty() {
                    return Err(Error::Internal(format!("components share the line x = {xr}")));
                }
                let g = univariate(&gcd_many(&slices)?);
                for (y, ey) in univariate_roots(&g)? {
                    let p = match ey {
                        Some(yr) => ProjPoint::exact([BigRational::one(), xr.clone(), yr])?,
                        None => certified(&float, [Complex64::new(rational_to_f64(&xr), 0.0), y])?,
                    };
                    out.push(p);
                }
            }
            None => {
                for y in numeric_fibre(g1, x)? {
                    let z = newton(g1, g2, [x, y]);
                    if residual(&float, &z) <= IND_TOL && !out.iter().any(|p: &ProjPoint| p.same_as(&affine_point(z), 1e-8)) {
                        out.push(certified(&float, z)?);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn affine_point(z: [Complex64; 2]) -> ProjPoint {
    ProjPoint::Approx([Complex64::new(1.0, 0.0), z[0], z[1]])
}

fn certified(float: &[FloatPoly], z: [Complex64; 2]) -> Result<ProjPoint> {
    let r = residual(float, &z);
    if r > IND_TOL {
        return Err(Error::Numerical(format!("indeterminacy point residual {r:e} above {IND_TOL:e}")));
    }
    ProjPoint::approx([Complex64::new(1.0, 0.0), z[0], z[1]])
}

/// `max_i |c_i(p)| / ||c_i||_1` for the homogeneous components at the
/// max-normalized point `p = [1 : x : y]`.
fn residual(float: &[FloatPoly], z: &[Complex64; 2]) -> f64 {
    let Ok(ProjPoint::Approx(p)) = ProjPoint::approx([Complex64::new(1.0, 0.0), z[0], z[1]]) else {
        return f64::INFINITY;
    };
    float
        .iter()
        .map(|c| {
            let norm: f64 = c.terms.iter().map(|(_, a)| a.abs()).sum();
            c.eval(&p).norm() / norm.max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// Roots in `y` of `g(x, y)` at a complex abscissa.
fn numeric_fibre(g: &MultiPoly, x: Complex64) -> Result<Vec<Complex64>> {
    let coeffs: Vec<Complex64> = g.to_univariate(1).iter().map(|c| c.to_float().eval(&[x, Complex64::new(0.0, 0.0)])).collect();
    aberth(&coeffs, 500)
}

fn newton(g1: &MultiPoly, g2: &MultiPoly, mut z: [Complex64; 2]) -> [Complex64; 2] {
    let f = [g1.to_float(), g2.to_float()];
    let d = [[f[0].derivative(0), f[0].derivative(1)], [f[1].derivative(0), f[1].derivative(1)]];
    for _ in 0..20 {
        let v = [f[0].eval(&z), f[1].eval(&z)];
        let j = [[d[0][0].eval(&z), d[0][1].eval(&z)], [d[1][0].eval(&z), d[1][1].eval(&z)]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.norm() == 0.0 {
            break;
        }
        let dx = (v[0] * j[1][1] - v[1] * j[0][1]) / det;
        let dy = (j[0][0] * v[1] - j[1][0] * v[0]) / det;
        if !(dx.norm().is_finite() && dy.norm().is_finite()) {
            break;
        }
        z = [z[0] - dx, z[1] - dy];
        if dx.norm().max(dy.norm()) <= 1e-15 * (1.0 + z[0].norm().max(z[1].norm())) {
            break;
        }
    }
    z
}
