//! Damped Newton refinement for square bivariate systems, in `f64` with a
//! double-double fallback against the exact coefficients.

use num_complex::Complex64;

use crate::poly::scalar::ComplexDd;
use crate::poly::{FloatPoly, MultiPoly};

/// `P`, `Q` and their partial derivatives, exact and floating.
pub(crate) struct System {
    dd: [DdPoly; 2],
    dd_d: [[DdPoly; 2]; 2],
    float: [FloatPoly; 2],
    float_d: [[FloatPoly; 2]; 2],
    norms: [f64; 2],
}

/// Outcome of one refinement.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Refined {
    pub point: [Complex64; 2],
    /// `max_i |P_i(z)| / (sum_e |c_e z^e| + ||P_i||_1)`: a backward error that
    /// stays meaningful where all terms vanish.
    pub residual: f64,
    /// `|det J|` relative to the product of the row norms of `J`.
    pub conditioning: f64,
    /// Size of the final Newton correction relative to `1 + |z|`.
    pub last_step: f64,
}

impl System {
    pub fn new(p: &MultiPoly, q: &MultiPoly) -> Self {
        let exact_d = [[p.derivative(0), p.derivative(1)], [q.derivative(0), q.derivative(1)]];
        let float = [p.to_float(), q.to_float()];
        let float_d = [
            [exact_d[0][0].to_float(), exact_d[0][1].to_float()],
            [exact_d[1][0].to_float(), exact_d[1][1].to_float()],
        ];
        let norm = |f: &FloatPoly| f.terms.iter().map(|(_, c)| c.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
        let norms = [norm(&float[0]), norm(&float[1])];
        let dd = [DdPoly::new(p), DdPoly::new(q)];
        let dd_d = exact_d.each_ref().map(|r| r.each_ref().map(DdPoly::new));
        Self { dd, dd_d, float, float_d, norms }
    }

    pub fn residual(&self, z: &[Complex64; 2]) -> f64 {
        (0..2)
            .map(|i| {
                let (v, terms) = self.float[i].eval_with_scale(z);
                v.norm() / (terms + self.norms[i])
            })
            .fold(0.0, f64::max)
    }

    fn jacobian(&self, z: &[Complex64; 2]) -> [[Complex64; 2]; 2] {
        let j = |r: usize, c: usize| self.float_d[r][c].eval(z);
        [[j(0, 0), j(0, 1)], [j(1, 0), j(1, 1)]]
    }

    pub fn conditioning(&self, z: &[Complex64; 2]) -> f64 {
        let j = self.jacobian(z);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let r0 = (j[0][0].norm_sqr() + j[0][1].norm_sqr()).sqrt();
        let r1 = (j[1][0].norm_sqr() + j[1][1].norm_sqr()).sqrt();
        if r0 == 0.0 || r1 == 0.0 { 0.0 } else { det.norm() / (r0 * r1) }
    }

    fn step(&self, z: &[Complex64; 2]) -> Option<[Complex64; 2]> {
        let f = [self.float[0].eval(z), self.float[1].eval(z)];
        let j = self.jacobian(z);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.norm() == 0.0 || !det.re.is_finite() {
            return None;
        }
        let dx = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
        let dy = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        (dx.re.is_finite() && dx.im.is_finite() && dy.re.is_finite() && dy.im.is_finite()).then_some([dx, dy])
    }

    /// Damped Newton in `f64`: each step is halved until the residual does
    /// not grow. Runs until the correction stalls at rounding level.
    pub fn refine_f64(&self, start: [Complex64; 2], max_iter: usize) -> Refined {
        let mut z = start;
        let mut r = self.residual(&z);
        let mut last = if r == 0.0 { 0.0 } else { f64::INFINITY };
        for _ in 0..max_iter {
            if r == 0.0 {
                break;
            }
            let Some(d) = self.step(&z) else { break };
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..12 {
                let cand = [z[0] - d[0] * t, z[1] - d[1] * t];
                let rc = self.residual(&cand);
                if rc <= r {
                    accepted = Some((cand, rc, t * d[0].norm().max(d[1].norm())));
                    break;
                }
                t *= 0.5;
            }
            let Some((cand, rc, size)) = accepted else { break };
            z = cand;
            r = rc;
            last = size / (1.0 + z[0].norm().max(z[1].norm()));
            if r == 0.0 {
                last = 0.0;
            }
            if last <= 1e-15 {
                break;
            }
        }
        Refined { point: z, residual: r, conditioning: self.conditioning(&z), last_step: last }
    }

    /// Plain Newton in double-double on the exact coefficients.
    pub fn refine_dd(&self, start: [Complex64; 2], iters: usize) -> Refined {
        let mut z = [ComplexDd::from_c64(start[0]), ComplexDd::from_c64(start[1])];
        let mut last = f64::INFINITY;
        for _ in 0..iters {
            let f = [self.dd[0].eval(&z), self.dd[1].eval(&z)];
            let j = [[self.dd_d[0][0].eval(&z), self.dd_d[0][1].eval(&z)], [self.dd_d[1][0].eval(&z), self.dd_d[1][1].eval(&z)]];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.norm_f64() == 0.0 || !det.norm_f64().is_finite() {
                break;
            }
            let dx = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
            let dy = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
            if !dx.norm_f64().is_finite() || !dy.norm_f64().is_finite() {
                break;
            }
            z = [z[0] - dx, z[1] - dy];
            last = dx.norm_f64().max(dy.norm_f64()) / (1.0 + z[0].norm_f64().max(z[1].norm_f64()));
            if last <= 1e-30 {
                break;
            }
        }
        let p = [z[0].to_c64(), z[1].to_c64()];
        Refined { point: p, residual: self.residual(&p), conditioning: self.conditioning(&p), last_step: last }
    }

    /// `f64` refinement, then double-double if the result is not converged
    /// and `precision` asks for more than 53 bits.
    pub fn refine(&self, start: [Complex64; 2], tol: f64, precision: u32) -> Refined {
        let r = self.refine_f64(start, 80);
        if r.converged(tol) || precision <= 53 {
            return r;
        }
        let d = self.refine_dd(r.point, 16);
        if d.converged(tol) || d.residual < r.residual { d } else { r }
    }
}

impl Refined {
    /// Small residual and a vanishing final correction.
    pub fn converged(&self, tol: f64) -> bool {
        self.residual <= tol && self.last_step <= 1e-9
    }
}

/// A polynomial with double-double coefficients, converted once.
struct DdPoly {
    terms: Vec<([u32; 3], ComplexDd)>,
}

impl DdPoly {
    fn new(p: &MultiPoly) -> Self {
        Self { terms: p.terms().iter().map(|(e, c)| (*e, ComplexDd::from_rational(c))).collect() }
    }

    fn eval(&self, z: &[ComplexDd; 2]) -> ComplexDd {
        let mut acc = ComplexDd::default();
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, zi) in z.iter().enumerate() {
                for _ in 0..e[i] {
                    t = t * *zi;
                }
            }
            acc = acc + t;
        }
        acc
    }
}
