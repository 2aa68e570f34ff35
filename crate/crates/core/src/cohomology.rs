//! Lefschetz counting from integer pullback matrices.
//!
//! A [`CohomologyModel`] carries the action of a map on `H^2` of a surface
//! (the plane or a blowup of it) as an integer matrix, together with the
//! topological degree (the action on `H^4`) and a correction for intersection
//! points that are not genuine affine periodic points. The predicted count at
//! period `n` is `1 + Tr(M^n) + d_top^n - spurious(n)`.

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{self, FamilySpec, FamilyTag};
use crate::poly::scalar::int;
use crate::poly::{determinant, MultiPoly};

/// Square integer matrix, row major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: Vec<Vec<i128>>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<i128>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Degenerate("matrix must be square and nonempty".into()));
        }
        Ok(Self { rows })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()).expect("square literal")
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect() }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<i128>] {
        &self.rows
    }

    pub fn trace(&self) -> i128 {
        (0..self.size()).map(|i| self.rows[i][i]).sum()
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        let n = self.size();
        let overflow = || Error::Budget("integer matrix entries overflow".into());
        let mut rows = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0i128;
                for k in 0..n {
                    acc = acc.checked_add(self.rows[i][k].checked_mul(o.rows[k][j]).ok_or_else(overflow)?).ok_or_else(overflow)?;
                }
                rows[i][j] = acc;
            }
        }
        Ok(Self { rows })
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::identity(self.size());
        for _ in 0..k {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    fn scaled_add(&self, o: &Self, c: i128) -> Result<Self> {
        let overflow = || Error::Budget("integer matrix entries overflow".into());
        let rows = self
            .rows
            .iter()
            .zip(&o.rows)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| y.checked_mul(c).and_then(|t| x.checked_add(t)).ok_or_else(overflow))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }
}

/// Characteristic polynomial `det(xI - M)` in one variable, computed by
/// fraction-free elimination over `Z[x]`.
pub fn char_poly(m: &IntMatrix) -> MultiPoly {
    let n = m.size();
    let x = MultiPoly::var(1, 0);
    let rows: Vec<Vec<MultiPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = MultiPoly::constant(1, int(-(m.get(i, j) as i64)));
                    if i == j {
                        &x + &c
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    determinant(&rows).expect("square matrix")
}

/// Integer coefficients `c_0..c_n` (low to high) of the characteristic polynomial.
pub fn char_poly_coeffs(m: &IntMatrix) -> Vec<i128> {
    let p = char_poly(m);
    let mut out = vec![0i128; m.size() + 1];
    for (e, c) in p.terms() {
        out[e[0] as usize] = c.to_integer().to_i128().expect("small characteristic coefficients");
    }
    out
}

/// `Tr(M^k)` for `k = 1..=count`, computed by repeated multiplication and,
/// independently, by the linear recurrence of the characteristic polynomial
/// seeded with the traces of `M^0..M^{n-1}`. The two must agree.
pub fn trace_sequence(m: &IntMatrix, count: usize) -> Result<Vec<i128>> {
    let direct = traces_by_powering(m, count)?;
    let recurrent = traces_by_recurrence(m, count)?;
    if direct != recurrent {
        return Err(Error::Internal(format!("trace routes disagree: {direct:?} vs {recurrent:?}")));
    }
    Ok(direct)
}

fn traces_by_powering(m: &IntMatrix, count: usize) -> Result<Vec<i128>> {
    let mut out = Vec::with_capacity(count);
    let mut p = IntMatrix::identity(m.size());
    for _ in 0..count {
        p = p.checked_mul(m)?;
        out.push(p.trace());
    }
    Ok(out)
}

fn traces_by_recurrence(m: &IntMatrix, count: usize) -> Result<Vec<i128>> {
    let n = m.size();
    let c = char_poly_coeffs(m);
    // t[k] = Tr(M^k); seed t[0..n) from explicit powers.
    let mut t: Vec<i128> = Vec::with_capacity(count + 1);
    let mut p = IntMatrix::identity(n);
    for _ in 0..n.min(count + 1) {
        t.push(p.trace());
        p = p.checked_mul(m)?;
    }
    while t.len() <= count {
        let k = t.len();
        // M^n = -sum_{i<n} c_i M^i, so t[k] = -sum_i c_i t[k - n + i].
        let mut acc = 0i128;
        for i in 0..n {
            acc = c[i]
                .checked_mul(t[k - n + i])
                .and_then(|v| acc.checked_sub(v))
                .ok_or_else(|| Error::Budget("trace recurrence overflow".into()))?;
        }
        t.push(acc);
    }
    Ok(t[1..=count].to_vec())
}

/// Evaluates `p(M)` for an integer polynomial `p` given low to high.
pub fn eval_matrix_poly(coeffs: &[i128], m: &IntMatrix) -> Result<IntMatrix> {
    let n = m.size();
    let mut acc = IntMatrix::new(vec![vec![0; n]; n])?;
    for &c in coeffs.iter().rev() {
        acc = acc.checked_mul(m)?.scaled_add(&IntMatrix::identity(n), c)?;
    }
    Ok(acc)
}

/// Period-dependent count of intersection points that are not genuine affine
/// periodic points: `constant + power_base^n` when a base is present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpuriousCorrection {
    pub constant: i128,
    pub power_base: Option<i128>,
}

impl SpuriousCorrection {
    pub fn constant(c: i128) -> Self {
        Self { constant: c, power_base: None }
    }

    pub fn at(&self, n: u32) -> Result<i128> {
        let p = match self.power_base {
            None => 0,
            Some(b) => b.checked_pow(n).ok_or_else(|| Error::Budget("spurious term overflow".into()))?,
        };
        Ok(self.constant + p)
    }
}

/// Pullback data for one family on one surface, valid for a range of periods.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohomologyModel {
    pub surface: String,
    pub basis: Vec<String>,
    pub matrix: IntMatrix,
    pub d_top: i128,
    pub spurious: SpuriousCorrection,
    pub min_period: u32,
    pub max_period: Option<u32>,
    pub caveat: String,
}

impl CohomologyModel {
    pub fn new(surface: &str, basis: &[&str], matrix: IntMatrix, d_top: i128, spurious: SpuriousCorrection) -> Result<Self> {
        if matrix.size() != basis.len() {
            return Err(Error::Degenerate(format!("basis has {} labels, matrix is {}x{}", basis.len(), matrix.size(), matrix.size())));
        }
        if d_top < 1 {
            return Err(Error::Degenerate("topological degree must be positive".into()));
        }
        Ok(Self {
            surface: surface.to_string(),
            basis: basis.iter().map(|s| s.to_string()).collect(),
            matrix,
            d_top,
            spurious,
            min_period: 1,
            max_period: None,
            caveat: GENERIC_CAVEAT.to_string(),
        })
    }

    pub fn periods(mut self, min: u32, max: Option<u32>) -> Self {
        self.min_period = min;
        self.max_period = max;
        self
    }

    pub fn with_caveat(mut self, caveat: &str) -> Self {
        self.caveat = caveat.to_string();
        self
    }

    pub fn covers(&self, n: u32) -> bool {
        n >= self.min_period && self.max_period.is_none_or(|m| n <= m)
    }

    /// Coefficient of `H` in the pullback of `H`, the algebraic degree.
    pub fn algebraic_degree(&self) -> i128 {
        self.matrix.get(0, 0)
    }
}

pub const GENERIC_CAVEAT: &str = "equality for generic parameters; upper bound otherwise";

/// `1 + Tr(M^n) + d_top^n`.
pub fn lefschetz_number(model: &CohomologyModel, n: u32) -> Result<i128> {
    if n == 0 {
        return Err(Error::Degenerate("period must be at least 1".into()));
    }
    let tr = model.matrix.pow(n)?.trace();
    let top = model.d_top.checked_pow(n).ok_or_else(|| Error::Budget("d_top^n overflow".into()))?;
    Ok(1 + tr + top)
}

/// Predicted count at one period with its bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountPrediction {
    pub n: u32,
    pub surface: String,
    pub lefschetz: i128,
    pub spurious: i128,
    pub predicted: i128,
    pub closed_form: Option<i128>,
    pub caveat: String,
    pub non_isolated_warning: bool,
}

/// Lefschetz-minus-spurious count for a model at period `n`.
pub fn predict_from_model(model: &CohomologyModel, n: u32) -> Result<CountPrediction> {
    let lefschetz = lefschetz_number(model, n)?;
    let spurious = model.spurious.at(n)?;
    Ok(CountPrediction {
        n,
        surface: model.surface.clone(),
        lefschetz,
        spurious,
        predicted: lefschetz - spurious,
        closed_form: None,
        caveat: model.caveat.clone(),
        non_isolated_warning: false,
    })
}

/// Prediction for a built family at period `n` from its registered model,
/// cross-checked against the family's closed form.
pub fn predicted_count(spec: &FamilySpec, n: u32) -> Result<CountPrediction> {
    let models = families::models(spec);
    let model = models
        .iter()
        .find(|m| m.covers(n))
        .ok_or_else(|| Error::Unknown(format!("{}: no cohomology model registered for period {n}", spec.tag)))?;
    let mut p = predict_from_model(model, n)?;
    let c = closed_form(spec, n)?;
    if c != p.predicted {
        return Err(Error::Internal(format!("{} at n={n}: Lefschetz count {} but closed form {c}", spec.tag, p.predicted)));
    }
    p.closed_form = Some(c);
    p.non_isolated_warning = families::non_isolated_warning(spec.tag);
    Ok(p)
}

/// Predictions for `lo..=hi`.
pub fn prediction_table(spec: &FamilySpec, lo: u32, hi: u32) -> Result<Vec<CountPrediction>> {
    (lo..=hi).map(|n| predicted_count(spec, n)).collect()
}

/// Closed-form count per family, evaluated from integer recurrences only.
pub fn closed_form(spec: &FamilySpec, n: u32) -> Result<i128> {
    use sequences::*;
    if n == 0 {
        return Err(Error::Degenerate("period must be at least 1".into()));
    }
    let pow = |b: i128, e: u32| b.checked_pow(e).ok_or_else(|| Error::Budget(format!("{b}^{e} overflows")));
    Ok(match spec.tag {
        FamilyTag::LinfracGeneral | FamilyTag::HostParasite if n == 1 => 2,
        FamilyTag::LinfracGeneral | FamilyTag::HostParasite => linfrac_bound(n),
        FamilyTag::LinfracSpecial => phi(n) + 2,
        FamilyTag::SiModel | FamilyTag::SiModelLambda => 2 * pow(2, n)? - 2,
        FamilyTag::Competitive => pow(3, n)? + pow(4, n)? - 3,
        FamilyTag::RationalPlanar => pow(2, n + 1)?,
        FamilyTag::HomogeneousD => pow(families::expected_degrees(spec).0 as i128, 2 * n)?,
    })
}

/// Integer sequences used by the closed-form counts, computed from their
/// defining recurrences without any matrix.
pub mod sequences {
    /// Fibonacci numbers with `F_{-1} = 1`, `F_0 = 0`, `F_1 = 1`.
    pub fn fib(n: i64) -> i128 {
        if n == -1 {
            return 1;
        }
        assert!(n >= 0, "fib defined from -1");
        let (mut a, mut b) = (0i128, 1i128);
        for _ in 0..n {
            (a, b) = (b, a + b);
        }
        a
    }

    /// `phi_{n+3} = phi_{n+1} + phi_n` with `phi_0 = 3`, `phi_1 = 0`, `phi_2 = 2`.
    pub fn phi(n: u32) -> i128 {
        let mut v = vec![3i128, 0, 2];
        while v.len() <= n as usize {
            let k = v.len();
            v.push(v[k - 2] + v[k - 3]);
        }
        v[n as usize]
    }

    /// `F_{n+1} + F_{n-1}`, the bound for the general linear fractional recurrence.
    pub fn linfrac_bound(n: u32) -> i128 {
        fib(n as i64 + 1) + fib(n as i64 - 1)
    }

    /// `tau_{n+2} = 3 tau_{n+1} - 2 tau_n` with `tau_1 = 3`, `tau_2 = 5`.
    pub fn tau(n: u32) -> i128 {
        assert!(n >= 1);
        let (mut a, mut b) = (3i128, 5i128);
        for _ in 1..n {
            (a, b) = (b, 3 * b - 2 * a);
        }
        a
    }
}

/// Whether a characteristic polynomial annihilates its matrix.
pub fn cayley_hamilton_holds(m: &IntMatrix) -> Result<bool> {
    let c = char_poly_coeffs(m);
    let z = eval_matrix_poly(&c, m)?;
    Ok(z.rows().iter().all(|r| r.iter().all(|x| x.is_zero())))
}

#[cfg(test)]
mod tests {
    use super::sequences::*;
    use super::*;

    fn fx() -> IntMatrix {
        IntMatrix::from_i64(&[&[2, 1, 1], &[-1, -1, 0], &[-1, -1, -1]])
    }

    #[test]
    fn characteristic_polynomials() {
        assert_eq!(char_poly(&fx()), MultiPoly::parse("x^3 - x - 1", 1).unwrap());
        let z = IntMatrix::from_i64(&[&[3, 1, 1], &[-1, 0, 0], &[-1, 0, 0]]);
        assert_eq!(char_poly(&z), MultiPoly::parse("x*(x^2 - 3*x + 2)", 1).unwrap());
        let y = IntMatrix::from_i64(&[&[2, 1], &[-1, -1]]);
        assert_eq!(char_poly(&y), MultiPoly::parse("x^2 - x - 1", 1).unwrap());
        for m in [fx(), z, y] {
            assert!(cayley_hamilton_holds(&m).unwrap());
        }
    }

    #[test]
    fn trace_routes_agree() {
        assert_eq!(trace_sequence(&fx(), 8).unwrap(), vec![0, 2, 3, 2, 5, 5, 7, 10]);
        let y = IntMatrix::from_i64(&[&[2, 1], &[-1, -1]]);
        assert_eq!(trace_sequence(&y, 5).unwrap(), vec![1, 3, 4, 7, 11]);
        assert!(trace_sequence(&IntMatrix::from_i64(&[&[4]]), 30).is_ok());
    }

    #[test]
    fn sequences_follow_their_recurrences() {
        assert_eq!((0..9).map(phi).collect::<Vec<_>>(), vec![3, 0, 2, 3, 2, 5, 5, 7, 10]);
        assert_eq!((1..5).map(tau).collect::<Vec<_>>(), vec![3, 5, 9, 17]);
        assert_eq!((-1..7).map(fib).collect::<Vec<_>>(), vec![1, 0, 1, 1, 2, 3, 5, 8]);
    }

    #[test]
    fn lefschetz_on_the_plane() {
        for d in 1..5i128 {
            let m = CohomologyModel::new("P2", &["H"], IntMatrix::new(vec![vec![d]]).unwrap(), d * d, SpuriousCorrection::constant(0)).unwrap();
            assert_eq!(lefschetz_number(&m, 1).unwrap(), 1 + d + d * d);
        }
    }

    #[test]
    fn predictions_match_closed_forms() {
        use crate::families::{build, int_params};
        let si = build(FamilyTag::SiModel, int_params(&[("alpha", 2)])).unwrap();
        let t: Vec<i128> = prediction_table(&si, 1, 3).unwrap().iter().map(|p| p.predicted).collect();
        assert_eq!(t, vec![2, 6, 14]);
        assert!(predicted_count(&si, 1).unwrap().non_isolated_warning);
        let lin = build(FamilyTag::LinfracSpecial, int_params(&[("a", 2), ("b", 3)])).unwrap();
        let t: Vec<i128> = prediction_table(&lin, 1, 3).unwrap().iter().map(|p| p.predicted).collect();
        assert_eq!(t, vec![2, 4, 5]);
        let gen = build(FamilyTag::LinfracGeneral, int_params(&[("a0", 1), ("a1", 2), ("a2", 3), ("b0", 5), ("b1", 7), ("b2", 11)])).unwrap();
        assert_eq!(predicted_count(&gen, 1).unwrap().surface, "P2");
        assert_eq!(predicted_count(&gen, 4).unwrap().predicted, 7);
    }

    #[test]
    fn model_shape_is_checked() {
        assert!(CohomologyModel::new("X", &["H", "E1"], fx(), 1, SpuriousCorrection::constant(0)).is_err());
        assert!(IntMatrix::new(vec![vec![1, 2]]).is_err());
    }
}
