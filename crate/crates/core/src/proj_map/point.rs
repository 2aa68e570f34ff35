use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::scalar::{format_rational, parse_rational, rational_to_f64, ComplexApprox};

/// A point of the projective plane. Exact points have first nonzero
/// coordinate 1; approximate points have largest-modulus coordinate 1.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjPoint {
    Exact([BigRational; 3]),
    Approx([Complex64; 3]),
}

impl ProjPoint {
    pub fn exact(c: [BigRational; 3]) -> Result<Self> {
        let k = c.iter().position(|x| !x.is_zero()).ok_or_else(|| Error::Degenerate("all coordinates zero".into()))?;
        let s = c[k].recip();
        Ok(ProjPoint::Exact(c.map(|x| x * &s)))
    }

    pub fn approx(c: [Complex64; 3]) -> Result<Self> {
        if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("non-finite coordinate".into()));
        }
        let k = (0..3).max_by(|&i, &j| c[i].norm().partial_cmp(&c[j].norm()).unwrap()).unwrap();
        if c[k].norm() == 0.0 {
            return Err(Error::Degenerate("all coordinates zero".into()));
        }
        let s = c[k];
        let mut out = c.map(|z| z / s);
        out[k] = Complex64::one();
        Ok(ProjPoint::Approx(out))
    }

    pub fn from_ints(c: [i64; 3]) -> Self {
        Self::exact(c.map(|v| BigRational::from_integer(v.into()))).expect("nonzero literal")
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ProjPoint::Exact(_))
    }

    pub fn to_complex(&self) -> [Complex64; 3] {
        match self {
            ProjPoint::Exact(c) => c.clone().map(|x| Complex64::new(rational_to_f64(&x), 0.0)),
            ProjPoint::Approx(c) => *c,
        }
    }

    /// Same point of the plane: exact equality for two exact points,
    /// otherwise agreement of the max-normalized coordinates within `tol`.
    pub fn same_as(&self, o: &ProjPoint, tol: f64) -> bool {
        if let (ProjPoint::Exact(a), ProjPoint::Exact(b)) = (self, o) {
            return a == b;
        }
        let a = ProjPoint::approx(self.to_complex());
        let b = ProjPoint::approx(o.to_complex());
        match (a, b) {
            (Ok(ProjPoint::Approx(a)), Ok(ProjPoint::Approx(b))) => (0..3).all(|i| (a[i] - b[i]).norm() <= tol),
            _ => false,
        }
    }

    /// Deterministic ordering: exact points first, then by coordinates.
    pub fn canonical_cmp(&self, o: &ProjPoint) -> Ordering {
        match (self, o) {
            (ProjPoint::Exact(a), ProjPoint::Exact(b)) => a.cmp(b),
            (ProjPoint::Exact(_), _) => Ordering::Less,
            (_, ProjPoint::Exact(_)) => Ordering::Greater,
            (ProjPoint::Approx(a), ProjPoint::Approx(b)) => {
                let key = |c: &[Complex64; 3]| c.map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64));
                key(a).cmp(&key(b))
            }
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Exact(c) => write!(f, "[{}:{}:{}]", format_rational(&c[0]), format_rational(&c[1]), format_rational(&c[2])),
            ProjPoint::Approx(c) => {
                let s: Vec<String> = c.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
                write!(f, "[{}]", s.join(":"))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PointRepr {
    Exact([String; 3]),
    Approx([ComplexApprox; 3]),
}

impl Serialize for ProjPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let r = match self {
            ProjPoint::Exact(c) => PointRepr::Exact(c.clone().map(|x| format_rational(&x))),
            ProjPoint::Approx(c) => {
                let v: Vec<ComplexApprox> = c.iter().map(|&z| ComplexApprox::new(z)).collect::<Result<_>>().map_err(serde::ser::Error::custom)?;
                PointRepr::Approx(v.try_into().unwrap())
            }
        };
        r.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match PointRepr::deserialize(d)? {
            PointRepr::Exact(c) => {
                let v: Vec<BigRational> = c.iter().map(|s| parse_rational(s)).collect::<Result<_>>().map_err(serde::de::Error::custom)?;
                Ok(ProjPoint::Exact(v.try_into().unwrap()))
            }
            PointRepr::Approx(c) => Ok(ProjPoint::Approx(c.map(|z| z.value()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::scalar::rat;

    #[test]
    fn normalization_is_idempotent() {
        let p = ProjPoint::exact([rat(0, 1), rat(2, 3), rat(-2, 3)]).unwrap();
        assert_eq!(p, ProjPoint::from_ints([0, 1, -1]));
        if let ProjPoint::Exact(c) = &p {
            assert_eq!(ProjPoint::exact(c.clone()).unwrap(), p);
        }
        let q = ProjPoint::approx([Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(-4.0, 0.0)]).unwrap();
        assert!(q.same_as(&ProjPoint::from_ints([0, 1, -2]), 1e-12));
        assert!(ProjPoint::exact([rat(0, 1), rat(0, 1), rat(0, 1)]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        for p in [ProjPoint::from_ints([1, -2, 5]), ProjPoint::approx([Complex64::new(1.0, 0.5), Complex64::one(), Complex64::zero()]).unwrap()] {
            let s = serde_json::to_string(&p).unwrap();
            assert_eq!(serde_json::from_str::<ProjPoint>(&s).unwrap(), p);
        }
    }
}
