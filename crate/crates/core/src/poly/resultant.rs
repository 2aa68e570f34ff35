//! Sylvester resultants and fraction-free determinants over `Q[x0..x2]`.

use super::MultiPoly;
use crate::error::{Error, Result};

/// Determinant of a square matrix of polynomials by Bareiss elimination.
///
/// Every division is exact over the polynomial ring. A zero pivot is replaced
/// by the first nonzero entry below it, flipping the sign.
pub fn determinant(matrix: &[Vec<MultiPoly>]) -> Result<MultiPoly> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::Degenerate("empty matrix".into()));
    }
    let nvars = matrix[0][0].nvars();
    if matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Degenerate("matrix is not square".into()));
    }
    let mut m: Vec<Vec<MultiPoly>> = matrix.to_vec();
    let mut negate = false;
    let mut prev = MultiPoly::one(nvars);
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Ok(MultiPoly::zero(nvars));
            };
            m.swap(k, r);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = if prev.is_one() { num } else { num.divide_exact(&prev)? };
            }
            m[i][k] = MultiPoly::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// Sylvester resultant of `p` and `q` with respect to variable `var`.
///
/// The result keeps the variable count and does not involve `var`. If either
/// input is zero the resultant is zero; a constant in `var` raised to the
/// other degree is returned directly.
pub fn resultant(p: &MultiPoly, q: &MultiPoly, var: usize) -> Result<MultiPoly> {
    p.check_same(q)?;
    let n = p.nvars();
    if var >= n {
        return Err(Error::Arity { expected: n, got: var + 1 });
    }
    if p.is_zero() || q.is_zero() {
        return Ok(MultiPoly::zero(n));
    }
    let a = p.to_univariate(var);
    let b = q.to_univariate(var);
    let (da, db) = (a.len() - 1, b.len() - 1);
    if da == 0 {
        return Ok(a[0].pow(db as u32));
    }
    if db == 0 {
        return Ok(b[0].pow(da as u32));
    }
    let size = da + db;
    let zero = MultiPoly::zero(n);
    let mut rows = Vec::with_capacity(size);
    for i in 0..db {
        let mut row = vec![zero.clone(); size];
        for (k, c) in a.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..da {
        let mut row = vec![zero.clone(); size];
        for (k, c) in b.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    determinant(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> MultiPoly {
        MultiPoly::parse(s, n).unwrap()
    }

    #[test]
    fn resultant_of_linear_forms_in_y() {
        // Res_y(y - x, y - x^2) vanishes exactly where x = x^2.
        let r = resultant(&p("y - x", 2), &p("y - x^2", 2), 1).unwrap();
        assert_eq!(r.primitive(), p("x^2 - x", 2));
        assert!(!r.involves(1));
    }

    #[test]
    fn resultant_detects_common_root() {
        let a = p("(x - 2)*(x + 3)", 1);
        let b = p("(x - 2)*(x - 7)", 1);
        assert!(resultant(&a, &b, 0).unwrap().is_zero());
        // Res(x - r, x - s) = r - s.
        let r = resultant(&p("x - 5", 1), &p("x + 1", 1), 0).unwrap();
        assert_eq!(r.constant_value().unwrap().numer().to_string(), "6");
    }

    #[test]
    fn degenerate_degrees() {
        let c = p("x^2 + 1", 2);
        let q = p("y^3 + x", 2);
        assert_eq!(resultant(&c, &q, 1).unwrap(), c.pow(3));
        assert!(resultant(&MultiPoly::zero(2), &q, 1).unwrap().is_zero());
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = vec![
            vec![p("x", 2), p("1", 2), p("y", 2)],
            vec![p("0", 2), p("x - y", 2), p("2", 2)],
            vec![p("y^2", 2), p("3", 2), p("x*y", 2)],
        ];
        let cof = &(&m[0][0] * &(&(&m[1][1] * &m[2][2]) - &(&m[1][2] * &m[2][1])))
            - &(&m[0][1] * &(&(&m[1][0] * &m[2][2]) - &(&m[1][2] * &m[2][0])));
        let cof = &cof + &(&m[0][2] * &(&(&m[1][0] * &m[2][1]) - &(&m[1][1] * &m[2][0])));
        assert_eq!(determinant(&m).unwrap(), cof);
        let swapped = vec![m[1].clone(), m[0].clone(), m[2].clone()];
        assert_eq!(determinant(&swapped).unwrap(), -&cof);
    }
}
