//! Topological degree by counting preimages of generic points.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ProjectiveMap;
use crate::error::{Error, Result};
use crate::families::random_rational;
use crate::poly::gcd;
use crate::solver::{solve_system, SolverOptions};

/// Targets per vote.
const TARGETS: usize = 3;
const ROUNDS: usize = 4;

/// Number of preimages of a random affine target `[1 : t1 : t2]`.
///
/// Preimages solve `c1 - t1 c0 = c2 - t2 c0 = 0` in the chart `x0 = 1`;
/// solutions with `c0 = 0` lie in the indeterminacy locus and are dropped.
/// A target with a singular preimage is not generic and yields `None`.
fn preimage_count(f: &ProjectiveMap, rng: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<Option<u32>> {
    let [c0, c1, c2] = f.affine_components();
    let (t1, t2) = (random_rational(rng, 50), random_rational(rng, 50));
    let p = &c1 - &c0.scale(&t1);
    let q = &c2 - &c0.scale(&t2);
    if p.is_zero() || q.is_zero() || !gcd(&p, &q)?.is_constant() {
        return Ok(None);
    }
    let sols = match solve_system(&p, &q, opts) {
        Ok(s) => s,
        Err(Error::Genericity { .. } | Error::Numerical(_) | Error::NonIsolated(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let f0 = c0.to_float();
    let mut count = 0;
    for s in sols {
        let (v, scale) = f0.eval_with_scale(&[s.x, s.y]);
        if v.norm() <= 1e-8 * scale.max(1.0) {
            continue;
        }
        if !s.simple {
            return Ok(None);
        }
        count += 1;
    }
    Ok(Some(count))
}

/// Majority preimage count over independent random targets.
pub fn topological_degree(f: &ProjectiveMap, seed: u64) -> Result<u32> {
    if f.affine_components()[0].is_zero() {
        return Err(Error::InvalidMap("the map collapses the plane into the line at infinity".into()));
    }
    let opts = SolverOptions { seed, ..SolverOptions::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = Vec::new();
    for _ in 0..ROUNDS {
        let mut votes: BTreeMap<u32, usize> = BTreeMap::new();
        for _ in 0..TARGETS {
            if let Some(k) = preimage_count(f, &mut rng, &opts)? {
                *votes.entry(k).or_default() += 1;
            }
        }
        seen.push(votes.clone());
        if let Some((&k, &n)) = votes.iter().max_by_key(|(_, n)| **n) {
            if n == TARGETS || (n * 2 > TARGETS && votes.len() <= 2) {
                return Ok(k);
            }
        }
    }
    Err(Error::Genericity { attempts: ROUNDS * TARGETS, msg: format!("preimage counts disagree across targets: {seen:?}") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build, int_params, FamilyTag};
    use crate::poly::MultiPoly;
    use crate::proj_map::homogenize;

    #[test]
    fn degrees_of_small_maps() {
        let spec = build(FamilyTag::SiModel, int_params(&[("alpha", 2)])).unwrap();
        assert_eq!(topological_degree(&homogenize(&spec.planar).unwrap(), 3).unwrap(), 2);
        let f = ProjectiveMap::new([
            MultiPoly::parse("x0^2", 3).unwrap(),
            MultiPoly::parse("x1^2", 3).unwrap(),
            MultiPoly::parse("x2^2", 3).unwrap(),
        ])
        .unwrap();
        assert_eq!(topological_degree(&f, 3).unwrap(), 4);
    }
}
