#![allow(dead_code)]

use borel_rees::presentation::{TMonomial, TPolynomial};
use borel_rees::{borel_closure, LeveledFamily, Mode, Monomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random bottoms `u_1, ..., u_s` of non-decreasing degree. With `chain`,
/// each lower bottom only uses variables no larger than the smallest
/// variable of the next one.
fn random_bottoms(rng: &mut TestRng, n: usize, chain: bool) -> Vec<Monomial> {
    let s = rng.gen_range(1..=3);
    let mut degrees: Vec<usize> = (0..s).map(|_| rng.gen_range(1..=4)).collect();
    degrees.sort();
    let mut bottoms = vec![Monomial::one(n); s];
    let mut floor = 1;
    for i in (0..s).rev() {
        let lo = if chain { floor } else { 1 };
        let factors: Vec<usize> = (0..degrees[i]).map(|_| rng.gen_range(lo..=n)).collect();
        floor = *factors.iter().max().unwrap();
        bottoms[i] = Monomial::from_factors(n, &factors);
    }
    bottoms
}

/// Random rees family on at most five variables with degrees at most four.
/// Each level is `B(u)` for a random `u`; `perturb` drops one non-bottom
/// generator from a random level when there is one to drop.
pub fn random_rees(rng: &mut TestRng, chain: bool, perturb: bool) -> LeveledFamily {
    let n = rng.gen_range(2..=5);
    let bottoms = random_bottoms(rng, n, chain);
    let mut levels: Vec<(u32, Vec<Monomial>)> = bottoms
        .iter()
        .map(|u| (u.degree(), borel_closure(u).unwrap()))
        .collect();
    if perturb {
        let i = rng.gen_range(0..levels.len());
        let gens = &mut levels[i].1;
        if gens.len() > 1 {
            let j = rng.gen_range(0..gens.len() - 1);
            gens.remove(j);
        }
    }
    LeveledFamily::new(Mode::Rees, n, None, levels).unwrap().0
}

/// Random fiber family: each level a random subset of `B(u)` containing
/// `u`, embedding degree one or two above the top degree.
pub fn random_fiber(rng: &mut TestRng, chain: bool) -> LeveledFamily {
    let n = rng.gen_range(2..=5);
    let bottoms = random_bottoms(rng, n, chain);
    let full = rng.gen_bool(0.5);
    let levels: Vec<(u32, Vec<Monomial>)> = bottoms
        .iter()
        .map(|u| {
            let mut gens = borel_closure(u).unwrap();
            let bottom = gens.pop().unwrap();
            if !full {
                gens.retain(|_| rng.gen_bool(0.5));
            }
            gens.push(bottom);
            (u.degree(), gens)
        })
        .collect();
    let top = bottoms.last().unwrap().degree();
    let m = top + rng.gen_range(1..=2);
    LeveledFamily::new(Mode::Fiber, n, Some(m), levels)
        .unwrap()
        .0
}

pub fn random_tmonomial(rng: &mut TestRng, fam: &LeveledFamily, max_degree: usize) -> TMonomial {
    let degree = rng.gen_range(1..=max_degree);
    TMonomial::from_refs(
        (0..degree)
            .map(|_| fam.unflat(rng.gen_range(0..fam.len())))
            .collect(),
    )
}

pub fn random_rational(rng: &mut TestRng) -> BigRational {
    let mut num = rng.gen_range(-9i64..=9);
    if num == 0 {
        num = 1;
    }
    BigRational::new(BigInt::from(num), BigInt::from(rng.gen_range(1i64..=5)))
}

pub fn random_polynomial(
    rng: &mut TestRng,
    fam: &LeveledFamily,
    terms: usize,
    max_degree: usize,
) -> TPolynomial {
    let mut f = TPolynomial::zero();
    for _ in 0..terms {
        f.add_term(random_rational(rng), random_tmonomial(rng, fam, max_degree));
    }
    f
}

/// A strategy for `normal_form_with_strategy` that picks uniformly.
pub fn random_pick(rng: &mut TestRng) -> impl FnMut(&[(TMonomial, usize)]) -> usize + '_ {
    move |options| rng.gen_range(0..options.len())
}
