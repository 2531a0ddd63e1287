//! Reference families used by the tests, benches and docs.

use crate::family::{FamilySpec, LevelSpec, LeveledFamily, Mode};
use crate::monomial::Monomial;

fn borel(degree: u32, u: &str) -> LevelSpec {
    LevelSpec::Borel {
        degree,
        borel: u.to_string(),
    }
}

fn explicit(degree: u32, gens: &[&str]) -> LevelSpec {
    LevelSpec::Explicit {
        degree,
        generators: gens.iter().map(|g| g.to_string()).collect(),
    }
}

fn build(spec: &FamilySpec) -> LeveledFamily {
    spec.build().expect("fixture is valid").0
}

/// Four variables; `I_1 = (B(x3*x4))`, `I_2 = (B(x2^2*x3))`,
/// `I_3 = (B(x1*x2^2))`, `I_4 = (x1^5)`. Level sizes 4, 9, 7, 3, 1.
pub fn example_spec() -> FamilySpec {
    FamilySpec {
        mode: Mode::Rees,
        variables: 4,
        embedding_degree: None,
        levels: vec![
            borel(2, "x3*x4"),
            borel(3, "x2^2*x3"),
            borel(3, "x1*x2^2"),
            explicit(5, &["x1^5"]),
        ],
    }
}

pub fn example_family() -> LeveledFamily {
    build(&example_spec())
}

/// [`example_spec`] with every level written out explicitly and the given
/// generator removed from `level`.
pub fn example_spec_without(level: usize, generator: &str) -> FamilySpec {
    let mut spec = example_family().to_spec();
    let n = spec.variables;
    let target = Monomial::parse(generator, n).expect("valid monomial");
    if let LevelSpec::Explicit { generators, .. } = &mut spec.levels[level - 1] {
        generators.retain(|g| Monomial::parse(g, n).unwrap() != target);
    }
    spec
}

/// Fiber-mode family on five variables with `m = 4`, closed under
/// comparability although its first level is not a principal strongly
/// stable set.
pub fn fiber_counterexample_spec() -> FamilySpec {
    FamilySpec {
        mode: Mode::Fiber,
        variables: 5,
        embedding_degree: Some(4),
        levels: vec![
            explicit(2, &["x3^2", "x3*x4", "x3*x5", "x4*x5"]),
            explicit(3, &["x1^3", "x1^2*x3"]),
        ],
    }
}

pub fn fiber_counterexample() -> LeveledFamily {
    build(&fiber_counterexample_spec())
}

/// Rees family of the powers `m, m^2, ..., m^s` of the maximal ideal of a
/// polynomial ring in `n` variables.
pub fn maximal_ideal_powers_spec(n: usize, s: u32) -> FamilySpec {
    FamilySpec {
        mode: Mode::Rees,
        variables: n,
        embedding_degree: None,
        levels: (1..=s)
            .map(|d| {
                borel(
                    d,
                    &Monomial::from_factors(n, &vec![n; d as usize]).to_string(),
                )
            })
            .collect(),
    }
}

pub fn maximal_ideal_powers(n: usize, s: u32) -> LeveledFamily {
    build(&maximal_ideal_powers_spec(n, s))
}

/// Rees algebra of the single principal strongly stable ideal `(B(u))`.
pub fn principal_spec(u: &Monomial) -> FamilySpec {
    FamilySpec {
        mode: Mode::Rees,
        variables: u.variables(),
        embedding_degree: None,
        levels: vec![borel(u.degree(), &u.to_string())],
    }
}

pub fn principal(u: &Monomial) -> LeveledFamily {
    build(&principal_spec(u))
}
