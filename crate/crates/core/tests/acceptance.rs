//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails or overruns its time budget.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use borel_rees::oracle::{
    check_measure_decrease, enumerate_monomials, monomial_count, run_suite,
    verify_kernel_generation, verify_unique_normal_forms, VerifyOptions,
};
use borel_rees::presentation::{psi_eval, Basis, TMonomial, DEFAULT_STEP_CAP};
use borel_rees::{
    borel_closure, certify, fixtures, ord_pair, reduction_level, sort_pair, Conclusion, Execution,
    Monomial,
};
use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mono(text: &str, n: usize) -> Monomial {
    Monomial::parse(text, n).unwrap()
}

fn ord_sort_fixtures() -> Outcome {
    let (u, v) = (mono("x1*x1*x3", 4), mono("x2*x3*x4", 4));
    let ord = ord_pair(&u, &v).map_err(|e| e.to_string())?;
    let sort = sort_pair(&u, &v).map_err(|e| e.to_string())?;
    ensure(
        (ord.first.clone(), ord.second.clone()) == (mono("x3^2*x4", 4), mono("x1^2*x2", 4)),
        || format!("ord = {ord}"),
    )?;
    ensure(
        (sort.first.clone(), sort.second.clone()) == (mono("x1*x2*x3", 4), mono("x1*x3*x4", 4)),
        || format!("sort = {sort}"),
    )?;
    Ok(format!("ord = {ord}, sort = {sort}"))
}

fn bset_tables() -> Outcome {
    let tables: [(&str, &[&str]); 4] = [
        (
            "x3*x4",
            &[
                "x1^2", "x1*x2", "x2^2", "x1*x3", "x2*x3", "x3^2", "x1*x4", "x2*x4", "x3*x4",
            ],
        ),
        (
            "x2^2*x3",
            &[
                "x1^3", "x1^2*x2", "x1*x2^2", "x2^3", "x1^2*x3", "x1*x2*x3", "x2^2*x3",
            ],
        ),
        ("x1*x2^2", &["x1^3", "x1^2*x2", "x1*x2^2"]),
        ("x1^5", &["x1^5"]),
    ];
    let mut sizes = Vec::new();
    for (u, expected) in tables {
        let got: Vec<String> = borel_closure(&mono(u, 4))
            .map_err(|e| e.to_string())?
            .iter()
            .map(ToString::to_string)
            .collect();
        ensure(got == expected, || format!("B({u}) = {got:?}"))?;
        sizes.push(got.len());
    }
    Ok(format!("sizes {sizes:?}"))
}

fn measure_fixture() -> Outcome {
    let fam = fixtures::example_family();
    let m = TMonomial::parse("T[0,1]^2*T[0,4]*T[1,1]*T[1,6]*T[1,8]*T[2,2]*T[2,7]").unwrap();
    let level = reduction_level(&m, &fam).map_err(|e| e.to_string())?;
    ensure((level.c, level.e) == (25, 4), || format!("got {level}"))?;
    Ok(level.to_string())
}

fn closure_and_characterization() -> Outcome {
    let fam = fixtures::example_family();
    let rep = fam.characterize();
    ensure(fam.is_closed() && rep.conjunction, || {
        "example family".into()
    })?;
    let mut closed = 0;
    for k in 0..200u64 {
        let mut rng = rng(1000 + k);
        let fam = random_rees(&mut rng, k % 2 == 0, k % 4 == 3);
        let rep = fam.characterize();
        let verdict = fam.is_closed();
        ensure(rep.conjunction == verdict, || {
            format!("family {k} disagrees: {:?}", fam.to_spec())
        })?;
        closed += usize::from(verdict);
    }
    Ok(format!(
        "200 random families agree ({closed} closed, {} not)",
        200 - closed
    ))
}

fn groebner_suite() -> Outcome {
    let fam = fixtures::example_family();
    let basis = Basis::build(&fam).map_err(|e| e.to_string())?;
    ensure(basis.is_quadratic() && basis.has_squarefree_leads(), || {
        "leads".into()
    })?;
    for g in basis.rules() {
        ensure(
            psi_eval(&g.lead, &fam).unwrap() == psi_eval(&g.trail, &fam).unwrap(),
            || format!("{g} is not homogeneous under the image map"),
        )?;
    }
    let rep = basis
        .confluence_check(Execution::default(), DEFAULT_STEP_CAP)
        .map_err(|e| e.to_string())?;
    ensure(rep.passed, || format!("{:?}", rep.first_failure))?;
    Ok(format!(
        "{} rules, {} S-pairs reduce to 0",
        rep.rules, rep.pairs
    ))
}

fn exhaustive_oracle() -> Outcome {
    let fam = fixtures::example_family();
    let basis = Basis::build(&fam).map_err(|e| e.to_string())?;
    let opts = VerifyOptions::with_degree(3);
    let u = verify_unique_normal_forms(&fam, &basis, &opts).map_err(|e| e.to_string())?;
    ensure(u.passed, || format!("{:?}", u.witness))?;
    let k = verify_kernel_generation(&fam, &basis, &opts).map_err(|e| e.to_string())?;
    ensure(k.passed, || format!("{:?}", k.witness))?;
    let cubic = monomial_count(fam.len(), 3) - monomial_count(fam.len(), 2);
    Ok(format!(
        "{} monomials of degree <= 3 ({cubic} of degree 3), {} fibers, {} differences reduce to 0",
        u.monomials, u.fibers, k.differences
    ))
}

fn termination_instrumentation() -> Outcome {
    let fam = fixtures::example_family();
    let basis = Basis::build(&fam).map_err(|e| e.to_string())?;
    let mut rng = rng(2024);
    let monomials: Vec<TMonomial> = (0..1000)
        .map(|_| random_tmonomial(&mut rng, &fam, 6))
        .collect();
    let rep = check_measure_decrease(&fam, &basis, &monomials, &VerifyOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(rep.passed, || {
        format!("{} violations, first {:?}", rep.violations, rep.witness)
    })?;
    Ok(format!(
        "{} monomials, {} steps, longest chain {}, 0 violations",
        rep.monomials, rep.steps, rep.longest_chain
    ))
}

fn fiber_counterexample() -> Outcome {
    let fam = fixtures::fiber_counterexample();
    let rep = fam.characterize();
    ensure(fam.is_closed(), || "not closed".into())?;
    ensure(!rep.levels[0].borel_equal, || {
        "level 1 is Borel-equal".into()
    })?;
    let basis = Basis::build(&fam).map_err(|e| e.to_string())?;
    let suite =
        run_suite(&fam, &basis, &VerifyOptions::with_degree(3)).map_err(|e| e.to_string())?;
    ensure(suite.passed, || format!("{suite:?}"))?;
    Ok(format!(
        "closed, level 1 not Borel-equal, suite passes over {} monomials",
        suite.unique_normal_forms.monomials
    ))
}

fn negative_controls() -> Outcome {
    let level_one = fixtures::example_family()
        .level(1)
        .unwrap()
        .generators()
        .to_vec();
    for u in &level_one[..level_one.len() - 1] {
        let (fam, _) = fixtures::example_spec_without(1, &u.to_string())
            .build()
            .map_err(|e| e.to_string())?;
        ensure(!fam.is_closed(), || format!("still closed without {u}"))?;
    }
    let fam = fixtures::example_family();
    let basis = Basis::build(&fam).map_err(|e| e.to_string())?;
    let opts = VerifyOptions::with_degree(2);
    let mut by_uniqueness = 0;
    for k in 0..basis.len() {
        let broken = basis.without_rule(k);
        let u = verify_unique_normal_forms(&fam, &broken, &opts).map_err(|e| e.to_string())?;
        if !u.passed {
            by_uniqueness += 1;
            continue;
        }
        let c = broken
            .confluence_check(Execution::default(), DEFAULT_STEP_CAP)
            .map_err(|e| e.to_string())?;
        ensure(!c.passed, || format!("dropping rule {k} goes unnoticed"))?;
    }
    Ok(format!(
        "{} removals open the family; all {} dropped rules caught ({by_uniqueness} by unique normal forms)",
        level_one.len() - 1,
        basis.len()
    ))
}

fn maximal_ideal_powers() -> Outcome {
    let fam = fixtures::maximal_ideal_powers(3, 3);
    let cert = certify(&fam).map_err(|e| e.to_string())?;
    ensure(
        cert.conclusions
            == [
                Conclusion::Koszul,
                Conclusion::NormalDomain,
                Conclusion::CohenMacaulay,
            ],
        || format!("{cert:?}"),
    )?;
    let basis = Basis::build(&fam).map_err(|e| e.to_string())?;
    let suite =
        run_suite(&fam, &basis, &VerifyOptions::with_degree(2)).map_err(|e| e.to_string())?;
    ensure(suite.passed, || format!("{suite:?}"))?;
    let monomials = enumerate_monomials(&fam, 2, u128::MAX).unwrap().len();
    Ok(format!(
        "certificate with all conclusions, {} rules, suite passes over {monomials} monomials",
        basis.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("ord/sort fixtures", 1, ord_sort_fixtures),
        ("B-set tables", 1, bset_tables),
        ("measure fixture (25,4)", 1, measure_fixture),
        (
            "closure vs characterization",
            60,
            closure_and_characterization,
        ),
        ("Gröbner suite", 60, groebner_suite),
        ("exhaustive oracle at D=3", 120, exhaustive_oracle),
        (
            "termination instrumentation",
            120,
            termination_instrumentation,
        ),
        ("fiber-mode counterexample", 30, fiber_counterexample),
        ("negative controls", 60, negative_controls),
        ("maximal ideal powers", 120, maximal_ideal_powers),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > Duration::from_secs(budget) => {
                Err(format!("over the {budget} s budget"))
            }
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += usize::from(outcome.is_err());
        println!(
            "{tag} criterion {:>2}: {name}: {detail} [{:.2} s]",
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria fail");
        ExitCode::FAILURE
    }
}
