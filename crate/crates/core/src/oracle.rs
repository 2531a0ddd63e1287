//! Brute-force checks at bounded degree: enumerate every `T`-monomial up to
//! a degree bound, bucket them by image, and confirm that the rewriting
//! system picks out exactly one completely reduced representative per
//! bucket and kills every within-bucket difference.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::family::LeveledFamily;
use crate::inversions::{reduction_level_with_cap, ReductionMeasure, DEFAULT_ROW_CAP};
use crate::presentation::{
    is_completely_reduced, psi_unchecked, Basis, PsiImage, TMonomial, TPolynomial, DEFAULT_STEP_CAP,
};

pub const DEFAULT_MAX_DEGREE: usize = 3;
pub const DEFAULT_MONOMIAL_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub max_degree: usize,
    pub monomial_cap: u128,
    pub step_cap: usize,
    pub row_cap: usize,
    pub execution: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_degree: DEFAULT_MAX_DEGREE,
            monomial_cap: DEFAULT_MONOMIAL_CAP,
            step_cap: DEFAULT_STEP_CAP,
            row_cap: DEFAULT_ROW_CAP,
            execution: Execution::default(),
        }
    }
}

impl VerifyOptions {
    pub fn with_degree(max_degree: usize) -> Self {
        VerifyOptions {
            max_degree,
            ..Default::default()
        }
    }
}

/// `T`-monomials of degree `1..=D`, bucketed by image. Buckets and their
/// members are in sorted order.
#[derive(Debug, Clone)]
pub struct Fibers {
    pub buckets: BTreeMap<PsiImage, Vec<TMonomial>>,
    /// Monomial count per degree, index 0 holding degree 1.
    pub per_degree: Vec<usize>,
}

impl Fibers {
    pub fn monomial_count(&self) -> usize {
        self.per_degree.iter().sum()
    }

    pub fn max_fiber_size(&self) -> usize {
        self.buckets.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn buckets(&self) -> Vec<(&PsiImage, &Vec<TMonomial>)> {
        self.buckets.iter().collect()
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Number of `T`-monomials of degree `1..=D` in `vars` variables.
pub fn monomial_count(vars: usize, max_degree: usize) -> u128 {
    (1..=max_degree as u128)
        .map(|d| binomial(vars as u128 + d - 1, d))
        .fold(0u128, u128::saturating_add)
}

/// All multisets of size `degree` drawn from `0..vars`, lexicographic.
fn multisets(vars: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(degree);
    fn rec(
        vars: usize,
        left: usize,
        from: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        for v in from..vars {
            current.push(v);
            rec(vars, left - 1, v, current, out);
            current.pop();
        }
    }
    rec(vars, degree, 0, &mut current, &mut out);
    out
}

/// All `T`-monomials of degree `1..=D`.
pub fn enumerate_monomials(
    fam: &LeveledFamily,
    max_degree: usize,
    cap: u128,
) -> Result<Vec<TMonomial>> {
    if max_degree == 0 {
        return Err(Error::Degree("the degree bound must be at least 1".into()));
    }
    let count = monomial_count(fam.len(), max_degree);
    if count > cap {
        return Err(Error::ResourceCap {
            what: "T-monomials to enumerate",
            value: count,
            limit: cap,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    for degree in 1..=max_degree {
        for ids in multisets(fam.len(), degree) {
            out.push(TMonomial::from_refs(
                ids.into_iter().map(|id| fam.unflat(id)).collect(),
            ));
        }
    }
    Ok(out)
}

pub fn enumerate_fibers(fam: &LeveledFamily, max_degree: usize, cap: u128) -> Result<Fibers> {
    let monomials = enumerate_monomials(fam, max_degree, cap)?;
    let mut per_degree = vec![0; max_degree];
    let mut buckets: BTreeMap<PsiImage, Vec<TMonomial>> = BTreeMap::new();
    for m in monomials {
        per_degree[m.degree() - 1] += 1;
        buckets.entry(psi_unchecked(&m, fam)).or_default().push(m);
    }
    for members in buckets.values_mut() {
        members.sort();
    }
    Ok(Fibers {
        buckets,
        per_degree,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberWitness {
    pub image: String,
    pub members: Vec<String>,
    pub completely_reduced: Vec<String>,
    pub normal_forms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniquenessReport {
    pub monomials: usize,
    pub fibers: usize,
    pub max_fiber_size: usize,
    pub reductions: usize,
    pub failing_fibers: usize,
    pub witness: Option<FiberWitness>,
    pub passed: bool,
}

/// Every bucket must contain exactly one completely reduced monomial, and
/// every member must reduce to it.
pub fn verify_unique_normal_forms(
    fam: &LeveledFamily,
    basis: &Basis,
    opts: &VerifyOptions,
) -> Result<UniquenessReport> {
    let fibers = enumerate_fibers(fam, opts.max_degree, opts.monomial_cap)?;
    let buckets = fibers.buckets();
    let results = opts.execution.map(
        &buckets,
        |(image, members)| -> Result<(usize, Option<FiberWitness>)> {
            let reduced: Vec<&TMonomial> = members
                .iter()
                .filter(|m| is_completely_reduced(m, fam))
                .collect();
            let mut reductions = 0;
            let mut normal_forms = Vec::with_capacity(members.len());
            for m in members.iter() {
                let chain = basis.reduce_monomial(m, opts.step_cap)?;
                reductions += chain.len() - 1;
                normal_forms.push(chain.last().expect("chain starts at m").clone());
            }
            let ok = reduced.len() == 1 && normal_forms.iter().all(|nf| nf == reduced[0]);
            let witness = (!ok).then(|| FiberWitness {
                image: image.to_string(),
                members: members.iter().map(ToString::to_string).collect(),
                completely_reduced: reduced.iter().map(ToString::to_string).collect(),
                normal_forms: normal_forms.iter().map(ToString::to_string).collect(),
            });
            Ok((reductions, witness))
        },
    );
    let mut report = UniquenessReport {
        monomials: fibers.monomial_count(),
        fibers: buckets.len(),
        max_fiber_size: fibers.max_fiber_size(),
        reductions: 0,
        failing_fibers: 0,
        witness: None,
        passed: false,
    };
    for r in results {
        let (reductions, witness) = r?;
        report.reductions += reductions;
        if let Some(w) = witness {
            report.failing_fibers += 1;
            report.witness.get_or_insert(w);
        }
    }
    report.passed = report.failing_fibers == 0;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub differences: usize,
    pub reductions: usize,
    pub failures: usize,
    pub witness: Option<String>,
    pub passed: bool,
}

/// Every within-bucket difference `member - representative` (the first
/// member is the representative) must reduce to zero.
pub fn verify_kernel_generation(
    fam: &LeveledFamily,
    basis: &Basis,
    opts: &VerifyOptions,
) -> Result<KernelReport> {
    let fibers = enumerate_fibers(fam, opts.max_degree, opts.monomial_cap)?;
    let buckets = fibers.buckets();
    let results = opts.execution.map(
        &buckets,
        |(_, members)| -> Result<(usize, usize, usize, Option<String>)> {
            let rep = &members[0];
            let (mut diffs, mut steps, mut failures, mut witness) = (0, 0, 0, None);
            for m in &members[1..] {
                let f = TPolynomial::binomial(m.clone(), rep.clone());
                let red = basis.normal_form_traced(&f, opts.step_cap)?;
                diffs += 1;
                steps += red.steps.len();
                if !red.result.is_zero() {
                    failures += 1;
                    witness.get_or_insert_with(|| format!("{f} reduces to {}", red.result));
                }
            }
            Ok((diffs, steps, failures, witness))
        },
    );
    let mut report = KernelReport {
        differences: 0,
        reductions: 0,
        failures: 0,
        witness: None,
        passed: false,
    };
    for r in results {
        let (diffs, steps, failures, witness) = r?;
        report.differences += diffs;
        report.reductions += steps;
        report.failures += failures;
        if report.witness.is_none() {
            report.witness = witness;
        }
    }
    report.passed = report.failures == 0;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureViolation {
    pub from: String,
    pub to: String,
    pub before: ReductionMeasure,
    pub after: ReductionMeasure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureReport {
    pub monomials: usize,
    pub steps: usize,
    pub longest_chain: usize,
    pub violations: usize,
    pub witness: Option<MeasureViolation>,
    pub passed: bool,
}

/// Reduces each monomial and checks that `(c, e)` drops strictly at every
/// step of the chain.
pub fn check_measure_decrease(
    fam: &LeveledFamily,
    basis: &Basis,
    monomials: &[TMonomial],
    opts: &VerifyOptions,
) -> Result<MeasureReport> {
    let results = opts.execution.map(
        monomials,
        |m| -> Result<(usize, usize, Option<MeasureViolation>)> {
            let chain = basis.reduce_monomial(m, opts.step_cap)?;
            let measures = chain
                .iter()
                .map(|x| reduction_level_with_cap(x, fam, opts.row_cap))
                .collect::<Result<Vec<_>>>()?;
            let mut violations = 0;
            let mut witness = None;
            for k in 1..chain.len() {
                if measures[k] >= measures[k - 1] {
                    violations += 1;
                    witness.get_or_insert_with(|| MeasureViolation {
                        from: chain[k - 1].to_string(),
                        to: chain[k].to_string(),
                        before: measures[k - 1],
                        after: measures[k],
                    });
                }
            }
            // the endpoint is completely reduced, so its measure is zero
            if !measures.last().expect("nonempty").is_zero() {
                violations += 1;
            }
            Ok((chain.len() - 1, violations, witness))
        },
    );
    let mut report = MeasureReport {
        monomials: monomials.len(),
        steps: 0,
        longest_chain: 0,
        violations: 0,
        witness: None,
        passed: false,
    };
    for r in results {
        let (steps, violations, witness) = r?;
        report.steps += steps;
        report.longest_chain = report.longest_chain.max(steps);
        report.violations += violations;
        if report.witness.is_none() {
            report.witness = witness;
        }
    }
    report.passed = report.violations == 0;
    Ok(report)
}

/// Kernel membership decided through the image map: group terms by image
/// and require every group's coefficients to cancel.
pub fn kernel_membership_by_image(f: &TPolynomial, fam: &LeveledFamily) -> Result<bool> {
    f.check(fam)?;
    let mut sums: BTreeMap<PsiImage, num_rational::BigRational> = BTreeMap::new();
    for (m, c) in f.terms() {
        *sums.entry(psi_unchecked(m, fam)).or_default() += c;
    }
    Ok(sums.values().all(num_traits::Zero::is_zero))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub max_degree: usize,
    pub confluence: crate::presentation::ConfluenceReport,
    pub unique_normal_forms: UniquenessReport,
    pub kernel_generation: KernelReport,
    pub measure: MeasureReport,
    pub passed: bool,
}

/// Runs confluence, unique normal forms, kernel generation and measure
/// instrumentation (over all monomials up to the degree bound).
pub fn run_suite(fam: &LeveledFamily, basis: &Basis, opts: &VerifyOptions) -> Result<SuiteReport> {
    let confluence = basis.confluence_check(opts.execution, opts.step_cap)?;
    let unique_normal_forms = verify_unique_normal_forms(fam, basis, opts)?;
    let kernel_generation = verify_kernel_generation(fam, basis, opts)?;
    let monomials = enumerate_monomials(fam, opts.max_degree, opts.monomial_cap)?;
    let measure = check_measure_decrease(fam, basis, &monomials, opts)?;
    let passed = confluence.passed
        && unique_normal_forms.passed
        && kernel_generation.passed
        && measure.passed;
    Ok(SuiteReport {
        max_degree: opts.max_degree,
        confluence,
        unique_normal_forms,
        kernel_generation,
        measure,
        passed,
    })
}
