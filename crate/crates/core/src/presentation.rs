//! The presentation ring `K[T_ij]`: the monomial map onto the (multi-)Rees
//! algebra or semigroup ring, the marked quadratic binomials, and the
//! reduction relation they induce.
//!
//! Leads are always the incomparable products `T_a T_b`; no monomial order
//! is ever materialized. Termination of the rewriting is instead checked
//! with the measure in [`crate::inversions`].

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::family::{GeneratorRef, LeveledFamily, Mode, PairRelation, DEFAULT_WITNESS_LIMIT};

/// Reduction is aborted after this many steps.
pub const DEFAULT_STEP_CAP: usize = 1_000_000;

/// A monomial in the `T_ij`: a multiset of generator refs kept sorted by
/// `<_lex`. The derived order compares the sorted factor lists
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TMonomial {
    factors: Vec<GeneratorRef>,
}

impl TMonomial {
    pub fn one() -> Self {
        TMonomial::default()
    }

    pub fn from_refs(mut factors: Vec<GeneratorRef>) -> Self {
        factors.sort_unstable();
        TMonomial { factors }
    }

    pub fn pair(a: GeneratorRef, b: GeneratorRef) -> Self {
        TMonomial::from_refs(vec![a, b])
    }

    pub fn factors(&self) -> &[GeneratorRef] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    /// `r_i`, the number of level-`i` factors.
    pub fn level_count(&self, level: usize) -> usize {
        self.factors.iter().filter(|r| r.level == level).count()
    }

    /// The level-`i` factors in `<_lex` order.
    pub fn level_factors(&self, level: usize) -> impl Iterator<Item = GeneratorRef> + '_ {
        self.factors
            .iter()
            .copied()
            .filter(move |r| r.level == level)
    }

    pub fn mul(&self, other: &TMonomial) -> TMonomial {
        let mut factors = Vec::with_capacity(self.degree() + other.degree());
        factors.extend_from_slice(&self.factors);
        factors.extend_from_slice(&other.factors);
        TMonomial::from_refs(factors)
    }

    /// No factor repeated.
    pub fn is_squarefree(&self) -> bool {
        self.factors.windows(2).all(|w| w[0] != w[1])
    }

    pub fn divides(&self, other: &TMonomial) -> bool {
        self.quotient_of(other).is_some()
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &TMonomial) -> Option<TMonomial> {
        let mut rest = Vec::with_capacity(other.degree());
        let mut mine = self.factors.iter().peekable();
        for &f in &other.factors {
            if mine.peek() == Some(&&f) {
                mine.next();
            } else {
                rest.push(f);
            }
        }
        mine.peek().is_none().then_some(TMonomial { factors: rest })
    }

    /// Least common multiple of two multisets.
    pub fn lcm(&self, other: &TMonomial) -> TMonomial {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.factors, &other.factors);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    out.push(*x);
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    out.push(*x);
                    i += 1;
                }
                (Some(_), Some(y)) => {
                    out.push(*y);
                    j += 1;
                }
                (Some(x), None) => {
                    out.push(*x);
                    i += 1;
                }
                (None, Some(y)) => {
                    out.push(*y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        TMonomial { factors: out }
    }

    pub fn check(&self, fam: &LeveledFamily) -> Result<()> {
        self.factors.iter().try_for_each(|&r| fam.check_ref(r))
    }

    /// Parses `T[i,j]` factors joined by `*`, with optional `^k`; `1` is the
    /// empty product.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "1" {
            return Ok(TMonomial::one());
        }
        let mut factors = Vec::new();
        for raw in text.split('*') {
            let token = raw.trim();
            let (var, power) = parse_t_power(token)?;
            factors.extend(std::iter::repeat_n(var, power));
        }
        Ok(TMonomial::from_refs(factors))
    }
}

fn parse_t_power(token: &str) -> Result<(GeneratorRef, usize)> {
    let bad = |why: &str| Error::parse(token, why);
    let body = token
        .strip_prefix("T[")
        .ok_or_else(|| bad("expected a variable `T[i,j]`"))?;
    let (inside, after) = body.split_once(']').ok_or_else(|| bad("missing `]`"))?;
    let (i, j) = inside
        .split_once(',')
        .ok_or_else(|| bad("expected `T[i,j]`"))?;
    let level = i
        .trim()
        .parse::<usize>()
        .map_err(|_| bad("level is not a number"))?;
    let index = j
        .trim()
        .parse::<usize>()
        .map_err(|_| bad("index is not a number"))?;
    let power = match after.trim() {
        "" => 1,
        rest => rest
            .strip_prefix('^')
            .and_then(|e| e.trim().parse::<usize>().ok())
            .filter(|&e| e >= 1)
            .ok_or_else(|| bad("expected `^<positive exponent>`"))?,
    };
    Ok((GeneratorRef::new(level, index), power))
}

impl fmt::Display for TMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let mut k = 0;
        let mut first = true;
        while k < self.factors.len() {
            let r = self.factors[k];
            let run = self.factors[k..].iter().take_while(|&&x| x == r).count();
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "{r}")?;
            if run > 1 {
                write!(f, "^{run}")?;
            }
            k += run;
        }
        Ok(())
    }
}

/// Sparse polynomial in the `T_ij` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TPolynomial {
    terms: BTreeMap<TMonomial, BigRational>,
}

impl TPolynomial {
    pub fn zero() -> Self {
        TPolynomial::default()
    }

    pub fn monomial(m: TMonomial) -> Self {
        TPolynomial::term(BigRational::one(), m)
    }

    pub fn term(coefficient: BigRational, m: TMonomial) -> Self {
        let mut p = TPolynomial::zero();
        p.add_term(coefficient, m);
        p
    }

    /// `a - b` for two monomials.
    pub fn binomial(a: TMonomial, b: TMonomial) -> Self {
        let mut p = TPolynomial::monomial(a);
        p.add_term(-BigRational::one(), b);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&TMonomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &TMonomial> {
        self.terms.keys()
    }

    pub fn coefficient(&self, m: &TMonomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, coefficient: BigRational, m: TMonomial) {
        if coefficient.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(coefficient);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coefficient;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &TPolynomial) -> TPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(c.clone(), m.clone());
        }
        out
    }

    pub fn sub(&self, other: &TPolynomial) -> TPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(-c.clone(), m.clone());
        }
        out
    }

    /// `c * m * self`.
    pub fn scale(&self, c: &BigRational, m: &TMonomial) -> TPolynomial {
        let mut out = TPolynomial::zero();
        for (t, k) in &self.terms {
            out.add_term(c * k, t.mul(m));
        }
        out
    }

    fn take(&mut self, m: &TMonomial) -> Option<BigRational> {
        self.terms.remove(m)
    }

    pub fn check(&self, fam: &LeveledFamily) -> Result<()> {
        self.support().try_for_each(|m| m.check(fam))
    }

    /// Parses a rational combination of `T`-monomials, e.g.
    /// `T[1,3]*T[1,4] - 3/2*T[0,1]^2 + 2`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::parse(text, "empty expression"));
        }
        let mut out = TPolynomial::zero();
        let mut sign = BigRational::one();
        let mut start = 0;
        let bytes = text.as_bytes();
        let mut pieces = Vec::new();
        for (k, &b) in bytes.iter().enumerate() {
            if (b == b'+' || b == b'-') && k > 0 {
                pieces.push((sign.clone(), &text[start..k]));
                sign = if b == b'-' {
                    -BigRational::one()
                } else {
                    BigRational::one()
                };
                start = k + 1;
            } else if k == 0 && (b == b'+' || b == b'-') {
                if b == b'-' {
                    sign = -BigRational::one();
                }
                start = 1;
            }
        }
        pieces.push((sign, &text[start..]));
        for (sign, piece) in pieces {
            let piece = piece.trim();
            if piece.is_empty() {
                return Err(Error::parse(text, "empty term"));
            }
            let mut coefficient = sign;
            let mut factors = Vec::new();
            for (k, raw) in piece.split('*').enumerate() {
                let token = raw.trim();
                if token.starts_with('T') {
                    let (var, power) = parse_t_power(token)?;
                    factors.extend(std::iter::repeat_n(var, power));
                } else if k == 0 {
                    coefficient *= parse_rational(token)?;
                } else {
                    return Err(Error::parse(token, "coefficients must lead the term"));
                }
            }
            out.add_term(coefficient, TMonomial::from_refs(factors));
        }
        Ok(out)
    }
}

fn parse_rational(token: &str) -> Result<BigRational> {
    let bad = || Error::parse(token, "expected an integer or fraction coefficient");
    let int = |s: &str| -> Result<BigInt> {
        let s = s.trim();
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse().map_err(|_| bad())
    };
    match token.split_once('/') {
        Some((p, q)) => {
            let q = int(q)?;
            if q.is_zero() {
                return Err(Error::parse(token, "zero denominator"));
            }
            Ok(BigRational::new(int(p)?, q))
        }
        None => Ok(BigRational::from_integer(int(token)?)),
    }
}

impl fmt::Display for TPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.degree() == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Image of a `T`-monomial in `K[X, t]` (Rees mode, `t` has one entry per
/// ideal and `t_0 = 1`) or in `K[X_1..X_{n+s}]` (fiber mode, `t` empty).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PsiImage {
    pub x: Vec<u32>,
    pub t: Vec<u32>,
}

impl PsiImage {
    pub fn one(fam: &LeveledFamily) -> Self {
        match fam.mode() {
            Mode::Rees => PsiImage {
                x: vec![0; fam.variables()],
                t: vec![0; fam.ideal_count()],
            },
            Mode::Fiber => PsiImage {
                x: vec![0; fam.variables() + fam.ideal_count()],
                t: Vec::new(),
            },
        }
    }

    pub fn mul(&self, other: &PsiImage) -> PsiImage {
        let add = |a: &[u32], b: &[u32]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        PsiImage {
            x: add(&self.x, &other.x),
            t: add(&self.t, &other.t),
        }
    }

    fn multiply_generator(&mut self, fam: &LeveledFamily, r: GeneratorRef) {
        let n = fam.variables();
        for (slot, e) in self.x.iter_mut().zip(fam.generator(r).exponents()) {
            *slot += e;
        }
        match fam.mode() {
            Mode::Rees if r.level > 0 => self.t[r.level - 1] += 1,
            Mode::Rees => {}
            Mode::Fiber => {
                let m = fam.embedding_degree().expect("fiber families carry m");
                let d = fam.level(r.level).expect("valid level").degree();
                self.x[n + r.level - 1] += m - d;
            }
        }
    }
}

impl fmt::Display for PsiImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &e) in self.x.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("x{}", i + 1)),
                _ => parts.push(format!("x{}^{e}", i + 1)),
            }
        }
        for (i, &e) in self.t.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("t{}", i + 1)),
                _ => parts.push(format!("t{}^{e}", i + 1)),
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// `Ψ(m)`: `T_ij ↦ u_ij t_i` in Rees mode, `T_ij ↦ u_ij X_{n+i}^{m-d_i}` in
/// fiber mode.
pub fn psi_eval(m: &TMonomial, fam: &LeveledFamily) -> Result<PsiImage> {
    m.check(fam)?;
    Ok(psi_unchecked(m, fam))
}

pub(crate) fn psi_unchecked(m: &TMonomial, fam: &LeveledFamily) -> PsiImage {
    let mut image = PsiImage::one(fam);
    for &r in m.factors() {
        image.multiply_generator(fam, r);
    }
    image
}

/// Whether every pair of factors of `m` is comparable.
pub fn is_completely_reduced(m: &TMonomial, fam: &LeveledFamily) -> bool {
    let f = m.factors();
    (0..f.len()).all(|a| (a + 1..f.len()).all(|b| fam.is_comparable(f[a], f[b])))
}

/// `lead - trail` with the lead marked.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkedBinomial {
    pub lead: TMonomial,
    pub trail: TMonomial,
}

impl MarkedBinomial {
    pub fn lead_pair(&self) -> (GeneratorRef, GeneratorRef) {
        let f = self.lead.factors();
        (f[0], f[1])
    }

    pub fn polynomial(&self) -> TPolynomial {
        TPolynomial::binomial(self.lead.clone(), self.trail.clone())
    }

    /// Lists every structural invariant this binomial violates over `fam`.
    pub fn violations(&self, fam: &LeveledFamily) -> Vec<String> {
        let mut out = Vec::new();
        if self.lead.check(fam).is_err() || self.trail.check(fam).is_err() {
            out.push("dangling reference".to_string());
            return out;
        }
        if self.lead.degree() != 2 || self.trail.degree() != 2 {
            out.push("not quadratic".into());
            return out;
        }
        if self.lead == self.trail {
            out.push("lead equals trail".into());
        }
        if !self.lead.is_squarefree() {
            out.push("lead is not squarefree".into());
        }
        if psi_unchecked(&self.lead, fam) != psi_unchecked(&self.trail, fam) {
            out.push("lead and trail have different images".into());
        }
        if is_completely_reduced(&self.lead, fam) {
            out.push("lead pair is comparable".into());
        }
        if !is_completely_reduced(&self.trail, fam) {
            out.push("trail pair is incomparable".into());
        }
        out
    }
}

impl fmt::Display for MarkedBinomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] - {}", self.lead, self.trail)
    }
}

/// The marked quadratic basis with a lookup from lead pair to rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    rules: Vec<MarkedBinomial>,
    leads: HashMap<(GeneratorRef, GeneratorRef), usize>,
}

/// One rewrite `m -> (m / lead) * trail`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub rewritten: TMonomial,
    pub rule: usize,
    pub replacement: TMonomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub step: RewriteStep,
    pub result: TPolynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub result: TPolynomial,
    pub steps: Vec<RewriteStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfluenceReport {
    pub rules: usize,
    pub pairs: usize,
    pub max_reduction_length: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub passed: bool,
}

/// Serializable basis listing: `{lead, trail}` records in basis order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisListing {
    pub count: usize,
    pub quadratic: bool,
    pub squarefree_leads: bool,
    pub relations: Vec<RelationRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub lead: String,
    pub trail: String,
}

impl Basis {
    /// One binomial `T_a T_b - T_c T_d` per incomparable pair `a <_lex b`,
    /// where `(u_c, u_d)` is the sorted or ordered replacement. Refuses
    /// families that are not closed under comparability.
    pub fn build(fam: &LeveledFamily) -> Result<Basis> {
        let report = fam.closure_report(Some(DEFAULT_WITNESS_LIMIT), Execution::Sequential);
        if !report.closed {
            return Err(Error::NotClosed(report.witnesses));
        }
        let refs = fam.refs();
        let mut rules = Vec::new();
        for (k, &a) in refs.iter().enumerate() {
            for &b in &refs[k + 1..] {
                if let PairRelation::Incomparable {
                    target: Some((c, d)),
                    ..
                } = fam.relation(a, b)
                {
                    rules.push(MarkedBinomial {
                        lead: TMonomial::pair(a, b),
                        trail: TMonomial::pair(*c, *d),
                    });
                }
            }
        }
        Ok(Basis::from_rules(rules))
    }

    /// Wraps arbitrary rules with quadratic squarefree leads. Later rules
    /// with a repeated lead are shadowed by the first.
    pub fn from_rules(rules: Vec<MarkedBinomial>) -> Basis {
        let mut leads = HashMap::with_capacity(rules.len());
        for (k, g) in rules.iter().enumerate() {
            if g.lead.degree() == 2 {
                leads.entry(g.lead_pair()).or_insert(k);
            }
        }
        Basis { rules, leads }
    }

    /// The same basis with rule `k` deleted (a negative control).
    pub fn without_rule(&self, k: usize) -> Basis {
        let mut rules = self.rules.clone();
        if k < rules.len() {
            rules.remove(k);
        }
        Basis::from_rules(rules)
    }

    pub fn rules(&self) -> &[MarkedBinomial] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn is_quadratic(&self) -> bool {
        self.rules
            .iter()
            .all(|g| g.lead.degree() == 2 && g.trail.degree() == 2)
    }

    pub fn has_squarefree_leads(&self) -> bool {
        self.rules.iter().all(|g| g.lead.is_squarefree())
    }

    /// The rule with the smallest lead pair dividing `m`.
    pub fn rule_for(&self, m: &TMonomial) -> Option<usize> {
        let f = m.factors();
        for a in 0..f.len() {
            if a > 0 && f[a] == f[a - 1] {
                continue;
            }
            for b in a + 1..f.len() {
                if b > a + 1 && f[b] == f[b - 1] {
                    continue;
                }
                if let Some(&k) = self.leads.get(&(f[a], f[b])) {
                    return Some(k);
                }
            }
        }
        None
    }

    /// Every rule whose lead divides `m`.
    pub fn rules_for(&self, m: &TMonomial) -> Vec<usize> {
        let f = m.factors();
        let mut out = Vec::new();
        for a in 0..f.len() {
            for b in a + 1..f.len() {
                if let Some(&k) = self.leads.get(&(f[a], f[b])) {
                    if !out.contains(&k) {
                        out.push(k);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn rewrite(&self, m: &TMonomial, rule: usize) -> TMonomial {
        let g = &self.rules[rule];
        g.lead
            .quotient_of(m)
            .expect("lead divides the rewritten monomial")
            .mul(&g.trail)
    }

    /// The greatest reducible support monomial and its rule.
    fn choose(&self, f: &TPolynomial) -> Option<(TMonomial, usize)> {
        f.terms
            .keys()
            .rev()
            .find_map(|m| self.rule_for(m).map(|k| (m.clone(), k)))
    }

    fn apply(&self, f: &mut TPolynomial, m: &TMonomial, rule: usize) -> RewriteStep {
        let coefficient = f.take(m).expect("m is in the support");
        let replacement = self.rewrite(m, rule);
        f.add_term(coefficient, replacement.clone());
        RewriteStep {
            rewritten: m.clone(),
            rule,
            replacement,
        }
    }

    /// One reduction step with the deterministic strategy: the greatest
    /// reducible support monomial, rewritten by its smallest dividing lead.
    pub fn reduce_step(&self, f: &TPolynomial) -> Option<ReductionStep> {
        let (m, rule) = self.choose(f)?;
        let mut result = f.clone();
        let step = self.apply(&mut result, &m, rule);
        Some(ReductionStep { step, result })
    }

    pub fn normal_form(&self, f: &TPolynomial) -> Result<TPolynomial> {
        Ok(self.normal_form_traced(f, DEFAULT_STEP_CAP)?.result)
    }

    /// Reduces to a fixed point, recording every rewrite.
    pub fn normal_form_traced(&self, f: &TPolynomial, step_cap: usize) -> Result<Reduction> {
        let mut current = f.clone();
        let mut steps = Vec::new();
        while let Some((m, rule)) = self.choose(&current) {
            if steps.len() >= step_cap {
                return Err(Error::StepCap(step_cap));
            }
            steps.push(self.apply(&mut current, &m, rule));
        }
        Ok(Reduction {
            result: current,
            steps,
        })
    }

    /// Reduces with a caller-chosen strategy: `pick` receives every
    /// available `(monomial, rule)` rewrite and returns the one to apply.
    pub fn normal_form_with_strategy<F>(
        &self,
        f: &TPolynomial,
        step_cap: usize,
        mut pick: F,
    ) -> Result<Reduction>
    where
        F: FnMut(&[(TMonomial, usize)]) -> usize,
    {
        let mut current = f.clone();
        let mut steps = Vec::new();
        loop {
            let options: Vec<(TMonomial, usize)> = current
                .support()
                .flat_map(|m| self.rules_for(m).into_iter().map(move |k| (m.clone(), k)))
                .collect();
            if options.is_empty() {
                break;
            }
            if steps.len() >= step_cap {
                return Err(Error::StepCap(step_cap));
            }
            let (m, rule) = options[pick(&options) % options.len()].clone();
            steps.push(self.apply(&mut current, &m, rule));
        }
        Ok(Reduction {
            result: current,
            steps,
        })
    }

    /// Normal form of a single monomial: the rewrite chain stays a single
    /// monomial with coefficient one. Returns the chain, first element `m`.
    pub fn reduce_monomial(&self, m: &TMonomial, step_cap: usize) -> Result<Vec<TMonomial>> {
        let mut chain = vec![m.clone()];
        loop {
            let current = chain.last().expect("nonempty");
            let Some(rule) = self.rule_for(current) else {
                return Ok(chain);
            };
            if chain.len() > step_cap {
                return Err(Error::StepCap(step_cap));
            }
            let next = self.rewrite(current, rule);
            chain.push(next);
        }
    }

    /// `f ∈ (G)`, decided by reducing to zero.
    pub fn kernel_membership(&self, f: &TPolynomial) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Checks that every S-polynomial reduces to zero. Coprime pairs are
    /// included.
    pub fn confluence_check(&self, exec: Execution, step_cap: usize) -> Result<ConfluenceReport> {
        let k = self.rules.len();
        let rows = exec.map_range(k, |i| -> Result<(usize, usize, Option<String>)> {
            let mut longest = 0;
            let mut failures = 0;
            let mut first = None;
            for j in i + 1..k {
                let s = s_polynomial(&self.rules[i], &self.rules[j]);
                let red = self.normal_form_traced(&s, step_cap)?;
                longest = longest.max(red.steps.len());
                if !red.result.is_zero() {
                    failures += 1;
                    first.get_or_insert_with(|| {
                        format!(
                            "S({}, {}) = {} reduces to {}",
                            self.rules[i], self.rules[j], s, red.result
                        )
                    });
                }
            }
            Ok((longest, failures, first))
        });
        let mut report = ConfluenceReport {
            rules: k,
            pairs: k * k.saturating_sub(1) / 2,
            max_reduction_length: 0,
            failures: 0,
            first_failure: None,
            passed: true,
        };
        for row in rows {
            let (longest, failures, first) = row?;
            report.max_reduction_length = report.max_reduction_length.max(longest);
            report.failures += failures;
            if report.first_failure.is_none() {
                report.first_failure = first;
            }
        }
        report.passed = report.failures == 0;
        Ok(report)
    }

    pub fn listing(&self) -> BasisListing {
        BasisListing {
            count: self.rules.len(),
            quadratic: self.is_quadratic(),
            squarefree_leads: self.has_squarefree_leads(),
            relations: self
                .rules
                .iter()
                .map(|g| RelationRecord {
                    lead: g.lead.to_string(),
                    trail: g.trail.to_string(),
                })
                .collect(),
        }
    }

    /// Rebuilds a basis from a listing, validating refs against `fam`.
    pub fn from_listing(listing: &BasisListing, fam: &LeveledFamily) -> Result<Basis> {
        let rules = listing
            .relations
            .iter()
            .map(|r| {
                let g = MarkedBinomial {
                    lead: TMonomial::parse(&r.lead)?,
                    trail: TMonomial::parse(&r.trail)?,
                };
                g.lead.check(fam)?;
                g.trail.check(fam)?;
                Ok(g)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Basis::from_rules(rules))
    }
}

/// `(lcm / lead_1) g_1 - (lcm / lead_2) g_2` with respect to the marked leads.
pub fn s_polynomial(g1: &MarkedBinomial, g2: &MarkedBinomial) -> TPolynomial {
    let l = g1.lead.lcm(&g2.lead);
    let c1 = g1.lead.quotient_of(&l).expect("lead divides lcm");
    let c2 = g2.lead.quotient_of(&l).expect("lead divides lcm");
    let one = BigRational::one();
    g1.polynomial()
        .scale(&one, &c1)
        .sub(&g2.polynomial().scale(&one, &c2))
}
