//! Leveled generator families and closure under comparability.
//!
//! A family stores the minimal generators of `I_1, ..., I_s` level by
//! level, each level sorted strictly descending by revlex, so that a
//! generator is addressed by its `(level, index)` pair. In Rees mode level
//! 0 holds the variables themselves; in fiber mode there is no level 0 and
//! an embedding degree `m > d_s` is attached.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::monomial::{
    borel_closure, borel_member, ord_pair, revlex, sort_pair, Monomial, MonomialPair,
};

/// Witness lists stop at this many pairs unless all are requested.
pub const DEFAULT_WITNESS_LIMIT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rees,
    Fiber,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Rees => "rees",
            Mode::Fiber => "fiber",
        })
    }
}

/// `(level, index)` address of a generator; `index` is 1-based within the
/// level's revlex order. The derived order is `<_lex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorRef {
    pub level: usize,
    pub index: usize,
}

impl GeneratorRef {
    pub const fn new(level: usize, index: usize) -> Self {
        GeneratorRef { level, index }
    }
}

impl fmt::Display for GeneratorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T[{},{}]", self.level, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    degree: u32,
    generators: Vec<Monomial>,
}

impl Level {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `u_{i n_i}`, the revlex-smallest generator.
    pub fn bottom(&self) -> &Monomial {
        self.generators.last().expect("levels are nonempty")
    }
}

/// How a `<_lex`-ordered pair of generators relates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairRelation {
    Comparable,
    /// The sorted (same level) or ordered (cross level) replacement, and
    /// its address if both halves are present in the family.
    Incomparable {
        replacement: MonomialPair,
        target: Option<(GeneratorRef, GeneratorRef)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureWitness {
    pub first: String,
    pub second: String,
    pub product: (String, String),
    pub replacement: (String, String),
    pub missing: Vec<String>,
    #[serde(skip)]
    pub refs: (GeneratorRef, GeneratorRef),
}

impl fmt::Display for ClosureWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} * {} = {} * {} -> ({}, {}), missing {}",
            self.first,
            self.second,
            self.product.0,
            self.product.1,
            self.replacement.0,
            self.replacement.1,
            self.missing.join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub closed: bool,
    pub incomparable_pairs: usize,
    pub violations: usize,
    pub witnesses: Vec<ClosureWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelCharacterization {
    pub level: usize,
    pub bottom: String,
    /// `M_i = B(u_{i n_i})`.
    pub borel_equal: bool,
    /// `M_i ⊆ B(u_{i n_i})`.
    pub borel_subset: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainCondition {
    pub lower: usize,
    pub upper: usize,
    /// `max(u_{i n_i}) <= min(u_{(i+1) n_{i+1}})`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterizationReport {
    pub mode: Mode,
    pub levels: Vec<LevelCharacterization>,
    pub chain: Vec<ChainCondition>,
    /// All levels Borel-equal and every chain condition holds.
    pub conjunction: bool,
    pub closed: bool,
    /// Rees mode: `conjunction == closed`. Fiber mode: the conjunction
    /// implies closure, and closure implies Borel containment plus the
    /// chain conditions.
    pub consistent: bool,
}

/// A validated family together with its pairwise comparability table.
#[derive(Debug, Clone)]
pub struct LeveledFamily {
    mode: Mode,
    n: usize,
    embedding_degree: Option<u32>,
    first_level: usize,
    levels: Vec<Level>,
    offsets: Vec<usize>,
    lookup: Vec<HashMap<Monomial, usize>>,
    relations: Vec<Option<PairRelation>>,
}

impl PartialEq for LeveledFamily {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode
            && self.n == other.n
            && self.embedding_degree == other.embedding_degree
            && self.levels == other.levels
    }
}

impl Eq for LeveledFamily {}

/// Notes emitted while building a family that do not make it invalid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildWarning(pub String);

impl fmt::Display for BuildWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl LeveledFamily {
    /// Validates and indexes a family. For Rees mode, `levels` are the ideals
    /// `I_1..I_s`; level 0 is added here. Each entry is `(d_i, generators)`;
    /// generators are deduplicated and revlex-sorted.
    pub fn new(
        mode: Mode,
        n: usize,
        embedding_degree: Option<u32>,
        levels: Vec<(u32, Vec<Monomial>)>,
    ) -> Result<(Self, Vec<BuildWarning>)> {
        if n == 0 {
            return Err(Error::InvalidFamily(
                "variable count must be positive".into(),
            ));
        }
        let first_level = match mode {
            Mode::Rees => 0,
            Mode::Fiber => 1,
        };
        match (mode, embedding_degree) {
            (Mode::Rees, Some(_)) => {
                return Err(Error::InvalidFamily(
                    "embedding_degree only applies to fiber mode".into(),
                ))
            }
            (Mode::Fiber, None) => {
                return Err(Error::InvalidFamily(
                    "fiber mode needs an embedding_degree".into(),
                ))
            }
            (Mode::Fiber, Some(_)) if levels.is_empty() => {
                return Err(Error::InvalidFamily(
                    "fiber mode needs at least one level".into(),
                ))
            }
            _ => {}
        }

        let mut warnings = Vec::new();
        let mut built = Vec::with_capacity(levels.len() + 1);
        if mode == Mode::Rees {
            built.push(Level {
                degree: 1,
                generators: (1..=n).map(|i| Monomial::variable(n, i)).collect(),
            });
        }
        for (k, (degree, gens)) in levels.into_iter().enumerate() {
            let number = k + 1;
            let at = |e: Error| Error::AtLevel {
                level: number,
                source: Box::new(e),
            };
            if degree == 0 {
                return Err(at(Error::InvalidFamily("degree must be positive".into())));
            }
            if gens.is_empty() {
                return Err(at(Error::InvalidFamily("no generators".into())));
            }
            let mut seen = HashSet::new();
            let mut unique = Vec::with_capacity(gens.len());
            for g in gens {
                if g.variables() != n {
                    return Err(at(Error::AmbientMismatch {
                        left: n,
                        right: g.variables(),
                    }));
                }
                if g.degree() != degree {
                    return Err(at(Error::InvalidFamily(format!(
                        "generator {g} has degree {}, expected {degree}",
                        g.degree()
                    ))));
                }
                if seen.insert(g.clone()) {
                    unique.push(g);
                } else {
                    warnings.push(BuildWarning(format!(
                        "level {number}: duplicate generator {g} dropped"
                    )));
                }
            }
            unique.sort_by(|a, b| revlex(b, a));
            built.push(Level {
                degree,
                generators: unique,
            });
        }
        for pair in built.windows(2) {
            if pair[1].degree < pair[0].degree {
                return Err(Error::InvalidFamily(format!(
                    "level degrees must be non-decreasing ({} then {})",
                    pair[0].degree, pair[1].degree
                )));
            }
        }
        if let Some(m) = embedding_degree {
            let top = built.last().map(|l| l.degree).unwrap_or(0);
            if m <= top {
                return Err(Error::InvalidFamily(format!(
                    "embedding degree {m} must exceed the top level degree {top}"
                )));
            }
        }

        let mut offsets = Vec::with_capacity(built.len());
        let mut total = 0;
        for l in &built {
            offsets.push(total);
            total += l.len();
        }
        let lookup = built
            .iter()
            .map(|l| {
                l.generators
                    .iter()
                    .enumerate()
                    .map(|(j, g)| (g.clone(), j + 1))
                    .collect()
            })
            .collect();
        let mut family = LeveledFamily {
            mode,
            n,
            embedding_degree,
            first_level,
            levels: built,
            offsets,
            lookup,
            relations: Vec::new(),
        };
        family.relations = family.compute_relations();
        Ok((family, warnings))
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<(Self, Vec<BuildWarning>)> {
        spec.build()
    }

    pub fn from_json(text: &str) -> Result<(Self, Vec<BuildWarning>)> {
        let spec: FamilySpec = serde_json::from_str(text)?;
        spec.build()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<(Self, Vec<BuildWarning>)> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of variables `n` the generators live in.
    pub fn variables(&self) -> usize {
        self.n
    }

    pub fn embedding_degree(&self) -> Option<u32> {
        self.embedding_degree
    }

    /// Level numbers present: `0..=s` (Rees) or `1..=s` (fiber).
    pub fn level_numbers(&self) -> std::ops::Range<usize> {
        self.first_level..self.first_level + self.levels.len()
    }

    /// `s`, the highest level number.
    pub fn top_level(&self) -> usize {
        self.first_level + self.levels.len() - 1
    }

    /// Number of `t` variables in the Rees image (levels `1..=s`).
    pub fn ideal_count(&self) -> usize {
        self.levels.len() + self.first_level - 1
    }

    pub fn level(&self, number: usize) -> Option<&Level> {
        number
            .checked_sub(self.first_level)
            .and_then(|k| self.levels.get(k))
    }

    pub fn levels(&self) -> impl Iterator<Item = (usize, &Level)> {
        self.levels
            .iter()
            .enumerate()
            .map(move |(k, l)| (k + self.first_level, l))
    }

    /// Total number of generators, i.e. of `T` variables.
    pub fn len(&self) -> usize {
        self.levels.iter().map(Level::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Level::len).collect()
    }

    /// All generator addresses in `<_lex` order.
    pub fn refs(&self) -> Vec<GeneratorRef> {
        self.levels()
            .flat_map(|(i, l)| (1..=l.len()).map(move |j| GeneratorRef::new(i, j)))
            .collect()
    }

    pub fn contains(&self, r: GeneratorRef) -> bool {
        self.level(r.level)
            .is_some_and(|l| r.index >= 1 && r.index <= l.len())
    }

    pub fn check_ref(&self, r: GeneratorRef) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(Error::InvalidRef(format!(
                "{r} is not a generator of this family"
            )))
        }
    }

    /// The monomial `u_ij`; panics on an invalid address.
    pub fn generator(&self, r: GeneratorRef) -> &Monomial {
        &self.level(r.level).expect("valid level").generators[r.index - 1]
    }

    pub fn try_generator(&self, r: GeneratorRef) -> Result<&Monomial> {
        self.check_ref(r)?;
        Ok(self.generator(r))
    }

    pub fn find(&self, level: usize, u: &Monomial) -> Option<GeneratorRef> {
        let k = level.checked_sub(self.first_level)?;
        self.lookup
            .get(k)?
            .get(u)
            .map(|&j| GeneratorRef::new(level, j))
    }

    /// Dense position of a generator in `<_lex` order.
    pub fn flat(&self, r: GeneratorRef) -> usize {
        self.offsets[r.level - self.first_level] + r.index - 1
    }

    pub fn unflat(&self, id: usize) -> GeneratorRef {
        let k = self.offsets.partition_point(|&o| o <= id) - 1;
        GeneratorRef::new(k + self.first_level, id - self.offsets[k] + 1)
    }

    fn compute_relations(&self) -> Vec<Option<PairRelation>> {
        let total = self.len();
        let refs = self.refs();
        let mut out = vec![None; total * total];
        for (a, &ra) in refs.iter().enumerate() {
            for (b, &rb) in refs.iter().enumerate().skip(a + 1) {
                out[a * total + b] = Some(self.relate(ra, rb));
            }
        }
        out
    }

    fn relate(&self, a: GeneratorRef, b: GeneratorRef) -> PairRelation {
        let (u, v) = (self.generator(a), self.generator(b));
        let replacement = if a.level == b.level {
            sort_pair(u, v).expect("same level, same degree")
        } else {
            ord_pair(u, v).expect("lower level has lower or equal degree")
        };
        if replacement.first == *u && replacement.second == *v {
            return PairRelation::Comparable;
        }
        let target = self
            .find(a.level, &replacement.first)
            .zip(self.find(b.level, &replacement.second));
        PairRelation::Incomparable {
            replacement,
            target,
        }
    }

    /// Relation of `a <_lex b`; panics if the refs are invalid or unordered.
    pub fn relation(&self, a: GeneratorRef, b: GeneratorRef) -> &PairRelation {
        let total = self.len();
        self.relations[self.flat(a) * total + self.flat(b)]
            .as_ref()
            .expect("a <_lex b")
    }

    /// Whether `u_a ≺ u_b`, for `a <_lex b`.
    pub fn comparable(&self, a: GeneratorRef, b: GeneratorRef) -> Result<bool> {
        self.check_ref(a)?;
        self.check_ref(b)?;
        if a >= b {
            return Err(Error::InvalidRef(format!(
                "comparability is defined for {a} <_lex {b} only"
            )));
        }
        Ok(self.is_comparable(a, b))
    }

    /// Unchecked comparability of two distinct refs in either orientation;
    /// equal refs count as comparable.
    pub(crate) fn is_comparable(&self, a: GeneratorRef, b: GeneratorRef) -> bool {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => true,
            std::cmp::Ordering::Less => *self.relation(a, b) == PairRelation::Comparable,
            std::cmp::Ordering::Greater => *self.relation(b, a) == PairRelation::Comparable,
        }
    }

    /// Checks closure under comparability. At most `limit` witnesses are
    /// kept (`None` keeps all); the witness list is sorted by pair address.
    pub fn closure_report(&self, limit: Option<usize>, exec: Execution) -> ClosureReport {
        let total = self.len();
        let rows: Vec<(usize, Vec<ClosureWitness>, usize)> = exec.map_range(total, |a| {
            let ra = self.unflat(a);
            let mut witnesses = Vec::new();
            let mut incomparable = 0;
            for b in a + 1..total {
                if let Some(PairRelation::Incomparable {
                    replacement,
                    target,
                }) = &self.relations[a * total + b]
                {
                    incomparable += 1;
                    if target.is_none() {
                        witnesses.push(self.witness(ra, self.unflat(b), replacement));
                    }
                }
            }
            (incomparable, witnesses, a)
        });
        let incomparable_pairs = rows.iter().map(|r| r.0).sum();
        let mut witnesses: Vec<ClosureWitness> = rows.into_iter().flat_map(|r| r.1).collect();
        let violations = witnesses.len();
        witnesses.sort_by_key(|w| w.refs);
        if let Some(limit) = limit {
            witnesses.truncate(limit);
        }
        ClosureReport {
            closed: violations == 0,
            incomparable_pairs,
            violations,
            witnesses,
        }
    }

    /// [`closure_report`](Self::closure_report) with the default witness cap.
    pub fn is_closed_under_comparability(&self) -> ClosureReport {
        self.closure_report(Some(DEFAULT_WITNESS_LIMIT), Execution::default())
    }

    pub fn is_closed(&self) -> bool {
        !self
            .relations
            .iter()
            .any(|rel| matches!(rel, Some(PairRelation::Incomparable { target: None, .. })))
    }

    fn witness(&self, a: GeneratorRef, b: GeneratorRef, rep: &MonomialPair) -> ClosureWitness {
        let mut missing = Vec::new();
        if self.find(a.level, &rep.first).is_none() {
            missing.push(format!("{} at level {}", rep.first, a.level));
        }
        if self.find(b.level, &rep.second).is_none() {
            missing.push(format!("{} at level {}", rep.second, b.level));
        }
        ClosureWitness {
            first: a.to_string(),
            second: b.to_string(),
            product: (self.generator(a).to_string(), self.generator(b).to_string()),
            replacement: (rep.first.to_string(), rep.second.to_string()),
            missing,
            refs: (a, b),
        }
    }

    /// Evaluates the principal-strongly-stable characterization of closure
    /// and reports it next to the direct closure verdict.
    pub fn characterize(&self) -> CharacterizationReport {
        let closed = self.is_closed();
        let ideal_levels: Vec<(usize, &Level)> = self.levels().filter(|(i, _)| *i >= 1).collect();
        let levels: Vec<LevelCharacterization> = ideal_levels
            .iter()
            .map(|&(i, l)| {
                let bottom = l.bottom();
                let closure = borel_closure(bottom).expect("generators are nonconstant");
                let borel_subset = l
                    .generators
                    .iter()
                    .all(|g| borel_member(g, bottom).expect("same level, same degree"));
                LevelCharacterization {
                    level: i,
                    bottom: bottom.to_string(),
                    borel_equal: borel_subset && closure.len() == l.len(),
                    borel_subset,
                }
            })
            .collect();
        let chain: Vec<ChainCondition> = ideal_levels
            .windows(2)
            .map(|w| {
                let (lo, hi) = (w[0].1.bottom(), w[1].1.bottom());
                ChainCondition {
                    lower: w[0].0,
                    upper: w[1].0,
                    holds: lo.max_var() >= hi.min_var(),
                }
            })
            .collect();
        let chain_ok = chain.iter().all(|c| c.holds);
        let conjunction = chain_ok && levels.iter().all(|l| l.borel_equal);
        let consistent = match self.mode {
            Mode::Rees => conjunction == closed,
            Mode::Fiber => {
                (!conjunction || closed)
                    && (!closed || (chain_ok && levels.iter().all(|l| l.borel_subset)))
            }
        };
        CharacterizationReport {
            mode: self.mode,
            levels,
            chain,
            conjunction,
            closed,
            consistent,
        }
    }

    /// The file-format description of this family (explicit generator
    /// lists, level 0 omitted).
    pub fn to_spec(&self) -> FamilySpec {
        FamilySpec {
            mode: self.mode,
            variables: self.n,
            embedding_degree: self.embedding_degree,
            levels: self
                .levels()
                .filter(|(i, _)| *i >= 1)
                .map(|(_, l)| LevelSpec::Explicit {
                    degree: l.degree,
                    generators: l.generators.iter().map(ToString::to_string).collect(),
                })
                .collect(),
        }
    }
}

/// On-disk family description.
///
/// ```json
/// { "mode": "rees", "variables": 4,
///   "levels": [ {"degree": 2, "borel": "x3*x4"},
///               {"degree": 5, "generators": ["x1^5"]} ] }
/// ```
///
/// In Rees mode the listed levels are `I_1..I_s`; level 0 is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub mode: Mode,
    pub variables: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding_degree: Option<u32>,
    #[serde(default)]
    pub levels: Vec<LevelSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum LevelSpec {
    Borel {
        degree: u32,
        borel: String,
    },
    Explicit {
        degree: u32,
        generators: Vec<String>,
    },
}

impl FamilySpec {
    pub fn build(&self) -> Result<(LeveledFamily, Vec<BuildWarning>)> {
        let n = self.variables;
        if n == 0 {
            return Err(Error::InvalidFamily(
                "variable count must be positive".into(),
            ));
        }
        let mut levels = Vec::with_capacity(self.levels.len());
        for (k, level) in self.levels.iter().enumerate() {
            let at = |e: Error| Error::AtLevel {
                level: k + 1,
                source: Box::new(e),
            };
            match level {
                LevelSpec::Borel { degree, borel } => {
                    let u = Monomial::parse(borel, n).map_err(at)?;
                    if u.degree() != *degree {
                        return Err(at(Error::InvalidFamily(format!(
                            "borel({u}) has degree {}, level declares {degree}",
                            u.degree()
                        ))));
                    }
                    levels.push((*degree, borel_closure(&u).map_err(at)?));
                }
                LevelSpec::Explicit { degree, generators } => {
                    let gens = generators
                        .iter()
                        .map(|g| Monomial::parse(g, n))
                        .collect::<Result<Vec<_>>>()
                        .map_err(at)?;
                    levels.push((*degree, gens));
                }
            }
        }
        LeveledFamily::new(self.mode, n, self.embedding_degree, levels)
    }
}
