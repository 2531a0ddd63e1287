//! Monomials in `X_1, ..., X_n` and the pair operations built on their
//! standard factorizations.
//!
//! Variables are ordered `X_1 > X_2 > ... > X_n`, so "larger variable" means
//! "smaller index". The standard factorization of a monomial lists its
//! variables from largest to smallest, i.e. with ascending indices; every
//! positional operation here (ordering, sorting, `max`, `min`) is defined
//! in terms of that list.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Exponent vector over a fixed number of variables. Index 0 holds `X_1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exponents: Vec<u32>,
}

/// Two monomials over the same variables, e.g. the output of
/// [`ord_pair`] or [`sort_pair`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialPair {
    pub first: Monomial,
    pub second: Monomial,
}

impl MonomialPair {
    pub fn new(first: Monomial, second: Monomial) -> Self {
        MonomialPair { first, second }
    }
}

impl fmt::Display for MonomialPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::Degree(
                "a monomial needs at least one variable".into(),
            ));
        }
        Ok(Monomial { exponents })
    }

    /// The empty product over `n` variables.
    pub fn one(n: usize) -> Self {
        Monomial {
            exponents: vec![0; n],
        }
    }

    /// The single variable `X_index` (1-based).
    pub fn variable(n: usize, index: usize) -> Self {
        let mut m = Monomial::one(n);
        m.exponents[index - 1] = 1;
        m
    }

    /// Builds a monomial from a list of 1-based variable indices in any order.
    pub fn from_factors(n: usize, factors: &[usize]) -> Self {
        let mut m = Monomial::one(n);
        for &i in factors {
            m.exponents[i - 1] += 1;
        }
        m
    }

    /// Parses the `x3*x4`, `x1^2*x3`, `1` notation over `n` variables.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Degree("variable count must be positive".into()));
        }
        let text = text.trim();
        if text == "1" {
            return Ok(Monomial::one(n));
        }
        let mut m = Monomial::one(n);
        for raw in text.split('*') {
            let token = raw.trim();
            let body = token
                .strip_prefix('x')
                .or_else(|| token.strip_prefix('X'))
                .ok_or_else(|| Error::parse(token, "expected a variable `x<index>`"))?;
            let (index_text, exp_text) = match body.split_once('^') {
                Some((i, e)) => (i, Some(e)),
                None => (body, None),
            };
            let index: usize = parse_digits(index_text)
                .ok_or_else(|| Error::parse(token, "variable index is not a number"))?;
            if index == 0 || index > n {
                return Err(Error::parse(
                    token,
                    format!("variable index must lie in 1..={n}"),
                ));
            }
            let exponent: u32 = match exp_text {
                Some(e) => parse_digits(e)
                    .ok_or_else(|| Error::parse(token, "exponent is not a number"))?,
                None => 1,
            };
            if exponent == 0 {
                return Err(Error::parse(token, "exponent must be at least 1"));
            }
            let slot = &mut m.exponents[index - 1];
            *slot = slot
                .checked_add(exponent)
                .ok_or_else(|| Error::parse(token, "exponent overflow"))?;
        }
        Ok(m)
    }

    /// Number of ambient variables.
    pub fn variables(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Standard factorization as 1-based indices, ascending (largest
    /// variable first).
    pub fn factors(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for (i, &e) in self.exponents.iter().enumerate() {
            out.extend(std::iter::repeat_n(i + 1, e as usize));
        }
        out
    }

    /// Index of `max(u)`, the largest variable dividing `u`.
    pub fn max_var(&self) -> Option<usize> {
        self.exponents.iter().position(|&e| e > 0).map(|i| i + 1)
    }

    /// Index of `min(u)`, the smallest variable dividing `u`.
    pub fn min_var(&self) -> Option<usize> {
        self.exponents.iter().rposition(|&e| e > 0).map(|i| i + 1)
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        check_ambient(self, other)?;
        Ok(Monomial {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Re-embeds into `n >= variables()` variables, padding with zeros.
    pub fn extend_to(&self, n: usize) -> Monomial {
        let mut exponents = self.exponents.clone();
        exponents.resize(n.max(self.exponents.len()), 0);
        Monomial { exponents }
    }
}

fn parse_digits<T: std::str::FromStr>(s: &str) -> Option<T> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

fn check_ambient(u: &Monomial, v: &Monomial) -> Result<()> {
    if u.variables() != v.variables() {
        return Err(Error::AmbientMismatch {
            left: u.variables(),
            right: v.variables(),
        });
    }
    Ok(())
}

/// Graded reverse-lexicographic comparison, `X_1 > ... > X_n`.
pub fn revlex_cmp(u: &Monomial, v: &Monomial) -> Result<Ordering> {
    check_ambient(u, v)?;
    Ok(revlex(u, v))
}

/// Unchecked [`revlex_cmp`]; callers guarantee equal ambient counts.
pub(crate) fn revlex(u: &Monomial, v: &Monomial) -> Ordering {
    u.degree().cmp(&v.degree()).then_with(|| {
        // u > v iff the last nonzero entry of u - v is negative
        for (a, b) in u.exponents.iter().zip(&v.exponents).rev() {
            match a.cmp(b) {
                Ordering::Equal => continue,
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            }
        }
        Ordering::Equal
    })
}

/// The ordering `ord(u, v)`: the `deg(u)` smallest variables of `uv` go to
/// the first component, the rest to the second.
pub fn ord_pair(u: &Monomial, v: &Monomial) -> Result<MonomialPair> {
    check_ambient(u, v)?;
    let (p, q) = (u.degree() as usize, v.degree() as usize);
    if p > q {
        return Err(Error::Degree(format!(
            "ord(u, v) needs deg(u) <= deg(v), got {p} > {q}"
        )));
    }
    let n = u.variables();
    let factors = u.mul(v)?.factors();
    Ok(MonomialPair::new(
        Monomial::from_factors(n, &factors[q..]),
        Monomial::from_factors(n, &factors[..q]),
    ))
}

/// The sorting `sort(u, v)`: odd and even positions of the standard
/// factorization of `uv`.
pub fn sort_pair(u: &Monomial, v: &Monomial) -> Result<MonomialPair> {
    check_ambient(u, v)?;
    if u.degree() != v.degree() {
        return Err(Error::Degree(format!(
            "sort(u, v) needs equal degrees, got {} and {}",
            u.degree(),
            v.degree()
        )));
    }
    let n = u.variables();
    let factors = u.mul(v)?.factors();
    let odd: Vec<usize> = factors.iter().step_by(2).copied().collect();
    let even: Vec<usize> = factors.iter().skip(1).step_by(2).copied().collect();
    Ok(MonomialPair::new(
        Monomial::from_factors(n, &odd),
        Monomial::from_factors(n, &even),
    ))
}

/// Whether `w2` lies in the principal strongly stable set of `w1`, by
/// suffix-sum dominance.
pub fn borel_member(w2: &Monomial, w1: &Monomial) -> Result<bool> {
    check_ambient(w1, w2)?;
    if w1.degree() != w2.degree() {
        return Err(Error::Degree(format!(
            "Borel membership needs equal degrees, got {} and {}",
            w2.degree(),
            w1.degree()
        )));
    }
    let (mut beta, mut alpha) = (0u64, 0u64);
    for k in (1..w1.variables()).rev() {
        beta += u64::from(w2.exponents[k]);
        alpha += u64::from(w1.exponents[k]);
        if beta > alpha {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All monomials of degree `d` in `n` variables, in no particular order.
pub(crate) fn all_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(prefix: &mut Vec<u32>, n: usize, left: u32, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(Monomial {
                exponents: prefix.clone(),
            });
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(prefix, n, left - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), n, d, &mut out);
    out
}

/// The principal strongly stable set `B(u)`, sorted descending by revlex.
/// `X_1^d` comes first and `u` itself last.
pub fn borel_closure(u: &Monomial) -> Result<Vec<Monomial>> {
    let d = u.degree();
    if d == 0 {
        return Err(Error::Degree("B(u) needs a nonconstant monomial".into()));
    }
    let mut set: Vec<Monomial> = all_of_degree(u.variables(), d)
        .into_iter()
        .filter(|v| borel_member(v, u).expect("same degree and ambient"))
        .collect();
    set.sort_by(|a, b| revlex(b, a));
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::{HashSet, VecDeque};

    fn m(text: &str, n: usize) -> Monomial {
        Monomial::parse(text, n).unwrap()
    }

    fn pair(a: &str, b: &str, n: usize) -> MonomialPair {
        MonomialPair::new(m(a, n), m(b, n))
    }

    /// Revlex straight from standard factorizations: compare the last
    /// position where the factor lists differ.
    fn revlex_by_factors(u: &Monomial, v: &Monomial) -> Ordering {
        let (fu, fv) = (u.factors(), v.factors());
        if fu.len() != fv.len() {
            return fu.len().cmp(&fv.len());
        }
        for k in (0..fu.len()).rev() {
            if fu[k] != fv[k] {
                // smaller index = larger variable
                return fv[k].cmp(&fu[k]);
            }
        }
        Ordering::Equal
    }

    /// B(u) by closing under the moves X_i / X_j with i < j.
    fn borel_bfs(u: &Monomial) -> HashSet<Monomial> {
        let mut seen = HashSet::from([u.clone()]);
        let mut queue = VecDeque::from([u.clone()]);
        while let Some(v) = queue.pop_front() {
            for j in 0..v.variables() {
                if v.exponents[j] == 0 {
                    continue;
                }
                for i in 0..j {
                    let mut w = v.clone();
                    w.exponents[j] -= 1;
                    w.exponents[i] += 1;
                    if seen.insert(w.clone()) {
                        queue.push_back(w);
                    }
                }
            }
        }
        seen
    }

    /// The exponent-level description of sorting: halves off the odd set J,
    /// alternating +-1 on J.
    fn sort_closed_form(u: &Monomial, v: &Monomial) -> MonomialPair {
        let n = u.variables();
        let mut a = vec![0; n];
        let mut b = vec![0; n];
        let mut r = 0;
        for i in 0..n {
            let s = u.exponents[i] + v.exponents[i];
            if s.is_multiple_of(2) {
                a[i] = s / 2;
                b[i] = s / 2;
            } else {
                r += 1;
                if r % 2 == 1 {
                    a[i] = s.div_ceil(2);
                    b[i] = s / 2;
                } else {
                    a[i] = s / 2;
                    b[i] = s.div_ceil(2);
                }
            }
        }
        MonomialPair::new(Monomial { exponents: a }, Monomial { exponents: b })
    }

    #[test]
    fn parse_examples() {
        assert_eq!(m("x3*x4", 4).exponents(), &[0, 0, 1, 1]);
        assert_eq!(m("1", 4).exponents(), &[0, 0, 0, 0]);
        assert_eq!(m("x1^2*x3", 4).exponents(), &[2, 0, 1, 0]);
        assert_eq!(m("x2*x1*x2", 3).exponents(), &[1, 2, 0]);
    }

    #[test]
    fn parse_errors_name_the_token() {
        for (text, token) in [
            ("x5", "x5"),
            ("x0", "x0"),
            ("x1*y2", "y2"),
            ("x1^0", "x1^0"),
            ("x1**x2", ""),
            ("x1^", "x1^"),
        ] {
            match Monomial::parse(text, 4) {
                Err(Error::Parse { token: t, .. }) => assert_eq!(t, token, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(m("x3*x1^2*x3", 4).to_string(), "x1^2*x3^2");
        assert_eq!(Monomial::one(3).to_string(), "1");
    }

    #[test]
    fn revlex_examples() {
        assert_eq!(
            revlex_cmp(&m("x2^2", 4), &m("x1*x3", 4)).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            revlex_cmp(&m("x1^2", 4), &m("x1^2", 4)).unwrap(),
            Ordering::Equal
        );
        assert_eq!(
            revlex_cmp(&m("x3^2", 4), &m("x1*x4", 4)).unwrap(),
            Ordering::Greater
        );
        assert!(matches!(
            revlex_cmp(&m("x1", 3), &m("x1", 4)),
            Err(Error::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn ord_examples() {
        assert_eq!(
            ord_pair(&m("x1^2*x3", 4), &m("x2*x3*x4", 4)).unwrap(),
            pair("x3^2*x4", "x1^2*x2", 4)
        );
        assert_eq!(
            ord_pair(&m("x2", 4), &m("x1^3", 4)).unwrap(),
            pair("x2", "x1^3", 4)
        );
        assert_eq!(
            ord_pair(&m("x1", 4), &m("x2^2*x3", 4)).unwrap(),
            pair("x3", "x1*x2^2", 4)
        );
        assert!(matches!(
            ord_pair(&m("x1^2", 4), &m("x1", 4)),
            Err(Error::Degree(_))
        ));
    }

    #[test]
    fn sort_examples() {
        assert_eq!(
            sort_pair(&m("x1^2*x3", 4), &m("x2*x3*x4", 4)).unwrap(),
            pair("x1*x2*x3", "x1*x3*x4", 4)
        );
        let u = m("x2*x4^2", 4);
        assert_eq!(sort_pair(&u, &u).unwrap(), MonomialPair::new(u.clone(), u));
        assert_eq!(
            sort_pair(&m("x2^2", 4), &m("x1*x3", 4)).unwrap(),
            pair("x1*x2", "x2*x3", 4)
        );
        assert!(matches!(
            sort_pair(&m("x1^2", 4), &m("x1", 4)),
            Err(Error::Degree(_))
        ));
    }

    #[test]
    fn borel_member_examples() {
        assert!(borel_member(&m("x2*x4", 4), &m("x3*x4", 4)).unwrap());
        let w = m("x1*x3^2", 4);
        assert!(borel_member(&w, &w).unwrap());
        assert!(!borel_member(&m("x4^2", 4), &m("x3*x4", 4)).unwrap());
        assert!(borel_member(&m("x1", 4), &m("x1^2", 4)).is_err());
    }

    #[test]
    fn borel_closure_tables() {
        let show = |u: &str| -> Vec<String> {
            borel_closure(&m(u, 4))
                .unwrap()
                .iter()
                .map(ToString::to_string)
                .collect()
        };
        assert_eq!(
            show("x3*x4"),
            ["x1^2", "x1*x2", "x2^2", "x1*x3", "x2*x3", "x3^2", "x1*x4", "x2*x4", "x3*x4"]
        );
        assert_eq!(
            show("x2^2*x3"),
            ["x1^3", "x1^2*x2", "x1*x2^2", "x2^3", "x1^2*x3", "x1*x2*x3", "x2^2*x3"]
        );
        assert_eq!(show("x1*x2^2"), ["x1^3", "x1^2*x2", "x1*x2^2"]);
        assert_eq!(show("x1^5"), ["x1^5"]);
        assert!(borel_closure(&Monomial::one(3)).is_err());
    }

    fn arb_monomial(n: usize, d: u32) -> impl Strategy<Value = Monomial> {
        proptest::collection::vec(1..=n, d as usize)
            .prop_map(move |f| Monomial::from_factors(n, &f))
    }

    fn arb_same_degree_pair() -> impl Strategy<Value = (Monomial, Monomial)> {
        (1usize..=6, 1u32..=5).prop_flat_map(|(n, d)| (arb_monomial(n, d), arb_monomial(n, d)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn revlex_closed_form_matches_factorization((u, v) in arb_same_degree_pair()) {
            prop_assert_eq!(revlex(&u, &v), revlex_by_factors(&u, &v));
            prop_assert_eq!(revlex(&u, &v), revlex(&v, &u).reverse());
            prop_assert_eq!(revlex(&u, &v) == Ordering::Equal, u == v);
        }
    }

    proptest! {
        #[test]
        fn sort_matches_exponent_description((u, v) in arb_same_degree_pair()) {
            let s = sort_pair(&u, &v).unwrap();
            prop_assert_eq!(&s, &sort_closed_form(&u, &v));
            prop_assert_eq!(s.first.mul(&s.second).unwrap(), u.mul(&v).unwrap());
            prop_assert_eq!(s.first.degree(), u.degree());
            prop_assert_ne!(revlex(&s.first, &s.second), Ordering::Less);
            prop_assert_eq!(sort_pair(&s.first, &s.second).unwrap(), s);
        }

        #[test]
        fn ord_preserves_product_and_split(
            (n, p, q) in (1usize..=6, 1u32..=4, 0u32..=3),
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let q = p + q;
            let u = Monomial::from_factors(n, &(0..p).map(|_| rng.gen_range(1..=n)).collect::<Vec<_>>());
            let v = Monomial::from_factors(n, &(0..q).map(|_| rng.gen_range(1..=n)).collect::<Vec<_>>());
            let o = ord_pair(&u, &v).unwrap();
            prop_assert_eq!(o.first.mul(&o.second).unwrap(), u.mul(&v).unwrap());
            prop_assert_eq!(o.first.degree(), p);
            prop_assert_eq!(o.second.degree(), q);
            // max(û) <= min(v̂) in variable order
            prop_assert!(o.first.max_var().unwrap() >= o.second.min_var().unwrap());
            prop_assert_eq!(ord_pair(&o.first, &o.second).unwrap(), o);
        }

        #[test]
        fn closure_matches_bfs_and_filter(u in (1usize..=5, 1u32..=4).prop_flat_map(|(n, d)| arb_monomial(n, d))) {
            let listed = borel_closure(&u).unwrap();
            let as_set: HashSet<Monomial> = listed.iter().cloned().collect();
            prop_assert_eq!(as_set.len(), listed.len());
            prop_assert_eq!(&as_set, &borel_bfs(&u));
            prop_assert_eq!(listed.last().unwrap(), &u);
            prop_assert_eq!(listed[0].max_var(), Some(1));
            prop_assert_eq!(listed[0].degree(), listed[0].exponents()[0]);
            for w in listed.windows(2) {
                prop_assert_eq!(revlex(&w[0], &w[1]), Ordering::Greater);
            }
        }

        #[test]
        fn sorting_stays_in_borel_set(
            w in (1usize..=5, 1u32..=4).prop_flat_map(|(n, d)| arb_monomial(n, d)),
            picks in (any::<prop::sample::Index>(), any::<prop::sample::Index>()),
        ) {
            let set = borel_closure(&w).unwrap();
            let (a, b) = (picks.0.get(&set), picks.1.get(&set));
            let s = sort_pair(a, b).unwrap();
            prop_assert!(borel_member(&s.first, &w).unwrap());
            prop_assert!(borel_member(&s.second, &w).unwrap());
        }
    }
}
