//! Finitely presented graded-commutative algebras over GF(2).
//!
//! A presentation is a list of generators with positive degrees and a list of
//! rewrite rules `lhs -> rhs`, where `lhs` is a monomial and every monomial of
//! `rhs` is strictly smaller in the monomial order. In characteristic two there
//! are no signs, so the algebra is an ordinary commutative polynomial quotient.
//!
//! Monomial order: weighted degree first, then exponents compared starting
//! from the *last* listed generator. For the Wall ring (generators listed
//! `x, c, d`) this makes `c^(m+1)` larger than `c^m x`, so the relation is
//! oriented `c^(m+1) -> c^m x`.
//!
//! Presentations are checked for confluence on construction. A rule set whose
//! critical pairs do not join is rejected with the offending overlap.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("generator `{0}` must have positive degree")]
    ZeroDegree(String),
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("rule {lhs} -> {rhs} is not homogeneous")]
    NotHomogeneous { lhs: String, rhs: String },
    #[error("rule {lhs} -> {rhs}: right-hand side is not smaller than the left")]
    NotDecreasing { lhs: String, rhs: String },
    #[error("rule with unit left-hand side collapses the algebra")]
    UnitLhs,
    #[error("presentation is not confluent: overlap {overlap} rewrites to {left} and to {right}")]
    NotConfluent {
        overlap: String,
        left: String,
        right: String,
    },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Self {
            name: name.into(),
            degree,
        }
    }
}

/// A monomial `prod g_i^{e_i}` with its weighted degree cached.
///
/// Monomials only compare meaningfully within one presentation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(num_generators: usize) -> Self {
        Self {
            degree: 0,
            exps: vec![0; num_generators],
        }
    }

    pub fn from_exponents(exps: Vec<u32>, degrees: &[u32]) -> Self {
        assert_eq!(exps.len(), degrees.len(), "exponent vector length");
        let degree = exps.iter().zip(degrees).map(|(e, d)| e * d).sum();
        Self { degree, exps }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            degree: self.degree + other.degree,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `self / other`; caller guarantees divisibility.
    pub fn div(&self, other: &Monomial) -> Monomial {
        debug_assert!(other.divides(self));
        Monomial {
            degree: self.degree - other.degree,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn lcm(&self, other: &Monomial, degrees: &[u32]) -> Monomial {
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| *a.max(b))
            .collect();
        Monomial::from_exponents(exps, degrees)
    }

    /// Removes one factor of generator `i`.
    pub fn without(&self, i: usize, degree_of_i: u32) -> Monomial {
        let mut m = self.clone();
        m.exps[i] -= 1;
        m.degree -= degree_of_i;
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.exps.iter().rev().cmp(other.exps.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A GF(2) sum of distinct monomials. Not necessarily in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Element {
    terms: BTreeSet<Monomial>,
}

impl Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one(num_generators: usize) -> Self {
        Self::from(Monomial::one(num_generators))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = &Monomial> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&Monomial> {
        self.terms.last()
    }

    /// Degree shared by all terms; `None` for zero or for a non-homogeneous sum.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.iter().map(Monomial::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Element) {
        for m in &other.terms {
            self.toggle(m.clone());
        }
    }

    /// Product without reduction.
    pub fn mul_raw(&self, other: &Element) -> Element {
        let mut out = Element::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.mul(b));
            }
        }
        out
    }

    pub fn times_monomial(&self, m: &Monomial) -> Element {
        let mut out = Element::zero();
        for a in &self.terms {
            out.toggle(a.mul(m));
        }
        out
    }
}

impl From<Monomial> for Element {
    fn from(m: Monomial) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(m);
        Self { terms }
    }
}

impl FromIterator<Monomial> for Element {
    fn from_iter<I: IntoIterator<Item = Monomial>>(iter: I) -> Self {
        let mut e = Element::zero();
        for m in iter {
            e.toggle(m);
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: Monomial,
    pub rhs: Element,
}

/// A critical pair that fails to join.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPairFailure {
    pub rules: (usize, usize),
    pub overlap: Monomial,
    pub via_first: Element,
    pub via_second: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraPresentation {
    generators: Vec<Generator>,
    degrees: Vec<u32>,
    rules: Vec<RewriteRule>,
    /// Exclusive exponent bound per generator from pure-power rules.
    power_bounds: Vec<Option<u32>>,
    top_degree: Option<u32>,
}

impl AlgebraPresentation {
    /// Validates the generators and rules, checks confluence and computes the
    /// top degree (`None` when the algebra is infinite-dimensional).
    pub fn new(generators: Vec<Generator>, rules: Vec<RewriteRule>) -> Result<Self, AlgebraError> {
        let p = Self::new_unchecked(generators, rules)?;
        if let Err(fail) = p.check_confluence() {
            return Err(AlgebraError::NotConfluent {
                overlap: p.fmt_monomial(&fail.overlap),
                left: p.fmt_element(&fail.via_first),
                right: p.fmt_element(&fail.via_second),
            });
        }
        Ok(p)
    }

    /// Like [`Self::new`] but without the confluence check. Normal forms of a
    /// non-confluent presentation depend on the rewrite order.
    pub fn new_unchecked(
        generators: Vec<Generator>,
        rules: Vec<RewriteRule>,
    ) -> Result<Self, AlgebraError> {
        let mut seen = BTreeSet::new();
        for g in &generators {
            if !is_identifier(&g.name) {
                return Err(AlgebraError::InvalidName(g.name.clone()));
            }
            if g.degree == 0 {
                return Err(AlgebraError::ZeroDegree(g.name.clone()));
            }
            if !seen.insert(g.name.clone()) {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
        }
        let degrees: Vec<u32> = generators.iter().map(|g| g.degree).collect();
        let mut p = Self {
            generators,
            degrees,
            rules: Vec::new(),
            power_bounds: Vec::new(),
            top_degree: None,
        };
        for r in &rules {
            if r.lhs.is_one() {
                return Err(AlgebraError::UnitLhs);
            }
            let lhs = p.fmt_monomial(&r.lhs);
            let rhs = p.fmt_element(&r.rhs);
            if r.rhs.terms().any(|m| m.degree() != r.lhs.degree()) {
                return Err(AlgebraError::NotHomogeneous { lhs, rhs });
            }
            if r.rhs.terms().any(|m| m >= &r.lhs) {
                return Err(AlgebraError::NotDecreasing { lhs, rhs });
            }
        }
        p.rules = rules;
        p.power_bounds = (0..p.generators.len())
            .map(|i| {
                p.rules
                    .iter()
                    .filter(|r| r.lhs.exps.iter().enumerate().all(|(j, &e)| j == i || e == 0))
                    .map(|r| r.lhs.exps[i])
                    .min()
            })
            .collect();
        p.top_degree = p.compute_top_degree();
        Ok(p)
    }

    fn compute_top_degree(&self) -> Option<u32> {
        let mut bound = 0;
        for (b, d) in self.power_bounds.iter().zip(&self.degrees) {
            bound += (b.as_ref()? - 1) * d;
        }
        (0..=bound).rev().find(|&q| !self.degree_basis(q).is_empty())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    /// Degree above which every element is zero; `None` if infinite.
    pub fn top_degree(&self) -> Option<u32> {
        self.top_degree
    }

    pub fn max_generator_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn one(&self) -> Monomial {
        Monomial::one(self.num_generators())
    }

    pub fn unit(&self) -> Element {
        Element::one(self.num_generators())
    }

    pub fn gen_monomial(&self, i: usize) -> Monomial {
        self.gen_power(i, 1)
    }

    pub fn gen_power(&self, i: usize, k: u32) -> Monomial {
        let mut exps = vec![0; self.num_generators()];
        exps[i] = k;
        Monomial::from_exponents(exps, &self.degrees)
    }

    pub fn monomial(&self, exps: Vec<u32>) -> Monomial {
        Monomial::from_exponents(exps, &self.degrees)
    }

    /// Generator by name as an element; panics on unknown names.
    pub fn var(&self, name: &str) -> Element {
        let i = self
            .generator_index(name)
            .unwrap_or_else(|| panic!("no generator named {name}"));
        Element::from(self.gen_monomial(i))
    }

    pub fn is_reducible(&self, m: &Monomial) -> bool {
        self.rules.iter().any(|r| r.lhs.divides(m))
    }

    pub fn is_normal(&self, e: &Element) -> bool {
        e.terms().all(|m| !self.is_reducible(m))
    }

    /// Normal form, rewriting the largest reducible monomial first.
    pub fn normal_form(&self, e: &Element) -> Element {
        let mut pending = e.terms.clone();
        let mut out = Element::zero();
        while let Some(m) = pending.pop_last() {
            match self.rules.iter().find(|r| r.lhs.divides(&m)) {
                Some(rule) => {
                    let cofactor = m.div(&rule.lhs);
                    for t in rule.rhs.terms() {
                        let n = t.mul(&cofactor);
                        if !pending.remove(&n) {
                            pending.insert(n);
                        }
                    }
                }
                None => out.toggle(m),
            }
        }
        out
    }

    /// Normal form under an arbitrary rewrite strategy. At every step the
    /// chooser receives the number of available (monomial, rule) redexes and
    /// returns the index of the one to apply.
    pub fn normal_form_by(&self, e: &Element, choose: &mut dyn FnMut(usize) -> usize) -> Element {
        let mut cur = e.clone();
        loop {
            let redexes: Vec<(&Monomial, &RewriteRule)> = cur
                .terms()
                .flat_map(|m| self.rules.iter().filter(|r| r.lhs.divides(m)).map(move |r| (m, r)))
                .collect();
            if redexes.is_empty() {
                return cur;
            }
            let (m, rule) = redexes[choose(redexes.len()) % redexes.len()];
            let (m, rule) = (m.clone(), rule.clone());
            let cofactor = m.div(&rule.lhs);
            cur.toggle(m);
            cur.add_assign(&rule.rhs.times_monomial(&cofactor));
        }
    }

    /// Resolves every critical pair: for rules `i < j` with lhs's `L_i`, `L_j`,
    /// both one-step rewrites of `lcm(L_i, L_j)` must share a normal form.
    pub fn check_confluence(&self) -> Result<(), CriticalPairFailure> {
        for (i, a) in self.rules.iter().enumerate() {
            for (j, b) in self.rules.iter().enumerate().skip(i + 1) {
                let l = a.lhs.lcm(&b.lhs, &self.degrees);
                let via_a = a.rhs.times_monomial(&l.div(&a.lhs));
                let via_b = b.rhs.times_monomial(&l.div(&b.lhs));
                let (na, nb) = (self.normal_form(&via_a), self.normal_form(&via_b));
                if na != nb {
                    return Err(CriticalPairFailure {
                        rules: (i, j),
                        overlap: l,
                        via_first: na,
                        via_second: nb,
                    });
                }
            }
        }
        Ok(())
    }

    /// All monomials of weighted degree `q`, ascending, respecting pure-power
    /// exponent bounds when present.
    pub fn monomials_of_degree(&self, q: u32) -> Vec<Monomial> {
        self.collect_monomials(q, true)
    }

    /// All monomials of weighted degree `q` in the free algebra, ascending.
    pub fn free_monomials_of_degree(&self, q: u32) -> Vec<Monomial> {
        self.collect_monomials(q, false)
    }

    fn collect_monomials(&self, q: u32, bounded: bool) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0; self.num_generators()];
        self.enumerate(0, q, bounded, &mut exps, &mut out);
        out.sort();
        out
    }

    fn enumerate(
        &self,
        i: usize,
        remaining: u32,
        bounded: bool,
        exps: &mut Vec<u32>,
        out: &mut Vec<Monomial>,
    ) {
        if i == self.num_generators() {
            if remaining == 0 {
                out.push(Monomial::from_exponents(exps.clone(), &self.degrees));
            }
            return;
        }
        let d = self.degrees[i];
        let mut cap = remaining / d;
        if let (true, Some(b)) = (bounded, self.power_bounds[i]) {
            cap = cap.min(b - 1);
        }
        for e in 0..=cap {
            exps[i] = e;
            self.enumerate(i + 1, remaining - e * d, bounded, exps, out);
        }
        exps[i] = 0;
    }

    /// Normal-form monomials of degree `q` in ascending order.
    pub fn degree_basis(&self, q: u32) -> Vec<Monomial> {
        if self.top_degree.is_some_and(|t| q > t) {
            return Vec::new();
        }
        self.monomials_of_degree(q)
            .into_iter()
            .filter(|m| !self.is_reducible(m))
            .collect()
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        self.normal_form(&a.mul_raw(b))
    }

    pub fn pow(&self, a: &Element, k: u32) -> Element {
        let mut acc = self.unit();
        for _ in 0..k {
            acc = self.multiply(&acc, a);
        }
        acc
    }

    pub fn poincare_series(&self, up_to: u32) -> Vec<usize> {
        (0..=up_to).map(|q| self.degree_basis(q).len()).collect()
    }

    /// Total dimension; `None` when infinite.
    pub fn total_dimension(&self) -> Option<usize> {
        let top = self.top_degree?;
        Some(self.poincare_series(top).iter().sum())
    }

    // ---- formatting and parsing -------------------------------------------------

    pub fn fmt_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for (g, &e) in self.generators.iter().zip(&m.exps) {
            match e {
                0 => {}
                1 => parts.push(g.name.clone()),
                _ => parts.push(format!("{}^{}", g.name, e)),
            }
        }
        parts.join("*")
    }

    /// Terms listed from the largest monomial down.
    pub fn fmt_element(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".into();
        }
        e.terms()
            .rev()
            .map(|m| self.fmt_monomial(m))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn parse_monomial(&self, s: &str) -> Result<Monomial, String> {
        let s = s.trim();
        if s == "1" {
            return Ok(self.one());
        }
        let mut exps = vec![0; self.num_generators()];
        for factor in s.split('*') {
            let factor = factor.trim();
            let (name, power) = match factor.split_once('^') {
                Some((n, k)) => (
                    n.trim(),
                    k.trim()
                        .parse::<u32>()
                        .map_err(|_| format!("bad exponent in `{factor}`"))?,
                ),
                None => (factor, 1),
            };
            if name == "1" {
                continue;
            }
            let i = self
                .generator_index(name)
                .ok_or_else(|| format!("unknown generator `{name}`"))?;
            exps[i] += power;
        }
        Ok(self.monomial(exps))
    }

    pub fn parse_element(&self, s: &str) -> Result<Element, String> {
        let s = s.trim();
        if s == "0" {
            return Ok(Element::zero());
        }
        let mut e = Element::zero();
        for term in s.split('+') {
            e.toggle(self.parse_monomial(term)?);
        }
        Ok(e)
    }

    /// Text form: `gen <name> <degree>` lines then `rel <lhs> = <rhs>` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.generators {
            let _ = writeln!(out, "gen {} {}", g.name, g.degree);
        }
        for r in &self.rules {
            let _ = writeln!(
                out,
                "rel {} = {}",
                self.fmt_monomial(&r.lhs),
                self.fmt_element(&r.rhs)
            );
        }
        out
    }

    /// Parses the text form. Each relation `a = b` is read as the polynomial
    /// `a + b` and oriented with its largest monomial on the left. Blank
    /// lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        let mut generators = Vec::new();
        let mut relations = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| AlgebraError::Parse {
                line: no + 1,
                message,
            };
            let (kw, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| err(format!("expected `gen` or `rel`, found `{line}`")))?;
            match kw {
                "gen" => {
                    let mut it = rest.split_whitespace();
                    let (Some(name), Some(deg), None) = (it.next(), it.next(), it.next()) else {
                        return Err(err("expected `gen <name> <degree>`".into()));
                    };
                    let degree = deg
                        .parse::<u32>()
                        .map_err(|_| err(format!("bad degree `{deg}`")))?;
                    generators.push(Generator::new(name, degree));
                }
                "rel" => {
                    let (l, r) = rest
                        .split_once('=')
                        .ok_or_else(|| err("expected `rel <monomial> = <polynomial>`".into()))?;
                    relations.push((no + 1, l.to_string(), r.to_string()));
                }
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }
        let scaffold = Self::new_unchecked(generators.clone(), Vec::new())?;
        let mut rules = Vec::new();
        for (line, l, r) in relations {
            let err = |message: String| AlgebraError::Parse { line, message };
            let mut poly = scaffold.parse_element(&l).map_err(err)?;
            poly.add_assign(&scaffold.parse_element(&r).map_err(err)?);
            let Some(lead) = poly.leading().cloned() else {
                continue;
            };
            poly.toggle(lead.clone());
            rules.push(RewriteRule { lhs: lead, rhs: poly });
        }
        Self::new(generators, rules)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn rule(p: &AlgebraPresentation, lhs: Monomial, rhs: Element) -> RewriteRule {
    debug_assert!(rhs.terms().all(|m| m < &lhs), "{}", p.fmt_monomial(&lhs));
    RewriteRule { lhs, rhs }
}

/// `Z2[x, c, d] / (x^2, c^(m+1) + c^m x, d^(n+1))`, with `|x| = |c| = 1` and
/// `|d| = 2`; the cohomology of the Wall manifold `Q(m, n)`.
pub fn wall_presentation(m: u32, n: u32) -> AlgebraPresentation {
    let gens = vec![
        Generator::new("x", 1),
        Generator::new("c", 1),
        Generator::new("d", 2),
    ];
    let scaffold = AlgebraPresentation::new_unchecked(gens.clone(), Vec::new()).expect("valid");
    let rules = vec![
        rule(&scaffold, scaffold.gen_power(0, 2), Element::zero()),
        rule(
            &scaffold,
            scaffold.gen_power(1, m + 1),
            Element::from(scaffold.monomial(vec![1, m, 0])),
        ),
        rule(&scaffold, scaffold.gen_power(2, n + 1), Element::zero()),
    ];
    let p = AlgebraPresentation::new(gens, rules).expect("Wall presentation is confluent");
    debug_assert_eq!(p.top_degree(), Some(m + 2 * n + 1));
    p
}

/// `Z2[c, d] / (c^(m+1), d^(n+1))`, the Dold manifold `P(m, n)`.
pub fn dold_presentation(m: u32, n: u32) -> AlgebraPresentation {
    let gens = vec![Generator::new("c", 1), Generator::new("d", 2)];
    let scaffold = AlgebraPresentation::new_unchecked(gens.clone(), Vec::new()).expect("valid");
    let rules = vec![
        rule(&scaffold, scaffold.gen_power(0, m + 1), Element::zero()),
        rule(&scaffold, scaffold.gen_power(1, n + 1), Element::zero()),
    ];
    AlgebraPresentation::new(gens, rules).expect("monomial rules are confluent")
}

/// Exterior algebra on one generator `a` of degree `n`.
pub fn sphere_presentation(n: u32) -> AlgebraPresentation {
    assert!(n >= 1, "sphere dimension must be positive");
    let gens = vec![Generator::new("a", n)];
    let scaffold = AlgebraPresentation::new_unchecked(gens.clone(), Vec::new()).expect("valid");
    let rules = vec![rule(&scaffold, scaffold.gen_power(0, 2), Element::zero())];
    AlgebraPresentation::new(gens, rules).expect("confluent")
}

/// `Z2[t]` with `|t| = 1`, the cohomology of the classifying space of Z/2.
pub fn base_presentation() -> AlgebraPresentation {
    AlgebraPresentation::new(vec![Generator::new("t", 1)], Vec::new()).expect("free")
}

/// Cohomology of a point.
pub fn point_presentation() -> AlgebraPresentation {
    AlgebraPresentation::new(Vec::new(), Vec::new()).expect("empty")
}
