//! Cohomology ring of the orbit space read off a surviving E∞ page.
//!
//! Generators are found cell by cell in order of total degree: whenever the
//! products of the generators found so far fail to span a cell of E∞, the
//! missing coset representatives become new generators. Relations are the
//! kernel of the map from monomials in those generators to `Tot(E∞)`, reduced
//! to a Gröbner basis degree by degree. Everything is computed in the
//! associated graded ring; relations that a different choice of lifts could
//! change are reported as extension-sensitive.

use std::collections::HashMap;

use thiserror::Error;

use crate::f2::{kernel_basis, BitMatrix, BitVec, Subspace};
use crate::graded::{AlgebraError, AlgebraPresentation, Element, Generator, Monomial, RewriteRule};
use crate::spectral::{Bigraded, BorelFiber, Page};

const GREEK: [&str; 24] = [
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda",
    "mu", "nu", "xi", "omicron", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("ambiguous extension: relation {relation} in degree {degree} holds only modulo higher filtration")]
    AmbiguousExtension { relation: String, degree: u32 },
    #[error("E-infinity page does not cover total degree {0}")]
    WindowTooSmall(u32),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Where a generator sits in the E∞ page.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Row `q = 0`: pulled back from the classifying space.
    Base,
    /// Column `p = 0`: restricts to a fiber class.
    Fiber,
    Interior,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Base => "base",
            Self::Fiber => "fiber",
            Self::Interior => "interior",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitGenerator {
    pub name: String,
    pub p: u32,
    pub q: u32,
    pub provenance: Provenance,
    /// E₂ representative `t^p ⊗ y`.
    pub representative: Bigraded,
}

impl OrbitGenerator {
    pub fn degree(&self) -> u32 {
        self.p + self.q
    }
}

#[derive(Debug, Clone)]
pub struct OrbitPresentation {
    pub generators: Vec<OrbitGenerator>,
    pub presentation: AlgebraPresentation,
    /// Indices into `presentation.rules()` of relations read in the
    /// associated graded with nonzero E∞ in higher filtration of the same
    /// total degree.
    pub extension_sensitive: Vec<usize>,
}

impl OrbitPresentation {
    pub fn rules(&self) -> &[RewriteRule] {
        self.presentation.rules()
    }

    /// Relations as `lhs + rhs` strings, e.g. `beta*gamma + beta^2`.
    pub fn relation_strings(&self) -> Vec<String> {
        let p = &self.presentation;
        self.rules()
            .iter()
            .map(|r| {
                let mut e = r.rhs.clone();
                e.toggle(r.lhs.clone());
                p.fmt_element(&e)
            })
            .collect()
    }
}

/// `Tot(E∞)^j` for `0 <= j <= dim_x`.
pub fn total_dimensions(e_inf: &Page, dim_x: u32) -> Vec<usize> {
    e_inf.total_dimensions(dim_x)
}

fn generator_name(k: usize) -> String {
    GREEK.get(k).map_or_else(|| format!("g{k}"), |s| (*s).to_string())
}

/// Multiplication of E∞ classes through their E₂ representatives.
struct ClassAlgebra<'a> {
    fiber: &'a BorelFiber,
    e_inf: &'a Page,
    gens: Vec<(u32, u32, Element)>,
    cache: HashMap<Vec<u32>, (u32, Element)>,
}

impl<'a> ClassAlgebra<'a> {
    fn new(fiber: &'a BorelFiber, e_inf: &'a Page) -> Self {
        Self {
            fiber,
            e_inf,
            gens: Vec::new(),
            cache: HashMap::new(),
        }
    }

    /// `(p, y)` with `t^p ⊗ y` the product of the representatives.
    fn product(&mut self, exps: &[u32]) -> (u32, Element) {
        if let Some(hit) = self.cache.get(exps) {
            return hit.clone();
        }
        let value = match exps.iter().rposition(|&e| e > 0) {
            None => (0, self.fiber.presentation().unit()),
            Some(i) => {
                let mut rest = exps.to_vec();
                rest[i] -= 1;
                let (p, y) = self.product(&rest);
                let (gp, _, gy) = &self.gens[i];
                (p + gp, self.fiber.presentation().multiply(&y, gy))
            }
        };
        self.cache.insert(exps.to_vec(), value.clone());
        value
    }

    /// Class of a monomial as coordinates in `Tot^j(E∞)`, cells ordered by `p`.
    fn tot_coords(&mut self, exps: &[u32], j: u32) -> BitVec {
        let (p, y) = self.product(exps);
        let q = j - p;
        let mut out = BitVec::zeros(0);
        for pp in j.saturating_sub(self.e_inf.fiber_top())..=j {
            let cell = self.e_inf.cell(pp, j - pp).expect("degree inside the window");
            let part = if pp == p && !y.is_zero() {
                cell.coords(&self.fiber.coords(q, &y))
                    .expect("products of permanent cycles are permanent cycles")
            } else {
                BitVec::zeros(cell.dim())
            };
            out = out.concat(&part);
        }
        out
    }

    fn cell_coords(&mut self, exps: &[u32], p: u32, q: u32) -> Option<BitVec> {
        let (mp, y) = self.product(exps);
        if mp != p {
            return None;
        }
        let cell = self.e_inf.cell(p, q).expect("cell inside the window");
        if y.is_zero() {
            return Some(BitVec::zeros(cell.dim()));
        }
        Some(
            cell.coords(&self.fiber.coords(q, &y))
                .expect("products of permanent cycles are permanent cycles"),
        )
    }
}

fn free_algebra(gens: &[OrbitGenerator]) -> AlgebraPresentation {
    let generators = gens.iter().map(|g| Generator::new(g.name.clone(), g.degree())).collect();
    AlgebraPresentation::new_unchecked(generators, Vec::new()).expect("generated names are valid")
}

/// Generators of `Tot(E∞)` up to degree `dim_x`. Within a total degree,
/// cells are visited from the base row towards the fiber column, and within a
/// cell representatives are taken by descending leading fiber monomial.
pub fn edge_classes(fiber: &BorelFiber, e_inf: &Page) -> Result<Vec<OrbitGenerator>, RingError> {
    let dim_x = fiber.dim_x();
    if dim_x > e_inf.stable_total_degree() {
        return Err(RingError::WindowTooSmall(dim_x));
    }
    let mut gens: Vec<OrbitGenerator> = Vec::new();
    let mut algebra = ClassAlgebra::new(fiber, e_inf);
    for j in 1..=dim_x {
        for p in (j.saturating_sub(fiber.fiber_top())..=j).rev() {
            let q = j - p;
            let dim = e_inf.dim(p, q);
            if dim == 0 {
                continue;
            }
            let free = free_algebra(&gens);
            let mut span = Subspace::zero(dim);
            for m in free.free_monomials_of_degree(j) {
                if let Some(v) = algebra.cell_coords(m.exponents(), p, q) {
                    span.insert(v);
                }
            }
            let mut reps: Vec<(usize, BitVec)> = e_inf.reps(p, q).iter().cloned().enumerate().collect();
            reps.sort_by_key(|r| std::cmp::Reverse(r.1.lead()));
            for (k, rep) in reps {
                if span.dim() == dim {
                    break;
                }
                if !span.insert(BitVec::unit(dim, k)) {
                    continue;
                }
                let y = fiber.element(q, &rep);
                let mut representative = Bigraded::zero();
                representative.add_part(p, &y);
                let provenance = match (p, q) {
                    (_, 0) => Provenance::Base,
                    (0, _) => Provenance::Fiber,
                    _ => Provenance::Interior,
                };
                gens.push(OrbitGenerator {
                    name: generator_name(gens.len()),
                    p,
                    q,
                    provenance,
                    representative,
                });
                algebra.gens.push((p, q, y));
                algebra.cache.clear();
            }
        }
    }
    Ok(gens)
}

/// Reduced Gröbner basis of the kernel of `F2[gens] -> Tot(E∞)`, harvested
/// through degree `dim_x + max generator degree`. Above `dim_x` every
/// monomial is a relation.
pub fn relation_harvest(
    fiber: &BorelFiber,
    e_inf: &Page,
    gens: &[OrbitGenerator],
) -> Vec<RewriteRule> {
    let dim_x = fiber.dim_x();
    let free = free_algebra(gens);
    let bound = dim_x + gens.iter().map(OrbitGenerator::degree).max().unwrap_or(0);
    let mut algebra = ClassAlgebra::new(fiber, e_inf);
    algebra.gens = gens
        .iter()
        .map(|g| {
            let (&p, y) = g.representative.parts().iter().next().expect("nonzero generator");
            (p, g.q, y.clone())
        })
        .collect();
    let mut rules: Vec<RewriteRule> = Vec::new();
    for j in 1..=bound {
        let monomials = free.free_monomials_of_degree(j);
        if monomials.is_empty() {
            continue;
        }
        let ideal = if j > dim_x {
            Subspace::full(monomials.len())
        } else {
            let cols: Vec<BitVec> = monomials
                .iter()
                .map(|m| algebra.tot_coords(m.exponents(), j))
                .collect();
            let rows = cols[0].len();
            kernel_basis(&BitMatrix::from_columns(rows, &cols).expect("uniform column length"))
        };
        let mut fresh = Vec::new();
        for v in ideal.basis() {
            let lead = &monomials[v.lead().expect("nonzero basis vector")];
            if rules.iter().any(|r| r.lhs.divides(lead)) {
                continue;
            }
            let rhs: Element = v
                .ones()
                .filter(|&i| &monomials[i] != lead)
                .map(|i| monomials[i].clone())
                .collect();
            fresh.push(RewriteRule {
                lhs: lead.clone(),
                rhs,
            });
        }
        rules.extend(fresh);
    }
    rules
}

/// Generators, relations and extension notes for a surviving E∞ page. With
/// `strict_extensions`, an extension-sensitive relation is an error.
pub fn present_orbit_ring(
    fiber: &BorelFiber,
    e_inf: &Page,
    strict_extensions: bool,
) -> Result<OrbitPresentation, RingError> {
    let generators = edge_classes(fiber, e_inf)?;
    let rules = relation_harvest(fiber, e_inf, &generators);
    let presentation = AlgebraPresentation::new(
        generators.iter().map(|g| Generator::new(g.name.clone(), g.degree())).collect(),
        rules,
    )?;
    let dim_x = fiber.dim_x();
    let filtration = |m: &Monomial| -> u32 {
        m.exponents().iter().zip(&generators).map(|(e, g)| e * g.p).sum()
    };
    let mut extension_sensitive = Vec::new();
    for (i, rule) in presentation.rules().iter().enumerate() {
        let j = rule.lhs.degree();
        if j > dim_x {
            continue;
        }
        let lowest = rule.rhs.terms().map(filtration).chain([filtration(&rule.lhs)]).min().unwrap_or(0);
        if (lowest + 1..=j).any(|p| e_inf.dim(p, j - p) > 0) {
            if strict_extensions {
                let mut e = rule.rhs.clone();
                e.toggle(rule.lhs.clone());
                return Err(RingError::AmbiguousExtension {
                    relation: presentation.fmt_element(&e),
                    degree: j,
                });
            }
            extension_sensitive.push(i);
        }
    }
    Ok(OrbitPresentation {
        generators,
        presentation,
        extension_sensitive,
    })
}

/// First degree where a Poincaré series disagrees with expected totals.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("dimension mismatch in degree {degree}: expected {expected}, presentation has {found}")]
pub struct SeriesMismatch {
    pub degree: u32,
    pub expected: usize,
    pub found: usize,
}

/// Checks the Poincaré series against `tot` (degrees `0..tot.len()`) and that
/// the algebra vanishes beyond.
pub fn verify_presentation(p: &AlgebraPresentation, tot: &[usize]) -> Result<(), SeriesMismatch> {
    let last = tot.len() as u32;
    let beyond = last + p.max_generator_degree();
    for degree in 0..beyond.max(last) {
        let expected = tot.get(degree as usize).copied().unwrap_or(0);
        let found = p.degree_basis(degree).len();
        if found != expected {
            return Err(SeriesMismatch {
                degree,
                expected,
                found,
            });
        }
    }
    Ok(())
}

/// Span of the ideal generated by `relations` in degree `j`, over the free
/// monomials of `p` in ascending order.
pub fn ideal_in_degree(p: &AlgebraPresentation, relations: &[Element], j: u32) -> Subspace {
    let monomials = p.free_monomials_of_degree(j);
    let index: HashMap<&Monomial, usize> = monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut span = Subspace::zero(monomials.len());
    for r in relations {
        let Some(d) = r.degree() else { continue };
        if d > j {
            continue;
        }
        for m in p.free_monomials_of_degree(j - d) {
            let mut v = BitVec::zeros(monomials.len());
            for t in r.times_monomial(&m).terms() {
                v.flip(index[t]);
            }
            span.insert(v);
        }
    }
    span
}

fn relations_of(p: &AlgebraPresentation) -> Vec<Element> {
    p.rules()
        .iter()
        .map(|r| {
            let mut e = r.rhs.clone();
            e.toggle(r.lhs.clone());
            e
        })
        .collect()
}

/// True when some bijection between generators of equal degree carries the
/// ideal of `b` onto the ideal of `a`, compared degree by degree through
/// `up_to`.
pub fn same_ideal_up_to_renaming(a: &AlgebraPresentation, b: &AlgebraPresentation, up_to: u32) -> bool {
    let mut da = a.degrees().to_vec();
    let mut db = b.degrees().to_vec();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    let target: Vec<Subspace> = (0..=up_to).map(|j| ideal_in_degree(a, &relations_of(a), j)).collect();
    let n = a.num_generators();
    let mut perm: Vec<usize> = (0..n).collect();
    // Heap's algorithm over all permutations, skipping degree-violating ones
    let mut c = vec![0usize; n];
    let check = |perm: &[usize]| {
        if (0..n).any(|i| b.degrees()[i] != a.degrees()[perm[i]]) {
            return false;
        }
        let moved: Vec<Element> = relations_of(b)
            .iter()
            .map(|e| {
                e.terms()
                    .map(|m| {
                        let mut exps = vec![0; n];
                        for (i, &k) in m.exponents().iter().enumerate() {
                            exps[perm[i]] = k;
                        }
                        a.monomial(exps)
                    })
                    .collect()
            })
            .collect();
        (0..=up_to).all(|j| ideal_in_degree(a, &moved, j) == target[j as usize])
    };
    if check(&perm) {
        return true;
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if check(&perm) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}
