//! Candidate induced actions on a cohomology ring and the fixed-point
//! obstruction for free involutions.
//!
//! An action is fixed by the images of the generators. Candidates are all
//! degree-preserving assignments of nonzero classes to generators; they are
//! filtered, cheapest first, by relation preservation, bijectivity,
//! involutivity and finally Bredon's criterion: if cohomology vanishes above
//! `2l`, `T*` is the identity on `H^{2l}` and some `a` in `H^l` has
//! `a T*(a) != 0`, the involution has a fixed point.
//!
//! A surviving candidate is only "not eliminated"; nothing here claims it is
//! realized by an actual involution.

use std::fmt;

use thiserror::Error;

use crate::f2::{kernel_basis, BitMatrix, BitVec};
use crate::graded::{wall_presentation, AlgebraPresentation, Element, Monomial};

/// Upper bound on raw candidates before filtering.
pub const MAX_CANDIDATES: usize = 1 << 20;

/// Largest degree-`l` dimension searched exhaustively for a Bredon witness.
pub const MAX_WITNESS_SEARCH_DIM: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvolutionError {
    #[error("{0} raw candidates exceed the enumeration limit")]
    TooManyCandidates(u128),
    #[error("presentation is infinite; the analysis needs a finite top degree")]
    Infinite,
    #[error("cohomology is nonzero in degree {top} > 2l = {twice_l}")]
    AboveTwiceL { top: u32, twice_l: u32 },
    #[error("the action is not the identity on degree {0}")]
    NotIdentityOnTop(u32),
    #[error("degree {degree} has dimension {dim}, too large for exhaustive search")]
    SearchTooLarge { degree: u32, dim: usize },
}

/// Generator images of a candidate ring endomorphism, in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EndoCandidate {
    images: Vec<Element>,
}

impl EndoCandidate {
    pub fn new(images: Vec<Element>) -> Self {
        Self { images }
    }

    pub fn identity(p: &AlgebraPresentation) -> Self {
        Self {
            images: (0..p.num_generators())
                .map(|i| Element::from(p.gen_monomial(i)))
                .collect(),
        }
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn is_identity(&self, p: &AlgebraPresentation) -> bool {
        *self == Self::identity(p)
    }

    pub fn apply_monomial(&self, p: &AlgebraPresentation, m: &Monomial) -> Element {
        let mut acc = p.unit();
        for (i, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                acc = p.multiply(&acc, &self.images[i]);
            }
        }
        acc
    }

    /// Image of an arbitrary element, reduced to normal form.
    pub fn apply(&self, p: &AlgebraPresentation, e: &Element) -> Element {
        let mut out = Element::zero();
        for m in e.terms() {
            out.add_assign(&self.apply_monomial(p, m));
        }
        p.normal_form(&out)
    }

    pub fn compose(&self, p: &AlgebraPresentation, other: &EndoCandidate) -> EndoCandidate {
        EndoCandidate {
            images: other.images.iter().map(|e| self.apply(p, e)).collect(),
        }
    }

    pub fn describe(&self, p: &AlgebraPresentation) -> String {
        p.generators()
            .iter()
            .zip(&self.images)
            .map(|(g, e)| format!("{}->{}", g.name, p.fmt_element(e)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Why a candidate fails to be a ring automorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndoRejection {
    /// The image of `lhs - rhs` of rule `rule` is the nonzero class `image`.
    RelationNotPreserved { rule: usize, image: Element },
    /// The induced map on degree `degree` kills `kernel_element`.
    NotBijective { degree: u32, kernel_element: Element },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionWitness {
    pub degree: u32,
    pub middle_class: Element,
    pub product: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateFate {
    /// No implemented obstruction applies.
    NotEliminated,
    NotAutomorphism(EndoRejection),
    NotInvolutive { generator: usize, image_of_image: Element },
    Bredon(ObstructionWitness),
}

impl CandidateFate {
    pub fn is_eliminated(&self) -> bool {
        !matches!(self, CandidateFate::NotEliminated)
    }
}

#[derive(Debug, Clone)]
pub struct CandidateVerdict {
    pub candidate: EndoCandidate,
    pub fate: CandidateFate,
}

#[derive(Debug, Clone)]
pub struct ActionReport {
    pub presentation: AlgebraPresentation,
    /// The `l` used for the Bredon test, with the reason if it was inapplicable.
    pub bredon_degree: u32,
    pub bredon_note: Option<String>,
    pub raw_count: usize,
    pub verdicts: Vec<CandidateVerdict>,
}

impl ActionReport {
    pub fn survivors(&self) -> impl Iterator<Item = &EndoCandidate> {
        self.verdicts
            .iter()
            .filter(|v| !v.fate.is_eliminated())
            .map(|v| &v.candidate)
    }
}

/// Every nonzero element of degree `q`, ordered by the bitmask over the
/// ascending degree basis (single basis monomials come first).
pub fn nonzero_elements(p: &AlgebraPresentation, q: u32) -> Vec<Element> {
    let basis = p.degree_basis(q);
    let n = basis.len();
    assert!(n < 32, "degree {q} too large to enumerate");
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks
        .into_iter()
        .map(|mask| {
            basis
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, m)| m.clone())
                .collect()
        })
        .collect()
}

/// All degree-preserving assignments of nonzero classes to the generators.
pub fn enumerate_candidates(p: &AlgebraPresentation) -> Result<Vec<EndoCandidate>, InvolutionError> {
    let choices: Vec<Vec<Element>> = p
        .degrees()
        .iter()
        .map(|&d| nonzero_elements(p, d))
        .collect();
    let count: u128 = choices.iter().map(|c| c.len() as u128).product();
    if count > MAX_CANDIDATES as u128 {
        return Err(InvolutionError::TooManyCandidates(count));
    }
    let mut out = vec![Vec::new()];
    for options in &choices {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for o in options {
                let mut v: Vec<Element> = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        out = next;
    }
    Ok(out.into_iter().map(EndoCandidate::new).collect())
}

fn degree_matrix(p: &AlgebraPresentation, e: &EndoCandidate, q: u32) -> (Vec<Monomial>, BitMatrix) {
    let basis = p.degree_basis(q);
    let columns: Vec<BitVec> = basis
        .iter()
        .map(|m| {
            let img = e.apply_monomial(p, m);
            BitVec::from_bits(basis.iter().map(|b| img.contains(b)))
        })
        .collect();
    let m = BitMatrix::from_columns(basis.len(), &columns).expect("square");
    (basis, m)
}

/// Relation preservation, then bijectivity degree by degree. Infinite
/// presentations are checked for bijectivity through the largest relation
/// degree plus the largest generator degree.
pub fn is_ring_endomorphism(p: &AlgebraPresentation, e: &EndoCandidate) -> Result<(), EndoRejection> {
    for (i, rule) in p.rules().iter().enumerate() {
        let mut image = e.apply(p, &Element::from(rule.lhs.clone()));
        image.add_assign(&e.apply(p, &rule.rhs));
        if !image.is_zero() {
            return Err(EndoRejection::RelationNotPreserved { rule: i, image });
        }
    }
    let bound = p.top_degree().unwrap_or_else(|| {
        p.rules().iter().map(|r| r.lhs.degree()).max().unwrap_or(0) + p.max_generator_degree()
    });
    for q in 1..=bound {
        let (basis, m) = degree_matrix(p, e, q);
        let k = kernel_basis(&m);
        if let Some(v) = k.basis().first() {
            let kernel_element = v.ones().map(|i| basis[i].clone()).collect();
            return Err(EndoRejection::NotBijective {
                degree: q,
                kernel_element,
            });
        }
    }
    Ok(())
}

/// `e ∘ e` is the identity on every generator.
pub fn is_involutive(p: &AlgebraPresentation, e: &EndoCandidate) -> bool {
    involution_defect(p, e).is_none()
}

fn involution_defect(p: &AlgebraPresentation, e: &EndoCandidate) -> Option<(usize, Element)> {
    (0..p.num_generators()).find_map(|i| {
        let twice = e.apply(p, &e.images()[i]);
        (twice != Element::from(p.gen_monomial(i))).then_some((i, twice))
    })
}

/// Searches degree-`l` classes `a` for `a e(a) != 0`.
pub fn bredon_obstruction(
    p: &AlgebraPresentation,
    e: &EndoCandidate,
    l: u32,
) -> Result<Option<ObstructionWitness>, InvolutionError> {
    let top = p.top_degree().ok_or(InvolutionError::Infinite)?;
    if top > 2 * l {
        return Err(InvolutionError::AboveTwiceL { top, twice_l: 2 * l });
    }
    let (_, on_top) = degree_matrix(p, e, 2 * l);
    if on_top != BitMatrix::identity(on_top.rows()) {
        return Err(InvolutionError::NotIdentityOnTop(2 * l));
    }
    let dim = p.degree_basis(l).len();
    if dim > MAX_WITNESS_SEARCH_DIM {
        return Err(InvolutionError::SearchTooLarge { degree: l, dim });
    }
    for a in nonzero_elements(p, l) {
        let product = p.multiply(&a, &e.apply(p, &a));
        if !product.is_zero() {
            return Ok(Some(ObstructionWitness {
                degree: l,
                middle_class: a,
                product,
            }));
        }
    }
    Ok(None)
}

/// Runs every filter over every candidate of a finite presentation, using
/// `l = ceil(top / 2)` for the fixed-point test.
pub fn classify(p: &AlgebraPresentation) -> Result<ActionReport, InvolutionError> {
    let top = p.top_degree().ok_or(InvolutionError::Infinite)?;
    let l = top.div_ceil(2);
    let candidates = enumerate_candidates(p)?;
    let raw_count = candidates.len();
    let mut bredon_note = None;
    let mut verdicts = Vec::with_capacity(raw_count);
    for candidate in candidates {
        let fate = if let Err(r) = is_ring_endomorphism(p, &candidate) {
            CandidateFate::NotAutomorphism(r)
        } else if let Some((generator, image_of_image)) = involution_defect(p, &candidate) {
            CandidateFate::NotInvolutive {
                generator,
                image_of_image,
            }
        } else {
            match bredon_obstruction(p, &candidate, l) {
                Ok(Some(w)) => CandidateFate::Bredon(w),
                Ok(None) => CandidateFate::NotEliminated,
                Err(err) => {
                    bredon_note.get_or_insert_with(|| err.to_string());
                    CandidateFate::NotEliminated
                }
            }
        };
        verdicts.push(CandidateVerdict { candidate, fate });
    }
    Ok(ActionReport {
        presentation: p.clone(),
        bredon_degree: l,
        bredon_note,
        raw_count,
        verdicts,
    })
}

/// Action classification on the Wall manifold `Q(m, n)`.
pub fn classify_free_actions(m: u32, n: u32) -> Result<ActionReport, InvolutionError> {
    classify(&wall_presentation(m, n))
}

/// True when the identity is the only involutive ring automorphism, so any
/// induced action on cohomology is necessarily trivial.
pub fn trivial_action_forced(p: &AlgebraPresentation) -> Result<bool, InvolutionError> {
    if p.top_degree().is_none() {
        return Err(InvolutionError::Infinite);
    }
    for c in enumerate_candidates(p)? {
        if !c.is_identity(p) && is_ring_endomorphism(p, &c).is_ok() && is_involutive(p, &c) {
            return Ok(false);
        }
    }
    Ok(true)
}

impl fmt::Display for EndoRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndoRejection::RelationNotPreserved { rule, .. } => {
                write!(f, "relation #{rule} is not preserved")
            }
            EndoRejection::NotBijective { degree, .. } => write!(f, "not bijective in degree {degree}"),
        }
    }
}
