//! Serre spectral sequence of the Borel fibration `X -> X_G -> B_G` for
//! `G = Z/2`, with simple GF(2) coefficients.
//!
//! The E₂ page is `F2[t] ⊗ H*(X)`. A differential assignment gives each fiber
//! generator either no differential or one target `t^r ⊗ y`. Extended as a
//! derivation that is linear over `F2[t]`, this makes `F2[t] ⊗ H*(X)` a
//! filtered differential algebra (filtered by the power of `t`), and every
//! page is computed from that filtered complex restricted to columns
//! `p <= p_window`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::f2::{kernel_basis, solve, BitMatrix, BitVec, Subquotient, Subspace};
use crate::graded::{AlgebraPresentation, Element, Monomial, RewriteRule};
use crate::involution::{nonzero_elements, trivial_action_forced, InvolutionError};

/// Upper bound on the number of assignments `enumerate_assignments` will build.
pub const MAX_ASSIGNMENTS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("simple coefficients are not established for this fiber; the trivial-action assumption must be given explicitly")]
    HypothesisRequired,
    #[error("fiber cohomology is infinite")]
    InfiniteFiber,
    #[error("dimension {dim_x} is below the fiber top degree {top}")]
    DimensionTooSmall { dim_x: u32, top: u32 },
    #[error("window {requested} is smaller than the minimum {minimum}")]
    WindowTooSmall { requested: u32, minimum: u32 },
    #[error("invalid differential on {generator}: {reason}")]
    InvalidAssignment { generator: String, reason: String },
    #[error("{count} differential assignments exceed the limit of {MAX_ASSIGNMENTS}")]
    TooManyAssignments { count: u128 },
    #[error("underdetermined differential: d_{page} on E^{{{p},{q}}} is not determined by the generator assignment")]
    Underdetermined { page: u32, p: u32, q: u32 },
    #[error("d_{page} squares to a nonzero map on E^{{{p},{q}}}")]
    SquareNonZero { page: u32, p: u32, q: u32 },
    #[error("image of d_{page} is not contained in its kernel at E^{{{p},{q}}}")]
    ImageNotInKernel { page: u32, p: u32, q: u32 },
    #[error("a class of E_{page}^{{{p},{q}}} has no lift to a cycle")]
    LiftFailed { page: u32, p: u32, q: u32 },
    #[error(transparent)]
    Involution(#[from] InvolutionError),
}

/// How the simple-coefficients hypothesis was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimpleCoefficients {
    /// Supplied by the caller.
    Assumed,
    /// The fiber cohomology admits no nontrivial involutive automorphism.
    Forced,
}

/// Fiber data for the Borel spectral sequence: the cohomology ring, the
/// dimension bound of the free-action vanishing theorem, and the column window.
#[derive(Debug, Clone)]
pub struct BorelFiber {
    presentation: AlgebraPresentation,
    dim_x: u32,
    top: u32,
    p_window: u32,
    hypothesis: SimpleCoefficients,
    bases: Vec<Vec<Monomial>>,
    index: Vec<HashMap<Monomial, usize>>,
}

impl BorelFiber {
    /// Without `assume_trivial_action` the fiber is accepted only when a
    /// trivial action on cohomology is forced.
    pub fn new(
        presentation: AlgebraPresentation,
        dim_x: u32,
        assume_trivial_action: bool,
    ) -> Result<Self, EngineError> {
        let top = presentation.top_degree().ok_or(EngineError::InfiniteFiber)?;
        if dim_x < top {
            return Err(EngineError::DimensionTooSmall { dim_x, top });
        }
        let hypothesis = if assume_trivial_action {
            SimpleCoefficients::Assumed
        } else if trivial_action_forced(&presentation)? {
            SimpleCoefficients::Forced
        } else {
            return Err(EngineError::HypothesisRequired);
        };
        let bases: Vec<Vec<Monomial>> = (0..=top).map(|q| presentation.degree_basis(q)).collect();
        let index = bases
            .iter()
            .map(|b| b.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect())
            .collect();
        Ok(Self {
            presentation,
            dim_x,
            top,
            p_window: dim_x + top + 3,
            hypothesis,
            bases,
            index,
        })
    }

    pub fn with_window(mut self, p_window: u32) -> Result<Self, EngineError> {
        let minimum = self.min_window();
        if p_window < minimum {
            return Err(EngineError::WindowTooSmall {
                requested: p_window,
                minimum,
            });
        }
        self.p_window = p_window;
        Ok(self)
    }

    pub fn presentation(&self) -> &AlgebraPresentation {
        &self.presentation
    }

    pub fn dim_x(&self) -> u32 {
        self.dim_x
    }

    pub fn fiber_top(&self) -> u32 {
        self.top
    }

    pub fn p_window(&self) -> u32 {
        self.p_window
    }

    pub fn min_window(&self) -> u32 {
        self.dim_x + self.top + 3
    }

    pub fn hypothesis(&self) -> SimpleCoefficients {
        self.hypothesis
    }

    /// Normal-form basis of `H^q`, empty outside `0..=top`.
    pub fn basis(&self, q: u32) -> &[Monomial] {
        self.bases.get(q as usize).map_or(&[], |b| b.as_slice())
    }

    pub fn dim(&self, q: u32) -> usize {
        self.basis(q).len()
    }

    /// Coordinates of a normal-form element of degree `q`.
    pub fn coords(&self, q: u32, e: &Element) -> BitVec {
        let mut v = BitVec::zeros(self.dim(q));
        for m in e.terms() {
            let i = self.index[q as usize]
                .get(m)
                .unwrap_or_else(|| panic!("{} is not a normal-form monomial of degree {q}", self.presentation.fmt_monomial(m)));
            v.flip(*i);
        }
        v
    }

    pub fn element(&self, q: u32, coords: &BitVec) -> Element {
        coords.ones().map(|i| self.basis(q)[i].clone()).collect()
    }
}

/// An element of `F2[t] ⊗ H*(X)`, stored as `p -> y` for the summands `t^p ⊗ y`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bigraded {
    parts: BTreeMap<u32, Element>,
}

impl Bigraded {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &BTreeMap<u32, Element> {
        &self.parts
    }

    pub fn component(&self, p: u32) -> Option<&Element> {
        self.parts.get(&p)
    }

    /// Adds `t^p ⊗ y`.
    pub fn add_part(&mut self, p: u32, y: &Element) {
        let slot = self.parts.entry(p).or_default();
        slot.add_assign(y);
        if slot.is_zero() {
            self.parts.remove(&p);
        }
    }

    pub fn add_assign(&mut self, other: &Bigraded) {
        for (&p, y) in &other.parts {
            self.add_part(p, y);
        }
    }

    /// Renders as e.g. `t^2*(x + c) + t^3`.
    pub fn fmt_with(&self, fiber: &AlgebraPresentation) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.parts
            .iter()
            .map(|(&p, y)| {
                let t = match p {
                    0 => String::new(),
                    1 => "t".into(),
                    _ => format!("t^{p}"),
                };
                let body = fiber.fmt_element(y);
                match (t.is_empty(), body.as_str()) {
                    (true, _) => body,
                    (false, "1") => t,
                    (false, _) if y.len() == 1 => format!("{t}*{body}"),
                    (false, _) => format!("{t}*({body})"),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// The differential prescribed on one fiber generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorDifferential {
    Permanent,
    /// `d_page(1 ⊗ g) = t^page ⊗ target`.
    Transgression { page: u32, target: Element },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialAssignment {
    choices: Vec<GeneratorDifferential>,
}

impl DifferentialAssignment {
    pub fn new(
        fiber: &AlgebraPresentation,
        choices: Vec<GeneratorDifferential>,
    ) -> Result<Self, EngineError> {
        if choices.len() != fiber.num_generators() {
            return Err(EngineError::InvalidAssignment {
                generator: "*".into(),
                reason: format!(
                    "{} choices for {} generators",
                    choices.len(),
                    fiber.num_generators()
                ),
            });
        }
        for (g, choice) in fiber.generators().iter().zip(&choices) {
            let GeneratorDifferential::Transgression { page, target } = choice else {
                continue;
            };
            let invalid = |reason: String| EngineError::InvalidAssignment {
                generator: g.name.clone(),
                reason,
            };
            if *page < 2 || *page > g.degree + 1 {
                return Err(invalid(format!("page {page} outside 2..={}", g.degree + 1)));
            }
            let q = g.degree + 1 - page;
            if target.is_zero() {
                return Err(invalid("zero target".into()));
            }
            if target.degree() != Some(q) || !target.is_homogeneous() {
                return Err(invalid(format!("target must be homogeneous of degree {q}")));
            }
            if !fiber.is_normal(target) {
                return Err(invalid("target is not in normal form".into()));
            }
        }
        Ok(Self { choices })
    }

    pub fn permanent(fiber: &AlgebraPresentation) -> Self {
        Self {
            choices: vec![GeneratorDifferential::Permanent; fiber.num_generators()],
        }
    }

    pub fn choices(&self) -> &[GeneratorDifferential] {
        &self.choices
    }

    /// E.g. `d_3(d) = t^3; x, c permanent`.
    pub fn describe(&self, fiber: &AlgebraPresentation) -> String {
        let mut active = Vec::new();
        let mut permanent = Vec::new();
        for (g, choice) in fiber.generators().iter().zip(&self.choices) {
            match choice {
                GeneratorDifferential::Permanent => permanent.push(g.name.clone()),
                GeneratorDifferential::Transgression { page, target } => {
                    let mut value = Bigraded::zero();
                    value.add_part(*page, target);
                    active.push(format!("d_{page}({}) = {}", g.name, value.fmt_with(fiber)));
                }
            }
        }
        let mut out = active.join(", ");
        if !permanent.is_empty() {
            if !out.is_empty() {
                out.push_str("; ");
            }
            out.push_str(&permanent.join(", "));
            out.push_str(" permanent");
        }
        if out.is_empty() {
            out.push_str("no generators");
        }
        out
    }

    /// Compact identifier: per generator `0` or `d<r>`, with `.<k>` giving the
    /// position of the target among the nonzero classes of its degree when
    /// there is more than one.
    pub fn short_id(&self, fiber: &AlgebraPresentation) -> String {
        let parts: Vec<String> = fiber
            .generators()
            .iter()
            .zip(&self.choices)
            .map(|(g, choice)| match choice {
                GeneratorDifferential::Permanent => "0".into(),
                GeneratorDifferential::Transgression { page, target } => {
                    let options = nonzero_elements(fiber, g.degree + 1 - page);
                    if options.len() == 1 {
                        format!("d{page}")
                    } else {
                        let k = options.iter().position(|o| o == target).map_or(0, |k| k + 1);
                        format!("d{page}.{k}")
                    }
                }
            })
            .collect();
        if parts.is_empty() {
            "trivial".into()
        } else {
            parts.join("-")
        }
    }
}

/// Every combination of per-generator choices: permanent, or one nonzero
/// target on one admissible page `2..=deg+1`.
pub fn enumerate_assignments(
    fiber: &AlgebraPresentation,
) -> Result<Vec<DifferentialAssignment>, EngineError> {
    let options: Vec<Vec<GeneratorDifferential>> = fiber
        .generators()
        .iter()
        .map(|g| {
            let mut opts = vec![GeneratorDifferential::Permanent];
            for page in 2..=g.degree + 1 {
                for target in nonzero_elements(fiber, g.degree + 1 - page) {
                    opts.push(GeneratorDifferential::Transgression { page, target });
                }
            }
            opts
        })
        .collect();
    let count: u128 = options.iter().map(|o| o.len() as u128).product();
    if count > MAX_ASSIGNMENTS as u128 {
        return Err(EngineError::TooManyAssignments { count });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut odometer = vec![0usize; options.len()];
    loop {
        out.push(DifferentialAssignment {
            choices: odometer.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect(),
        });
        let mut k = options.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            odometer[k] += 1;
            if odometer[k] < options[k].len() {
                break;
            }
            odometer[k] = 0;
        }
    }
}

/// Why an assignment cannot come from a free involution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EliminationReason {
    /// The derivation does not respect a relation: its two sides have
    /// different images.
    LeibnizInconsistent {
        relation: RewriteRule,
        via_lhs: Bigraded,
        via_rhs: Bigraded,
    },
    /// The extended differential does not square to zero on a generator.
    NonZeroSquare { generator: String, value: Bigraded },
    /// `Tot(E∞)^degree` is nonzero above the dimension of `X`.
    VanishingViolation { degree: u32, dimension: usize },
}

impl EliminationReason {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::LeibnizInconsistent { .. } => "leibniz_inconsistent",
            Self::NonZeroSquare { .. } => "nonzero_square",
            Self::VanishingViolation { .. } => "vanishing_violation",
        }
    }

    pub fn detail(&self, fiber: &AlgebraPresentation) -> String {
        match self {
            Self::LeibnizInconsistent {
                relation,
                via_lhs,
                via_rhs,
            } => format!(
                "relation {} = {}: d({}) = {} but d({}) = {}",
                fiber.fmt_monomial(&relation.lhs),
                fiber.fmt_element(&relation.rhs),
                fiber.fmt_monomial(&relation.lhs),
                via_lhs.fmt_with(fiber),
                fiber.fmt_element(&relation.rhs),
                via_rhs.fmt_with(fiber),
            ),
            Self::NonZeroSquare { generator, value } => {
                format!("d(d({generator})) = {}", value.fmt_with(fiber))
            }
            Self::VanishingViolation { degree, dimension } => {
                format!("Tot(E_inf)^{degree} has dimension {dimension} above the dimension bound")
            }
        }
    }
}

/// The assignment extended to a derivation of `F2[t] ⊗ H*(X)`, tabulated on
/// the fiber basis.
#[derive(Debug, Clone)]
pub struct Derivation {
    // table[q][i] lists (filtration shift, coordinates in degree q + 1 - shift)
    table: Vec<Vec<Vec<(u32, BitVec)>>>,
}

impl Derivation {
    /// Extends by the Leibniz rule and base linearity, then checks that every
    /// relation is respected and that the result squares to zero.
    pub fn new(fiber: &BorelFiber, a: &DifferentialAssignment) -> Result<Self, EliminationReason> {
        let p = fiber.presentation();
        for rule in p.rules() {
            let via_lhs = derive_monomial(p, a, &rule.lhs);
            let via_rhs = derive_element(p, a, &rule.rhs);
            if via_lhs != via_rhs {
                return Err(EliminationReason::LeibnizInconsistent {
                    relation: rule.clone(),
                    via_lhs,
                    via_rhs,
                });
            }
        }
        for (g, choice) in p.generators().iter().zip(a.choices()) {
            if let GeneratorDifferential::Transgression { page, target } = choice {
                let inner = derive_element(p, a, target);
                if !inner.is_zero() {
                    let mut value = Bigraded::zero();
                    for (&s, y) in inner.parts() {
                        value.add_part(s + page, y);
                    }
                    return Err(EliminationReason::NonZeroSquare {
                        generator: g.name.clone(),
                        value,
                    });
                }
            }
        }
        let table = (0..=fiber.fiber_top())
            .map(|q| {
                fiber
                    .basis(q)
                    .iter()
                    .map(|m| {
                        derive_monomial(p, a, m)
                            .parts()
                            .iter()
                            .map(|(&s, y)| (s, fiber.coords(q + 1 - s, y)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Self { table })
    }

    /// Components of `D(1 ⊗ b_i)` for the `i`-th basis monomial of degree `q`.
    pub fn on_basis(&self, q: u32, i: usize) -> &[(u32, BitVec)] {
        &self.table[q as usize][i]
    }
}

/// `D(1 ⊗ m)` in normal form. Only generators with odd exponent contribute.
pub fn derive_monomial(
    fiber: &AlgebraPresentation,
    a: &DifferentialAssignment,
    m: &Monomial,
) -> Bigraded {
    let mut out = Bigraded::zero();
    for (i, choice) in a.choices().iter().enumerate() {
        if let GeneratorDifferential::Transgression { page, target } = choice {
            if m.exponent(i) % 2 == 1 {
                let rest = m.without(i, fiber.degrees()[i]);
                out.add_part(*page, &fiber.normal_form(&target.times_monomial(&rest)));
            }
        }
    }
    out
}

pub fn derive_element(
    fiber: &AlgebraPresentation,
    a: &DifferentialAssignment,
    e: &Element,
) -> Bigraded {
    let mut out = Bigraded::zero();
    for m in e.terms() {
        out.add_assign(&derive_monomial(fiber, a, m));
    }
    out
}

/// One page: cells `E_r^{p,q}` for `0 <= p <= p_window`, `0 <= q <= fiber_top`,
/// each a subquotient of the E₂ cell `H^q(X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    r: u32,
    p_window: u32,
    fiber_top: u32,
    cells: Vec<Vec<Subquotient>>,
}

impl Page {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn p_window(&self) -> u32 {
        self.p_window
    }

    pub fn fiber_top(&self) -> u32 {
        self.fiber_top
    }

    pub fn cell(&self, p: u32, q: u32) -> Option<&Subquotient> {
        self.cells.get(p as usize)?.get(q as usize)
    }

    pub fn dim(&self, p: u32, q: u32) -> usize {
        self.cell(p, q).map_or(0, Subquotient::dim)
    }

    /// Coset representatives in E₂ coordinates.
    pub fn reps(&self, p: u32, q: u32) -> &[BitVec] {
        self.cell(p, q).map_or(&[], Subquotient::reps)
    }

    /// Cells whose value does not depend on the column truncation.
    pub fn is_stable(&self, p: u32, q: u32) -> bool {
        p + q < self.p_window
    }

    /// `Tot^j = sum_p dim E^{p, j-p}` for `j` in `0..=up_to`.
    pub fn total_dimensions(&self, up_to: u32) -> Vec<usize> {
        (0..=up_to)
            .map(|j| {
                (j.saturating_sub(self.fiber_top)..=j.min(self.p_window))
                    .map(|p| self.dim(p, j - p))
                    .sum()
            })
            .collect()
    }

    /// Last total degree in which every cell is stable.
    pub fn stable_total_degree(&self) -> u32 {
        self.p_window - 1
    }

    /// Dimension grid: `q` down the side (top row first), `p` across. Cells
    /// outside the stable region carry a `~`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "E_{} (columns 0..={})", self.r, self.p_window);
        let _ = write!(out, "{:>4} |", "q\\p");
        for p in 0..=self.p_window {
            let _ = write!(out, "{p:>4}");
        }
        out.push('\n');
        let _ = writeln!(out, "{}", "-".repeat(6 + 4 * (self.p_window as usize + 1)));
        for q in (0..=self.fiber_top).rev() {
            let _ = write!(out, "{q:>4} |");
            for p in 0..=self.p_window {
                let d = self.dim(p, q);
                if self.is_stable(p, q) {
                    let _ = write!(out, "{d:>4}");
                } else {
                    let _ = write!(out, "{:>4}", format!("{d}~"));
                }
            }
            out.push('\n');
        }
        out.push_str("~ marks cells outside the stable region\n");
        out
    }
}

pub fn build_e2(fiber: &BorelFiber) -> Page {
    Page {
        r: 2,
        p_window: fiber.p_window(),
        fiber_top: fiber.fiber_top(),
        cells: (0..=fiber.p_window())
            .map(|_| (0..=fiber.fiber_top()).map(|q| Subquotient::full(fiber.dim(q))).collect())
            .collect(),
    }
}

/// `d_r` as matrices from the basis of each source cell to the basis of its
/// target cell. Cells without an entry map to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageDifferential {
    r: u32,
    maps: BTreeMap<(u32, u32), BitMatrix>,
}

impl PageDifferential {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn map(&self, p: u32, q: u32) -> Option<&BitMatrix> {
        self.maps.get(&(p, q))
    }

    pub fn maps(&self) -> &BTreeMap<(u32, u32), BitMatrix> {
        &self.maps
    }

    pub fn is_zero(&self) -> bool {
        self.maps.values().all(BitMatrix::is_zero)
    }

    /// Rank of `d_r` from total degree `j` to `j + 1`.
    pub fn rank_from_total_degree(&self, j: u32) -> usize {
        self.maps
            .iter()
            .filter(|((p, q), _)| p + q == j)
            .map(|(_, m)| crate::f2::rank(m))
            .sum()
    }
}

#[derive(Debug, Clone)]
struct Layout {
    // (p, first coordinate) for each column present in this total degree
    blocks: Vec<(u32, usize)>,
    dim: usize,
}

impl Layout {
    fn block_start(&self, p: u32) -> Option<usize> {
        self.blocks.iter().find(|b| b.0 == p).map(|b| b.1)
    }

    /// First coordinate belonging to a column `>= p`.
    fn start_of(&self, p: u32) -> usize {
        self.blocks.iter().find(|b| b.0 >= p).map_or(self.dim, |b| b.1)
    }
}

/// `F2[t] ⊗ H*(X)` truncated to `p <= p_window`, with its differential,
/// organised by total degree.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    dims: Vec<usize>,
    p_window: u32,
    fiber_top: u32,
    layouts: Vec<Layout>,
    // diff[j][k] is D applied to the k-th basis vector of total degree j
    diff: Vec<Vec<BitVec>>,
}

impl FilteredComplex {
    pub fn new(fiber: &BorelFiber, d: &Derivation) -> Self {
        let top = fiber.fiber_top();
        let w = fiber.p_window();
        let dims: Vec<usize> = (0..=top).map(|q| fiber.dim(q)).collect();
        let max_j = w + top + 1;
        let layouts: Vec<Layout> = (0..=max_j)
            .map(|j| {
                let mut blocks = Vec::new();
                let mut dim = 0;
                for p in j.saturating_sub(top)..=j.min(w) {
                    blocks.push((p, dim));
                    dim += dims[(j - p) as usize];
                }
                Layout { blocks, dim }
            })
            .collect();
        let diff = (0..max_j)
            .map(|j| {
                let target = &layouts[j as usize + 1];
                let mut cols = Vec::with_capacity(layouts[j as usize].dim);
                for &(p, _) in &layouts[j as usize].blocks {
                    let q = j - p;
                    for i in 0..dims[q as usize] {
                        let mut col = BitVec::zeros(target.dim);
                        for (shift, y) in d.on_basis(q, i) {
                            if p + shift > w {
                                continue;
                            }
                            let start = target
                                .block_start(p + shift)
                                .expect("target column lies in the window");
                            for k in y.ones() {
                                col.flip(start + k);
                            }
                        }
                        cols.push(col);
                    }
                }
                cols
            })
            .collect();
        Self {
            dims,
            p_window: w,
            fiber_top: top,
            layouts,
            diff,
        }
    }

    fn h(&self, q: u32) -> usize {
        self.dims[q as usize]
    }

    /// Columns of `D` from total degree `j`, starting at coordinate `s`,
    /// keeping only the first `rows` target coordinates.
    fn truncated(&self, j: u32, s: usize, end: usize, rows: usize) -> BitMatrix {
        let cols: Vec<BitVec> = self.diff[j as usize][s..end]
            .iter()
            .map(|c| c.slice(0, rows))
            .collect();
        BitMatrix::from_columns(rows, &cols).expect("uniform column length")
    }

    fn apply(&self, j: u32, s: usize, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.layouts[j as usize + 1].dim);
        for k in v.ones() {
            out.xor_assign(&self.diff[j as usize][s + k]);
        }
        out
    }

    /// Kernel of the part of `D` on `F^p A^{p+q}` landing in columns `< p + r`,
    /// in coordinates starting at column `p`.
    fn cycle_kernel(&self, p: u32, q: u32, r: u32) -> (usize, Vec<BitVec>) {
        let j = p + q;
        let layout = &self.layouts[j as usize];
        let s = layout.block_start(p).expect("cell lies in the window");
        let rows = self.layouts[j as usize + 1].start_of(p + r);
        let m = self.truncated(j, s, layout.dim, rows);
        (s, kernel_basis(&m).basis().to_vec())
    }

    /// Leading parts of elements of filtration `p` whose differential has
    /// filtration at least `p + r`.
    pub fn cycles(&self, p: u32, q: u32, r: u32) -> Subspace {
        let h = self.h(q);
        let (_, ker) = self.cycle_kernel(p, q, r);
        Subspace::spanned_by(h, ker.iter().map(|v| v.slice(0, h)))
    }

    /// Leading parts in column `p` of differentials of elements of filtration
    /// `p - r + 1` whose differential has filtration at least `p`.
    pub fn boundaries(&self, p: u32, q: u32, r: u32) -> Subspace {
        let h = self.h(q);
        let j = p + q;
        if j == 0 {
            return Subspace::zero(h);
        }
        let src = &self.layouts[j as usize - 1];
        let s = src.start_of(p.saturating_sub(r - 1));
        let target = &self.layouts[j as usize];
        let m = self.truncated(j - 1, s, src.dim, target.start_of(p));
        let start = target.block_start(p).expect("cell lies in the window");
        Subspace::spanned_by(
            h,
            kernel_basis(&m)
                .basis()
                .iter()
                .map(|w| self.apply(j - 1, s, w).slice(start, start + h)),
        )
    }

    /// Elements of column `p` alone whose differential has filtration at
    /// least `p + r`.
    fn column_cycles(&self, p: u32, q: u32, r: u32) -> Subspace {
        let j = p + q;
        let s = self.layouts[j as usize].block_start(p).expect("cell lies in the window");
        let rows = self.layouts[j as usize + 1].start_of(p + r);
        kernel_basis(&self.truncated(j, s, s + self.h(q), rows))
    }

    /// `E_r` computed directly as cycles modulo boundaries.
    pub fn direct_page(&self, r: u32) -> Result<Page, EngineError> {
        let mut cells = Vec::new();
        for p in 0..=self.p_window {
            let mut column = Vec::new();
            for q in 0..=self.fiber_top {
                let cell = Subquotient::new(self.cycles(p, q, r), self.boundaries(p, q, r))
                    .map_err(|_| EngineError::ImageNotInKernel { page: r, p, q })?;
                column.push(cell);
            }
            cells.push(column);
        }
        Ok(Page {
            r,
            p_window: self.p_window,
            fiber_top: self.fiber_top,
            cells,
        })
    }

    /// `d_r` on `page`, by lifting each class to an `r`-cycle and reading the
    /// column-`p + r` part of its differential.
    pub fn page_differential(&self, page: &Page) -> Result<PageDifferential, EngineError> {
        let r = page.r();
        let mut maps = BTreeMap::new();
        for p in 0..=self.p_window {
            for q in 0..=self.fiber_top {
                let cell = page.cell(p, q).expect("cell in range");
                if cell.dim() == 0 || q + 1 < r || p + r > self.p_window {
                    continue;
                }
                let h = self.h(q);
                let (s, ker) = self.cycle_kernel(p, q, r);
                if r >= 3 && page.is_stable(p, q) {
                    let zz = Subspace::spanned_by(h, ker.iter().map(|v| v.slice(0, h)));
                    let local = self.column_cycles(p, q, r).sum(cell.den());
                    if !zz.is_subspace_of(&local) {
                        return Err(EngineError::Underdetermined { page: r, p, q });
                    }
                }
                let leading: Vec<BitVec> = ker.iter().map(|v| v.slice(0, h)).collect();
                let proj = BitMatrix::from_columns(h, &leading).expect("uniform column length");
                let tq = q + 1 - r;
                let target = page.cell(p + r, tq).expect("target in range");
                let tstart = self.layouts[(p + q + 1) as usize]
                    .block_start(p + r)
                    .expect("target column in the window");
                let lifted_len = self.layouts[(p + q) as usize].dim - s;
                let mut cols = Vec::with_capacity(cell.dim());
                for rep in cell.reps() {
                    let a = solve(&proj, rep).ok_or(EngineError::LiftFailed { page: r, p, q })?;
                    let mut lift = BitVec::zeros(lifted_len);
                    for k in a.ones() {
                        lift.xor_assign(&ker[k]);
                    }
                    let image = self.apply(p + q, s, &lift);
                    let y = image.slice(tstart, tstart + self.h(tq));
                    cols.push(target.coords(&y).ok_or(EngineError::LiftFailed { page: r, p, q })?);
                }
                let m = BitMatrix::from_columns(target.dim(), &cols).expect("uniform column length");
                maps.insert((p, q), m);
            }
        }
        Ok(PageDifferential { r, maps })
    }
}

/// `E_{r+1} = ker d_r / im d_r`, with representatives re-expressed in E₂
/// coordinates. Checks `d_r ∘ d_r = 0` first.
pub fn turn_page(page: &Page, d: &PageDifferential) -> Result<Page, EngineError> {
    let r = page.r();
    for (&(p, q), m) in d.maps() {
        if let Some(next) = d.map(p + r, q + 1 - r) {
            if !next.mul(m).is_zero() {
                return Err(EngineError::SquareNonZero { page: r, p, q });
            }
        }
    }
    let mut cells = Vec::with_capacity(page.cells.len());
    for p in 0..=page.p_window {
        let mut column = Vec::with_capacity(page.fiber_top as usize + 1);
        for q in 0..=page.fiber_top {
            let cell = page.cell(p, q).expect("cell in range");
            let mut kernel = cell.num().clone();
            if let Some(m) = d.map(p, q) {
                kernel = cell.den().clone();
                for k in kernel_basis(m).basis() {
                    kernel.insert(cell.vector(k));
                }
            }
            let mut image = cell.den().clone();
            if p >= r {
                if let Some(m) = d.map(p - r, q + r - 1) {
                    for col in m.columns() {
                        image.insert(cell.vector(&col));
                    }
                }
            }
            column.push(
                Subquotient::new(kernel, image).map_err(|_| EngineError::ImageNotInKernel { page: r, p, q })?,
            );
        }
        cells.push(column);
    }
    Ok(Page {
        r: r + 1,
        p_window: page.p_window,
        fiber_top: page.fiber_top,
        cells,
    })
}

/// Pages `E_2 ..= E_{fiber_top + 2}` and the differentials between them.
/// The last page is `E∞`: beyond it every differential leaves the first quadrant.
#[derive(Debug, Clone)]
pub struct SpectralRun {
    pages: Vec<Page>,
    differentials: Vec<PageDifferential>,
}

impl SpectralRun {
    pub fn pages(&self) -> &[Page] {
        &self.pages
    }

    pub fn differentials(&self) -> &[PageDifferential] {
        &self.differentials
    }

    pub fn page(&self, r: u32) -> Option<&Page> {
        self.pages.iter().find(|pg| pg.r() == r)
    }

    /// For `r` past the last computed page, `E_r = E∞`.
    pub fn page_or_limit(&self, r: u32) -> Option<&Page> {
        if r < 2 {
            return None;
        }
        self.page(r).or_else(|| self.pages.last())
    }

    pub fn differential(&self, r: u32) -> Option<&PageDifferential> {
        self.differentials.iter().find(|d| d.r() == r)
    }

    pub fn e_infinity(&self) -> &Page {
        self.pages.last().expect("at least the E2 page")
    }
}

/// Runs the spectral sequence for a consistent derivation.
pub fn run_pages(fiber: &BorelFiber, d: &Derivation) -> Result<SpectralRun, EngineError> {
    let complex = FilteredComplex::new(fiber, d);
    let mut pages = vec![build_e2(fiber)];
    let mut differentials = Vec::new();
    for _ in 2..=fiber.fiber_top() + 1 {
        let page = pages.last().expect("nonempty");
        let dr = complex.page_differential(page)?;
        let next = turn_page(page, &dr)?;
        differentials.push(dr);
        pages.push(next);
    }
    Ok(SpectralRun {
        pages,
        differentials,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Survives,
    Eliminated(EliminationReason),
}

#[derive(Debug, Clone)]
pub struct CaseVerdict {
    pub case_id: String,
    pub label: Option<String>,
    pub assignment: DifferentialAssignment,
    pub outcome: Outcome,
    /// Present whenever the derivation was consistent.
    pub run: Option<SpectralRun>,
}

impl CaseVerdict {
    pub fn survives(&self) -> bool {
        self.outcome == Outcome::Survives
    }

    pub fn e_infinity(&self) -> Option<&Page> {
        self.run.as_ref().map(SpectralRun::e_infinity)
    }

    pub fn elimination(&self) -> Option<&EliminationReason> {
        match &self.outcome {
            Outcome::Eliminated(reason) => Some(reason),
            Outcome::Survives => None,
        }
    }
}

pub fn run_case(fiber: &BorelFiber, a: &DifferentialAssignment) -> Result<CaseVerdict, EngineError> {
    let p = fiber.presentation();
    let label = wall_case_label(p, a);
    let case_id = label.clone().unwrap_or_else(|| a.short_id(p));
    let verdict = |outcome, run| CaseVerdict {
        case_id: case_id.clone(),
        label: label.clone(),
        assignment: a.clone(),
        outcome,
        run,
    };
    let d = match Derivation::new(fiber, a) {
        Ok(d) => d,
        Err(reason) => return Ok(verdict(Outcome::Eliminated(reason), None)),
    };
    let run = run_pages(fiber, &d)?;
    let dim_x = fiber.dim_x();
    let tot = run.e_infinity().total_dimensions(dim_x + fiber.fiber_top());
    let violation = (dim_x + 1..=dim_x + fiber.fiber_top()).find(|&j| tot[j as usize] != 0);
    let outcome = match violation {
        Some(degree) => Outcome::Eliminated(EliminationReason::VanishingViolation {
            degree,
            dimension: tot[degree as usize],
        }),
        None => Outcome::Survives,
    };
    Ok(verdict(outcome, Some(run)))
}

/// Runs every enumerated assignment; results keep enumeration order.
pub fn analyze_all(fiber: &BorelFiber) -> Result<Vec<CaseVerdict>, EngineError> {
    enumerate_assignments(fiber.presentation())?
        .par_iter()
        .map(|a| run_case(fiber, a))
        .collect()
}

/// Case names for the Wall fiber with generators `x, c` (degree 1) and `d`
/// (degree 2): `A` (only `d_3(d) = t^3`), `B1..B3` (`d_2(d)` equal to
/// `t^2 x`, `t^2 c`, `t^2 (x + c)`), `C..H` by which of `x, c` support
/// `d_2(·) = t^2`, with `+d3` when `d` carries `t^3`, and `Z` for the
/// all-permanent assignment.
pub fn wall_case_label(fiber: &AlgebraPresentation, a: &DifferentialAssignment) -> Option<String> {
    let names: Vec<(&str, u32)> = fiber
        .generators()
        .iter()
        .map(|g| (g.name.as_str(), g.degree))
        .collect();
    if names != [("x", 1), ("c", 1), ("d", 2)] {
        return None;
    }
    let active = |choice: &GeneratorDifferential| !matches!(choice, GeneratorDifferential::Permanent);
    let [x, c, d] = a.choices() else {
        return None;
    };
    let d_part = match d {
        GeneratorDifferential::Permanent => 0,
        GeneratorDifferential::Transgression { page: 3, .. } => 4,
        GeneratorDifferential::Transgression { target, .. } => {
            let xe = fiber.var("x");
            let ce = fiber.var("c");
            if *target == xe {
                1
            } else if *target == ce {
                2
            } else if *target == xe.add(&ce) {
                3
            } else {
                return None;
            }
        }
    };
    let (plain, with_d2) = match (active(x), active(c)) {
        (false, false) => {
            return Some(match d_part {
                0 => "Z".into(),
                4 => "A".into(),
                k => format!("B{k}"),
            })
        }
        (true, true) => ("C", "D"),
        (true, false) => ("E", "F"),
        (false, true) => ("H", "G"),
    };
    Some(match d_part {
        0 => plain.into(),
        4 => format!("{plain}+d3"),
        k => format!("{with_d2}{k}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{sphere_presentation, wall_presentation};

    fn wall(n: u32) -> BorelFiber {
        let p = wall_presentation(1, n);
        let dim = p.top_degree().unwrap();
        BorelFiber::new(p, dim, true).unwrap()
    }

    fn by_label<'a>(verdicts: &'a [CaseVerdict], label: &str) -> &'a CaseVerdict {
        verdicts
            .iter()
            .find(|v| v.label.as_deref() == Some(label))
            .unwrap_or_else(|| panic!("no case {label}"))
    }

    #[test]
    fn e2_dimensions() {
        let f = wall(3);
        let e2 = build_e2(&f);
        for p in 0..=f.p_window() {
            let dims: Vec<usize> = (0..=8).map(|q| e2.dim(p, q)).collect();
            assert_eq!(dims, [1, 2, 2, 2, 2, 2, 2, 2, 1]);
        }
        let s2 = BorelFiber::new(sphere_presentation(2), 2, false).unwrap();
        let e2 = build_e2(&s2);
        assert_eq!((0..=2).map(|q| e2.dim(3, q)).collect::<Vec<_>>(), [1, 0, 1]);
    }

    #[test]
    fn hypothesis_is_required_for_wall() {
        let p = wall_presentation(1, 3);
        assert_eq!(
            BorelFiber::new(p, 8, false).unwrap_err(),
            EngineError::HypothesisRequired
        );
        let s = BorelFiber::new(sphere_presentation(3), 3, false).unwrap();
        assert_eq!(s.hypothesis(), SimpleCoefficients::Forced);
    }

    #[test]
    fn window_override_must_not_shrink() {
        let f = wall(3);
        assert_eq!(f.p_window(), 8 + 8 + 3);
        assert!(matches!(
            f.clone().with_window(10),
            Err(EngineError::WindowTooSmall { .. })
        ));
        assert_eq!(f.with_window(25).unwrap().p_window(), 25);
    }

    #[test]
    fn wall_assignments_and_labels() {
        let f = wall(3);
        let all = enumerate_assignments(f.presentation()).unwrap();
        assert_eq!(all.len(), 20);
        let mut labels: Vec<String> = all
            .iter()
            .map(|a| wall_case_label(f.presentation(), a).unwrap())
            .collect();
        labels.sort();
        let mut expected: Vec<String> = [
            "A", "B1", "B2", "B3", "C", "C+d3", "D1", "D2", "D3", "E", "E+d3", "F1", "F2", "F3",
            "G1", "G2", "G3", "H", "H+d3", "Z",
        ]
        .map(String::from)
        .to_vec();
        expected.sort();
        assert_eq!(labels, expected);
    }

    #[test]
    fn sphere_has_two_assignments() {
        for n in 1..=5 {
            let all = enumerate_assignments(&sphere_presentation(n)).unwrap();
            assert_eq!(all.len(), 2);
        }
    }

    #[test]
    fn case_e_is_leibniz_inconsistent() {
        let f = wall(3);
        let p = f.presentation();
        let a = DifferentialAssignment::new(
            p,
            vec![
                GeneratorDifferential::Transgression { page: 2, target: p.unit() },
                GeneratorDifferential::Permanent,
                GeneratorDifferential::Permanent,
            ],
        )
        .unwrap();
        let v = run_case(&f, &a).unwrap();
        assert_eq!(v.label.as_deref(), Some("E"));
        match v.elimination().unwrap() {
            EliminationReason::LeibnizInconsistent {
                relation,
                via_lhs,
                via_rhs,
            } => {
                assert_eq!(p.fmt_monomial(&relation.lhs), "c^2");
                assert!(via_lhs.is_zero());
                assert_eq!(via_rhs.fmt_with(p), "t^2*c");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn b1_differential_on_powers_of_d() {
        let f = wall(3);
        let p = f.presentation();
        let a = DifferentialAssignment::new(
            p,
            vec![
                GeneratorDifferential::Permanent,
                GeneratorDifferential::Permanent,
                GeneratorDifferential::Transgression { page: 2, target: p.var("x") },
            ],
        )
        .unwrap();
        for k in 1..=3 {
            let dk = derive_monomial(p, &a, &p.gen_power(2, k));
            if k % 2 == 0 {
                assert!(dk.is_zero());
            } else {
                let expected = p.normal_form(&Element::from(p.gen_power(2, k - 1).mul(&p.gen_monomial(0))));
                assert_eq!(dk.component(2), Some(&expected));
            }
        }
    }

    #[test]
    fn wall_q13_verdicts() {
        let f = wall(3);
        let verdicts = analyze_all(&f).unwrap();
        let survivors: Vec<&str> = verdicts
            .iter()
            .filter(|v| v.survives())
            .map(|v| v.case_id.as_str())
            .collect();
        assert_eq!(survivors, ["A"]);
        for v in &verdicts {
            let label = v.label.as_deref().unwrap();
            let kind = v.elimination().map(EliminationReason::kind);
            match label.chars().next().unwrap() {
                'A' => assert_eq!(kind, None),
                'B' | 'Z' => assert_eq!(kind, Some("vanishing_violation"), "{label}"),
                _ => assert_eq!(kind, Some("leibniz_inconsistent"), "{label}"),
            }
        }
        let a = by_label(&verdicts, "A");
        assert_eq!(
            a.e_infinity().unwrap().total_dimensions(8),
            [1, 3, 4, 3, 2, 3, 4, 3, 1]
        );
    }

    #[test]
    fn b_cases_share_e3_pattern() {
        let f = wall(3);
        let verdicts = analyze_all(&f).unwrap();
        let grid = |label: &str| {
            let page = by_label(&verdicts, label).run.as_ref().unwrap().page(3).unwrap().clone();
            (0..=f.p_window())
                .map(|p| (0..=8).map(|q| page.dim(p, q)).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        let b1 = grid("B1");
        for (p, column) in b1.iter().enumerate() {
            for (q, &dim) in column.iter().enumerate() {
                if p + q >= f.p_window() as usize || q > 6 {
                    continue;
                }
                let expected = match (q, q % 4) {
                    (0, _) | (_, 3) => 1,
                    (_, 1) => if p >= 2 { 1 } else { 2 },
                    (_, 0) => 2,
                    _ => if p >= 2 { 0 } else { 1 },
                };
                assert_eq!(dim, expected, "E3 cell ({p},{q})");
            }
        }
        assert_eq!(grid("B2"), b1);
        assert_eq!(grid("B3"), b1);
    }

    #[test]
    fn case_a_e4_pattern() {
        let f = wall(3);
        let verdicts = analyze_all(&f).unwrap();
        let run = by_label(&verdicts, "A").run.as_ref().unwrap();
        let e4 = run.page(4).unwrap();
        for p in 0..f.p_window() {
            for q in 0..=6 {
                if !e4.is_stable(p, q) {
                    continue;
                }
                let expected = if p >= 3 {
                    0
                } else {
                    [1, 2, 1, 0][(q % 4) as usize]
                };
                assert_eq!(e4.dim(p, q), expected, "E4 cell ({p},{q})");
            }
        }
    }

    #[test]
    fn turned_pages_match_direct_computation() {
        let f = wall(3);
        for a in enumerate_assignments(f.presentation()).unwrap() {
            let Ok(d) = Derivation::new(&f, &a) else {
                continue;
            };
            let complex = FilteredComplex::new(&f, &d);
            let run = run_pages(&f, &d).unwrap();
            for page in run.pages() {
                let direct = complex.direct_page(page.r()).unwrap();
                for p in 0..=f.p_window() {
                    for q in 0..=8 {
                        if page.is_stable(p, q) {
                            assert_eq!(page.cell(p, q), direct.cell(p, q));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_transgression_survives() {
        for n in 1..=5 {
            let f = BorelFiber::new(sphere_presentation(n), n, false).unwrap();
            let verdicts = analyze_all(&f).unwrap();
            let survivors: Vec<&CaseVerdict> = verdicts.iter().filter(|v| v.survives()).collect();
            assert_eq!(survivors.len(), 1);
            let e = survivors[0].e_infinity().unwrap();
            let mut expected = vec![1; n as usize + 1];
            expected.resize(2 * n as usize + 1, 0);
            assert_eq!(e.total_dimensions(2 * n), expected);
            assert!((0..=f.p_window()).all(|p| (1..=n).all(|q| !e.is_stable(p, q) || e.dim(p, q) == 0)));
        }
    }

    #[test]
    fn zero_differential_keeps_page() {
        let f = wall(3);
        let d = Derivation::new(&f, &DifferentialAssignment::permanent(f.presentation())).unwrap();
        let complex = FilteredComplex::new(&f, &d);
        let e2 = build_e2(&f);
        let d2 = complex.page_differential(&e2).unwrap();
        assert!(d2.is_zero());
        let e3 = turn_page(&e2, &d2).unwrap();
        assert_eq!(e3.cells, e2.cells);
    }

    #[test]
    fn render_marks_unstable_cells() {
        let f = BorelFiber::new(sphere_presentation(1), 1, false).unwrap();
        let text = build_e2(&f).render();
        assert!(text.starts_with("E_2 (columns 0..=5)"));
        assert!(text.contains("1~"));
    }
}
