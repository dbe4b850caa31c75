//! Cohomology of orbit spaces of free involutions over GF(2).
//!
//! The pipeline: describe the fiber cohomology as a finitely presented
//! graded algebra ([`graded`]), classify candidate induced actions
//! ([`involution`]), run the Borel-fibration spectral sequence for every
//! admissible transgression pattern ([`spectral`]), and rebuild the orbit
//! ring from a surviving `E_inf` page ([`ring`]).

pub mod f2;
pub mod graded;
pub mod involution;
pub mod ring;
pub mod spectral;

pub use f2::{BitMatrix, BitVec, F2Error, Subquotient, Subspace};
pub use graded::{
    base_presentation, dold_presentation, point_presentation, sphere_presentation,
    wall_presentation, AlgebraError, AlgebraPresentation, Element, Generator, Monomial,
    RewriteRule,
};
pub use involution::{classify, classify_free_actions, trivial_action_forced, ActionReport, CandidateFate, InvolutionError};
pub use ring::{
    present_orbit_ring, total_dimensions, verify_presentation, OrbitGenerator, OrbitPresentation, Provenance,
    RingError, SeriesMismatch,
};
pub use spectral::{
    analyze_all, build_e2, enumerate_assignments, run_case, turn_page, BorelFiber, CaseVerdict,
    DifferentialAssignment, EliminationReason, EngineError, GeneratorDifferential, Outcome, Page,
    PageDifferential, SpectralRun,
};
