//! Fixtures shared by the benchmarks in `benches/`.

use orbitcoh::{wall_presentation, BorelFiber, Element};

/// `Q(1, n)` as a fiber over a manifold of its own dimension, action assumed trivial.
pub fn wall_fiber(n: u32) -> BorelFiber {
    let p = wall_presentation(1, n);
    let dim = p.top_degree().expect("wall manifolds are finite");
    BorelFiber::new(p, dim, true).expect("hypothesis assumed")
}

/// The sum of every free monomial in degrees `0..=up_to`, a worst case for reduction.
pub fn dense_element(fiber: &BorelFiber, up_to: u32) -> Element {
    let p = fiber.presentation();
    let mut e = Element::zero();
    for q in 0..=up_to {
        for m in p.free_monomials_of_degree(q) {
            e.toggle(m);
        }
    }
    e
}
