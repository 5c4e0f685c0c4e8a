//! Shared fixtures for the criterion benches in `benches/`.

use moyallax_core::random::{random_poly, seeded_rng, PolyShape};
use moyallax_core::{DiffPoly, TruncationContext};

/// Two reproducible random polynomials of the default shape under a μ cap.
pub fn poly_pair(seed: u64, mu_cap: u32) -> (DiffPoly, DiffPoly) {
    let mut rng = seeded_rng(seed);
    let trunc = TruncationContext::with_mu_cap(mu_cap);
    let shape = PolyShape::default();
    (
        random_poly(&mut rng, &shape, 2, trunc),
        random_poly(&mut rng, &shape, 2, trunc),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_reproducible() {
        assert_eq!(poly_pair(3, 4), poly_pair(3, 4));
        assert!(!poly_pair(3, 4).0.is_zero());
    }
}
