use rand::Rng;

use super::SearchSpace;
use crate::num::{self, Rational};

/// Gaussian offsets are snapped to multiples of `1 / NEIGHBOR_GRID` so that
/// every point stays an exact rational.
pub const NEIGHBOR_GRID: i128 = 1_000_000_000;

/// One standard normal draw, Box–Muller, cosine branch.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // gen() is in [0, 1); shift to (0, 1] so ln stays finite
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// `count` points drawn from `N(alpha, beta I)`, each clamped into the space.
pub fn neighborhood<R: Rng + ?Sized>(
    space: &SearchSpace,
    alpha: &[Rational],
    beta: f64,
    count: usize,
    rng: &mut R,
) -> Vec<Vec<Rational>> {
    if beta <= 0.0 {
        return vec![alpha.to_vec(); count];
    }
    let sd = beta.sqrt();
    (0..count)
        .map(|_| {
            let point = alpha
                .iter()
                .map(|a| a + num::quantize(sd * gaussian(rng), NEIGHBOR_GRID))
                .collect();
            space.clamp(point)
        })
        .collect()
}
