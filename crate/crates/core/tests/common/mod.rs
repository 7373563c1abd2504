#![allow(dead_code)]

use qoc_core::{ControlProtocol, TimeGrid};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smooth bounded decay rate: an offset plus three low sine modes.
/// With `positive` set the offset dominates the modes, so `γ > 0`.
pub fn random_protocol(rng: &mut ChaCha8Rng, grid: TimeGrid, positive: bool) -> ControlProtocol {
    let tau = grid.tau();
    let offset: f64 = rng.gen_range(0.3..1.5);
    let modes: Vec<(f64, f64, f64)> = (1..=3)
        .map(|m| {
            let amp = if positive { rng.gen_range(-0.08..0.08) } else { rng.gen_range(-0.8..0.8) };
            (m as f64, amp, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    ControlProtocol::from_fn(grid, |t| {
        offset
            + modes
                .iter()
                .map(|(m, a, phi)| a * (m * std::f64::consts::PI * t / tau + phi).sin())
                .sum::<f64>()
    })
    .unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}
