//! Counter-based random numbers for scenario sampling.
//!
//! Every Bernoulli draw is a pure function of `(seed, scenario index,
//! request id)`, so scenarios reproduce regardless of thread count or
//! sampling order. The mixer is the SplitMix64 finalizer:
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//! z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//! z =  z ^ (z >> 31)
//! ```
//!
//! and a draw is
//! `mix(mix(seed + GOLDEN * (scenario + 1)) ^ (GOLDEN_2 * (request + 1)))`,
//! whose top 53 bits give a uniform value in `[0, 1)`.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const GOLDEN_2: u64 = 0xd1b5_4a32_d192_ed03;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Key of one scenario stream.
#[inline]
pub fn scenario_key(seed: u64, scenario: u64) -> u64 {
    mix64(seed.wrapping_add(GOLDEN.wrapping_mul(scenario.wrapping_add(1))))
}

/// Uniform value in `[0, 1)` for one request of one scenario.
#[inline]
pub fn uniform(key: u64, stream: u64) -> f64 {
    let z = mix64(key ^ GOLDEN_2.wrapping_mul(stream.wrapping_add(1)));
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
