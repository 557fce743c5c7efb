//! Small shared helpers.

/// SplitMix64 finalizer; good avalanche for seed derivation.
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for a sub-task of a seeded stage: mixing rather than offsetting keeps
/// the derived streams statistically independent while staying reproducible.
pub fn derive_seed(global: u64, a: u64, b: u64) -> u64 {
    let mut s = mix64(global ^ 0x9E37_79B9_7F4A_7C15);
    s = mix64(s ^ a);
    mix64(s ^ b)
}
