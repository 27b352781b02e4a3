//! Seeding.
//!
//! Every session draws from a single [`SessionRng`] seeded from the
//! configured 64-bit seed. Sweep cells derive their seeds with
//! [`mix_seed`], so each cell is reproducible on its own.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SessionRng = ChaCha8Rng;

pub fn session_rng(seed: u64) -> SessionRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `mix(master, index)`: the splitmix64 finalizer applied to
/// `master + (index + 1) · 0x9E3779B97F4A7C15` (wrapping).
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
