//! Stable per-run seed derivation.
//!
//! Seeds are 64-bit FNV-1a hashes of the canonical string form of the grid
//! tuple, so the same configuration reproduces the same runs on any platform
//! and adding runs to a point never perturbs the earlier ones.

const FNV_OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over a byte string.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET_BASIS;
    for &byte in bytes {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Seed for one run: FNV-1a of `master|mode|n|p(6 decimals)|run`.
pub fn derive_run_seed(master_seed: u64, mode: &str, n_clients: usize, p: f64, run_index: usize) -> u64 {
    let canonical = format!("{master_seed}|{mode}|{n_clients}|{p:.6}|{run_index}");
    fnv1a_64(canonical.as_bytes())
}
