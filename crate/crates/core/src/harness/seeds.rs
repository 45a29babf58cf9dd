//! Per-trial seeds derived from a root seed, independent of execution order.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn absorb(state: u64, word: u64) -> u64 {
    mix(state.wrapping_add(GOLDEN) ^ word)
}

/// Folds a label and indices into one seed. Labels are absorbed byte by
/// byte so the result does not depend on platform hashing.
pub fn derive_seed(root: u64, label: &str, indices: &[u64]) -> u64 {
    let mut s = mix(root);
    for b in label.bytes() {
        s = absorb(s, b as u64);
    }
    s = absorb(s, label.len() as u64);
    for &i in indices {
        s = absorb(s, i);
    }
    s
}

pub fn trial_seed(root: u64, label: &str, n: usize, trial: usize) -> u64 {
    derive_seed(root, label, &[n as u64, trial as u64])
}
