//! Build the three filter variants over the same key set and compare their
//! space overhead against the entropy bound for the measured FP rate.
//!
//! Run: cargo run --release -p ribbon --example variants

use ribbon::{
    build_balanced, build_homogeneous, build_standard, config_for_count, KeyHash, SplitMix64,
    Variant,
};

fn measure(name: &str, bits_per_key: f64, contains: impl Fn(KeyHash) -> bool) {
    let mut rng = SplitMix64::new(0xdecade);
    let probes = 4_000_000u64;
    let fp = (0..probes).filter(|_| contains(rng.next_hash())).count() as f64 / probes as f64;
    println!(
        "{name:<12} {bits_per_key:>6.3} bits/key  fp {:.4}%  overhead {:+.2}%",
        fp * 100.0,
        (bits_per_key / (1.0 / fp).log2() - 1.0) * 100.0
    );
}

fn main() {
    let n = 1_000_000usize;
    let mut rng = SplitMix64::new(1);
    let keys: Vec<KeyHash> = (0..n).map(|_| rng.next_hash()).collect();
    let r = 7.0;

    let cfg = config_for_count(n, r, 64, None, None, Variant::Standard, 0).unwrap();
    let (standard, rep) = build_standard::<u64>(&keys, &cfg, 8).unwrap();
    measure("standard", rep.bits_per_key, |h| standard.contains(h));

    let cfg = config_for_count(n, r, 64, None, None, Variant::Homogeneous, 0).unwrap();
    let (homogeneous, rep) = build_homogeneous::<u64>(&keys, &cfg).unwrap();
    measure("homogeneous", rep.bits_per_key, |h| homogeneous.contains(h));

    let cfg = config_for_count(n, r, 64, None, None, Variant::Balanced, 0).unwrap();
    let (balanced, _) = build_balanced::<u64>(&keys, &cfg).unwrap();
    measure("balanced", balanced.bits_per_key(), |h| balanced.contains(h));
}
