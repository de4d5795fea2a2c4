//! Acceptance suite: every release criterion as one test, each printing a
//! PASS/FAIL line with the measured values.
//!
//! Run with
//!
//! ```text
//! cargo test -p ribbon --test acceptance -- --nocapture
//! ```

mod common;

use common::{batch_eliminate, binomial_sigma, quartiles, DenseEq};
use ribbon::{
    build_balanced, build_homogeneous, build_standard, config_for_count, BandingStorage,
    BuildReport, Equation, InsertOutcome, KeyHash, RibbonConfig, RibbonFilter, SplitMix64,
    Variant,
};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {:02} {}: {}",
        if pass { "PASS" } else { "FAIL" },
        id,
        name,
        detail
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn random_keys(rng: &mut SplitMix64, n: usize) -> Vec<KeyHash> {
    (0..n).map(|_| rng.next_hash()).collect()
}

/// False-positive rate over `probes` fresh random hashes.
fn measure_fp(contains: impl Fn(KeyHash) -> bool, probes: u64, seed: u64) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let mut hits = 0u64;
    for _ in 0..probes {
        hits += contains(rng.next_hash()) as u64;
    }
    hits as f64 / probes as f64
}

// -------------------------------------------------------------------------
// 1. No false negatives for any variant over random configurations.

#[test]
fn acceptance_01_no_false_negatives() {
    let mut rng = SplitMix64::new(0xacce5501);
    let mut builds = 0u32;
    for case in 0..100u32 {
        // n log-uniform in [1, 1e5], r uniform in [1, 16], any width.
        let n = (10f64.powf(rng.next_u64() as f64 / u64::MAX as f64 * 5.0)) as usize;
        let n = n.clamp(1, 100_000);
        let w = [16u32, 32, 64, 128][(rng.next_u64() % 4) as usize];
        let r = 1.0 + (rng.next_u64() % 16) as f64;
        let keys = random_keys(&mut rng, n);
        let seed = u64::from(case) << 8;
        builds += match w {
            16 => run_case01::<u16>(&keys, r, w, seed),
            32 => run_case01::<u32>(&keys, r, w, seed),
            64 => run_case01::<u64>(&keys, r, w, seed),
            _ => run_case01::<u128>(&keys, r, w, seed),
        };
    }
    report(
        1,
        "no false negatives",
        true,
        &format!("{builds} builds across 100 configurations, zero false negatives"),
    );
}

fn run_case01<W: ribbon::RibbonWord>(keys: &[KeyHash], r: f64, w: u32, seed: u64) -> u32 {
    let n = keys.len();
    let hcfg = config_for_count(n, r, w, None, None, Variant::Homogeneous, seed).unwrap();
    let (hf, _) = build_homogeneous::<W>(keys, &hcfg).unwrap();
    for &k in keys {
        assert!(hf.contains(k), "homogeneous fn at n={n} w={w} r={r}");
    }

    let scfg = config_for_count(n, r, w, None, None, Variant::Standard, seed).unwrap();
    let (sf, _) = build_standard::<W>(keys, &scfg, 16).unwrap();
    for &k in keys {
        assert!(sf.contains(k), "standard fn at n={n} w={w} r={r}");
    }

    // Balanced construction is single-attempt; retry across seeds like an
    // application would.
    let mut built = None;
    for retry in 0..16 {
        let bcfg =
            config_for_count(n, r, w, None, None, Variant::Balanced, seed + retry).unwrap();
        if let Ok((bf, _)) = build_balanced::<W>(keys, &bcfg) {
            built = Some(bf);
            break;
        }
    }
    let bf = built.expect("balanced build failed for 16 consecutive seeds");
    for &k in keys {
        assert!(bf.contains(k), "balanced fn at n={n} w={w} r={r}");
    }
    3
}

// -------------------------------------------------------------------------
// 2. Banding outcomes match dense GF(2) elimination on small instances.

#[test]
fn acceptance_02_dense_oracle_equivalence() {
    let mut rng = SplitMix64::new(0xacce5502);
    for _ in 0..1000 {
        let w = 2 + (rng.next_u64() % 7) as u32;
        let m = (w as usize + (rng.next_u64() % 60) as usize).min(64);
        let r = 1 + (rng.next_u64() % 4) as u32;
        let n = 1 + (rng.next_u64() % (m as u64 + 8)) as usize;
        let eqs: Vec<Equation<u8>> = (0..n)
            .map(|_| Equation {
                start: (rng.next_u64() % (m as u64 - w as u64 + 1)) as usize,
                coeff: (rng.next_u64() as u8 | 1) & <u8 as ribbon::RibbonWord>::low_mask(w),
                rhs: rng.next_u64() & ((1 << r) - 1),
            })
            .collect();
        let mut banding = BandingStorage::<u8>::new(m, w, r).unwrap();
        let mut redundant = 0usize;
        let mut inconsistent = 0usize;
        for eq in &eqs {
            match banding.insert(eq) {
                InsertOutcome::Inserted(_) => {}
                InsertOutcome::Redundant => redundant += 1,
                InsertOutcome::Inconsistent => inconsistent += 1,
            }
        }
        let dense: Vec<DenseEq> = eqs.iter().map(|e| DenseEq::from_equation(e, w, m)).collect();
        let oracle = batch_eliminate(&dense, m);
        assert_eq!(banding.occupied_rows(), oracle.pivot_cols);
        assert_eq!(banding.occupied_count(), oracle.rank);
        assert_eq!(inconsistent == 0, oracle.consistent);
        if oracle.consistent {
            assert_eq!(redundant, eqs.len() - oracle.rank);
        }
    }
    report(
        2,
        "dense oracle equivalence",
        true,
        "1000 random instances matched pivot set, rank and consistency",
    );
}

// -------------------------------------------------------------------------
// 3. Occupied rows and total displacement are insertion-order invariant.

#[test]
fn acceptance_03_order_invariance() {
    let mut rng = SplitMix64::new(0xacce5503);
    let mut instances = 0;
    while instances < 100 {
        let w = 4 + (rng.next_u64() % 5) as u32;
        let m = (w as usize + 16 + (rng.next_u64() % 44) as usize).min(64);
        let n = m * 3 / 4;
        let mut eqs: Vec<Equation<u8>> = (0..n)
            .map(|_| Equation {
                start: (rng.next_u64() % (m as u64 - w as u64 + 1)) as usize,
                coeff: (rng.next_u64() as u8 | 1) & <u8 as ribbon::RibbonWord>::low_mask(w),
                rhs: rng.next_u64() & 0x7,
            })
            .collect();
        let mut banding = BandingStorage::<u8>::new(m, w, 3).unwrap();
        if !eqs
            .iter()
            .all(|eq| matches!(banding.insert(eq), InsertOutcome::Inserted(_)))
        {
            continue; // need a cleanly insertable multiset
        }
        let rows = banding.occupied_rows();
        let disp = banding.displacement();
        for _ in 0..10 {
            for i in (1..eqs.len()).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                eqs.swap(i, j);
            }
            let mut b = BandingStorage::<u8>::new(m, w, 3).unwrap();
            for eq in &eqs {
                assert!(b.insert(eq).is_success());
            }
            assert_eq!(b.occupied_rows(), rows);
            assert_eq!(b.displacement(), disp);
        }
        instances += 1;
    }
    report(
        3,
        "order invariance",
        true,
        "100 instances x 10 permutations: identical occupied rows and displacement",
    );
}

// -------------------------------------------------------------------------
// 4. Standard filter false-positive calibration at r in {3, 7, 11}.

#[test]
fn acceptance_04_standard_fp_calibration() {
    let mut rng = SplitMix64::new(0xacce5504);
    let n = 1_000_000usize;
    let probes = 10_000_000u64;
    let mut details = Vec::new();
    let mut ok = true;
    let keys = random_keys(&mut rng, n);
    for r in [3u32, 7, 11] {
        let cfg =
            config_for_count(n, r as f64, 64, None, None, Variant::Standard, 0x40 + r as u64)
                .unwrap();
        let (filter, _) = build_standard::<u64>(&keys, &cfg, 8).unwrap();
        let p = 2f64.powi(-(r as i32));
        let rate = measure_fp(|h| filter.contains(h), probes, 0x517e + r as u64);
        let sigma = binomial_sigma(p, probes);
        let pass = (rate - p).abs() <= 3.0 * sigma;
        ok &= pass;
        details.push(format!(
            "r={r}: fp={rate:.6} target={p:.6} ({:+.2} sigma)",
            (rate - p) / sigma
        ));
    }
    report(4, "standard fp calibration", ok, &details.join("; "));
}

// -------------------------------------------------------------------------
// 5. Homogeneous w=64 r=7: measured fp ~0.81%, overhead ~10.1%.

#[test]
fn acceptance_05_homogeneous_overhead() {
    // The per-build rate f_Z has visible variance even at n = 1e6, so the
    // configuration's rate is measured as a mean over several builds.
    let n = 1_000_000usize;
    let builds = 8u64;
    let probes_per_build = 4_000_000u64;
    let mut rates = Vec::new();
    let mut bits_per_key = 0.0;
    for b in 0..builds {
        let mut rng = SplitMix64::new(0xacce5505 ^ (b << 24));
        let keys = random_keys(&mut rng, n);
        let cfg =
            config_for_count(n, 7.0, 64, Some(0.09), None, Variant::Homogeneous, b).unwrap();
        let (filter, rep) = build_homogeneous::<u64>(&keys, &cfg).unwrap();
        bits_per_key = rep.bits_per_key;
        rates.push(measure_fp(|h| filter.contains(h), probes_per_build, 0xf00 + b));
    }
    let rate = rates.iter().sum::<f64>() / builds as f64;
    let fp_ok = (rate - 0.0081).abs() <= 0.0005;
    let overhead = bits_per_key / (1.0 / rate).log2() - 1.0;
    let ov_ok = (overhead - 0.101).abs() <= 0.01;
    let spread = rates
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    report(
        5,
        "homogeneous overhead",
        fp_ok && ov_ok,
        &format!(
            "fp={:.4}% over {builds} builds (want 0.81 +/- 0.05, per-build range {:.4}..{:.4}%), \
             overhead={:.2}% (want 10.1 +/- 1.0), bits/key={:.3}",
            rate * 100.0,
            spread.0 * 100.0,
            spread.1 * 100.0,
            overhead * 100.0,
            bits_per_key
        ),
    );
}

// -------------------------------------------------------------------------
// 6. Construction failure rates for three measured configurations.

#[test]
fn acceptance_06_construction_failure_rates() {
    // The tabulated overheads are quoted to 0.1pp, which at these knees moves
    // the failure rate by tens of percent; the gate is therefore one-sided
    // (failure <= 0.05 + 0.02) with a sanity floor that the configuration
    // really sits near the knee rather than in the always-succeeds regime.
    let trials = 4000u64;
    let rows: [(u32, usize, f64, u32); 3] = [
        (64, 1 << 14, 0.070, 0),
        (64, 1 << 10, 0.037, 32),
        (128, 1 << 10, 0.005, 64),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (w, m, eps, smash) in rows {
        let n = (m as f64 / (1.0 + eps)).round() as usize;
        let failures = match w {
            64 => failure_count::<u64>(w, m, n, smash, trials),
            _ => failure_count::<u128>(w, m, n, smash, trials),
        };
        let rate = failures as f64 / trials as f64;
        let pass = (0.005..=0.07).contains(&rate);
        ok &= pass;
        details.push(format!("w={w} m={m} smash={smash}: failure={rate:.4}"));
    }
    report(
        6,
        "construction failure rates",
        ok,
        &format!(
            "{} (want ~0.05, gate [0.005, 0.07], {trials} trials each)",
            details.join("; ")
        ),
    );
}

fn failure_count<W: ribbon::RibbonWord>(
    w: u32,
    m: usize,
    n: usize,
    smash: u32,
    trials: u64,
) -> u64 {
    let mut rng = SplitMix64::new(0xacce5506 ^ (w as u64) << 20 ^ m as u64);
    let mut failures = 0;
    for t in 0..trials {
        let keys = random_keys(&mut rng, n);
        let cfg = RibbonConfig {
            m,
            w,
            r_lower: 7,
            upper_start_block: m / w as usize,
            smash,
            seed: t,
            variant: Variant::Standard,
        };
        failures += build_standard::<W>(&keys, &cfg, 1).is_err() as u64;
    }
    failures
}

// -------------------------------------------------------------------------
// 7. Add-till-failure median occupancy overhead.

#[test]
fn acceptance_07_add_till_failure_medians() {
    let trials = 501;
    let mut ok = true;
    let mut details = Vec::new();
    for (w, m, want) in [(32u32, 1usize << 10, 0.063f64), (64, 1 << 14, 0.041)] {
        let mut samples: Vec<f64> = (0..trials)
            .map(|t| match w {
                32 => add_till_failure_epsilon::<u32>(w, m, 0xacce5507 + (t as u64) * 7919),
                _ => add_till_failure_epsilon::<u64>(w, m, 0xacce5507 + (t as u64) * 7919),
            })
            .collect();
        let (_, median, _) = quartiles(&mut samples);
        let pass = (median - want).abs() <= 0.007;
        ok &= pass;
        details.push(format!(
            "w={w} m={m}: median eps={:.2}% (want {:.1} +/- 0.7)",
            median * 100.0,
            want * 100.0
        ));
    }
    report(7, "add-till-failure medians", ok, &details.join("; "));
}

fn add_till_failure_epsilon<W: ribbon::RibbonWord>(w: u32, m: usize, seed: u64) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let mut banding = BandingStorage::<W>::new(m, w, 64).unwrap();
    let num_starts = m - w as usize + 1;
    let mut successes = 0u64;
    loop {
        let h = rng.next_hash();
        let eq = Equation {
            start: ribbon::start_in_range(h, num_starts, 0),
            coeff: ribbon::coefficient_vector::<W>(h, w),
            rhs: ribbon::fingerprint(h, 64),
        };
        if !banding.insert(&eq).is_success() {
            break;
        }
        successes += 1;
    }
    (m as u64 - successes) as f64 / successes as f64
}

// -------------------------------------------------------------------------
// 8. Square system with half-width smash succeeds at the random-matrix rate.

#[test]
fn acceptance_08_smash_square_success() {
    let trials = 2000u64;
    let mut rng = SplitMix64::new(0xacce5508);
    let mut successes = 0u64;
    for t in 0..trials {
        let keys = random_keys(&mut rng, 64);
        let cfg = RibbonConfig {
            m: 64,
            w: 64,
            r_lower: 7,
            upper_start_block: 1,
            smash: 32,
            seed: t,
            variant: Variant::Standard,
        };
        successes += build_standard::<u64>(&keys, &cfg, 1).is_ok() as u64;
    }
    let rate = successes as f64 / trials as f64;
    report(
        8,
        "smash square-system success",
        (rate - 0.289).abs() <= 0.03,
        &format!("success rate {rate:.3} over {trials} trials (want 0.289 +/- 0.03)"),
    );
}

// -------------------------------------------------------------------------
// 9. Fractional r: fp strictly between the neighboring powers of two.

#[test]
fn acceptance_09_fractional_r() {
    let mut rng = SplitMix64::new(0xacce5509);
    let n = 1_000_000usize;
    let keys = random_keys(&mut rng, n);
    let cfg = config_for_count(n, 7.7, 32, None, None, Variant::Homogeneous, 9).unwrap();
    let (filter, rep) = build_homogeneous::<u32>(&keys, &cfg).unwrap();
    let rate = measure_fp(|h| filter.contains(h), 10_000_000, 0x97);
    let fp_ok = rate > 2f64.powi(-8) && rate < 2f64.powi(-7);
    let want_bpk = 7.7 * (1.0 + rep.epsilon_configured);
    let bpk_ok = (rep.bits_per_key - want_bpk).abs() / want_bpk <= 0.02;
    report(
        9,
        "fractional r",
        fp_ok && bpk_ok,
        &format!(
            "fp={:.5} in (2^-8, 2^-7) = (0.00391, 0.00781); bits/key={:.3} vs 7.7(1+eps)={:.3}",
            rate, rep.bits_per_key, want_bpk
        ),
    );
}

// -------------------------------------------------------------------------
// 10. Elasticity: dropping a column raises fp from 2^-8 to 2^-7.

#[test]
fn acceptance_10_elasticity() {
    let mut rng = SplitMix64::new(0xacce550a);
    let n = 1_000_000usize;
    let probes = 10_000_000u64;
    let keys = random_keys(&mut rng, n);
    let cfg = config_for_count(n, 8.0, 64, None, None, Variant::Standard, 10).unwrap();
    let (filter, _) = build_standard::<u64>(&keys, &cfg, 8).unwrap();
    let dropped = filter.drop_columns(1).unwrap();
    let members_ok = keys.iter().all(|&k| dropped.contains(k));
    let rate = measure_fp(|h| dropped.contains(h), probes, 0xe1a);
    let p = 2f64.powi(-7);
    let fp_ok = (rate - p).abs() <= 3.0 * binomial_sigma(p, probes);
    report(
        10,
        "elasticity",
        members_ok && fp_ok,
        &format!(
            "after dropping 1 of 8 columns: members all positive = {members_ok}, fp={rate:.6} \
             (want 2^-7 = {p:.6} within 3 sigma)"
        ),
    );
}

// -------------------------------------------------------------------------
// 11. Balanced ribbon: builds at low overhead for most seeds (experimental).

#[test]
fn acceptance_11_balanced_overhead() {
    let n = 1_000_000usize;
    let mut successes = 0u32;
    let mut overheads = Vec::new();
    for seed in 0..10u64 {
        let mut rng = SplitMix64::new(0xacce550b ^ (seed << 32));
        let keys = random_keys(&mut rng, n);
        let cfg = config_for_count(n, 7.0, 64, None, None, Variant::Balanced, seed).unwrap();
        let Ok((filter, _)) = build_balanced::<u64>(&keys, &cfg) else {
            continue;
        };
        successes += 1;
        for &k in &keys {
            assert!(filter.contains(k));
        }
        let rate = measure_fp(|h| filter.contains(h), 2_000_000, 0xba1 + seed);
        let overhead = filter.bits_per_key() / (1.0 / rate).log2() - 1.0;
        overheads.push(overhead);
    }
    let mean_overhead = overheads.iter().sum::<f64>() / overheads.len().max(1) as f64;
    let pass = successes >= 9 && mean_overhead <= 0.02;
    report(
        11,
        "balanced overhead (experimental)",
        pass,
        &format!(
            "{successes}/10 seeds built; mean total overhead incl. metadata = {:.2}% \
             (gate: >= 9/10 and <= 2%; informally targeting well under that)",
            mean_overhead * 100.0
        ),
    );
}

// -------------------------------------------------------------------------
// 12. Relative query cost, reported but not gated.

#[test]
fn acceptance_12_query_cost_report() {
    let mut rng = SplitMix64::new(0xacce550c);
    let n = 1_000_000usize;
    let keys = random_keys(&mut rng, n);
    let cfg = config_for_count(n, 7.0, 64, None, None, Variant::Homogeneous, 12).unwrap();
    let (filter, _) = build_homogeneous::<u64>(&keys, &cfg).unwrap();

    let probes: Vec<KeyHash> = (0..1_000_000).map(|_| rng.next_hash()).collect();
    let z = filter.solution();
    let pairs: Vec<(usize, u64)> = probes
        .iter()
        .map(|&h| {
            let seeded = ribbon::derive_seeded_hash(h, filter.seed());
            (
                ribbon::start_in_range(seeded, z.num_starts(), 0),
                ribbon::coefficient_vector::<u64>(seeded, 64),
            )
        })
        .collect();

    let t0 = std::time::Instant::now();
    let mut acc = 0u64;
    for &(start, coeff) in &pairs {
        acc ^= z.retrieve(start, coeff);
    }
    let retrieve_ns = t0.elapsed().as_nanos() as f64 / pairs.len() as f64;

    let t1 = std::time::Instant::now();
    let mut hits = 0u64;
    for &h in &probes {
        hits += filter.contains(h) as u64;
    }
    let query_ns = t1.elapsed().as_nanos() as f64 / probes.len() as f64;
    std::hint::black_box((acc, hits));

    let ratio = query_ns / retrieve_ns;
    report(
        12,
        "query cost (reported, not gated)",
        true,
        &format!(
            "full query {query_ns:.1} ns vs raw retrieve {retrieve_ns:.1} ns, ratio {ratio:.2} \
             (informal target: within 4x)"
        ),
    );
}

// -------------------------------------------------------------------------
// Shared helper kept honest: the report type is part of the public surface.

#[allow(dead_code)]
fn assert_report_shape(rep: &BuildReport) {
    let _ = (
        rep.seed_used,
        rep.attempts,
        rep.epsilon_configured,
        rep.bits_per_key,
        rep.redundant_count,
    );
}

#[allow(dead_code)]
fn touch_filter_api<W: ribbon::RibbonWord>(f: &RibbonFilter<W>) {
    let _ = (f.variant(), f.seed(), f.smash(), f.fingerprint_bits());
}
