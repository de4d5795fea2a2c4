//! User-facing builders for Standard and Homogeneous filters.
//!
//! Builders take 64-bit key hashes, pick the system shape (rows, smash,
//! fractional-r block split), run banding plus back-substitution and return
//! an immutable filter. Standard construction can fail and is retried under
//! fresh seeds; homogeneous construction cannot fail.

use crate::banding::{low_mask64, BandingStorage, Equation, InsertOutcome};
use crate::config::{default_smash, RibbonConfig, Variant, SUPPORTED_WIDTHS};
use crate::error::RibbonError;
use crate::hash::{self, KeyHash};
use crate::solve::{
    back_substitute, filter_query, FreeVariablePolicy, Layout, SolutionStorage,
    FREE_VARIABLE_MULTIPLIER,
};
use crate::words::RibbonWord;

/// Empirically good overhead for homogeneous filters: `(4 + r/4) / w`.
pub fn recommended_epsilon(r: f64, w: u32) -> f64 {
    (4.0 + r / 4.0) / w as f64
}

/// Configured space overhead for a Standard build with a roughly 5%
/// per-attempt failure rate, from measured data. Piecewise-linear in
/// `log2(m)`; the narrow widths only have add-till-failure measurements, so
/// they carry a safety factor.
pub fn standard_epsilon_hint(w: u32, m: usize) -> f64 {
    // (log2 m, epsilon) anchors and the per-doubling slope past the last one.
    let (anchors, tail): (&[(f64, f64)], f64) = match w {
        128 => (&[(10.0, 0.022), (14.0, 0.026), (17.0, 0.037), (24.0, 0.059)], 0.0038),
        64 => (&[(10.0, 0.048), (14.0, 0.070), (17.0, 0.094), (24.0, 0.150)], 0.0083),
        32 => (&[(10.0, 0.107), (14.0, 0.224), (17.0, 0.326), (24.0, 0.598)], 0.034),
        _ => (&[(10.0, 0.468), (14.0, 1.144)], 0.17),
    };
    let x = (m.max(2) as f64).log2();
    let first = anchors[0];
    if x <= first.0 {
        // Smaller systems need less overhead, but there are no measurements
        // below 2^10; extrapolate the first segment and floor at half the
        // first anchor rather than trust a long extrapolation.
        let second = anchors[1];
        let slope = (second.1 - first.1) / (second.0 - first.0);
        return (first.1 + (x - first.0) * slope).max(first.1 * 0.5);
    }
    for pair in anchors.windows(2) {
        if x <= pair[1].0 {
            let t = (x - pair[0].0) / (pair[1].0 - pair[0].0);
            return pair[0].1 + t * (pair[1].1 - pair[0].1);
        }
    }
    let last = anchors[anchors.len() - 1];
    last.1 + (x - last.0) * tail
}

fn round_up_multiple(v: usize, to: usize) -> usize {
    v.div_ceil(to) * to
}

/// Alternative to re-seeding after a failed construction: grow the row count
/// by a factor of `(w + 1) / w`, which re-randomizes start positions.
pub fn grow_m(m: usize, w: u32) -> usize {
    round_up_multiple(m + m.div_ceil(w as usize), w as usize)
}

fn default_epsilon(variant: Variant, r_target: f64, w: u32, n: usize) -> f64 {
    match variant {
        Variant::Homogeneous => recommended_epsilon(r_target, w),
        Variant::Standard => {
            // epsilon and m depend on each other; one refinement settles it.
            let mut eps = standard_epsilon_hint(w, n.max(1));
            for _ in 0..2 {
                let m = ((1.0 + eps) * n as f64).ceil() as usize;
                eps = standard_epsilon_hint(w, m.max(1));
            }
            eps
        }
        Variant::Balanced => crate::balanced::default_balanced_epsilon(n, w),
    }
}

fn config_common(
    n: usize,
    r_target: f64,
    w: u32,
    epsilon: f64,
    smash: Option<u32>,
    variant: Variant,
    seed: u64,
) -> Result<RibbonConfig, RibbonError> {
    if !SUPPORTED_WIDTHS.contains(&w) {
        return Err(RibbonError::InvalidConfig(format!(
            "ribbon width {w} not in {SUPPORTED_WIDTHS:?}"
        )));
    }
    if !(1.0..=64.0).contains(&r_target) {
        return Err(RibbonError::InvalidConfig(format!(
            "r = {r_target} outside [1, 64]"
        )));
    }
    if epsilon < 0.0 {
        return Err(RibbonError::InvalidConfig("negative epsilon".into()));
    }
    let m = round_up_multiple(((1.0 + epsilon) * n as f64).ceil() as usize, w as usize)
        .max(w as usize);
    let nb = m / w as usize;
    let r_lower = (r_target.floor() as u32).clamp(1, 64);
    let upper_start_block = if r_target.fract() == 0.0 {
        nb
    } else {
        // Narrow blocks first: pick the split so average columns meet the
        // fractional target.
        ((nb as f64 * (f64::from(r_lower) + 1.0 - r_target)).round() as usize).clamp(0, nb)
    };
    let cfg = RibbonConfig {
        m,
        w,
        r_lower,
        upper_start_block,
        smash: smash.unwrap_or_else(|| default_smash(variant, m, w)),
        seed,
        variant,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Shape a ribbon for `n` keys at (possibly fractional) `r_target` bits per
/// row. `epsilon` and `smash` fall back to per-variant defaults.
pub fn config_for_count(
    n: usize,
    r_target: f64,
    w: u32,
    epsilon: Option<f64>,
    smash: Option<u32>,
    variant: Variant,
    seed: u64,
) -> Result<RibbonConfig, RibbonError> {
    let eps = epsilon.unwrap_or_else(|| default_epsilon(variant, r_target, w, n));
    config_common(n, r_target, w, eps, smash, variant, seed)
}

/// Shape a ribbon for `n` keys that fits a total space budget in bits,
/// choosing a fractional `r`. The result uses at most `budget_bits` and at
/// least `budget_bits - w * ceil(r)` bits of solution storage.
pub fn config_from_space(
    n: usize,
    budget_bits: u64,
    w: u32,
    variant: Variant,
    seed: u64,
) -> Result<RibbonConfig, RibbonError> {
    if !SUPPORTED_WIDTHS.contains(&w) {
        return Err(RibbonError::InvalidConfig(format!(
            "ribbon width {w} not in {SUPPORTED_WIDTHS:?}"
        )));
    }
    if n == 0 {
        return Err(RibbonError::InvalidConfig(
            "space-budget sizing needs at least one key".into(),
        ));
    }
    // r and epsilon depend on each other; iterate a couple of times.
    let mut r_target = (budget_bits as f64 / n as f64).min(64.0);
    let mut eps = 0.0;
    for _ in 0..3 {
        eps = default_epsilon(variant, r_target.max(1.0), w, n);
        r_target = budget_bits as f64 / ((1.0 + eps) * n as f64);
    }
    if r_target < 1.0 {
        return Err(RibbonError::BudgetTooSmall);
    }
    let m = round_up_multiple(((1.0 + eps) * n as f64).ceil() as usize, w as usize)
        .max(w as usize);
    let nb = m / w as usize;
    // Spend the budget exactly in solution words: blocks carry r_lower words
    // each plus one extra for blocks past the split.
    let budget_words = budget_bits / w as u64;
    let r_lower = (budget_words / nb as u64).min(64) as u32;
    if r_lower == 0 {
        return Err(RibbonError::BudgetTooSmall);
    }
    let upper_start_block = if r_lower == 64 {
        nb
    } else {
        (nb as u64 * (r_lower as u64 + 1) - budget_words).min(nb as u64) as usize
    };
    let cfg = RibbonConfig {
        m,
        w,
        r_lower,
        upper_start_block,
        smash: default_smash(variant, m, w),
        seed,
        variant,
    };
    cfg.validate()?;
    debug_assert!(cfg.solution_bits() <= budget_bits);
    debug_assert!(cfg.solution_bits() + u64::from(w) * u64::from(cfg.fingerprint_bits()) >= budget_bits);
    Ok(cfg)
}

/// Construction summary returned alongside every built filter.
#[derive(Clone, Debug, PartialEq)]
pub struct BuildReport {
    pub seed_used: u64,
    pub attempts: u32,
    pub epsilon_configured: f64,
    pub bits_per_key: f64,
    pub redundant_count: u64,
}

/// An immutable Standard or Homogeneous ribbon filter.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RibbonFilter<W> {
    variant: Variant,
    seed: u64,
    smash: u32,
    fp_bits: u32,
    n: u64,
    solution: SolutionStorage<W>,
}

impl<W: RibbonWord> RibbonFilter<W> {
    /// Membership query; never false for a key the filter was built from.
    #[inline]
    pub fn contains(&self, h: KeyHash) -> bool {
        let seeded = hash::derive_seeded_hash(h, self.seed);
        filter_query(&self.solution, seeded, self.variant, self.smash, self.fp_bits)
    }

    #[inline]
    pub fn variant(&self) -> Variant {
        self.variant
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn smash(&self) -> u32 {
        self.smash
    }

    #[inline]
    pub fn fingerprint_bits(&self) -> u32 {
        self.fp_bits
    }

    #[inline]
    pub fn key_count(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn solution(&self) -> &SolutionStorage<W> {
        &self.solution
    }

    /// Shrink the filter by dropping its `k` highest solution columns. Every
    /// key that queried true before still does; the false-positive rate
    /// rises by about `2^k`.
    pub fn drop_columns(&self, k: u32) -> Result<Self, RibbonError> {
        Ok(RibbonFilter {
            solution: self.solution.drop_columns(k)?,
            ..self.clone()
        })
    }

    /// Reassemble a filter from deserialized parts.
    pub fn from_parts(
        variant: Variant,
        seed: u64,
        smash: u32,
        fp_bits: u32,
        n: u64,
        solution: SolutionStorage<W>,
    ) -> Self {
        RibbonFilter {
            variant,
            seed,
            smash,
            fp_bits,
            n,
            solution,
        }
    }
}

pub(crate) fn equation_for<W: RibbonWord>(
    seeded: KeyHash,
    cfg: &RibbonConfig,
    fp_bits: u32,
    homogeneous: bool,
) -> Equation<W> {
    Equation {
        start: hash::start_in_range(seeded, cfg.num_starts(), cfg.smash),
        coeff: hash::coefficient_vector::<W>(seeded, cfg.w),
        rhs: if homogeneous {
            0
        } else {
            hash::fingerprint(seeded, fp_bits)
        },
    }
}

fn report_for(cfg: &RibbonConfig, n: usize, attempts: u32, seed: u64, redundant: u64) -> BuildReport {
    let (eps, bpk) = if n == 0 {
        (0.0, 0.0)
    } else {
        (
            (cfg.m as f64 - n as f64) / n as f64,
            cfg.solution_bits() as f64 / n as f64,
        )
    };
    BuildReport {
        seed_used: seed,
        attempts,
        epsilon_configured: eps,
        bits_per_key: bpk,
        redundant_count: redundant,
    }
}

/// Build a Standard filter, retrying with follow-up seeds (`cfg.seed + k`)
/// on construction failure.
pub fn build_standard<W: RibbonWord>(
    keys: &[KeyHash],
    cfg: &RibbonConfig,
    max_retries: u32,
) -> Result<(RibbonFilter<W>, BuildReport), RibbonError> {
    cfg.validate()?;
    let fp_bits = cfg.fingerprint_bits();
    let attempts_allowed = max_retries.max(1);
    for attempt in 0..attempts_allowed {
        let attempt_seed = cfg.seed.wrapping_add(attempt as u64);
        let mut banding = BandingStorage::<W>::new(cfg.m, cfg.w, fp_bits)?;
        let mut redundant = 0u64;
        let mut failed = false;
        for &key in keys {
            let seeded = hash::derive_seeded_hash(key, attempt_seed);
            match banding.insert(&equation_for(seeded, cfg, fp_bits, false)) {
                InsertOutcome::Inserted(_) => {}
                InsertOutcome::Redundant => redundant += 1,
                InsertOutcome::Inconsistent => {
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            continue;
        }
        let solution = back_substitute(
            &banding,
            FreeVariablePolicy::Zeros,
            Layout::InterleavedColumnMajor,
            cfg.r_lower,
            cfg.upper_start_block,
        )?;
        let filter = RibbonFilter {
            variant: Variant::Standard,
            seed: attempt_seed,
            smash: cfg.smash,
            fp_bits,
            n: keys.len() as u64,
            solution,
        };
        return Ok((filter, report_for(cfg, keys.len(), attempt + 1, attempt_seed, redundant)));
    }
    Err(RibbonError::ConstructionFailed {
        attempts: attempts_allowed,
    })
}

/// Build a Homogeneous filter. All right-hand sides are zero, so insertion
/// can never hit a contradiction and a single attempt always succeeds; free
/// rows are filled pseudo-randomly so the all-zero solution is avoided.
pub fn build_homogeneous<W: RibbonWord>(
    keys: &[KeyHash],
    cfg: &RibbonConfig,
) -> Result<(RibbonFilter<W>, BuildReport), RibbonError> {
    cfg.validate()?;
    let fp_bits = cfg.fingerprint_bits();
    let mut banding = BandingStorage::<W>::new(cfg.m, cfg.w, fp_bits)?;
    let mut redundant = 0u64;
    for &key in keys {
        let seeded = hash::derive_seeded_hash(key, cfg.seed);
        match banding.insert(&equation_for(seeded, cfg, fp_bits, true)) {
            InsertOutcome::Inserted(_) => {}
            InsertOutcome::Redundant => redundant += 1,
            InsertOutcome::Inconsistent => {
                unreachable!("homogeneous insertion cannot contradict")
            }
        }
    }
    let solution = back_substitute(
        &banding,
        FreeVariablePolicy::PseudoRandomOddMultiple(FREE_VARIABLE_MULTIPLIER),
        Layout::InterleavedColumnMajor,
        cfg.r_lower,
        cfg.upper_start_block,
    )?;
    let filter = RibbonFilter {
        variant: Variant::Homogeneous,
        seed: cfg.seed,
        smash: cfg.smash,
        fp_bits,
        n: keys.len() as u64,
        solution,
    };
    let report = report_for(cfg, keys.len(), 1, cfg.seed, redundant);
    Ok((filter, report))
}

/// Homogeneous filters below this size have noticeably noisy false-positive
/// rates; callers may prefer Standard with smash there.
pub fn homogeneous_small_n_warning(n: usize) -> Option<String> {
    (n < 10_000 && n > 0).then(|| {
        format!(
            "homogeneous filter with n = {n} < 10000 keys has high variance in \
             false-positive rate; consider the standard variant with smash"
        )
    })
}

/// Expected value a Standard query compares against, exposed for tests.
#[inline]
pub fn expected_fingerprint(seeded: KeyHash, fp_bits: u32, cols: u32) -> u64 {
    hash::fingerprint(seeded, fp_bits) & low_mask64(cols)
}
