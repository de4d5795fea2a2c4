//! Experimental balanced variant: soft sharding with greedy load balancing.
//!
//! The row space is carved into contiguous soft shards organized in levels
//! (half the shards in level 1, a quarter in level 2, and so on, with a
//! single final shard). Every key has a primary shard, level-1 shards being
//! slightly overweighted, and a secondary shard one level later. Shards are
//! filled greedily level by level; when a bucket of keys does not fit, its
//! insertions are backtracked, the bucket's bump bit is set and the keys move
//! to their secondary shards. Queries read that one bit to decide which shard
//! to probe. The final shard must take everything that reaches it, so it is
//! allotted standard-ribbon headroom while earlier shards run tight.

use crate::banding::{BandingStorage, InsertOutcome};
use crate::config::{RibbonConfig, Variant};
use crate::error::RibbonError;
use crate::filter::{standard_epsilon_hint, BuildReport, RibbonFilter};
use crate::hash::{
    self, fastrange64, KeyHash, BUCKET_MULTIPLIER, SECONDARY_MULTIPLIER, SHARD_MULTIPLIER,
};
use crate::solve::{back_substitute, FreeVariablePolicy, Layout};
use crate::words::RibbonWord;

/// Buckets per shard; one metadata bit each.
pub const BUCKETS_PER_SHARD: usize = 8;

/// Interior slack fraction assumed by [`default_balanced_epsilon`]: bump
/// granularity and within-shard solver losses leave roughly this share of
/// slots unfilled outside the final shard. Narrow ribbons lose much more per
/// shard, hence the width dependence (measured on random builds).
fn interior_slack(w: u32) -> f64 {
    match w {
        128 => 0.012,
        64 => 0.012,
        32 => 0.045,
        _ => 0.30,
    }
}

/// Soft-shard geometry: shard count, level structure and sampling weights.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ShardPlan {
    num_shards: usize,
    levels: usize,
    /// `level_lo[i]` is the first shard of level `i + 1`; length `levels + 1`.
    level_lo: Vec<usize>,
    /// Primary-shard overweight for level 1 is `alpha = 2^-alpha_log2`.
    alpha_log2: u32,
    n: usize,
    /// Cumulative bucket thresholds on the full 64-bit range.
    bucket_bounds: [u64; BUCKETS_PER_SHARD],
}

/// Bucket thresholds for a geometric size distribution with ratio
/// `2^-0.5` between consecutive buckets, normalized over eight buckets.
/// Built from sqrt/mul/div only, all exactly rounded, so results are
/// identical across platforms.
fn bucket_boundaries() -> [u64; BUCKETS_PER_SHARD] {
    let q = 0.5f64.sqrt();
    let total = (1.0 - 0.0625) / (1.0 - q); // 1 - q^8 = 1 - 2^-4
    let mut bounds = [0u64; BUCKETS_PER_SHARD];
    let mut power = 1.0;
    let mut cum = 0.0;
    for (k, b) in bounds.iter_mut().enumerate() {
        cum += power / total;
        power *= q;
        *b = if k + 1 == BUCKETS_PER_SHARD {
            u64::MAX
        } else {
            (cum * 18_446_744_073_709_551_616.0) as u64
        };
    }
    bounds
}

fn choose_shard_count(n: usize, w: u32, target: Option<usize>) -> usize {
    let target = target.unwrap_or((w as usize * w as usize) / 4).max(1);
    if n < target + target / 2 {
        return 1;
    }
    let ratio = n as f64 / target as f64;
    let mut s = 1usize << (ratio.log2().round().max(0.0) as u32).min(31);
    // Keep shards from getting degenerate relative to the ribbon width.
    while s > 1 && n / s < 4 * w as usize {
        s /= 2;
    }
    s
}

impl ShardPlan {
    /// Plan for `n` keys: the shard count is the power of two putting keys
    /// per shard closest to `target` (default: the natural shard size of
    /// about `w^2 / 4`).
    pub fn plan_shards(n: usize, w: u32, target: Option<usize>) -> ShardPlan {
        Self::with_shard_count(n, choose_shard_count(n, w, target))
    }

    /// Plan with an explicit (power of two) shard count.
    pub fn with_shard_count(n: usize, num_shards: usize) -> ShardPlan {
        assert!(num_shards >= 1 && num_shards.is_power_of_two());
        let levels = if num_shards == 1 {
            1
        } else {
            num_shards.ilog2() as usize + 1
        };
        let mut level_lo = Vec::with_capacity(levels + 1);
        let mut lo = 0usize;
        level_lo.push(0);
        for i in 1..=levels {
            let count = if i < levels { num_shards >> i } else { 1 };
            lo += count;
            level_lo.push(lo);
        }
        debug_assert_eq!(lo, num_shards);
        let per_shard = (n / num_shards).max(1) as f64;
        // alpha ~ 3.5 / sqrt(keys per shard), quantized to a power of two and
        // capped at 1/4: tiny shards would otherwise overload level 1 so much
        // that the bump cascade swamps later levels.
        let alpha_log2 = ((-(3.5 / per_shard.sqrt()).log2()).round() as i64).clamp(2, 16) as u32;
        ShardPlan {
            num_shards,
            levels,
            level_lo,
            alpha_log2,
            n,
            bucket_bounds: bucket_boundaries(),
        }
    }

    #[inline]
    pub fn num_shards(&self) -> usize {
        self.num_shards
    }

    #[inline]
    pub fn levels(&self) -> usize {
        self.levels
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        (2f64).powi(-(self.alpha_log2 as i32))
    }

    #[inline]
    pub fn key_count(&self) -> usize {
        self.n
    }

    /// 1-based level of a shard.
    pub fn level_of(&self, shard: usize) -> usize {
        debug_assert!(shard < self.num_shards);
        self.level_lo.partition_point(|&lo| lo <= shard)
    }

    /// First shard and shard count of a 1-based level.
    pub fn level_range(&self, level: usize) -> (usize, usize) {
        debug_assert!((1..=self.levels).contains(&level));
        let lo = self.level_lo[level - 1];
        (lo, self.level_lo[level] - lo)
    }

    /// Shards per level, largest level first.
    pub fn level_sizes(&self) -> Vec<usize> {
        (1..=self.levels).map(|i| self.level_range(i).1).collect()
    }

    /// Expected share of a shard's keys landing in bump bucket `b`.
    pub fn bucket_fraction(&self, b: usize) -> f64 {
        let hi = self.bucket_bounds[b];
        let lo = if b == 0 { 0 } else { self.bucket_bounds[b - 1] };
        (hi - lo) as f64 / 18_446_744_073_709_551_616.0
    }

    fn bucket_for(&self, h: KeyHash) -> u8 {
        let u = h.0.wrapping_mul(BUCKET_MULTIPLIER);
        self.bucket_bounds
            .iter()
            .position(|&b| u <= b)
            .expect("last bound is u64::MAX") as u8
    }

    /// Rows reserved for the final shard: its expected keys, the
    /// standard-ribbon overhead a shard of that size needs, and a
    /// three-sigma cushion for the arrival variance that the greedy pass
    /// concentrates onto the last shard.
    fn last_shard_slots(&self, m: usize, w: u32) -> usize {
        if self.num_shards == 1 {
            return m;
        }
        let even = m / self.num_shards;
        let per_keys = self.n as f64 / self.num_shards as f64;
        let eps = standard_epsilon_hint(w, even.max(2));
        let want = (per_keys * (1.0 + eps) + 3.0 * per_keys.sqrt()).ceil() as usize;
        want.clamp(even, m / 2)
    }

    /// First row of `shard`; `shard == num_shards` yields `m`.
    pub fn row_lo(&self, shard: usize, m: usize, w: u32) -> usize {
        debug_assert!(shard <= self.num_shards);
        let s = self.num_shards;
        if s == 1 {
            return if shard == 0 { 0 } else { m };
        }
        if shard == s {
            return m;
        }
        let base_total = m - self.last_shard_slots(m, w);
        if shard == s - 1 {
            base_total
        } else {
            shard * base_total / (s - 1)
        }
    }

    /// Start positions owned by `shard`: `(first, count)`.
    pub fn start_range(&self, shard: usize, m: usize, w: u32) -> (usize, usize) {
        let lo = self.row_lo(shard, m, w);
        let hi = if shard + 1 == self.num_shards {
            m - w as usize + 1
        } else {
            self.row_lo(shard + 1, m, w)
        };
        debug_assert!(hi > lo);
        (lo, hi - lo)
    }
}

/// Where a key lives: primary shard, fallback shard, and its bump bucket
/// within the primary shard.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Assignment {
    pub primary: usize,
    pub secondary: usize,
    pub bucket: u8,
}

/// Sample a key's shard locations and bucket from an already-seeded hash.
///
/// Level-1 shards carry relative primary weight `1 + alpha`, all others
/// `1 - alpha`; the secondary shard is uniform on the next level (the final
/// level folds onto itself). Weights are exact integer multiples of
/// `2^-alpha_log2`, so sampling needs no floating point.
pub fn assign_locations(h: KeyHash, plan: &ShardPlan) -> Assignment {
    let s = plan.num_shards;
    let bucket = plan.bucket_for(h);
    if s == 1 {
        return Assignment {
            primary: 0,
            secondary: 0,
            bucket,
        };
    }
    let unit = 1u64 << plan.alpha_log2;
    let level1 = (s / 2) as u64;
    let total = (s as u64) << plan.alpha_log2;
    let t = fastrange64(h.0.wrapping_mul(SHARD_MULTIPLIER), total);
    let level1_mass = level1 * (unit + 1);
    let primary = if t < level1_mass {
        (t / (unit + 1)) as usize
    } else {
        (level1 + (t - level1_mass) / (unit - 1)) as usize
    };
    let level = plan.level_of(primary);
    let (lo, cnt) = plan.level_range((level + 1).min(plan.levels));
    let idx = fastrange64(h.0.wrapping_mul(SECONDARY_MULTIPLIER), cnt as u64) as usize;
    let mut secondary = lo + idx;
    if secondary == primary && cnt > 1 {
        secondary = lo + (idx + 1) % cnt;
    }
    Assignment {
        primary,
        secondary,
        bucket,
    }
}

/// Default configured overhead for a balanced build: interior bump-granularity
/// slack plus the final shard's standard-ribbon reserve.
pub fn default_balanced_epsilon(n: usize, w: u32) -> f64 {
    if n == 0 {
        return 0.05;
    }
    let s = choose_shard_count(n, w, None);
    if s == 1 {
        return standard_epsilon_hint(w, n);
    }
    let per = n as f64 / s as f64;
    let last_slack = per * standard_epsilon_hint(w, per as usize);
    interior_slack(w) + last_slack / n as f64
}

/// A balanced filter: the solved ribbon plus per-shard bump metadata.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BalancedFilter<W> {
    filter: RibbonFilter<W>,
    plan: ShardPlan,
    metadata: Vec<u8>,
}

impl<W: RibbonWord> BalancedFilter<W> {
    /// Membership query: one metadata bit picks primary or secondary shard,
    /// then the probe works exactly like a standard query within that
    /// shard's start range.
    pub fn contains(&self, h: KeyHash) -> bool {
        let seeded = hash::derive_seeded_hash(h, self.filter.seed());
        let a = assign_locations(seeded, &self.plan);
        let bumped = (self.metadata[a.primary] >> a.bucket) & 1 == 1;
        let shard = if bumped { a.secondary } else { a.primary };
        let z = self.filter.solution();
        let (lo, len) = self.plan.start_range(shard, z.m(), z.w());
        let start = lo + hash::start_in_range(seeded, len, self.filter.smash());
        let coeff = hash::coefficient_vector::<W>(seeded, z.w());
        let expected = hash::fingerprint(seeded, self.filter.fingerprint_bits());
        z.query_match(start, coeff, expected)
    }

    #[inline]
    pub fn inner(&self) -> &RibbonFilter<W> {
        &self.filter
    }

    #[inline]
    pub fn plan(&self) -> &ShardPlan {
        &self.plan
    }

    /// Per-shard bump masks, 8 bits each.
    #[inline]
    pub fn metadata(&self) -> &[u8] {
        &self.metadata
    }

    /// Number of bump bits set across all shards.
    pub fn bumped_bucket_count(&self) -> usize {
        self.metadata.iter().map(|m| m.count_ones() as usize).sum()
    }

    /// Solution plus metadata bits, per key.
    pub fn bits_per_key(&self) -> f64 {
        let n = self.filter.key_count().max(1) as f64;
        (self.filter.solution().total_bits() + 8 * self.metadata.len() as u64) as f64 / n
    }

    pub fn from_parts(
        filter: RibbonFilter<W>,
        plan: ShardPlan,
        metadata: Vec<u8>,
    ) -> Result<Self, RibbonError> {
        if metadata.len() != plan.num_shards() {
            return Err(RibbonError::InvalidConfig(format!(
                "metadata covers {} shards, plan has {}",
                metadata.len(),
                plan.num_shards()
            )));
        }
        Ok(BalancedFilter {
            filter,
            plan,
            metadata,
        })
    }
}

/// Free-function form of the query, mirroring the builder API.
pub fn query_balanced<W: RibbonWord>(filter: &BalancedFilter<W>, h: KeyHash) -> bool {
    filter.contains(h)
}

struct KeyRec {
    seeded: KeyHash,
    secondary: u32,
}

/// Build a balanced filter with the default shard plan for `keys.len()`.
pub fn build_balanced<W: RibbonWord>(
    keys: &[KeyHash],
    cfg: &RibbonConfig,
) -> Result<(BalancedFilter<W>, BuildReport), RibbonError> {
    build_balanced_with_plan(keys, cfg, ShardPlan::plan_shards(keys.len(), cfg.w, None))
}

/// Build a balanced filter with an explicit shard plan. A single-shard plan
/// degenerates to a one-attempt standard build.
pub fn build_balanced_with_plan<W: RibbonWord>(
    keys: &[KeyHash],
    cfg: &RibbonConfig,
    plan: ShardPlan,
) -> Result<(BalancedFilter<W>, BuildReport), RibbonError> {
    cfg.validate()?;
    let s = plan.num_shards();
    if plan.key_count() != keys.len() {
        return Err(RibbonError::InvalidConfig(format!(
            "plan sized for {} keys, got {}",
            plan.key_count(),
            keys.len()
        )));
    }
    if s > 1 {
        if cfg.smash != 0 {
            return Err(RibbonError::InvalidConfig(
                "smash is only meaningful for single-shard balanced builds".into(),
            ));
        }
        if cfg.m < s * 2 * cfg.w as usize {
            return Err(RibbonError::InvalidConfig(format!(
                "m = {} too small for {} shards of width {}",
                cfg.m, s, cfg.w
            )));
        }
    }

    let fp_bits = cfg.fingerprint_bits();
    let mut banding = BandingStorage::<W>::new(cfg.m, cfg.w, fp_bits)?;
    let mut redundant = 0u64;

    if s == 1 {
        for &key in keys {
            let seeded = hash::derive_seeded_hash(key, cfg.seed);
            let eq = crate::filter::equation_for::<W>(seeded, cfg, fp_bits, false);
            match banding.insert(&eq) {
                InsertOutcome::Inserted(_) => {}
                InsertOutcome::Redundant => redundant += 1,
                InsertOutcome::Inconsistent => {
                    return Err(RibbonError::ConstructionFailed { attempts: 1 })
                }
            }
        }
        return finish(keys.len(), cfg, plan, vec![0u8; 1], banding, redundant);
    }

    // Group keys by primary shard and bucket.
    let mut buckets: Vec<Vec<KeyRec>> = Vec::new();
    buckets.resize_with(s * BUCKETS_PER_SHARD, Vec::new);
    for &key in keys {
        let seeded = hash::derive_seeded_hash(key, cfg.seed);
        let a = assign_locations(seeded, &plan);
        buckets[a.primary * BUCKETS_PER_SHARD + a.bucket as usize].push(KeyRec {
            seeded,
            secondary: a.secondary as u32,
        });
    }

    let boundaries: Vec<usize> = (0..=s).map(|sh| plan.row_lo(sh, cfg.m, cfg.w)).collect();
    let shard_of_row = |row: usize| boundaries.partition_point(|&lo| lo <= row) - 1;
    let make_eq = |seeded: KeyHash, shard: usize| {
        let (lo, len) = plan.start_range(shard, cfg.m, cfg.w);
        crate::banding::Equation {
            start: lo + hash::start_in_range(seeded, len, 0),
            coeff: hash::coefficient_vector::<W>(seeded, cfg.w),
            rhs: hash::fingerprint(seeded, fp_bits),
        }
    };

    let mut arrivals: Vec<Vec<KeyHash>> = vec![Vec::new(); s];
    let mut occupied_in = vec![0i64; s];
    let mut mask = vec![0u8; s];

    for level in 1..=plan.levels() {
        let (level_lo, level_cnt) = plan.level_range(level);
        let is_last = level == plan.levels();

        // Bumped keys must land before the level's own buckets are tried.
        #[allow(clippy::needless_range_loop)]
        for shard in level_lo..level_lo + level_cnt {
            for seeded in std::mem::take(&mut arrivals[shard]) {
                match banding.insert(&make_eq(seeded, shard)) {
                    InsertOutcome::Inserted(row) => occupied_in[shard_of_row(row)] += 1,
                    InsertOutcome::Redundant => redundant += 1,
                    InsertOutcome::Inconsistent => {
                        return Err(RibbonError::BalancedOverflow { shard })
                    }
                }
            }
        }

        // Larger buckets across the whole level before smaller ones, so a
        // big bucket is not squeezed out by a small neighbor.
        for b in 0..BUCKETS_PER_SHARD {
            for shard in level_lo..level_lo + level_cnt {
                let recs = std::mem::take(&mut buckets[shard * BUCKETS_PER_SHARD + b]);
                if recs.is_empty() {
                    continue;
                }
                if !is_last {
                    let slots = (boundaries[shard + 1] - boundaries[shard]) as i64;
                    let remaining = slots - occupied_in[shard];
                    let expected =
                        plan.key_count() as f64 / s as f64 * plan.bucket_fraction(b);
                    if expected > remaining as f64 + 2.0 * (remaining.max(0) as f64).sqrt() {
                        mask[shard] |= 1 << b;
                        for rec in recs {
                            arrivals[rec.secondary as usize].push(rec.seeded);
                        }
                        continue;
                    }
                }
                let mut inserted = Vec::with_capacity(recs.len());
                let mut batch_redundant = 0u64;
                let mut ok = true;
                for rec in &recs {
                    match banding.insert(&make_eq(rec.seeded, shard)) {
                        InsertOutcome::Inserted(row) => inserted.push(row),
                        InsertOutcome::Redundant => batch_redundant += 1,
                        InsertOutcome::Inconsistent => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    for &row in &inserted {
                        occupied_in[shard_of_row(row)] += 1;
                    }
                    redundant += batch_redundant;
                } else {
                    banding.backtrack(&inserted)?;
                    if is_last {
                        return Err(RibbonError::BalancedOverflow { shard });
                    }
                    mask[shard] |= 1 << b;
                    for rec in recs {
                        arrivals[rec.secondary as usize].push(rec.seeded);
                    }
                }
            }
        }
    }

    finish(keys.len(), cfg, plan, mask, banding, redundant)
}

fn finish<W: RibbonWord>(
    n: usize,
    cfg: &RibbonConfig,
    plan: ShardPlan,
    mask: Vec<u8>,
    banding: BandingStorage<W>,
    redundant: u64,
) -> Result<(BalancedFilter<W>, BuildReport), RibbonError> {
    let solution = back_substitute(
        &banding,
        FreeVariablePolicy::Zeros,
        Layout::InterleavedColumnMajor,
        cfg.r_lower,
        cfg.upper_start_block,
    )?;
    let filter = RibbonFilter::from_parts(
        Variant::Balanced,
        cfg.seed,
        cfg.smash,
        cfg.fingerprint_bits(),
        n as u64,
        solution,
    );
    let balanced = BalancedFilter {
        filter,
        plan,
        metadata: mask,
    };
    let report = BuildReport {
        seed_used: cfg.seed,
        attempts: 1,
        epsilon_configured: if n == 0 {
            0.0
        } else {
            (cfg.m as f64 - n as f64) / n as f64
        },
        bits_per_key: if n == 0 { 0.0 } else { balanced.bits_per_key() },
        redundant_count: redundant,
    };
    Ok((balanced, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::config_for_count;
    use crate::hash::SplitMix64;

    #[test]
    fn single_shard_for_small_n() {
        let plan = ShardPlan::plan_shards(1024, 64, None);
        assert_eq!(plan.num_shards(), 1);
        assert_eq!(plan.levels(), 1);
    }

    #[test]
    fn eight_shards_have_expected_level_sizes() {
        let plan = ShardPlan::with_shard_count(8192, 8);
        assert_eq!(plan.levels(), 4);
        assert_eq!(plan.level_sizes(), vec![4, 2, 1, 1]);
        assert_eq!(plan.level_of(0), 1);
        assert_eq!(plan.level_of(3), 1);
        assert_eq!(plan.level_of(4), 2);
        assert_eq!(plan.level_of(6), 3);
        assert_eq!(plan.level_of(7), 4);
    }

    #[test]
    fn million_keys_get_natural_shards_and_alpha() {
        let plan = ShardPlan::plan_shards(1_000_000, 64, None);
        assert_eq!(plan.num_shards(), 1024);
        let per = 1_000_000 / plan.num_shards();
        assert!((512..2048).contains(&per), "keys per shard = {per}");
        assert!((plan.alpha() - 0.125).abs() < 1e-12, "alpha = {}", plan.alpha());
    }

    #[test]
    fn bucket_bounds_are_monotone_geometric() {
        let plan = ShardPlan::with_shard_count(100_000, 8);
        let mut prev = 0.0;
        for b in 0..BUCKETS_PER_SHARD {
            let f = plan.bucket_fraction(b);
            assert!(f > 0.0);
            if b > 0 {
                let ratio = f / prev;
                assert!(
                    (ratio - 0.5f64.sqrt()).abs() < 1e-9,
                    "bucket {b} ratio {ratio}"
                );
            }
            prev = f;
        }
    }

    #[test]
    fn assignment_degenerate_and_ranges() {
        let plan = ShardPlan::with_shard_count(1000, 1);
        let mut rng = SplitMix64::new(5);
        for _ in 0..100 {
            let a = assign_locations(rng.next_hash(), &plan);
            assert_eq!((a.primary, a.secondary), (0, 0));
            assert!((a.bucket as usize) < BUCKETS_PER_SHARD);
        }
    }

    #[test]
    fn assignment_secondary_is_next_level() {
        let plan = ShardPlan::with_shard_count(8000, 8);
        let mut rng = SplitMix64::new(17);
        for _ in 0..5000 {
            let a = assign_locations(rng.next_hash(), &plan);
            let lvl = plan.level_of(a.primary);
            let expect = (lvl + 1).min(plan.levels());
            assert_eq!(plan.level_of(a.secondary), expect);
        }
    }

    #[test]
    fn shard_ranges_partition_starts() {
        let plan = ShardPlan::with_shard_count(8000, 8);
        let (m, w) = (8192usize, 64u32);
        let mut next = 0usize;
        for shard in 0..plan.num_shards() {
            let (lo, len) = plan.start_range(shard, m, w);
            assert_eq!(lo, next);
            assert!(len >= 1);
            next = lo + len;
        }
        assert_eq!(next, m - w as usize + 1);
        // Last shard got its reserve.
        let (lo_last, _) = plan.start_range(plan.num_shards() - 1, m, w);
        assert!(m - lo_last >= m / plan.num_shards());
    }

    #[test]
    fn balanced_build_round_trips_members() {
        let mut rng = SplitMix64::new(23);
        let keys: Vec<_> = (0..40_000).map(|_| rng.next_hash()).collect();
        let cfg =
            config_for_count(keys.len(), 7.0, 64, Some(0.03), None, Variant::Balanced, 4).unwrap();
        let (filter, report) = build_balanced::<u64>(&keys, &cfg).unwrap();
        assert!(filter.plan().num_shards() > 1);
        assert_eq!(filter.metadata().len(), filter.plan().num_shards());
        assert!(report.attempts == 1);
        for &k in &keys {
            assert!(filter.contains(k), "false negative (bumped or not)");
        }
    }

    #[test]
    fn degenerate_balanced_matches_standard_bits() {
        let mut rng = SplitMix64::new(31);
        let keys: Vec<_> = (0..900).map(|_| rng.next_hash()).collect();
        let cfg =
            config_for_count(keys.len(), 7.0, 64, Some(0.10), Some(32), Variant::Balanced, 6)
                .unwrap();
        let (balanced, _) = build_balanced::<u64>(&keys, &cfg).unwrap();
        assert_eq!(balanced.plan().num_shards(), 1);

        let std_cfg = RibbonConfig {
            variant: Variant::Standard,
            ..cfg
        };
        let (standard, _) = crate::filter::build_standard::<u64>(&keys, &std_cfg, 1).unwrap();
        assert_eq!(balanced.inner().solution().words(), standard.solution().words());
        let mut probe = SplitMix64::new(77);
        for _ in 0..20_000 {
            let h = probe.next_hash();
            assert_eq!(balanced.contains(h), standard.contains(h));
        }
    }

    #[test]
    fn metadata_records_bumped_buckets() {
        // Overfill deliberately so some buckets must bump.
        let mut rng = SplitMix64::new(41);
        let keys: Vec<_> = (0..60_000).map(|_| rng.next_hash()).collect();
        let cfg =
            config_for_count(keys.len(), 5.0, 64, Some(0.025), None, Variant::Balanced, 2)
                .unwrap();
        let (filter, _) = build_balanced::<u64>(&keys, &cfg).unwrap();
        assert!(filter.bumped_bucket_count() > 0);
        for &k in &keys {
            assert!(filter.contains(k));
        }
    }
}
