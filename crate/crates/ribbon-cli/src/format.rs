//! On-disk filter format (see FORMAT.md for the byte-level layout).
//!
//! A fixed 54-byte header pins everything a query needs, followed by the
//! solution words little-endian and, for balanced filters, the shard
//! metadata. Serialization is byte-exact: identical build inputs produce
//! identical files.

use anyhow::{bail, Context, Result};
use ribbon::{
    BalancedFilter, KeyHash, Layout, RibbonFilter, RibbonWord, ShardPlan, SolutionStorage,
    Variant,
};

pub const MAGIC: &[u8; 4] = b"RIBN";
pub const FORMAT_VERSION: u32 = 1;
/// FNV-1a 64 followed by a splitmix-style finalizer.
pub const KEY_HASH_FNV1A_MIX: u8 = 1;
pub const HEADER_LEN: usize = 54;

/// Hash raw key bytes to the 64-bit hash the library consumes
/// (key-hash-function id 1).
pub fn hash_key_bytes(key: &[u8]) -> KeyHash {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in key {
        h = (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3);
    }
    KeyHash(ribbon::hash::mix64(h))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub variant: Variant,
    pub w: u32,
    pub r_lower: u32,
    pub upper_start_block: u64,
    pub m: u64,
    pub n: u64,
    pub seed: u64,
    pub smash: u32,
    pub key_hash_id: u8,
}

impl Header {
    fn encode(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(self.variant.code());
        out.extend_from_slice(&self.w.to_le_bytes());
        out.extend_from_slice(&self.r_lower.to_le_bytes());
        out.extend_from_slice(&self.upper_start_block.to_le_bytes());
        out.extend_from_slice(&self.m.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.smash.to_le_bytes());
        out.push(self.key_hash_id);
    }

    fn decode(bytes: &[u8]) -> Result<Header> {
        if bytes.len() < HEADER_LEN {
            bail!(
                "file truncated at offset {}: header needs {HEADER_LEN} bytes",
                bytes.len()
            );
        }
        if &bytes[0..4] != MAGIC {
            bail!("bad magic at offset 0: expected \"RIBN\"");
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != FORMAT_VERSION {
            bail!("unsupported format version {version} at offset 4");
        }
        let variant = Variant::from_code(bytes[8])
            .with_context(|| format!("unknown variant code {} at offset 8", bytes[8]))?;
        let w = u32::from_le_bytes(bytes[9..13].try_into().unwrap());
        let r_lower = u32::from_le_bytes(bytes[13..17].try_into().unwrap());
        let upper_start_block = u64::from_le_bytes(bytes[17..25].try_into().unwrap());
        let m = u64::from_le_bytes(bytes[25..33].try_into().unwrap());
        let n = u64::from_le_bytes(bytes[33..41].try_into().unwrap());
        let seed = u64::from_le_bytes(bytes[41..49].try_into().unwrap());
        let smash = u32::from_le_bytes(bytes[49..53].try_into().unwrap());
        let key_hash_id = bytes[53];
        if key_hash_id != KEY_HASH_FNV1A_MIX {
            bail!("unknown key-hash-function id {key_hash_id} at offset 53");
        }
        Ok(Header {
            variant,
            w,
            r_lower,
            upper_start_block,
            m,
            n,
            seed,
            smash,
            key_hash_id,
        })
    }
}

/// A loaded filter of any width and variant.
#[derive(Debug)]
pub enum AnyFilter {
    W16(Kind<u16>),
    W32(Kind<u32>),
    W64(Kind<u64>),
    W128(Kind<u128>),
}

#[derive(Debug)]
pub enum Kind<W> {
    Plain(RibbonFilter<W>),
    Balanced(BalancedFilter<W>),
}

impl<W: RibbonWord> Kind<W> {
    fn contains(&self, h: KeyHash) -> bool {
        match self {
            Kind::Plain(f) => f.contains(h),
            Kind::Balanced(f) => f.contains(h),
        }
    }

    fn plain(&self) -> &RibbonFilter<W> {
        match self {
            Kind::Plain(f) => f,
            Kind::Balanced(f) => f.inner(),
        }
    }

    fn total_bits(&self) -> u64 {
        match self {
            Kind::Plain(f) => f.solution().total_bits(),
            Kind::Balanced(f) => {
                f.inner().solution().total_bits() + 8 * f.metadata().len() as u64
            }
        }
    }
}

macro_rules! each_width {
    ($self:expr, $k:ident => $body:expr) => {
        match $self {
            AnyFilter::W16($k) => $body,
            AnyFilter::W32($k) => $body,
            AnyFilter::W64($k) => $body,
            AnyFilter::W128($k) => $body,
        }
    };
}

impl AnyFilter {
    pub fn contains(&self, h: KeyHash) -> bool {
        each_width!(self, k => k.contains(h))
    }

    pub fn key_count(&self) -> u64 {
        each_width!(self, k => k.plain().key_count())
    }

    /// Storage bits including balanced metadata.
    pub fn total_bits(&self) -> u64 {
        each_width!(self, k => k.total_bits())
    }

    pub fn encode(&self) -> Vec<u8> {
        each_width!(self, k => encode_kind(k))
    }
}

fn encode_kind<W: RibbonWord>(kind: &Kind<W>) -> Vec<u8> {
    let plain = kind.plain();
    let z = plain.solution();
    let header = Header {
        variant: plain.variant(),
        w: z.w(),
        r_lower: z.r_lower(),
        upper_start_block: z.upper_start_block() as u64,
        m: z.m() as u64,
        n: plain.key_count(),
        seed: plain.seed(),
        smash: plain.smash(),
        key_hash_id: KEY_HASH_FNV1A_MIX,
    };
    let mut out = Vec::with_capacity(HEADER_LEN + z.words().len() * (W::BITS as usize / 8));
    header.encode(&mut out);
    for &word in z.words() {
        out.extend_from_slice(&word.to_le_bytes_vec());
    }
    if let Kind::Balanced(f) = kind {
        out.extend_from_slice(&(f.metadata().len() as u64).to_le_bytes());
        out.extend_from_slice(f.metadata());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<AnyFilter> {
    let header = Header::decode(bytes)?;
    match header.w {
        16 => decode_width::<u16>(&header, bytes).map(AnyFilter::W16),
        32 => decode_width::<u32>(&header, bytes).map(AnyFilter::W32),
        64 => decode_width::<u64>(&header, bytes).map(AnyFilter::W64),
        128 => decode_width::<u128>(&header, bytes).map(AnyFilter::W128),
        w => bail!("unsupported ribbon width {w} at offset 9"),
    }
}

fn decode_width<W: RibbonWord>(header: &Header, bytes: &[u8]) -> Result<Kind<W>> {
    let m = header.m as usize;
    let w = header.w;
    if m == 0 || !m.is_multiple_of(w as usize) {
        bail!("invalid row count {m} at offset 25");
    }
    let nb = m / w as usize;
    let usb = header.upper_start_block as usize;
    if usb > nb {
        bail!("upper_start_block {usb} exceeds {nb} blocks (offset 17)");
    }
    let word_bytes = W::BITS as usize / 8;
    let word_count = nb * header.r_lower as usize + (nb - usb);
    let words_end = HEADER_LEN + word_count * word_bytes;
    if bytes.len() < words_end {
        bail!(
            "file truncated at offset {}: solution needs {} bytes",
            bytes.len(),
            words_end
        );
    }
    let words: Vec<W> = bytes[HEADER_LEN..words_end]
        .chunks_exact(word_bytes)
        .map(W::from_le_slice)
        .collect();
    let solution = SolutionStorage::from_parts(
        Layout::InterleavedColumnMajor,
        m,
        w,
        header.r_lower,
        usb,
        words,
    )
    .map_err(|e| anyhow::anyhow!("{e} (header at offset 0)"))?;
    let fp_bits = header.r_lower + u32::from(usb < nb);
    let filter = RibbonFilter::from_parts(
        header.variant,
        header.seed,
        header.smash,
        fp_bits,
        header.n,
        solution,
    );
    match header.variant {
        Variant::Balanced => {
            if bytes.len() < words_end + 8 {
                bail!("file truncated at offset {}: missing shard count", bytes.len());
            }
            let s = u64::from_le_bytes(bytes[words_end..words_end + 8].try_into().unwrap());
            if !s.is_power_of_two() || s > (1 << 32) {
                bail!("invalid shard count {s} at offset {words_end}");
            }
            if s > 1 && (m as u64) < s * 2 * u64::from(w) {
                bail!("row count {m} too small for {s} shards (offset {words_end})");
            }
            let meta_start = words_end + 8;
            let meta_end = meta_start + s as usize;
            if bytes.len() < meta_end {
                bail!(
                    "file truncated at offset {}: metadata needs {} bytes",
                    bytes.len(),
                    meta_end
                );
            }
            if bytes.len() > meta_end {
                bail!("trailing garbage at offset {meta_end}");
            }
            let plan = ShardPlan::with_shard_count(header.n as usize, s as usize);
            let metadata = bytes[meta_start..meta_end].to_vec();
            let balanced = BalancedFilter::from_parts(filter, plan, metadata)
                .map_err(|e| anyhow::anyhow!("{e} (metadata at offset {meta_start})"))?;
            Ok(Kind::Balanced(balanced))
        }
        _ => {
            if bytes.len() > words_end {
                bail!("trailing garbage at offset {words_end}");
            }
            Ok(Kind::Plain(filter))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ribbon::{build_balanced, build_homogeneous, config_for_count, SplitMix64};

    fn sample_keys(n: usize) -> Vec<KeyHash> {
        let mut rng = SplitMix64::new(0x1111);
        (0..n).map(|_| rng.next_hash()).collect()
    }

    #[test]
    fn encode_decode_encode_is_identity() {
        let keys = sample_keys(5000);
        let cfg =
            config_for_count(keys.len(), 7.5, 64, None, None, Variant::Homogeneous, 9).unwrap();
        let (filter, _) = build_homogeneous::<u64>(&keys, &cfg).unwrap();
        let any = AnyFilter::W64(Kind::Plain(filter));
        let bytes = any.encode();
        let reloaded = decode(&bytes).unwrap();
        assert_eq!(bytes, reloaded.encode());
        for &k in &keys {
            assert!(reloaded.contains(k));
        }
    }

    #[test]
    fn balanced_round_trip_preserves_queries() {
        let keys = sample_keys(60_000);
        let cfg =
            config_for_count(keys.len(), 7.0, 64, None, None, Variant::Balanced, 2).unwrap();
        let (filter, _) = build_balanced::<u64>(&keys, &cfg).unwrap();
        let any = AnyFilter::W64(Kind::Balanced(filter));
        let bytes = any.encode();
        let reloaded = decode(&bytes).unwrap();
        assert_eq!(bytes, reloaded.encode());
        for &k in &keys {
            assert!(reloaded.contains(k));
        }
        let mut rng = SplitMix64::new(7);
        for _ in 0..5000 {
            let h = rng.next_hash();
            assert_eq!(any.contains(h), reloaded.contains(h));
        }
    }

    #[test]
    fn truncation_and_corruption_are_reported_with_offsets() {
        let keys = sample_keys(200);
        let cfg =
            config_for_count(keys.len(), 5.0, 32, None, None, Variant::Standard, 0).unwrap();
        let (filter, _) = ribbon::build_standard::<u32>(&keys, &cfg, 8).unwrap();
        let bytes = AnyFilter::W32(Kind::Plain(filter)).encode();

        let err = decode(&bytes[..40]).unwrap_err().to_string();
        assert!(err.contains("offset"), "{err}");

        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        let err = decode(&bad_magic).unwrap_err().to_string();
        assert!(err.contains("magic"), "{err}");

        let mut trailing = bytes.clone();
        trailing.push(0);
        assert!(decode(&trailing).is_err());
    }

    #[test]
    fn key_hashing_is_stable() {
        // Pinned values guard the on-disk key-hash function id 1.
        assert_eq!(hash_key_bytes(b"").0, ribbon::hash::mix64(0xcbf2_9ce4_8422_2325));
        assert_eq!(hash_key_bytes(b"abc"), hash_key_bytes(b"abc"));
        assert_ne!(hash_key_bytes(b"abc"), hash_key_bytes(b"abd"));
    }
}
