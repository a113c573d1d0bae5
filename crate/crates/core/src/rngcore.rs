//! Deterministic, splittable random streams.
//!
//! Streams are counter based: output block `i` of a stream is the
//! Philox4x32-10 permutation of counter `i` under the stream's 64-bit key.
//! Deriving a child stream only mixes a label into the key, so replica `r`
//! can be created in O(1) on any worker without touching the parent.

use alloc::vec::Vec;

/// Source of uniforms on the open interval `(0, 1)`.
///
/// Every sampler in this crate draws through this trait, so hand-computed
/// examples can run on a [`ScriptedUniforms`] sequence instead of a stream.
pub trait UniformSource {
    /// A uniform draw strictly inside `(0, 1)`.
    fn uniform(&mut self) -> f64;

    /// `-mean · ln U`.
    fn exponential(&mut self, mean: f64) -> f64 {
        -mean * libm::log(self.uniform())
    }
}

impl<R: UniformSource + ?Sized> UniformSource for &mut R {
    fn uniform(&mut self) -> f64 {
        (**self).uniform()
    }
}

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// The Philox4x32 bijection with 10 rounds.
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a hash used to turn textual labels into derivation labels.
pub fn label_hash(label: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in label.as_bytes() {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// A counter-based random stream.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    key: u64,
    block: u64,
    buf: [u32; 4],
    // 0 or 2: index of the next unused pair in `buf`; 4 means refill.
    pos: usize,
}

impl RngStream {
    /// Root stream for a seed.
    pub fn new(seed: u64) -> Self {
        Self::with_key(seed, mix64(seed ^ 0x6A09_E667_F3BC_C908))
    }

    fn with_key(seed: u64, key: u64) -> Self {
        RngStream {
            seed,
            key,
            block: 0,
            buf: [0; 4],
            pos: 4,
        }
    }

    /// Child stream for `label`; the parent is not advanced.
    pub fn derive(&self, label: u64) -> Self {
        let k = mix64(self.key.rotate_left(23) ^ mix64(label.wrapping_add(0x9E37_79B9_7F4A_7C15)));
        Self::with_key(self.seed, k)
    }

    pub fn derive_str(&self, label: &str) -> Self {
        self.derive(label_hash(label))
    }

    /// Follows a whole derivation path from this stream.
    pub fn derive_path(&self, path: &[u64]) -> Self {
        path.iter().fold(self.clone(), |s, &l| s.derive(l))
    }

    /// The stream for `(seed, label, replica)` used by experiment runners.
    pub fn for_replica(seed: u64, label: &str, replica: u64) -> Self {
        RngStream::new(seed).derive_str(label).derive(replica)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    fn next_pair(&mut self) -> (u32, u32) {
        if self.pos >= 4 {
            let ctr = [self.block as u32, (self.block >> 32) as u32, 0, 0];
            self.buf = philox4x32_10(ctr, [self.key as u32, (self.key >> 32) as u32]);
            self.block = self.block.wrapping_add(1);
            self.pos = 0;
        }
        let pair = (self.buf[self.pos], self.buf[self.pos + 1]);
        self.pos += 2;
        pair
    }

    pub fn next_u64(&mut self) -> u64 {
        let (hi, lo) = self.next_pair();
        (u64::from(hi) << 32) | u64::from(lo)
    }
}

impl UniformSource for RngStream {
    #[inline]
    fn uniform(&mut self) -> f64 {
        // (k + 1/2) / 2⁵² with k < 2⁵² is exact and lies in [2⁻⁵³, 1 - 2⁻⁵³].
        const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
        let k = self.next_u64() >> 12;
        (k as f64 + 0.5) * SCALE
    }
}

/// A fixed uniform sequence, replayed cyclically. Test double for streams.
#[derive(Clone, Debug)]
pub struct ScriptedUniforms {
    values: Vec<f64>,
    pos: usize,
}

impl ScriptedUniforms {
    /// Panics if `values` is empty or contains something outside `(0, 1]`.
    pub fn new(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "scripted sequence must be nonempty");
        assert!(
            values.iter().all(|&u| u > 0.0 && u <= 1.0),
            "scripted uniforms must lie in (0, 1]"
        );
        ScriptedUniforms { values, pos: 0 }
    }

    pub fn draws(&self) -> usize {
        self.pos
    }
}

impl UniformSource for ScriptedUniforms {
    fn uniform(&mut self) -> f64 {
        let u = self.values[self.pos % self.values.len()];
        self.pos += 1;
        u
    }
}
