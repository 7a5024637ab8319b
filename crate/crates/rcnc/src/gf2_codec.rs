//! Generation-based rateless encoder and incremental Gaussian-elimination
//! decoder over GF(2).
//!
//! A block of source data is split into `k` equal segments. The encoder emits
//! an unbounded stream of coded packets, each carrying a uniformly random
//! nonzero coefficient vector and the XOR of the selected segments. A decoder
//! reduces incoming packets against its stored pivot rows and recovers the
//! block bit-exactly once `k` linearly independent packets have arrived.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("source data must not be empty")]
    EmptyData,
    #[error("segment count must be at least 1")]
    ZeroSegments,
    #[error("segment size must be at least 1")]
    ZeroSegmentSize,
    #[error("sizing inputs must all be positive")]
    NonPositiveSizing,
    #[error("packet belongs to generation {got}, decoder expects {expected}")]
    GenerationMismatch { expected: u32, got: u32 },
    #[error("coefficient vector has {got} bits, decoder expects {expected}")]
    CoefficientLengthMismatch { expected: usize, got: usize },
    #[error("payload has {got} bytes, decoder expects {expected}")]
    PayloadLengthMismatch { expected: usize, got: usize },
    #[error("decoder holds rank {rank} of {needed}; generation not yet decodable")]
    NotReady { rank: usize, needed: usize },
    #[error("original length {len} exceeds generation capacity {capacity}")]
    LengthOutOfRange { len: usize, capacity: usize },
}

/// Shape of one generation: `k` segments of `segment_size` bytes each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationConfig {
    k: usize,
    segment_size: usize,
}

impl GenerationConfig {
    pub fn new(k: usize, segment_size: usize) -> Result<Self, CodecError> {
        if k == 0 {
            return Err(CodecError::ZeroSegments);
        }
        if segment_size == 0 {
            return Err(CodecError::ZeroSegmentSize);
        }
        Ok(Self { k, segment_size })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn segment_size(&self) -> usize {
        self.segment_size
    }

    /// Total bytes the generation can carry (`k * segment_size`).
    pub fn capacity(&self) -> usize {
        self.k * self.segment_size
    }
}

/// One block of source data split into `k` equal segments, the unit of
/// encoding and acknowledgement.
#[derive(Debug, Clone)]
pub struct Generation {
    id: u32,
    config: GenerationConfig,
    segments: Vec<Vec<u8>>,
    original_length: usize,
}

impl Generation {
    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn config(&self) -> GenerationConfig {
        self.config
    }

    pub fn segment(&self, index: usize) -> &[u8] {
        &self.segments[index]
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }
}

/// Splits `data` into `k` segments of `ceil(len / k)` bytes, zero-padding the
/// tail. The original length is kept so padding can be stripped on recovery.
pub fn make_generation(data: &[u8], k: usize, generation_id: u32) -> Result<Generation, CodecError> {
    if data.is_empty() {
        return Err(CodecError::EmptyData);
    }
    if k == 0 {
        return Err(CodecError::ZeroSegments);
    }
    let segment_size = data.len().div_ceil(k);
    let config = GenerationConfig::new(k, segment_size)?;
    let mut segments = Vec::with_capacity(k);
    for i in 0..k {
        let start = (i * segment_size).min(data.len());
        let end = ((i + 1) * segment_size).min(data.len());
        let mut segment = data[start..end].to_vec();
        segment.resize(segment_size, 0);
        segments.push(segment);
    }
    Ok(Generation {
        id: generation_id,
        config,
        segments,
        original_length: data.len(),
    })
}

/// Number of source packets one generation must cover so that encoding delay
/// stays inside the latency budget: `ceil(bitrate * latency / (8 * packet))`.
pub fn compute_generation_size(
    bitrate_bps: f64,
    packet_size_bytes: usize,
    max_latency_secs: f64,
) -> Result<usize, CodecError> {
    if bitrate_bps <= 0.0 || packet_size_bytes == 0 || max_latency_secs <= 0.0 {
        return Err(CodecError::NonPositiveSizing);
    }
    let packets = bitrate_bps * max_latency_secs / (8.0 * packet_size_bytes as f64);
    Ok(packets.ceil().max(1.0) as usize)
}

/// A GF(2) row vector of `k` coefficient bits, stored LSB-first in 64-bit
/// words. Bit `j` selects segment `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    len: usize,
    words: Vec<u64>,
}

impl CoefficientVector {
    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "coefficient vector needs at least one bit");
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Draws a vector uniformly from GF(2)^len minus the all-zero vector,
    /// redrawing whole vectors until one is nonzero.
    pub fn random_nonzero<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        loop {
            for word in &mut v.words {
                *word = rng.next_u64();
            }
            v.mask_tail();
            if !v.is_zero() {
                return v;
            }
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (j, &bit) in bits.iter().enumerate() {
            v.set(j, bit);
        }
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            *self.words.last_mut().unwrap() &= (1u64 << rem) - 1;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.len);
        self.words[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, j: usize, value: bool) {
        debug_assert!(j < self.len);
        let mask = 1u64 << (j % 64);
        if value {
            self.words[j / 64] |= mask;
        } else {
            self.words[j / 64] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Index of the lowest set bit: the pivot column once reduced.
    pub fn first_set_bit(&self) -> Option<usize> {
        for (i, &word) in self.words.iter().enumerate() {
            if word != 0 {
                return Some(i * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_set_bits(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&j| self.get(j))
    }
}

/// One coded packet: which segments went in, and their XOR.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedPacket {
    pub generation_id: u32,
    pub coefficients: CoefficientVector,
    pub payload: Vec<u8>,
}

impl CodedPacket {
    /// Encodes the packet a given coefficient vector selects.
    pub fn from_coefficients(generation: &Generation, coefficients: CoefficientVector) -> Self {
        assert_eq!(coefficients.len(), generation.config.k());
        let mut payload = vec![0u8; generation.config.segment_size()];
        for j in coefficients.iter_set_bits() {
            xor_bytes(&mut payload, generation.segment(j));
        }
        Self {
            generation_id: generation.id(),
            coefficients,
            payload,
        }
    }
}

/// Emits one fresh coded packet. May be called unboundedly many times; the
/// coefficient vector is uniform over the nonzero vectors of GF(2)^k.
pub fn next_coded_packet<R: Rng>(generation: &Generation, rng: &mut R) -> CodedPacket {
    let coefficients = CoefficientVector::random_nonzero(generation.config.k(), rng);
    CodedPacket::from_coefficients(generation, coefficients)
}

/// Result of feeding one packet to a decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiveOutcome {
    /// The packet raised the decoder rank by one.
    Innovative,
    /// The packet reduced to zero against stored rows; state unchanged.
    Redundant,
    /// The packet raised the rank to `k`; the generation is decodable.
    Complete,
}

impl ReceiveOutcome {
    pub fn increased_rank(&self) -> bool {
        matches!(self, Self::Innovative | Self::Complete)
    }
}

#[derive(Debug, Clone)]
struct DecoderRow {
    pivot: usize,
    coefficients: CoefficientVector,
    payload: Vec<u8>,
}

/// Incremental Gaussian-elimination state for one generation.
///
/// Rows are kept in echelon form, sorted by pivot column; each incoming
/// packet is reduced in O(rank) row XORs and either becomes a new pivot row
/// or is discarded as redundant.
#[derive(Debug, Clone)]
pub struct DecoderState {
    generation_id: u32,
    config: GenerationConfig,
    rows: Vec<DecoderRow>,
}

impl DecoderState {
    pub fn new(generation_id: u32, config: GenerationConfig) -> Self {
        Self {
            generation_id,
            config,
            rows: Vec::new(),
        }
    }

    pub fn for_generation(generation: &Generation) -> Self {
        Self::new(generation.id(), generation.config())
    }

    pub fn config(&self) -> GenerationConfig {
        self.config
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_complete(&self) -> bool {
        self.rank() == self.config.k()
    }

    /// Pivot columns of the stored rows, ascending.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.pivot).collect()
    }

    /// Stored rows as (coefficients, payload) pairs, ascending by pivot.
    pub fn rows(&self) -> impl Iterator<Item = (&CoefficientVector, &[u8])> + '_ {
        self.rows.iter().map(|r| (&r.coefficients, r.payload.as_slice()))
    }

    /// Reduces the packet against stored rows, XORing payloads in lockstep.
    /// A surviving nonzero vector becomes a new pivot row.
    pub fn receive(&mut self, packet: &CodedPacket) -> Result<ReceiveOutcome, CodecError> {
        if packet.generation_id != self.generation_id {
            return Err(CodecError::GenerationMismatch {
                expected: self.generation_id,
                got: packet.generation_id,
            });
        }
        if packet.coefficients.len() != self.config.k() {
            return Err(CodecError::CoefficientLengthMismatch {
                expected: self.config.k(),
                got: packet.coefficients.len(),
            });
        }
        if packet.payload.len() != self.config.segment_size() {
            return Err(CodecError::PayloadLengthMismatch {
                expected: self.config.segment_size(),
                got: packet.payload.len(),
            });
        }

        let mut coefficients = packet.coefficients.clone();
        let mut payload = packet.payload.clone();
        // Rows are sorted by pivot and have no bits below their pivot, so one
        // ascending pass fully clears every stored pivot column.
        for row in &self.rows {
            if coefficients.get(row.pivot) {
                coefficients.xor_assign(&row.coefficients);
                xor_bytes(&mut payload, &row.payload);
            }
        }

        let pivot = match coefficients.first_set_bit() {
            None => return Ok(ReceiveOutcome::Redundant),
            Some(p) => p,
        };
        let insert_at = self.rows.partition_point(|r| r.pivot < pivot);
        self.rows.insert(
            insert_at,
            DecoderRow {
                pivot,
                coefficients,
                payload,
            },
        );
        if self.is_complete() {
            Ok(ReceiveOutcome::Complete)
        } else {
            Ok(ReceiveOutcome::Innovative)
        }
    }

    /// Back-substitutes the echelon rows and returns the source block,
    /// truncated to `original_length`.
    pub fn recover(&self, original_length: usize) -> Result<Vec<u8>, CodecError> {
        let k = self.config.k();
        if self.rank() < k {
            return Err(CodecError::NotReady {
                rank: self.rank(),
                needed: k,
            });
        }
        if original_length > self.config.capacity() {
            return Err(CodecError::LengthOutOfRange {
                len: original_length,
                capacity: self.config.capacity(),
            });
        }
        // Full rank means pivots are exactly 0..k, so row i solves segment i
        // once the segments above it are known.
        let mut solved: Vec<Vec<u8>> = vec![Vec::new(); k];
        for i in (0..k).rev() {
            let row = &self.rows[i];
            debug_assert_eq!(row.pivot, i);
            let mut segment = row.payload.clone();
            for j in row.coefficients.iter_set_bits() {
                if j > i {
                    xor_bytes(&mut segment, &solved[j]);
                }
            }
            solved[i] = segment;
        }
        let mut data = Vec::with_capacity(self.config.capacity());
        for segment in &solved {
            data.extend_from_slice(segment);
        }
        data.truncate(original_length);
        Ok(data)
    }
}

/// XORs `src` into `dst` in word-sized chunks.
pub(crate) fn xor_bytes(dst: &mut [u8], src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    let head = dst.len() - dst.len() % 8;
    for (d, s) in dst[..head]
        .chunks_exact_mut(8)
        .zip(src[..head].chunks_exact(8))
    {
        let word = u64::from_ne_bytes(d.try_into().unwrap()) ^ u64::from_ne_bytes(s.try_into().unwrap());
        d.copy_from_slice(&word.to_ne_bytes());
    }
    for (d, s) in dst[head..].iter_mut().zip(&src[head..]) {
        *d ^= s;
    }
}
