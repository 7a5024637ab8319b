//! Serialized coded-packet layout and fixture-stream IO.
//!
//! Record layout, integers big-endian:
//!
//! ```text
//! generation_id : u32
//! k             : u16
//! segment_size  : u16
//! coefficients  : ceil(k / 8) bytes, bit j at bit (7 - j % 8) of byte j / 8
//! payload       : segment_size bytes
//! ```
//!
//! A fixture file is a plain concatenation of such records.

use crate::gf2_codec::{CodedPacket, CoefficientVector};
use std::io::{self, Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("segment count {0} does not fit the 16-bit wire field")]
    SegmentCountTooLarge(usize),
    #[error("segment size {0} does not fit the 16-bit wire field")]
    SegmentSizeTooLarge(usize),
    #[error("record truncated while reading {0}")]
    Truncated(&'static str),
    #[error("record declares k = 0")]
    ZeroSegments,
    #[error("record declares segment_size = 0")]
    ZeroSegmentSize,
}

fn coefficients_to_bytes(coefficients: &CoefficientVector) -> Vec<u8> {
    let mut bytes = vec![0u8; coefficients.len().div_ceil(8)];
    for j in coefficients.iter_set_bits() {
        bytes[j / 8] |= 1 << (7 - (j % 8));
    }
    bytes
}

fn coefficients_from_bytes(bytes: &[u8], k: usize) -> CoefficientVector {
    let mut coefficients = CoefficientVector::zeros(k);
    for j in 0..k {
        if bytes[j / 8] >> (7 - (j % 8)) & 1 == 1 {
            coefficients.set(j, true);
        }
    }
    coefficients
}

/// Serializes one packet into the record layout.
pub fn packet_to_bytes(packet: &CodedPacket) -> Result<Vec<u8>, WireError> {
    let k = packet.coefficients.len();
    if k > u16::MAX as usize {
        return Err(WireError::SegmentCountTooLarge(k));
    }
    let segment_size = packet.payload.len();
    if segment_size > u16::MAX as usize {
        return Err(WireError::SegmentSizeTooLarge(segment_size));
    }
    let mut bytes = Vec::with_capacity(8 + k.div_ceil(8) + segment_size);
    bytes.extend_from_slice(&packet.generation_id.to_be_bytes());
    bytes.extend_from_slice(&(k as u16).to_be_bytes());
    bytes.extend_from_slice(&(segment_size as u16).to_be_bytes());
    bytes.extend_from_slice(&coefficients_to_bytes(&packet.coefficients));
    bytes.extend_from_slice(&packet.payload);
    Ok(bytes)
}

/// Appends one record to a stream.
pub fn write_packet<W: Write>(writer: &mut W, packet: &CodedPacket) -> Result<(), WireError> {
    writer.write_all(&packet_to_bytes(packet)?)?;
    Ok(())
}

/// Reads the next record. Returns `Ok(None)` on a clean end of stream and an
/// error if the stream ends inside a record.
pub fn read_packet<R: Read>(reader: &mut R) -> Result<Option<CodedPacket>, WireError> {
    let mut header = [0u8; 8];
    let mut filled = 0;
    while filled < header.len() {
        let n = reader.read(&mut header[filled..])?;
        if n == 0 {
            if filled == 0 {
                return Ok(None);
            }
            return Err(WireError::Truncated("header"));
        }
        filled += n;
    }
    let generation_id = u32::from_be_bytes(header[0..4].try_into().unwrap());
    let k = u16::from_be_bytes(header[4..6].try_into().unwrap()) as usize;
    let segment_size = u16::from_be_bytes(header[6..8].try_into().unwrap()) as usize;
    if k == 0 {
        return Err(WireError::ZeroSegments);
    }
    if segment_size == 0 {
        return Err(WireError::ZeroSegmentSize);
    }
    let mut coefficient_bytes = vec![0u8; k.div_ceil(8)];
    reader
        .read_exact(&mut coefficient_bytes)
        .map_err(|_| WireError::Truncated("coefficients"))?;
    let mut payload = vec![0u8; segment_size];
    reader
        .read_exact(&mut payload)
        .map_err(|_| WireError::Truncated("payload"))?;
    Ok(Some(CodedPacket {
        generation_id,
        coefficients: coefficients_from_bytes(&coefficient_bytes, k),
        payload,
    }))
}

/// Reads a whole fixture stream.
pub fn read_all_packets<R: Read>(reader: &mut R) -> Result<Vec<CodedPacket>, WireError> {
    let mut packets = Vec::new();
    while let Some(packet) = read_packet(reader)? {
        packets.push(packet);
    }
    Ok(packets)
}
