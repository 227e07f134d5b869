//! Bridged codeword streams.
//!
//! Consecutive codewords are separated by `x` bridging bits: `1^x` when the
//! previous codeword ends in `1` and the next one starts with `1`, `0^x`
//! otherwise. No bridge precedes the first codeword or follows the last, so
//! a stream of `n` codewords is `n*m + (n-1)*x` bits long.

use rayon::prelude::*;

use crate::codec::{Code, Codeword, Message};
use crate::counts::CodeParams;
use crate::error::{Error, Result};

/// Bridge to insert between a codeword ending in `prev_rmb` and one starting
/// with `next_lmb`.
pub fn select_bridge(prev_rmb: bool, next_lmb: bool, x: usize) -> Vec<bool> {
    vec![prev_rmb && next_lmb; x]
}

/// Longest run of identical bits a bridged stream can contain,
/// `2(m-1) + x`.
pub fn max_run_bound(params: CodeParams) -> usize {
    2 * (params.m() - 1) + params.x()
}

/// Number of bits in a stream of `count` codewords.
pub fn stream_bits(params: CodeParams, count: usize) -> usize {
    match count {
        0 => 0,
        n => n * params.m() + (n - 1) * params.x(),
    }
}

/// Number of codewords in a stream of `bits` bits, if that length is valid.
pub fn codeword_count(params: CodeParams, bits: usize) -> Option<usize> {
    let stride = params.m() + params.x();
    let padded = bits + params.x();
    if bits < params.m() || !padded.is_multiple_of(stride) {
        return None;
    }
    Some(padded / stride)
}

/// Sequential encoder that remembers the right-most bit of the last codeword.
#[derive(Debug, Clone)]
pub struct StreamEncoder<'a> {
    code: &'a Code,
    prev_rmb: Option<bool>,
}

impl<'a> StreamEncoder<'a> {
    pub fn new(code: &'a Code) -> Self {
        StreamEncoder {
            code,
            prev_rmb: None,
        }
    }

    /// `None` until the first codeword has been emitted.
    pub fn prev_rmb(&self) -> Option<bool> {
        self.prev_rmb
    }

    /// Encodes `msg` and appends the bridge (if any) and codeword to `out`.
    pub fn push(&mut self, msg: &Message, out: &mut Vec<bool>) -> Result<()> {
        let word = self.code.encode(msg)?;
        self.push_codeword(&word, out);
        Ok(())
    }

    pub fn push_codeword(&mut self, word: &Codeword, out: &mut Vec<bool>) {
        if let Some(prev) = self.prev_rmb {
            out.extend(select_bridge(prev, word.lmb(), self.code.params().x()));
        }
        out.extend_from_slice(word.bits());
        self.prev_rmb = Some(word.rmb());
    }
}

/// Encodes each message and joins the codewords with bridges.
pub fn encode_stream(messages: &[Message], code: &Code) -> Result<Vec<bool>> {
    let mut out = Vec::with_capacity(stream_bits(code.params(), messages.len()));
    let mut enc = StreamEncoder::new(code);
    for (ordinal, msg) in messages.iter().enumerate() {
        enc.push(msg, &mut out).map_err(|e| in_codeword(ordinal, e))?;
    }
    Ok(out)
}

/// Two-pass variant of [`encode_stream`]: codewords are computed in
/// parallel, then bridged in order. Output is identical.
pub fn encode_stream_parallel(messages: &[Message], code: &Code) -> Result<Vec<bool>> {
    let words: Vec<Result<Codeword>> = messages.par_iter().map(|m| code.encode(m)).collect();
    let mut out = Vec::with_capacity(stream_bits(code.params(), messages.len()));
    let mut enc = StreamEncoder::new(code);
    for (ordinal, word) in words.into_iter().enumerate() {
        let word = word.map_err(|e| in_codeword(ordinal, e))?;
        enc.push_codeword(&word, &mut out);
    }
    Ok(out)
}

fn in_codeword(ordinal: usize, source: Error) -> Error {
    Error::InCodeword {
        ordinal,
        source: Box::new(source),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BridgeCheck {
    /// Bridges are skipped without inspection.
    #[default]
    Lenient,
    /// Every bridge must equal the one the bridging rule predicts.
    Strict,
}

/// Splits and decodes a bridged stream.
pub fn decode_stream(bits: &[bool], code: &Code, check: BridgeCheck) -> Result<Vec<Message>> {
    let params = code.params();
    let (m, x) = (params.m(), params.x());
    let count = codeword_count(params, bits.len()).ok_or(Error::Framing {
        bits: bits.len(),
        m,
        x,
    })?;
    let stride = m + x;

    if check == BridgeCheck::Strict {
        for ordinal in 0..count - 1 {
            let start = ordinal * stride + m;
            let expected = select_bridge(bits[start - 1], bits[start + x], x);
            if bits[start..start + x] != expected[..] {
                return Err(Error::BridgeMismatch {
                    ordinal,
                    offset: start,
                });
            }
        }
    }

    let decoded: Vec<Result<Message>> = (0..count)
        .into_par_iter()
        .map(|ordinal| {
            let start = ordinal * stride;
            let word = Codeword::from_bits(bits[start..start + m].to_vec());
            code.decode(&word).map_err(|e| match e {
                Error::ConstraintViolation { offset, zeros } => in_codeword(
                    ordinal,
                    Error::ConstraintViolation {
                        offset: start + offset,
                        zeros,
                    },
                ),
                e => in_codeword(ordinal, e),
            })
        })
        .collect();
    decoded.into_iter().collect()
}

pub const FRAME_MAGIC: [u8; 4] = *b"ALC1";
pub const FRAME_VERSION: u8 = 1;
/// magic + version + m + x + codeword_count + message_bits
pub const FRAME_HEADER_LEN: usize = 4 + 1 + 4 + 4 + 8 + 8;

/// Header of the packed stream format. All integers are little-endian.
///
/// | bytes  | field                                        |
/// |--------|----------------------------------------------|
/// | 0..4   | `ALC1`                                       |
/// | 4      | version, `1`                                 |
/// | 5..9   | `m`, u32                                     |
/// | 9..13  | `x`, u32                                     |
/// | 13..21 | codeword count, u64                          |
/// | 21..29 | original message bit length, u64 (0 = none) |
///
/// The payload that follows is the bridged stream packed MSB-first with
/// the final byte zero-padded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameHeader {
    pub params: CodeParams,
    pub codeword_count: u64,
    /// Number of meaningful message bits when the last message was
    /// zero-padded; 0 when every message was full.
    pub message_bits: u64,
}

impl FrameHeader {
    pub fn to_bytes(&self) -> [u8; FRAME_HEADER_LEN] {
        let mut out = [0u8; FRAME_HEADER_LEN];
        out[0..4].copy_from_slice(&FRAME_MAGIC);
        out[4] = FRAME_VERSION;
        out[5..9].copy_from_slice(&(self.params.m() as u32).to_le_bytes());
        out[9..13].copy_from_slice(&(self.params.x() as u32).to_le_bytes());
        out[13..21].copy_from_slice(&self.codeword_count.to_le_bytes());
        out[21..29].copy_from_slice(&self.message_bits.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < FRAME_HEADER_LEN {
            return Err(Error::BadFrame(format!(
                "header needs {FRAME_HEADER_LEN} bytes, got {}",
                bytes.len()
            )));
        }
        if bytes[0..4] != FRAME_MAGIC {
            return Err(Error::BadFrame("bad magic".into()));
        }
        if bytes[4] != FRAME_VERSION {
            return Err(Error::BadFrame(format!("unsupported version {}", bytes[4])));
        }
        let u32_at = |k: usize| u32::from_le_bytes(bytes[k..k + 4].try_into().unwrap());
        let u64_at = |k: usize| u64::from_le_bytes(bytes[k..k + 8].try_into().unwrap());
        let params = CodeParams::new(u32_at(5) as usize, u32_at(9) as usize)
            .map_err(|e| Error::BadFrame(e.to_string()))?;
        Ok(FrameHeader {
            params,
            codeword_count: u64_at(13),
            message_bits: u64_at(21),
        })
    }

    /// Payload length in bits.
    pub fn payload_bits(&self) -> usize {
        stream_bits(self.params, self.codeword_count as usize)
    }
}

/// Packs bits MSB-first, zero-padding the last byte.
pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (k, &b)| acc | ((b as u8) << (7 - k)))
        })
        .collect()
}

/// Inverse of [`pack_bits`], keeping the first `len` bits.
pub fn unpack_bits(bytes: &[u8], len: usize) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).map(move |k| byte & (0x80 >> k) != 0))
        .take(len)
        .collect()
}

/// Full packed frame (header + payload) for a bridged stream.
pub fn write_frame(header: &FrameHeader, bits: &[bool]) -> Result<Vec<u8>> {
    if bits.len() != header.payload_bits() {
        return Err(Error::LengthMismatch {
            expected: header.payload_bits(),
            actual: bits.len(),
        });
    }
    let mut out = header.to_bytes().to_vec();
    out.extend(pack_bits(bits));
    Ok(out)
}

pub fn read_frame(bytes: &[u8]) -> Result<(FrameHeader, Vec<bool>)> {
    let header = FrameHeader::from_bytes(bytes)?;
    let payload = &bytes[FRAME_HEADER_LEN..];
    let bits = header.payload_bits();
    let need = bits.div_ceil(8);
    if payload.len() != need {
        return Err(Error::BadFrame(format!(
            "payload of {bits} bits needs {need} bytes, got {}",
            payload.len()
        )));
    }
    if bits % 8 != 0 && payload[need - 1] & (0xff >> (bits % 8)) != 0 {
        return Err(Error::BadFrame("nonzero padding bits".into()));
    }
    Ok((header, unpack_bits(payload, bits)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{parse, render};

    fn code(m: usize, x: usize) -> Code {
        Code::new(CodeParams::new(m, x).unwrap()).unwrap()
    }

    fn msgs(list: &[&str]) -> Vec<Message> {
        list.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn bridges() {
        assert_eq!(select_bridge(true, true, 2), vec![true, true]);
        assert_eq!(select_bridge(true, false, 1), vec![false]);
        assert_eq!(select_bridge(false, true, 3), vec![false; 3]);
        assert_eq!(select_bridge(false, false, 1), vec![false]);
    }

    #[test]
    fn run_bound() {
        let p = |m, x| CodeParams::new(m, x).unwrap();
        assert_eq!(max_run_bound(p(5, 1)), 9);
        assert_eq!(max_run_bound(p(2, 1)), 3);
        assert_eq!(max_run_bound(p(44, 1)), 87);
    }

    #[test]
    fn encode_examples() {
        let c = code(5, 1);
        let s = encode_stream(&msgs(&["0000", "1111"]), &c).unwrap();
        assert_eq!(render(&s), "00001111000");
        let s = encode_stream(&msgs(&["1011", "0000"]), &c).unwrap();
        assert_eq!(render(&s), "10000000001");
        let s = encode_stream(&msgs(&["0000"]), &c).unwrap();
        assert_eq!(render(&s), "00001");
        assert!(encode_stream(&[], &c).unwrap().is_empty());
    }

    #[test]
    fn parallel_matches_sequential() {
        let c = code(7, 2);
        let list: Vec<Message> = (0..40u32)
            .map(|v| Message::from_value(&(v * 7 % 32).into(), c.message_bits()))
            .collect();
        assert_eq!(
            encode_stream(&list, &c).unwrap(),
            encode_stream_parallel(&list, &c).unwrap()
        );
    }

    #[test]
    fn encoder_state() {
        let c = code(5, 1);
        let mut enc = StreamEncoder::new(&c);
        assert_eq!(enc.prev_rmb(), None);
        let mut out = Vec::new();
        enc.push(&"0000".parse().unwrap(), &mut out).unwrap();
        assert_eq!(enc.prev_rmb(), Some(true));
    }

    #[test]
    fn decode_examples() {
        let c = code(5, 1);
        let got = decode_stream(&parse("00001111000").unwrap(), &c, BridgeCheck::Strict).unwrap();
        assert_eq!(got, msgs(&["0000", "1111"]));
        let got = decode_stream(&parse("00001").unwrap(), &c, BridgeCheck::Lenient).unwrap();
        assert_eq!(got, msgs(&["0000"]));
        assert_eq!(
            decode_stream(&parse("0000111100").unwrap(), &c, BridgeCheck::Lenient),
            Err(Error::Framing { bits: 10, m: 5, x: 1 })
        );
        assert!(matches!(
            decode_stream(&[], &c, BridgeCheck::Lenient),
            Err(Error::Framing { .. })
        ));
    }

    #[test]
    fn strict_mode_catches_bad_bridge() {
        let c = code(5, 1);
        // correct bridge is 1; a 0 there reads fine leniently
        let bits = parse("00001011000").unwrap();
        assert!(decode_stream(&bits, &c, BridgeCheck::Lenient).is_ok());
        assert_eq!(
            decode_stream(&bits, &c, BridgeCheck::Strict),
            Err(Error::BridgeMismatch { ordinal: 0, offset: 5 })
        );
    }

    #[test]
    fn corruption_carries_ordinal() {
        let c = code(5, 1);
        let bits = parse("00001111111").unwrap();
        match decode_stream(&bits, &c, BridgeCheck::Lenient) {
            Err(Error::InCodeword { ordinal, source }) => {
                assert_eq!(ordinal, 1);
                assert!(matches!(*source, Error::Corrupted { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
        let bits = parse("00001010100").unwrap();
        match decode_stream(&bits, &c, BridgeCheck::Lenient) {
            Err(Error::InCodeword { ordinal: 1, source }) => {
                assert_eq!(*source, Error::ConstraintViolation { offset: 6, zeros: 1 });
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn counts_from_length() {
        let p = CodeParams::new(5, 1).unwrap();
        assert_eq!(codeword_count(p, 5), Some(1));
        assert_eq!(codeword_count(p, 11), Some(2));
        assert_eq!(codeword_count(p, 10), None);
        assert_eq!(codeword_count(p, 0), None);
        assert_eq!(stream_bits(p, 3), 17);
    }

    #[test]
    fn frame_layout() {
        let c = code(5, 1);
        let bits = encode_stream(&msgs(&["0000", "1111"]), &c).unwrap();
        let header = FrameHeader {
            params: c.params(),
            codeword_count: 2,
            message_bits: 0,
        };
        let bytes = write_frame(&header, &bits).unwrap();
        assert_eq!(&bytes[..5], b"ALC1\x01");
        assert_eq!(&bytes[5..9], &[5, 0, 0, 0]);
        assert_eq!(&bytes[9..13], &[1, 0, 0, 0]);
        assert_eq!(&bytes[13..21], &[2, 0, 0, 0, 0, 0, 0, 0]);
        // 00001111 000(00000)
        assert_eq!(&bytes[FRAME_HEADER_LEN..], &[0b0000_1111, 0b0000_0000]);
        assert_eq!(read_frame(&bytes).unwrap(), (header, bits));
    }

    #[test]
    fn frame_rejects_garbage() {
        assert!(read_frame(b"ALC").is_err());
        let header = FrameHeader {
            params: CodeParams::new(5, 1).unwrap(),
            codeword_count: 1,
            message_bits: 0,
        };
        let mut bytes = header.to_bytes().to_vec();
        bytes.push(0b0000_1100); // padding bits set
        assert!(read_frame(&bytes).is_err());
        bytes[0] = b'X';
        assert!(read_frame(&bytes).is_err());
    }
}
