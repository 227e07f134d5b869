//! Mapping between messages, lexicographic indices, and codewords.
//!
//! A codeword `c = [c_{m-1} ... c_0]` of `AC_{m,x}` has index
//!
//! ```text
//! g(c) = sum_{i=0}^{m-1} c_i * N(i - c_{i+1} * x, x),   c_m = 0
//! ```
//!
//! which is its rank among all valid words in ascending lexicographic order.
//! The inverse walks the bits from the left and greedily subtracts the same
//! terms. Messages of `s^c = floor(log2(N(m, x) - 2))` bits map to indices
//! `1..=2^{s^c}`, which never reach the all-zeros word (index 0) or the
//! all-ones word (index `N - 1`).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits;
use crate::counts::{CodeParams, CountTable};
use crate::error::{Error, Result};

macro_rules! bit_string {
    ($name:ident) => {
        impl $name {
            pub fn from_bits(bits: Vec<bool>) -> Self {
                $name(bits)
            }

            pub fn bits(&self) -> &[bool] {
                &self.0
            }

            pub fn into_bits(self) -> Vec<bool> {
                self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                bits::parse(s).map($name)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&bits::render(&self.0))
            }
        }
    };
}

/// A fixed-length word, left-most (most significant) bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword(Vec<bool>);

bit_string!(Codeword);

impl Codeword {
    /// Left-most bit, `c_{m-1}`.
    pub fn lmb(&self) -> bool {
        self.0[0]
    }

    /// Right-most bit, `c_0`.
    pub fn rmb(&self) -> bool {
        self.0[self.0.len() - 1]
    }

    /// True when the word has at least one bit transition.
    pub fn has_transition(&self) -> bool {
        self.0.windows(2).any(|w| w[0] != w[1])
    }
}

/// A block of `s^c` data bits, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message(Vec<bool>);

bit_string!(Message);

impl Message {
    /// `value` written in exactly `width` bits. Panics if it does not fit.
    pub fn from_value(value: &BigUint, width: usize) -> Self {
        assert!(value.bits() as usize <= width, "value does not fit in {width} bits");
        let mut out = vec![false; width];
        for (k, slot) in out.iter_mut().rev().enumerate() {
            *slot = value.bit(k as u64);
        }
        Message(out)
    }

    pub fn value(&self) -> BigUint {
        let mut v = BigUint::zero();
        for (k, &b) in self.0.iter().rev().enumerate() {
            if b {
                v.set_bit(k as u64, true);
            }
        }
        v
    }
}

/// Big-integer operation counts for one mapping.
///
/// A compare followed by a conditional subtract is counted once: it is a
/// single trial subtraction whose borrow decides the bit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    /// Operations inside the per-bit loop.
    pub mapping: usize,
    /// The `+1` / `-1` message offset.
    pub offset: usize,
}

impl OpCount {
    pub fn total(&self) -> usize {
        self.mapping + self.offset
    }
}

/// One iteration of the greedy index-to-codeword walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeStep {
    /// Bit position `i`, from `m-1` down to `0`.
    pub position: usize,
    /// `i` when the previous bit was 0, `i - x` otherwise.
    pub subt_index: isize,
    pub threshold: BigUint,
    pub bit: bool,
    /// Residual after this step.
    pub residual: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeTrace {
    pub initial: BigUint,
    pub steps: Vec<EncodeStep>,
    pub ops: OpCount,
}

impl EncodeTrace {
    /// The initial residual followed by the residual after each step.
    pub fn residuals(&self) -> Vec<BigUint> {
        std::iter::once(self.initial.clone())
            .chain(self.steps.iter().map(|s| s.residual.clone()))
            .collect()
    }
}

fn check_word(codeword: &Codeword, params: CodeParams) -> Result<()> {
    if codeword.len() != params.m() {
        return Err(Error::LengthMismatch {
            expected: params.m(),
            actual: codeword.len(),
        });
    }
    if let Some(bits::Finding::Forbidden { offset, zeros }) =
        bits::find_forbidden(codeword.bits(), params.x())
    {
        return Err(Error::ConstraintViolation { offset, zeros });
    }
    Ok(())
}

/// Position-dependent term index: `i` after a 0, `i - x` after a 1.
#[inline]
fn term_index(position: usize, prev_bit: bool, x: usize) -> isize {
    if prev_bit {
        position as isize - x as isize
    } else {
        position as isize
    }
}

fn rank(codeword: &Codeword, params: CodeParams, table: &CountTable) -> (BigUint, usize) {
    let m = params.m();
    let mut index = BigUint::zero();
    let mut ops = 0;
    let mut prev = false;
    for (k, &bit) in codeword.bits().iter().enumerate() {
        let position = m - 1 - k;
        if bit {
            index += table.at(term_index(position, prev, params.x()));
            ops += 1;
        }
        prev = bit;
    }
    (index, ops)
}

fn unrank<F>(
    mut residual: BigUint,
    params: CodeParams,
    table: &CountTable,
    mut observe: F,
) -> (Codeword, BigUint, usize)
where
    F: FnMut(usize, isize, &BigUint, bool, &BigUint),
{
    let m = params.m();
    let mut out = Vec::with_capacity(m);
    let mut prev = false;
    let mut ops = 0;
    for position in (0..m).rev() {
        let subt_index = term_index(position, prev, params.x());
        let threshold = table.at(subt_index);
        ops += 1;
        let bit = residual >= *threshold;
        if bit {
            residual -= threshold;
        }
        observe(position, subt_index, threshold, bit, &residual);
        out.push(bit);
        prev = bit;
    }
    (Codeword(out), residual, ops)
}

/// Lexicographic index of a valid codeword.
pub fn index_of(codeword: &Codeword, params: CodeParams, table: &CountTable) -> Result<BigUint> {
    table.check_covers(params)?;
    check_word(codeword, params)?;
    Ok(rank(codeword, params, table).0)
}

fn check_index(index: &BigUint, params: CodeParams, table: &CountTable) -> Result<()> {
    table.check_covers(params)?;
    let n = table.at(params.m() as isize);
    if index >= n {
        return Err(Error::IndexOutOfRange {
            index: index.to_string(),
            cardinality: n.to_string(),
        });
    }
    Ok(())
}

/// The codeword with lexicographic index `index`.
pub fn codeword_at(index: &BigUint, params: CodeParams, table: &CountTable) -> Result<Codeword> {
    check_index(index, params, table)?;
    let (word, residual, _) = unrank(index.clone(), params, table, |_, _, _, _, _| {});
    debug_assert!(residual.is_zero());
    Ok(word)
}

/// [`codeword_at`] with a per-step record of the greedy walk.
pub fn codeword_at_traced(
    index: &BigUint,
    params: CodeParams,
    table: &CountTable,
) -> Result<(Codeword, EncodeTrace)> {
    check_index(index, params, table)?;
    let mut steps = Vec::with_capacity(params.m());
    let (word, _, ops) = unrank(
        index.clone(),
        params,
        table,
        |position, subt_index, threshold, bit, residual| {
            steps.push(EncodeStep {
                position,
                subt_index,
                threshold: threshold.clone(),
                bit,
                residual: residual.clone(),
            })
        },
    );
    Ok((
        word,
        EncodeTrace {
            initial: index.clone(),
            steps,
            ops: OpCount {
                mapping: ops,
                offset: 0,
            },
        },
    ))
}

/// `s^c = floor(log2(N(m, x) - 2))`, the message length and adder width.
pub fn message_size(params: CodeParams, table: &CountTable) -> Result<usize> {
    params.require_clocked()?;
    table.check_covers(params)?;
    let usable = table.at(params.m() as isize) - 2u32;
    Ok(usable.bits() as usize - 1)
}

/// A ready-to-use self-clocked code: parameters, counts, and `s^c` together.
#[derive(Debug, Clone)]
pub struct Code {
    params: CodeParams,
    table: CountTable,
    message_bits: usize,
    // 2^{s^c}, the largest encodable index
    max_index: BigUint,
}

impl Code {
    pub fn new(params: CodeParams) -> Result<Self> {
        params.require_clocked()?;
        Self::with_table(params, CountTable::for_params(params))
    }

    pub fn with_table(params: CodeParams, table: CountTable) -> Result<Self> {
        let message_bits = message_size(params, &table)?;
        Ok(Code {
            params,
            table,
            message_bits,
            max_index: BigUint::one() << message_bits,
        })
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn table(&self) -> &CountTable {
        &self.table
    }

    /// `s^c`.
    pub fn message_bits(&self) -> usize {
        self.message_bits
    }

    pub fn cardinality(&self) -> &BigUint {
        self.table.at(self.params.m() as isize)
    }

    fn check_message(&self, msg: &Message) -> Result<()> {
        if msg.len() != self.message_bits {
            return Err(Error::LengthMismatch {
                expected: self.message_bits,
                actual: msg.len(),
            });
        }
        Ok(())
    }

    pub fn encode(&self, msg: &Message) -> Result<Codeword> {
        self.check_message(msg)?;
        let index = msg.value() + 1u32;
        let (word, residual, _) = unrank(index, self.params, &self.table, |_, _, _, _, _| {});
        debug_assert!(residual.is_zero());
        Ok(word)
    }

    pub fn encode_traced(&self, msg: &Message) -> Result<(Codeword, EncodeTrace)> {
        self.check_message(msg)?;
        let index = msg.value() + 1u32;
        let (word, mut trace) = codeword_at_traced(&index, self.params, &self.table)?;
        trace.ops.offset = 1;
        Ok((word, trace))
    }

    pub fn decode(&self, codeword: &Codeword) -> Result<Message> {
        self.decode_counted(codeword).map(|(msg, _)| msg)
    }

    /// [`Code::decode`] that also reports how many big-integer operations it
    /// took.
    pub fn decode_counted(&self, codeword: &Codeword) -> Result<(Message, OpCount)> {
        check_word(codeword, self.params)?;
        let (index, ops) = rank(codeword, self.params, &self.table);
        if index.is_zero() || index > self.max_index {
            return Err(Error::Corrupted {
                index: index.to_string(),
                max: self.max_index.to_string(),
            });
        }
        let msg = Message::from_value(&(index - 1u32), self.message_bits);
        Ok((
            msg,
            OpCount {
                mapping: ops,
                offset: 1,
            },
        ))
    }
}

/// Encodes one message of exactly `s^c` bits.
pub fn encode_message(msg: &Message, params: CodeParams, table: &CountTable) -> Result<Codeword> {
    Code::with_table(params, table.clone())?.encode(msg)
}

/// Decodes one codeword back to its `s^c`-bit message.
pub fn decode_codeword(
    codeword: &Codeword,
    params: CodeParams,
    table: &CountTable,
) -> Result<Message> {
    Code::with_table(params, table.clone())?.decode(codeword)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(m: usize, x: usize) -> (CodeParams, CountTable) {
        let p = CodeParams::new(m, x).unwrap();
        (p, CountTable::for_params(p))
    }

    fn cw(s: &str) -> Codeword {
        s.parse().unwrap()
    }

    fn big(v: u32) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn index_examples() {
        let (p, t) = setup(5, 1);
        assert_eq!(index_of(&cw("01111"), p, &t).unwrap(), big(11));
        assert_eq!(index_of(&cw("11001"), p, &t).unwrap(), big(17));
        assert_eq!(index_of(&cw("00000"), p, &t).unwrap(), big(0));
        assert_eq!(index_of(&cw("00001"), p, &t).unwrap(), big(1));
    }

    #[test]
    fn index_rejects_forbidden() {
        let (p, t) = setup(5, 1);
        assert_eq!(
            index_of(&cw("01010"), p, &t),
            Err(Error::ConstraintViolation { offset: 1, zeros: 1 })
        );
        let (p, t) = setup(6, 2);
        assert_eq!(
            index_of(&cw("110010"), p, &t),
            Err(Error::ConstraintViolation { offset: 1, zeros: 2 })
        );
        assert!(matches!(
            index_of(&cw("0000"), p, &t),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn codeword_examples() {
        let (p, t) = setup(5, 1);
        assert_eq!(codeword_at(&big(11), p, &t).unwrap(), cw("01111"));
        assert_eq!(codeword_at(&big(0), p, &t).unwrap(), cw("00000"));
        assert_eq!(codeword_at(&big(16), p, &t).unwrap(), cw("11000"));
        assert_eq!(codeword_at(&big(20), p, &t).unwrap(), cw("11111"));
        assert!(matches!(
            codeword_at(&big(21), p, &t),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn length_two_anchors() {
        for x in 1..=4 {
            let (p, t) = setup(2, x);
            for (j, s) in ["00", "01", "10", "11"].iter().enumerate() {
                assert_eq!(index_of(&cw(s), p, &t).unwrap(), big(j as u32));
            }
        }
    }

    #[test]
    fn message_sizes() {
        let (p, t) = setup(5, 1);
        assert_eq!(message_size(p, &t).unwrap(), 4);
        let (p, t) = setup(44, 1);
        assert_eq!(message_size(p, &t).unwrap(), 36);
        let (p, t) = setup(28, 2);
        assert_eq!(message_size(p, &t).unwrap(), 20);
        let (p, t) = setup(2, 1);
        assert_eq!(message_size(p, &t).unwrap(), 1);
        let (p, t) = setup(1, 1);
        assert!(message_size(p, &t).is_err());
    }

    #[test]
    fn message_examples() {
        let (p, t) = setup(5, 1);
        let enc = |s: &str| encode_message(&s.parse().unwrap(), p, &t).unwrap();
        assert_eq!(enc("1010"), cw("01111"));
        assert_eq!(enc("0000"), cw("00001"));
        assert_eq!(enc("1111"), cw("11000"));
        let dec = |s: &str| decode_codeword(&cw(s), p, &t).unwrap().to_string();
        assert_eq!(dec("01111"), "1010");
        assert_eq!(dec("00001"), "0000");
        assert_eq!(dec("10011"), "1110");
    }

    #[test]
    fn decode_rejects_unencodable_words() {
        let code = Code::new(CodeParams::new(5, 1).unwrap()).unwrap();
        for word in ["00000", "11001", "11111"] {
            assert!(
                matches!(code.decode(&cw(word)), Err(Error::Corrupted { .. })),
                "{word}"
            );
        }
        assert!(matches!(
            code.decode(&cw("10100")),
            Err(Error::ConstraintViolation { offset: 0, zeros: 1 })
        ));
    }

    #[test]
    fn wrong_message_length() {
        let code = Code::new(CodeParams::new(5, 1).unwrap()).unwrap();
        assert_eq!(
            code.encode(&"101".parse().unwrap()),
            Err(Error::LengthMismatch { expected: 4, actual: 3 })
        );
    }

    #[test]
    fn walkthrough_trace() {
        let code = Code::new(CodeParams::new(5, 1).unwrap()).unwrap();
        let (word, trace) = code.encode_traced(&"1010".parse().unwrap()).unwrap();
        assert_eq!(word, cw("01111"));
        let residuals: Vec<u32> = trace
            .residuals()
            .iter()
            .map(|r| u32::try_from(r).unwrap())
            .collect();
        assert_eq!(residuals, vec![11, 11, 4, 2, 1, 0]);
        let subt: Vec<isize> = trace.steps.iter().map(|s| s.subt_index).collect();
        assert_eq!(subt, vec![4, 3, 1, 0, -1]);
        assert_eq!(trace.ops.mapping, 5);
    }

    #[test]
    fn message_value_roundtrip() {
        let m: Message = "00101".parse().unwrap();
        assert_eq!(m.value(), big(5));
        assert_eq!(Message::from_value(&big(5), 5), m);
        assert_eq!(Message::from_value(&big(0), 3).to_string(), "000");
    }
}
