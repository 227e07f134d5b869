//! Bit-string helpers and the streaming constraint scanner.
//!
//! Bits are held as `bool` slices in writing order: element 0 is the
//! left-most (most significant) bit.

use crate::error::{Error, Result};

/// Parses a string of `'0'`/`'1'` characters. ASCII whitespace is skipped.
pub fn parse(text: &str) -> Result<Vec<bool>> {
    let mut out = Vec::with_capacity(text.len());
    for (offset, ch) in text.char_indices() {
        match ch {
            '0' => out.push(false),
            '1' => out.push(true),
            c if c.is_ascii_whitespace() => {}
            c => {
                return Err(Error::BadFrame(format!(
                    "unexpected character {c:?} at byte offset {offset}"
                )))
            }
        }
    }
    Ok(out)
}

pub fn render(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Something wrong found by [`Scanner`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Finding {
    /// `1 0^zeros 1` starting at `offset`.
    Forbidden { offset: usize, zeros: usize },
    /// A run of `len` identical bits starting at `offset` exceeded the limit.
    LongRun { offset: usize, len: usize, bit: bool },
}

/// Single-pass checker for the forbidden-pattern constraint and, optionally, a maximum
/// run length. Feed bits with [`Scanner::push`], then call
/// [`Scanner::finish`] to flush a trailing run.
#[derive(Debug, Clone)]
pub struct Scanner {
    x: usize,
    max_run: Option<usize>,
    pos: usize,
    last_one: Option<usize>,
    run_bit: bool,
    run_start: usize,
    run_len: usize,
    longest_run: usize,
}

impl Scanner {
    pub fn new(x: usize, max_run: Option<usize>) -> Self {
        Scanner {
            x,
            max_run,
            pos: 0,
            last_one: None,
            run_bit: false,
            run_start: 0,
            run_len: 0,
            longest_run: 0,
        }
    }

    pub fn push(&mut self, bit: bool, findings: &mut Vec<Finding>) {
        let p = self.pos;
        if bit {
            if let Some(q) = self.last_one {
                let zeros = p - q - 1;
                if (1..=self.x).contains(&zeros) {
                    findings.push(Finding::Forbidden { offset: q, zeros });
                }
            }
            self.last_one = Some(p);
        }
        if self.run_len > 0 && bit == self.run_bit {
            self.run_len += 1;
        } else {
            self.close_run(findings);
            self.run_bit = bit;
            self.run_start = p;
            self.run_len = 1;
        }
        self.pos += 1;
    }

    fn close_run(&mut self, findings: &mut Vec<Finding>) {
        self.longest_run = self.longest_run.max(self.run_len);
        if let Some(limit) = self.max_run {
            if self.run_len > limit {
                findings.push(Finding::LongRun {
                    offset: self.run_start,
                    len: self.run_len,
                    bit: self.run_bit,
                });
            }
        }
    }

    pub fn finish(&mut self, findings: &mut Vec<Finding>) {
        self.close_run(findings);
        self.run_len = 0;
    }

    pub fn bits_seen(&self) -> usize {
        self.pos
    }

    /// Longest run among runs closed so far.
    pub fn longest_run(&self) -> usize {
        self.longest_run.max(self.run_len)
    }
}

/// First forbidden pattern in `bits`, if any.
pub fn find_forbidden(bits: &[bool], x: usize) -> Option<Finding> {
    let mut scanner = Scanner::new(x, None);
    let mut findings = Vec::new();
    for &b in bits {
        scanner.push(b, &mut findings);
        if let Some(&f) = findings.first() {
            return Some(f);
        }
    }
    None
}

/// All findings for `bits`, forbidden patterns and over-long runs interleaved
/// in detection order.
pub fn scan_all(bits: &[bool], x: usize, max_run: Option<usize>) -> Vec<Finding> {
    let mut scanner = Scanner::new(x, max_run);
    let mut findings = Vec::new();
    for &b in bits {
        scanner.push(b, &mut findings);
    }
    scanner.finish(&mut findings);
    findings
}

pub fn longest_run(bits: &[bool]) -> usize {
    let mut scanner = Scanner::new(1, None);
    let mut sink = Vec::new();
    for &b in bits {
        scanner.push(b, &mut sink);
    }
    scanner.finish(&mut sink);
    scanner.longest_run()
}
