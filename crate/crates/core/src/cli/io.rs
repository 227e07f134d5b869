//! Incremental bit readers and writers for the command-line tools.

use std::io::{self, Read, Write};

use crate::error::Error;

use super::CliError;

const CHUNK: usize = 1 << 16;

/// Something that yields bits a chunk at a time.
pub trait BitSource {
    /// Appends the next chunk of bits to `out`. Returns `false` once the
    /// source is exhausted and nothing was appended.
    fn fill(&mut self, out: &mut Vec<bool>) -> Result<bool, CliError>;
}

/// `'0'`/`'1'` text; ASCII whitespace is ignored.
pub struct AsciiSource<R> {
    inner: R,
    buf: Vec<u8>,
    byte_offset: usize,
}

impl<R: Read> AsciiSource<R> {
    pub fn new(inner: R) -> Self {
        AsciiSource {
            inner,
            buf: vec![0; CHUNK],
            byte_offset: 0,
        }
    }
}

impl<R: Read> BitSource for AsciiSource<R> {
    fn fill(&mut self, out: &mut Vec<bool>) -> Result<bool, CliError> {
        loop {
            let n = match self.inner.read(&mut self.buf) {
                Ok(n) => n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e.into()),
            };
            if n == 0 {
                return Ok(false);
            }
            let before = out.len();
            for (k, &byte) in self.buf[..n].iter().enumerate() {
                match byte {
                    b'0' => out.push(false),
                    b'1' => out.push(true),
                    b if b.is_ascii_whitespace() => {}
                    b => {
                        return Err(Error::BadFrame(format!(
                            "unexpected byte {:#04x} at input offset {}",
                            b,
                            self.byte_offset + k
                        ))
                        .into())
                    }
                }
            }
            self.byte_offset += n;
            if out.len() > before {
                return Ok(true);
            }
        }
    }
}

/// Raw bytes read MSB-first. With a bit limit, exactly enough bytes must
/// follow and the padding bits of the last byte must be zero.
pub struct ByteSource<R> {
    inner: R,
    buf: Vec<u8>,
    limit: Option<usize>,
    produced: usize,
}

impl<R: Read> ByteSource<R> {
    pub fn new(inner: R) -> Self {
        ByteSource {
            inner,
            buf: vec![0; CHUNK],
            limit: None,
            produced: 0,
        }
    }

    pub fn with_limit(inner: R, bits: usize) -> Self {
        ByteSource {
            limit: Some(bits),
            ..Self::new(inner)
        }
    }
}

impl<R: Read> BitSource for ByteSource<R> {
    fn fill(&mut self, out: &mut Vec<bool>) -> Result<bool, CliError> {
        let n = loop {
            match self.inner.read(&mut self.buf) {
                Ok(n) => break n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e.into()),
            }
        };
        if n == 0 {
            if let Some(limit) = self.limit {
                if self.produced < limit {
                    return Err(Error::BadFrame(format!(
                        "payload truncated after {} of {limit} bits",
                        self.produced
                    ))
                    .into());
                }
            }
            return Ok(false);
        }
        for &byte in &self.buf[..n] {
            for k in 0..8 {
                let bit = byte & (0x80 >> k) != 0;
                match self.limit {
                    Some(limit) if self.produced >= limit => {
                        if bit || k == 0 {
                            return Err(Error::BadFrame(
                                "trailing data after the payload".into(),
                            )
                            .into());
                        }
                    }
                    _ => {
                        out.push(bit);
                        self.produced += 1;
                    }
                }
            }
        }
        Ok(true)
    }
}

pub trait BitSink {
    fn put(&mut self, bits: &[bool]) -> io::Result<()>;
    fn finish(&mut self) -> io::Result<()>;
}

/// Writes `'0'`/`'1'` characters and a final newline.
pub struct AsciiSink<W> {
    inner: W,
    line: Vec<u8>,
}

impl<W: Write> AsciiSink<W> {
    pub fn new(inner: W) -> Self {
        AsciiSink {
            inner,
            line: Vec::with_capacity(CHUNK),
        }
    }
}

impl<W: Write> BitSink for AsciiSink<W> {
    fn put(&mut self, bits: &[bool]) -> io::Result<()> {
        self.line
            .extend(bits.iter().map(|&b| if b { b'1' } else { b'0' }));
        if self.line.len() >= CHUNK {
            self.inner.write_all(&self.line)?;
            self.line.clear();
        }
        Ok(())
    }

    fn finish(&mut self) -> io::Result<()> {
        self.line.push(b'\n');
        self.inner.write_all(&self.line)?;
        self.line.clear();
        self.inner.flush()
    }
}

/// Packs bits MSB-first; the last byte is zero-padded on `finish`.
pub struct PackedSink<W> {
    inner: W,
    bytes: Vec<u8>,
    acc: u8,
    filled: u8,
}

impl<W: Write> PackedSink<W> {
    pub fn new(inner: W) -> Self {
        PackedSink {
            inner,
            bytes: Vec::with_capacity(CHUNK),
            acc: 0,
            filled: 0,
        }
    }

    pub fn into_inner(self) -> W {
        self.inner
    }
}

impl<W: Write> BitSink for PackedSink<W> {
    fn put(&mut self, bits: &[bool]) -> io::Result<()> {
        for &b in bits {
            self.acc |= (b as u8) << (7 - self.filled);
            self.filled += 1;
            if self.filled == 8 {
                self.bytes.push(self.acc);
                self.acc = 0;
                self.filled = 0;
            }
        }
        if self.bytes.len() >= CHUNK {
            self.inner.write_all(&self.bytes)?;
            self.bytes.clear();
        }
        Ok(())
    }

    fn finish(&mut self) -> io::Result<()> {
        if self.filled > 0 {
            self.bytes.push(self.acc);
            self.acc = 0;
            self.filled = 0;
        }
        self.inner.write_all(&self.bytes)?;
        self.bytes.clear();
        self.inner.flush()
    }
}

/// Passes through at most `limit` bits to the wrapped sink.
pub struct Truncate<S> {
    inner: S,
    remaining: Option<usize>,
}

impl<S: BitSink> Truncate<S> {
    pub fn new(inner: S, limit: Option<usize>) -> Self {
        Truncate {
            inner,
            remaining: limit,
        }
    }
}

impl<S: BitSink> BitSink for Truncate<S> {
    fn put(&mut self, bits: &[bool]) -> io::Result<()> {
        match self.remaining.as_mut() {
            None => self.inner.put(bits),
            Some(left) => {
                let take = bits.len().min(*left);
                *left -= take;
                self.inner.put(&bits[..take])
            }
        }
    }

    fn finish(&mut self) -> io::Result<()> {
        self.inner.finish()
    }
}
