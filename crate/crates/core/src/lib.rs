//! Asymmetric lexicographically-ordered constrained codes (A-LOCO codes).
//!
//! An A-LOCO code `AC_{m,x}` holds every binary word of length `m` that
//! avoids the patterns `101, 1001, ..., 1 0^x 1`, which are the patterns that
//! disturb an unprogrammed SLC Flash cell sitting between programmed ones.
//! Codewords are ranked lexicographically, and the rank of a codeword is a
//! short sum over a table of code cardinalities, so encoding and decoding
//! need one big-integer add or subtract per bit and no lookup table of
//! codewords.
//!
//! - [`counts`]: cardinalities `N(m, x)` and group sizes.
//! - [`codec`]: index rule, message encoding and decoding.
//! - [`stream`]: bridging between codewords and the packed frame format.
//! - [`oracle`]: brute-force codebooks for cross-checking.
//! - [`analysis`]: rates, adder sizes, and capacity.
//! - [`cli`]: the `aloco` command-line front end.

pub mod analysis;
pub mod bits;
pub mod cli;
pub mod codec;
pub mod counts;
pub mod error;
pub mod oracle;
pub mod stream;

pub use codec::{Code, Codeword, Message};
pub use counts::{CodeParams, CountTable};
pub use error::{Error, Result};
