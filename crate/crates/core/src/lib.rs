//! Reversible tokenization of integer identifiers over a prime field.
//!
//! An id below `p^n` is written as `n` base-p digits and multiplied by a
//! seeded invertible matrix mod `p`. Decoding multiplies by the inverse and
//! reads the digits back, so the map is a bijection on `[0, p^n)`.
//!
//! ```
//! use mlt::{fit, Strategy};
//!
//! let cfg = fit(164_320, Strategy::FixN(7), 1).unwrap();
//! let tokens = cfg.encode(12_345).unwrap();
//! assert_eq!(tokens.len(), 7);
//! assert_eq!(cfg.decode(&tokens).unwrap(), 12_345);
//! ```

pub mod bench;
pub mod error;
pub mod field;
pub mod matrix;
pub mod pipeline;
pub mod radix;
pub mod rng;
pub mod tokenizer;

pub use error::{Error, ErrorKind, Result};
pub use field::{is_prime, next_prime, FieldElement, FieldPrime};
pub use matrix::{
    det_mod_p, invert, mat_vec_mul, random_invertible, random_invertible_dim, ModMatrix,
};
pub use pipeline::{
    build_vocab, decode_file, encode_file, load_vocab, save_vocab, ColumnSpec, FileSummary,
    Vocabulary,
};
pub use radix::{from_digits, select_n, select_p, to_digits, DigitVector, RadixParams};
pub use rng::SeededGenerator;
pub use tokenizer::{
    fit, load_config, save_config, LabelFactorization, Strategy, TokenVector, TokenizerConfig,
    FORMAT_VERSION,
};
