//! The tokenizer: `t = (M * v) mod p` on encode and `v = (M^-1 * t) mod p`
//! on decode, where `v` is the little-endian base-p expansion of an id.
//!
//! A [`TokenizerConfig`] is immutable once built and is fully determined by
//! `(p, n, seed)` unless its matrix was injected by hand ("pinned").

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::field::FieldPrime;
use crate::matrix::{random_invertible, ModMatrix};
use crate::radix::{check_digits, select_n, select_p, RadixParams};

/// Version written to, and required from, config documents.
pub const FORMAT_VERSION: u32 = 1;

/// Which of `(p, n)` the caller fixes when fitting; the other is chosen
/// minimally so that `p^n > vocab_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    FixP(u64),
    FixN(usize),
}

/// Output of encode: `n` residues in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenVector(Vec<u32>);

impl TokenVector {
    pub fn new(digits: Vec<u32>) -> Self {
        TokenVector(digits)
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn into_digits(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<u32>> for TokenVector {
    fn from(v: Vec<u32>) -> Self {
        TokenVector(v)
    }
}

/// Per-head class targets for an output split into `n` classifiers of size `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelFactorization {
    pub targets: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    params: RadixParams,
    seed: u64,
    vocab_size: u64,
    matrix: ModMatrix,
    matrix_inv: ModMatrix,
    matrix_pinned: bool,
}

/// Fits a tokenizer for `vocab_size` ids; see [`TokenizerConfig::fit`].
pub fn fit(vocab_size: u64, strategy: Strategy, seed: u64) -> Result<TokenizerConfig> {
    TokenizerConfig::fit(vocab_size, strategy, seed)
}

impl TokenizerConfig {
    pub fn fit(vocab_size: u64, strategy: Strategy, seed: u64) -> Result<Self> {
        let params = match strategy {
            Strategy::FixP(p) => select_n(FieldPrime::new(p)?, vocab_size)?,
            Strategy::FixN(n) => select_p(n, vocab_size)?,
        };
        Self::from_params(params, vocab_size, seed)
    }

    /// Builds a config for explicit `(p, n)`; `vocab_size` must still satisfy
    /// `p^n > vocab_size`.
    pub fn from_params(params: RadixParams, vocab_size: u64, seed: u64) -> Result<Self> {
        check_capacity(&params, vocab_size)?;
        let matrix = random_invertible(&params, seed)?;
        let matrix_inv = matrix.invert()?;
        Ok(TokenizerConfig {
            params,
            seed,
            vocab_size,
            matrix,
            matrix_inv,
            matrix_pinned: false,
        })
    }

    /// Builds a config around a caller-supplied matrix. The result is pinned:
    /// loading it back skips the regeneration check.
    pub fn with_matrix(matrix: ModMatrix, vocab_size: u64, seed: u64) -> Result<Self> {
        let params = RadixParams::new(matrix.modulus(), matrix.dim())?;
        check_capacity(&params, vocab_size)?;
        let matrix_inv = matrix.invert()?;
        Ok(TokenizerConfig {
            params,
            seed,
            vocab_size,
            matrix,
            matrix_inv,
            matrix_pinned: true,
        })
    }

    pub fn format_version(&self) -> u32 {
        FORMAT_VERSION
    }

    pub fn params(&self) -> &RadixParams {
        &self.params
    }

    pub fn prime(&self) -> FieldPrime {
        self.params.prime()
    }

    /// Token length `n`.
    pub fn digits(&self) -> usize {
        self.params.digits()
    }

    pub fn capacity(&self) -> u128 {
        self.params.capacity()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn vocab_size(&self) -> u64 {
        self.vocab_size
    }

    /// `vocab_size / p^n`.
    pub fn load_factor(&self) -> f64 {
        self.vocab_size as f64 / self.capacity() as f64
    }

    pub fn matrix(&self) -> &ModMatrix {
        &self.matrix
    }

    pub fn matrix_inv(&self) -> &ModMatrix {
        &self.matrix_inv
    }

    pub fn is_pinned(&self) -> bool {
        self.matrix_pinned
    }

    /// A tokenizer has no trained weights; everything derives from `(p, n, seed)`.
    pub fn learned_parameters(&self) -> usize {
        0
    }

    pub fn encode(&self, id: u64) -> Result<TokenVector> {
        let mut out = vec![0u32; self.digits()];
        self.encode_into(id, &mut out)?;
        Ok(TokenVector(out))
    }

    /// Encodes into a caller buffer of length `n`.
    pub fn encode_into(&self, id: u64, out: &mut [u32]) -> Result<()> {
        self.check_len(out.len())?;
        let mut v = [0u32; crate::radix::MAX_DIGITS];
        let v = &mut v[..self.digits()];
        self.params.write_digits(id, v)?;
        self.matrix.apply(v, out);
        Ok(())
    }

    /// Inverse of [`encode`](Self::encode). Every vector in `[0, p)^n`
    /// decodes to some id below `p^n`, which may be at or above
    /// `vocab_size`; range checks against the vocabulary are the caller's.
    pub fn decode(&self, t: &TokenVector) -> Result<u64> {
        self.decode_digits(t.digits())
    }

    pub fn decode_digits(&self, digits: &[u32]) -> Result<u64> {
        let id = self.decode_wide(digits)?;
        u64::try_from(id)
            .map_err(|_| Error::Overflow(format!("decoded id {id} does not fit in 64 bits")))
    }

    /// Like [`decode_digits`](Self::decode_digits) but without narrowing to
    /// `u64`, for configs whose capacity exceeds 2^64.
    pub fn decode_wide(&self, digits: &[u32]) -> Result<u128> {
        self.check_len(digits.len())?;
        check_digits(digits, self.prime())?;
        let mut v = [0u32; crate::radix::MAX_DIGITS];
        let v = &mut v[..self.digits()];
        self.matrix_inv.apply(digits, v);
        self.params.value_of_slice(v)
    }

    /// Encodes every id, failing on the first out-of-range element.
    pub fn encode_batch(&self, ids: &[u64]) -> Result<Vec<TokenVector>> {
        ids.iter()
            .enumerate()
            .map(|(i, &id)| self.encode(id).map_err(|e| e.at_index(i)))
            .collect()
    }

    pub fn decode_batch(&self, tokens: &[TokenVector]) -> Result<Vec<u64>> {
        tokens
            .iter()
            .enumerate()
            .map(|(i, t)| self.decode(t).map_err(|e| e.at_index(i)))
            .collect()
    }

    /// Batch encode into a flat row-major buffer of `ids.len() * n` digits.
    pub fn encode_batch_into(&self, ids: &[u64], out: &mut [u32]) -> Result<()> {
        let n = self.digits();
        if out.len() != ids.len() * n {
            return Err(Error::DimensionMismatch {
                expected: ids.len() * n,
                found: out.len(),
            });
        }
        for (i, (&id, chunk)) in ids.iter().zip(out.chunks_exact_mut(n)).enumerate() {
            self.encode_into(id, chunk).map_err(|e| e.at_index(i))?;
        }
        Ok(())
    }

    /// Batch decode from a flat row-major buffer of `out.len() * n` digits.
    pub fn decode_batch_from(&self, digits: &[u32], out: &mut [u64]) -> Result<()> {
        let n = self.digits();
        if digits.len() != out.len() * n {
            return Err(Error::DimensionMismatch {
                expected: out.len() * n,
                found: digits.len(),
            });
        }
        for (i, (chunk, o)) in digits.chunks_exact(n).zip(out.iter_mut()).enumerate() {
            *o = self.decode_digits(chunk).map_err(|e| e.at_index(i))?;
        }
        Ok(())
    }

    /// Maps each digit `k` to `k / p`, giving values in `[0, 1)` spaced `1/p`
    /// apart.
    pub fn normalize(&self, t: &TokenVector) -> Result<Vec<f64>> {
        self.check_len(t.len())?;
        check_digits(t.digits(), self.prime())?;
        let p = self.prime().get() as f64;
        Ok(t.digits().iter().map(|&d| d as f64 / p).collect())
    }

    /// The token digits of `class_id`, one target per output head.
    pub fn factorize_label(&self, class_id: u64) -> Result<LabelFactorization> {
        Ok(LabelFactorization {
            targets: self.encode(class_id)?.into_digits(),
        })
    }

    /// Class id from per-head predictions. A tuple not produced by
    /// [`factorize_label`](Self::factorize_label) over the vocabulary may
    /// reconstruct to an id at or above `vocab_size`.
    pub fn reconstruct_label(&self, predicted: &[u32]) -> Result<u64> {
        self.decode_digits(predicted)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.digits() {
            return Err(Error::DimensionMismatch {
                expected: self.digits(),
                found: len,
            });
        }
        Ok(())
    }

    /// Serializes to the config document format.
    pub fn to_json(&self) -> String {
        let matrix = serde_json::to_string(self.matrix.entries()).expect("u32 slice serializes");
        format!(
            "{{\n  \"format_version\": {},\n  \"p\": {},\n  \"n\": {},\n  \"seed\": {},\n  \"vocab_size\": {},\n  \"matrix\": {},\n  \"matrix_pinned\": {}\n}}\n",
            FORMAT_VERSION,
            self.prime(),
            self.digits(),
            self.seed,
            self.vocab_size,
            matrix,
            self.matrix_pinned,
        )
    }

    /// Parses and validates a config document. The inverse is recomputed and
    /// checked, and an unpinned matrix must equal the one regenerated from
    /// `(p, n, seed)`.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Format("config must be a JSON object".into()))?;
        let version = obj
            .get("format_version")
            .ok_or_else(|| Error::Format("missing field `format_version`".into()))?
            .as_u64()
            .ok_or_else(|| Error::Format("`format_version` must be an unsigned integer".into()))?;
        if version != FORMAT_VERSION as u64 {
            return Err(Error::Version {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let doc: ConfigDocument =
            serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))?;
        doc.validate()
    }
}

fn check_capacity(params: &RadixParams, vocab_size: u64) -> Result<()> {
    if vocab_size == 0 {
        return Err(Error::InvalidArgument(
            "vocab_size must be at least 1".into(),
        ));
    }
    if params.capacity() <= vocab_size as u128 {
        return Err(Error::InvalidArgument(format!(
            "capacity {}^{} = {} must exceed vocab_size {}",
            params.prime(),
            params.digits(),
            params.capacity(),
            vocab_size
        )));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDocument {
    #[allow(dead_code)]
    format_version: u64,
    p: u64,
    n: u64,
    seed: u64,
    vocab_size: u64,
    matrix: Vec<u64>,
    #[serde(default)]
    matrix_pinned: bool,
}

impl ConfigDocument {
    fn validate(self) -> Result<TokenizerConfig> {
        let integrity = |msg: String| Error::Integrity(msg);
        let p = FieldPrime::new(self.p).map_err(|e| integrity(format!("p: {e}")))?;
        let n =
            usize::try_from(self.n).map_err(|_| integrity(format!("n = {} too large", self.n)))?;
        let params = RadixParams::new(p, n).map_err(|e| integrity(format!("n: {e}")))?;
        if self.matrix.len() as u128 != (n as u128) * (n as u128) {
            return Err(Error::Format(format!(
                "matrix has {} entries, expected {}",
                self.matrix.len(),
                n * n
            )));
        }
        if let Some(pos) = self.matrix.iter().position(|&x| x >= p.get()) {
            return Err(integrity(format!(
                "matrix entry {} at index {pos} is not below p = {p}",
                self.matrix[pos]
            )));
        }
        check_capacity(&params, self.vocab_size).map_err(|e| integrity(e.to_string()))?;
        let entries = self.matrix.iter().map(|&x| x as u32).collect();
        let matrix = ModMatrix::new(n, p, entries)?;
        if matrix.det_mod_p().is_zero() {
            return Err(integrity("matrix is singular mod p".into()));
        }
        let matrix_inv = matrix.invert().map_err(|e| integrity(e.to_string()))?;
        if !matrix.mul(&matrix_inv)?.is_identity() || !matrix_inv.mul(&matrix)?.is_identity() {
            return Err(integrity("matrix inverse check failed".into()));
        }
        if !self.matrix_pinned {
            let regenerated = random_invertible(&params, self.seed)?;
            if regenerated != matrix {
                return Err(integrity(format!(
                    "matrix does not match the one generated from seed {}",
                    self.seed
                )));
            }
        }
        Ok(TokenizerConfig {
            params,
            seed: self.seed,
            vocab_size: self.vocab_size,
            matrix,
            matrix_inv,
            matrix_pinned: self.matrix_pinned,
        })
    }
}

/// Writes the config document to `path`. The file appears only once fully
/// written.
pub fn save_config(cfg: &TokenizerConfig, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), cfg.to_json().as_bytes())
}

pub fn load_config(path: impl AsRef<Path>) -> Result<TokenizerConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    TokenizerConfig::from_json(&text)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let ctx = || format!("writing {}", path.display());
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(ctx(), e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(ctx(), e))?;
    tmp.persist(path).map_err(|e| Error::io(ctx(), e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> FieldPrime {
        FieldPrime::new(p).unwrap()
    }

    fn shear_p3() -> TokenizerConfig {
        let m = ModMatrix::new(2, fp(3), vec![1, 1, 0, 1]).unwrap();
        TokenizerConfig::with_matrix(m, 8, 0).unwrap()
    }

    #[test]
    fn fit_examples() {
        let c = fit(124, Strategy::FixN(3), 7).unwrap();
        assert_eq!((c.prime().get(), c.digits(), c.capacity()), (5, 3, 125));

        let c = fit(1, Strategy::FixP(2), 0).unwrap();
        assert_eq!((c.prime().get(), c.digits()), (2, 1));

        let c = fit(164_320, Strategy::FixN(7), 1).unwrap();
        assert_eq!((c.prime().get(), c.capacity()), (7, 823_543));
        assert_eq!(c.learned_parameters(), 0);

        assert!(matches!(
            fit(10, Strategy::FixP(4), 0),
            Err(Error::NotPrime(4))
        ));
        assert!(matches!(
            fit(0, Strategy::FixN(3), 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            fit(1 << 40, Strategy::FixN(1), 0),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn encode_examples() {
        let c = fit(1000, Strategy::FixN(4), 3).unwrap();
        assert_eq!(c.encode(0).unwrap().digits(), &[0, 0, 0, 0]);

        let ident = TokenizerConfig::with_matrix(ModMatrix::identity(3, fp(5)), 100, 0).unwrap();
        for id in 0..125 {
            let v = ident.params().to_digits(id).unwrap();
            assert_eq!(ident.encode(id).unwrap().digits(), v.digits());
        }

        let c = shear_p3();
        assert_eq!(c.encode(5).unwrap().digits(), &[0, 1]);
        assert_eq!(c.decode(&TokenVector::new(vec![0, 1])).unwrap(), 5);
        assert_eq!(c.decode(&TokenVector::new(vec![0, 0])).unwrap(), 0);
        assert!(matches!(
            c.encode(9),
            Err(Error::IdOutOfRange { id: 9, capacity: 9 })
        ));
    }

    #[test]
    fn decode_errors() {
        let c = shear_p3();
        assert!(matches!(
            c.decode(&TokenVector::new(vec![0, 3])),
            Err(Error::DigitOutOfRange { position: 1, .. })
        ));
        assert!(matches!(
            c.decode(&TokenVector::new(vec![0, 1, 2])),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn decode_beyond_u64() {
        // 2^64 = capacity exactly: ids fit, and every token decodes below it
        let c = fit(u64::MAX, Strategy::FixP(2), 9).unwrap();
        assert_eq!(c.capacity(), 1u128 << 64);
        let t = c.encode(u64::MAX).unwrap();
        assert_eq!(c.decode(&t).unwrap(), u64::MAX);

        let c = fit(u64::MAX, Strategy::FixP(3), 9).unwrap();
        let top = crate::radix::DigitVector::new(vec![2u32; c.digits()], c.prime()).unwrap();
        let t = c.matrix().mat_vec_mul(&top).unwrap();
        assert_eq!(c.decode_wide(t.digits()).unwrap(), c.capacity() - 1);
        assert!(matches!(
            c.decode_digits(t.digits()),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn bijection_over_whole_space() {
        let c = fit(100, Strategy::FixN(3), 42).unwrap();
        let mut seen = std::collections::HashSet::new();
        for id in 0..125 {
            let t = c.encode(id).unwrap();
            assert_eq!(c.decode(&t).unwrap(), id);
            assert!(seen.insert(t));
        }
        // encode(decode(t)) = t for every t
        for code in 0..125u32 {
            let t = TokenVector::new(vec![code % 5, (code / 5) % 5, code / 25]);
            let id = c.decode(&t).unwrap();
            assert_eq!(c.encode(id).unwrap(), t);
        }
    }

    #[test]
    fn batch_examples() {
        let c = fit(124, Strategy::FixN(3), 5).unwrap();
        assert!(c.encode_batch(&[]).unwrap().is_empty());
        assert!(c.decode_batch(&[]).unwrap().is_empty());

        let three = c.encode_batch(&[0, 1, 2]).unwrap();
        assert_ne!(three[0], three[1]);
        assert_ne!(three[1], three[2]);
        assert_ne!(three[0], three[2]);

        let ids: Vec<u64> = (0..125).collect();
        let tokens = c.encode_batch(&ids).unwrap();
        let distinct: std::collections::HashSet<_> = tokens.iter().collect();
        assert_eq!(distinct.len(), 125);
        assert_eq!(c.decode_batch(&tokens).unwrap(), ids);

        let err = c.encode_batch(&[1, 2, 500, 3]).unwrap_err();
        assert_eq!(err.batch_index(), Some(2));
        assert_eq!(err.kind(), crate::ErrorKind::IdOutOfRange);

        let mut bad = tokens[..4].to_vec();
        bad[3] = TokenVector::new(vec![0, 9, 0]);
        let err = c.decode_batch(&bad).unwrap_err();
        assert_eq!(err.batch_index(), Some(3));
        assert_eq!(err.kind(), crate::ErrorKind::DigitOutOfRange);
    }

    #[test]
    fn flat_batch_matches_vec_batch() {
        let c = fit(10_000, Strategy::FixP(13), 8).unwrap();
        let ids: Vec<u64> = (0..500).map(|i| i * 19).collect();
        let mut flat = vec![0u32; ids.len() * c.digits()];
        c.encode_batch_into(&ids, &mut flat).unwrap();
        let nested: Vec<u32> = c
            .encode_batch(&ids)
            .unwrap()
            .into_iter()
            .flat_map(TokenVector::into_digits)
            .collect();
        assert_eq!(flat, nested);
        let mut back = vec![0u64; ids.len()];
        c.decode_batch_from(&flat, &mut back).unwrap();
        assert_eq!(back, ids);
        assert!(c.encode_batch_into(&ids, &mut flat[1..]).is_err());
    }

    #[test]
    fn normalize_examples() {
        let c = fit(124, Strategy::FixN(3), 7).unwrap();
        assert_eq!(
            c.normalize(&TokenVector::new(vec![0, 0, 0])).unwrap(),
            vec![0.0; 3]
        );
        let v = c.normalize(&TokenVector::new(vec![4, 4, 4])).unwrap();
        for x in v {
            assert!((x - 0.8).abs() <= f64::EPSILON);
            assert!(x < 1.0);
        }
        let big = fit(1000, Strategy::FixP(2_147_483_647), 1).unwrap();
        let top = TokenVector::new(vec![2_147_483_646]);
        assert!(big.normalize(&top).unwrap()[0] < 1.0);
    }

    #[test]
    fn label_factorization_examples() {
        let c = fit(124, Strategy::FixN(3), 11).unwrap();
        let zero = c.factorize_label(0).unwrap();
        assert_eq!(zero.targets, vec![0, 0, 0]);
        assert_eq!(c.reconstruct_label(&zero.targets).unwrap(), 0);
        let mut seen = std::collections::HashSet::new();
        for class in 0..125 {
            let f = c.factorize_label(class).unwrap();
            assert_eq!(c.reconstruct_label(&f.targets).unwrap(), class);
            assert!(seen.insert(f.targets));
        }
        // the one tuple not produced over [0, 124) reconstructs to 124 = vocab_size
        let c = fit(124, Strategy::FixN(3), 11).unwrap();
        let outside = c.encode(124).unwrap();
        assert_eq!(c.reconstruct_label(outside.digits()).unwrap(), 124);
        assert!(matches!(
            c.factorize_label(125),
            Err(Error::IdOutOfRange { .. })
        ));
        assert!(matches!(
            c.reconstruct_label(&[5, 0, 0]),
            Err(Error::DigitOutOfRange { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let c = fit(164_320, Strategy::FixN(7), 1).unwrap();
        let text = c.to_json();
        let back = TokenizerConfig::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);

        let pinned = shear_p3();
        let back = TokenizerConfig::from_json(&pinned.to_json()).unwrap();
        assert!(back.is_pinned());
        assert_eq!(back, pinned);
    }

    #[test]
    fn json_layout() {
        let c = fit(124, Strategy::FixN(3), 42).unwrap();
        let expected = "{\n  \"format_version\": 1,\n  \"p\": 5,\n  \"n\": 3,\n  \"seed\": 42,\n  \"vocab_size\": 124,\n  \"matrix\": [3,1,3,4,0,2,0,3,0],\n  \"matrix_pinned\": false\n}\n";
        assert_eq!(c.to_json(), expected);
    }

    fn doc_with(edit: impl FnOnce(&mut serde_json::Map<String, serde_json::Value>)) -> String {
        let c = fit(124, Strategy::FixN(3), 42).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        edit(v.as_object_mut().unwrap());
        v.to_string()
    }

    #[test]
    fn load_rejects_bad_documents() {
        let kind = |text: String| TokenizerConfig::from_json(&text).unwrap_err().kind();
        use crate::ErrorKind::*;

        // a tampered entry no longer matches the seed
        assert_eq!(kind(doc_with(|m| m["matrix"][0] = 4.into())), Integrity);
        // pinned and singular
        assert_eq!(
            kind(doc_with(|m| {
                m["matrix"] = serde_json::json!([1, 2, 3, 2, 4, 1, 0, 0, 0]);
                m.insert("matrix_pinned".into(), true.into());
            })),
            Integrity
        );
        assert_eq!(kind(doc_with(|m| m["format_version"] = 99.into())), Version);
        assert_eq!(kind(doc_with(|m| m["format_version"] = "1".into())), Format);
        assert_eq!(
            kind(doc_with(|m| {
                m.remove("format_version");
            })),
            Format
        );
        assert_eq!(
            kind(doc_with(|m| {
                m.remove("seed");
            })),
            Format
        );
        assert_eq!(
            kind(doc_with(|m| {
                m.insert("extra".into(), 1.into());
            })),
            Format
        );
        assert_eq!(
            kind(doc_with(|m| m["matrix"] = serde_json::json!([1, 0, 0, 1]))),
            Format
        );
        assert_eq!(kind(doc_with(|m| m["matrix"][2] = 7.into())), Integrity);
        assert_eq!(kind(doc_with(|m| m["p"] = 4.into())), Integrity);
        assert_eq!(kind(doc_with(|m| m["vocab_size"] = 125.into())), Integrity);
        assert_eq!(kind(doc_with(|m| m["seed"] = 43.into())), Integrity);
        assert_eq!(kind("not json".to_string()), Format);
        assert_eq!(kind("[1, 2]".to_string()), Format);

        // matrix_pinned defaults to false when absent
        let ok = doc_with(|m| {
            m.remove("matrix_pinned");
        });
        assert!(!TokenizerConfig::from_json(&ok).unwrap().is_pinned());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        let c = fit(1000, Strategy::FixP(11), 3).unwrap();
        save_config(&c, &path).unwrap();
        assert_eq!(load_config(&path).unwrap(), c);
        assert_eq!(
            load_config(dir.path().join("missing.json"))
                .unwrap_err()
                .kind(),
            crate::ErrorKind::Io
        );
    }

    proptest::proptest! {
        #[test]
        fn round_trip_any_config(vocab in 1u64..u64::MAX, n in 1usize..=16, seed: u64, id: u64) {
            let c = match fit(vocab, Strategy::FixN(n), seed) { Ok(c) => c, Err(_) => return Ok(()) };
            let id = (id as u128 % c.capacity().min(1u128 << 64)) as u64;
            let t = c.encode(id).unwrap();
            proptest::prop_assert!(t.digits().iter().all(|&d| (d as u64) < c.prime().get()));
            proptest::prop_assert_eq!(c.decode(&t).unwrap(), id);
        }

        #[test]
        fn same_seed_same_tokens(vocab in 1u64..1_000_000_000, seed: u64, id in 0u64..1_000_000_000) {
            let a = fit(vocab, Strategy::FixN(14), seed).unwrap();
            let b = fit(vocab, Strategy::FixN(14), seed).unwrap();
            let id = id % vocab;
            proptest::prop_assert_eq!(a.encode(id).unwrap(), b.encode(id).unwrap());
        }
    }
}
