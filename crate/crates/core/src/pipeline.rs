//! Dataset plumbing: vocabularies that densify raw categorical values into
//! ids `[0, V)`, and streaming CSV jobs that swap a categorical column for
//! its token digits and back.
//!
//! An encoded column `c` becomes `c_t0 .. c_t{n-1}` at the same position.
//! Other columns pass through untouched. Output uses minimal quoting, so a
//! canonically quoted input round-trips byte for byte.
//!
//! Row numbers in errors count data records from 1; the header is row 0.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tokenizer::{load_config, TokenizerConfig};

/// Upper bound on distinct values a vocabulary may hold.
pub const MAX_VOCAB: u64 = 1 << 63;

/// Bidirectional map between raw values and dense ids in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    forward: HashMap<String, u64>,
    reverse: Vec<String>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `value`, assigning the next free id if it is new.
    pub fn insert(&mut self, value: &str) -> Result<u64> {
        if let Some(&id) = self.forward.get(value) {
            return Ok(id);
        }
        if value.contains('\n') {
            return Err(Error::Format(format!(
                "vocabulary value {value:?} contains a newline"
            )));
        }
        let id = self.reverse.len() as u64;
        if id >= MAX_VOCAB {
            return Err(Error::Capacity(format!(
                "vocabulary cannot exceed {MAX_VOCAB} values"
            )));
        }
        self.forward.insert(value.to_owned(), id);
        self.reverse.push(value.to_owned());
        Ok(id)
    }

    pub fn id(&self, value: &str) -> Option<u64> {
        self.forward.get(value).copied()
    }

    pub fn value(&self, id: u64) -> Option<&str> {
        usize::try_from(id)
            .ok()
            .and_then(|i| self.reverse.get(i))
            .map(String::as_str)
    }

    /// `V`, the number of distinct values.
    pub fn size(&self) -> u64 {
        self.reverse.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.reverse.is_empty()
    }

    /// Values in id order.
    pub fn values(&self) -> impl Iterator<Item = &str> {
        self.reverse.iter().map(String::as_str)
    }

    /// One value per line, in id order, each followed by `\n`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.reverse {
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut vocab = Vocabulary::new();
        if text.is_empty() {
            return Ok(vocab);
        }
        let body = text.strip_suffix('\n').unwrap_or(text);
        for (line, value) in body.split('\n').enumerate() {
            if vocab.forward.contains_key(value) {
                return Err(Error::Format(format!(
                    "duplicate vocabulary value {value:?} on line {}",
                    line + 1
                )));
            }
            vocab.insert(value)?;
        }
        Ok(vocab)
    }
}

/// Assigns ids to distinct values in order of first occurrence.
pub fn build_vocab<I, S>(rows: I) -> Result<Vocabulary>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut vocab = Vocabulary::new();
    for v in rows {
        vocab.insert(v.as_ref())?;
    }
    Ok(vocab)
}

/// Builds a vocabulary from one column of a CSV file with a header row.
pub fn build_vocab_from_csv(input: impl AsRef<Path>, column: &str) -> Result<Vocabulary> {
    let input = input.as_ref();
    let mut reader = csv_reader(open(input)?);
    let header = read_header(&mut reader, input)?;
    let idx = header
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::MissingColumn(column.to_owned()))?;
    let mut vocab = Vocabulary::new();
    let mut record = csv::StringRecord::new();
    let mut row = 0u64;
    while read_record(&mut reader, &mut record, row + 1)? {
        row += 1;
        vocab.insert(&record[idx]).map_err(|e| Error::Cell {
            column: column.to_owned(),
            row,
            source: Box::new(e),
        })?;
    }
    Ok(vocab)
}

pub fn save_vocab(vocab: &Vocabulary, path: impl AsRef<Path>) -> Result<()> {
    crate::tokenizer::write_atomic(path.as_ref(), vocab.to_text().as_bytes())
}

pub fn load_vocab(path: impl AsRef<Path>) -> Result<Vocabulary> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::Format(format!("{} is not valid UTF-8", path.display())))?;
    Vocabulary::from_text(&text)
}

/// Which column to transform and the files that describe it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub column: String,
    pub config_path: PathBuf,
    pub vocab_path: PathBuf,
}

impl ColumnSpec {
    pub fn new(
        column: impl Into<String>,
        config_path: impl Into<PathBuf>,
        vocab_path: impl Into<PathBuf>,
    ) -> Self {
        ColumnSpec {
            column: column.into(),
            config_path: config_path.into(),
            vocab_path: vocab_path.into(),
        }
    }

    /// Loads and cross-checks the config and vocabulary.
    pub fn load(&self) -> Result<ColumnCodec> {
        let config = load_config(&self.config_path)?;
        let vocab = load_vocab(&self.vocab_path)?;
        ColumnCodec::new(self.column.clone(), config, vocab)
            .map(|c| c.with_source(self.config_path.display().to_string()))
    }
}

/// A column name paired with a loaded tokenizer and vocabulary.
#[derive(Debug, Clone)]
pub struct ColumnCodec {
    column: String,
    config: TokenizerConfig,
    vocab: Vocabulary,
    source: Option<String>,
}

impl ColumnCodec {
    pub fn new(column: String, config: TokenizerConfig, vocab: Vocabulary) -> Result<Self> {
        if vocab.size() > config.vocab_size() {
            return Err(Error::Integrity(format!(
                "column {column:?}: vocabulary has {} values but the config was fit for {}",
                vocab.size(),
                config.vocab_size()
            )));
        }
        Ok(ColumnCodec {
            column,
            config,
            vocab,
            source: None,
        })
    }

    fn with_source(mut self, source: String) -> Self {
        self.source = Some(source);
        self
    }

    pub fn column(&self) -> &str {
        &self.column
    }

    pub fn config(&self) -> &TokenizerConfig {
        &self.config
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    fn digit_columns(&self) -> Vec<String> {
        (0..self.config.digits())
            .map(|k| format!("{}_t{k}", self.column))
            .collect()
    }

    fn summary(&self) -> ColumnSummary {
        ColumnSummary {
            column: self.column.clone(),
            p: self.config.prime().get(),
            n: self.config.digits(),
            seed: self.config.seed(),
            vocab_size: self.vocab.size(),
            config: self.source.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnSummary {
    pub column: String,
    pub p: u64,
    pub n: usize,
    pub seed: u64,
    pub vocab_size: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<String>,
}

/// Result of a file job; prints as one line of JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileSummary {
    pub rows: u64,
    pub columns: Vec<ColumnSummary>,
}

impl std::fmt::Display for FileSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| std::fmt::Error)?)
    }
}

/// Replaces each spec column by its token digits. On failure no output file
/// is left behind.
pub fn encode_file(
    input: impl AsRef<Path>,
    specs: &[ColumnSpec],
    output: impl AsRef<Path>,
) -> Result<FileSummary> {
    let codecs = load_specs(specs)?;
    run_file_job(input.as_ref(), output.as_ref(), |r, w| {
        encode_stream(r, &codecs, w)
    })
}

/// Restores raw values from token digit columns. On failure no output file
/// is left behind.
pub fn decode_file(
    input: impl AsRef<Path>,
    specs: &[ColumnSpec],
    output: impl AsRef<Path>,
) -> Result<FileSummary> {
    let codecs = load_specs(specs)?;
    run_file_job(input.as_ref(), output.as_ref(), |r, w| {
        decode_stream(r, &codecs, w)
    })
}

fn load_specs(specs: &[ColumnSpec]) -> Result<Vec<ColumnCodec>> {
    specs.iter().map(ColumnSpec::load).collect()
}

fn run_file_job<F>(input: &Path, output: &Path, job: F) -> Result<FileSummary>
where
    F: FnOnce(&mut dyn Read, &mut dyn Write) -> Result<FileSummary>,
{
    let mut reader = open(input)?;
    let dir = match output.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let ctx = || format!("writing {}", output.display());
    // the temp file is deleted on drop unless persisted
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(ctx(), e))?;
    let mut writer = BufWriter::new(tmp);
    let summary = job(&mut reader, &mut writer)?;
    let tmp = writer
        .into_inner()
        .map_err(|e| Error::io(ctx(), e.into_error()))?;
    tmp.persist(output).map_err(|e| Error::io(ctx(), e.error))?;
    Ok(summary)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(format!("opening {}", path.display()), e))
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(false).from_reader(r)
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

fn csv_error(e: csv::Error, row: u64) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::io("csv i/o", source),
            _ => unreachable!(),
        }
    } else {
        Error::Format(format!("row {row}: {e}"))
    }
}

fn read_header<R: Read>(reader: &mut csv::Reader<R>, path: &Path) -> Result<csv::StringRecord> {
    let mut header = csv::StringRecord::new();
    if !reader
        .read_record(&mut header)
        .map_err(|e| csv_error(e, 0))?
    {
        return Err(Error::Format(format!(
            "{} has no header row",
            path.display()
        )));
    }
    Ok(header)
}

fn read_record<R: Read>(
    reader: &mut csv::Reader<R>,
    record: &mut csv::StringRecord,
    row: u64,
) -> Result<bool> {
    reader.read_record(record).map_err(|e| csv_error(e, row))
}

fn write_error(e: csv::Error) -> Error {
    csv_error(e, 0)
}

fn check_unique(names: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::Format(format!("duplicate output column {n:?}")));
        }
    }
    Ok(())
}

fn check_distinct_specs(codecs: &[ColumnCodec]) -> Result<()> {
    let mut seen = HashSet::new();
    for c in codecs {
        if !seen.insert(c.column()) {
            return Err(Error::InvalidArgument(format!(
                "column {:?} given more than once",
                c.column()
            )));
        }
    }
    Ok(())
}

fn find_unique(header: &csv::StringRecord, name: &str) -> Result<usize> {
    let mut hits = header.iter().enumerate().filter(|(_, h)| *h == name);
    let (idx, _) = hits
        .next()
        .ok_or_else(|| Error::MissingColumn(name.to_owned()))?;
    if hits.next().is_some() {
        return Err(Error::Format(format!(
            "column {name:?} appears more than once"
        )));
    }
    Ok(idx)
}

/// Streaming encode over any reader and writer.
pub fn encode_stream(
    input: &mut dyn Read,
    codecs: &[ColumnCodec],
    output: &mut dyn Write,
) -> Result<FileSummary> {
    check_distinct_specs(codecs)?;
    let mut reader = csv_reader(input);
    let header = read_header(&mut reader, Path::new("input"))?;

    // column index -> codec index
    let mut role: Vec<Option<usize>> = vec![None; header.len()];
    for (ci, codec) in codecs.iter().enumerate() {
        role[find_unique(&header, codec.column())?] = Some(ci);
    }
    let mut out_header = Vec::new();
    for (i, name) in header.iter().enumerate() {
        match role[i] {
            Some(ci) => out_header.extend(codecs[ci].digit_columns()),
            None => out_header.push(name.to_owned()),
        }
    }
    check_unique(&out_header)?;

    let mut writer = csv_writer(output);
    writer.write_record(&out_header).map_err(write_error)?;

    let max_n = codecs.iter().map(|c| c.config.digits()).max().unwrap_or(0);
    let mut digits = vec![0u32; max_n];
    let mut record = csv::StringRecord::new();
    let mut out = csv::ByteRecord::new();
    let mut itoa = String::new();
    let mut rows = 0u64;
    while read_record(&mut reader, &mut record, rows + 1)? {
        rows += 1;
        out.clear();
        for (i, field) in record.iter().enumerate() {
            let Some(ci) = role[i] else {
                out.push_field(field.as_bytes());
                continue;
            };
            let codec = &codecs[ci];
            let id = codec.vocab.id(field).ok_or_else(|| Error::UnknownValue {
                column: codec.column.clone(),
                row: rows,
                value: field.to_owned(),
            })?;
            let buf = &mut digits[..codec.config.digits()];
            codec.config.encode_into(id, buf).map_err(|e| Error::Cell {
                column: codec.column.clone(),
                row: rows,
                source: Box::new(e),
            })?;
            for d in buf.iter() {
                itoa.clear();
                std::fmt::Write::write_fmt(&mut itoa, format_args!("{d}")).ok();
                out.push_field(itoa.as_bytes());
            }
        }
        writer.write_byte_record(&out).map_err(write_error)?;
    }
    writer
        .flush()
        .map_err(|e| Error::io("flushing output", e))?;
    Ok(FileSummary {
        rows,
        columns: codecs.iter().map(ColumnCodec::summary).collect(),
    })
}

enum DecodeRole {
    Pass,
    // first digit column of a codec: emit the restored value here
    Emit(usize),
    Skip,
}

/// Streaming decode over any reader and writer.
pub fn decode_stream(
    input: &mut dyn Read,
    codecs: &[ColumnCodec],
    output: &mut dyn Write,
) -> Result<FileSummary> {
    check_distinct_specs(codecs)?;
    let mut reader = csv_reader(input);
    let header = read_header(&mut reader, Path::new("input"))?;

    let mut roles: Vec<DecodeRole> = (0..header.len()).map(|_| DecodeRole::Pass).collect();
    let mut positions: Vec<Vec<usize>> = Vec::with_capacity(codecs.len());
    for (ci, codec) in codecs.iter().enumerate() {
        let cols = codec
            .digit_columns()
            .iter()
            .map(|name| find_unique(&header, name))
            .collect::<Result<Vec<_>>>()?;
        for (k, &pos) in cols.iter().enumerate() {
            roles[pos] = if k == 0 {
                DecodeRole::Emit(ci)
            } else {
                DecodeRole::Skip
            };
        }
        positions.push(cols);
    }
    let mut out_header = Vec::new();
    for (i, name) in header.iter().enumerate() {
        match roles[i] {
            DecodeRole::Pass => out_header.push(name.to_owned()),
            DecodeRole::Emit(ci) => out_header.push(codecs[ci].column.clone()),
            DecodeRole::Skip => {}
        }
    }
    check_unique(&out_header)?;

    let mut writer = csv_writer(output);
    writer.write_record(&out_header).map_err(write_error)?;

    let max_n = codecs.iter().map(|c| c.config.digits()).max().unwrap_or(0);
    let mut digits = vec![0u32; max_n];
    let mut record = csv::StringRecord::new();
    let mut out = csv::ByteRecord::new();
    let mut rows = 0u64;
    while read_record(&mut reader, &mut record, rows + 1)? {
        rows += 1;
        out.clear();
        for (i, field) in record.iter().enumerate() {
            let ci = match roles[i] {
                DecodeRole::Pass => {
                    out.push_field(field.as_bytes());
                    continue;
                }
                DecodeRole::Skip => continue,
                DecodeRole::Emit(ci) => ci,
            };
            let codec = &codecs[ci];
            let n = codec.config.digits();
            let p = codec.config.prime().get();
            for (k, &pos) in positions[ci].iter().enumerate() {
                let cell = &record[pos];
                let cell_err = |source: Error| Error::Cell {
                    column: header[pos].to_owned(),
                    row: rows,
                    source: Box::new(source),
                };
                let d: u64 = cell
                    .parse()
                    .map_err(|_| cell_err(Error::Format(format!("{cell:?} is not a digit"))))?;
                if d >= p {
                    return Err(cell_err(Error::DigitOutOfRange {
                        digit: d,
                        position: k,
                        modulus: p,
                    }));
                }
                digits[k] = d as u32;
            }
            let id = codec
                .config
                .decode_wide(&digits[..n])
                .map_err(|e| Error::Cell {
                    column: codec.column.clone(),
                    row: rows,
                    source: Box::new(e),
                })?;
            let value = u64::try_from(id)
                .ok()
                .and_then(|id| codec.vocab.value(id))
                .ok_or_else(|| Error::IdAboveVocab {
                    column: codec.column.clone(),
                    row: rows,
                    id,
                    vocab_size: codec.vocab.size(),
                })?;
            out.push_field(value.as_bytes());
        }
        writer.write_byte_record(&out).map_err(write_error)?;
    }
    writer
        .flush()
        .map_err(|e| Error::io("flushing output", e))?;
    Ok(FileSummary {
        rows,
        columns: codecs.iter().map(ColumnCodec::summary).collect(),
    })
}
