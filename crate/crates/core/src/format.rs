//! LEXL v1 binary corpus container, plus a JSON-Lines reader for hand-built
//! fixtures.
//!
//! All integers are little-endian and nothing is padded:
//!
//! ```text
//! header   magic "LEXL" | version u32 = 1 | dim u32 | checkpoint_step u64 | record_count u64
//! record   doc_id u32 | pos u32 | token_len u16 | token (UTF-8) | dim x f32
//! ```

use std::io::{self, BufRead, Read, Write};

use serde::Deserialize;

use crate::corpus::{EmbeddingCorpus, TokenRecord};
use crate::error::{Error, FormatError, Result};

pub const MAGIC: [u8; 4] = *b"LEXL";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 28;
/// Fixed bytes per record before the token: doc_id, pos, token_len.
pub const RECORD_PREFIX_LEN: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusFileHeader {
    pub version: u32,
    pub dim: u32,
    pub checkpoint_step: u64,
    pub record_count: u64,
}

/// Serializes `corpus` as LEXL v1.
pub fn write_corpus<W: Write>(corpus: &EmbeddingCorpus, mut out: W) -> Result<()> {
    let dim = u32::try_from(corpus.dim()).map_err(|_| FormatError::OutOfRange("dim"))?;
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(&MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.extend_from_slice(&dim.to_le_bytes());
    header.extend_from_slice(&corpus.checkpoint_step().to_le_bytes());
    header.extend_from_slice(&(corpus.len() as u64).to_le_bytes());
    out.write_all(&header)?;

    let mut buf = Vec::new();
    for record in corpus.records() {
        let token = record.token.as_bytes();
        let token_len = u16::try_from(token.len()).map_err(|_| FormatError::TokenTooLong)?;
        buf.clear();
        buf.extend_from_slice(&record.doc_id.to_le_bytes());
        buf.extend_from_slice(&record.pos.to_le_bytes());
        buf.extend_from_slice(&token_len.to_le_bytes());
        buf.extend_from_slice(token);
        for x in &record.embedding {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()?;
    Ok(())
}

pub fn corpus_to_bytes(corpus: &EmbeddingCorpus) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    write_corpus(corpus, &mut bytes)?;
    Ok(bytes)
}

/// Streaming reader that tracks its byte offset for diagnostics.
struct Cursor<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Cursor<R> {
    fn fill(&mut self, buf: &mut [u8], what: &'static str) -> Result<()> {
        let mut filled = 0;
        while filled < buf.len() {
            match self.inner.read(&mut buf[filled..]) {
                Ok(0) => {
                    return Err(FormatError::Truncated {
                        offset: self.offset + filled as u64,
                        what,
                    }
                    .into())
                }
                Ok(n) => filled += n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        self.offset += buf.len() as u64;
        Ok(())
    }

    fn array<const N: usize>(&mut self, what: &'static str) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.fill(&mut b, what)?;
        Ok(b)
    }

    fn at_end(&mut self) -> Result<bool> {
        let mut b = [0u8; 1];
        loop {
            match self.inner.read(&mut b) {
                Ok(n) => return Ok(n == 0),
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
}

pub fn read_header<R: Read>(input: R) -> Result<CorpusFileHeader> {
    read_header_from(&mut Cursor { inner: input, offset: 0 })
}

fn read_header_from<R: Read>(cur: &mut Cursor<R>) -> Result<CorpusFileHeader> {
    let magic = cur.array::<4>("magic")?;
    if magic != MAGIC {
        return Err(FormatError::BadMagic { found: magic }.into());
    }
    let version = u32::from_le_bytes(cur.array("version")?);
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version).into());
    }
    let dim = u32::from_le_bytes(cur.array("dim")?);
    if dim == 0 {
        return Err(FormatError::ZeroDimension.into());
    }
    let checkpoint_step = u64::from_le_bytes(cur.array("checkpoint_step")?);
    let record_count = u64::from_le_bytes(cur.array("record_count")?);
    Ok(CorpusFileHeader {
        version,
        dim,
        checkpoint_step,
        record_count,
    })
}

/// Decodes a LEXL v1 stream. Memory grows with the records read, never with
/// the declared count, so a corrupt header cannot force a large allocation.
pub fn read_corpus<R: Read>(input: R) -> Result<EmbeddingCorpus> {
    let mut cur = Cursor { inner: input, offset: 0 };
    let header = read_header_from(&mut cur)?;
    let dim = header.dim as usize;
    let mut records = Vec::new();
    let mut embedding_bytes = vec![0u8; dim * 4];
    let mut previous: Option<(u32, u32)> = None;
    for index in 0..header.record_count {
        let doc_id = u32::from_le_bytes(cur.array("doc_id")?);
        let pos = u32::from_le_bytes(cur.array("pos")?);
        let token_len = u16::from_le_bytes(cur.array("token_len")?) as usize;
        let token_offset = cur.offset;
        let mut token = vec![0u8; token_len];
        cur.fill(&mut token, "token")?;
        let token = String::from_utf8(token)
            .map_err(|_| FormatError::InvalidUtf8 { offset: token_offset })?;
        if token.is_empty() {
            return Err(FormatError::EmptyToken { record: index }.into());
        }
        cur.fill(&mut embedding_bytes, "embedding")?;
        let embedding: Vec<f32> = embedding_bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        check_embedding(&embedding, index)?;
        if previous.is_some_and(|p| p >= (doc_id, pos)) {
            return Err(FormatError::Unordered { record: index }.into());
        }
        previous = Some((doc_id, pos));
        records.push(TokenRecord {
            token,
            doc_id,
            pos,
            embedding,
        });
    }
    if !cur.at_end()? {
        return Err(FormatError::RecordCountMismatch {
            declared: header.record_count,
            offset: cur.offset,
        }
        .into());
    }
    EmbeddingCorpus::new(dim, header.checkpoint_step, records)
}

fn check_embedding(embedding: &[f32], record: u64) -> Result<(), FormatError> {
    if embedding.iter().any(|x| !x.is_finite()) {
        return Err(FormatError::NonFinite { record });
    }
    if embedding.iter().all(|&x| x == 0.0) {
        return Err(FormatError::ZeroEmbedding { record });
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonlHeader {
    dim: usize,
    #[serde(default)]
    checkpoint_step: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonlRecord {
    token: String,
    doc_id: u32,
    pos: u32,
    embedding: Vec<f32>,
}

/// Reads one record per line: `{"token":..,"doc_id":..,"pos":..,"embedding":[..]}`.
/// An optional first line `{"dim":D,"checkpoint_step":S}` sets the metadata;
/// otherwise the dimension comes from the first record and the step is 0.
/// Blank lines are skipped.
pub fn read_corpus_jsonl<R: BufRead>(input: R) -> Result<EmbeddingCorpus> {
    let mut header: Option<JsonlHeader> = None;
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |e: serde_json::Error| FormatError::Jsonl {
            line: line_no,
            message: e.to_string(),
        };
        if records.is_empty() && header.is_none() {
            let value: serde_json::Value = serde_json::from_str(&line).map_err(err)?;
            if value.get("token").is_none() {
                header = Some(serde_json::from_value(value).map_err(err)?);
                continue;
            }
        }
        let record: JsonlRecord = serde_json::from_str(&line).map_err(err)?;
        check_embedding(&record.embedding, records.len() as u64)?;
        records.push(TokenRecord {
            token: record.token,
            doc_id: record.doc_id,
            pos: record.pos,
            embedding: record.embedding,
        });
    }
    let (dim, step) = match header {
        Some(h) => (h.dim, h.checkpoint_step),
        None => (records.first().map_or(1, |r| r.embedding.len()), 0),
    };
    EmbeddingCorpus::new(dim, step, records).map_err(|e| match e {
        Error::DimensionMismatch { index, .. } => FormatError::Jsonl {
            line: index + 1,
            message: e.to_string(),
        }
        .into(),
        other => other,
    })
}
