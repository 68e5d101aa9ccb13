//! `EMBV1` embedding files:
//!
//! ```text
//! "EMBV1\n"
//! u64 n, u64 d            (little-endian)
//! f32 data[n * d]         (row-major, little-endian)
//! ```
//!
//! Row ids, when present, live in a sidecar `<path>.ids` with one id per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::{EmbeddingSet, ReprError};

pub const EMBEDDING_MAGIC: &[u8; 6] = b"EMBV1\n";

fn eof_as_truncated(e: std::io::Error) -> ReprError {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        ReprError::TruncatedFile
    } else {
        ReprError::Io(e)
    }
}

pub fn read_embeddings(mut r: impl Read) -> Result<EmbeddingSet, ReprError> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic).map_err(eof_as_truncated)?;
    if &magic != EMBEDDING_MAGIC {
        return Err(ReprError::BadMagic);
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(eof_as_truncated)?;
    let n = u64::from_le_bytes(word);
    r.read_exact(&mut word).map_err(eof_as_truncated)?;
    let d = u64::from_le_bytes(word);
    let total = n
        .checked_mul(d)
        .and_then(|t| usize::try_from(t).ok())
        .ok_or(ReprError::TruncatedFile)?;
    let (n, d) = (n as usize, d as usize);

    // Read in bounded chunks so a lying header cannot force a huge allocation.
    let mut data = Vec::with_capacity(total.min(1 << 20));
    let mut buf = vec![0u8; 4 * 4096];
    let mut remaining = total;
    while remaining > 0 {
        let take = remaining.min(4096);
        let bytes = &mut buf[..take * 4];
        r.read_exact(bytes).map_err(eof_as_truncated)?;
        data.extend(
            bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])),
        );
        remaining -= take;
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(ReprError::TrailingBytes(rest.len()));
    }
    EmbeddingSet::new(n, d, data)
}

pub fn write_embeddings(set: &EmbeddingSet, mut w: impl Write) -> Result<(), ReprError> {
    w.write_all(EMBEDDING_MAGIC)?;
    w.write_all(&(set.n() as u64).to_le_bytes())?;
    w.write_all(&(set.d() as u64).to_le_bytes())?;
    for v in set.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".ids");
    PathBuf::from(s)
}

/// Loads the matrix and, when `<path>.ids` exists, its row ids.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingSet, ReprError> {
    let path = path.as_ref();
    let set = read_embeddings(BufReader::new(File::open(path)?))?;
    let ids_path = sidecar(path);
    if !ids_path.exists() {
        return Ok(set);
    }
    let ids = BufReader::new(File::open(ids_path)?)
        .lines()
        .collect::<Result<Vec<_>, _>>()?;
    set.with_ids(ids)
}

pub fn save_embeddings(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<(), ReprError> {
    let path = path.as_ref();
    write_embeddings(set, BufWriter::new(File::create(path)?))?;
    if let Some(ids) = set.ids() {
        let mut w = BufWriter::new(File::create(sidecar(path))?);
        for id in ids {
            writeln!(w, "{id}")?;
        }
        w.flush()?;
    }
    Ok(())
}
