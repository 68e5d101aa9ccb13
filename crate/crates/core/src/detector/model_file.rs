//! Binary model format, all integers and floats little-endian:
//!
//! ```text
//! "TLDM1"
//! u32 char_min, u32 char_max, u32 word_min, u32 word_max
//! u64 hash_dim, u64 hash_seed
//! u64 train_seed, f64 validation_accuracy
//! f32 bias
//! f32 weights[hash_dim]
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{DetectorError, DetectorModel, FeatureConfig};

pub const MODEL_MAGIC: &[u8; 5] = b"TLDM1";

pub fn write_model(model: &DetectorModel, mut w: impl Write) -> Result<(), DetectorError> {
    let cfg = &model.feature_config;
    w.write_all(MODEL_MAGIC)?;
    for v in [
        *cfg.char_ngrams.start(),
        *cfg.char_ngrams.end(),
        *cfg.word_ngrams.start(),
        *cfg.word_ngrams.end(),
    ] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&(cfg.hash_dim as u64).to_le_bytes())?;
    w.write_all(&cfg.hash_seed.to_le_bytes())?;
    w.write_all(&model.train_seed.to_le_bytes())?;
    w.write_all(&model.validation_accuracy.to_le_bytes())?;
    w.write_all(&model.bias.to_le_bytes())?;
    for x in &model.weights {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_exact<const N: usize>(r: &mut impl Read) -> Result<[u8; N], DetectorError> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => DetectorError::TruncatedFile,
        _ => DetectorError::Io(e),
    })?;
    Ok(buf)
}

pub fn read_model(mut r: impl Read) -> Result<DetectorModel, DetectorError> {
    let magic: [u8; 5] = read_exact(&mut r)?;
    if &magic != MODEL_MAGIC {
        return Err(DetectorError::BadMagic);
    }
    let mut u32s = [0u32; 4];
    for v in &mut u32s {
        *v = u32::from_le_bytes(read_exact(&mut r)?);
    }
    let hash_dim = u64::from_le_bytes(read_exact(&mut r)?);
    let hash_seed = u64::from_le_bytes(read_exact(&mut r)?);
    let feature_config = FeatureConfig {
        char_ngrams: u32s[0]..=u32s[1],
        word_ngrams: u32s[2]..=u32s[3],
        hash_dim: usize::try_from(hash_dim)
            .map_err(|_| DetectorError::Corrupt(format!("hash_dim {hash_dim} too large")))?,
        hash_seed,
    };
    feature_config
        .validate()
        .map_err(|e| DetectorError::Corrupt(e.to_string()))?;
    let train_seed = u64::from_le_bytes(read_exact(&mut r)?);
    let validation_accuracy = f64::from_le_bytes(read_exact(&mut r)?);
    let bias = f32::from_le_bytes(read_exact(&mut r)?);
    let mut weights = Vec::with_capacity(feature_config.hash_dim);
    for _ in 0..feature_config.hash_dim {
        weights.push(f32::from_le_bytes(read_exact(&mut r)?));
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(DetectorError::Corrupt(
            "trailing bytes after weights".into(),
        ));
    }
    Ok(DetectorModel {
        weights,
        bias,
        feature_config,
        train_seed,
        validation_accuracy,
    })
}

pub fn save_model(model: &DetectorModel, path: impl AsRef<Path>) -> Result<(), DetectorError> {
    write_model(model, BufWriter::new(File::create(path)?))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<DetectorModel, DetectorError> {
    read_model(BufReader::new(File::open(path)?))
}
