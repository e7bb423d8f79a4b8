//! Binary model checkpoints.
//!
//! The format is a small versioned little-endian layout rather than a serde
//! format so that saved weights round-trip bit-for-bit: every f64 is written
//! with `to_le_bytes` and read back with `from_le_bytes`, so a save/load
//! cycle reproduces the exact same model, and reruns resumed from a
//! checkpoint stay deterministic.
//!
//! Layout: magic `ODLN`, format version (u32), then the network config,
//! classifier depths, hidden matrices, classifier matrices, and hedge
//! weights. Lengths are u64, matrices are row-major.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::net::{Activation, HedgedNetwork, NetConfig, NetError};
use crate::numeric::{Matrix, Vector};

const MAGIC: [u8; 4] = *b"ODLN";
const VERSION: u32 = 1;

/// Sanity cap on deserialized lengths so a corrupt header fails fast
/// instead of attempting a huge allocation.
const MAX_LEN: u64 = 1 << 32;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint i/o: {0}")]
    Io(#[from] io::Error),
    #[error("not a checkpoint file (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(u32),
    #[error("malformed checkpoint: {0}")]
    Malformed(String),
    #[error(transparent)]
    InvalidNet(#[from] NetError),
}

fn write_u64<W: Write>(w: &mut W, v: u64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn write_f64_slice<W: Write>(w: &mut W, vs: &[f64]) -> io::Result<()> {
    for &v in vs {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, CheckpointError> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_len<R: Read>(r: &mut R, what: &str) -> Result<usize, CheckpointError> {
    let n = read_u64(r)?;
    if n > MAX_LEN {
        return Err(CheckpointError::Malformed(format!("{} length {} is implausible", what, n)));
    }
    Ok(n as usize)
}

fn read_f64_vec<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>, CheckpointError> {
    let mut out = Vec::with_capacity(n);
    let mut buf = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut buf)?;
        out.push(f64::from_le_bytes(buf));
    }
    Ok(out)
}

fn write_matrix<W: Write>(w: &mut W, m: &Matrix) -> io::Result<()> {
    write_u64(w, m.rows() as u64)?;
    write_u64(w, m.cols() as u64)?;
    write_f64_slice(w, m.as_slice())
}

fn read_matrix<R: Read>(r: &mut R) -> Result<Matrix, CheckpointError> {
    let rows = read_len(r, "matrix rows")?;
    let cols = read_len(r, "matrix cols")?;
    let data = read_f64_vec(r, rows * cols)?;
    let mut m = Matrix::zeros(rows, cols);
    m.as_mut_slice().copy_from_slice(&data);
    Ok(m)
}

/// Writes `net` to `writer` in checkpoint format.
pub fn save<W: Write>(net: &HedgedNetwork, writer: &mut W) -> Result<(), CheckpointError> {
    let mut w = BufWriter::new(writer);
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;

    let cfg = net.config();
    write_u64(&mut w, cfg.input_dim as u64)?;
    write_u64(&mut w, cfg.hidden_widths.len() as u64)?;
    for &h in &cfg.hidden_widths {
        write_u64(&mut w, h as u64)?;
    }
    write_u64(&mut w, cfg.num_classes as u64)?;
    w.write_all(&[match cfg.activation {
        Activation::Relu => 0u8,
        Activation::Tanh => 1u8,
    }])?;
    w.write_all(&[cfg.attach_input_classifier as u8])?;

    write_u64(&mut w, net.classifier_depths().len() as u64)?;
    for &d in net.classifier_depths() {
        write_u64(&mut w, d as u64)?;
    }
    for m in net.hidden_weights() {
        write_matrix(&mut w, m)?;
    }
    for m in net.classifier_weights() {
        write_matrix(&mut w, m)?;
    }
    write_f64_slice(&mut w, net.hedge_weights().as_slice())?;
    w.flush()?;
    Ok(())
}

/// Reads a network back from checkpoint format, validating shapes.
pub fn load<R: Read>(reader: &mut R) -> Result<HedgedNetwork, CheckpointError> {
    let mut r = BufReader::new(reader);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let mut ver = [0u8; 4];
    r.read_exact(&mut ver)?;
    let version = u32::from_le_bytes(ver);
    if version != VERSION {
        return Err(CheckpointError::UnsupportedVersion(version));
    }

    let input_dim = read_len(&mut r, "input_dim")?;
    let n_hidden = read_len(&mut r, "hidden layer count")?;
    let mut hidden_widths = Vec::with_capacity(n_hidden);
    for _ in 0..n_hidden {
        hidden_widths.push(read_len(&mut r, "hidden width")?);
    }
    let num_classes = read_len(&mut r, "num_classes")?;
    let mut flags = [0u8; 2];
    r.read_exact(&mut flags)?;
    let activation = match flags[0] {
        0 => Activation::Relu,
        1 => Activation::Tanh,
        other => {
            return Err(CheckpointError::Malformed(format!("unknown activation tag {}", other)))
        }
    };
    let config = NetConfig {
        input_dim,
        hidden_widths,
        num_classes,
        activation,
        attach_input_classifier: flags[1] != 0,
    };

    let n_classifiers = read_len(&mut r, "classifier count")?;
    let mut classifier_depths = Vec::with_capacity(n_classifiers);
    for _ in 0..n_classifiers {
        classifier_depths.push(read_len(&mut r, "classifier depth")?);
    }
    let hidden_weights: Vec<Matrix> =
        (0..config.depth()).map(|_| read_matrix(&mut r)).collect::<Result<_, _>>()?;
    let classifier_weights: Vec<Matrix> =
        (0..n_classifiers).map(|_| read_matrix(&mut r)).collect::<Result<_, _>>()?;
    let hedge = Vector::from_vec(read_f64_vec(&mut r, n_classifiers)?);

    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(CheckpointError::Malformed("trailing bytes after checkpoint".into()));
    }
    Ok(HedgedNetwork::from_parts(
        config,
        classifier_depths,
        hidden_weights,
        classifier_weights,
        hedge,
    )?)
}

/// Saves `net` to `path`, writing a temp file first and renaming so a crash
/// never leaves a truncated checkpoint behind.
pub fn save_to_path<P: AsRef<Path>>(net: &HedgedNetwork, path: P) -> Result<(), CheckpointError> {
    let path = path.as_ref();
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        save(net, &mut f)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Loads a network from `path`.
pub fn load_from_path<P: AsRef<Path>>(path: P) -> Result<HedgedNetwork, CheckpointError> {
    let mut f = File::open(path)?;
    load(&mut f)
}
