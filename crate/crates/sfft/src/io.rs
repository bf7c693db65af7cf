//! Binary signal file format.
//!
//! Layout: magic `"SFFT"`, `u32` little-endian length `n`, one byte for
//! the domain (0 = time, 1 = frequency), then `n` interleaved
//! little-endian `f64` (re, im) pairs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;

use crate::dft::{Domain, Signal};
use crate::{Result, SfftError};

const MAGIC: &[u8; 4] = b"SFFT";

pub fn write_signal(path: &Path, signal: &Signal<f64>) -> Result<()> {
    let io_err = |source| SfftError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&(signal.n() as u32).to_le_bytes()).map_err(io_err)?;
    let domain_byte = match signal.domain {
        Domain::Time => 0u8,
        Domain::Frequency => 1u8,
    };
    w.write_all(&[domain_byte]).map_err(io_err)?;
    for v in &signal.values {
        w.write_all(&v.re.to_le_bytes()).map_err(io_err)?;
        w.write_all(&v.im.to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

pub fn read_signal(path: &Path) -> Result<Signal<f64>> {
    let io_err = |source| SfftError::Io {
        path: path.display().to_string(),
        source,
    };
    let malformed = |reason: &str| SfftError::MalformedFile {
        path: path.display().to_string(),
        reason: reason.to_string(),
    };
    let mut r = BufReader::new(File::open(path).map_err(io_err)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(malformed("bad magic"));
    }
    let mut n_bytes = [0u8; 4];
    r.read_exact(&mut n_bytes).map_err(io_err)?;
    let n = u32::from_le_bytes(n_bytes) as usize;
    if !n.is_power_of_two() {
        return Err(malformed("length is not a power of two"));
    }
    let mut domain_byte = [0u8; 1];
    r.read_exact(&mut domain_byte).map_err(io_err)?;
    let domain = match domain_byte[0] {
        0 => Domain::Time,
        1 => Domain::Frequency,
        _ => return Err(malformed("unknown domain tag")),
    };
    let mut values = Vec::with_capacity(n);
    let mut buf = [0u8; 16];
    for _ in 0..n {
        r.read_exact(&mut buf).map_err(io_err)?;
        let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
        values.push(Complex::new(re, im));
    }
    Signal::new(values, domain)
}
