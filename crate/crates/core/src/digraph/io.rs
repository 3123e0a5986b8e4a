//! Binary digraph files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "SWDG" | version: u8 = 1 | k: u8 | 4^k * 4 x u32 successor entries (0xFFFFFFFF = absent)
//!        | binding kind: u8 (0 = canonical, 1 = keyed) | [key: u64 if keyed]
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Accessor, ArcBinding};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SWDG";
pub const VERSION: u8 = 1;

pub fn write_digraph<W: Write>(mut w: W, acc: &Accessor, binding: &ArcBinding) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION, acc.k() as u8])?;
    let mut buf = Vec::with_capacity(acc.table().len() * 4);
    for &j in acc.table() {
        buf.extend_from_slice(&j.to_le_bytes());
    }
    w.write_all(&buf)?;
    match binding {
        ArcBinding::Canonical => w.write_all(&[0])?,
        ArcBinding::Keyed(key) => {
            w.write_all(&[1])?;
            w.write_all(&key.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_digraph<R: Read>(mut r: R) -> Result<(Accessor, ArcBinding)> {
    let mut header = [0u8; 6];
    read_exact(&mut r, &mut header, "header")?;
    if &header[..4] != MAGIC {
        return Err(Error::Format(format!("bad magic {:?}", &header[..4])));
    }
    if header[4] != VERSION {
        return Err(Error::Format(format!("unsupported version {}", header[4])));
    }
    let k = header[5] as usize;
    if k == 0 || k > crate::constraints::MAX_OBSERVED_LENGTH {
        return Err(Error::Format(format!("unsupported observed length {k}")));
    }
    let entries = (1usize << (2 * k)) * 4;
    let mut raw = vec![0u8; entries * 4];
    read_exact(&mut r, &mut raw, "successor table")?;
    let table: Vec<u32> = raw.chunks_exact(4).map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
    let mut kind = [0u8; 1];
    read_exact(&mut r, &mut kind, "binding kind")?;
    let binding = match kind[0] {
        0 => ArcBinding::Canonical,
        1 => {
            let mut key = [0u8; 8];
            read_exact(&mut r, &mut key, "binding key")?;
            ArcBinding::Keyed(u64::from_le_bytes(key))
        }
        other => return Err(Error::Format(format!("unknown binding kind {other}"))),
    };
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after digraph".into()));
    }
    let acc = Accessor::from_table(k, table).map_err(|e| match e {
        Error::Format(m) => Error::Format(m),
        other => Error::Format(other.to_string()),
    })?;
    Ok((acc, binding))
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format(format!("truncated file while reading {what}")),
        _ => Error::Io(e),
    })
}

pub fn save(path: impl AsRef<Path>, acc: &Accessor, binding: &ArcBinding) -> Result<()> {
    write_digraph(BufWriter::new(File::create(path)?), acc, binding)
}

pub fn load(path: impl AsRef<Path>) -> Result<(Accessor, ArcBinding)> {
    read_digraph(BufReader::new(File::open(path)?))
}
