//! Profile table files: a text header (convention id, spec hash, grid and
//! tail metadata, payload checksum) followed by flat little-endian f64
//! arrays. Used by the cache layer to persist psi tables and sampled
//! profiles bit-identically.

use crate::error::{Error, Result};
use crate::interp::CubicTable;
use num_complex::Complex64;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

pub const CONVENTION_ID: &str = "radial-fourier/forward=(2pi)^-d";
const MAGIC: &str = "# br-profile-table v1";

/// FNV-1a over bytes; used for spec hashes and payload checksums.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableMeta {
    pub kind: String,
    /// Hash of the generating configuration.
    pub spec_hash: u64,
    pub tail_radius: f64,
    pub tail_bound: f64,
}

fn payload_bytes(table: &CubicTable) -> Vec<u8> {
    let (xs, ys) = table.nodes();
    let mut buf = Vec::with_capacity(16 + xs.len() * 24);
    for &x in xs {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    for y in ys {
        buf.extend_from_slice(&y.re.to_le_bytes());
        buf.extend_from_slice(&y.im.to_le_bytes());
    }
    buf
}

pub fn save_table(path: &Path, meta: &TableMeta, table: &CubicTable) -> Result<()> {
    let payload = payload_bytes(table);
    let checksum = fnv1a(&payload);
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::InvalidParam(format!("cannot create {path:?}: {e}")))?;
    let header = format!(
        "{MAGIC}\n# convention: {CONVENTION_ID}\n# kind: {}\n# spec-hash: {:016x}\n# tail: {:.17e} {:.17e}\n# grid: {}\n# checksum: {:016x}\n",
        meta.kind,
        meta.spec_hash,
        meta.tail_radius,
        meta.tail_bound,
        table.len(),
        checksum,
    );
    file.write_all(header.as_bytes())
        .and_then(|_| file.write_all(&payload))
        .map_err(|e| Error::InvalidParam(format!("write {path:?}: {e}")))
}

pub fn load_table(path: &Path) -> Result<(TableMeta, CubicTable)> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::InvalidParam(format!("cannot open {path:?}: {e}")))?;
    let mut reader = BufReader::new(file);
    let mut line = String::new();
    let mut kind = String::new();
    let mut spec_hash = 0u64;
    let mut tail = (0.0f64, 0.0f64);
    let mut n = 0usize;
    let mut checksum = 0u64;
    let mut convention = String::new();
    for i in 0..7 {
        line.clear();
        reader
            .read_line(&mut line)
            .map_err(|e| Error::InvalidParam(format!("read header {path:?}: {e}")))?;
        let l = line.trim_end();
        if i == 0 {
            if l != MAGIC {
                return Err(Error::InvalidParam(format!("{path:?}: bad magic '{l}'")));
            }
            continue;
        }
        let (key, value) = l
            .trim_start_matches("# ")
            .split_once(": ")
            .ok_or_else(|| Error::InvalidParam(format!("{path:?}: bad header line '{l}'")))?;
        match key {
            "convention" => convention = value.to_string(),
            "kind" => kind = value.to_string(),
            "spec-hash" => {
                spec_hash = u64::from_str_radix(value, 16)
                    .map_err(|e| Error::InvalidParam(format!("{path:?}: spec-hash: {e}")))?
            }
            "tail" => {
                let mut it = value.split_whitespace();
                tail.0 = it.next().unwrap_or("0").parse().unwrap_or(0.0);
                tail.1 = it.next().unwrap_or("0").parse().unwrap_or(0.0);
            }
            "grid" => {
                n = value
                    .parse()
                    .map_err(|e| Error::InvalidParam(format!("{path:?}: grid: {e}")))?
            }
            "checksum" => {
                checksum = u64::from_str_radix(value, 16)
                    .map_err(|e| Error::InvalidParam(format!("{path:?}: checksum: {e}")))?
            }
            other => {
                return Err(Error::InvalidParam(format!(
                    "{path:?}: unknown header key '{other}'"
                )))
            }
        }
    }
    if convention != CONVENTION_ID {
        return Err(Error::InvalidParam(format!(
            "{path:?}: convention mismatch: '{convention}'"
        )));
    }
    let mut payload = Vec::new();
    reader
        .read_to_end(&mut payload)
        .map_err(|e| Error::InvalidParam(format!("read payload {path:?}: {e}")))?;
    if payload.len() != n * 24 {
        return Err(Error::InvalidParam(format!(
            "{path:?}: payload length {} != 24 * {n}",
            payload.len()
        )));
    }
    if fnv1a(&payload) != checksum {
        return Err(Error::InvalidParam(format!(
            "{path:?}: checksum mismatch (corrupted table)"
        )));
    }
    let read_f64 = |i: usize| -> f64 {
        let mut b = [0u8; 8];
        b.copy_from_slice(&payload[8 * i..8 * i + 8]);
        f64::from_le_bytes(b)
    };
    let xs: Vec<f64> = (0..n).map(read_f64).collect();
    let ys: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(read_f64(n + 2 * i), read_f64(n + 2 * i + 1)))
        .collect();
    Ok((
        TableMeta {
            kind,
            spec_hash,
            tail_radius: tail.0,
            tail_bound: tail.1,
        },
        CubicTable::new(xs, ys),
    ))
}
