//! On-disk prime cache: an 8-byte magic, a little-endian `u64` count, then
//! that many little-endian `u64` primes in increasing order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use covering_core::numtheory::PrimeTable;

use crate::CliError;

pub const MAGIC: &[u8; 8] = b"CVSPRIME";

/// Environment variable naming the cache file when no flag or config key does.
pub const CACHE_ENV: &str = "COVERING_SIEVE_CACHE";

/// Cache location: explicit setting first, then the environment.
pub fn cache_path(setting: Option<PathBuf>) -> Option<PathBuf> {
    setting.or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

pub fn write_cache(path: &Path, table: &PrimeTable) -> Result<(), CliError> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&(table.len() as u64).to_le_bytes())?;
    for &p in table.as_slice() {
        out.write_all(&p.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<PrimeTable, CliError> {
    let mut input = BufReader::new(File::open(path)?);
    let bad = |why: &str| CliError::Invalid(format!("prime cache {}: {}", path.display(), why));
    let mut head = [0u8; 16];
    input.read_exact(&mut head).map_err(|_| bad("truncated header"))?;
    if &head[..8] != MAGIC {
        return Err(bad("bad magic"));
    }
    let count = u64::from_le_bytes(head[8..].try_into().expect("8 bytes"));
    let len = std::fs::metadata(path)?.len();
    if len != 16 + 8 * count {
        return Err(bad("length does not match the stored count"));
    }
    let mut bytes = vec![0u8; 8 * count as usize];
    input.read_exact(&mut bytes)?;
    let primes: Vec<u64> = bytes.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let limit = primes.last().copied().unwrap_or(1);
    PrimeTable::from_parts(primes, limit).map_err(|e| bad(&e.to_string()))
}

/// A table holding at least `count` primes, read from the cache when it is
/// large enough and written back when it had to grow.
pub fn load_primes(path: Option<&Path>, count: usize) -> Result<PrimeTable, CliError> {
    let mut table = match path {
        Some(p) if p.exists() => read_cache(p)?,
        _ => PrimeTable::new(),
    };
    if table.len() < count {
        table.ensure_count(count);
        save_if_grown(path, &table, 0)?;
    }
    Ok(table)
}

/// Rewrite the cache when `table` holds more than `previous` primes.
pub fn save_if_grown(path: Option<&Path>, table: &PrimeTable, previous: usize) -> Result<(), CliError> {
    if let Some(p) = path {
        if table.len() > previous {
            write_cache(p, table)?;
        }
    }
    Ok(())
}
