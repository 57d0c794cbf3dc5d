//! Append-only JSON-lines store of polynomial results.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CountError;
use crate::diagram::Board;
use crate::qpoly::LaurentPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    /// SHA-256 of the board's coordinate string, hex.
    pub hash: String,
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub board: Board,
    pub poly: LaurentPoly,
}

impl CacheRecord {
    pub fn new(board: Board, r: usize, poly: LaurentPoly) -> Self {
        CacheRecord {
            hash: board_hash(&board),
            m: board.m(),
            n: board.n(),
            r,
            board,
            poly,
        }
    }

    fn is_consistent(&self) -> bool {
        self.hash == board_hash(&self.board) && self.m == self.board.m() && self.n == self.board.n()
    }
}

pub fn board_hash(b: &Board) -> String {
    let digest = Sha256::digest(b.to_coords_spec().as_bytes());
    digest.iter().map(|x| format!("{x:02x}")).collect()
}

/// Outcome of loading a cache file.
#[derive(Clone, Debug, Default)]
pub struct LoadReport {
    pub accepted: Vec<CacheRecord>,
    /// Lines that failed to parse, had a stale hash, or failed the check.
    pub rejected: usize,
}

pub struct PolyCache {
    path: PathBuf,
    writer: File,
}

impl PolyCache {
    /// Opens (creating if needed) the file at `path`. Each stored record is
    /// passed to `verify`; records it rejects are skipped.
    pub fn open(
        path: impl AsRef<Path>,
        mut verify: impl FnMut(&CacheRecord) -> bool,
    ) -> Result<(PolyCache, LoadReport), CountError> {
        let path = path.as_ref().to_path_buf();
        let io = |e: std::io::Error| CountError::Cache(format!("{}: {e}", path.display()));
        let mut report = LoadReport::default();
        if path.exists() {
            let reader = BufReader::new(File::open(&path).map_err(io)?);
            for line in reader.lines() {
                let line = line.map_err(io)?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheRecord>(&line) {
                    Ok(rec) if rec.is_consistent() && verify(&rec) => report.accepted.push(rec),
                    _ => report.rejected += 1,
                }
            }
        }
        let writer = OpenOptions::new().create(true).append(true).open(&path).map_err(io)?;
        Ok((PolyCache { path, writer }, report))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, rec: &CacheRecord) -> Result<(), CountError> {
        let line = serde_json::to_string(rec).map_err(|e| CountError::Cache(e.to_string()))?;
        writeln!(self.writer, "{line}").map_err(|e| CountError::Cache(format!("{}: {e}", self.path.display())))
    }
}
