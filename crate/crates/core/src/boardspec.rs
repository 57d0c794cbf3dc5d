//! Text form of boards used by the CLI and by files:
//!
//! ```text
//! coords:m,n:(i,j);(i,j);...
//! lambda:n:4,3,2
//! skew:n:5,5,4,3,1/2,2,1
//! rothe:41523
//! hull:35142
//! ```
//!
//! Any form may end in `:complement`. Whitespace is ignored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Board, DiagramError, ShapeSpec};
use crate::perms::{PermError, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("cannot parse board spec {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecKind {
    Coords {
        m: usize,
        n: usize,
        cells: Vec<(usize, usize)>,
    },
    Lambda {
        n: usize,
        shape: ShapeSpec,
    },
    Skew {
        n: usize,
        shape: ShapeSpec,
    },
    Rothe(Permutation),
    Hull(Permutation),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoardSpec {
    pub kind: SpecKind,
    pub complement: bool,
}

impl BoardSpec {
    pub fn build(&self) -> Result<Board, SpecError> {
        let b = match &self.kind {
            SpecKind::Coords { m, n, cells } => Board::from_cells(*m, *n, cells.iter().copied())?,
            SpecKind::Lambda { n, shape } | SpecKind::Skew { n, shape } => shape.board(*n, *n)?,
            SpecKind::Rothe(w) => w.rothe(),
            SpecKind::Hull(w) => w.left_hull(),
        };
        Ok(if self.complement { b.complement() } else { b })
    }

    /// Explicit-coordinates spec for an arbitrary board.
    pub fn from_board(b: &Board) -> BoardSpec {
        BoardSpec {
            kind: SpecKind::Coords {
                m: b.m(),
                n: b.n(),
                cells: b.cells().collect(),
            },
            complement: false,
        }
    }
}

/// Parses and builds in one step.
pub fn parse_board(s: &str) -> Result<Board, SpecError> {
    s.parse::<BoardSpec>()?.build()
}

fn parse_list(s: &str) -> Option<Vec<usize>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|t| t.parse().ok()).collect()
}

fn parse_cells(s: &str) -> Option<Vec<(usize, usize)>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(';')
        .map(|c| {
            let inner = c.strip_prefix('(')?.strip_suffix(')')?;
            let (i, j) = inner.split_once(',')?;
            Some((i.parse().ok()?, j.parse().ok()?))
        })
        .collect()
}

impl FromStr for BoardSpec {
    type Err = SpecError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |reason: &str| SpecError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let (body, complement) = match s.strip_suffix(":complement") {
            Some(rest) => (rest, true),
            None => (s.as_str(), false),
        };
        let (tag, rest) = body
            .split_once(':')
            .ok_or_else(|| err("missing ':' after the form name"))?;
        let kind = match tag {
            "coords" => {
                let (dims, cells) = rest.split_once(':').ok_or_else(|| err("expected coords:m,n:cells"))?;
                let dims = parse_list(dims)
                    .filter(|d| d.len() == 2)
                    .ok_or_else(|| err("bad dimensions"))?;
                let cells = parse_cells(cells).ok_or_else(|| err("bad cell list"))?;
                SpecKind::Coords {
                    m: dims[0],
                    n: dims[1],
                    cells,
                }
            }
            "lambda" => {
                let (n, parts) = rest.split_once(':').ok_or_else(|| err("expected lambda:n:parts"))?;
                let n = n.parse().map_err(|_| err("bad size"))?;
                let parts = parse_list(parts).ok_or_else(|| err("bad partition"))?;
                SpecKind::Lambda {
                    n,
                    shape: ShapeSpec::straight(parts)?,
                }
            }
            "skew" => {
                let (n, parts) = rest.split_once(':').ok_or_else(|| err("expected skew:n:outer/inner"))?;
                let n = n.parse().map_err(|_| err("bad size"))?;
                let (outer, inner) = parts.split_once('/').ok_or_else(|| err("expected outer/inner"))?;
                let outer = parse_list(outer).ok_or_else(|| err("bad outer partition"))?;
                let inner = parse_list(inner).ok_or_else(|| err("bad inner partition"))?;
                SpecKind::Skew {
                    n,
                    shape: ShapeSpec::new(outer, inner)?,
                }
            }
            "rothe" => SpecKind::Rothe(rest.parse()?),
            "hull" => SpecKind::Hull(rest.parse()?),
            _ => return Err(err("unknown form")),
        };
        Ok(BoardSpec { kind, complement })
    }
}

impl fmt::Display for BoardSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match &self.kind {
            SpecKind::Coords { m, n, cells } => {
                let cells: Vec<String> = cells.iter().map(|(i, j)| format!("({i},{j})")).collect();
                write!(f, "coords:{m},{n}:{}", cells.join(";"))?;
            }
            SpecKind::Lambda { n, shape } => write!(f, "lambda:{n}:{}", join(shape.lambda()))?,
            SpecKind::Skew { n, shape } => write!(f, "skew:{n}:{}/{}", join(shape.lambda()), join(shape.mu()))?,
            SpecKind::Rothe(w) => write!(f, "rothe:{w}")?,
            SpecKind::Hull(w) => write!(f, "hull:{w}")?,
        }
        if self.complement {
            write!(f, ":complement")?;
        }
        Ok(())
    }
}
