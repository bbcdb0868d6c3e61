//! Portable graymap I/O, P2 (ASCII) and P5 (binary), maxval 255 only.

use super::SensorGrid;
use crate::{Error, Result};

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedPgm(msg.into())
}

/// Reads header tokens, skipping whitespace and `#` comments.
struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Tokens { bytes, pos: 0 }
    }

    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<&'a str> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(malformed("unexpected end of header"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .map_err(|_| malformed("non-ASCII header token"))
    }

    fn next_number(&mut self) -> Result<usize> {
        let token = self.next()?;
        token
            .parse()
            .map_err(|_| malformed(format!("bad numeric token {token:?}")))
    }
}

pub fn load_pgm(bytes: &[u8]) -> Result<SensorGrid> {
    let mut tokens = Tokens::new(bytes);
    let magic = tokens.next()?;
    if magic != "P2" && magic != "P5" {
        return Err(malformed(format!("bad magic {magic:?}")));
    }
    let width = tokens.next_number()?;
    let height = tokens.next_number()?;
    let maxval = tokens.next_number()?;
    if width == 0 || height == 0 {
        return Err(malformed("zero dimension"));
    }
    if maxval != 255 {
        return Err(malformed(format!("unsupported maxval {maxval}")));
    }
    let count = width * height;
    let values = if magic == "P5" {
        // exactly one whitespace byte after the maxval, then the raster
        let raster_start = tokens.pos + 1;
        let raster = bytes
            .get(raster_start..raster_start + count)
            .ok_or_else(|| malformed("truncated raster"))?;
        raster.to_vec()
    } else {
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let v = tokens.next_number()?;
            if v > 255 {
                return Err(malformed(format!("sample {v} above maxval")));
            }
            values.push(v as u8);
        }
        values
    };
    Ok(SensorGrid {
        width,
        height,
        values,
    })
}

/// Canonical P5 bytes: `P5\n{w} {h}\n255\n` followed by the raster.
pub fn save_pgm(grid: &SensorGrid) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.width, grid.height).into_bytes();
    out.extend_from_slice(&grid.values);
    out
}
