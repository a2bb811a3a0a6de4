//! Sixteen base blocks over `Z_3^4` whose translates form a simple
//! `2-(81,6,2)` design of 432 blocks.
//!
//! Each row is `{0, x, 2x} ∪ {y, x+y, 2x+y}` written as
//! `0, x, 2x, y, x+y, 2x+y`. The table is checked against a SHA-256 digest
//! before use.

use sha2::{Digest, Sha256};

use crate::design::Block;
use crate::error::{Error, Result};
use crate::geometry::{Geometry, Point};
use crate::orbit::Family;

#[rustfmt::skip]
pub const BASE_BLOCK_TABLE: [[[u8; 4]; 6]; 16] = [
    [[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 2], [0, 1, 0, 0], [0, 1, 0, 1], [0, 1, 0, 2]],
    [[0, 0, 0, 0], [0, 0, 1, 1], [0, 0, 2, 2], [2, 1, 0, 0], [2, 1, 1, 1], [2, 1, 2, 2]],
    [[0, 0, 0, 0], [0, 1, 1, 1], [0, 2, 2, 2], [0, 0, 1, 0], [0, 1, 2, 1], [0, 2, 0, 2]],
    [[0, 0, 0, 0], [0, 1, 2, 0], [0, 2, 1, 0], [2, 0, 2, 1], [2, 1, 1, 1], [2, 2, 0, 1]],
    [[0, 0, 0, 0], [1, 0, 0, 0], [2, 0, 0, 0], [0, 2, 2, 1], [1, 2, 2, 1], [2, 2, 2, 1]],
    [[0, 0, 0, 0], [1, 0, 1, 0], [2, 0, 2, 0], [0, 1, 0, 0], [1, 1, 1, 0], [2, 1, 2, 0]],
    [[0, 0, 0, 0], [1, 0, 1, 1], [2, 0, 2, 2], [0, 0, 2, 0], [1, 0, 0, 1], [2, 0, 1, 2]],
    [[0, 0, 0, 0], [1, 0, 2, 0], [2, 0, 1, 0], [0, 2, 1, 1], [1, 2, 0, 1], [2, 2, 2, 1]],
    [[0, 0, 0, 0], [1, 0, 2, 2], [2, 0, 1, 1], [0, 1, 2, 1], [1, 1, 1, 0], [2, 1, 0, 2]],
    [[0, 0, 0, 0], [1, 1, 0, 0], [2, 2, 0, 0], [0, 2, 0, 1], [1, 0, 0, 1], [2, 1, 0, 1]],
    [[0, 0, 0, 0], [1, 1, 0, 1], [2, 2, 0, 2], [0, 2, 2, 0], [1, 0, 2, 1], [2, 1, 2, 2]],
    [[0, 0, 0, 0], [1, 1, 2, 0], [2, 2, 1, 0], [0, 0, 2, 1], [1, 1, 1, 1], [2, 2, 0, 1]],
    [[0, 0, 0, 0], [1, 1, 2, 1], [2, 2, 1, 2], [0, 2, 1, 1], [1, 0, 0, 2], [2, 1, 2, 0]],
    [[0, 0, 0, 0], [1, 1, 2, 2], [2, 2, 1, 1], [0, 2, 2, 0], [1, 0, 1, 2], [2, 1, 0, 1]],
    [[0, 0, 0, 0], [1, 2, 1, 2], [2, 1, 2, 1], [0, 0, 2, 1], [1, 2, 0, 0], [2, 1, 1, 2]],
    [[0, 0, 0, 0], [1, 2, 2, 0], [2, 1, 1, 0], [0, 2, 2, 1], [1, 1, 1, 1], [2, 0, 0, 1]],
];

/// SHA-256 of the table flattened row by row, one byte per digit.
pub const TABLE_SHA256: &str = "6a96df541eba7529b5507a46a1f90c407aaf53e1a7689395e15db5e635090d10";

fn digest(table: &[[[u8; 4]; 6]; 16]) -> String {
    let flat: Vec<u8> = table.iter().flatten().flatten().copied().collect();
    hex::encode(Sha256::digest(&flat))
}

pub fn verify_table() -> Result<()> {
    let got = digest(&BASE_BLOCK_TABLE);
    if got == TABLE_SHA256 {
        Ok(())
    } else {
        Err(Error::CorruptEmbeddedData { got })
    }
}

fn point(g: &Geometry, digits: &[u8; 4]) -> Point {
    g.encode(&digits.map(u32::from))
        .expect("table digits are in [0,3)")
}

/// The sixteen blocks in table order.
pub fn base_blocks() -> Result<Vec<Block>> {
    verify_table()?;
    let g = Geometry::z3_4();
    BASE_BLOCK_TABLE
        .iter()
        .map(|row| Block::new(row.iter().map(|d| point(&g, d)).collect()))
        .collect()
}

/// `(x, y)` for each row, read from its second and fourth entries.
pub fn generators() -> Result<Vec<(Point, Point)>> {
    verify_table()?;
    let g = Geometry::z3_4();
    Ok(BASE_BLOCK_TABLE
        .iter()
        .map(|row| (point(&g, &row[1]), point(&g, &row[3])))
        .collect())
}

pub fn family() -> Result<Family> {
    Family::from_blocks(Geometry::z3_4(), &base_blocks()?)
}
