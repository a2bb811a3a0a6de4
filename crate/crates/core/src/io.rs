//! JSON design and family files.
//!
//! Both formats carry the geometry header (`p`, `n`) and list points as digit
//! tuples. Writers sort blocks and points by index and emit one block per line,
//! so output is byte-reproducible and a read/write cycle is the identity.
//!
//! ```json
//! {
//!   "p": 3,
//!   "n": 4,
//!   "v": 81,
//!   "k": 6,
//!   "lambda": 2,
//!   "blocks": [
//!     [[0,0,0,0],[0,0,0,1],[0,0,0,2],[0,1,0,0],[0,1,0,1],[0,1,0,2]],
//!     ...
//!   ]
//! }
//! ```

use std::fmt::Write as _;

use serde::Deserialize;

use crate::design::{Block, Design, ParameterSet};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::orbit::{Family, OrbitRep};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignFile {
    p: u32,
    n: u32,
    v: u32,
    k: u32,
    lambda: u32,
    blocks: Vec<Vec<Vec<u32>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    p: u32,
    n: u32,
    k: u32,
    reps: Vec<Vec<Vec<u32>>>,
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn header_geometry(p: u32, n: u32) -> Result<Geometry> {
    Geometry::new(p, n).map_err(|e| Error::Validation(format!("header: {e}")))
}

fn read_blocks(g: &Geometry, k: u32, raw: &[Vec<Vec<u32>>], what: &str) -> Result<Vec<Block>> {
    raw.iter()
        .enumerate()
        .map(|(i, pts)| {
            if pts.len() != k as usize {
                return Err(Error::Validation(format!(
                    "{what} {i}: has {} points, header says k = {k}",
                    pts.len()
                )));
            }
            let points = pts
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    g.encode(c)
                        .map_err(|e| Error::Validation(format!("{what} {i}, point {j}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Block::new(points).map_err(|e| Error::Validation(format!("{what} {i}: {e}")))
        })
        .collect()
}

pub fn read_design(text: &str) -> Result<Design> {
    let f: DesignFile = parse(text)?;
    let g = header_geometry(f.p, f.n)?;
    if f.v != g.size() {
        return Err(Error::Validation(format!(
            "header: v = {} but p^n = {}",
            f.v,
            g.size()
        )));
    }
    let params = ParameterSet::new(f.v, f.k, f.lambda, 2)
        .map_err(|e| Error::Validation(format!("header: {e}")))?;
    let blocks = read_blocks(&g, f.k, &f.blocks, "block")?;
    Design::new(params, Some(g), blocks)
}

fn write_block(out: &mut String, g: &Geometry, b: &Block) {
    out.push('[');
    for (j, &a) in b.points().iter().enumerate() {
        if j > 0 {
            out.push(',');
        }
        out.push('[');
        for (i, c) in g.decode(a).iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{c}").unwrap();
        }
        out.push(']');
    }
    out.push(']');
}

fn write_block_list(out: &mut String, key: &str, g: &Geometry, blocks: &[Block]) {
    write!(out, "  \"{key}\": [").unwrap();
    for (i, b) in blocks.iter().enumerate() {
        out.push_str(if i == 0 { "\n    " } else { ",\n    " });
        write_block(out, g, b);
    }
    out.push_str(if blocks.is_empty() { "]\n" } else { "\n  ]\n" });
}

pub fn write_design(design: &Design) -> Result<String> {
    let g = design.geometry().ok_or(Error::MissingGeometry)?;
    let p = design.params();
    let mut out = String::new();
    writeln!(out, "{{\n  \"p\": {},\n  \"n\": {},", g.p(), g.n()).unwrap();
    writeln!(
        out,
        "  \"v\": {},\n  \"k\": {},\n  \"lambda\": {},",
        p.v, p.k, p.lambda
    )
    .unwrap();
    write_block_list(&mut out, "blocks", g, &design.sorted_blocks());
    out.push_str("}\n");
    Ok(out)
}

pub fn read_family(text: &str) -> Result<Family> {
    let f: FamilyFile = parse(text)?;
    let g = header_geometry(f.p, f.n)?;
    let blocks = read_blocks(&g, f.k, &f.reps, "rep")?;
    let reps = blocks
        .iter()
        .map(|b| OrbitRep::new(&g, b))
        .collect::<Result<Vec<_>>>()?;
    Family::new(g, reps)
}

pub fn write_family(family: &Family) -> String {
    let g = family.geometry();
    let mut out = String::new();
    writeln!(
        out,
        "{{\n  \"p\": {},\n  \"n\": {},\n  \"k\": {},",
        g.p(),
        g.n(),
        family.k()
    )
    .unwrap();
    let reps: Vec<Block> = family.reps().iter().map(|r| r.block().clone()).collect();
    write_block_list(&mut out, "reps", g, &reps);
    out.push_str("}\n");
    out
}
