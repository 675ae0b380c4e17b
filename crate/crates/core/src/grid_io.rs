//! Binary and CSV storage for per-site grids.
//!
//! Binary layout, little-endian throughout:
//!
//! ```text
//! "TSPL" | version u16 | kind u8 | width u8 | N u32
//! vertex count u32 | (x i32, y i32) per vertex
//! row count u32 | (y i32, x_start i32, x_end i32) per row
//! payload: one `width`-byte unsigned value per site, row-major
//! ```

use std::io::{self, BufRead, Read, Write};
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{LatticeError, LatticePoint, LatticePolygon, RowInterval, ScaledDomain};
use crate::sandpile::{EngineError, Odometer, SandState};

pub const MAGIC: &[u8; 4] = b"TSPL";
pub const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("not a grid file (bad magic)")]
    BadMagic,
    #[error("unsupported grid version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown grid kind {0}")]
    BadKind(u8),
    #[error("invalid value width {0}")]
    BadWidth(u8),
    #[error("stored rows disagree with the polygon at scale {0}")]
    RowMismatch(i64),
    #[error("value {value} does not fit the grid kind")]
    ValueRange { value: u64 },
    #[error("trailing bytes after payload")]
    TrailingBytes,
    #[error("csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Heights = 0,
    Odometer = 1,
}

/// Per-site values over a domain, in the domain's site order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub domain: Arc<ScaledDomain>,
    pub kind: GridKind,
    pub values: Vec<u64>,
}

impl Grid {
    pub fn from_state(s: &SandState) -> Self {
        Self {
            domain: s.domain().clone(),
            kind: GridKind::Heights,
            values: s.heights().iter().map(|&h| h as u64).collect(),
        }
    }

    pub fn from_odometer(o: &Odometer) -> Self {
        Self { domain: o.domain().clone(), kind: GridKind::Odometer, values: o.counts().to_vec() }
    }

    pub fn to_state(&self) -> Result<SandState, GridError> {
        let h = self
            .values
            .iter()
            .map(|&v| u32::try_from(v).map_err(|_| GridError::ValueRange { value: v }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SandState::new(self.domain.clone(), h)?)
    }

    pub fn to_odometer(&self) -> Result<Odometer, GridError> {
        Ok(Odometer::new(self.domain.clone(), self.values.clone())?)
    }

    /// Smallest of 1, 2, 4, 8 bytes holding every value.
    pub fn width(&self) -> u8 {
        match self.values.iter().copied().max().unwrap_or(0) {
            m if m <= u8::MAX as u64 => 1,
            m if m <= u16::MAX as u64 => 2,
            m if m <= u32::MAX as u64 => 4,
            _ => 8,
        }
    }

    pub fn histogram(&self) -> std::collections::BTreeMap<u64, usize> {
        let mut h = std::collections::BTreeMap::new();
        for &v in &self.values {
            *h.entry(v).or_insert(0) += 1;
        }
        h
    }
}

fn coord(v: i64) -> io::Result<[u8; 4]> {
    i32::try_from(v)
        .map(i32::to_le_bytes)
        .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "coordinate exceeds 32 bits"))
}

pub fn write_binary<W: Write>(grid: &Grid, mut w: W) -> Result<(), GridError> {
    let d = &grid.domain;
    let width = grid.width();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[grid.kind as u8, width])?;
    w.write_all(&(d.scale() as u32).to_le_bytes())?;
    let verts = d.polygon().vertices();
    w.write_all(&(verts.len() as u32).to_le_bytes())?;
    for v in verts {
        w.write_all(&coord(v.x)?)?;
        w.write_all(&coord(v.y)?)?;
    }
    w.write_all(&(d.rows().len() as u32).to_le_bytes())?;
    for r in d.rows() {
        w.write_all(&coord(r.y)?)?;
        w.write_all(&coord(r.x_start)?)?;
        w.write_all(&coord(r.x_end)?)?;
    }
    let mut buf = Vec::with_capacity(grid.values.len() * width as usize);
    for &v in &grid.values {
        buf.extend_from_slice(&v.to_le_bytes()[..width as usize]);
    }
    w.write_all(&buf)?;
    Ok(())
}

fn take<const K: usize, R: Read>(r: &mut R) -> io::Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b)?;
    Ok(b)
}

fn read_i32<R: Read>(r: &mut R) -> io::Result<i64> {
    Ok(i32::from_le_bytes(take(r)?) as i64)
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    Ok(u32::from_le_bytes(take(r)?))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Grid, GridError> {
    if &take::<4, _>(&mut r)? != MAGIC {
        return Err(GridError::BadMagic);
    }
    let version = u16::from_le_bytes(take(&mut r)?);
    if version != VERSION {
        return Err(GridError::UnsupportedVersion(version));
    }
    let [kind, width] = take::<2, _>(&mut r)?;
    let kind = match kind {
        0 => GridKind::Heights,
        1 => GridKind::Odometer,
        k => return Err(GridError::BadKind(k)),
    };
    if ![1, 2, 4, 8].contains(&width) {
        return Err(GridError::BadWidth(width));
    }
    let scale = read_u32(&mut r)? as i64;
    let nv = read_u32(&mut r)?;
    let mut verts = Vec::with_capacity(nv.min(1 << 16) as usize);
    for _ in 0..nv {
        verts.push(LatticePoint::new(read_i32(&mut r)?, read_i32(&mut r)?));
    }
    let nr = read_u32(&mut r)?;
    let mut rows = Vec::with_capacity(nr.min(1 << 20) as usize);
    for _ in 0..nr {
        rows.push(RowInterval { y: read_i32(&mut r)?, x_start: read_i32(&mut r)?, x_end: read_i32(&mut r)? });
    }
    let domain = ScaledDomain::new(LatticePolygon::new(verts)?, scale)?;
    if domain.rows() != rows.as_slice() {
        return Err(GridError::RowMismatch(scale));
    }
    let mut payload = vec![0u8; domain.len() * width as usize];
    r.read_exact(&mut payload)?;
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(GridError::TrailingBytes);
    }
    let values = payload
        .chunks_exact(width as usize)
        .map(|c| {
            let mut b = [0u8; 8];
            b[..c.len()].copy_from_slice(c);
            u64::from_le_bytes(b)
        })
        .collect();
    Ok(Grid { domain: Arc::new(domain), kind, values })
}

/// Writes `x,y,value` lines under a header, in site order.
pub fn write_csv<W: Write>(grid: &Grid, mut w: W) -> Result<(), GridError> {
    writeln!(w, "x,y,value")?;
    for (v, val) in grid.domain.sites().zip(&grid.values) {
        writeln!(w, "{},{},{}", v.x, v.y, val)?;
    }
    Ok(())
}

/// Reads `x,y,value` lines for a known domain. Every site must appear
/// exactly once; order is free.
pub fn read_csv<R: BufRead>(domain: Arc<ScaledDomain>, kind: GridKind, r: R) -> Result<Grid, GridError> {
    let mut values = vec![None; domain.len()];
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let t = line.trim();
        if t.is_empty() || (i == 0 && t == "x,y,value") {
            continue;
        }
        let bad = |reason: &str| GridError::Csv { line: line_no, reason: reason.to_string() };
        let f: Vec<&str> = t.split(',').map(str::trim).collect();
        if f.len() != 3 {
            return Err(bad("expected three fields"));
        }
        let x: i64 = f[0].parse().map_err(|_| bad("bad x"))?;
        let y: i64 = f[1].parse().map_err(|_| bad("bad y"))?;
        let v: u64 = f[2].parse().map_err(|_| bad("bad value"))?;
        let idx = domain.index_of(LatticePoint::new(x, y)).ok_or_else(|| bad("not a site"))?;
        if values[idx].replace(v).is_some() {
            return Err(bad("duplicate site"));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| GridError::Csv { line: 0, reason: format!("site {} missing", domain.site(i)) })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Grid { domain, kind, values })
}
