//! Figure-style pictures of height grids.
//!
//! Legend: height 3 is plain background, 2 a dark square, 1 an open
//! circle, 0 a cross and anything unstable a filled disc. The picture covers
//! the bounding box of `NΩ` plus a margin, one cell per lattice point.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::grid_io::{Grid, GridKind};
use crate::tropical::TropicalCurve;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("expected a height grid, got an odometer grid")]
    NotHeights,
    #[error("unknown palette {0:?} (expected mono or deficit)")]
    UnknownPalette(String),
    #[error("overlay has {labels} labels for {edges} edges")]
    LabelCount { labels: usize, edges: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Palette {
    #[default]
    Mono,
    /// Colors marks by deficit `3 - φ`.
    Deficit,
}

impl FromStr for Palette {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mono" => Ok(Palette::Mono),
            "deficit" => Ok(Palette::Deficit),
            _ => Err(RenderError::UnknownPalette(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    /// Cell size in pixels.
    pub cell: u32,
    /// Margin in cells on every side.
    pub margin: u32,
    pub palette: Palette,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { cell: 6, margin: 2, palette: Palette::Mono }
    }
}

/// A curve drawn over the grid, in unscaled polygon coordinates, with one
/// label per edge. Labels of at least 2 are printed next to their edge.
#[derive(Debug, Clone, Copy)]
pub struct Overlay<'a> {
    pub curve: &'a TropicalCurve,
    pub labels: &'a [u64],
}

type Rgb = [u8; 3];

const WHITE: Rgb = [255, 255, 255];
const OUTSIDE: Rgb = [232, 232, 232];
const BLACK: Rgb = [0, 0, 0];
const CURVE: Rgb = [200, 30, 30];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mark {
    Square,
    Circle,
    Cross,
    Disc,
}

fn mark(h: u64) -> Option<Mark> {
    match h {
        3 => None,
        2 => Some(Mark::Square),
        1 => Some(Mark::Circle),
        0 => Some(Mark::Cross),
        _ => Some(Mark::Disc),
    }
}

fn class(h: u64) -> &'static str {
    match h {
        0 => "h0",
        1 => "h1",
        2 => "h2",
        _ => "hover",
    }
}

fn color(h: u64, palette: Palette) -> Rgb {
    match palette {
        Palette::Mono => BLACK,
        Palette::Deficit => match h {
            0 => [20, 130, 40],
            1 => [220, 120, 0],
            2 => [30, 70, 200],
            _ => [160, 0, 160],
        },
    }
}

fn hex(c: Rgb) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Cell geometry shared by both back ends.
struct Frame {
    x0: i64,
    y1: i64,
    cols: u32,
    rows: u32,
    opts: RenderOptions,
    scale: f64,
}

impl Frame {
    fn new(grid: &Grid, opts: RenderOptions) -> Self {
        let d = &grid.domain;
        let (lo, hi) = d.polygon().bounding_box();
        let n = d.scale();
        let cols = ((hi.x - lo.x) * n + 1) as u32 + 2 * opts.margin;
        let rows = ((hi.y - lo.y) * n + 1) as u32 + 2 * opts.margin;
        Self { x0: lo.x * n, y1: hi.y * n, cols, rows, opts, scale: n as f64 }
    }

    fn size(&self) -> (u32, u32) {
        (self.cols * self.opts.cell, self.rows * self.opts.cell)
    }

    /// Top-left pixel of the cell of lattice point `(x, y)`.
    fn cell_origin(&self, x: i64, y: i64) -> (u32, u32) {
        let c = (x - self.x0) as u32 + self.opts.margin;
        let r = (self.y1 - y) as u32 + self.opts.margin;
        (c * self.opts.cell, r * self.opts.cell)
    }

    /// Pixel position of a point given in polygon coordinates.
    fn project(&self, p: (f64, f64)) -> (f64, f64) {
        let cell = self.opts.cell as f64;
        let m = self.opts.margin as f64;
        ((p.0 * self.scale - self.x0 as f64 + m + 0.5) * cell, (self.y1 as f64 - p.1 * self.scale + m + 0.5) * cell)
    }
}

/// Pixel dimensions of the picture of `grid`.
pub fn image_size(grid: &Grid, opts: &RenderOptions) -> (u32, u32) {
    Frame::new(grid, *opts).size()
}

fn check(grid: &Grid, overlay: Option<&Overlay<'_>>) -> Result<(), RenderError> {
    if grid.kind != GridKind::Heights {
        return Err(RenderError::NotHeights);
    }
    if let Some(o) = overlay {
        if o.labels.len() != o.curve.edges.len() {
            return Err(RenderError::LabelCount { labels: o.labels.len(), edges: o.curve.edges.len() });
        }
    }
    Ok(())
}

fn overlay_segments(o: &Overlay<'_>) -> Vec<((f64, f64), (f64, f64))> {
    (0..o.curve.edges.len()).map(|i| o.curve.edge_segment_f64(i, 1.0)).collect()
}

/// Vector picture with one element per site of height other than 3.
pub fn render_svg(grid: &Grid, opts: &RenderOptions, overlay: Option<&Overlay<'_>>) -> Result<String, RenderError> {
    check(grid, overlay)?;
    let f = Frame::new(grid, *opts);
    let (w, h) = f.size();
    let cell = opts.cell as f64;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect class="outside" x="0" y="0" width="{w}" height="{h}" fill="{}"/>"#, hex(OUTSIDE));
    let corners: Vec<String> = grid
        .domain
        .polygon()
        .vertices()
        .iter()
        .map(|v| {
            let (x, y) = f.project((v.x as f64, v.y as f64));
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(s, r#"<polygon class="domain" points="{}" fill="{}" stroke="none"/>"#, corners.join(" "), hex(WHITE));
    for (v, &val) in grid.domain.sites().zip(&grid.values) {
        let Some(m) = mark(val) else { continue };
        let (px, py) = f.cell_origin(v.x, v.y);
        let (cx, cy) = (px as f64 + cell / 2.0, py as f64 + cell / 2.0);
        let c = hex(color(val, opts.palette));
        let cls = class(val);
        let r = cell * 0.4;
        let _ = match m {
            Mark::Square => writeln!(
                s,
                r#"<rect class="{cls}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{c}"/>"#,
                cx - r,
                cy - r,
                2.0 * r,
                2.0 * r
            ),
            Mark::Circle => writeln!(
                s,
                r#"<circle class="{cls}" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="{c}" stroke-width="{:.2}"/>"#,
                r * 0.85,
                cell * 0.12
            ),
            Mark::Cross => writeln!(
                s,
                r#"<path class="{cls}" d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}" stroke="{c}" stroke-width="{:.2}"/>"#,
                cx - r,
                cy - r,
                cx + r,
                cy + r,
                cx - r,
                cy + r,
                cx + r,
                cy - r,
                cell * 0.12
            ),
            Mark::Disc => writeln!(s, r#"<circle class="{cls}" cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{c}"/>"#),
        };
    }
    if let Some(o) = overlay {
        let font = (cell * 4.0).max(10.0);
        for (i, (a, b)) in overlay_segments(o).into_iter().enumerate() {
            let (a, b) = (f.project(a), f.project(b));
            let _ = writeln!(
                s,
                r#"<line class="edge" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="{:.2}"/>"#,
                a.0,
                a.1,
                b.0,
                b.1,
                hex(CURVE),
                (cell * 0.3).max(1.0)
            );
            if o.labels[i] >= 2 {
                // offset the label perpendicular to the edge
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let len = (dx * dx + dy * dy).sqrt().max(1e-9);
                let (mx, my) = ((a.0 + b.0) / 2.0 - dy / len * font * 0.6, (a.1 + b.1) / 2.0 + dx / len * font * 0.6);
                let _ = writeln!(
                    s,
                    r#"<text class="weight" x="{mx:.2}" y="{my:.2}" font-size="{font:.1}" text-anchor="middle" dominant-baseline="middle" fill="{}">{}</text>"#,
                    hex(CURVE),
                    o.labels[i]
                );
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

struct Raster {
    w: u32,
    h: u32,
    px: Vec<u8>,
}

impl Raster {
    fn put(&mut self, x: i64, y: i64, c: Rgb) {
        if x >= 0 && y >= 0 && (x as u32) < self.w && (y as u32) < self.h {
            let i = 3 * (y as usize * self.w as usize + x as usize);
            self.px[i..i + 3].copy_from_slice(&c);
        }
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), c: Rgb, thick: i64) {
        let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as i64).max(1);
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let (x, y) = ((a.0 + t * (b.0 - a.0)) as i64, (a.1 + t * (b.1 - a.1)) as i64);
            for dx in -thick..=thick {
                for dy in -thick..=thick {
                    self.put(x + dx, y + dy, c);
                }
            }
        }
    }
}

/// Binary portable pixmap (P6). Labels are left to the vector output.
pub fn render_ppm(grid: &Grid, opts: &RenderOptions, overlay: Option<&Overlay<'_>>) -> Result<Vec<u8>, RenderError> {
    check(grid, overlay)?;
    let f = Frame::new(grid, *opts);
    let (w, h) = f.size();
    let mut r = Raster { w, h, px: OUTSIDE.repeat((w * h) as usize) };
    let cell = opts.cell as i64;
    for (v, &val) in grid.domain.sites().zip(&grid.values) {
        let (ox, oy) = f.cell_origin(v.x, v.y);
        let (ox, oy) = (ox as i64, oy as i64);
        let c = color(val, opts.palette);
        let mk = mark(val);
        // distances measured from the cell centre in doubled pixel units
        let rad2 = (cell * 4 / 5).pow(2);
        for dy in 0..cell {
            for dx in 0..cell {
                let (ux, uy) = (2 * dx + 1 - cell, 2 * dy + 1 - cell);
                let d2 = ux * ux + uy * uy;
                let inner = ux.abs() <= cell * 4 / 5 && uy.abs() <= cell * 4 / 5;
                let ink = match mk {
                    None => false,
                    Some(Mark::Square) => inner,
                    Some(Mark::Disc) => d2 <= rad2,
                    Some(Mark::Circle) => d2 <= rad2 && d2 >= (cell * 2 / 5).pow(2),
                    Some(Mark::Cross) => inner && (ux == uy || ux == -uy || (ux - uy).abs() <= 1 || (ux + uy).abs() <= 1),
                };
                r.put(ox + dx, oy + dy, if ink { c } else { WHITE });
            }
        }
    }
    if let Some(o) = overlay {
        for (a, b) in overlay_segments(o) {
            r.line(f.project(a), f.project(b), CURVE, (cell / 4).max(1));
        }
    }
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.extend_from_slice(&r.px);
    Ok(out)
}
