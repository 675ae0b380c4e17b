//! Browser front end: relax a perturbed sandpile on a preset polygon, fit
//! its tropical curve, and draw the corner locus of a typed polynomial.
//!
//! The plain functions below hold all the logic and run natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use wasm_bindgen::prelude::*;

use tropical_sandpile::analysis::{analyze_scale, ScaleArtifacts, SweepOptions};
use tropical_sandpile::lattice::{LatticePolygon, PerturbationConfig, PlanePoint};
use tropical_sandpile::rational::{parse_rational, rational_from_f64, Rational};
use tropical_sandpile::tropical::{corner_locus, TropicalPolynomial};

/// Marks lattice points of the bounding box that are not sites.
pub const OUTSIDE: u8 = 255;

/// Largest scale the page accepts.
pub const MAX_SCALE: i64 = 400;

pub struct Preset {
    pub name: &'static str,
    pub polygon: &'static [(i64, i64)],
    pub points: &'static [(&'static str, &'static str)],
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "square", polygon: &[(0, 0), (1, 0), (1, 1), (0, 1)], points: &[("1/2", "1/2")] },
    Preset { name: "square-off-centre", polygon: &[(0, 0), (1, 0), (1, 1), (0, 1)], points: &[("3/20", "9/20")] },
    Preset { name: "tilted-square", polygon: &[(0, 0), (2, 1), (1, 3), (-1, 2)], points: &[("1/2", "3/2")] },
    Preset { name: "triangle", polygon: &[(0, 0), (3, 0), (0, 3)], points: &[("3/4", "1/2"), ("1/2", "3/2")] },
];

/// A relaxed and analysed sandpile; `heights` covers the bounding box row
/// by row from the top.
pub struct Scene {
    pub scale: i64,
    pub cols: usize,
    pub rows: usize,
    pub x0: i64,
    pub y1: i64,
    pub heights: Vec<u8>,
    pub artifacts: ScaleArtifacts,
}

/// Fitted curve, segments as `[x1, y1, x2, y2]` in polygon coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedCurve {
    pub segments: Vec<[f64; 4]>,
    pub weights: Vec<u64>,
    pub polynomial: String,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Relaxes `3 + δ` on a preset and runs the curve fit. `point`, when given, replaces the preset's
/// perturbation points by one point in polygon coordinates.
pub fn build_scene(preset: &str, scale: i64, point: Option<(f64, f64)>) -> Result<Scene, String> {
    let p = PRESETS.iter().find(|p| p.name == preset).ok_or_else(|| format!("unknown preset {preset:?}"))?;
    if !(1..=MAX_SCALE).contains(&scale) {
        return Err(format!("scale must lie in 1..={MAX_SCALE}"));
    }
    let polygon = LatticePolygon::from_coords(p.polygon).map_err(|e| e.to_string())?;
    let points = match point {
        Some((x, y)) => {
            let conv = |v: f64| rational_from_f64(v).map_err(|e| e.to_string());
            vec![PlanePoint::new(conv(x)?, conv(y)?)]
        }
        None => p.points.iter().map(|(x, y)| Ok(PlanePoint::new(rational(x)?, rational(y)?))).collect::<Result<_, String>>()?,
    };
    let config = PerturbationConfig::new(points, &polygon).map_err(|e| e.to_string())?;
    let artifacts = analyze_scale(&polygon, &config, scale, &SweepOptions::default()).map_err(|e| e.to_string())?;
    let (lo, hi) = polygon.bounding_box();
    let (x0, x1, y0, y1) = (lo.x * scale, hi.x * scale, lo.y * scale, hi.y * scale);
    let (cols, rows) = ((x1 - x0 + 1) as usize, (y1 - y0 + 1) as usize);
    let mut heights = vec![OUTSIDE; cols * rows];
    let fin = &artifacts.result.final_state;
    for (v, &h) in fin.domain().sites().zip(fin.heights()) {
        heights[(y1 - v.y) as usize * cols + (v.x - x0) as usize] = h.min(254) as u8;
    }
    Ok(Scene { scale, cols, rows, x0, y1, heights, artifacts })
}

/// The fitted tropical curve of a scene.
pub fn fit_scene(scene: &Scene) -> Result<FittedCurve, String> {
    let art = &scene.artifacts;
    if let Some(e) = &art.error {
        return Err(e.to_string());
    }
    let curve = art.curve.as_ref().ok_or("no curve")?;
    let g = &curve.graph;
    let segments = (0..g.edges.len())
        .map(|i| {
            let (a, b) = g.edge_segment_f64(i, 1.0);
            [a.0, a.1, b.0, b.1]
        })
        .collect();
    let mut weights: Vec<u64> = g.edges.iter().map(|e| e.weight).collect();
    for w in &art.weights {
        weights[w.edge] = w.rounded;
    }
    let polynomial = art.polynomial.as_ref().map(|p| p.to_json()).unwrap_or_default();
    Ok(FittedCurve { segments, weights, polynomial })
}

/// Corner locus of a polynomial given as `"k l : a"` terms separated by
/// `;` or newlines, e.g. `"0 0 : 0; 1 0 : 1; 0 1 : 1/2"`. Rays are cut at
/// distance `reach` from their vertex.
pub fn locus_segments(text: &str, reach: f64) -> Result<(Vec<[f64; 4]>, Vec<u64>), String> {
    let mut terms = Vec::new();
    for part in text.split([';', '\n']).map(str::trim).filter(|t| !t.is_empty()) {
        let (k, a) = part.split_once(':').ok_or_else(|| format!("expected \"k l : a\" in {part:?}"))?;
        let ks: Vec<i64> = k
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| format!("bad exponent {t:?}")))
            .collect::<Result<_, String>>()?;
        let [kx, ky] = ks[..] else { return Err(format!("need two exponents in {part:?}")) };
        terms.push(((kx, ky), rational(a)?));
    }
    let poly = TropicalPolynomial::from_terms(&terms).map_err(|e| e.to_string())?;
    let curve = corner_locus(&poly).map_err(|e| e.to_string())?;
    let segs = (0..curve.edges.len())
        .map(|i| {
            let (a, b) = curve.edge_segment_f64(i, reach);
            [a.0, a.1, b.0, b.1]
        })
        .collect();
    Ok((segs, curve.edges.iter().map(|e| e.weight).collect()))
}

#[wasm_bindgen]
pub struct Demo {
    scene: Scene,
    curve: Option<FittedCurve>,
}

#[wasm_bindgen]
impl Demo {
    /// Pass `NaN` coordinates to keep the preset's points.
    #[wasm_bindgen(constructor)]
    pub fn new(preset: &str, scale: u32, px: f64, py: f64) -> Result<Demo, JsError> {
        let point = (px.is_finite() && py.is_finite()).then_some((px, py));
        let scene = build_scene(preset, scale as i64, point).map_err(|e| JsError::new(&e))?;
        Ok(Demo { scene, curve: None })
    }

    pub fn cols(&self) -> usize {
        self.scene.cols
    }

    pub fn rows(&self) -> usize {
        self.scene.rows
    }

    pub fn scale(&self) -> u32 {
        self.scene.scale as u32
    }

    /// Lattice coordinates of the top-left cell.
    pub fn origin(&self) -> Vec<i32> {
        vec![self.scene.x0 as i32, self.scene.y1 as i32]
    }

    /// Heights row by row from the top; 255 marks non-sites.
    pub fn heights(&self) -> Vec<u8> {
        self.scene.heights.clone()
    }

    pub fn topplings(&self) -> f64 {
        self.scene.artifacts.result.topplings_total as f64
    }

    /// Fits the curve; returns flattened segments in polygon coordinates.
    pub fn fit(&mut self) -> Result<Vec<f64>, JsError> {
        let c = fit_scene(&self.scene).map_err(|e| JsError::new(&e))?;
        let flat = c.segments.iter().flatten().copied().collect();
        self.curve = Some(c);
        Ok(flat)
    }

    /// Edge weights of the last fit.
    pub fn weights(&self) -> Vec<u32> {
        self.curve.as_ref().map_or_else(Vec::new, |c| c.weights.iter().map(|&w| w as u32).collect())
    }

    pub fn polynomial(&self) -> String {
        self.curve.as_ref().map_or_else(String::new, |c| c.polynomial.clone())
    }
}

/// Flattened `[x1, y1, x2, y2, weight, ...]` for the corner locus of a
/// typed polynomial.
#[wasm_bindgen]
pub fn polynomial_locus(text: &str, reach: f64) -> Result<Vec<f64>, JsError> {
    let (segs, weights) = locus_segments(text, reach).map_err(|e| JsError::new(&e))?;
    Ok(segs.iter().zip(weights).flat_map(|(s, w)| [s[0], s[1], s[2], s[3], w as f64]).collect())
}

#[wasm_bindgen]
pub fn preset_names() -> Vec<String> {
    PRESETS.iter().map(|p| p.name.to_string()).collect()
}
