//! File formats: binary PPM, SVG 1.1, CSV, JSON and Graphviz DOT.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rauzy_core::automaton::BoundaryAutomaton;
use rauzy_core::render::{Bounds, CloudMeta, Generator, Lattice, PointCloud, Raster, Tile};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("nothing to draw")]
    Empty,
    #[error("format {0} cannot hold this data")]
    Unsupported(Format),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Ppm,
    Svg,
    Csv,
    Json,
    Dot,
}

impl Format {
    /// Guess from a file extension.
    pub fn from_path(path: &Path) -> Option<Format> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ppm" => Ok(Format::Ppm),
            "svg" => Ok(Format::Svg),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "dot" | "gv" => Ok(Format::Dot),
            other => Err(format!("unknown format `{other}` (ppm, svg, csv, json, dot)")),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Ppm => "ppm",
            Format::Svg => "svg",
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Dot => "dot",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerKind {
    /// Independent points.
    Dots,
    /// Points in order along a closed curve.
    Curve,
}

/// Points drawn in one colour.
#[derive(Clone, Copy, Debug)]
pub struct Layer<'a> {
    pub points: &'a [Complex64],
    pub color: [u8; 3],
    pub kind: LayerKind,
}

const BACKGROUND: [u8; 3] = [255, 255, 255];

/// Colours cycled over tiles; the untranslated tile gets the first.
pub const PALETTE: [[u8; 3]; 8] = [
    [20, 20, 20],
    [214, 39, 40],
    [31, 119, 180],
    [44, 160, 44],
    [255, 127, 14],
    [148, 103, 189],
    [140, 86, 75],
    [23, 190, 207],
];

/// Colour for the tile shifted by `(k1, k2)`, chosen so that lattice
/// neighbours differ.
pub fn tile_color(k1: i64, k2: i64) -> [u8; 3] {
    if k1 == 0 && k2 == 0 {
        return PALETTE[0];
    }
    let i = (k1 + 3 * k2).rem_euclid(7) as usize;
    PALETTE[1 + i]
}

pub fn tile_layers(tiles: &[Tile]) -> Vec<Layer<'_>> {
    tiles
        .iter()
        .map(|t| Layer {
            points: &t.points,
            color: tile_color(t.k1, t.k2),
            kind: LayerKind::Dots,
        })
        .collect()
}

fn layer_bounds(layers: &[Layer<'_>]) -> Option<Bounds> {
    layers
        .iter()
        .filter_map(|l| Bounds::of(l.points))
        .reduce(Bounds::union)
}

/// A raster of at most `size` pixels per side around all layers, with the
/// index of the last layer covering each pixel.
fn paint(layers: &[Layer<'_>], size: usize) -> Result<(Raster, Vec<Option<usize>>), ExportError> {
    let bounds = layer_bounds(layers).ok_or(ExportError::Empty)?;
    let margin = 0.02 * bounds.width().max(bounds.height()).max(1e-9);
    let raster = Raster::fit(bounds.pad(margin), size).map_err(|_| ExportError::Empty)?;
    let mut owner = vec![None; raster.width * raster.height];
    for (li, layer) in layers.iter().enumerate() {
        for &p in layer.points {
            if let Some(i) = raster.index_of(p) {
                owner[i] = Some(li);
            }
        }
    }
    Ok((raster, owner))
}

/// Binary PPM (P6), at most `size` pixels along the longer side.
pub fn write_ppm<W: Write>(layers: &[Layer<'_>], size: usize, mut out: W) -> Result<(), ExportError> {
    let (raster, owner) = paint(layers, size)?;
    write!(out, "P6\n{} {}\n255\n", raster.width, raster.height)?;
    let mut bytes = Vec::with_capacity(owner.len() * 3);
    for cell in owner {
        bytes.extend_from_slice(&cell.map_or(BACKGROUND, |li| layers[li].color));
    }
    out.write_all(&bytes)?;
    Ok(())
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// SVG 1.1: dot layers as filled pixel runs, curves as closed polylines.
pub fn write_svg<W: Write>(layers: &[Layer<'_>], size: usize, mut out: W) -> Result<(), ExportError> {
    let (raster, owner) = paint(layers, size)?;
    let h = raster.pixel_size();
    let (w, ht) = (raster.width, raster.height);
    let mut doc = String::new();
    writeln!(doc, r#"<?xml version="1.0" encoding="UTF-8"?>"#).ok();
    writeln!(
        doc,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{ht}" viewBox="0 0 {w} {ht}">"#
    )
    .ok();
    writeln!(doc, r#"<rect width="{w}" height="{ht}" fill="{}"/>"#, hex(BACKGROUND)).ok();
    for (li, layer) in layers.iter().enumerate() {
        match layer.kind {
            LayerKind::Dots => {
                let mut path = String::new();
                for row in 0..ht {
                    let mut col = 0;
                    while col < w {
                        if owner[row * w + col] != Some(li) {
                            col += 1;
                            continue;
                        }
                        let start = col;
                        while col < w && owner[row * w + col] == Some(li) {
                            col += 1;
                        }
                        write!(path, "M{start} {row}h{}v1h-{}z", col - start, col - start).ok();
                    }
                }
                if !path.is_empty() {
                    writeln!(doc, r#"<path fill="{}" d="{path}"/>"#, hex(layer.color)).ok();
                }
            }
            LayerKind::Curve => {
                let pts: Vec<String> = layer
                    .points
                    .iter()
                    .map(|p| {
                        let x = (p.re - raster.bounds.min.re) / h;
                        let y = (raster.bounds.max.im - p.im) / h;
                        format!("{x:.3},{y:.3}")
                    })
                    .collect();
                writeln!(
                    doc,
                    r#"<polygon fill="none" stroke="{}" stroke-width="1" points="{}"/>"#,
                    hex(layer.color),
                    pts.join(" ")
                )
                .ok();
            }
        }
    }
    writeln!(doc, "</svg>").ok();
    out.write_all(doc.as_bytes())?;
    Ok(())
}

/// Two columns `re,im`, one row per point.
pub fn write_csv<'a, W: Write>(
    points: impl IntoIterator<Item = &'a Complex64>,
    out: W,
) -> Result<(), ExportError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["re", "im"])?;
    for p in points {
        writer.serialize((p.re, p.im))?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetaJson {
    pub a: u32,
    pub depth: usize,
    pub generator: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub count: usize,
}

impl MetaJson {
    pub fn new(meta: &CloudMeta, count: usize) -> Self {
        let (generator, samples, seed) = match meta.generator {
            Generator::Full => ("full", None, None),
            Generator::Sampled { samples, seed } => ("sampled", Some(samples), Some(seed)),
            Generator::Boundary { samples_per_side } => ("boundary", Some(samples_per_side), None),
        };
        MetaJson {
            a: meta.a,
            depth: meta.depth,
            generator,
            samples,
            seed,
            count,
        }
    }
}

fn pairs(points: &[Complex64]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.re, p.im]).collect()
}

#[derive(Serialize)]
pub struct CloudJson {
    pub meta: MetaJson,
    pub points: Vec<[f64; 2]>,
}

impl CloudJson {
    pub fn new(cloud: &PointCloud) -> Self {
        CloudJson {
            meta: MetaJson::new(&cloud.meta, cloud.points.len()),
            points: pairs(&cloud.points),
        }
    }
}

#[derive(Serialize)]
pub struct LatticeJson {
    pub generators: [[f64; 2]; 2],
    pub covolume: f64,
}

impl LatticeJson {
    pub fn new(lattice: &Lattice) -> Self {
        let (g1, g2) = lattice.generators;
        LatticeJson {
            generators: [[g1.re, g1.im], [g2.re, g2.im]],
            covolume: lattice.covolume(),
        }
    }
}

#[derive(Serialize)]
pub struct TileJson {
    pub k1: i64,
    pub k2: i64,
    pub points: Vec<[f64; 2]>,
}

#[derive(Serialize)]
pub struct TilingJson {
    pub meta: MetaJson,
    pub lattice: LatticeJson,
    pub tiles: Vec<TileJson>,
}

impl TilingJson {
    pub fn new(cloud: &PointCloud, lattice: &Lattice, tiles: &[Tile]) -> Self {
        TilingJson {
            meta: MetaJson::new(&cloud.meta, cloud.points.len()),
            lattice: LatticeJson::new(lattice),
            tiles: tiles
                .iter()
                .map(|t| TileJson {
                    k1: t.k1,
                    k2: t.k2,
                    points: pairs(&t.points),
                })
                .collect(),
        }
    }
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<(), ExportError> {
    serde_json::to_writer(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[derive(Serialize)]
pub struct AutomatonJson {
    pub a: u32,
    /// Coefficient triples of each state.
    pub states: Vec<[String; 3]>,
    pub initial: usize,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Serialize)]
pub struct TransitionJson {
    pub from: usize,
    pub to: usize,
    pub diff: i32,
    pub labels: Vec<(u32, u32)>,
}

impl AutomatonJson {
    pub fn new(automaton: &BoundaryAutomaton) -> Self {
        AutomatonJson {
            a: automaton.param().a(),
            states: automaton
                .states()
                .iter()
                .map(|s| {
                    let [c0, c1, c2] = s.coeffs();
                    [c0.to_string(), c1.to_string(), c2.to_string()]
                })
                .collect(),
            initial: automaton.initial(),
            transitions: automaton
                .transitions()
                .iter()
                .map(|t| TransitionJson {
                    from: t.from,
                    to: t.to,
                    diff: t.diff,
                    labels: t.labels.clone(),
                })
                .collect(),
        }
    }
}

pub fn write_dot<W: Write>(automaton: &BoundaryAutomaton, mut out: W) -> Result<(), ExportError> {
    out.write_all(automaton.to_dot().as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Complex64> {
        (0..50)
            .flat_map(|i| (0..50).map(move |j| Complex64::new(i as f64 / 49.0, j as f64 / 49.0)))
            .collect()
    }

    #[test]
    fn format_names() {
        assert_eq!("PPM".parse::<Format>().unwrap(), Format::Ppm);
        assert_eq!(Format::from_path(Path::new("x/out.svg")), Some(Format::Svg));
        assert_eq!(Format::from_path(Path::new("noext")), None);
        assert!("png".parse::<Format>().is_err());
        assert_eq!(Format::Json.to_string(), "json");
    }

    #[test]
    fn ppm_layout() {
        let pts = square();
        let layer = Layer {
            points: &pts,
            color: [1, 2, 3],
            kind: LayerKind::Dots,
        };
        let mut buf = Vec::new();
        write_ppm(&[layer], 64, &mut buf).unwrap();
        assert!(buf.starts_with(b"P6\n64 64\n255\n"));
        assert_eq!(buf.len(), "P6\n64 64\n255\n".len() + 64 * 64 * 3);
        assert!(buf.windows(3).any(|w| w == [1, 2, 3]));
        assert!(matches!(write_ppm(&[], 64, Vec::new()), Err(ExportError::Empty)));
    }

    #[test]
    fn svg_is_well_formed() {
        let pts = square();
        let curve = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let layers = [
            Layer { points: &pts, color: [0, 0, 0], kind: LayerKind::Dots },
            Layer { points: &curve, color: [255, 0, 0], kind: LayerKind::Curve },
        ];
        let mut buf = Vec::new();
        write_svg(&layers, 32, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains(r#"version="1.1""#));
        assert!(text.contains("<path fill=\"#000000\""));
        assert!(text.contains("<polygon fill=\"none\" stroke=\"#ff0000\""));
        assert!(text.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn csv_round_trips() {
        let pts = [Complex64::new(0.1, -2.5), Complex64::new(1e-300, 3.0)];
        let mut buf = Vec::new();
        write_csv(&pts, &mut buf).unwrap();
        let mut reader = csv::Reader::from_reader(buf.as_slice());
        assert_eq!(reader.headers().unwrap(), vec!["re", "im"]);
        let back: Vec<(f64, f64)> = reader.deserialize().map(|r| r.unwrap()).collect();
        assert_eq!(back, vec![(0.1, -2.5), (1e-300, 3.0)]);
    }

    #[test]
    fn neighbouring_tiles_differ_in_colour() {
        for k1 in -3..=3 {
            for k2 in -3..=3 {
                for (d1, d2) in [(1, 0), (0, 1), (1, 1), (1, -1)] {
                    assert_ne!(tile_color(k1, k2), tile_color(k1 + d1, k2 + d2));
                }
            }
        }
    }
}
