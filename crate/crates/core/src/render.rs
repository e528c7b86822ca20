//! Point clouds of the fractal, its boundary and its lattice translates,
//! plus the raster utilities behind area estimates and images.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgNum, Embedding, FamilyParam};
use crate::codec::BoundaryParam;
use crate::error::{Error, Result};
use crate::numeration::{
    count_admissible, eval_word, window_allows, AdmissibleSampler, FRACTAL_START,
};

/// How a cloud was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Every admissible word of the given depth.
    Full,
    /// Uniform random admissible words.
    Sampled { samples: usize, seed: u64 },
    /// The image of the unit square's boundary.
    Boundary { samples_per_side: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CloudMeta {
    pub a: u32,
    pub depth: usize,
    pub generator: Generator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Complex64>,
    pub meta: CloudMeta,
}

/// Radius of the disc containing the fractal: `(a − 1)|α|²/(1 − |α|)`.
pub fn fractal_radius(e: &Embedding) -> f64 {
    let m = e.alpha_abs();
    f64::from(e.param().a() - 1) * m * m / (1.0 - m)
}

/// The translation lattice `Zu + Zαu`, `u = α − 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pub u: AlgNum,
    pub generators: (Complex64, Complex64),
}

impl Lattice {
    pub fn new(e: &Embedding) -> Self {
        let param = e.param();
        let u = AlgNum::new(param, -1, 1, 0);
        let au = u.mul_alpha();
        let generators = (e.embed(&u), e.embed(&au));
        Lattice { u, generators }
    }

    /// Area of a fundamental domain, `|Im(conj(u)·αu)| = |u|²·Im α`.
    pub fn covolume(&self) -> f64 {
        (self.generators.0.conj() * self.generators.1).im.abs()
    }

    pub fn translate(&self, k1: i64, k2: i64) -> Complex64 {
        self.generators.0 * k1 as f64 + self.generators.1 * k2 as f64
    }
}

/// Enumeration stops at this many points and switches to sampling.
pub const DEFAULT_POINT_CAP: usize = 2_000_000;

/// Samples drawn per random stream; fixed so that results do not depend on
/// how the streams are spread over threads.
pub const SAMPLE_CHUNK: usize = 1 << 16;

/// All admissible prefixes of length `len` (the units of parallel work).
pub fn admissible_prefixes(param: FamilyParam, len: usize) -> Vec<Vec<u32>> {
    crate::numeration::enumerate_admissible(param, len)
        .map(|w| w.digits().to_vec())
        .collect()
}

/// Appends the points of every admissible word of length `depth` that
/// starts with `prefix`, in lexicographic order.
pub fn enumerate_points_with_prefix(
    e: &Embedding,
    depth: usize,
    prefix: &[u32],
    out: &mut Vec<Complex64>,
) {
    let param = e.param();
    let alpha = e.alpha();
    let mut digits: Vec<u32> = Vec::with_capacity(depth);
    let mut power = alpha.powi(FRACTAL_START as i32);
    let mut partial = Complex64::new(0.0, 0.0);
    for &d in prefix.iter().take(depth) {
        if !window_allows(param, d, context(&digits)) {
            return;
        }
        partial += power * f64::from(d);
        power *= alpha;
        digits.push(d);
    }
    descend(param, alpha, depth, &mut digits, partial, power, out);
}

fn context(digits: &[u32]) -> [u32; 3] {
    let n = digits.len();
    let at = |k: usize| if n >= k { digits[n - k] } else { 0 };
    [at(1), at(2), at(3)]
}

fn descend(
    param: FamilyParam,
    alpha: Complex64,
    depth: usize,
    digits: &mut Vec<u32>,
    partial: Complex64,
    power: Complex64,
    out: &mut Vec<Complex64>,
) {
    if digits.len() >= depth {
        out.push(partial);
        return;
    }
    let ctx = context(digits);
    for d in 0..param.a() {
        if !window_allows(param, d, ctx) {
            continue;
        }
        digits.push(d);
        descend(
            param,
            alpha,
            depth,
            digits,
            partial + power * f64::from(d),
            power * alpha,
            out,
        );
        digits.pop();
    }
}

/// The points of stream `chunk` of a sampled cloud.
pub fn sample_chunk(
    e: &Embedding,
    sampler: &AdmissibleSampler,
    count: usize,
    seed: u64,
    chunk: u64,
) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    (0..count)
        .map(|_| eval_word(&sampler.sample(&mut rng), e))
        .collect()
}

/// Number of samples in each chunk of a `total`-point cloud.
pub fn chunk_sizes(total: usize) -> Vec<usize> {
    let mut out = vec![SAMPLE_CHUNK; total / SAMPLE_CHUNK];
    if !total.is_multiple_of(SAMPLE_CHUNK) {
        out.push(total % SAMPLE_CHUNK);
    }
    out
}

/// Points of the fractal at `depth`: every admissible word when there are
/// at most `cap` of them, otherwise `cap` uniform samples.
pub fn points_of_r(e: &Embedding, depth: usize, cap: usize, seed: u64) -> Result<PointCloud> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1"));
    }
    let param = e.param();
    let meta = |generator| CloudMeta {
        a: param.a(),
        depth,
        generator,
    };
    let count = count_admissible(param, depth);
    if count.is_some_and(|c| c <= cap as u128) {
        let mut points = Vec::with_capacity(count.unwrap_or(0) as usize);
        enumerate_points_with_prefix(e, depth, &[], &mut points);
        return Ok(PointCloud {
            points,
            meta: meta(Generator::Full),
        });
    }
    let sampler = AdmissibleSampler::new(param, depth);
    let mut points = Vec::with_capacity(cap);
    for (chunk, size) in chunk_sizes(cap).into_iter().enumerate() {
        points.extend(sample_chunk(e, &sampler, size, seed, chunk as u64));
    }
    Ok(PointCloud {
        points,
        meta: meta(Generator::Sampled { samples: cap, seed }),
    })
}

/// Images of evenly spaced points on the four sides of the unit square,
/// as one closed loop.
pub fn boundary_points(bp: &BoundaryParam, samples_per_side: usize, depth: usize) -> Result<PointCloud> {
    Ok(PointCloud {
        points: bp.boundary_loop(samples_per_side, depth)?,
        meta: CloudMeta {
            a: bp.param().a(),
            depth,
            generator: Generator::Boundary { samples_per_side },
        },
    })
}

/// A copy of a cloud shifted by `k1·u + k2·αu`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tile {
    pub k1: i64,
    pub k2: i64,
    pub points: Vec<Complex64>,
}

/// The `(2K + 1)²` translates with `|k1|, |k2| ≤ K`, ordered by `(k1, k2)`.
pub fn tiling(cloud: &PointCloud, lattice: &Lattice, k: i64) -> Vec<Tile> {
    let mut tiles = Vec::new();
    for k1 in -k..=k {
        for k2 in -k..=k {
            let shift = lattice.translate(k1, k2);
            tiles.push(Tile {
                k1,
                k2,
                points: cloud.points.iter().map(|p| p + shift).collect(),
            });
        }
    }
    tiles
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub min: Complex64,
    pub max: Complex64,
}

impl Bounds {
    pub fn of(points: &[Complex64]) -> Option<Bounds> {
        let first = *points.first()?;
        Some(points.iter().fold(Bounds { min: first, max: first }, |b, p| Bounds {
            min: Complex64::new(b.min.re.min(p.re), b.min.im.min(p.im)),
            max: Complex64::new(b.max.re.max(p.re), b.max.im.max(p.im)),
        }))
    }

    pub fn union(self, other: Bounds) -> Bounds {
        Bounds {
            min: Complex64::new(self.min.re.min(other.min.re), self.min.im.min(other.min.im)),
            max: Complex64::new(self.max.re.max(other.max.re), self.max.im.max(other.max.im)),
        }
    }

    pub fn pad(self, margin: f64) -> Bounds {
        Bounds {
            min: self.min - Complex64::new(margin, margin),
            max: self.max + Complex64::new(margin, margin),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.re - self.min.re
    }

    pub fn height(&self) -> f64 {
        self.max.im - self.min.im
    }
}

/// A grid of occupancy counts; row 0 is the top (largest imaginary part).
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub bounds: Bounds,
    pub counts: Vec<u32>,
}

impl Raster {
    /// Square pixels of side `h` covering `bounds`.
    pub fn with_pixel(bounds: Bounds, h: f64) -> Result<Raster> {
        if h.is_nan() || h <= 0.0 {
            return Err(Error::InvalidArgument("pixel size must be positive"));
        }
        let width = (bounds.width() / h).ceil() as usize + 1;
        let height = (bounds.height() / h).ceil() as usize + 1;
        Ok(Raster {
            width,
            height,
            bounds,
            counts: vec![0; width * height],
        })
    }

    /// At most `max_side` pixels along the longer side, aspect preserved.
    pub fn fit(bounds: Bounds, max_side: usize) -> Result<Raster> {
        let side = bounds.width().max(bounds.height());
        if side.is_nan() || side <= 0.0 || max_side < 2 {
            return Err(Error::InvalidArgument("degenerate raster"));
        }
        Raster::with_pixel(bounds, side / (max_side - 1) as f64)
    }

    pub fn pixel_size(&self) -> f64 {
        let side = self.bounds.width().max(self.bounds.height());
        if self.width >= self.height {
            side / (self.width - 1).max(1) as f64
        } else {
            side / (self.height - 1).max(1) as f64
        }
    }

    /// Index into `counts` of the pixel containing `p`.
    pub fn index_of(&self, p: Complex64) -> Option<usize> {
        self.cell(p, self.pixel_size())
    }

    fn cell(&self, p: Complex64, h: f64) -> Option<usize> {
        let col = ((p.re - self.bounds.min.re) / h).floor();
        let row = ((self.bounds.max.im - p.im) / h).floor();
        if col < 0.0 || row < 0.0 || col >= self.width as f64 || row >= self.height as f64 {
            return None;
        }
        Some(row as usize * self.width + col as usize)
    }

    pub fn add(&mut self, points: &[Complex64]) {
        let h = self.pixel_size();
        for &p in points {
            if let Some(i) = self.cell(p, h) {
                self.counts[i] = self.counts[i].saturating_add(1);
            }
        }
    }

    pub fn occupied(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Occupancy after a closing (dilation then erosion) with the
    /// four-neighbour cross, which fills pinholes between sample points
    /// without growing the outline.
    pub fn closed_occupancy(&self) -> Vec<bool> {
        let (w, h) = (self.width, self.height);
        let occ: Vec<bool> = self.counts.iter().map(|&c| c > 0).collect();
        let cross = |grid: &[bool], x: usize, y: usize, want: bool| -> bool {
            let mut hit = grid[y * w + x] == want;
            if x > 0 {
                hit |= grid[y * w + x - 1] == want;
            }
            if x + 1 < w {
                hit |= grid[y * w + x + 1] == want;
            }
            if y > 0 {
                hit |= grid[(y - 1) * w + x] == want;
            }
            if y + 1 < h {
                hit |= grid[(y + 1) * w + x] == want;
            }
            hit
        };
        let dilated: Vec<bool> = (0..w * h).map(|i| cross(&occ, i % w, i / w, true)).collect();
        (0..w * h)
            .map(|i| !cross(&dilated, i % w, i / w, false))
            .collect()
    }
}

/// Occupied area on a grid of side `h`, after closing.
pub fn area_estimate(points: &[Complex64], h: f64) -> Result<f64> {
    let Some(bounds) = Bounds::of(points) else {
        return Ok(0.0);
    };
    let mut raster = Raster::with_pixel(bounds.pad(2.0 * h), h)?;
    raster.add(points);
    let h = raster.pixel_size();
    let filled = raster.closed_occupancy().iter().filter(|&&b| b).count();
    Ok(filled as f64 * h * h)
}

/// Bucketed points for nearest-neighbour queries.
#[derive(Clone, Debug)]
pub struct PointIndex {
    cell: f64,
    entries: Vec<((i64, i64), Complex64)>,
}

impl PointIndex {
    pub fn new(points: &[Complex64], cell: f64) -> Self {
        let mut entries: Vec<((i64, i64), Complex64)> = points
            .iter()
            .map(|&p| (Self::key(p, cell), p))
            .collect();
        entries.sort_by_key(|e| e.0);
        PointIndex { cell, entries }
    }

    fn key(p: Complex64, cell: f64) -> (i64, i64) {
        ((p.re / cell).floor() as i64, (p.im / cell).floor() as i64)
    }

    fn bucket(&self, key: (i64, i64)) -> &[((i64, i64), Complex64)] {
        let lo = self.entries.partition_point(|e| e.0 < key);
        let hi = self.entries.partition_point(|e| e.0 <= key);
        &self.entries[lo..hi]
    }

    /// Distance to the closest indexed point (infinite if none is within
    /// `max_rings` cells).
    pub fn nearest(&self, q: Complex64, max_rings: i64) -> f64 {
        let (cx, cy) = Self::key(q, self.cell);
        let mut best = f64::INFINITY;
        for ring in 0..=max_rings {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    for (_, p) in self.bucket((cx + dx, cy + dy)) {
                        best = best.min((p - q).norm());
                    }
                }
            }
            // every unvisited point is at least `ring·cell` away
            if best <= ring as f64 * self.cell {
                break;
            }
        }
        best
    }
}

/// Largest distance from a point of `from` to the set `to`, computed on a
/// grid of side `cell` (exact as long as the result is below `cell·rings`).
pub fn directed_hausdorff(from: &[Complex64], to: &[Complex64], cell: f64, rings: i64) -> f64 {
    let index = PointIndex::new(to, cell);
    from.iter()
        .map(|&p| index.nearest(p, rings))
        .fold(0.0, f64::max)
}

/// The closest pair, by a sweep over points sorted by real part.
pub fn closest_pair(points: &[Complex64]) -> Option<(usize, usize, f64)> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].re.total_cmp(&points[j].re));
    let mut best: Option<(usize, usize, f64)> = None;
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            let limit = best.map_or(f64::INFINITY, |b| b.2);
            if points[j].re - points[i].re >= limit {
                break;
            }
            let d = (points[i] - points[j]).norm();
            if d < limit {
                best = Some((i.min(j), i.max(j), d));
            }
        }
    }
    best
}

/// Distinct points, compared bitwise (used to deduplicate clouds).
pub fn distinct_count(points: &[Complex64]) -> usize {
    points
        .iter()
        .map(|p| (p.re.to_bits(), p.im.to_bits()))
        .collect::<BTreeSet<_>>()
        .len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeration::{enumerate_admissible, eval_word};

    fn emb(a: i64) -> Embedding {
        Embedding::new(FamilyParam::new(a).unwrap()).unwrap()
    }

    #[test]
    fn depth_one() {
        let e = emb(3);
        let cloud = points_of_r(&e, 1, DEFAULT_POINT_CAP, 0).unwrap();
        let a2 = e.alpha() * e.alpha();
        assert_eq!(cloud.points.len(), 3);
        for (p, k) in cloud.points.iter().zip([0.0, 1.0, 2.0]) {
            assert!((p - a2 * k).norm() < 1e-15);
        }
        assert_eq!(cloud.meta.generator, Generator::Full);
        assert!(points_of_r(&e, 0, 10, 0).is_err());
    }

    #[test]
    fn enumeration_matches_words() {
        let e = emb(3);
        let p = e.param();
        let cloud = points_of_r(&e, 8, DEFAULT_POINT_CAP, 0).unwrap();
        let words: Vec<Complex64> = enumerate_admissible(p, 8).map(|w| eval_word(&w, &e)).collect();
        assert_eq!(cloud.points.len(), words.len());
        for (x, y) in cloud.points.iter().zip(&words) {
            assert!((x - y).norm() < 1e-14);
        }
        assert!(cloud.points.iter().any(|z| z.norm() == 0.0));
        let radius = fractal_radius(&e);
        assert!(cloud.points.iter().all(|z| z.norm() <= radius + 1e-12));
    }

    #[test]
    fn prefixes_partition_the_cloud() {
        let e = emb(4);
        let whole = points_of_r(&e, 7, DEFAULT_POINT_CAP, 0).unwrap().points;
        let mut pieces = Vec::new();
        for prefix in admissible_prefixes(e.param(), 3) {
            enumerate_points_with_prefix(&e, 7, &prefix, &mut pieces);
        }
        assert_eq!(pieces, whole);
    }

    #[test]
    fn sampling_is_deterministic() {
        let e = emb(3);
        let a = points_of_r(&e, 20, 1000, 5).unwrap();
        let b = points_of_r(&e, 20, 1000, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points.len(), 1000);
        assert_eq!(a.meta.generator, Generator::Sampled { samples: 1000, seed: 5 });
        assert_ne!(a.points, points_of_r(&e, 20, 1000, 6).unwrap().points);
        assert_eq!(chunk_sizes(SAMPLE_CHUNK * 2 + 3), vec![SAMPLE_CHUNK, SAMPLE_CHUNK, 3]);
    }

    #[test]
    fn lattice_covolume() {
        let e = emb(3);
        let lat = Lattice::new(&e);
        let u = e.alpha() - 1.0;
        let expect = u.norm_sqr() * e.alpha().im;
        assert!((lat.covolume() - expect).abs() < 1e-14);
        assert!((lat.covolume() - 0.66664).abs() < 1e-4);
    }

    #[test]
    fn tiling_shapes() {
        let e = emb(3);
        let cloud = points_of_r(&e, 4, DEFAULT_POINT_CAP, 0).unwrap();
        let lat = Lattice::new(&e);
        let one = tiling(&cloud, &lat, 0);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].points, cloud.points);
        assert_eq!(tiling(&cloud, &lat, 2).len(), 25);
    }

    /// The neighbour shifted by (1 + α)u approaches the fractal only near −1,
    /// and the one shifted by (α − 1)u only near −α.
    #[test]
    fn single_point_neighbours() {
        let e = emb(3);
        let cloud = points_of_r(&e, 14, DEFAULT_POINT_CAP, 0).unwrap().points;
        let u = e.alpha() - 1.0;
        let index = PointIndex::new(&cloud, 0.02);
        for (shift, touch) in [((1.0 + e.alpha()) * u, Complex64::new(-1.0, 0.0)), ((e.alpha() - 1.0) * u, -e.alpha())] {
            let moved: Vec<Complex64> = cloud.iter().map(|p| p + shift).collect();
            let close: Vec<Complex64> = moved
                .iter()
                .copied()
                .filter(|&p| index.nearest(p, 3) < 0.01)
                .collect();
            assert!(!close.is_empty());
            assert!(close.iter().all(|p| (p - touch).norm() < 0.15), "{shift}");
        }
    }

    #[test]
    fn area_examples() {
        assert_eq!(area_estimate(&[], 0.1).unwrap(), 0.0);
        assert!(area_estimate(&[Complex64::new(0.0, 0.0)], 0.0).is_err());
        // a dense square of side 1
        let pts: Vec<Complex64> = (0..200)
            .flat_map(|i| (0..200).map(move |j| Complex64::new(i as f64 / 199.0, j as f64 / 199.0)))
            .collect();
        let area = area_estimate(&pts, 0.01).unwrap();
        assert!((area - 1.0).abs() < 0.05, "{area}");
    }

    #[test]
    fn depth_monotonicity() {
        let e = emb(3);
        let m = e.alpha_abs();
        let shallow = points_of_r(&e, 9, DEFAULT_POINT_CAP, 0).unwrap().points;
        let deep = points_of_r(&e, 10, DEFAULT_POINT_CAP, 0).unwrap().points;
        let tail = 2.0 * m.powi(11) / (1.0 - m);
        let d1 = directed_hausdorff(&shallow, &deep, 0.01, 4);
        let d2 = directed_hausdorff(&deep, &shallow, 0.01, 4);
        assert!(d1 <= tail + 1e-12 && d2 <= tail + 1e-12, "{d1} {d2} {tail}");
    }

    #[test]
    fn boundary_lies_on_the_fractal() {
        let e = emb(3);
        let bp = BoundaryParam::new(&e).unwrap();
        let boundary = boundary_points(&bp, 100, 30).unwrap();
        assert_eq!(boundary.points.len(), 400);
        let m = e.alpha_abs();
        let depth = 14;
        let cloud = points_of_r(&e, depth, DEFAULT_POINT_CAP, 0).unwrap().points;
        // shift everything off the lattice to the canonical tile
        let eps = 5.0 * m.powi(depth as i32);
        let d = directed_hausdorff(&boundary.points, &cloud, eps, 3);
        assert!(d <= eps, "{d} > {eps}");
        for corner in [Complex64::new(-1.0, 0.0), -e.alpha(), -e.alpha() * e.alpha()] {
            assert!(boundary.points.iter().any(|p| (p - corner).norm() < 1e-9));
        }
    }

    #[test]
    fn closest_pair_matches_brute_force() {
        let pts: Vec<Complex64> = (0..300)
            .map(|i| {
                let x = (i as f64 * 0.7548776662).fract();
                let y = (i as f64 * 0.5698402910).fract();
                Complex64::new(x, y)
            })
            .collect();
        let (_, _, d) = closest_pair(&pts).unwrap();
        let mut brute = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                brute = brute.min((pts[i] - pts[j]).norm());
            }
        }
        assert_eq!(d, brute);
        assert!(closest_pair(&pts[..1]).is_none());
        assert_eq!(distinct_count(&[pts[0], pts[0], pts[1]]), 2);
    }
}
