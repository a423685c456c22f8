//! Extremal volume of non-collapsing Reinhardt domains via logarithmic
//! volume, plus the elliptic fibre bundle closed form.
//!
//! In the coordinates t_i = log|z_i| a Reinhardt domain is a torus bundle
//! over a base region B, and the fibre class has mu = (2 pi)^n / vol(B).
//! Bases are either finite unions of disjoint axis boxes (volumes are
//! exact) or predicate regions (volumes are seeded Monte-Carlo estimates
//! over a bounding box, with the standard error reported). Monomial maps
//! with unimodular exponent matrix act linearly on t and preserve the
//! volume; dilations translate t and preserve it exactly.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg;

/// Default Monte-Carlo sample count for predicate bases created internally
/// (pushforward images of boxes). JSON predicate bases carry their own.
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;

/// One side of an axis-aligned box, stored as (lo, width) so that
/// translations and sign flips preserve the width — and hence the box
/// volume — exactly in floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Side {
    pub lo: f64,
    pub width: f64,
}

impl Side {
    pub fn from_bounds(lo: f64, hi: f64) -> Side {
        Side { lo, width: hi - lo }
    }

    pub fn hi(&self) -> f64 {
        self.lo + self.width
    }
}

/// An axis-aligned box in t-coordinates, one side per dimension.
pub type AxisBox = Vec<Side>;

/// Interval bounds (lo, hi) per dimension, used for sampling boxes.
pub type Bounds = Vec<(f64, f64)>;

/// Membership region of a base in logarithmic coordinates.
#[derive(Debug, Clone)]
pub enum Region {
    /// Disjoint axis boxes; volumes are exact.
    Boxes(Vec<AxisBox>),
    /// Euclidean ball in t-space.
    Ball { center: Vec<f64>, radius: f64 },
    /// Intersection of half-spaces a . t <= b.
    Halfspaces(Vec<(Vec<f64>, f64)>),
    /// Preimage test: t belongs iff inner contains matrix * t + shift.
    Affine {
        matrix: Vec<Vec<f64>>,
        shift: Vec<f64>,
        inner: Box<Region>,
    },
}

impl Region {
    fn contains(&self, t: &[f64]) -> bool {
        match self {
            Region::Boxes(boxes) => boxes
                .iter()
                .any(|b| b.iter().zip(t).all(|(s, &x)| s.lo <= x && x <= s.hi())),
            Region::Ball { center, radius } => {
                let d2: f64 = center.iter().zip(t).map(|(c, x)| (x - c) * (x - c)).sum();
                d2 <= radius * radius
            }
            Region::Halfspaces(rows) => rows.iter().all(|(normal, offset)| {
                normal.iter().zip(t).map(|(a, x)| a * x).sum::<f64>() <= *offset
            }),
            Region::Affine {
                matrix,
                shift,
                inner,
            } => {
                let mapped: Vec<f64> = matrix
                    .iter()
                    .zip(shift)
                    .map(|(row, s)| row.iter().zip(t).map(|(a, x)| a * x).sum::<f64>() + s)
                    .collect();
                inner.contains(&mapped)
            }
        }
    }
}

/// The base of a Reinhardt domain in logarithmic coordinates.
#[derive(Debug, Clone)]
pub struct LogBase {
    n: usize,
    region: Region,
    /// Bounding box used for Monte-Carlo sampling of non-box regions.
    bbox: Bounds,
    samples: u64,
    seed: u64,
}

/// A volume together with its Monte-Carlo standard error (zero when the
/// volume is exact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub value: f64,
    pub stderr: f64,
}

fn check_box(n: usize, b: &AxisBox) -> Result<()> {
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "box has {} sides, expected {n}",
            b.len()
        )));
    }
    for s in b {
        if !s.lo.is_finite() || !s.width.is_finite() {
            return Err(Error::Inadmissible(
                "base must be relatively compact: box sides must be finite".into(),
            ));
        }
        if s.width < 0.0 {
            return Err(Error::InvalidInput(format!(
                "box side [{}, {}] is empty",
                s.lo,
                s.hi()
            )));
        }
    }
    Ok(())
}

fn check_bounds(n: usize, b: &Bounds) -> Result<()> {
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "bounding box has {} sides, expected {n}",
            b.len()
        )));
    }
    for &(lo, hi) in b {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Inadmissible(
                "base must be relatively compact: bounds must be finite".into(),
            ));
        }
        if hi < lo {
            return Err(Error::InvalidInput(format!("bound [{lo}, {hi}] is empty")));
        }
    }
    Ok(())
}

fn boxes_overlap(a: &AxisBox, b: &AxisBox) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| x.lo.max(y.lo) < x.hi().min(y.hi()))
}

fn hull(n: usize, boxes: &[AxisBox]) -> Bounds {
    let mut h = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    for b in boxes {
        for (i, s) in b.iter().enumerate() {
            h[i].0 = h[i].0.min(s.lo);
            h[i].1 = h[i].1.max(s.hi());
        }
    }
    h
}

impl LogBase {
    /// A base given by finitely many pairwise disjoint axis boxes.
    pub fn boxes(n: usize, bounds: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        let boxes = bounds
            .into_iter()
            .map(|b| {
                b.into_iter()
                    .map(|(lo, hi)| Side::from_bounds(lo, hi))
                    .collect()
            })
            .collect();
        LogBase::boxes_from_sides(n, boxes)
    }

    /// Same as `boxes`, keeping the caller's exact (lo, width) sides.
    pub fn boxes_from_sides(n: usize, boxes: Vec<AxisBox>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "base dimension must be positive".into(),
            ));
        }
        if boxes.is_empty() {
            return Err(Error::Inadmissible("base has no boxes".into()));
        }
        for b in &boxes {
            check_box(n, b)?;
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes_overlap(&boxes[i], &boxes[j]) {
                    return Err(Error::InvalidInput(format!(
                        "boxes {i} and {j} overlap with positive volume"
                    )));
                }
            }
        }
        let bbox = hull(n, &boxes);
        Ok(LogBase {
            n,
            region: Region::Boxes(boxes),
            bbox,
            samples: DEFAULT_MC_SAMPLES,
            seed: 0,
        })
    }

    /// A base given by a membership predicate, sampled inside `bbox`.
    pub fn predicate(
        n: usize,
        region: Region,
        bbox: Bounds,
        samples: u64,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "base dimension must be positive".into(),
            ));
        }
        check_bounds(n, &bbox)?;
        if samples == 0 {
            return Err(Error::InvalidInput("need at least one sample".into()));
        }
        Ok(LogBase {
            n,
            region,
            bbox,
            samples,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.region, Region::Boxes(_))
    }

    /// Overrides the Monte-Carlo parameters used for non-box regions.
    pub fn with_monte_carlo(mut self, samples: u64, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidInput("need at least one sample".into()));
        }
        self.samples = samples;
        self.seed = seed;
        Ok(self)
    }
}

/// Logarithmic volume of the base: exact for box unions, seeded
/// Monte-Carlo over the bounding box otherwise.
pub fn log_volume(base: &LogBase) -> Result<VolumeEstimate> {
    match &base.region {
        Region::Boxes(boxes) => {
            let value = boxes
                .iter()
                .map(|b| b.iter().map(|s| s.width).product::<f64>())
                .sum();
            if value <= 0.0 {
                return Err(Error::Inadmissible(
                    "base has zero volume; the domain is not admissible".into(),
                ));
            }
            Ok(VolumeEstimate { value, stderr: 0.0 })
        }
        region => {
            let bbox_volume: f64 = base.bbox.iter().map(|&(lo, hi)| hi - lo).product();
            if bbox_volume <= 0.0 {
                return Err(Error::Inadmissible("bounding box has zero volume".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(base.seed);
            let mut hits = 0u64;
            let mut t = vec![0.0; base.n];
            for _ in 0..base.samples {
                for (x, &(lo, hi)) in t.iter_mut().zip(&base.bbox) {
                    *x = rng.gen_range(lo..hi);
                }
                if region.contains(&t) {
                    hits += 1;
                }
            }
            let p = hits as f64 / base.samples as f64;
            let value = bbox_volume * p;
            let stderr = bbox_volume * (p * (1.0 - p) / base.samples as f64).sqrt();
            if value <= 0.0 {
                return Err(Error::Inadmissible(
                    "no sample hit the base; the domain is not admissible".into(),
                ));
            }
            Ok(VolumeEstimate { value, stderr })
        }
    }
}

/// Extremal volume of the fibre class: (2 pi)^n / vol(B).
pub fn reinhardt_mu(base: &LogBase) -> Result<f64> {
    let vol = log_volume(base)?;
    Ok((2.0 * std::f64::consts::PI).powi(base.n as i32) / vol.value)
}

/// Is the integer matrix a signed permutation (one entry of modulus one
/// per row and column)?
fn signed_permutation(u: &[Vec<i64>]) -> Option<Vec<(usize, i64)>> {
    let n = u.len();
    let mut seen = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    for row in u {
        let mut hit = None;
        for (j, &x) in row.iter().enumerate() {
            match x {
                0 => {}
                1 | -1 if hit.is_none() => hit = Some((j, x)),
                _ => return None,
            }
        }
        let (j, s) = hit?;
        if seen[j] {
            return None;
        }
        seen[j] = true;
        perm.push((j, s));
    }
    Some(perm)
}

fn integer_inverse(u: &[Vec<i64>], det: i128) -> Vec<Vec<f64>> {
    // Adjugate over i128; |det| = 1 so the inverse is integral.
    let n = u.len();
    let mut inv = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| u[r][c])
                        .collect::<Vec<i64>>()
                })
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            let cof = sign as i128 * linalg::integer_det(&minor);
            inv[i][j] = (cof * det) as f64; // det = +-1, so this is cof/det
        }
    }
    inv
}

/// Image of the base under the monomial map with unimodular exponent
/// matrix u, acting on t-coordinates as t -> u t.
///
/// Signed permutations keep box unions exact; any other matrix turns a box
/// union into a predicate region (membership via the inverse map) whose
/// bounding box is the axis hull of the image.
pub fn monomial_pushforward(base: &LogBase, u: &[Vec<i64>]) -> Result<LogBase> {
    let n = base.n;
    if u.len() != n || u.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "exponent matrix must be {n}x{n}"
        )));
    }
    let det = linalg::integer_det(u);
    if det.abs() != 1 {
        return Err(Error::NotUnimodular(det));
    }

    if let (Region::Boxes(boxes), Some(perm)) = (&base.region, signed_permutation(u)) {
        // Row i of u reads source coordinate perm[i].0 with sign perm[i].1,
        // so the image of an axis box is again an axis box with the same
        // side widths: the volume is preserved exactly.
        let mapped: Vec<AxisBox> = boxes
            .iter()
            .map(|b| {
                perm.iter()
                    .map(|&(j, s)| {
                        let side = b[j];
                        if s > 0 {
                            side
                        } else {
                            Side {
                                lo: -side.hi(),
                                width: side.width,
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        return LogBase::boxes_from_sides(n, mapped).map(|nb| LogBase {
            samples: base.samples,
            seed: base.seed,
            ..nb
        });
    }

    let u_inv = integer_inverse(u, det);
    let bbox = image_bbox(&base.bbox, u);
    let region = Region::Affine {
        matrix: u_inv,
        shift: vec![0.0; n],
        inner: Box::new(base.region.clone()),
    };
    LogBase::predicate(n, region, bbox, base.samples, base.seed)
}

/// Axis-aligned hull of the image of a box under an integer linear map.
fn image_bbox(bbox: &Bounds, u: &[Vec<i64>]) -> Bounds {
    let n = bbox.len();
    let mut out = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    for corner in 0..(1usize << n) {
        let t: Vec<f64> = (0..n)
            .map(|i| {
                if corner >> i & 1 == 0 {
                    bbox[i].0
                } else {
                    bbox[i].1
                }
            })
            .collect();
        for i in 0..n {
            let y: f64 = (0..n).map(|j| u[i][j] as f64 * t[j]).sum();
            out[i].0 = out[i].0.min(y);
            out[i].1 = out[i].1.max(y);
        }
    }
    out
}

/// Image of the base under the dilation z_i -> a_i z_i, which translates
/// t by (log|a_1|, ..., log|a_n|). Box volumes are unchanged exactly.
pub fn dilation_pushforward(base: &LogBase, a: &[Complex64]) -> Result<LogBase> {
    let n = base.n;
    if a.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "dilation needs {n} components"
        )));
    }
    if a.iter().any(|z| z.norm_sqr() == 0.0) {
        return Err(Error::InvalidInput(
            "dilation components must be nonzero".into(),
        ));
    }
    let shift: Vec<f64> = a.iter().map(|z| z.norm().ln()).collect();
    match &base.region {
        Region::Boxes(boxes) => {
            // Translating lo and keeping the width preserves each box
            // volume exactly.
            let moved = boxes
                .iter()
                .map(|b| {
                    b.iter()
                        .zip(&shift)
                        .map(|(side, s)| Side {
                            lo: side.lo + s,
                            width: side.width,
                        })
                        .collect()
                })
                .collect();
            LogBase::boxes_from_sides(n, moved).map(|nb| LogBase {
                samples: base.samples,
                seed: base.seed,
                ..nb
            })
        }
        region => {
            // Membership of t in the image is membership of t - shift.
            let neg: Vec<f64> = shift.iter().map(|s| -s).collect();
            let identity: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| f64::from(i == j)).collect())
                .collect();
            let new_region = Region::Affine {
                matrix: identity,
                shift: neg,
                inner: Box::new(region.clone()),
            };
            let bbox = base
                .bbox
                .iter()
                .zip(&shift)
                .map(|(&(lo, hi), s)| (lo + s, hi + s))
                .collect();
            LogBase::predicate(n, new_region, bbox, base.samples, base.seed)
        }
    }
}

/// Product base in t-coordinates; the fibre class multiplies accordingly.
/// Only box-union bases combine exactly.
pub fn product_base(a: &LogBase, b: &LogBase) -> Result<LogBase> {
    match (&a.region, &b.region) {
        (Region::Boxes(ba), Region::Boxes(bb)) => {
            let mut boxes = Vec::with_capacity(ba.len() * bb.len());
            for x in ba {
                for y in bb {
                    let mut sides = x.clone();
                    sides.extend_from_slice(y);
                    boxes.push(sides);
                }
            }
            LogBase::boxes_from_sides(a.n + b.n, boxes)
        }
        _ => Err(Error::InvalidInput(
            "product bases are supported for box unions only".into(),
        )),
    }
}

/// Extremal volume of the elliptic fibre bundle over the torus {1, tau}
/// with deck factor c > 1: the fibre lattice is generated by {log c,
/// 2 pi i}, and mu = log c / (2 pi Im tau).
pub fn elliptic_bundle_mu(c: f64, tau: Complex64) -> Result<f64> {
    if !(c > 1.0) {
        return Err(Error::InvalidInput(format!(
            "deck factor c = {c} must exceed 1"
        )));
    }
    if !(tau.im > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tau = {tau} is not in the upper half plane"
        )));
    }
    Ok(c.ln() / (2.0 * std::f64::consts::PI * tau.im))
}

/// JSON form of a base: either {"n", "boxes"} or {"n", "predicate"}.
#[derive(Deserialize)]
struct LogBaseRepr {
    n: usize,
    #[serde(default)]
    boxes: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    predicate: Option<PredicateRepr>,
}

#[derive(Deserialize)]
struct PredicateRepr {
    kind: String,
    params: serde_json::Value,
    bbox: Vec<[f64; 2]>,
    samples: u64,
    seed: u64,
}

#[derive(Deserialize)]
struct BallParams {
    center: Vec<f64>,
    radius: f64,
}

#[derive(Deserialize)]
struct HalfspacesParams {
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

impl LogBase {
    /// Parses the JSON base format.
    pub fn from_json(json: &str) -> Result<Self> {
        let repr: LogBaseRepr =
            serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("base: {e}")))?;
        match (repr.boxes, repr.predicate) {
            (Some(boxes), None) => {
                let boxes = boxes
                    .into_iter()
                    .map(|b| b.into_iter().map(|[lo, hi]| (lo, hi)).collect())
                    .collect();
                LogBase::boxes(repr.n, boxes)
            }
            (None, Some(p)) => {
                let bbox: Bounds = p.bbox.iter().map(|&[lo, hi]| (lo, hi)).collect();
                let region = match p.kind.as_str() {
                    "ball" => {
                        let b: BallParams = serde_json::from_value(p.params).map_err(|e| {
                            Error::InvalidInput(format!("base.predicate.params: {e}"))
                        })?;
                        if b.center.len() != repr.n {
                            return Err(Error::DimensionMismatch(
                                "ball center has wrong dimension".into(),
                            ));
                        }
                        Region::Ball {
                            center: b.center,
                            radius: b.radius,
                        }
                    }
                    "halfspaces" => {
                        let h: HalfspacesParams =
                            serde_json::from_value(p.params).map_err(|e| {
                                Error::InvalidInput(format!("base.predicate.params: {e}"))
                            })?;
                        if h.normals.len() != h.offsets.len() {
                            return Err(Error::DimensionMismatch(
                                "halfspaces need one offset per normal".into(),
                            ));
                        }
                        Region::Halfspaces(h.normals.into_iter().zip(h.offsets).collect())
                    }
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "base.predicate.kind: unknown kind {other:?}"
                        )))
                    }
                };
                LogBase::predicate(repr.n, region, bbox, p.samples, p.seed)
            }
            _ => Err(Error::InvalidInput(
                "base must have exactly one of \"boxes\" or \"predicate\"".into(),
            )),
        }
    }
}
