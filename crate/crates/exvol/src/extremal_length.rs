//! Classical extremal length on flat tori via grid shortest paths.
//!
//! A conformal factor rho is sampled on an N x N grid over the fundamental
//! parallelogram {s + t*tau : s, t in [0,1)}. The length of a homology
//! class (p, q) is the shortest-path value between a node and its
//! translate by p + q*tau in the universal cover, with a 16-direction
//! neighborhood (king plus knight moves) and edge weights
//! (rho(u) + rho(v))/2 * |edge in C|.
//!
//! Grid paths are a subset of all paths, so the discrete length
//! over-approximates the continuum infimum; the worst-case anisotropy of
//! the 16-direction stencil on a square grid is about 2.8 percent on
//! lengths (the largest angular gap between stencil directions is
//! atan(1/2), giving a secant of ~1.0275), about 5.7 percent on the
//! squared ratio. Tolerances derived from these constants live in
//! LENGTH_ANISOTROPY and RATIO_GRID_TOL.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Worst-case relative over-approximation of lengths by the 16-direction
/// stencil on the square torus.
pub const LENGTH_ANISOTROPY: f64 = 0.028;

/// One-sided tolerance on squared ratios: stencil anisotropy (twice the
/// length error) plus sampling error at N >= 256, also covering the shear
/// of reduced non-square tori.
pub const RATIO_GRID_TOL: f64 = 0.08;

/// Default grid resolution.
pub const DEFAULT_GRID: usize = 256;

/// The 16 stencil directions: king moves plus knight moves.
const DIRS: [(i64, i64); 16] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
    (1, 2),
    (1, -2),
    (-1, 2),
    (-1, -2),
    (2, 1),
    (2, -1),
    (-2, 1),
    (-2, -1),
];

/// A sampled conformal factor on the torus {1, tau}.
///
/// `values[i][j]` is rho at the cell center ((i + 1/2)/N, (j + 1/2)/N) in
/// (s, t) coordinates; the field is extended periodically.
#[derive(Debug, Clone)]
pub struct ConformalField {
    tau: Complex64,
    n_grid: usize,
    values: Vec<f64>, // row-major, values[i * N + j]
}

impl ConformalField {
    pub fn new(tau: Complex64, n_grid: usize, values: Vec<Vec<f64>>) -> Result<Self> {
        if !(tau.im > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tau = {tau} is not in the upper half plane"
            )));
        }
        if n_grid == 0 {
            return Err(Error::InvalidInput(
                "grid resolution must be positive".into(),
            ));
        }
        if values.len() != n_grid || values.iter().any(|r| r.len() != n_grid) {
            return Err(Error::DimensionMismatch(format!(
                "field values must be {n_grid}x{n_grid}"
            )));
        }
        let flat: Vec<f64> = values.into_iter().flatten().collect();
        if flat.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::Inadmissible(
                "conformal factors must be finite and non-negative".into(),
            ));
        }
        if !flat.iter().any(|&v| v > 0.0) {
            return Err(Error::Inadmissible(
                "all-zero field has no positive area".into(),
            ));
        }
        Ok(ConformalField {
            tau,
            n_grid,
            values: flat,
        })
    }

    pub fn constant(tau: Complex64, n_grid: usize, c: f64) -> Result<Self> {
        ConformalField::new(tau, n_grid, vec![vec![c; n_grid]; n_grid])
    }

    /// A seeded random smooth field: a trigonometric polynomial of the
    /// given degree in (s, t), affinely rescaled so its sampled values
    /// span [lo, hi].
    pub fn trig(
        tau: Complex64,
        n_grid: usize,
        seed: u64,
        degree: u32,
        lo: f64,
        hi: f64,
    ) -> Result<Self> {
        if !(0.0 <= lo && lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "field range [{lo}, {hi}] must satisfy 0 <= lo <= hi"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let deg = degree as i64;
        // Modes (j, k) with j >= 0, skipping (0, k <= 0): one representative
        // per conjugate pair keeps the sample real without duplication.
        let mut modes = Vec::new();
        for j in 0..=deg {
            for k in -deg..=deg {
                if j == 0 && k <= 0 {
                    continue;
                }
                let decay = 1.0 / (1.0 + j as f64 + k.abs() as f64);
                let a: f64 = rng.gen_range(-1.0..1.0);
                let b: f64 = rng.gen_range(-1.0..1.0);
                modes.push((j as f64, k as f64, a * decay, b * decay));
            }
        }
        let mut raw = vec![0.0f64; n_grid * n_grid];
        let step = 1.0 / n_grid as f64;
        for i in 0..n_grid {
            let s = (i as f64 + 0.5) * step;
            for jdx in 0..n_grid {
                let t = (jdx as f64 + 0.5) * step;
                let mut v = 0.0;
                for &(j, k, a, b) in &modes {
                    let angle = std::f64::consts::TAU * (j * s + k * t);
                    v += a * angle.cos() + b * angle.sin();
                }
                raw[i * n_grid + jdx] = v;
            }
        }
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in &raw {
            min = min.min(v);
            max = max.max(v);
        }
        let span = max - min;
        let values: Vec<Vec<f64>> = (0..n_grid)
            .map(|i| {
                (0..n_grid)
                    .map(|j| {
                        let v = raw[i * n_grid + j];
                        if span > 0.0 {
                            lo + (hi - lo) * (v - min) / span
                        } else {
                            0.5 * (lo + hi)
                        }
                    })
                    .collect()
            })
            .collect();
        ConformalField::new(tau, n_grid, values)
    }

    /// Parses the JSON field format: {"tau":[re,im],"N":n,"values":[[..]]}
    /// for explicit samples, or {"tau":..,"N":..,"trig":{"seed":..,
    /// "degree":..,"lo":..,"hi":..}} for a generated field.
    pub fn from_json(json: &str) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct TrigRepr {
            seed: u64,
            degree: u32,
            lo: f64,
            hi: f64,
        }
        #[derive(serde::Deserialize)]
        struct FieldRepr {
            tau: [f64; 2],
            #[serde(rename = "N")]
            n: usize,
            #[serde(default)]
            values: Option<Vec<Vec<f64>>>,
            #[serde(default)]
            trig: Option<TrigRepr>,
        }
        let repr: FieldRepr =
            serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("field: {e}")))?;
        let tau = Complex64::new(repr.tau[0], repr.tau[1]);
        match (repr.values, repr.trig) {
            (Some(values), None) => ConformalField::new(tau, repr.n, values),
            (None, Some(t)) => ConformalField::trig(tau, repr.n, t.seed, t.degree, t.lo, t.hi),
            _ => Err(Error::InvalidInput(
                "field must have exactly one of \"values\" or \"trig\"".into(),
            )),
        }
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn n_grid(&self) -> usize {
        self.n_grid
    }

    /// Periodic lookup at integer node (i, j) of the universal cover.
    fn rho(&self, i: i64, j: i64) -> f64 {
        let n = self.n_grid as i64;
        let ii = i.rem_euclid(n) as usize;
        let jj = j.rem_euclid(n) as usize;
        self.values[ii * self.n_grid + jj]
    }

    /// Rescaled field c * rho.
    pub fn scaled(&self, c: f64) -> Result<ConformalField> {
        if !(c > 0.0) {
            return Err(Error::InvalidInput("scale factor must be positive".into()));
        }
        Ok(ConformalField {
            tau: self.tau,
            n_grid: self.n_grid,
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }
}

/// Area of the conformal metric: midpoint-rule sum of rho^2 times the cell
/// area Im(tau) / N^2.
pub fn area(field: &ConformalField) -> f64 {
    let cell = field.tau.im / (field.n_grid * field.n_grid) as f64;
    field.values.iter().map(|&v| v * v).sum::<f64>() * cell
}

/// Default universal-cover margin around the straight segment, in
/// fundamental domains.
pub const DEFAULT_MARGIN: i64 = 1;

/// Length of the homology class (p, q): shortest grid path from the origin
/// node to its translate by p + q*tau, in a cover window extending
/// `DEFAULT_MARGIN` fundamental domains around the straight segment.
pub fn len_class(field: &ConformalField, p: i64, q: i64) -> Result<f64> {
    len_class_with_margin(field, p, q, DEFAULT_MARGIN)
}

/// Same with an explicit cover margin, for fields bumpy enough to push the
/// minimizing path away from the straight segment.
pub fn len_class_with_margin(field: &ConformalField, p: i64, q: i64, margin: i64) -> Result<f64> {
    if (p, q) == (0, 0) {
        return Err(Error::InvalidInput(
            "class (0, 0) has no positive length".into(),
        ));
    }
    if margin < 1 {
        return Err(Error::InvalidInput("cover margin must be >= 1".into()));
    }
    // Lengths are orientation-invariant; canonicalizing the sign makes the
    // symmetry exact rather than exact-up-to-summation-order.
    let (p, q) = if p < 0 || (p == 0 && q < 0) {
        (-p, -q)
    } else {
        (p, q)
    };
    let n = field.n_grid as i64;
    let tau = field.tau;

    let i_lo = (0.min(p) - margin) * n;
    let i_hi = (0.max(p) + margin) * n;
    let j_lo = (0.min(q) - margin) * n;
    let j_hi = (0.max(q) + margin) * n;
    let width = (i_hi - i_lo + 1) as usize;
    let height = (j_hi - j_lo + 1) as usize;
    let nodes = width * height;
    let index = |i: i64, j: i64| -> usize { ((i - i_lo) as usize) * height + (j - j_lo) as usize };

    // Node conformal factors, periodic in both directions.
    let mut rho = vec![0.0f64; nodes];
    for i in i_lo..=i_hi {
        for j in j_lo..=j_hi {
            rho[index(i, j)] = field.rho(i, j);
        }
    }

    // Euclidean length in C of each stencil edge.
    let step = 1.0 / n as f64;
    let edge_len: Vec<f64> = DIRS
        .iter()
        .map(|&(di, dj)| {
            (Complex64::new(di as f64, 0.0) + Complex64::new(dj as f64, 0.0) * tau).norm() * step
        })
        .collect();

    let source = index(0, 0);
    let target = index(p * n, q * n);

    // Dijkstra keyed on the raw bits of the (non-negative) distances:
    // IEEE order matches numeric order there, so the heap needs no float
    // wrapper type.
    let mut dist = vec![f64::INFINITY; nodes];
    let mut settled = vec![false; nodes];
    let mut heap: BinaryHeap<Reverse<(u64, u32)>> = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((0u64, source as u32)));

    while let Some(Reverse((bits, node))) = heap.pop() {
        let node = node as usize;
        if settled[node] {
            continue;
        }
        settled[node] = true;
        if node == target {
            break;
        }
        let d = f64::from_bits(bits);
        let i = i_lo + (node / height) as i64;
        let j = j_lo + (node % height) as i64;
        let rho_here = rho[node];
        for (dir, &(di, dj)) in DIRS.iter().enumerate() {
            let ni = i + di;
            let nj = j + dj;
            if ni < i_lo || ni > i_hi || nj < j_lo || nj > j_hi {
                continue;
            }
            let next = index(ni, nj);
            if settled[next] {
                continue;
            }
            let candidate = d + 0.5 * (rho_here + rho[next]) * edge_len[dir];
            if candidate < dist[next] {
                dist[next] = candidate;
                heap.push(Reverse((candidate.to_bits(), next as u32)));
            }
        }
    }
    Ok(dist[target])
}

/// The extremal-length ratio of the class: len^2 / area.
pub fn ratio(field: &ConformalField, p: i64, q: i64) -> Result<f64> {
    let len = len_class(field, p, q)?;
    Ok(len * len / area(field))
}

/// Result of a Loewner-chain check: the minimum ratio over primitive
/// classes in the coefficient box, its witness, and the margin against the
/// uniform bound 2/sqrt(3) inflated by the documented grid tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct LoewnerReport {
    pub min_ratio: f64,
    pub witness: (i64, i64),
    pub bound: f64,
    pub margin: f64,
    pub ok: bool,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Primitive classes (p, q) with max(|p|, |q|) <= bound, one sign
/// representative each, in deterministic order.
pub fn primitive_classes(bound: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for p in 0..=bound {
        for q in -bound..=bound {
            if p == 0 && q <= 0 {
                continue;
            }
            if q < 0 && p == 0 {
                continue;
            }
            if gcd(p, q) == 1 {
                out.push((p, q));
            }
        }
    }
    out.sort();
    out
}

/// Checks the chain "systole ratio <= extremal volume <= 2/sqrt(3)" for
/// the sampled conformal metric: the minimum over primitive classes of
/// len^2/area must stay below 2/sqrt(3) * (1 + RATIO_GRID_TOL). The caller
/// should pass a reduced tau.
pub fn loewner_check(field: &ConformalField, coeff_bound: i64) -> Result<LoewnerReport> {
    if coeff_bound < 1 {
        return Err(Error::InvalidInput("coeff_bound must be >= 1".into()));
    }
    let a = area(field);
    let mut min_ratio = f64::INFINITY;
    let mut witness = (0i64, 0i64);
    for (p, q) in primitive_classes(coeff_bound) {
        let len = len_class(field, p, q)?;
        let r = len * len / a;
        if r < min_ratio {
            min_ratio = r;
            witness = (p, q);
        }
    }
    let bound = 2.0 / 3.0f64.sqrt() * (1.0 + RATIO_GRID_TOL);
    Ok(LoewnerReport {
        min_ratio,
        witness,
        bound,
        margin: bound - min_ratio,
        ok: min_ratio <= bound,
    })
}
