//! Reduction of moduli parameters to fundamental domains.
//!
//! For n = 1 this is the classical modular reduction of tau in the upper
//! half plane to the domain Im tau > 0, |Re tau| <= 1/2, |tau| >= 1, with
//! the full move trace recorded so the result can be replayed. For n >= 2
//! only a partial reduction is provided: integer translation of the real
//! part and a pairwise size-reduction pass on the imaginary part's Gram
//! matrix. The uniform bound constants beyond n = 1 are taken as caller
//! input rather than computed.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::SiegelPoint;

/// Tolerance used on the fundamental-domain boundary inequalities.
pub const FD_TOL: f64 = 1e-12;

/// Default iteration cap. The classical reduction always terminates, so
/// hitting the cap signals NaN/Inf input.
pub const DEFAULT_MAX_ITER: usize = 1000;

/// A single modular move: integer translation or inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionStep {
    /// tau -> tau + k
    Translate(i64),
    /// tau -> -1/tau
    Invert,
}

impl Serialize for ReductionStep {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ReductionStep::Translate(k) => s.serialize_str(&format!("T:{k}")),
            ReductionStep::Invert => s.serialize_str("S"),
        }
    }
}

impl<'de> Deserialize<'de> for ReductionStep {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "S" {
            return Ok(ReductionStep::Invert);
        }
        if let Some(k) = s.strip_prefix("T:") {
            let k = k
                .parse::<i64>()
                .map_err(|_| D::Error::custom(format!("bad translation step {s:?}")))?;
            return Ok(ReductionStep::Translate(k));
        }
        Err(D::Error::custom(format!("unknown reduction step {s:?}")))
    }
}

/// The ordered moves taking the input into the fundamental domain, plus the
/// final point. Replaying the steps on the input reproduces `final_tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    #[serde(
        rename = "final",
        serialize_with = "serialize_complex",
        deserialize_with = "deserialize_complex"
    )]
    pub final_tau: Complex64,
}

fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn deserialize_complex<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<Complex64, D::Error> {
    let [re, im] = <[f64; 2]>::deserialize(d)?;
    Ok(Complex64::new(re, im))
}

impl ReductionTrace {
    /// Applies the recorded steps to an arbitrary starting point.
    pub fn replay(&self, start: Complex64) -> Complex64 {
        let mut tau = start;
        for step in &self.steps {
            tau = match step {
                ReductionStep::Translate(k) => tau + *k as f64,
                ReductionStep::Invert => -tau.inv(),
            };
        }
        tau
    }
}

/// Membership in the fundamental domain, with FD_TOL slack on both
/// boundary inequalities.
pub fn is_in_fundamental_domain(tau: Complex64) -> bool {
    tau.im > 0.0 && tau.re.abs() <= 0.5 + FD_TOL && tau.norm() >= 1.0 - FD_TOL
}

/// Reduces tau (Im tau > 0) into the fundamental domain by translations
/// and inversions.
///
/// On the boundary the representative with Re tau >= 0 is chosen, so the
/// result is deterministic there.
pub fn reduce_tau(tau: Complex64, max_iter: usize) -> Result<ReductionTrace> {
    if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::InvalidInput(format!(
            "tau = {tau} is not in the upper half plane"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidInput("max_iter must be >= 1".into()));
    }
    let mut t = tau;
    let mut steps = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(Error::NonConvergence(max_iter));
        }
        // |Re| <= 1/2 is already in the strip, so the boundary Re = 1/2
        // stays put instead of bouncing between the two representatives.
        if t.re.abs() > 0.5 + FD_TOL {
            let k = t.re.round();
            t += Complex64::new(-k, 0.0);
            steps.push(ReductionStep::Translate(-k as i64));
        }
        if t.norm_sqr() < 1.0 - FD_TOL {
            t = -t.inv();
            steps.push(ReductionStep::Invert);
        } else {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(max_iter));
    }
    // Boundary canonicalization: Re = -1/2 maps to +1/2 by translation, and
    // a point on the unit circle with Re < 0 mirrors to Re > 0 by inversion.
    if (t.re + 0.5).abs() <= FD_TOL {
        t += Complex64::new(1.0, 0.0);
        steps.push(ReductionStep::Translate(1));
    }
    if (t.norm() - 1.0).abs() <= FD_TOL && t.re < -FD_TOL {
        t = -t.inv();
        steps.push(ReductionStep::Invert);
    }
    Ok(ReductionTrace {
        steps,
        final_tau: t,
    })
}

/// The pair (mu_alpha, mu_alpha') for the lattice {1, tau}: the extremal
/// volumes of the classes ending at 1 and at tau, which come out as
/// 1 / Im tau and |tau|^2 / Im tau.
pub fn mu_pair(tau: Complex64) -> Result<(f64, f64)> {
    if !(tau.im > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tau = {tau} is not in the upper half plane"
        )));
    }
    Ok((1.0 / tau.im, tau.norm_sqr() / tau.im))
}

/// Partial reduction of a Siegel point toward the fundamental domain of
/// the symplectic action.
///
/// The imaginary part B is replaced by U^t B U for a unimodular U found by
/// a pairwise Lagrange-style size reduction of the Gram matrix (det B is
/// preserved and no diagonal entry ever increases); the real part is
/// transported by the same congruence and then translated entrywise into
/// [-1/2, 1/2] by a symmetric integer matrix.
pub fn translate_reduce_siegel(point: &SiegelPoint) -> Result<SiegelPoint> {
    let n = point.n();
    let (b, u) = size_reduce_gram(point.b());
    // Entrywise rounding of a symmetric matrix is symmetric, so A stays valid.
    // A' = U^t A U, then subtract the nearest symmetric integer matrix.
    let mut a = congruence(point.a(), &u);
    for i in 0..n {
        for j in 0..n {
            let k = if a[i][j].abs() <= 0.5 + FD_TOL {
                0.0
            } else {
                a[i][j].round()
            };
            a[i][j] -= k;
        }
    }
    SiegelPoint::new(a, b)
}

/// U^t M U for an integer matrix U, computing the upper triangle and
/// mirroring so the result is exactly symmetric when M is.
fn congruence(m: &[Vec<f64>], u: &[Vec<i64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    // tmp = M U
    let mut tmp = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            tmp[i][j] = (0..n).map(|k| m[i][k] * u[k][j] as f64).sum();
        }
    }
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = (0..n).map(|k| (u[k][i] as f64) * tmp[k][j]).sum();
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// Pairwise Lagrange-style size reduction of a positive definite Gram
/// matrix. Returns (U^t B U, U) with U unimodular. Each applied step
/// strictly decreases one diagonal entry, so the sweep terminates.
fn size_reduce_gram(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<i64>>) {
    let n = b.len();
    let mut g: Vec<Vec<f64>> = b.to_vec();
    let mut u: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();

    // Column op on U: col_j -= k * col_i, matching b_j -> b_j - k b_i.
    let apply = |u: &mut Vec<Vec<i64>>, g: &mut Vec<Vec<f64>>, i: usize, j: usize, k: i64| {
        for row in u.iter_mut() {
            row[j] -= k * row[i];
        }
        let kf = k as f64;
        // Gram update for b_j' = b_j - k b_i.
        let gii = g[i][i];
        let gij = g[i][j];
        g[j][j] += kf * kf * gii - 2.0 * kf * gij;
        for l in 0..g.len() {
            if l != j {
                let v = g[l][j] - kf * g[l][i];
                g[l][j] = v;
                g[j][l] = v;
            }
        }
        g[i][j] = gij - kf * gii;
        g[j][i] = g[i][j];
    };

    for _ in 0..64 {
        let mut changed = false;
        // Keep diagonal sorted ascending (swaps are unimodular).
        for i in 0..n {
            for j in i + 1..n {
                if g[j][j] < g[i][i] {
                    for row in u.iter_mut() {
                        row.swap(i, j);
                    }
                    g.swap(i, j);
                    for row in g.iter_mut() {
                        row.swap(i, j);
                    }
                    changed = true;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let k = (g[i][j] / g[i][i]).round();
                if k == 0.0 {
                    continue;
                }
                // Only apply when the diagonal strictly decreases; a tie at
                // |g_ij| = g_ii / 2 would otherwise ping-pong forever.
                let delta = k * k * g[i][i] - 2.0 * k * g[i][j];
                if delta < -1e-14 * g[j][j] {
                    apply(&mut u, &mut g, i, j, k as i64);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    // Recompute from the original matrix for an exactly symmetric result.
    (congruence(b, &u), u)
}

/// mu of the polarized class together with the caller-supplied uniform
/// bound check: mu = 1/det(B), bound_ok = (mu <= d).
pub fn polarized_mu_and_bound(point: &SiegelPoint, d: f64) -> Result<(f64, bool)> {
    if !(d > 0.0) {
        return Err(Error::InvalidInput("bound d must be positive".into()));
    }
    let mu = 1.0 / point.det_b();
    Ok((mu, mu <= d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reduce_already_reduced_is_empty() {
        let trace = reduce_tau(c(0.0, 1.0), DEFAULT_MAX_ITER).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.final_tau, c(0.0, 1.0));
    }

    #[test]
    fn reduce_generic_point() {
        let tau = c(2.3, 0.4);
        let trace = reduce_tau(tau, DEFAULT_MAX_ITER).unwrap();
        assert!(is_in_fundamental_domain(trace.final_tau));
        assert!(trace.final_tau.im >= 3.0f64.sqrt() / 2.0 - FD_TOL);
        // Replaying the trace reproduces the final point.
        assert!((trace.replay(tau) - trace.final_tau).norm() < 1e-12);
    }

    #[test]
    fn boundary_half_is_allowed() {
        let trace = reduce_tau(c(0.5, 2.0), DEFAULT_MAX_ITER).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.final_tau, c(0.5, 2.0));
    }

    #[test]
    fn boundary_canonicalizes_to_nonnegative_re() {
        let trace = reduce_tau(c(-0.5, 2.0), DEFAULT_MAX_ITER).unwrap();
        assert!((trace.final_tau.re - 0.5).abs() <= FD_TOL);
        let theta = 2.0 * std::f64::consts::PI / 3.0;
        let trace = reduce_tau(Complex64::from_polar(1.0, theta), DEFAULT_MAX_ITER).unwrap();
        assert!(trace.final_tau.re >= -FD_TOL);
        assert!(is_in_fundamental_domain(trace.final_tau));
    }

    #[test]
    fn reduce_rejects_lower_half_plane() {
        assert!(reduce_tau(c(0.0, -1.0), DEFAULT_MAX_ITER).is_err());
        assert!(reduce_tau(c(0.0, 0.0), DEFAULT_MAX_ITER).is_err());
        assert!(reduce_tau(c(f64::NAN, 1.0), DEFAULT_MAX_ITER).is_err());
    }

    #[test]
    fn membership_examples() {
        assert!(is_in_fundamental_domain(c(0.0, 1.0)));
        assert!(!is_in_fundamental_domain(c(0.3, 0.4)));
        let hex = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        assert!(is_in_fundamental_domain(hex));
    }

    #[test]
    fn mu_pair_examples() {
        let (m1, m2) = mu_pair(c(0.0, 1.0)).unwrap();
        assert!((m1 - 1.0).abs() < 1e-15 && (m2 - 1.0).abs() < 1e-15);
        let hex = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let (m1, m2) = mu_pair(hex).unwrap();
        let bound = 2.0 / 3.0f64.sqrt();
        assert!((m1 - bound).abs() < 1e-14 && (m2 - bound).abs() < 1e-14);
        let (m1, m2) = mu_pair(c(0.0, 2.0)).unwrap();
        assert!((m1 - 0.5).abs() < 1e-15 && (m2 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn trace_json_format() {
        let trace = reduce_tau(c(2.3, 0.4), DEFAULT_MAX_ITER).unwrap();
        let json = serde_json::to_string(&trace).unwrap();
        assert!(json.starts_with(r#"{"steps":["#));
        assert!(json.contains(r#""final":["#));
        let back: ReductionTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, trace);
    }

    #[test]
    fn siegel_fixed_point() {
        let p = SiegelPoint::new(
            vec![vec![0.2, -0.1], vec![-0.1, 0.4]],
            vec![vec![1.0, 0.1], vec![0.1, 1.2]],
        )
        .unwrap();
        let q = translate_reduce_siegel(&p).unwrap();
        assert_eq!(q.a(), p.a());
        assert_eq!(q.b(), p.b());
    }

    #[test]
    fn siegel_translation_only_for_n1() {
        let p = SiegelPoint::new(vec![vec![2.3]], vec![vec![0.4]]).unwrap();
        let q = translate_reduce_siegel(&p).unwrap();
        assert!((q.a()[0][0] - 0.3).abs() < 1e-12);
        assert_eq!(q.b()[0][0], 0.4);
    }

    #[test]
    fn siegel_preserves_det_and_shrinks_diagonal() {
        // A skew Gram matrix that needs genuine size reduction.
        let b = vec![
            vec![1.0, 0.9, 0.0],
            vec![0.9, 1.0, 0.4],
            vec![0.0, 0.4, 2.0],
        ];
        let a = vec![
            vec![0.7, 1.3, 0.0],
            vec![1.3, -0.9, 0.2],
            vec![0.0, 0.2, 0.0],
        ];
        let p = SiegelPoint::new(a, b.clone()).unwrap();
        let q = translate_reduce_siegel(&p).unwrap();
        let det_before = p.det_b();
        let det_after = q.det_b();
        assert!((det_before - det_after).abs() <= 1e-12 * det_before.abs());
        let max_diag_before = (0..3).map(|i| b[i][i]).fold(f64::MIN, f64::max);
        let max_diag_after = (0..3).map(|i| q.b()[i][i]).fold(f64::MIN, f64::max);
        assert!(max_diag_after <= max_diag_before + 1e-12);
        for i in 0..3 {
            for j in 0..3 {
                assert!(q.a()[i][j].abs() <= 0.5 + FD_TOL);
            }
        }
    }

    #[test]
    fn siegel_det_preserved_on_random_two_dim_points() {
        // Determinant multiplicativity oracle: det U = +-1, so det B is
        // unchanged by the congruence.
        let points = [
            (
                vec![vec![0.9, 0.3], vec![0.3, -0.7]],
                vec![vec![0.5, 0.45], vec![0.45, 0.6]],
            ),
            (
                vec![vec![-1.4, 0.0], vec![0.0, 2.2]],
                vec![vec![2.0, 1.9], vec![1.9, 2.0]],
            ),
            (
                vec![vec![0.1, 0.6], vec![0.6, 0.1]],
                vec![vec![1.0, -0.8], vec![-0.8, 3.0]],
            ),
        ];
        for (a, b) in points {
            let p = SiegelPoint::new(a, b).unwrap();
            let q = translate_reduce_siegel(&p).unwrap();
            let before = p.det_b();
            let after = q.det_b();
            assert!((before - after).abs() <= 1e-12 * before.abs());
        }
    }

    #[test]
    fn reduce_reports_non_convergence_when_capped() {
        // 2.3 + 0.4i needs several moves; a cap of one iteration is hit.
        assert!(matches!(
            reduce_tau(c(2.3, 0.4), 1),
            Err(Error::NonConvergence(1))
        ));
    }

    #[test]
    fn polarized_examples() {
        // Equality case: B = sqrt(3)/2, d = 2/sqrt(3).
        let b = 3.0f64.sqrt() / 2.0;
        let p = SiegelPoint::new(vec![vec![0.0]], vec![vec![b]]).unwrap();
        let d = 2.0 / 3.0f64.sqrt();
        let (mu, ok) = polarized_mu_and_bound(&p, d).unwrap();
        assert_eq!(mu, d);
        assert!(ok);

        let p = SiegelPoint::new(
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(polarized_mu_and_bound(&p, 2.0).unwrap(), (1.0, true));

        // mu_pair oracle: tau = A + 2i has mu_alpha = 1/2.
        let p = SiegelPoint::new(vec![vec![0.3]], vec![vec![2.0]]).unwrap();
        let (mu, ok) = polarized_mu_and_bound(&p, d).unwrap();
        let (oracle, _) = mu_pair(c(0.3, 2.0)).unwrap();
        assert_eq!(mu, oracle);
        assert!(ok);
    }
}
