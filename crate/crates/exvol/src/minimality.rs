//! Numerical verification that flat representatives minimize the
//! volume functional within their homology class.
//!
//! A flat cycle is perturbed by trigonometric polynomials (periodic by
//! construction, with exact derivatives) and its volume is computed by
//! composite midpoint quadrature, which converges spectrally for these
//! smooth periodic integrands. The check is one-sided (perturbed volume
//! at least flat volume minus the quadrature tolerance); no attempt is
//! made to search for lower values outside the sampled family, so the
//! sweep guards the numerics, not the underlying minimality fact.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants;
use crate::lattice::{ComplexLattice, DecomposableClass};
use crate::linalg;

/// Absolute quadrature tolerance granted to the minimality margin at
/// Q >= 256.
pub const MARGIN_TOL: f64 = 1e-6;

/// Default quadrature resolution for 1d cycles.
pub const DEFAULT_Q_1D: usize = 4096;

/// Default per-axis quadrature resolution for 2d cycles.
pub const DEFAULT_Q_2D: usize = 256;

/// Default trigonometric degree of the perturbations.
pub const DEFAULT_DEGREE: u32 = 3;

/// A perturbed loop on a one-dimensional torus: gamma(t) = t * lambda +
/// f(t) with lambda = p g_1 + q g_2 and f a trigonometric polynomial with
/// complex coefficients for frequencies 1..=K (so f(0) = f(1) exactly).
#[derive(Debug, Clone)]
pub struct PerturbedCycle1d {
    lambda: Complex64,
    cos_coeffs: Vec<Complex64>,
    sin_coeffs: Vec<Complex64>,
    quadrature: usize,
}

impl PerturbedCycle1d {
    pub fn new(
        lattice: &ComplexLattice,
        p: i64,
        q: i64,
        cos_coeffs: Vec<Complex64>,
        sin_coeffs: Vec<Complex64>,
        quadrature: usize,
    ) -> Result<Self> {
        if lattice.n() != 1 {
            return Err(Error::DimensionMismatch(
                "perturbed cycles need n = 1".into(),
            ));
        }
        if (p, q) == (0, 0) {
            return Err(Error::InvalidInput("class (0, 0) is trivial".into()));
        }
        if cos_coeffs.len() != sin_coeffs.len() {
            return Err(Error::DimensionMismatch(
                "cosine and sine coefficient lists must have equal length".into(),
            ));
        }
        if quadrature < 64 {
            return Err(Error::InvalidInput("quadrature needs Q >= 64".into()));
        }
        let lambda =
            (p as f64) * lattice.generators()[0][0] + (q as f64) * lattice.generators()[1][0];
        Ok(PerturbedCycle1d {
            lambda,
            cos_coeffs,
            sin_coeffs,
            quadrature,
        })
    }

    pub fn flat(lattice: &ComplexLattice, p: i64, q: i64, quadrature: usize) -> Result<Self> {
        PerturbedCycle1d::new(lattice, p, q, vec![], vec![], quadrature)
    }

    pub fn flat_volume(&self) -> f64 {
        self.lambda.norm()
    }

    /// gamma'(t) = lambda + f'(t).
    pub fn velocity(&self, t: f64) -> Complex64 {
        let mut v = self.lambda;
        for (k, (a, b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let omega = std::f64::consts::TAU * (k + 1) as f64;
            let (sin, cos) = (omega * t).sin_cos();
            v += omega * (b * cos - a * sin);
        }
        v
    }

    pub fn quadrature(&self) -> usize {
        self.quadrature
    }
}

/// Volume of the perturbed loop: the composite midpoint quadrature of
/// |gamma'(t)| over [0, 1].
pub fn cycle_omega_volume_1d(cycle: &PerturbedCycle1d) -> f64 {
    cycle_omega_volume_1d_rotated(cycle, 0.0)
}

/// Volume with the form rotated by a constant phase; only the absolute
/// value of the rotated integrand enters, so the result must not change.
pub fn cycle_omega_volume_1d_rotated(cycle: &PerturbedCycle1d, phase: f64) -> f64 {
    let q = cycle.quadrature;
    let rot = Complex64::from_polar(1.0, phase);
    let mut sum = 0.0;
    for i in 0..q {
        let t = (i as f64 + 0.5) / q as f64;
        sum += (rot * cycle.velocity(t)).norm();
    }
    sum / q as f64
}

/// A doubly periodic perturbation mode.
#[derive(Debug, Clone)]
struct Mode2d {
    freq: (f64, f64),
    cos: [Complex64; 2],
    sin: [Complex64; 2],
}

/// A perturbed subtorus in a two-dimensional torus:
/// x(t) = t_1 lambda_1 + t_2 lambda_2 + eps * f(t) with f a doubly
/// periodic trigonometric polynomial valued in C^2.
#[derive(Debug, Clone)]
pub struct PerturbedTorus2d {
    lambda: [[Complex64; 2]; 2], // lambda[j][i]: coordinate i of spanning vector j
    eps: f64,
    modes: Vec<Mode2d>,
    quadrature: usize,
}

impl PerturbedTorus2d {
    pub fn new(
        lattice: &ComplexLattice,
        class: &DecomposableClass,
        eps: f64,
        quadrature: usize,
    ) -> Result<Self> {
        if lattice.n() != 2 {
            return Err(Error::DimensionMismatch(
                "perturbed surfaces need n = 2".into(),
            ));
        }
        if quadrature < 64 {
            return Err(Error::InvalidInput("quadrature needs Q >= 64".into()));
        }
        let p = lattice.period_matrix(class)?;
        let lambda = [[p[0][0], p[1][0]], [p[0][1], p[1][1]]];
        Ok(PerturbedTorus2d {
            lambda,
            eps,
            modes: Vec::new(),
            quadrature,
        })
    }

    /// Attaches seeded random perturbation modes up to the given degree.
    pub fn with_random_modes(mut self, rng: &mut ChaCha8Rng, degree: u32) -> Self {
        let deg = degree as i64;
        let mut modes = Vec::new();
        for j in 0..=deg {
            for k in -deg..=deg {
                if j == 0 && k <= 0 {
                    continue;
                }
                let decay = 1.0 / (1.0 + j as f64 + k.abs() as f64);
                let mut draw =
                    || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * decay;
                modes.push(Mode2d {
                    freq: (j as f64, k as f64),
                    cos: [draw(), draw()],
                    sin: [draw(), draw()],
                });
            }
        }
        self.modes = modes;
        self
    }

    pub fn flat_volume(&self) -> f64 {
        let m = vec![
            vec![self.lambda[0][0], self.lambda[1][0]],
            vec![self.lambda[0][1], self.lambda[1][1]],
        ];
        linalg::complex_det(&m).norm()
    }

    /// Tangent vectors (d x / d t_1, d x / d t_2) at (t_1, t_2).
    fn tangents(&self, t1: f64, t2: f64) -> ([Complex64; 2], [Complex64; 2]) {
        let mut d1 = self.lambda[0];
        let mut d2 = self.lambda[1];
        for mode in &self.modes {
            let angle = std::f64::consts::TAU * (mode.freq.0 * t1 + mode.freq.1 * t2);
            let (sin, cos) = angle.sin_cos();
            let w1 = std::f64::consts::TAU * mode.freq.0 * self.eps;
            let w2 = std::f64::consts::TAU * mode.freq.1 * self.eps;
            for i in 0..2 {
                let swing = mode.sin[i] * cos - mode.cos[i] * sin;
                d1[i] += w1 * swing;
                d2[i] += w2 * swing;
            }
        }
        (d1, d2)
    }
}

/// Volume of the perturbed surface: tensor-product midpoint quadrature of
/// the absolute complex determinant of the two tangent vectors.
pub fn surface_omega_volume_2d(surface: &PerturbedTorus2d) -> f64 {
    surface_omega_volume_2d_rotated(surface, 0.0)
}

pub fn surface_omega_volume_2d_rotated(surface: &PerturbedTorus2d, phase: f64) -> f64 {
    let q = surface.quadrature;
    let rot = Complex64::from_polar(1.0, phase);
    let mut sum = 0.0;
    for i in 0..q {
        let t1 = (i as f64 + 0.5) / q as f64;
        for j in 0..q {
            let t2 = (j as f64 + 0.5) / q as f64;
            let (d1, d2) = surface.tangents(t1, t2);
            let det = d1[0] * d2[1] - d1[1] * d2[0];
            sum += (rot * det).norm();
        }
    }
    sum / (q * q) as f64
}

/// Outcome of a randomized minimality verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalityReport {
    pub trials: u64,
    pub violations: u64,
    pub min_margin: f64,
    pub flat_value: f64,
}

/// Verifies over seeded random perturbations (amplitudes up to eps_max,
/// per-trial ChaCha streams derived from the master seed) that the
/// perturbed volume never drops below the flat volume by more than
/// MARGIN_TOL. Requires a totally real class; dimension is read from the
/// lattice (1 or 2).
pub fn verify_minimality(
    lattice: &ComplexLattice,
    class: &DecomposableClass,
    trials: u64,
    seed: u64,
    eps_max: f64,
    quadrature: usize,
) -> Result<MinimalityReport> {
    if trials < 1 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    if !(eps_max >= 0.0) {
        return Err(Error::InvalidInput("eps_max must be non-negative".into()));
    }
    if !invariants::is_totally_real(lattice, class, invariants::DEFAULT_TR_TOL)? {
        return Err(Error::NotTotallyReal);
    }
    match lattice.n() {
        1 => {
            let (p, q) = (class.coeffs()[0][0], class.coeffs()[0][1]);
            let flat = PerturbedCycle1d::flat(lattice, p, q, quadrature)?.flat_volume();
            let mut min_margin = f64::INFINITY;
            let mut violations = 0u64;
            for trial in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial + 1);
                let eps: f64 = rng.gen_range(0.0..=eps_max);
                let k = DEFAULT_DEGREE as usize;
                let draw_coeffs = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
                    (1..=k)
                        .map(|freq| {
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                                * (eps / freq as f64)
                        })
                        .collect()
                };
                let cos_coeffs = draw_coeffs(&mut rng);
                let sin_coeffs = draw_coeffs(&mut rng);
                let cycle =
                    PerturbedCycle1d::new(lattice, p, q, cos_coeffs, sin_coeffs, quadrature)?;
                let volume = cycle_omega_volume_1d(&cycle);
                let margin = volume - flat;
                min_margin = min_margin.min(margin);
                if margin < -MARGIN_TOL {
                    violations += 1;
                }
            }
            Ok(MinimalityReport {
                trials,
                violations,
                min_margin,
                flat_value: flat,
            })
        }
        2 => {
            let flat = PerturbedTorus2d::new(lattice, class, 0.0, quadrature)?.flat_volume();
            let mut min_margin = f64::INFINITY;
            let mut violations = 0u64;
            for trial in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial + 1);
                let eps: f64 = rng.gen_range(0.0..=eps_max);
                let surface = PerturbedTorus2d::new(lattice, class, eps, quadrature)?
                    .with_random_modes(&mut rng, DEFAULT_DEGREE);
                let volume = surface_omega_volume_2d(&surface);
                let margin = volume - flat;
                min_margin = min_margin.min(margin);
                if margin < -MARGIN_TOL {
                    violations += 1;
                }
            }
            Ok(MinimalityReport {
                trials,
                violations,
                min_margin,
                flat_value: flat,
            })
        }
        n => Err(Error::DimensionMismatch(format!(
            "minimality verification supports n = 1 or 2, got {n}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square_torus() -> ComplexLattice {
        ComplexLattice::new(1, vec![vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]]).unwrap()
    }

    fn gaussian_two_dim() -> ComplexLattice {
        ComplexLattice::new(
            2,
            vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(0.0, 1.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 1.0)],
            ],
        )
        .unwrap()
    }

    fn z2_class() -> DecomposableClass {
        DecomposableClass::new(vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap()
    }

    /// Adaptive Simpson quadrature, the independent oracle for the 1d
    /// cycle volume.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(f, a, m);
            let right = simpson(f, m, b);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, left, tol / 2.0, depth - 1) + rec(f, m, b, right, tol / 2.0, depth - 1)
            }
        }
        let whole = simpson(f, a, b);
        rec(f, a, b, whole, tol, 24)
    }

    #[test]
    fn flat_cycle_equals_lattice_length() {
        for (p, q) in [(1i64, 0i64), (0, 1), (2, -3)] {
            let cycle = PerturbedCycle1d::flat(&square_torus(), p, q, 256).unwrap();
            let vol = cycle_omega_volume_1d(&cycle);
            let exact = (c(p as f64, 0.0) + c(0.0, q as f64)).norm();
            assert!((vol - exact).abs() <= 1e-12 * exact);
        }
    }

    #[test]
    fn sine_perturbation_matches_adaptive_quadrature() {
        // gamma(t) = t + 0.1 sin(2 pi t) i: the speed is
        // sqrt(1 + (0.2 pi cos(2 pi t))^2).
        let cycle = PerturbedCycle1d::new(
            &square_torus(),
            1,
            0,
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.1), c(0.0, 0.0), c(0.0, 0.0)],
            4096,
        )
        .unwrap();
        let got = cycle_omega_volume_1d(&cycle);
        let oracle = adaptive_simpson(
            &|t: f64| {
                let dy = 0.2 * std::f64::consts::PI * (std::f64::consts::TAU * t).cos();
                (1.0 + dy * dy).sqrt()
            },
            0.0,
            1.0,
            1e-12,
        );
        assert!((got - oracle).abs() <= 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn perturbed_volume_never_beats_flat_1d() {
        let lat = square_torus();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let coeffs = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
                (1..=3)
                    .map(|k| {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                            * (0.2 / k as f64)
                    })
                    .collect()
            };
            let cycle = PerturbedCycle1d::new(&lat, 1, 0, coeffs(&mut rng), coeffs(&mut rng), 1024)
                .unwrap();
            assert!(cycle_omega_volume_1d(&cycle) >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn flat_surface_equals_determinant() {
        let surface = PerturbedTorus2d::new(&gaussian_two_dim(), &z2_class(), 0.0, 64).unwrap();
        let vol = surface_omega_volume_2d(&surface);
        assert!((vol - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn perturbed_surface_respects_minimality() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let surface = PerturbedTorus2d::new(&gaussian_two_dim(), &z2_class(), 0.05, 256)
            .unwrap()
            .with_random_modes(&mut rng, 3);
        let vol = surface_omega_volume_2d(&surface);
        assert!(vol >= 1.0 - 1e-6);
    }

    #[test]
    fn quadrature_doubling_is_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let coarse = PerturbedTorus2d::new(&gaussian_two_dim(), &z2_class(), 0.05, 128)
            .unwrap()
            .with_random_modes(&mut rng, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let fine = PerturbedTorus2d::new(&gaussian_two_dim(), &z2_class(), 0.05, 256)
            .unwrap()
            .with_random_modes(&mut rng, 3);
        let a = surface_omega_volume_2d(&coarse);
        let b = surface_omega_volume_2d(&fine);
        assert!((a - b).abs() < 1e-6, "Q=128: {a}, Q=256: {b}");
    }

    #[test]
    fn rotation_insensitivity() {
        let cycle = PerturbedCycle1d::new(
            &square_torus(),
            1,
            0,
            vec![c(0.05, 0.02)],
            vec![c(-0.03, 0.04)],
            512,
        )
        .unwrap();
        let plain = cycle_omega_volume_1d(&cycle);
        for phase in [0.7, -1.9, 3.0] {
            let rotated = cycle_omega_volume_1d_rotated(&cycle, phase);
            assert!((rotated - plain).abs() <= 1e-15 * plain.max(1.0));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let surface = PerturbedTorus2d::new(&gaussian_two_dim(), &z2_class(), 0.05, 64)
            .unwrap()
            .with_random_modes(&mut rng, 2);
        let plain = surface_omega_volume_2d(&surface);
        let rotated = surface_omega_volume_2d_rotated(&surface, 1.1);
        assert!((rotated - plain).abs() <= 1e-15 * plain.max(1.0));
    }

    #[test]
    fn reparametrization_insensitivity() {
        // Precompose with the circle diffeomorphism
        // phi(t) = t + 0.1 sin(2 pi t) / (2 pi), phi' = 1 + 0.1 cos(2 pi t).
        let cycle = PerturbedCycle1d::new(
            &square_torus(),
            1,
            1,
            vec![c(0.06, -0.01)],
            vec![c(0.02, 0.05)],
            4096,
        )
        .unwrap();
        let direct = cycle_omega_volume_1d(&cycle);
        let q = 4096;
        let mut reparam = 0.0;
        for i in 0..q {
            let t = (i as f64 + 0.5) / q as f64;
            let angle = std::f64::consts::TAU * t;
            let phi = t + 0.1 * angle.sin() / std::f64::consts::TAU;
            let dphi = 1.0 + 0.1 * angle.cos();
            reparam += cycle.velocity(phi).norm() * dphi;
        }
        reparam /= q as f64;
        assert!((reparam - direct).abs() < 1e-6);
    }

    #[test]
    fn verify_minimality_reports() {
        let report = verify_minimality(
            &square_torus(),
            &DecomposableClass::one_dim(1, 0).unwrap(),
            50,
            17,
            0.3,
            1024,
        )
        .unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.min_margin >= -MARGIN_TOL);
        assert!((report.flat_value - 1.0).abs() < 1e-15);

        // eps_max = 0: every margin is zero within quadrature accuracy.
        let report = verify_minimality(
            &square_torus(),
            &DecomposableClass::one_dim(1, 0).unwrap(),
            5,
            17,
            0.0,
            1024,
        )
        .unwrap();
        assert!(report.min_margin.abs() <= 1e-12);
    }

    #[test]
    fn margin_grows_with_amplitude() {
        // Mean margin at eps = 0.2 exceeds the mean at eps = 0.05: strict
        // inequality away from the flat representative.
        let lat = square_torus();
        let mean_margin = |eps: f64| -> f64 {
            let mut total = 0.0;
            for trial in 0..30u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(99);
                rng.set_stream(trial + 1);
                let coeffs = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
                    (1..=3)
                        .map(|k| {
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                                * (eps / k as f64)
                        })
                        .collect()
                };
                let cycle =
                    PerturbedCycle1d::new(&lat, 1, 0, coeffs(&mut rng), coeffs(&mut rng), 1024)
                        .unwrap();
                total += cycle_omega_volume_1d(&cycle) - 1.0;
            }
            total / 30.0
        };
        assert!(mean_margin(0.2) > mean_margin(0.05));
    }

    #[test]
    fn non_tr_class_is_rejected() {
        let line = DecomposableClass::new(vec![vec![1, 0, 0, 0], vec![0, 0, 1, 0]]).unwrap();
        assert!(matches!(
            verify_minimality(&gaussian_two_dim(), &line, 1, 0, 0.1, 64),
            Err(Error::NotTotallyReal)
        ));
    }
}
