//! Complex tori, decomposable homology classes and Siegel parameters.
//!
//! A torus is the quotient of C^n by a full-rank lattice given through 2n
//! complex generator vectors. Every invariant in this crate reduces to two
//! determinants computed from those generators: the complex determinant of
//! a period matrix (the volume of a flat cycle) and the absolute real
//! determinant of the stacked generator matrix (the covolume, i.e. the
//! Euclidean volume of a fundamental domain).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Scale-free degeneracy threshold: a generator matrix is accepted as full
/// rank when |det| exceeds this factor times the product of generator norms.
pub const RANK_TOL: f64 = 1e-12;

/// Tolerance for rejecting asymmetric Siegel input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A full-rank lattice in C^n, i.e. the torus C^n / Lambda.
///
/// Generators are stored as raw complex vectors; both determinants are
/// derived from this single source of truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct ComplexLattice {
    n: usize,
    generators: Vec<Vec<Complex64>>,
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    n: usize,
    generators: Vec<Vec<[f64; 2]>>,
}

impl From<ComplexLattice> for LatticeRepr {
    fn from(lat: ComplexLattice) -> Self {
        LatticeRepr {
            n: lat.n,
            generators: lat
                .generators
                .iter()
                .map(|g| g.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<LatticeRepr> for ComplexLattice {
    type Error = Error;
    fn try_from(repr: LatticeRepr) -> Result<Self> {
        let generators = repr
            .generators
            .into_iter()
            .map(|g| {
                g.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect();
        ComplexLattice::new(repr.n, generators)
    }
}

impl ComplexLattice {
    /// Builds a lattice from 2n generators of length n each, rejecting
    /// degenerate input (|det| <= RANK_TOL * product of generator norms).
    pub fn new(n: usize, generators: Vec<Vec<Complex64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLattice("dimension n must be positive".into()));
        }
        if generators.len() != 2 * n {
            return Err(Error::InvalidLattice(format!(
                "expected {} generators, got {}",
                2 * n,
                generators.len()
            )));
        }
        for (k, g) in generators.iter().enumerate() {
            if g.len() != n {
                return Err(Error::InvalidLattice(format!(
                    "generators[{k}] has length {}, expected {n}",
                    g.len()
                )));
            }
            if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidLattice(format!(
                    "generators[{k}] has a non-finite entry"
                )));
            }
        }
        let lat = ComplexLattice { n, generators };
        let scale: f64 = lat
            .generators
            .iter()
            .map(|g| g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .product();
        let det = linalg::real_det(&lat.real_generator_matrix()).abs();
        if !(det > RANK_TOL * scale) {
            return Err(Error::InvalidLattice(format!(
                "generators are numerically rank deficient (|det| = {det:e})"
            )));
        }
        Ok(lat)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<Complex64>] {
        &self.generators
    }

    /// The 2n x 2n real matrix whose column k stacks generator k as
    /// (Re z_1, Im z_1, ..., Re z_n, Im z_n), interleaving real and
    /// imaginary parts per complex coordinate.
    pub fn real_generator_matrix(&self) -> Vec<Vec<f64>> {
        let dim = 2 * self.n;
        let mut m = vec![vec![0.0; dim]; dim];
        for (k, g) in self.generators.iter().enumerate() {
            for (i, z) in g.iter().enumerate() {
                m[2 * i][k] = z.re;
                m[2 * i + 1][k] = z.im;
            }
        }
        m
    }

    /// Euclidean volume of the fundamental domain: |det| of the real
    /// generator matrix. Strictly positive for any constructed lattice.
    pub fn covolume(&self) -> f64 {
        linalg::real_det(&self.real_generator_matrix()).abs()
    }

    /// Period matrix of a decomposable class: column j is the lattice
    /// vector sum_k coeffs[j][k] * generator_k spanning the subtorus.
    pub fn period_matrix(&self, class: &DecomposableClass) -> Result<Vec<Vec<Complex64>>> {
        if class.n() != self.n || class.cols() != 2 * self.n {
            return Err(Error::DimensionMismatch(format!(
                "class is {}x{}, lattice expects {}x{}",
                class.n(),
                class.cols(),
                self.n,
                2 * self.n
            )));
        }
        let mut m = vec![vec![Complex64::new(0.0, 0.0); self.n]; self.n];
        for (j, row) in class.coeffs().iter().enumerate() {
            for (k, &c) in row.iter().enumerate() {
                if c != 0 {
                    let c = c as f64;
                    for i in 0..self.n {
                        m[i][j] += c * self.generators[k][i];
                    }
                }
            }
        }
        Ok(m)
    }

    /// The lattice Z^n + tau Z^n attached to a Siegel parameter: generators
    /// e_1, ..., e_n followed by tau e_1, ..., tau e_n.
    pub fn from_siegel(point: &SiegelPoint) -> ComplexLattice {
        let n = point.n();
        let mut generators = Vec::with_capacity(2 * n);
        for j in 0..n {
            let mut g = vec![Complex64::new(0.0, 0.0); n];
            g[j] = Complex64::new(1.0, 0.0);
            generators.push(g);
        }
        for j in 0..n {
            let g = (0..n)
                .map(|i| Complex64::new(point.a()[i][j], point.b()[i][j]))
                .collect();
            generators.push(g);
        }
        // B positive definite makes this full rank, so new() cannot fail.
        ComplexLattice::new(n, generators).expect("Siegel lattice is full rank")
    }

    /// The rescaled lattice c * Lambda (a biholomorphic torus for c != 0).
    pub fn scaled(&self, c: Complex64) -> Result<ComplexLattice> {
        ComplexLattice::new(
            self.n,
            self.generators
                .iter()
                .map(|g| g.iter().map(|z| c * z).collect())
                .collect(),
        )
    }

    /// Recombines generators by an integer matrix u (2n x 2n, |det| = 1):
    /// new generator k is sum_l u[l][k] * generator_l.
    pub fn recombined(&self, u: &[Vec<i64>]) -> Result<ComplexLattice> {
        let dim = 2 * self.n;
        if u.len() != dim || u.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "recombination matrix must be {dim}x{dim}"
            )));
        }
        let det = linalg::integer_det(u);
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        let generators = (0..dim)
            .map(|k| {
                (0..self.n)
                    .map(|i| {
                        (0..dim)
                            .map(|l| (u[l][k] as f64) * self.generators[l][i])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        ComplexLattice::new(self.n, generators)
    }
}

/// A homology class carried by a subtorus: n integer combinations of the
/// 2n generators, one per row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "ClassRepr", into = "ClassRepr")]
pub struct DecomposableClass {
    coeffs: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct ClassRepr {
    coeffs: Vec<Vec<i64>>,
}

impl From<DecomposableClass> for ClassRepr {
    fn from(c: DecomposableClass) -> Self {
        ClassRepr { coeffs: c.coeffs }
    }
}

impl TryFrom<ClassRepr> for DecomposableClass {
    type Error = Error;
    fn try_from(repr: ClassRepr) -> Result<Self> {
        DecomposableClass::new(repr.coeffs)
    }
}

impl DecomposableClass {
    /// Validates an n x 2n integer coefficient matrix of full rational rank.
    pub fn new(coeffs: Vec<Vec<i64>>) -> Result<Self> {
        let n = coeffs.len();
        if n == 0 {
            return Err(Error::InvalidInput("class needs at least one row".into()));
        }
        if coeffs.iter().any(|r| r.len() != 2 * n) {
            return Err(Error::DimensionMismatch(format!(
                "class coefficient rows must have length {}",
                2 * n
            )));
        }
        if linalg::integer_rank(&coeffs) != n {
            return Err(Error::InvalidInput(
                "class coefficients are rationally dependent; \
                 non-decomposable classes are unsupported"
                    .into(),
            ));
        }
        Ok(DecomposableClass { coeffs })
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    fn cols(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn coeffs(&self) -> &[Vec<i64>] {
        &self.coeffs
    }

    /// Convenience constructor for the n = 1 class (p, q).
    pub fn one_dim(p: i64, q: i64) -> Result<Self> {
        DecomposableClass::new(vec![vec![p, q]])
    }
}

/// A point tau = A + iB of the Siegel space: A, B symmetric, B positive
/// definite. Asymmetric input is rejected rather than symmetrized so that
/// caller bugs stay visible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SiegelRepr", into = "SiegelRepr")]
pub struct SiegelPoint {
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct SiegelRepr {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
}

impl From<SiegelPoint> for SiegelRepr {
    fn from(p: SiegelPoint) -> Self {
        SiegelRepr { a: p.a, b: p.b }
    }
}

impl TryFrom<SiegelRepr> for SiegelPoint {
    type Error = Error;
    fn try_from(repr: SiegelRepr) -> Result<Self> {
        SiegelPoint::new(repr.a, repr.b)
    }
}

fn max_asymmetry(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[i][j] - m[j][i]).abs());
        }
    }
    worst
}

impl SiegelPoint {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::InvalidInput("Siegel point needs n >= 1".into()));
        }
        if b.len() != n || a.iter().any(|r| r.len() != n) || b.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(
                "A and B must be square of the same size".into(),
            ));
        }
        let asym = max_asymmetry(&a).max(max_asymmetry(&b));
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        if linalg::cholesky(&b).is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(SiegelPoint { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<f64>] {
        &self.b
    }

    /// det(B), which is the covolume of the attached lattice Z^n + tau Z^n.
    pub fn det_b(&self) -> f64 {
        linalg::real_det(&self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lattice_1d(g1: Complex64, g2: Complex64) -> ComplexLattice {
        ComplexLattice::new(1, vec![vec![g1], vec![g2]]).unwrap()
    }

    /// Independent 4x4 determinant by cofactor expansion along the first row.
    fn det4_cofactor(m: &[Vec<f64>]) -> f64 {
        fn det3(m: &[Vec<f64>]) -> f64 {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        let mut det = 0.0;
        for col in 0..4 {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != col)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            det += sign * m[0][col] * det3(&minor);
        }
        det
    }

    #[test]
    fn real_matrix_identity_case() {
        let lat = lattice_1d(c(1.0, 0.0), c(0.0, 1.0));
        assert_eq!(
            lat.real_generator_matrix(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]]
        );
    }

    #[test]
    fn real_matrix_layout_for_one_tau() {
        let lat = lattice_1d(c(1.0, 0.0), c(0.3, 1.7));
        assert_eq!(
            lat.real_generator_matrix(),
            vec![vec![1.0, 0.3], vec![0.0, 1.7]]
        );
    }

    #[test]
    fn real_matrix_det_matches_cofactor_oracle_n2() {
        // Fixed "random" generators, checked against a hand-rolled 4x4 oracle.
        let gens = vec![
            vec![c(1.1, 0.2), c(-0.4, 0.9)],
            vec![c(0.3, 1.4), c(0.8, -0.1)],
            vec![c(-0.7, 0.5), c(1.2, 0.6)],
            vec![c(0.9, -0.8), c(0.1, 1.3)],
        ];
        let lat = ComplexLattice::new(2, gens).unwrap();
        let m = lat.real_generator_matrix();
        let oracle = det4_cofactor(&m).abs();
        assert!((lat.covolume() - oracle).abs() <= 1e-12 * oracle.max(1.0));
    }

    #[test]
    fn covolume_examples() {
        assert!((lattice_1d(c(1.0, 0.0), c(0.0, 1.0)).covolume() - 1.0).abs() < 1e-15);
        // {1, tau} has covolume Im tau.
        let lat = lattice_1d(c(1.0, 0.0), c(0.25, 2.5));
        assert!((lat.covolume() - 2.5).abs() < 1e-14);
        // Z^2 + iZ^2 is the unit hypercube.
        let lat = gaussian_two_dim();
        assert!((lat.covolume() - 1.0).abs() < 1e-15);
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

    #[test]
    fn degenerate_lattice_is_rejected() {
        let err = ComplexLattice::new(1, vec![vec![c(1.0, 0.0)], vec![c(2.0, 0.0)]]);
        assert!(matches!(err, Err(Error::InvalidLattice(_))));
        // Scale-free: a tiny but honest lattice passes.
        assert!(ComplexLattice::new(1, vec![vec![c(1e-8, 0.0)], vec![c(0.0, 1e-8)]]).is_ok());
    }

    #[test]
    fn period_matrix_examples() {
        let tau = c(0.3, 1.7);
        let lat = lattice_1d(c(1.0, 0.0), tau);
        let one = DecomposableClass::one_dim(1, 0).unwrap();
        let m = lat.period_matrix(&one).unwrap();
        assert!((m[0][0] - c(1.0, 0.0)).norm() < 1e-15);
        // H_1 is identified with the lattice: (p, q) maps to p + q tau.
        let pq = DecomposableClass::one_dim(3, -2).unwrap();
        let m = lat.period_matrix(&pq).unwrap();
        assert!((m[0][0] - (c(3.0, 0.0) - 2.0 * tau)).norm() < 1e-15);
        // Selecting the real sublattice Z^2 gives the identity.
        let lat2 = gaussian_two_dim();
        let real_class = DecomposableClass::new(vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap();
        let m = lat2.period_matrix(&real_class).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((m[i][j] - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn period_matrix_dimension_mismatch() {
        let lat = gaussian_two_dim();
        let cls = DecomposableClass::one_dim(1, 0).unwrap();
        assert!(matches!(
            lat.period_matrix(&cls),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn from_siegel_examples() {
        let p = SiegelPoint::new(vec![vec![0.0]], vec![vec![1.0]]).unwrap();
        let lat = ComplexLattice::from_siegel(&p);
        assert_eq!(lat.generators(), &[vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]]);

        let p = SiegelPoint::new(
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let lat = ComplexLattice::from_siegel(&p);
        assert!((lat.covolume() - 1.0).abs() < 1e-15);

        // Hexagonal point: direct complex arithmetic oracle e^{i pi/3}.
        let b = (3.0f64).sqrt() / 2.0;
        let p = SiegelPoint::new(vec![vec![0.5]], vec![vec![b]]).unwrap();
        let lat = ComplexLattice::from_siegel(&p);
        let expected = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        assert!((lat.generators()[1][0] - expected).norm() < 1e-15);
    }

    #[test]
    fn siegel_rejects_asymmetric_and_indefinite() {
        assert!(matches!(
            SiegelPoint::new(
                vec![vec![0.0, 0.1], vec![0.0, 0.0]],
                vec![vec![1.0, 0.0], vec![0.0, 1.0]]
            ),
            Err(Error::NotSymmetric(_))
        ));
        assert!(matches!(
            SiegelPoint::new(vec![vec![0.0]], vec![vec![-1.0]]),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn class_rejects_rationally_dependent_rows() {
        assert!(DecomposableClass::new(vec![vec![1, 0, 2, 0], vec![2, 0, 4, 0]]).is_err());
        assert!(DecomposableClass::new(vec![vec![1, 0, 0, 0], vec![0, 0, 1, 0]]).is_ok());
    }

    #[test]
    fn lattice_json_contract() {
        let lat = lattice_1d(c(1.0, 0.0), c(0.0, 1.0));
        let json = serde_json::to_string(&lat).unwrap();
        assert_eq!(json, r#"{"n":1,"generators":[[[1.0,0.0]],[[0.0,1.0]]]}"#);
        let back: ComplexLattice = serde_json::from_str(&json).unwrap();
        assert_eq!(back, lat);
        let cls: DecomposableClass = serde_json::from_str(r#"{"coeffs":[[1,0]]}"#).unwrap();
        assert_eq!(cls.coeffs(), &[vec![1, 0]]);
        let sp: SiegelPoint = serde_json::from_str(r#"{"A":[[0.5]],"B":[[0.9]]}"#).unwrap();
        assert_eq!(sp.a()[0][0], 0.5);
    }

    #[test]
    fn recombined_rejects_non_unimodular() {
        let lat = lattice_1d(c(1.0, 0.0), c(0.0, 1.0));
        let err = lat.recombined(&[vec![2, 0], vec![0, 1]]);
        assert!(matches!(err, Err(Error::NotUnimodular(2))));
    }
}
