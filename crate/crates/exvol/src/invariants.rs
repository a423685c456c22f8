//! Extremal volume and related invariants of complex tori.
//!
//! For the standard form Omega = dz^1 ^ ... ^ dz^n on C^n / Lambda, a
//! decomposable class alpha carried by the lattice vectors lambda_1, ...,
//! lambda_n has flat-cycle volume |det P| with P the period matrix, and
//! mu_alpha = |det P|^2 / covolume when the subtorus is totally real,
//! mu_alpha = 0 otherwise.
//!
//! The simpler cohomological invariant mu' drops the totally-real gate:
//! on a torus the space of holomorphic volume forms is one-dimensional, so
//! mu'_alpha = |det P|^2 / covolume for every class.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{ComplexLattice, DecomposableClass};
use crate::linalg;

/// Default scale-free tolerance for the totally-real test. Double precision
/// determinants of well-conditioned small matrices are accurate to ~1e-13.
pub const DEFAULT_TR_TOL: f64 = 1e-10;

fn period_det(lattice: &ComplexLattice, class: &DecomposableClass) -> Result<Complex64> {
    Ok(linalg::complex_det(&lattice.period_matrix(class)?))
}

/// Product of the Euclidean norms of the class's spanning lattice vectors.
fn span_norm_product(lattice: &ComplexLattice, class: &DecomposableClass) -> Result<f64> {
    let p = lattice.period_matrix(class)?;
    let n = lattice.n();
    Ok((0..n)
        .map(|j| (0..n).map(|i| p[i][j].norm_sqr()).sum::<f64>().sqrt())
        .product())
}

/// The flat-cycle volume of the class: |det| of its period matrix.
pub fn omega_volume_class(lattice: &ComplexLattice, class: &DecomposableClass) -> Result<f64> {
    Ok(period_det(lattice, class)?.norm())
}

/// Same volume after rotating the volume form by a constant phase.
/// Rotation must not change the result; this exists so tests can assert it.
pub fn omega_volume_class_rotated(
    lattice: &ComplexLattice,
    class: &DecomposableClass,
    phase: f64,
) -> Result<f64> {
    Ok((Complex64::from_polar(1.0, phase) * period_det(lattice, class)?).norm())
}

/// Whether the spanning vectors are C-linearly independent, judged by
/// |det P| > tol * product of their norms.
pub fn is_totally_real(
    lattice: &ComplexLattice,
    class: &DecomposableClass,
    tol: f64,
) -> Result<bool> {
    let det = omega_volume_class(lattice, class)?;
    Ok(det > tol * span_norm_product(lattice, class)?)
}

/// Constant phase of the flat subtorus: theta = arg det P. Rotating the
/// volume form by exp(-i theta) makes the subtorus special.
pub fn phase(lattice: &ComplexLattice, class: &DecomposableClass) -> Result<f64> {
    if !is_totally_real(lattice, class, DEFAULT_TR_TOL)? {
        return Err(Error::NotTotallyReal);
    }
    Ok(period_det(lattice, class)?.arg())
}

/// Extremal volume of the class with the default totally-real tolerance.
pub fn extremal_volume(lattice: &ComplexLattice, class: &DecomposableClass) -> Result<f64> {
    extremal_volume_with_tol(lattice, class, DEFAULT_TR_TOL)
}

/// Extremal volume: |det P|^2 / covolume for a totally real class, exactly
/// zero for any other class.
pub fn extremal_volume_with_tol(
    lattice: &ComplexLattice,
    class: &DecomposableClass,
    tol: f64,
) -> Result<f64> {
    if !is_totally_real(lattice, class, tol)? {
        return Ok(0.0);
    }
    let v = omega_volume_class(lattice, class)?;
    Ok(v * v / lattice.covolume())
}

/// The cohomological invariant mu': |det P|^2 / covolume with no
/// totally-real gate.
pub fn mu_prime(lattice: &ComplexLattice, class: &DecomposableClass) -> Result<f64> {
    let v = omega_volume_class(lattice, class)?;
    Ok(v * v / lattice.covolume())
}

/// Block-diagonal product torus of dimension n1 + n2.
pub fn product_lattice(a: &ComplexLattice, b: &ComplexLattice) -> ComplexLattice {
    let (n1, n2) = (a.n(), b.n());
    let n = n1 + n2;
    let zero = Complex64::new(0.0, 0.0);
    let mut generators = Vec::with_capacity(2 * n);
    for g in a.generators() {
        let mut v = vec![zero; n];
        v[..n1].copy_from_slice(g);
        generators.push(v);
    }
    for g in b.generators() {
        let mut v = vec![zero; n];
        v[n1..].copy_from_slice(g);
        generators.push(v);
    }
    ComplexLattice::new(n, generators).expect("product of full-rank lattices is full rank")
}

/// Block-diagonal product class matching `product_lattice`'s generator order.
pub fn product_class(a: &DecomposableClass, b: &DecomposableClass) -> DecomposableClass {
    let (n1, n2) = (a.n(), b.n());
    let n = n1 + n2;
    let mut coeffs = Vec::with_capacity(n);
    for row in a.coeffs() {
        let mut v = vec![0i64; 2 * n];
        v[..2 * n1].copy_from_slice(row);
        coeffs.push(v);
    }
    for row in b.coeffs() {
        let mut v = vec![0i64; 2 * n];
        v[2 * n1..].copy_from_slice(row);
        coeffs.push(v);
    }
    DecomposableClass::new(coeffs).expect("product of full-rank classes is full rank")
}
