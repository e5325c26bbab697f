//! Dense complex state vectors and observation-basis branch decomposition.
//!
//! A state `ψ` is expanded over an orthonormal set of continuer states
//! `ψ₁…ψₙ`. Whatever the continuers do not span is collected into a single
//! normalized dead branch `ψ_D` with a real, non-negative coefficient `a_D`,
//! so that `ψ = Σ aᵢψᵢ + a_D ψ_D` holds exactly (up to rounding).

use std::fmt;
use std::ops::Index;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// Maximum deviation of a Gram matrix entry from the identity.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

/// Residual norm below which no dead branch is reported.
pub const DEAD_BRANCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("state vector must have dimension >= 1")]
    Empty,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("vectors {i} and {j} are not orthonormal: gram entry {re:+.3e}{im:+.3e}i deviates by {deviation:.3e}")]
    NotOrthonormal {
        i: usize,
        j: usize,
        re: f64,
        im: f64,
        deviation: f64,
    },
    #[error("{count} basis vectors cannot fit in dimension {dimension}")]
    TooManyVectors { count: usize, dimension: usize },
    #[error("vector {index} is linearly dependent on the preceding vectors")]
    LinearlyDependent { index: usize },
    #[error("cannot normalize a zero vector")]
    ZeroNorm,
}

/// Numerical tolerances used by [`decompose_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub orthonormal: f64,
    pub dead_branch: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            orthonormal: ORTHONORMAL_TOL,
            dead_branch: DEAD_BRANCH_TOL,
        }
    }
}

/// A finite-dimensional complex vector, either position samples `⟨x|ψ⟩` or
/// frequency amplitudes `⟨k|ψ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        if amplitudes.is_empty() {
            return Err(StateError::Empty);
        }
        Ok(StateVector { amplitudes })
    }

    pub fn from_real(values: &[f64]) -> Result<Self, StateError> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(dimension: usize) -> Result<Self, StateError> {
        Self::new(vec![Complex64::new(0.0, 0.0); dimension])
    }

    /// Unit vector along axis `k`.
    pub fn basis(dimension: usize, k: usize) -> Result<Self, StateError> {
        if k >= dimension {
            return Err(StateError::DimensionMismatch {
                left: k + 1,
                right: dimension,
            });
        }
        let mut v = Self::zeros(dimension)?;
        v.amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.amplitudes.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= ORTHONORMAL_TOL
    }

    pub fn normalized(&self) -> Result<Self, StateError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(StateError::ZeroNorm);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        StateVector {
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn add(&self, other: &StateVector) -> Result<Self, StateError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &StateVector) -> Result<Self, StateError> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self += factor · other`.
    pub fn axpy(&mut self, factor: Complex64, other: &StateVector) -> Result<(), StateError> {
        check_dims(self, other)?;
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += factor * b;
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &StateVector,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self, StateError> {
        check_dims(self, other)?;
        Ok(StateVector {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }
}

impl Index<usize> for StateVector {
    type Output = Complex64;

    fn index(&self, index: usize) -> &Complex64 {
        &self.amplitudes[index]
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

fn check_dims(a: &StateVector, b: &StateVector) -> Result<(), StateError> {
    if a.dimension() != b.dimension() {
        return Err(StateError::DimensionMismatch {
            left: a.dimension(),
            right: b.dimension(),
        });
    }
    Ok(())
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64, StateError> {
    check_dims(a, b)?;
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Checks that `vectors` are pairwise orthonormal and share one dimension.
pub fn check_orthonormal(vectors: &[StateVector], tol: f64) -> Result<(), StateError> {
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().skip(i) {
            let g = inner_product(a, b)?;
            let target = if i == j { 1.0 } else { 0.0 };
            let deviation = (g - target).norm();
            if deviation > tol {
                return Err(StateError::NotOrthonormal {
                    i,
                    j,
                    re: g.re,
                    im: g.im,
                    deviation,
                });
            }
        }
    }
    Ok(())
}

/// Expansion `ψ = Σ aᵢψᵢ + a_D ψ_D` over a set of continuer states.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchDecomposition {
    pub coefficients: Vec<Complex64>,
    /// Real and non-negative; zero when no dead branch exists.
    pub dead_coefficient: Complex64,
    pub dead_branch: Option<StateVector>,
    pub basis: Vec<StateVector>,
}

impl BranchDecomposition {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn has_dead_branch(&self) -> bool {
        self.dead_branch.is_some()
    }

    /// `Σᵢ|aᵢ|² + |a_D|²`.
    pub fn total_weight(&self) -> f64 {
        self.coefficients.iter().map(|a| a.norm_sqr()).sum::<f64>()
            + self.dead_coefficient.norm_sqr()
    }

    /// Rebuilds `Σ aᵢψᵢ + a_D ψ_D`.
    pub fn reconstruct(&self, dimension: usize) -> Result<StateVector, StateError> {
        let mut out = StateVector::zeros(dimension)?;
        for (a, psi) in self.coefficients.iter().zip(&self.basis) {
            out.axpy(*a, psi)?;
        }
        if let Some(dead) = &self.dead_branch {
            out.axpy(self.dead_coefficient, dead)?;
        }
        Ok(out)
    }
}

pub fn decompose(
    psi: &StateVector,
    continuers: &[StateVector],
) -> Result<BranchDecomposition, StateError> {
    decompose_with(psi, continuers, &Tolerances::default())
}

pub fn decompose_with(
    psi: &StateVector,
    continuers: &[StateVector],
    tol: &Tolerances,
) -> Result<BranchDecomposition, StateError> {
    for c in continuers {
        check_dims(c, psi)?;
    }
    check_orthonormal(continuers, tol.orthonormal)?;

    let mut coefficients = Vec::with_capacity(continuers.len());
    let mut residual = psi.clone();
    for c in continuers {
        let a = inner_product(c, psi)?;
        residual.axpy(-a, c)?;
        coefficients.push(a);
    }

    let r = residual.norm();
    let (dead_coefficient, dead_branch) = if r > tol.dead_branch {
        (
            Complex64::new(r, 0.0),
            Some(residual.scale(Complex64::new(1.0 / r, 0.0))),
        )
    } else {
        (Complex64::new(0.0, 0.0), None)
    };

    Ok(BranchDecomposition {
        coefficients,
        dead_coefficient,
        dead_branch,
        basis: continuers.to_vec(),
    })
}

/// Extends an orthonormal set to a full orthonormal basis of `dimension`.
///
/// New directions come from Gram–Schmidt on complex Gaussian draws from a
/// ChaCha8 generator seeded with `seed`, so output is reproducible.
pub fn random_completion(
    partial_basis: &[StateVector],
    dimension: usize,
    seed: u64,
) -> Result<Vec<StateVector>, StateError> {
    if dimension == 0 {
        return Err(StateError::Empty);
    }
    if partial_basis.len() > dimension {
        return Err(StateError::TooManyVectors {
            count: partial_basis.len(),
            dimension,
        });
    }
    for v in partial_basis {
        if v.dimension() != dimension {
            return Err(StateError::DimensionMismatch {
                left: v.dimension(),
                right: dimension,
            });
        }
    }

    // Dependence check first: a dependent set can never be orthonormal, but it
    // gets its own error.
    let mut probe: Vec<StateVector> = Vec::with_capacity(partial_basis.len());
    for (index, v) in partial_basis.iter().enumerate() {
        match orthogonalize(v, &probe) {
            Some(u) => probe.push(u),
            None => return Err(StateError::LinearlyDependent { index }),
        }
    }
    check_orthonormal(partial_basis, ORTHONORMAL_TOL)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis = partial_basis.to_vec();
    while basis.len() < dimension {
        let draw: Vec<Complex64> = (0..dimension)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let draw = StateVector { amplitudes: draw };
        if let Some(u) = orthogonalize(&draw, &basis) {
            basis.push(u);
        }
    }
    Ok(basis)
}

/// Two-pass modified Gram–Schmidt. `None` if `v` is (numerically) in the span.
fn orthogonalize(v: &StateVector, basis: &[StateVector]) -> Option<StateVector> {
    let original = v.norm();
    if original == 0.0 {
        return None;
    }
    let mut u = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c: Complex64 = b
                .amplitudes
                .iter()
                .zip(&u.amplitudes)
                .map(|(x, y)| x.conj() * y)
                .sum();
            for (a, e) in u.amplitudes.iter_mut().zip(&b.amplitudes) {
                *a -= c * e;
            }
        }
    }
    let n = u.norm();
    if n <= 1e-8 * original {
        return None;
    }
    Some(u.scale(Complex64::new(1.0 / n, 0.0)))
}
