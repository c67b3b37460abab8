//! Full lattices `Λ = Mℤ^d` with exact rational bases and their duals.
//!
//! Lattice points and dual vectors are carried as integer coordinate
//! vectors: `λ = Mz` and `v = (Mᵀ)⁻¹w`. The pairing `⟨v, λ⟩` then reduces to
//! the integer dot product `w·z`, so residue arithmetic never touches floats.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Integer coordinates `z` of the lattice point `Mz`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint(pub Vec<i64>);

/// Integer coordinates `w` of the dual vector `(Mᵀ)⁻¹w`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualVector(pub Vec<i64>);

impl LatticePoint {
    pub fn zero(dim: usize) -> Self {
        LatticePoint(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl DualVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    basis: Vec<Vec<Rational>>,
    dual_basis: Vec<Vec<Rational>>,
    det_abs: Rational,
}

impl Lattice {
    /// Builds `Λ = Mℤ^d` from a square rational matrix, rows first.
    pub fn new(basis: Vec<Vec<Rational>>) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        if let Some(row) = basis.iter().find(|row| row.len() != dim) {
            return Err(Error::NotSquare {
                rows: dim,
                cols: row.len(),
            });
        }
        let (det, inverse) = invert(&basis).ok_or(Error::SingularMatrix)?;
        // (Mᵀ)⁻¹ = (M⁻¹)ᵀ
        let dual_basis = (0..dim)
            .map(|i| (0..dim).map(|j| inverse[j][i].clone()).collect())
            .collect();
        Ok(Lattice {
            basis,
            dual_basis,
            det_abs: det.abs(),
        })
    }

    /// `ℤ^d`.
    pub fn integer(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| rational::int(i64::from(i == j)))
                    .collect()
            })
            .collect();
        Lattice::new(basis).expect("identity is invertible")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    /// `(Mᵀ)⁻¹`, whose columns generate the dual lattice.
    pub fn dual_basis(&self) -> &[Vec<Rational>] {
        &self.dual_basis
    }

    /// `|det M|`, the measure of the fundamental domain `D = M[0,1)^d`.
    pub fn det_abs(&self) -> &Rational {
        &self.det_abs
    }

    pub fn det_abs_f64(&self) -> f64 {
        rational::to_f64(&self.det_abs)
    }

    /// Recomputes `|det M|` from the basis.
    pub fn recompute_det_abs(&self) -> Rational {
        invert(&self.basis)
            .map(|(d, _)| d.abs())
            .unwrap_or_else(Rational::zero)
    }

    pub fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            })
        }
    }

    /// `M(u + z)` in floating point. Geometry only; residues never go through here.
    pub fn embed_point(&self, u: &[f64], z: &LatticePoint) -> Vec<f64> {
        let shifted: Vec<f64> = u.iter().zip(&z.0).map(|(a, &b)| a + b as f64).collect();
        mat_vec_f64(&self.basis, &shifted)
    }

    /// `Mz` in floating point.
    pub fn point_to_real(&self, z: &LatticePoint) -> Vec<f64> {
        let z: Vec<f64> = z.0.iter().map(|&c| c as f64).collect();
        mat_vec_f64(&self.basis, &z)
    }

    /// `(Mᵀ)⁻¹w` in floating point.
    pub fn dual_to_real(&self, w: &DualVector) -> Vec<f64> {
        let w: Vec<f64> = w.0.iter().map(|&c| c as f64).collect();
        mat_vec_f64(&self.dual_basis, &w)
    }

    /// `(Mᵀ)⁻¹w` exactly.
    pub fn dual_to_exact(&self, w: &DualVector) -> Vec<Rational> {
        self.dual_basis
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&w.0)
                    .fold(Rational::zero(), |acc, (m, &c)| acc + m * rational::int(c))
            })
            .collect()
    }
}

fn mat_vec_f64(m: &[Vec<Rational>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .map(|(a, b)| rational::to_f64(a) * b)
                .sum()
        })
        .collect()
}

/// Gauss-Jordan elimination over the rationals. Returns the determinant
/// and the inverse, or `None` when singular.
fn invert(m: &[Vec<Rational>]) -> Option<(Rational, Vec<Vec<Rational>>)> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| rational::int(i64::from(i == j))).collect())
        .collect();
    let mut det = rational::int(1);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        if pivot != col {
            a.swap(pivot, col);
            inv.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
                let t = &f * &inv[col][j];
                inv[r][j] -= t;
            }
        }
    }
    Some((det, inv))
}

/// `⟨v, λ⟩ = w·z`, exact. Errors on overflow instead of wrapping.
pub fn dual_pairing(v: &DualVector, lambda: &LatticePoint) -> Result<i64> {
    if v.dim() != lambda.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: lambda.dim(),
        });
    }
    let mut acc: i128 = 0;
    for (&w, &z) in v.0.iter().zip(&lambda.0) {
        acc = acc
            .checked_add(i128::from(w) * i128::from(z))
            .ok_or(Error::Overflow)?;
    }
    i64::try_from(acc).map_err(|_| Error::Overflow)
}

/// `⟨v, λ⟩ mod n` in `[0, n)`.
pub fn pairing_residue(v: &DualVector, lambda: &LatticePoint, n: u64) -> Result<u64> {
    let p = i128::from(dual_pairing(v, lambda)?);
    Ok(p.rem_euclid(i128::from(n)) as u64)
}
