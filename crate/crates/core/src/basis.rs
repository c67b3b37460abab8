//! Structured exponential systems `E(H; a₁,…,a_k)`, their fiber matrices,
//! and the exact Riesz/frame constants those matrices determine.
//!
//! On a fiber class `D_R` the analysis operator factors as `T_ω = E_R U_ω`
//! with `E_R[l][j] = e^{2πi a_j·λ_l}` and `U_ω = diag(e^{2πi a_j·ω})` unitary,
//! so the squared singular values of `E_R` bound `‖T_ω x‖²` uniformly over
//! the class. Constants are reported in this squared-norm convention, and
//! additionally scaled by `|D|` for the `L²(Ω)` coefficient normalization.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::admissibility::AdmissibilityCertificate;
use crate::eigen::{gram_rows, hermitian_eigen_range};
use crate::error::{Error, Result};
use crate::lattice::{dual_pairing, DualVector, Lattice, LatticePoint};
use crate::multitile::FiberPartition;

/// `eigen_min` below this marks a report as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Offset {
    /// `a = (s/n)·v` with `v = (Mᵀ)⁻¹w`.
    Structured { s: i64, n: u64, v: DualVector },
    /// An arbitrary real vector.
    Free(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialSystem {
    lattice: Lattice,
    offsets: Vec<Offset>,
    /// Set when indexed offsets use a composite modulus: invertibility of the
    /// fiber matrices is then not automatic and must be read off the report.
    pub composite_warning: bool,
}

impl ExponentialSystem {
    pub fn new(lattice: Lattice, offsets: Vec<Offset>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::NoOffsets);
        }
        let mut shared: Option<(u64, &DualVector)> = None;
        let mut seen: Vec<(i64, u64)> = Vec::new();
        for off in &offsets {
            match off {
                Offset::Structured { s, n, v } => {
                    lattice.check_dim(v.dim())?;
                    if *n == 0 {
                        return Err(Error::BadCertificate("n must be at least 1".into()));
                    }
                    match shared {
                        Some((n0, v0)) if n0 != *n || v0 != v => return Err(Error::MixedStructure),
                        _ => shared = Some((*n, v)),
                    }
                    let r = s.rem_euclid(*n as i64) as u64;
                    if let Some(&(first, _)) = seen.iter().find(|&&(_, r0)| r0 == r) {
                        return Err(Error::DuplicateResidue {
                            first,
                            second: *s,
                            n: *n,
                        });
                    }
                    seen.push((*s, r));
                }
                Offset::Free(a) => lattice.check_dim(a.len())?,
            }
        }
        Ok(ExponentialSystem {
            lattice,
            offsets,
            composite_warning: false,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn offsets(&self) -> &[Offset] {
        &self.offsets
    }

    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    /// The shared `(n, v)` when at least one offset is structured.
    pub fn structure(&self) -> Option<(u64, &DualVector)> {
        self.offsets.iter().find_map(|o| match o {
            Offset::Structured { n, v, .. } => Some((*n, v)),
            Offset::Free(_) => None,
        })
    }

    /// Offset `a_j` as a real vector.
    pub fn offset_vector(&self, j: usize) -> Vec<f64> {
        match &self.offsets[j] {
            Offset::Structured { s, n, v } => {
                let scale = *s as f64 / *n as f64;
                self.lattice
                    .dual_to_real(v)
                    .into_iter()
                    .map(|x| x * scale)
                    .collect()
            }
            Offset::Free(a) => a.clone(),
        }
    }
}

/// `a_j = ((j-1)/n)·v` for `j = 1..k`: consecutive columns of the order-`n`
/// Fourier matrix.
pub fn build_offsets(
    lattice: &Lattice,
    c: &AdmissibilityCertificate,
    k: usize,
) -> Result<ExponentialSystem> {
    if k == 0 {
        return Err(Error::NoOffsets);
    }
    if k as u64 > c.n() {
        return Err(Error::KExceedsN { k, n: c.n() });
    }
    let s: Vec<i64> = (0..k as i64).collect();
    build_offsets_indexed(lattice, c, &s)
}

/// `a_j = (s_j/n)·v`. Any distinct residues are accepted; a composite `n`
/// sets [`ExponentialSystem::composite_warning`].
pub fn build_offsets_indexed(
    lattice: &Lattice,
    c: &AdmissibilityCertificate,
    s: &[i64],
) -> Result<ExponentialSystem> {
    let offsets = s
        .iter()
        .map(|&s| Offset::Structured {
            s,
            n: c.n(),
            v: c.v().clone(),
        })
        .collect();
    let mut sys = ExponentialSystem::new(lattice.clone(), offsets)?;
    let consecutive = s.iter().enumerate().all(|(i, &x)| x == i as i64);
    sys.composite_warning = !consecutive && is_composite(c.n());
    Ok(sys)
}

fn is_composite(n: u64) -> bool {
    n > 3 && (2..).take_while(|d| d * d <= n).any(|d| n.is_multiple_of(d))
}

/// `e^{2πi r/n}`, exact at quarter turns.
pub(crate) fn root_of_unity(r: u64, n: u64) -> Complex64 {
    let r = r % n;
    if (4 * r).is_multiple_of(n) {
        return match 4 * r / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * r as f64 / n as f64)
}

/// `e^{2πi x}` with the argument reduced first.
pub(crate) fn cis_turns(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (x - x.round()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberMatrix {
    pub class_points: Vec<LatticePoint>,
    /// `l×k`, rows follow `class_points`, columns follow the offsets.
    pub entries: Vec<Vec<Complex64>>,
}

impl FiberMatrix {
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Builds `E_R`. Structured phases come from the exact residue
/// `s_j·⟨v, λ⟩ mod n`; free phases from `a_j·(Mz)` in floating point.
pub fn fiber_matrix(points: &[LatticePoint], sys: &ExponentialSystem) -> Result<FiberMatrix> {
    if points.is_empty() {
        return Err(Error::EmptyClass);
    }
    let lattice = &sys.lattice;
    let mut entries = Vec::with_capacity(points.len());
    for z in points {
        lattice.check_dim(z.dim())?;
        let lam = lattice.point_to_real(z);
        let row = sys
            .offsets
            .iter()
            .map(|off| match off {
                Offset::Structured { s, n, v } => {
                    let pairing = i128::from(dual_pairing(v, z)?);
                    let n = i128::from(*n);
                    let r = (pairing.rem_euclid(n) * i128::from(*s).rem_euclid(n)).rem_euclid(n);
                    Ok(root_of_unity(r as u64, n as u64))
                }
                Offset::Free(a) => Ok(cis_turns(a.iter().zip(&lam).map(|(x, y)| x * y).sum())),
            })
            .collect::<Result<Vec<_>>>()?;
        entries.push(row);
    }
    Ok(FiberMatrix {
        class_points: points.to_vec(),
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsKind {
    /// Every fiber has exactly `k` points and every `E_R` is invertible.
    RieszBounds,
    /// Some fiber (possibly the uncovered part) has fewer than `k` points,
    /// and every nonempty `E_R` has full row rank.
    FrameBounds,
    /// Some `eigen_min` is below [`DEGENERACY_TOL`].
    Degenerate,
}

impl std::fmt::Display for BoundsKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BoundsKind::RieszBounds => "RieszBounds",
            BoundsKind::FrameBounds => "FrameBounds",
            BoundsKind::Degenerate => "Degenerate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassBounds {
    pub points: Vec<LatticePoint>,
    /// `⟨v, λ⟩ mod n` per point, for structured systems.
    pub residues: Option<Vec<u64>>,
    pub eig_min: f64,
    pub eig_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub per_class: Vec<ClassBounds>,
    /// `min eig_min` over classes (squared-norm convention).
    pub a: f64,
    /// `max eig_max` over classes.
    pub b: f64,
    /// `|D|·A`, the lower constant against `Σ|c_{j,h}|²` in `L²(Ω)`.
    pub a_l2: f64,
    pub b_l2: f64,
    pub kind: BoundsKind,
    pub k: usize,
}

/// Extremal eigenvalues of `E_R E_R*` per class, and their global min/max.
///
/// An empty partition gives `A = B = 0` and [`BoundsKind::Degenerate`].
pub fn riesz_bounds(p: &FiberPartition, sys: &ExponentialSystem) -> Result<BoundsReport> {
    let k = sys.k();
    if p.lattice != sys.lattice {
        return Err(Error::DimensionMismatch {
            expected: sys.lattice.dim(),
            found: p.lattice.dim(),
        });
    }
    let structure = sys.structure();
    let mut per_class = Vec::with_capacity(p.classes.len());
    for class in &p.classes {
        if class.points.len() > k {
            return Err(Error::ClassTooLarge {
                size: class.points.len(),
                k,
            });
        }
        let e = fiber_matrix(&class.points, sys)?;
        let (eig_min, eig_max) = hermitian_eigen_range(&gram_rows(&e.entries))?;
        let residues = match structure {
            Some((n, v)) => Some(
                class
                    .points
                    .iter()
                    .map(|z| crate::lattice::pairing_residue(v, z, n))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        per_class.push(ClassBounds {
            points: class.points.clone(),
            residues,
            eig_min: eig_min.max(0.0),
            eig_max,
        });
    }
    let a = per_class.iter().map(|c| c.eig_min).fold(f64::INFINITY, f64::min);
    let b = per_class.iter().map(|c| c.eig_max).fold(0.0, f64::max);
    let (a, b) = if per_class.is_empty() { (0.0, 0.0) } else { (a, b) };
    let full = per_class.iter().all(|c| c.points.len() == k) && p.uncovered.is_empty();
    let kind = if per_class.is_empty() || a < DEGENERACY_TOL {
        BoundsKind::Degenerate
    } else if full {
        BoundsKind::RieszBounds
    } else {
        BoundsKind::FrameBounds
    };
    let det = p.lattice.det_abs_f64();
    Ok(BoundsReport {
        per_class,
        a,
        b,
        a_l2: det * a,
        b_l2: det * b,
        kind,
        k,
    })
}
