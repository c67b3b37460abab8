//! Generators for the example sets over `ℤ` and for simple box tiles.
//!
//! The unbounded examples are truncated at level `J`: the intervals
//! `I_j = [(2^j - 2)/2^j, (2^j - 1)/2^j)` for `j ≤ J` are placed, and the tail
//! `[1 - 2^-J, 1)` stays at multiplicity 1.

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticePoint};
use crate::multitile::{MultiTileSet, Piece};
use crate::oracle::kronecker_search;
use crate::rational::{dyadic, int};
use crate::region::UnitRegion;

/// `I_j = [1 - 2^{1-j}, 1 - 2^{-j})`, for `j ≥ 1`.
pub fn interval_i(j: u32) -> Result<UnitRegion> {
    if j == 0 {
        return Err(Error::MalformedBox { axis: 0 });
    }
    UnitRegion::interval(int(1) - dyadic(2, j), int(1) - dyadic(1, j))
}

/// The uncovered tail `[1 - 2^-J, 1)` of a level-`J` truncation.
pub fn tail_cell(j: u32) -> Result<UnitRegion> {
    UnitRegion::interval(int(1) - dyadic(1, j), int(1))
}

fn unit_piece(z: i64) -> Piece {
    Piece {
        region: UnitRegion::full(1),
        translate: LatticePoint(vec![z]),
    }
}

fn truncated(j_max: usize, mut translate: impl FnMut(usize) -> Result<i64>) -> Result<MultiTileSet> {
    let mut pieces = vec![unit_piece(0)];
    for j in 1..=j_max {
        pieces.push(Piece {
            region: interval_i(j as u32)?,
            translate: LatticePoint(vec![translate(j)?]),
        });
    }
    MultiTileSet::new(Lattice::integer(1), pieces)
}

/// `[0,1) ∪ ⋃_{j ≤ J} (I_j + j)`: a 2-tile whose fibers `{0, j}` defeat every
/// modulus.
pub fn example_2_10(j_max: usize) -> Result<MultiTileSet> {
    truncated(j_max, |j| Ok(j as i64))
}

/// `[0,1) ∪ ⋃_{j ≤ J} (I_j + 2j + 1)`: odd translates, admissible with `(2, 1)`.
pub fn example_2_11(j_max: usize) -> Result<MultiTileSet> {
    truncated(j_max, |j| Ok(2 * j as i64 + 1))
}

/// Parameters of the non-admissible set with translates `n_j = j·m_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerParams {
    pub a: [f64; 2],
    pub beta: [f64; 2],
    pub eps: f64,
    pub m_max: u64,
}

impl Default for KroneckerParams {
    fn default() -> Self {
        KroneckerParams {
            a: [std::f64::consts::SQRT_2, 3f64.sqrt()],
            beta: [0.25, 0.75],
            eps: 0.1,
            m_max: 1_000_000,
        }
    }
}

/// The set together with the multipliers `m_j` that were found.
#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerSet {
    pub set: MultiTileSet,
    pub multipliers: Vec<i64>,
}

/// `[0,1) ∪ ⋃_{j ≤ J} (I_j + j·m_j)` where `m_j` is the smallest multiplier
/// bringing `(e(a₁ j m), e(a₂ j m))` within `ε` of `(e(β₁), e(β₂))`.
pub fn example_kronecker(j_max: usize, params: &KroneckerParams) -> Result<KroneckerSet> {
    let mut multipliers = Vec::with_capacity(j_max);
    let set = truncated(j_max, |j| {
        let m = kronecker_search(params.a, j as i64, params.beta, params.eps, params.m_max)
            .ok_or(Error::KroneckerSearchFailed(j))?;
        multipliers.push(m);
        (j as i64).checked_mul(m).ok_or(Error::Overflow)
    })?;
    Ok(KroneckerSet { set, multipliers })
}

/// Fills the tail cell of [`example_kronecker`] with the translate
/// `(J+1)·m_{J+1}`, so that the tail's fiber matrix is as close to the target
/// as every other class. The result is an exact 2-tile.
pub fn example_kronecker_completed(j_max: usize, params: &KroneckerParams) -> Result<KroneckerSet> {
    let KroneckerSet {
        set,
        mut multipliers,
    } = example_kronecker(j_max, params)?;
    let j = j_max + 1;
    let m = kronecker_search(params.a, j as i64, params.beta, params.eps, params.m_max)
        .ok_or(Error::KroneckerSearchFailed(j))?;
    multipliers.push(m);
    let z = (j as i64).checked_mul(m).ok_or(Error::Overflow)?;
    let set = set.extended([Piece {
        region: tail_cell(j_max as u32)?,
        translate: LatticePoint(vec![z]),
    }])?;
    Ok(KroneckerSet { set, multipliers })
}

/// `D + {0, e₁, …, (k-1)e₁}`, an exact `k`-tile for any lattice.
pub fn box_k_tile(k: usize, lattice: &Lattice) -> Result<MultiTileSet> {
    let dim = lattice.dim();
    let pieces = (0..k)
        .map(|i| {
            let mut z = vec![0; dim];
            z[0] = i as i64;
            Piece {
                region: UnitRegion::full(dim),
                translate: LatticePoint(z),
            }
        })
        .collect();
    MultiTileSet::new(lattice.clone(), pieces)
}
