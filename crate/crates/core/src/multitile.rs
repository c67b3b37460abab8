//! Sets `Ω = ⋃ (region_i + z_i)` described over the fundamental domain, and
//! their fiber partition `D = ⋃ D_R`, where `D_R` is the part of `D` whose
//! fiber `Λ_ω = {λ : ω + λ ∈ Ω}` is exactly `R`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticePoint};
use crate::rational::Rational;
use crate::region::{self, UnitRegion};

/// One summand `region + z` of `Ω`, with `region` in `M`-coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub region: UnitRegion,
    pub translate: LatticePoint,
}

/// `Ω` given by finitely many pieces. Pieces sharing a translate are merged,
/// and pieces are sorted by translate, so equal sets compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiTileSet {
    lattice: Lattice,
    pieces: Vec<Piece>,
}

impl MultiTileSet {
    pub fn new(lattice: Lattice, pieces: Vec<Piece>) -> Result<Self> {
        let dim = lattice.dim();
        let mut by_translate: BTreeMap<LatticePoint, UnitRegion> = BTreeMap::new();
        for piece in pieces {
            lattice.check_dim(piece.region.dim())?;
            lattice.check_dim(piece.translate.dim())?;
            if piece.region.is_empty() {
                return Err(Error::EmptyPiece {
                    translate: piece.translate.0,
                });
            }
            let slot = by_translate
                .entry(piece.translate)
                .or_insert_with(|| UnitRegion::empty(dim));
            *slot = slot.union(&piece.region)?;
        }
        let pieces = by_translate
            .into_iter()
            .map(|(translate, region)| Piece { region, translate })
            .collect();
        Ok(MultiTileSet { lattice, pieces })
    }

    pub fn empty(lattice: Lattice) -> Self {
        MultiTileSet {
            lattice,
            pieces: Vec::new(),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece_at(&self, z: &LatticePoint) -> Option<&Piece> {
        self.pieces
            .binary_search_by(|p| p.translate.cmp(z))
            .ok()
            .map(|i| &self.pieces[i])
    }

    /// `|Ω| = |det M| · Σ |region_i|`.
    pub fn measure(&self) -> Rational {
        let cube: Rational = self
            .pieces
            .iter()
            .fold(Rational::zero(), |acc, p| acc + p.region.measure());
        cube * self.lattice.det_abs()
    }

    /// Adds pieces and renormalizes.
    pub fn extended(&self, extra: impl IntoIterator<Item = Piece>) -> Result<Self> {
        let pieces = self.pieces.iter().cloned().chain(extra).collect();
        MultiTileSet::new(self.lattice.clone(), pieces)
    }

    /// Piecewise containment: every piece of `other` lies inside the piece of
    /// `self` with the same translate.
    pub fn contains(&self, other: &MultiTileSet) -> Result<bool> {
        for p in &other.pieces {
            match self.piece_at(&p.translate) {
                Some(mine) if mine.region.contains(&p.region)? => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }
}

/// A positive-measure level set `D_R` of `ω ↦ Λ_ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberClass {
    pub region: UnitRegion,
    /// Sorted, duplicate-free.
    pub points: Vec<LatticePoint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberPartition {
    pub lattice: Lattice,
    pub classes: Vec<FiberClass>,
    /// Where `Λ_ω = ∅`.
    pub uncovered: UnitRegion,
}

/// Result of comparing the multiplicity function with a constant level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TilingLevel {
    /// Multiplicity exactly `k` almost everywhere.
    ExactTile(usize),
    /// Multiplicity at most `ℓ` almost everywhere, with `ℓ` the essential sup.
    SubTile(usize),
    /// Not produced for finite descriptions.
    NotTile,
}

impl std::fmt::Display for TilingLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TilingLevel::ExactTile(k) => write!(f, "ExactTile({k})"),
            TilingLevel::SubTile(l) => write!(f, "SubTile({l})"),
            TilingLevel::NotTile => write!(f, "NotTile"),
        }
    }
}

impl FiberPartition {
    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Reassembles `Ω = ⋃ D_R + R` piece by piece.
    pub fn to_multitile(&self) -> Result<MultiTileSet> {
        let pieces = self.classes.iter().flat_map(|class| {
            class.points.iter().map(|z| Piece {
                region: class.region.clone(),
                translate: z.clone(),
            })
        });
        MultiTileSet::new(self.lattice.clone(), pieces.collect())
    }

    /// Measure of `D` (in `M`-coordinates) at each multiplicity level.
    /// Level 0 is listed only when the uncovered part has positive measure.
    pub fn multiplicity_histogram(&self) -> BTreeMap<usize, Rational> {
        let mut hist: BTreeMap<usize, Rational> = BTreeMap::new();
        let uncovered = self.uncovered.measure();
        if !uncovered.is_zero() {
            hist.insert(0, uncovered);
        }
        for class in &self.classes {
            *hist.entry(class.points.len()).or_insert_with(Rational::zero) +=
                class.region.measure();
        }
        hist
    }

    pub fn tiling_level(&self) -> TilingLevel {
        let hist = self.multiplicity_histogram();
        let top = hist.keys().next_back().copied().unwrap_or(0);
        if hist.len() == 1 && top > 0 && hist[&top] == Rational::one() {
            TilingLevel::ExactTile(top)
        } else {
            TilingLevel::SubTile(top)
        }
    }

    /// `Σ_R #R · |D_R| · |det M|`, which equals `|Ω|`.
    pub fn covered_measure(&self) -> Rational {
        let cube = self.classes.iter().fold(Rational::zero(), |acc, c| {
            acc + c.region.measure() * Rational::from_integer(c.points.len().into())
        });
        cube * self.lattice.det_abs()
    }
}

/// Computes the fiber partition by refining all piece regions and reading
/// off, for each atom, the translates whose piece covers it.
pub fn fiber_partition(omega: &MultiTileSet) -> Result<FiberPartition> {
    let dim = omega.lattice.dim();
    let regions: Vec<UnitRegion> = omega.pieces.iter().map(|p| p.region.clone()).collect();
    let atoms = region::atoms_by_signature(&regions)?;
    let mut covered = UnitRegion::empty(dim);
    let classes: Vec<FiberClass> = atoms
        .into_iter()
        .map(|(members, region)| {
            // pieces are sorted by translate and members ascend, so points are sorted
            let points = members
                .into_iter()
                .map(|i| omega.pieces[i].translate.clone())
                .collect();
            FiberClass { region, points }
        })
        .collect();
    for c in &classes {
        covered = covered.union(&c.region)?;
    }
    let uncovered = UnitRegion::full(dim).subtract(&covered)?;
    Ok(FiberPartition {
        lattice: omega.lattice.clone(),
        classes,
        uncovered,
    })
}
