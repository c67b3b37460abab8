//! Extends an admissible `k`-subtile to an admissible `k`-tile.
//!
//! Each fiber class `D_R` is topped up with translates `D_R + z`, one for each
//! missing residue: the `k - #R` smallest attainable residues not already in
//! `[R]`, each realized by the lattice point of smallest max-norm
//! (lexicographically first on ties) that is not already in the class.

use std::collections::BTreeSet;

use num_integer::Integer;

use crate::admissibility::{check_certificate, shell, AdmissibilityCertificate};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticePoint};
use crate::multitile::{FiberPartition, MultiTileSet, Piece};

/// The residues `⟨v, λ⟩ mod n` reachable over `λ ∈ Λ`: the multiples of
/// `gcd(w₁, …, w_d, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClassIndex {
    pub n: u64,
    pub step: u64,
    pub achievable: Vec<u64>,
}

impl ResidueClassIndex {
    pub fn new(c: &AdmissibilityCertificate) -> Self {
        let n = c.n();
        let step = c
            .v()
            .0
            .iter()
            .fold(n, |g, &w| g.gcd(&(w.unsigned_abs() % n)));
        let step = step.max(1);
        let achievable = (0..n).step_by(step as usize).collect();
        ResidueClassIndex {
            n,
            step,
            achievable,
        }
    }

    pub fn contains(&self, r: u64) -> bool {
        r < self.n && r.is_multiple_of(self.step)
    }
}

/// `[R]`, the residues of the class's points.
pub fn residue_of_class(
    points: &[LatticePoint],
    c: &AdmissibilityCertificate,
) -> Result<BTreeSet<u64>> {
    points.iter().map(|z| c.residue(z)).collect()
}

/// Canonical lattice point with residue `r` outside `forbidden`.
pub fn representative(
    r: u64,
    c: &AdmissibilityCertificate,
    lattice: &Lattice,
    forbidden: &BTreeSet<LatticePoint>,
) -> Result<LatticePoint> {
    lattice.check_dim(c.v().dim())?;
    let index = ResidueClassIndex::new(c);
    if !index.contains(r) {
        return Err(Error::Unachievable {
            r,
            n: c.n(),
            step: index.step,
        });
    }
    let dim = lattice.dim();
    // residue r recurs in every shell of radius ≥ n, so this terminates once
    // the finitely many forbidden points are exhausted
    for s in 0.. {
        for z in shell(dim, s) {
            let z = LatticePoint(z);
            if c.residue(&z)? == r && !forbidden.contains(&z) {
                return Ok(z);
            }
        }
    }
    unreachable!("shell search is unbounded")
}

/// One planned addition: the class region gets translate `point` with `residue`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Addition {
    pub class_index: Option<usize>,
    pub residue: u64,
    pub point: LatticePoint,
}

/// Per-class additions, without building the output set. `class_index` is
/// `None` for the uncovered part of `D`.
pub fn plan_completion(
    p: &FiberPartition,
    c: &AdmissibilityCertificate,
    k: usize,
) -> Result<Vec<Addition>> {
    p.lattice.check_dim(c.v().dim())?;
    if !check_certificate(p, c)?.is_valid() {
        return Err(Error::CertificateInvalid);
    }
    if let Some(big) = p.classes.iter().find(|cl| cl.points.len() > k) {
        return Err(Error::ClassTooLarge {
            size: big.points.len(),
            k,
        });
    }
    let index = ResidueClassIndex::new(c);
    if index.achievable.len() < k {
        return Err(Error::NotEnoughResidues {
            available: index.achievable.len(),
            n: c.n(),
            k,
        });
    }
    let mut plan = Vec::new();
    let deficient = p
        .classes
        .iter()
        .enumerate()
        .map(|(i, cl)| (Some(i), cl.points.as_slice()))
        .chain((!p.uncovered.is_empty()).then_some((None, &[][..])));
    for (class_index, points) in deficient {
        if points.len() == k {
            continue;
        }
        let present = residue_of_class(points, c)?;
        let mut forbidden: BTreeSet<LatticePoint> = points.iter().cloned().collect();
        let missing = index
            .achievable
            .iter()
            .copied()
            .filter(|r| !present.contains(r))
            .take(k - points.len());
        for r in missing {
            let z = representative(r, c, &p.lattice, &forbidden)?;
            forbidden.insert(z.clone());
            plan.push(Addition {
                class_index,
                residue: r,
                point: z,
            });
        }
    }
    Ok(plan)
}

/// `Δ = ⋃ D_R + (R ∪ R')`, an exact `k`-tile containing `Ω` that stays valid
/// under `c`. The uncovered part of `D` is completed like a class with `R = ∅`.
pub fn complete_to_tile(
    p: &FiberPartition,
    c: &AdmissibilityCertificate,
    k: usize,
) -> Result<MultiTileSet> {
    let plan = plan_completion(p, c, k)?;
    let omega = p.to_multitile()?;
    let extra = plan.into_iter().map(|add| Piece {
        region: match add.class_index {
            Some(i) => p.classes[i].region.clone(),
            None => p.uncovered.clone(),
        },
        translate: add.point,
    });
    omega.extended(extra)
}
