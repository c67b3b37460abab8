//! Seeded random admissible subtiles for the integration tests.

#![allow(dead_code)]

use exobasis::completion::ResidueClassIndex;
use exobasis::rational::{ratio, Rational};
use exobasis::{AdmissibilityCertificate, DualVector, Lattice, LatticePoint, MultiTileSet, Piece, UnitBox, UnitRegion};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

pub struct Case {
    pub omega: MultiTileSet,
    pub cert: AdmissibilityCertificate,
    pub k: usize,
}

pub fn random_lattice(dim: usize, rng: &mut impl Rng) -> Lattice {
    loop {
        let basis: Vec<Vec<Rational>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| ratio(rng.gen_range(-3..=3), rng.gen_range(1..=4)))
                    .collect()
            })
            .collect();
        if let Ok(l) = Lattice::new(basis) {
            return l;
        }
    }
}

pub fn random_certificate(dim: usize, k: usize, rng: &mut impl Rng) -> AdmissibilityCertificate {
    loop {
        let n = rng.gen_range(k.max(1) as u64..=6);
        let w: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
        let Ok(c) = AdmissibilityCertificate::new(n, DualVector(w)) else {
            continue;
        };
        if ResidueClassIndex::new(&c).achievable.len() >= k {
            return c;
        }
    }
}

/// Sorted cut points `0 = t₀ < … < 1` with a few random rational interior cuts.
fn random_cuts(rng: &mut impl Rng) -> Vec<Rational> {
    let q = rng.gen_range(2..=6);
    let mut inner: Vec<i64> = (1..q).collect();
    inner.shuffle(rng);
    let take = rng.gen_range(0..=inner.len().min(2));
    let mut cuts: Vec<Rational> = inner[..take].iter().map(|&p| ratio(p, q)).collect();
    cuts.push(Rational::zero());
    cuts.push(Rational::one());
    cuts.sort();
    cuts
}

fn point_with_residue(c: &AdmissibilityCertificate, dim: usize, r: u64, rng: &mut impl Rng) -> LatticePoint {
    for radius in 4.. {
        for _ in 0..2000 {
            let z = LatticePoint((0..dim).map(|_| rng.gen_range(-radius..=radius)).collect());
            if c.residue(&z).unwrap() == r {
                return z;
            }
        }
    }
    unreachable!()
}

/// A grid of cells, each carrying up to `k` translates with distinct residues,
/// so the result is an admissible `k`-subtile (possibly with uncovered cells).
pub fn random_case(rng: &mut impl Rng) -> Case {
    let dim = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=4);
    let lattice = random_lattice(dim, rng);
    let cert = random_certificate(dim, k, rng);
    let achievable = ResidueClassIndex::new(&cert).achievable;
    let axes: Vec<Vec<Rational>> = (0..dim).map(|_| random_cuts(rng)).collect();
    let mut cells: Vec<(Vec<Rational>, Vec<Rational>)> = vec![(vec![], vec![])];
    for cuts in &axes {
        cells = cells
            .into_iter()
            .flat_map(|(lo, hi)| {
                cuts.windows(2).map(move |w| {
                    let mut lo = lo.clone();
                    let mut hi = hi.clone();
                    lo.push(w[0].clone());
                    hi.push(w[1].clone());
                    (lo, hi)
                })
            })
            .collect();
    }
    let mut pieces = Vec::new();
    for (lo, hi) in cells {
        let size = rng.gen_range(0..=k);
        let mut residues = achievable.clone();
        residues.shuffle(rng);
        for &r in &residues[..size] {
            let region = UnitRegion::from_boxes(dim, vec![UnitBox::new(lo.clone(), hi.clone()).unwrap()]).unwrap();
            pieces.push(Piece {
                region,
                translate: point_with_residue(&cert, dim, r, rng),
            });
        }
    }
    let omega = MultiTileSet::new(lattice, pieces).unwrap();
    Case { omega, cert, k }
}
