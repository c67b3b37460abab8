//! `(n, v)`-admissibility: on every fiber class the residues `⟨v, λ⟩ mod n`
//! must be pairwise distinct.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{dual_pairing, pairing_residue, DualVector, LatticePoint};
use crate::multitile::{fiber_partition, FiberPartition, MultiTileSet};
use crate::region::UnitRegion;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdmissibilityCertificate {
    n: u64,
    v: DualVector,
}

impl AdmissibilityCertificate {
    pub fn new(n: u64, v: DualVector) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadCertificate("n must be at least 1".into()));
        }
        if n > 1 && v.is_zero() {
            return Err(Error::BadCertificate("v must be nonzero when n > 1".into()));
        }
        Ok(AdmissibilityCertificate { n, v })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn v(&self) -> &DualVector {
        &self.v
    }

    pub fn residue(&self, lambda: &LatticePoint) -> Result<u64> {
        pairing_residue(&self.v, lambda, self.n)
    }
}

/// Two distinct points of one class whose residues collide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub class_region: UnitRegion,
    pub points: (LatticePoint, LatticePoint),
    pub residue: u64,
}

impl Violation {
    /// Recomputes both pairings from scratch.
    pub fn verify(&self, c: &AdmissibilityCertificate) -> Result<bool> {
        let n = i128::from(c.n);
        let a = i128::from(dual_pairing(&c.v, &self.points.0)?);
        let b = i128::from(dual_pairing(&c.v, &self.points.1)?);
        Ok(self.points.0 != self.points.1
            && (a - b).rem_euclid(n) == 0
            && a.rem_euclid(n) == i128::from(self.residue))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    Valid,
    Invalid(Vec<Violation>),
}

impl CheckOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, CheckOutcome::Valid)
    }
}

/// Checks every class; on failure lists, per colliding residue, the first
/// point paired with each later point sharing that residue.
pub fn check_certificate(p: &FiberPartition, c: &AdmissibilityCertificate) -> Result<CheckOutcome> {
    p.lattice.check_dim(c.v.dim())?;
    let mut violations = Vec::new();
    for class in &p.classes {
        collect_violations(&class.region, &class.points, c, &mut violations)?;
    }
    Ok(if violations.is_empty() {
        CheckOutcome::Valid
    } else {
        CheckOutcome::Invalid(violations)
    })
}

fn collect_violations(
    region: &UnitRegion,
    points: &[LatticePoint],
    c: &AdmissibilityCertificate,
    out: &mut Vec<Violation>,
) -> Result<()> {
    if points.len() < 2 {
        return Ok(());
    }
    let mut seen: BTreeMap<u64, &LatticePoint> = BTreeMap::new();
    for z in points {
        let r = c.residue(z)?;
        match seen.get(&r) {
            Some(&first) => out.push(Violation {
                class_region: region.clone(),
                points: (first.clone(), z.clone()),
                residue: r,
            }),
            None => {
                seen.insert(r, z);
            }
        }
    }
    Ok(())
}

fn class_is_valid(points: &[LatticePoint], c: &AdmissibilityCertificate) -> Result<bool> {
    if points.len() as u64 > c.n {
        return Ok(false);
    }
    let mut seen = std::collections::BTreeSet::new();
    for z in points {
        if !seen.insert(c.residue(z)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Candidate dual vectors in scan order: shells of growing max-norm,
/// lexicographic inside a shell, one of each `±w` pair (first nonzero
/// coordinate positive). `w` and `-w` give the same validity.
pub fn candidate_vectors(dim: usize, height: u64) -> impl Iterator<Item = DualVector> {
    (1..=height as i64).flat_map(move |s| {
        shell(dim, s)
            .into_iter()
            .filter(|w| w.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0))
            .map(DualVector)
    })
}

/// Integer vectors of max-norm exactly `s`, lexicographic.
pub(crate) fn shell(dim: usize, s: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-s; dim];
    loop {
        if cur.iter().any(|c| c.abs() == s) || s == 0 {
            out.push(cur.clone());
        }
        let mut axis = dim;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if cur[axis] < s {
                cur[axis] += 1;
                break;
            }
            cur[axis] = -s;
        }
    }
}

/// First valid certificate in scan order: `n` ascending, then
/// [`candidate_vectors`]. For `n = 1` the zero vector is tried first.
/// `None` only means nothing was found within the given bounds.
pub fn search_certificate(
    p: &FiberPartition,
    n_max: u64,
    v_height: u64,
) -> Result<Option<AdmissibilityCertificate>> {
    let dim = p.dim();
    let largest = p.classes.iter().map(|c| c.points.len() as u64).max().unwrap_or(0);
    for n in 1..=n_max {
        if largest > n {
            continue;
        }
        let zero = (n == 1).then(|| DualVector(vec![0; dim]));
        for v in zero.into_iter().chain(candidate_vectors(dim, v_height)) {
            let c = AdmissibilityCertificate { n, v };
            let mut ok = true;
            for class in &p.classes {
                if !class_is_valid(&class.points, &c)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

/// Produces the truncation of an infinite family at level `J`.
pub trait PieceGenerator {
    fn level(&self, j: usize) -> Result<MultiTileSet>;
}

impl<F> PieceGenerator for F
where
    F: Fn(usize) -> Result<MultiTileSet>,
{
    fn level(&self, j: usize) -> Result<MultiTileSet> {
        self(j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyOutcome {
    PassThrough(usize),
    FailAt(usize, Violation),
}

/// Checks `c` on truncation levels `1..=j_max`, stopping at the first failure.
pub fn certify_family(
    generator: &impl PieceGenerator,
    c: &AdmissibilityCertificate,
    j_max: usize,
) -> Result<FamilyOutcome> {
    let mut previous: Option<MultiTileSet> = None;
    for j in 1..=j_max {
        let omega = generator.level(j)?;
        if let Some(prev) = &previous {
            if !omega.contains(prev)? {
                return Err(Error::GeneratorInconsistent { level: j });
            }
        }
        let p = fiber_partition(&omega)?;
        if let CheckOutcome::Invalid(mut v) = check_certificate(&p, c)? {
            return Ok(FamilyOutcome::FailAt(j, v.swap_remove(0)));
        }
        previous = Some(omega);
    }
    Ok(FamilyOutcome::PassThrough(j_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::lattice::Lattice;
    use crate::multitile::{FiberClass, Piece};
    use crate::rational::{dyadic, int};
    use proptest::prelude::*;

    fn cert(n: u64, w: i64) -> AdmissibilityCertificate {
        AdmissibilityCertificate::new(n, DualVector(vec![w])).unwrap()
    }

    #[test]
    fn certificate_invariants() {
        assert!(AdmissibilityCertificate::new(0, DualVector(vec![1])).is_err());
        assert!(AdmissibilityCertificate::new(2, DualVector(vec![0])).is_err());
        assert!(AdmissibilityCertificate::new(1, DualVector(vec![0])).is_ok());
    }

    #[test]
    fn odd_translates_pass_mod_two() {
        for j in [1, 2, 7, 30] {
            let p = fiber_partition(&gallery::example_2_11(j).unwrap()).unwrap();
            assert_eq!(check_certificate(&p, &cert(2, 1)).unwrap(), CheckOutcome::Valid);
        }
    }

    #[test]
    fn consecutive_translates_fail_with_witness() {
        for n in [2u64, 3, 5, 8] {
            let p = fiber_partition(&gallery::example_2_10(10).unwrap()).unwrap();
            let c = cert(n, 1);
            let CheckOutcome::Invalid(vs) = check_certificate(&p, &c).unwrap() else {
                panic!("expected a violation for n = {n}");
            };
            let witness = vs
                .iter()
                .find(|v| v.points.1 == LatticePoint(vec![n as i64]))
                .expect("witness pair {0, n}");
            assert_eq!(witness.points.0, LatticePoint(vec![0]));
            assert_eq!(witness.class_region, gallery::interval_i(n as u32).unwrap());
            assert_eq!(witness.residue, 0);
            assert!(vs.iter().all(|v| v.verify(&c).unwrap()));
        }
    }

    #[test]
    fn singleton_classes_always_valid() {
        let p = fiber_partition(&gallery::box_k_tile(1, &Lattice::integer(1)).unwrap()).unwrap();
        for (n, w) in [(1, 0), (2, 1), (7, 3)] {
            let c = AdmissibilityCertificate::new(n, DualVector(vec![w])).unwrap();
            assert!(check_certificate(&p, &c).unwrap().is_valid());
        }
    }

    #[test]
    fn dimension_mismatch() {
        let p = fiber_partition(&gallery::example_2_11(2).unwrap()).unwrap();
        let c = AdmissibilityCertificate::new(2, DualVector(vec![1, 0])).unwrap();
        assert!(matches!(
            check_certificate(&p, &c),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn search_examples() {
        let d = fiber_partition(&gallery::box_k_tile(1, &Lattice::integer(1)).unwrap()).unwrap();
        assert_eq!(
            search_certificate(&d, 5, 5).unwrap(),
            Some(AdmissibilityCertificate::new(1, DualVector(vec![0])).unwrap())
        );

        let p = fiber_partition(&gallery::example_2_11(20).unwrap()).unwrap();
        assert_eq!(search_certificate(&p, 10, 10).unwrap(), Some(cert(2, 1)));

        let p = fiber_partition(&gallery::example_2_10(50).unwrap()).unwrap();
        assert_eq!(search_certificate(&p, 50, 50).unwrap(), None);
    }

    #[test]
    fn scan_order_in_two_dimensions() {
        let vs: Vec<Vec<i64>> = candidate_vectors(2, 1).map(|v| v.0).collect();
        assert_eq!(vs, vec![vec![0, 1], vec![1, -1], vec![1, 0], vec![1, 1]]);
        assert_eq!(shell(1, 0), vec![vec![0]]);
        assert_eq!(shell(2, 1).len(), 8);
    }

    #[test]
    fn family_certification() {
        let odd = |j: usize| gallery::example_2_11(j);
        assert_eq!(
            certify_family(&odd, &cert(2, 1), 100).unwrap(),
            FamilyOutcome::PassThrough(100)
        );

        let consecutive = |j: usize| gallery::example_2_10(j);
        let FamilyOutcome::FailAt(level, v) = certify_family(&consecutive, &cert(5, 1), 100).unwrap()
        else {
            panic!("expected failure");
        };
        assert_eq!(level, 5);
        assert_eq!(v.points, (LatticePoint(vec![0]), LatticePoint(vec![5])));

        let constant = |_: usize| gallery::box_k_tile(1, &Lattice::integer(1));
        assert_eq!(
            certify_family(&constant, &cert(3, 2), 10).unwrap(),
            FamilyOutcome::PassThrough(10)
        );
    }

    #[test]
    fn inconsistent_generator_detected() {
        // level 2 moves the first interval to another translate
        let shifting = |j: usize| {
            MultiTileSet::new(
                Lattice::integer(1),
                vec![Piece {
                    region: UnitRegion::interval(int(0), dyadic(1, 1)).unwrap(),
                    translate: LatticePoint(vec![j as i64]),
                }],
            )
        };
        assert_eq!(
            certify_family(&shifting, &cert(2, 1), 3),
            Err(Error::GeneratorInconsistent { level: 2 })
        );
    }

    fn arb_partition() -> impl Strategy<Value = FiberPartition> {
        prop::collection::vec(prop::collection::btree_set(-30i64..30, 1..5), 1..6).prop_map(|sets| {
            let n = sets.len() as i64;
            let classes = sets
                .into_iter()
                .enumerate()
                .map(|(i, s)| FiberClass {
                    region: UnitRegion::interval(
                        crate::rational::ratio(i as i64, n),
                        crate::rational::ratio(i as i64 + 1, n),
                    )
                    .unwrap(),
                    points: s.into_iter().map(|z| LatticePoint(vec![z])).collect(),
                })
                .collect();
            FiberPartition {
                lattice: Lattice::integer(1),
                classes,
                uncovered: UnitRegion::empty(1),
            }
        })
    }

    proptest! {
        #[test]
        fn removing_points_keeps_validity(p in arb_partition(), n in 1u64..8, w in 1i64..8, drop in 0usize..4) {
            let c = cert(n, w);
            if check_certificate(&p, &c).unwrap().is_valid() {
                let mut smaller = p.clone();
                for class in &mut smaller.classes {
                    if class.points.len() > 1 {
                        let k = drop % class.points.len();
                        class.points.remove(k);
                    }
                }
                prop_assert!(check_certificate(&smaller, &c).unwrap().is_valid());
            }
        }

        #[test]
        fn shifting_v_by_multiples_of_n(p in arb_partition(), n in 1u64..8, w in 1i64..8, u in -5i64..5) {
            let shifted = w + n as i64 * u;
            prop_assume!(shifted != 0 || n == 1);
            let a = check_certificate(&p, &cert(n, w)).unwrap().is_valid();
            let b = check_certificate(&p, &AdmissibilityCertificate::new(n, DualVector(vec![shifted])).unwrap())
                .unwrap()
                .is_valid();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn violations_are_verifiable(p in arb_partition(), n in 1u64..8, w in 1i64..8) {
            let c = cert(n, w);
            if let CheckOutcome::Invalid(vs) = check_certificate(&p, &c).unwrap() {
                for v in vs {
                    prop_assert!(v.verify(&c).unwrap());
                }
            }
        }

        #[test]
        fn search_result_checks_valid(p in arb_partition()) {
            if let Some(c) = search_certificate(&p, 12, 4).unwrap() {
                prop_assert!(check_certificate(&p, &c).unwrap().is_valid());
            }
        }
    }
}
