//! Finite unions of half-open rational boxes inside `[0,1)^d`.
//!
//! Every [`UnitRegion`] is kept in a canonical disjoint form: the set is cut
//! into slabs along axis 0 at the coordinates where its cross-section
//! changes, each cross-section is canonical in the remaining axes, and
//! adjacent slabs with equal cross-sections are merged. Two regions are
//! equal as sets exactly when their box lists are equal.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitBox {
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
}

impl UnitBox {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        for (axis, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if l >= h || *l < Rational::zero() || *h > Rational::one() {
                return Err(Error::MalformedBox { axis });
            }
        }
        Ok(UnitBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn measure(&self) -> Rational {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(Rational::one(), |acc, (l, h)| acc * (h - l))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnitRegion {
    dim: usize,
    boxes: Vec<UnitBox>,
}

impl UnitRegion {
    pub fn empty(dim: usize) -> Self {
        UnitRegion {
            dim,
            boxes: Vec::new(),
        }
    }

    /// The whole cube `[0,1)^d`.
    pub fn full(dim: usize) -> Self {
        UnitRegion {
            dim,
            boxes: vec![UnitBox {
                lo: vec![Rational::zero(); dim],
                hi: vec![Rational::one(); dim],
            }],
        }
    }

    /// One-dimensional `[lo, hi)`.
    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        UnitRegion::from_boxes(1, vec![UnitBox::new(vec![lo], vec![hi])?])
    }

    /// Normalizes an arbitrary (possibly overlapping) list of boxes.
    pub fn from_boxes(dim: usize, boxes: Vec<UnitBox>) -> Result<Self> {
        for b in &boxes {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: b.dim(),
                });
            }
            // re-validate in case the caller built the struct by hand
            UnitBox::new(b.lo.clone(), b.hi.clone())?;
        }
        let raw = UnitRegion { dim, boxes };
        Ok(combine(&[&raw], dim, |m| m[0]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[UnitBox] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn measure(&self) -> Rational {
        self.boxes
            .iter()
            .fold(Rational::zero(), |acc, b| acc + b.measure())
    }

    pub fn union(&self, other: &UnitRegion) -> Result<UnitRegion> {
        self.same_dim(other)?;
        Ok(combine(&[self, other], self.dim, |m| m[0] || m[1]))
    }

    pub fn intersect(&self, other: &UnitRegion) -> Result<UnitRegion> {
        self.same_dim(other)?;
        Ok(combine(&[self, other], self.dim, |m| m[0] && m[1]))
    }

    pub fn subtract(&self, other: &UnitRegion) -> Result<UnitRegion> {
        self.same_dim(other)?;
        Ok(combine(&[self, other], self.dim, |m| m[0] && !m[1]))
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &UnitRegion) -> Result<bool> {
        Ok(other.subtract(self)?.is_empty())
    }

    /// Sorted distinct box endpoints along `axis`.
    pub fn breakpoints(&self, axis: usize) -> Vec<Rational> {
        let mut pts: Vec<Rational> = self
            .boxes
            .iter()
            .flat_map(|b| [b.lo[axis].clone(), b.hi[axis].clone()])
            .collect();
        pts.sort();
        pts.dedup();
        pts
    }

    fn same_dim(&self, other: &UnitRegion) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        }
    }
}

/// Atoms of the Boolean algebra generated by `parts`: pairwise disjoint,
/// positive-measure regions such that every input is a union of atoms.
pub fn refine(parts: &[UnitRegion]) -> Result<Vec<UnitRegion>> {
    Ok(atoms_by_signature(parts)?
        .into_iter()
        .map(|(_, region)| region)
        .collect())
}

/// Like [`refine`], but each atom carries the sorted indices of the inputs
/// containing it. Atoms are ordered by their first box.
pub fn atoms_by_signature(parts: &[UnitRegion]) -> Result<Vec<(Vec<usize>, UnitRegion)>> {
    let Some(first) = parts.first() else {
        return Ok(Vec::new());
    };
    let dim = first.dim;
    for p in parts {
        first.same_dim(p)?;
    }
    let refs: Vec<&UnitRegion> = parts.iter().collect();
    let arr = Arrangement::new(&refs, dim);
    let mut groups: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
    for (flat, members) in arr.membership.iter().enumerate() {
        if !members.is_empty() {
            groups
                .entry(members.clone())
                .or_default()
                .push(arr.unflatten(flat));
        }
    }
    let mut atoms: Vec<(Vec<usize>, UnitRegion)> = groups
        .into_iter()
        .map(|(sig, cells)| (sig, arr.canonical(cells)))
        .collect();
    atoms.sort_by(|a, b| a.1.boxes.cmp(&b.1.boxes));
    Ok(atoms)
}

/// Applies a pointwise Boolean predicate over the membership of each
/// elementary cell in `regions`.
fn combine(regions: &[&UnitRegion], dim: usize, pred: impl Fn(&[bool]) -> bool) -> UnitRegion {
    if dim == 0 {
        return UnitRegion::empty(0);
    }
    let arr = Arrangement::new(regions, dim);
    let mut flags = vec![false; regions.len()];
    let mut selected = Vec::new();
    for (flat, members) in arr.membership.iter().enumerate() {
        flags.iter_mut().for_each(|f| *f = false);
        for &m in members {
            flags[m] = true;
        }
        if pred(&flags) {
            selected.push(arr.unflatten(flat));
        }
    }
    arr.canonical(selected)
}

/// The grid spanned by all box endpoints of a family of regions, with the
/// list of regions covering each elementary cell.
struct Arrangement {
    dim: usize,
    breaks: Vec<Vec<Rational>>,
    membership: Vec<Vec<usize>>,
}

impl Arrangement {
    fn new(regions: &[&UnitRegion], dim: usize) -> Self {
        let breaks: Vec<Vec<Rational>> = (0..dim)
            .map(|axis| {
                let mut pts: Vec<Rational> = regions
                    .iter()
                    .flat_map(|r| r.boxes.iter())
                    .flat_map(|b| [b.lo[axis].clone(), b.hi[axis].clone()])
                    .collect();
                pts.sort();
                pts.dedup();
                pts
            })
            .collect();
        let extents: Vec<usize> = breaks.iter().map(|b| b.len().saturating_sub(1)).collect();
        let total: usize = extents.iter().product();
        let mut membership: Vec<Vec<usize>> = vec![Vec::new(); total];
        let mut arr = Arrangement {
            dim,
            breaks,
            membership: Vec::new(),
        };
        for (ri, region) in regions.iter().enumerate() {
            for b in &region.boxes {
                let ranges: Vec<(usize, usize)> = (0..dim)
                    .map(|axis| {
                        let lo = arr.breaks[axis].binary_search(&b.lo[axis]).unwrap();
                        let hi = arr.breaks[axis].binary_search(&b.hi[axis]).unwrap();
                        (lo, hi)
                    })
                    .collect();
                for_each_index(&ranges, |idx| {
                    let flat = arr.flatten(idx);
                    let cell = &mut membership[flat];
                    if cell.last() != Some(&ri) {
                        cell.push(ri);
                    }
                });
            }
        }
        arr.membership = membership;
        arr
    }

    fn extent(&self, axis: usize) -> usize {
        self.breaks[axis].len().saturating_sub(1)
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .enumerate()
            .fold(0, |acc, (axis, &i)| acc * self.extent(axis) + i)
    }

    fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for axis in (0..self.dim).rev() {
            let e = self.extent(axis);
            idx[axis] = flat % e;
            flat /= e;
        }
        idx
    }

    /// Canonical region from a set of grid cells given by index tuples.
    fn canonical(&self, mut cells: Vec<Vec<usize>>) -> UnitRegion {
        cells.sort();
        cells.dedup();
        let boxes = canonical_slabs(&cells)
            .into_iter()
            .map(|ranges| UnitBox {
                lo: ranges
                    .iter()
                    .enumerate()
                    .map(|(axis, &(a, _))| self.breaks[axis][a].clone())
                    .collect(),
                hi: ranges
                    .iter()
                    .enumerate()
                    .map(|(axis, &(_, b))| self.breaks[axis][b].clone())
                    .collect(),
            })
            .collect();
        UnitRegion {
            dim: self.dim,
            boxes,
        }
    }
}

type IndexBox = Vec<(usize, usize)>;

/// Slab decomposition in index space. `cells` must be sorted and share a length.
fn canonical_slabs(cells: &[Vec<usize>]) -> Vec<IndexBox> {
    if cells.is_empty() {
        return Vec::new();
    }
    if cells[0].is_empty() {
        return vec![Vec::new()];
    }
    let mut slabs: Vec<(usize, usize, Vec<IndexBox>)> = Vec::new();
    let mut start = 0;
    while start < cells.len() {
        let i = cells[start][0];
        let end = start + cells[start..].iter().take_while(|c| c[0] == i).count();
        let tails: Vec<Vec<usize>> = cells[start..end].iter().map(|c| c[1..].to_vec()).collect();
        let sub = canonical_slabs(&tails);
        match slabs.last_mut() {
            Some((_, hi, prev)) if *hi == i && *prev == sub => *hi = i + 1,
            _ => slabs.push((i, i + 1, sub)),
        }
        start = end;
    }
    slabs
        .into_iter()
        .flat_map(|(lo, hi, sub)| {
            sub.into_iter().map(move |mut rest| {
                rest.insert(0, (lo, hi));
                rest
            })
        })
        .collect()
}

fn for_each_index(ranges: &[(usize, usize)], mut f: impl FnMut(&[usize])) {
    if ranges.iter().any(|&(a, b)| a >= b) {
        return;
    }
    let mut idx: Vec<usize> = ranges.iter().map(|&(a, _)| a).collect();
    loop {
        f(&idx);
        let mut axis = ranges.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < ranges[axis].1 {
                break;
            }
            idx[axis] = ranges[axis].0;
        }
    }
}
