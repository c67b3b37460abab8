//! Independent numerical checks of the fiber-matrix constants.
//!
//! Norms of exponential polynomials `P = Σ c_{j,h} e_{a_j + h}` are computed
//! two ways: by integrating `|P|²` over `Ω` directly, and by integrating
//! `‖E_R U_ω m(ω)‖²` over the fundamental domain class by class. Both use the
//! same composite midpoint rule: `m` cells per unit axis, further cut at every
//! box endpoint of the set's description, so each elementary cell lies
//! entirely inside or outside every region.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::basis::{cis_turns, fiber_matrix, BoundsKind, BoundsReport, ExponentialSystem};
use crate::eigen::hermitian_eigen_range;
use crate::error::{Error, Result};
use crate::lattice::{DualVector, LatticePoint};
use crate::multitile::{FiberPartition, MultiTileSet};
use crate::rational::{self, Rational};
use crate::region::UnitRegion;

/// Coefficients `c_{j,h}` keyed by offset index and the integer coordinates of `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySpec {
    coeffs: BTreeMap<(usize, Vec<i64>), Complex64>,
}

impl PolySpec {
    pub fn new(coeffs: BTreeMap<(usize, Vec<i64>), Complex64>) -> Result<Self> {
        let coeffs: BTreeMap<_, _> = coeffs.into_iter().filter(|(_, c)| c.norm() > 0.0).collect();
        if coeffs.is_empty() {
            return Err(Error::EmptyPoly);
        }
        Ok(PolySpec { coeffs })
    }

    /// Standard complex Gaussian coefficients on `j < k`, `‖h‖_∞ ≤ radius`.
    pub fn random(k: usize, dim: usize, radius: i64, rng: &mut impl rand::Rng) -> Self {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let mut coeffs = BTreeMap::new();
        for (j, h) in window_box(k, dim, radius) {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            coeffs.insert((j, h), Complex64::new(re * scale, im * scale));
        }
        PolySpec { coeffs }
    }

    pub fn coeffs(&self) -> &BTreeMap<(usize, Vec<i64>), Complex64> {
        &self.coeffs
    }

    /// `Σ |c|²`.
    pub fn coeff_energy(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    fn check(&self, sys: &ExponentialSystem) -> Result<()> {
        for (j, h) in self.coeffs.keys() {
            if *j >= sys.k() {
                return Err(Error::OffsetIndex { j: *j, k: sys.k() });
            }
            sys.lattice().check_dim(h.len())?;
        }
        Ok(())
    }
}

/// All `(j, h)` with `j < k` and `‖h‖_∞ ≤ radius`, in lexicographic order.
pub fn window_box(k: usize, dim: usize, radius: i64) -> Vec<(usize, Vec<i64>)> {
    let side: Vec<i64> = (-radius..=radius).collect();
    let mut hs: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..dim {
        hs = hs
            .into_iter()
            .flat_map(|h| {
                side.iter().map(move |&c| {
                    let mut h = h.clone();
                    h.push(c);
                    h
                })
            })
            .collect();
    }
    (0..k)
        .flat_map(|j| hs.iter().map(move |h| (j, h.clone())))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureConfig {
    pub points_per_unit_axis: usize,
    pub rule: QuadratureRule,
}

impl QuadratureConfig {
    pub fn midpoint(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadQuadrature);
        }
        Ok(QuadratureConfig {
            points_per_unit_axis: m,
            rule: QuadratureRule::Midpoint,
        })
    }
}

/// Elementary cells per axis: `{i/m}` merged with the given breakpoints.
struct QuadGrid {
    cuts: Vec<Vec<Rational>>,
    mids: Vec<Vec<f64>>,
    widths: Vec<Vec<f64>>,
}

impl QuadGrid {
    fn new(q: &QuadratureConfig, breaks: Vec<Vec<Rational>>) -> Result<Self> {
        let m = q.points_per_unit_axis;
        if m == 0 {
            return Err(Error::BadQuadrature);
        }
        let mut cuts = Vec::with_capacity(breaks.len());
        let mut mids = Vec::with_capacity(breaks.len());
        let mut widths = Vec::with_capacity(breaks.len());
        for extra in breaks {
            let mut axis: Vec<Rational> = (0..=m as i64)
                .map(|i| rational::ratio(i, m as i64))
                .chain(extra)
                .collect();
            axis.sort();
            axis.dedup();
            let (mid, width) = axis
                .windows(2)
                .map(|w| {
                    let mid = (&w[0] + &w[1]) / rational::int(2);
                    (rational::to_f64(&mid), rational::to_f64(&(&w[1] - &w[0])))
                })
                .unzip();
            cuts.push(axis);
            mids.push(mid);
            widths.push(width);
        }
        Ok(QuadGrid { cuts, mids, widths })
    }

    fn for_regions<'a>(
        q: &QuadratureConfig,
        dim: usize,
        regions: impl Iterator<Item = &'a UnitRegion> + Clone,
    ) -> Result<Self> {
        let breaks = (0..dim)
            .map(|axis| {
                let mut pts: Vec<Rational> =
                    regions.clone().flat_map(|r| r.breakpoints(axis)).collect();
                pts.sort();
                pts.dedup();
                pts
            })
            .collect();
        QuadGrid::new(q, breaks)
    }

    /// `(u, weight)` for every elementary cell inside `region`, weight in `u`-measure.
    fn nodes(&self, region: &UnitRegion) -> Vec<(Vec<f64>, f64)> {
        let mut out = Vec::new();
        for b in region.boxes() {
            let ranges: Vec<(usize, usize)> = (0..b.dim())
                .map(|axis| {
                    let lo = self.cuts[axis].binary_search(&b.lo[axis]).unwrap();
                    let hi = self.cuts[axis].binary_search(&b.hi[axis]).unwrap();
                    (lo, hi)
                })
                .collect();
            let mut idx: Vec<usize> = ranges.iter().map(|r| r.0).collect();
            'cells: loop {
                let u = idx
                    .iter()
                    .enumerate()
                    .map(|(axis, &i)| self.mids[axis][i])
                    .collect();
                let w = idx
                    .iter()
                    .enumerate()
                    .map(|(axis, &i)| self.widths[axis][i])
                    .product();
                out.push((u, w));
                for axis in (0..idx.len()).rev() {
                    idx[axis] += 1;
                    if idx[axis] < ranges[axis].1 {
                        continue 'cells;
                    }
                    idx[axis] = ranges[axis].0;
                }
                break;
            }
        }
        out
    }
}

/// Pairwise summation in a fixed order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Real frequency vectors `a_j + h` for every coefficient, in key order.
fn frequencies(sys: &ExponentialSystem, p: &PolySpec) -> Vec<(Vec<f64>, Complex64)> {
    let lattice = sys.lattice();
    p.coeffs
        .iter()
        .map(|((j, h), c)| {
            let a = sys.offset_vector(*j);
            let h = lattice.dual_to_real(&DualVector(h.clone()));
            (a.iter().zip(&h).map(|(x, y)| x + y).collect(), *c)
        })
        .collect()
}

/// `∫_Ω |P|²` by evaluating `P` at the embedded quadrature nodes of each piece.
pub fn poly_norm_direct(
    omega: &MultiTileSet,
    sys: &ExponentialSystem,
    p: &PolySpec,
    q: &QuadratureConfig,
) -> Result<f64> {
    p.check(sys)?;
    let lattice = omega.lattice();
    let grid = QuadGrid::for_regions(q, lattice.dim(), omega.pieces().iter().map(|pc| &pc.region))?;
    let freqs = frequencies(sys, p);
    let det = lattice.det_abs_f64();
    let mut terms = Vec::new();
    for piece in omega.pieces() {
        for (u, w) in grid.nodes(&piece.region) {
            let x = lattice.embed_point(&u, &piece.translate);
            let value: Complex64 = freqs.iter().map(|(xi, c)| c * cis_turns(dot(xi, &x))).sum();
            terms.push(w * det * value.norm_sqr());
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `m_j(ω) = Σ_h c_{j,h} e^{2πi h·ω}` at a point of `D`.
fn fiber_coefficients(
    k: usize,
    hs: &[(usize, Vec<f64>, Complex64)],
    omega: &[f64],
) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); k];
    for (j, h, c) in hs {
        m[*j] += c * cis_turns(dot(h, omega));
    }
    m
}

/// `∫_D ‖E_R U_ω m(ω)‖²`, class by class.
pub fn poly_norm_fiber(
    part: &FiberPartition,
    sys: &ExponentialSystem,
    p: &PolySpec,
    q: &QuadratureConfig,
) -> Result<f64> {
    p.check(sys)?;
    let lattice = &part.lattice;
    let regions = part.classes.iter().map(|c| &c.region).chain(std::iter::once(&part.uncovered));
    let grid = QuadGrid::for_regions(q, lattice.dim(), regions)?;
    let hs: Vec<(usize, Vec<f64>, Complex64)> = p
        .coeffs
        .iter()
        .map(|((j, h), c)| (*j, lattice.dual_to_real(&DualVector(h.clone())), *c))
        .collect();
    let offsets: Vec<Vec<f64>> = (0..sys.k()).map(|j| sys.offset_vector(j)).collect();
    let det = lattice.det_abs_f64();
    let origin = LatticePoint::zero(lattice.dim());
    let mut terms = Vec::new();
    for class in &part.classes {
        let e = fiber_matrix(&class.points, sys)?;
        for (u, w) in grid.nodes(&class.region) {
            let x = lattice.embed_point(&u, &origin);
            let m = fiber_coefficients(sys.k(), &hs, &x);
            let um: Vec<Complex64> = m
                .iter()
                .zip(&offsets)
                .map(|(mj, a)| mj * cis_turns(dot(a, &x)))
                .collect();
            let y = e.apply(&um);
            terms.push(w * det * y.iter().map(|z| z.norm_sqr()).sum::<f64>());
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `‖P‖² / (|D| Σ|c|²)`, with the numerator from [`poly_norm_fiber`].
pub fn rayleigh_quotient(
    part: &FiberPartition,
    sys: &ExponentialSystem,
    p: &PolySpec,
    q: &QuadratureConfig,
) -> Result<f64> {
    let norm = poly_norm_fiber(part, sys, p, q)?;
    Ok(norm / (part.lattice.det_abs_f64() * p.coeff_energy()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub quotients: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// `A` for Riesz reports; `0` otherwise, since a frame need not bound
    /// coefficient norms from below.
    pub lower: f64,
    pub upper: f64,
    pub tol: f64,
    pub pass: bool,
}

impl TrialSummary {
    /// Re-judges the quotients with `tol = rel_tol·B`.
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.tol = rel_tol * self.upper;
        self.pass = self
            .quotients
            .iter()
            .all(|&x| x >= self.lower - self.tol && x <= self.upper + self.tol);
        self
    }
}

/// Rayleigh quotients of `trials` seeded random polynomials, compared with
/// `[A - tol, B + tol]`, `tol = 1e-6·B`.
pub fn frame_inequality_trial(
    part: &FiberPartition,
    sys: &ExponentialSystem,
    report: &BoundsReport,
    trials: usize,
    seed: u64,
    radius: i64,
    q: &QuadratureConfig,
) -> Result<TrialSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polys: Vec<PolySpec> = (0..trials)
        .map(|_| PolySpec::random(sys.k(), part.dim(), radius, &mut rng))
        .collect();
    let quotients = polys
        .par_iter()
        .map(|p| rayleigh_quotient(part, sys, p, q))
        .collect::<Result<Vec<f64>>>()?;
    let min = quotients.iter().copied().fold(f64::INFINITY, f64::min);
    let max = quotients.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lower = if report.kind == BoundsKind::RieszBounds {
        report.a
    } else {
        0.0
    };
    let upper = report.b;
    let tol = 1e-6 * report.b;
    let pass = quotients
        .iter()
        .all(|&x| x >= lower - tol && x <= upper + tol);
    Ok(TrialSummary {
        quotients,
        min,
        max,
        lower,
        upper,
        tol,
        pass,
    })
}

/// Extremal eigenvalues of the Gram matrix of `{e_{a_j + h}}` over a finite
/// window, with entries `∫_Ω e_γ conj(e_γ')` by quadrature.
pub fn gram_section(
    omega: &MultiTileSet,
    sys: &ExponentialSystem,
    window: &[(usize, Vec<i64>)],
    q: &QuadratureConfig,
) -> Result<(f64, f64)> {
    if window.is_empty() {
        return Err(Error::WindowEmpty);
    }
    let lattice = omega.lattice();
    let freqs: Vec<Vec<f64>> = window
        .iter()
        .map(|(j, h)| {
            if *j >= sys.k() {
                return Err(Error::OffsetIndex { j: *j, k: sys.k() });
            }
            lattice.check_dim(h.len())?;
            let a = sys.offset_vector(*j);
            let h = lattice.dual_to_real(&DualVector(h.clone()));
            Ok(a.iter().zip(&h).map(|(x, y)| x + y).collect())
        })
        .collect::<Result<_>>()?;
    let grid = QuadGrid::for_regions(q, lattice.dim(), omega.pieces().iter().map(|pc| &pc.region))?;
    let det = lattice.det_abs_f64();
    let size = window.len();
    let mut g = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for piece in omega.pieces() {
        for (u, w) in grid.nodes(&piece.region) {
            let x = lattice.embed_point(&u, &piece.translate);
            let phi: Vec<Complex64> = freqs.iter().map(|xi| cis_turns(dot(xi, &x))).collect();
            for a in 0..size {
                for b in a..size {
                    g[a][b] += w * det * phi[a] * phi[b].conj();
                }
            }
        }
    }
    for a in 0..size {
        g[a][a].im = 0.0;
        for b in 0..a {
            g[a][b] = g[b][a].conj();
        }
    }
    hermitian_eigen_range(&g)
}

/// `T_ω` evaluated literally: row `l` is `(e^{2πi a_j·(ω + λ_l)})_j`, with `ω`
/// already in ambient coordinates.
pub fn analysis_matrix(
    sys: &ExponentialSystem,
    omega: &[f64],
    points: &[LatticePoint],
) -> Vec<Vec<Complex64>> {
    let lattice = sys.lattice();
    let offsets: Vec<Vec<f64>> = (0..sys.k()).map(|j| sys.offset_vector(j)).collect();
    points
        .iter()
        .map(|z| {
            let lam = lattice.point_to_real(z);
            let x: Vec<f64> = omega.iter().zip(&lam).map(|(a, b)| a + b).collect();
            offsets.iter().map(|a| cis_turns(dot(a, &x))).collect()
        })
        .collect()
}

/// `diag(e^{2πi a_j·ω})`.
pub fn unitary_factor(sys: &ExponentialSystem, omega: &[f64]) -> Vec<Complex64> {
    (0..sys.k())
        .map(|j| cis_turns(dot(&sys.offset_vector(j), omega)))
        .collect()
}

/// Smallest `|m| ≤ m_max` (positive first on ties) with
/// `‖(e(a₁jm), e(a₂jm)) - (e(β₁), e(β₂))‖₂ < ε`.
pub fn kronecker_search(a: [f64; 2], j: i64, beta: [f64; 2], eps: f64, m_max: u64) -> Option<i64> {
    let target = [cis_turns(beta[0]), cis_turns(beta[1])];
    let step = [a[0] * j as f64, a[1] * j as f64];
    let hits = |m: i64| kronecker_distance(step, m, target) < eps;
    (0..=m_max as i64).find_map(|t| {
        if hits(t) {
            Some(t)
        } else if t > 0 && hits(-t) {
            Some(-t)
        } else {
            None
        }
    })
}

fn kronecker_distance(step: [f64; 2], m: i64, target: [Complex64; 2]) -> f64 {
    let d0 = cis_turns((step[0].fract() * m as f64).fract()) - target[0];
    let d1 = cis_turns((step[1].fract() * m as f64).fract()) - target[1];
    (d0.norm_sqr() + d1.norm_sqr()).sqrt()
}
