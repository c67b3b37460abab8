//! Extremal eigenvalues of small complex Hermitian matrices.
//!
//! Closed forms for orders 1 and 2; cyclic complex Jacobi otherwise. The
//! rotation order is fixed, so results are bit-identical across runs.

use num_complex::Complex64;

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// `(λ_min, λ_max)` of a Hermitian matrix given row by row.
pub fn hermitian_eigen_range(g: &[Vec<Complex64>]) -> Result<(f64, f64)> {
    let eig = hermitian_eigenvalues(g)?;
    Ok((eig[0], eig[eig.len() - 1]))
}

/// All eigenvalues in ascending order.
pub fn hermitian_eigenvalues(g: &[Vec<Complex64>]) -> Result<Vec<f64>> {
    let n = g.len();
    if n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    if let Some(row) = g.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: row.len(),
        });
    }
    let scale = g
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(1.0_f64, f64::max);
    let mut deviation = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            deviation = deviation.max((g[i][j] - g[j][i].conj()).norm());
        }
    }
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }
    let mut eig = match n {
        1 => vec![g[0][0].re],
        2 => {
            let a = g[0][0].re;
            let d = g[1][1].re;
            let mean = 0.5 * (a + d);
            let radius = (0.5 * (a - d)).hypot(g[0][1].norm());
            vec![mean - radius, mean + radius]
        }
        _ => jacobi(g),
    };
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

fn jacobi(g: &[Vec<Complex64>]) -> Vec<f64> {
    let n = g.len();
    // symmetrize so rounding noise in the input cannot stall convergence
    let mut a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Complex64::new(g[i][i].re, 0.0)
                    } else {
                        0.5 * (g[i][j] + g[j][i].conj())
                    }
                })
                .collect()
        })
        .collect();
    let total: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum();
        if off <= f64::EPSILON * f64::EPSILON * total || off == 0.0 {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
    }
    (0..n).map(|i| a[i][i].re).collect()
}

/// Zeroes `a[p][q]` with `A ← J* A J`, `J = Φ R`, where `Φ` makes the
/// pivot real and `R` is the real Jacobi rotation for the resulting 2x2 block.
fn rotate(a: &mut [Vec<Complex64>], p: usize, q: usize) {
    let apq = a[p][q];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g; // e^{iφ}
    let app = a[p][p].re;
    let aqq = a[q][q].re;
    let zeta = (aqq - app) / (2.0 * g);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // columns p, q of J: J[p][p] = c, J[q][p] = -s e^{-iφ}, J[p][q] = s, J[q][q] = c e^{-iφ}
    let conj_phase = phase.conj();
    let jpp = Complex64::new(c, 0.0);
    let jqp = -s * conj_phase;
    let jpq = Complex64::new(s, 0.0);
    let jqq = c * conj_phase;
    let n = a.len();
    // A ← A J  (touches columns p, q)
    for row in a.iter_mut().take(n) {
        let xp = row[p];
        let xq = row[q];
        row[p] = xp * jpp + xq * jqp;
        row[q] = xp * jpq + xq * jqq;
    }
    // A ← J* A  (touches rows p, q)
    for k in 0..n {
        let xp = a[p][k];
        let xq = a[q][k];
        a[p][k] = jpp.conj() * xp + jqp.conj() * xq;
        a[q][k] = jpq.conj() * xp + jqq.conj() * xq;
    }
    a[p][q] = Complex64::new(0.0, 0.0);
    a[q][p] = Complex64::new(0.0, 0.0);
    a[p][p].im = 0.0;
    a[q][q].im = 0.0;
}

/// `E E*` for an `l×k` matrix.
pub fn gram_rows(e: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    e.iter()
        .map(|ri| {
            e.iter()
                .map(|rj| ri.iter().zip(rj).map(|(x, y)| x * y.conj()).sum())
                .collect()
        })
        .collect()
}
