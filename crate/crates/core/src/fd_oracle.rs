//! Finite-difference eigenvalues of `-(hbar^2 / 2m) psi'' + V psi = E psi`.
//!
//! Second-order central differences with Dirichlet ends give a symmetric
//! tridiagonal matrix whose lowest eigenvalues are isolated by Sturm-sequence
//! bisection. Each eigenvector is recovered by inverse iteration and checked
//! for probability leaking onto the boundary.

use crate::error::{Error, Result};
use crate::potential::{Family, PotentialSpec, UnitSystem};

const EIGEN_RTOL: f64 = 1e-12;
const LEAK_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub points: usize,
}

impl FdGrid {
    pub fn new(q_min: f64, q_max: f64, points: usize) -> Result<Self> {
        if !(q_min.is_finite() && q_max.is_finite() && q_max > q_min) {
            return Err(Error::InvalidParameter(format!("grid needs q_min < q_max, got ({q_min}, {q_max})")));
        }
        if points < 3 {
            return Err(Error::InvalidParameter(format!("grid needs at least 3 points, got {points}")));
        }
        Ok(Self { q_min, q_max, points })
    }

    pub fn spacing(&self) -> f64 {
        (self.q_max - self.q_min) / (self.points - 1) as f64
    }
}

/// Symmetric tridiagonal matrix with constant off-diagonal.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: f64,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let off2 = self.off * self.off;
        let mut count = 0;
        let mut d = 1.0;
        for (j, &a) in self.diag.iter().enumerate() {
            d = if j == 0 { a - x } else { a - x - off2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + self.off.abs()).max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().copied().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    /// The `k` lowest eigenvalues by bisection.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let (g_lo, g_hi) = self.gershgorin();
        let floor = f64::EPSILON * g_lo.abs().max(g_hi.abs());
        let mut out = Vec::with_capacity(k);
        let mut start = g_lo;
        for index in 0..k {
            let (mut lo, mut hi) = (start, g_hi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= (EIGEN_RTOL * mid.abs()).max(floor) || mid <= lo || mid >= hi {
                    break;
                }
                if self.sturm_count(mid) > index {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let value = 0.5 * (lo + hi);
            out.push(value);
            start = lo;
        }
        out
    }

    /// Eigenvector for `lambda` by two steps of shifted inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let shift = lambda + 1e-10 * lambda.abs().max(self.off.abs());
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64).collect();
        for _ in 0..3 {
            x = solve_shifted(self, shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            for v in &mut x {
                *v /= norm;
            }
        }
        x
    }
}

/// Solves `(T - s I) y = b` by Gaussian elimination with partial pivoting.
fn solve_shifted(t: &Tridiagonal, s: f64, b: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut d: Vec<f64> = t.diag.iter().map(|a| a - s).collect();
    let mut du = vec![t.off; n.saturating_sub(1)];
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut dl = vec![t.off; n.saturating_sub(1)];
    let mut y = b.to_vec();
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            let factor = if d[i] != 0.0 { dl[i] / d[i] } else { 0.0 };
            dl[i] = factor;
            d[i + 1] -= factor * du[i];
            y[i + 1] -= factor * y[i];
        } else {
            let factor = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = factor;
            let tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - factor * d[i + 1];
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] *= -factor;
            }
            y.swap(i, i + 1);
            y[i + 1] -= factor * y[i];
        }
    }
    let tiny = f64::EPSILON * t.off.abs().max(f64::MIN_POSITIVE);
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        if i + 1 < n {
            acc -= du[i] * x[i + 1];
        }
        if i + 2 < n {
            acc -= du2[i] * x[i + 2];
        }
        let piv = if d[i] == 0.0 { tiny } else { d[i] };
        x[i] = acc / piv;
    }
    x
}

/// Interior coordinates and the discretized Hamiltonian.
pub fn discretize(spec: &PotentialSpec, units: &UnitSystem, grid: &FdGrid) -> Result<(Vec<f64>, Tridiagonal)> {
    let grid = match *spec.family() {
        // the walls are the Dirichlet boundaries
        Family::ConstantMomentumWell { q1, q2 } => FdGrid::new(q1, q2, grid.points)?,
        Family::CoulombRadialEffective { .. } if grid.q_min <= 0.0 => {
            return Err(Error::InvalidParameter(format!(
                "radial grids need q_min > 0, got {}",
                grid.q_min
            )))
        }
        _ => *grid,
    };
    let h = grid.spacing();
    let kinetic = units.hbar() * units.hbar() / (units.mass() * h * h);
    let coords: Vec<f64> = (1..grid.points - 1).map(|i| grid.q_min + h * i as f64).collect();
    let mut diag = Vec::with_capacity(coords.len());
    for &q in &coords {
        let v = if spec.is_hard_wall() { 0.0 } else { spec.eval_v(units, q)? };
        diag.push(kinetic + v);
    }
    Ok((
        coords,
        Tridiagonal {
            diag,
            off: -0.5 * kinetic,
        },
    ))
}

/// The `k` lowest eigenvalues on `grid`.
pub fn fd_eigenvalues(spec: &PotentialSpec, units: &UnitSystem, grid: &FdGrid, k: usize) -> Result<Vec<f64>> {
    if k >= grid.points.saturating_sub(2) {
        return Err(Error::OutOfRange(format!(
            "requested {k} eigenvalues from a grid with {} interior points",
            grid.points.saturating_sub(2)
        )));
    }
    let (_, t) = discretize(spec, units, grid)?;
    let values = t.lowest_eigenvalues(k);
    if !spec.is_hard_wall() {
        let n = t.len();
        for (index, &lambda) in values.iter().enumerate() {
            let v = t.eigenvector(lambda);
            // u(0) = 0 is physical for radial problems, so only the outer end is checked
            let radial = matches!(spec.family(), Family::CoulombRadialEffective { .. });
            let edge = if radial {
                [n.saturating_sub(2), n - 1, n - 1, n - 1]
            } else {
                [0, 1, n.saturating_sub(2), n - 1]
            };
            let mut seen = [usize::MAX; 4];
            let mut mass = 0.0;
            for (slot, &j) in edge.iter().enumerate() {
                if j < n && !seen.contains(&j) {
                    mass += v[j] * v[j];
                    seen[slot] = j;
                }
            }
            if mass > LEAK_LIMIT {
                return Err(Error::GridTooSmall { index, mass });
            }
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn u() -> UnitSystem {
        UnitSystem::default()
    }

    #[test]
    fn harmonic_low_levels() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let grid = FdGrid::new(-12.0, 12.0, 4001).unwrap();
        let e = fd_eigenvalues(&h, &u(), &grid, 3).unwrap();
        for (k, v) in e.iter().enumerate() {
            assert!((v - (k as f64 + 0.5)).abs() < 1e-4, "{v}");
        }
    }

    #[test]
    fn box_levels() {
        let w = PotentialSpec::constant_momentum_well(0.0, std::f64::consts::PI).unwrap();
        let grid = FdGrid::new(0.0, std::f64::consts::PI, 4001).unwrap();
        let e = fd_eigenvalues(&w, &u(), &grid, 2).unwrap();
        assert!((e[0] - 0.5).abs() < 1e-6);
        assert!((e[1] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn hydrogen_ground_state() {
        let c = PotentialSpec::coulomb(1.0, 0.0).unwrap();
        let grid = FdGrid::new(1e-4, 200.0, 40001).unwrap();
        let e = fd_eigenvalues(&c, &u(), &grid, 1).unwrap();
        assert!((e[0] + 0.5).abs() < 1e-3, "{}", e[0]);
    }

    #[test]
    fn leak_detected_on_small_grid() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let grid = FdGrid::new(-2.0, 2.0, 801).unwrap();
        assert!(matches!(
            fd_eigenvalues(&h, &u(), &grid, 3),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn argument_errors() {
        assert!(FdGrid::new(1.0, 0.0, 10).is_err());
        assert!(FdGrid::new(0.0, 1.0, 2).is_err());
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let grid = FdGrid::new(-5.0, 5.0, 10).unwrap();
        assert!(matches!(fd_eigenvalues(&h, &u(), &grid, 8), Err(Error::OutOfRange(_))));
        let c = PotentialSpec::coulomb(1.0, 0.5).unwrap();
        assert!(fd_eigenvalues(&c, &u(), &FdGrid::new(0.0, 10.0, 100).unwrap(), 1).is_err());
    }

    #[test]
    fn sturm_matches_dense_diagonalization() {
        for (spec, grid) in [
            (PotentialSpec::harmonic(1.0).unwrap(), FdGrid::new(-6.0, 6.0, 200).unwrap()),
            (PotentialSpec::double_well(1.5, 1.0).unwrap(), FdGrid::new(-3.5, 3.5, 150).unwrap()),
            (PotentialSpec::morse(10.0, 1.0, 0.0).unwrap(), FdGrid::new(-1.5, 8.0, 120).unwrap()),
        ] {
            let (_, t) = discretize(&spec, &u(), &grid).unwrap();
            let n = t.len();
            let dense = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    t.diag[i]
                } else if i.abs_diff(j) == 1 {
                    t.off
                } else {
                    0.0
                }
            });
            let mut reference: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
            reference.sort_by(|a, b| a.total_cmp(b));
            let ours = t.lowest_eigenvalues(10);
            for w in ours.windows(2) {
                assert!(w[0] <= w[1]);
            }
            for (a, b) in ours.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn eigenvector_satisfies_equation() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let (_, t) = discretize(&h, &u(), &FdGrid::new(-8.0, 8.0, 801).unwrap()).unwrap();
        let lambda = t.lowest_eigenvalues(3)[2];
        let v = t.eigenvector(lambda);
        let n = t.len();
        let mut res = 0.0f64;
        for i in 0..n {
            let mut y = (t.diag[i] - lambda) * v[i];
            if i > 0 {
                y += t.off * v[i - 1];
            }
            if i + 1 < n {
                y += t.off * v[i + 1];
            }
            res = res.max(y.abs());
        }
        assert!(res < 1e-6, "residual {res}");
    }
}
