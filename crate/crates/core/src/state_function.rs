//! The piecewise state function of a two-turning-point level.
//!
//! Exponentially decaying tails join the allowed-region standing wave through
//! the connection formulas, giving
//!
//! ```text
//!            | e^{-Phi(q)} / sqrt(2)              q < q1
//! psi0(q) ∝  | cos(phi(q) - phi1 - pi/4)          q1 <= q <= q2
//!            | (-1)^n e^{-Phi(q)} / sqrt(2)       q > q2
//! ```
//!
//! with `Phi` the decay exponent measured from the nearer turning point.
//! Normalization is numeric (trapezoid on the produced grid).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::io::{self, Write};

use num_complex::Complex64;

use crate::action::momentum_integral;
use crate::error::{Error, Result};
use crate::format::sig15;
use crate::potential::{PotentialSpec, UnitSystem};
use crate::quantizer::EnergyLevel;
use crate::turning_points::{find_cuts_default, Cut, Endpoint};

const PHASE_TOL: f64 = 1e-14;
const MIN_SAMPLES_PER_HALF_WAVE: usize = 16;
const MAX_GRID_POINTS: usize = 4_000_000;

/// Amplitudes on both sides of one turning point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl ConnectionCoefficients {
    pub fn from_exponential(c: Complex64, d: Complex64) -> Self {
        let (a, b) = connect(c, d);
        Self { a, b, c, d }
    }

    /// Residuals of value and slope matching: `(A + B) - (C + D)` and
    /// `i(A - B) - (D - C)`.
    pub fn matching_residuals(&self) -> (Complex64, Complex64) {
        let i = Complex64::i();
        (
            (self.a + self.b) - (self.c + self.d),
            i * (self.a - self.b) - (self.d - self.c),
        )
    }
}

/// Oscillatory amplitudes `(A, B)` from exponential amplitudes `(C, D)`.
pub fn connect(c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let plus = Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4);
    let minus = plus.conj();
    (c * plus + d * minus, c * minus + d * plus)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionTag {
    LeftTail,
    Oscillatory,
    RightTail,
}

impl RegionTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionTag::LeftTail => "LeftTail",
            RegionTag::Oscillatory => "Oscillatory",
            RegionTag::RightTail => "RightTail",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    /// Minimum samples per phase interval of `pi` inside the cut.
    pub samples_per_half_wave: usize,
    /// Tails stop where the decay exponent reaches this value.
    pub tail_exponent: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            samples_per_half_wave: 64,
            tail_exponent: 20.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateFunctionTable {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub regions: Vec<RegionTag>,
    pub node_count: usize,
    /// Trapezoid `int |psi|^2 dq` of the normalized table.
    pub norm: f64,
    /// Trapezoid `int |psi|^2 dq` before normalization (unit amplitude).
    pub unit_amplitude_norm: f64,
    /// Numeric normalizing amplitude, `1 / sqrt(unit_amplitude_norm)`.
    pub amplitude: f64,
    pub turning_points: (f64, f64),
}

impl StateFunctionTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "q,psi,region")?;
        for ((q, psi), tag) in self.grid.iter().zip(&self.values).zip(&self.regions) {
            writeln!(out, "{},{},{}", sig15(*q), sig15(*psi), tag.as_str())?;
        }
        Ok(())
    }

    /// Largest `|psi|` difference between neighbouring samples that carry
    /// different region tags.
    pub fn max_boundary_jump(&self) -> f64 {
        self.regions
            .windows(2)
            .zip(self.values.windows(2))
            .filter(|(r, _)| r[0] != r[1])
            .map(|(_, v)| (v[1] - v[0]).abs())
            .fold(0.0, f64::max)
    }
}

/// The closed-form amplitude `C_n = sqrt(2 P_n / ((pi (n + 1/2) + 1) hbar))`
/// for the constant-momentum state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormNormConstant {
    pub c_n: f64,
}

impl ClosedFormNormConstant {
    /// `C_n^2 int |psi|^2 dq` of the unit-amplitude table.
    pub fn implied_norm(&self, table: &StateFunctionTable) -> f64 {
        self.c_n * self.c_n * table.unit_amplitude_norm
    }
}

pub fn closed_form_norm_constant(p_n: f64, n: u32, units: &UnitSystem) -> Result<ClosedFormNormConstant> {
    if !(p_n.is_finite() && p_n > 0.0) {
        return Err(Error::InvalidParameter(format!("P_n must be positive, got {p_n}")));
    }
    let denom = (PI * (n as f64 + 0.5) + 1.0) * units.hbar();
    Ok(ClosedFormNormConstant {
        c_n: (2.0 * p_n / denom).sqrt(),
    })
}

/// Number of strict sign changes, skipping exact zeros.
pub fn count_sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}

pub fn count_nodes(table: &StateFunctionTable) -> usize {
    count_sign_changes(&table.values)
}

pub fn build_state_function(
    spec: &PotentialSpec,
    units: &UnitSystem,
    level: &EnergyLevel,
    grid: &GridSpec,
) -> Result<StateFunctionTable> {
    if level.mu != 2 {
        return Err(Error::Unsupported(format!(
            "level {} has mu = {}, two turning points required",
            level.n, level.mu
        )));
    }
    if grid.samples_per_half_wave < MIN_SAMPLES_PER_HALF_WAVE {
        return Err(Error::Resolution(format!(
            "{} samples per half-wave, need at least {MIN_SAMPLES_PER_HALF_WAVE}",
            grid.samples_per_half_wave
        )));
    }
    if !(grid.tail_exponent.is_finite() && grid.tail_exponent > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tail exponent must be positive, got {}",
            grid.tail_exponent
        )));
    }
    let e = level.energy;
    let cuts = find_cuts_default(spec, units, e)?;
    if cuts.nu() != 1 {
        return Err(Error::Unsupported(format!(
            "{} allowed intervals at E = {e}, two turning points required",
            cuts.nu()
        )));
    }
    let cut = cuts.cuts()[0];
    let (m, hbar) = (units.mass(), units.hbar());
    let (q1, q2) = (cut.left, cut.right);

    let p_max = (0..=256)
        .map(|i| {
            let t = -0.5 * PI + PI * i as f64 / 256.0;
            spec.momentum_magnitude(m, e, 0.5 * (q1 + q2) + 0.5 * (q2 - q1) * t.sin())
        })
        .fold(0.0, f64::max);
    if p_max <= 0.0 {
        return Err(Error::Resolution("allowed region has no momentum to resolve".into()));
    }
    let h = PI * hbar / (grid.samples_per_half_wave as f64 * p_max);

    let left_end = match cut.left_kind {
        Endpoint::Clamped => None,
        _ => Some(tail_end(spec, units, e, &cut, true, grid.tail_exponent)?),
    };
    let right_end = match cut.right_kind {
        Endpoint::Clamped => None,
        _ => Some(tail_end(spec, units, e, &cut, false, grid.tail_exponent)?),
    };
    let n_osc = ((q2 - q1) / h).ceil().max(1.0) as usize;
    let n_left = left_end.map_or(0, |l| ((q1 - l) / h).ceil() as usize);
    let n_right = right_end.map_or(0, |r| ((r - q2) / h).ceil() as usize);
    let total = n_left + n_osc + 1 + n_right;
    if total > MAX_GRID_POINTS {
        return Err(Error::Resolution(format!(
            "grid would need {total} points (limit {MAX_GRID_POINTS})"
        )));
    }

    let mut grid_q = Vec::with_capacity(total);
    let mut values = Vec::with_capacity(total);
    let mut regions = Vec::with_capacity(total);

    if let Some(l) = left_end {
        let step = (q1 - l) / n_left as f64;
        let pts: Vec<f64> = (1..=n_left)
            .rev()
            .map(|k| if k == n_left { l } else { q1 - step * k as f64 })
            .collect();
        let decay = cumulative_exponent(spec, m, hbar, e, q1, &pts)?;
        for (q, phi) in pts.iter().zip(decay) {
            grid_q.push(*q);
            values.push(FRAC_1_SQRT_2 * (-phi).exp());
            regions.push(RegionTag::LeftTail);
        }
    }

    let osc: Vec<f64> = (0..=n_osc)
        .map(|i| if i == n_osc { q2 } else { q1 + (q2 - q1) * i as f64 / n_osc as f64 })
        .collect();
    let phase = cumulative_exponent(spec, m, hbar, e, q1, &osc)?;
    for (q, phi) in osc.iter().zip(phase) {
        grid_q.push(*q);
        values.push((phi - FRAC_PI_4).cos());
        regions.push(RegionTag::Oscillatory);
    }

    if let Some(r) = right_end {
        let step = (r - q2) / n_right as f64;
        let pts: Vec<f64> = (1..=n_right)
            .map(|k| if k == n_right { r } else { q2 + step * k as f64 })
            .collect();
        let decay = cumulative_exponent(spec, m, hbar, e, q2, &pts)?;
        let sign = if level.n.is_multiple_of(2) { 1.0 } else { -1.0 };
        for (q, phi) in pts.iter().zip(decay) {
            grid_q.push(*q);
            values.push(sign * FRAC_1_SQRT_2 * (-phi).exp());
            regions.push(RegionTag::RightTail);
        }
    }

    let unit_amplitude_norm = trapezoid_sq(&grid_q, &values);
    let amplitude = unit_amplitude_norm.sqrt().recip();
    for v in &mut values {
        *v *= amplitude;
    }
    let norm = trapezoid_sq(&grid_q, &values);
    let node_count = count_sign_changes(&values);
    Ok(StateFunctionTable {
        grid: grid_q,
        values,
        regions,
        node_count,
        norm,
        unit_amplitude_norm,
        amplitude,
        turning_points: (q1, q2),
    })
}

fn trapezoid_sq(q: &[f64], v: &[f64]) -> f64 {
    q.windows(2)
        .zip(v.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] * y[0] + y[1] * y[1]))
        .sum()
}

/// `(1/hbar) int_{origin}^{q} |p| dq` for each point of a monotone sequence
/// moving away from `origin`, accumulated segment by segment.
fn cumulative_exponent(
    spec: &PotentialSpec,
    m: f64,
    hbar: f64,
    e: f64,
    origin: f64,
    points: &[f64],
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; points.len()];
    if points.is_empty() {
        return Ok(out);
    }
    // walk outward from the origin so segments start next to it
    let toward_origin_first = (points[0] - origin).abs() <= (points[points.len() - 1] - origin).abs();
    let order: Vec<usize> = if toward_origin_first {
        (0..points.len()).collect()
    } else {
        (0..points.len()).rev().collect()
    };
    let mut prev = origin;
    let mut acc = 0.0;
    for i in order {
        let q = points[i];
        if q != prev {
            let (seg, _) = momentum_integral(spec, m, e, prev, q, PHASE_TOL)?;
            acc += seg / hbar;
        }
        out[i] = acc;
        prev = q;
    }
    Ok(out)
}

/// Coordinate beyond the turning point where the decay exponent reaches
/// `target`, or the domain edge if it is never reached.
fn tail_end(spec: &PotentialSpec, units: &UnitSystem, e: f64, cut: &Cut, left: bool, target: f64) -> Result<f64> {
    let (m, hbar) = (units.mass(), units.hbar());
    let tp = if left { cut.left } else { cut.right };
    let domain = spec.domain();
    let exponent = |q: f64| momentum_integral(spec, m, e, tp, q, PHASE_TOL).map(|(v, _)| v / hbar);

    let mut d = 0.25 * cut.width().max(1e-12);
    let mut inner = tp;
    let mut outer;
    let mut reached = false;
    for _ in 0..200 {
        outer = if left { tp - d } else { tp + d };
        if left && domain.lo.is_finite() && outer <= domain.lo {
            // approach the half-line edge geometrically
            outer = domain.lo + (inner - domain.lo) * 0.5;
        }
        if exponent(outer)? >= target {
            reached = true;
            inner = bisect_exponent(&exponent, inner, outer, target)?;
            break;
        }
        inner = outer;
        d *= 2.0;
    }
    if !reached {
        return Err(Error::Resolution(format!(
            "decay exponent never reaches {target} beyond the turning point {tp}"
        )));
    }
    Ok(inner)
}

fn bisect_exponent<F: Fn(f64) -> Result<f64>>(exponent: &F, mut below: f64, mut above: f64, target: f64) -> Result<f64> {
    for _ in 0..60 {
        let mid = 0.5 * (below + above);
        if exponent(mid)? >= target {
            above = mid;
        } else {
            below = mid;
        }
    }
    Ok(above)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::{solve_level, solve_level_with, MaslovRule, SolveOptions};

    fn u() -> UnitSystem {
        UnitSystem::default()
    }

    #[test]
    fn connection_examples() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let e_plus = Complex64::from_polar(1.0, FRAC_PI_4);
        let (a, b) = connect(one, zero);
        assert!((a - e_plus * FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((b - e_plus.conj() * FRAC_1_SQRT_2).norm() < 1e-15);
        let (a, b) = connect(zero, one);
        assert!((a - e_plus.conj() * FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((b - e_plus * FRAC_1_SQRT_2).norm() < 1e-15);
        let (a, b) = connect(one, one);
        assert!((a - one).norm() < 1e-15 && (b - one).norm() < 1e-15);
    }

    #[test]
    fn closed_form_constant_values() {
        let c0 = closed_form_norm_constant(1.0, 0, &u()).unwrap().c_n;
        let c1 = closed_form_norm_constant(1.0, 1, &u()).unwrap().c_n;
        assert!((c0 - (2.0 / (PI / 2.0 + 1.0)).sqrt()).abs() < 1e-15);
        assert!((c0 - 0.882026).abs() < 1e-6);
        assert!((c1 - 0.591706).abs() < 1e-6);
        assert!(closed_form_norm_constant(0.0, 0, &u()).is_err());
    }

    #[test]
    fn sign_changes() {
        assert_eq!(count_sign_changes(&[1.0, 0.5, -0.1, 0.0, -0.2, 0.3]), 2);
        assert_eq!(count_sign_changes(&[0.0, 0.0]), 0);
        assert_eq!(count_sign_changes(&[]), 0);
    }

    #[test]
    fn harmonic_ground_state() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let level = solve_level(&h, &u(), 0, 1e-10).unwrap();
        let t = build_state_function(&h, &u(), &level, &GridSpec::default()).unwrap();
        assert_eq!(t.node_count, 0);
        assert!(t.values.iter().all(|&v| v > 0.0));
        assert!((t.norm - 1.0).abs() < 1e-12);
        for tag in [RegionTag::LeftTail, RegionTag::Oscillatory, RegionTag::RightTail] {
            assert!(t.regions.contains(&tag));
        }
        // value at q1 is amplitude / sqrt(2) from both constructions
        let i = t.grid.iter().position(|&q| q == t.turning_points.0).unwrap();
        assert!((t.values[i] - t.amplitude * FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn harmonic_excited_nodes_and_tail_sign() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        for n in [1, 3] {
            let level = solve_level(&h, &u(), n, 1e-10).unwrap();
            let t = build_state_function(&h, &u(), &level, &GridSpec::default()).unwrap();
            assert_eq!(t.node_count, n as usize);
            assert!(*t.values.last().unwrap() < 0.0, "(-1)^n tail for odd n");
        }
    }

    #[test]
    fn constant_momentum_nodes() {
        let w = PotentialSpec::constant_momentum_well(0.0, PI).unwrap();
        let opts = SolveOptions {
            maslov: MaslovRule::Fixed(2),
            ..SolveOptions::with_tol(1e-11)
        };
        let level = solve_level_with(&w, &u(), 2, &opts).unwrap();
        // P L = pi hbar (n + 1/2)
        assert!((level.energy - 0.5 * 2.5f64.powi(2)).abs() < 1e-9);
        let t = build_state_function(&w, &u(), &level, &GridSpec::default()).unwrap();
        assert_eq!(count_nodes(&t), 2);
    }

    #[test]
    fn rejects_multi_turning_point_levels() {
        let w = PotentialSpec::constant_momentum_well(0.0, PI).unwrap();
        let level = solve_level(&w, &u(), 0, 1e-10).unwrap();
        assert_eq!(level.mu, 4);
        assert!(matches!(
            build_state_function(&w, &u(), &level, &GridSpec::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn coarse_grid_rejected() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let level = solve_level(&h, &u(), 0, 1e-10).unwrap();
        let coarse = GridSpec {
            samples_per_half_wave: 8,
            ..GridSpec::default()
        };
        assert!(matches!(
            build_state_function(&h, &u(), &level, &coarse),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn continuity_improves_with_refinement() {
        let h = PotentialSpec::morse(10.0, 1.0, 0.0).unwrap();
        let level = solve_level(&h, &u(), 1, 1e-10).unwrap();
        let mut previous = f64::INFINITY;
        for s in [32, 64, 128] {
            let g = GridSpec {
                samples_per_half_wave: s,
                ..GridSpec::default()
            };
            let jump = build_state_function(&h, &u(), &level, &g).unwrap().max_boundary_jump();
            assert!(jump <= 0.5 * previous, "jump {jump} after {previous}");
            previous = jump;
        }
    }

    #[test]
    fn coulomb_state_function() {
        let c = PotentialSpec::coulomb(1.0, 1.5).unwrap();
        let level = solve_level(&c, &u(), 1, 1e-10).unwrap();
        let t = build_state_function(&c, &u(), &level, &GridSpec::default()).unwrap();
        assert_eq!(t.node_count, 1);
        assert!(t.grid[0] > 0.0);
        assert!((t.norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn csv_layout() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let level = solve_level(&h, &u(), 0, 1e-10).unwrap();
        let t = build_state_function(&h, &u(), &level, &GridSpec::default()).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("q,psi,region"));
        assert_eq!(lines.count(), t.grid.len());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn connection_satisfies_matching(cr in -10.0f64..10.0, ci in -10.0f64..10.0, dr in -10.0f64..10.0, di in -10.0f64..10.0) {
                let k = ConnectionCoefficients::from_exponential(Complex64::new(cr, ci), Complex64::new(dr, di));
                let (v, s) = k.matching_residuals();
                let scale = k.c.norm().max(k.d.norm()).max(1e-300);
                prop_assert!(v.norm() <= 8.0 * f64::EPSILON * scale);
                prop_assert!(s.norm() <= 8.0 * f64::EPSILON * scale);
            }
        }
    }
}
