//! Classically allowed intervals ("cuts") at a trial energy.

use crate::error::{Error, Result};
use crate::potential::{Family, Interval, PotentialSpec, UnitSystem, TURNING_POINT_TOL};

const BASE_SAMPLES: usize = 4096;
const MAX_SAMPLES: usize = 1 << 16;
const MIN_SAMPLES_PER_CUT: usize = 8;
const REFINE_RTOL: f64 = 1e-12;
/// Forbidden gaps narrower than this (relative) are barrier-top degeneracies.
const DEGENERATE_RTOL: f64 = 1e-10;

/// How a cut ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    /// `E = V` with finite slope; one reflection.
    Soft,
    /// Impenetrable wall; counts twice towards the Maslov index.
    HardWall,
    /// The allowed region runs into the edge of the domain (bare Coulomb
    /// at `r = 0`); treated like a soft turning point.
    Clamped,
}

impl Endpoint {
    pub fn maslov(self) -> u32 {
        match self {
            Endpoint::Soft | Endpoint::Clamped => 1,
            Endpoint::HardWall => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cut {
    pub left: f64,
    pub right: f64,
    pub left_kind: Endpoint,
    pub right_kind: Endpoint,
}

impl Cut {
    pub fn soft(left: f64, right: f64) -> Self {
        Self {
            left,
            right,
            left_kind: Endpoint::Soft,
            right_kind: Endpoint::Soft,
        }
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn maslov(&self) -> u32 {
        self.left_kind.maslov() + self.right_kind.maslov()
    }
}

/// Ordered, disjoint cuts and the total turning-point count `mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct CutSet {
    cuts: Vec<Cut>,
    mu: u32,
}

impl CutSet {
    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn nu(&self) -> usize {
        self.cuts.len()
    }
}

/// Finds every maximal subinterval of `search` where `E > V`.
///
/// A uniform scan (plus the family's extrema as fixed anchors) locates sign
/// changes of `E - V`; each is refined by bisection. The scan density doubles
/// up to `2^16` while some cut spans fewer than eight samples.
pub fn find_cuts(spec: &PotentialSpec, units: &UnitSystem, e: f64, search: Interval) -> Result<CutSet> {
    if !e.is_finite() {
        return Err(Error::InvalidParameter(format!("energy must be finite, got {e}")));
    }
    let domain = spec.domain();
    if search.lo < domain.lo || search.hi > domain.hi || search.lo >= search.hi {
        return Err(Error::InvalidParameter(format!(
            "search interval ({}, {}) is not inside the domain",
            search.lo, search.hi
        )));
    }
    if let Family::ConstantMomentumWell { q1, q2 } = *spec.family() {
        return walled_cut(e, q1, q2, &search);
    }
    if !(search.lo.is_finite() && search.hi.is_finite()) {
        return Err(Error::InvalidParameter("search interval must be finite".into()));
    }
    let m = units.mass();
    let anchors: Vec<f64> = spec
        .critical_points(m)
        .into_iter()
        .filter(|q| search.contains_open(*q))
        .collect();

    let mut samples = BASE_SAMPLES;
    loop {
        let grid = scan_grid(&search, samples, &anchors);
        let allowed: Vec<bool> = grid.iter().map(|&q| spec.excess(m, e, q) > 0.0).collect();
        let runs = allowed_runs(&allowed);
        if runs.is_empty() {
            return Err(Error::EnergyBelowFloor { energy: e });
        }
        let thin = runs.iter().any(|&(i, j)| j - i + 1 < MIN_SAMPLES_PER_CUT);
        if thin && samples < MAX_SAMPLES {
            samples *= 2;
            continue;
        }

        let mut cuts = Vec::with_capacity(runs.len());
        for &(i, j) in &runs {
            let (left, left_kind) = if i == 0 {
                boundary_left(spec, m, e, &search)?
            } else {
                (refine(spec, m, e, grid[i - 1], grid[i]), Endpoint::Soft)
            };
            let (right, right_kind) = if j == grid.len() - 1 {
                boundary_right(e, &search)?
            } else {
                (refine(spec, m, e, grid[j + 1], grid[j]), Endpoint::Soft)
            };
            cuts.push(Cut {
                left,
                right,
                left_kind,
                right_kind,
            });
        }
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0].right, pair[1].left);
            let depth = -spec.excess(m, e, 0.5 * (a + b));
            if b - a <= DEGENERATE_RTOL * a.abs().max(1.0) || depth <= TURNING_POINT_TOL * e.abs().max(1.0) {
                return Err(Error::DegenerateTurningPoints { q: 0.5 * (a + b) });
            }
        }
        let mu = cuts.iter().map(Cut::maslov).sum();
        return Ok(CutSet { cuts, mu });
    }
}

/// [`find_cuts`] over the family's default search window at `e`.
pub fn find_cuts_default(spec: &PotentialSpec, units: &UnitSystem, e: f64) -> Result<CutSet> {
    find_cuts(spec, units, e, spec.default_search(units, e))
}

fn walled_cut(e: f64, q1: f64, q2: f64, search: &Interval) -> Result<CutSet> {
    if e <= 0.0 {
        return Err(Error::EnergyBelowFloor { energy: e });
    }
    if !(search.lo <= q1 && q2 <= search.hi) {
        return Err(Error::InvalidParameter(format!(
            "search interval ({}, {}) must enclose both walls",
            search.lo, search.hi
        )));
    }
    let cut = Cut {
        left: q1,
        right: q2,
        left_kind: Endpoint::HardWall,
        right_kind: Endpoint::HardWall,
    };
    Ok(CutSet {
        mu: cut.maslov(),
        cuts: vec![cut],
    })
}

fn scan_grid(search: &Interval, samples: usize, anchors: &[f64]) -> Vec<f64> {
    let step = search.width() / (samples - 1) as f64;
    let mut grid: Vec<f64> = (0..samples).map(|i| search.lo + step * i as f64).collect();
    grid[samples - 1] = search.hi;
    grid.extend_from_slice(anchors);
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    grid
}

fn allowed_runs(allowed: &[bool]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &a) in allowed.iter().enumerate() {
        match (a, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, allowed.len() - 1));
    }
    runs
}

/// Bisection between a forbidden point and an allowed one.
fn refine(spec: &PotentialSpec, m: f64, e: f64, mut forbidden: f64, mut allowed: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (forbidden + allowed);
        if (allowed - forbidden).abs() <= REFINE_RTOL * mid.abs().max(1.0) {
            break;
        }
        if spec.excess(m, e, mid) > 0.0 {
            allowed = mid;
        } else {
            forbidden = mid;
        }
    }
    0.5 * (forbidden + allowed)
}

fn boundary_left(spec: &PotentialSpec, m: f64, e: f64, search: &Interval) -> Result<(f64, Endpoint)> {
    if let Family::CoulombRadialEffective { p_theta, .. } = *spec.family() {
        if p_theta == 0.0 {
            return Ok((0.0, Endpoint::Clamped));
        }
        // centrifugal wall: walk towards r = 0 until forbidden
        let mut r = search.lo;
        for _ in 0..300 {
            let next = 0.1 * r;
            if next <= 0.0 {
                break;
            }
            if spec.excess(m, e, next) <= 0.0 {
                return Ok((refine(spec, m, e, next, r), Endpoint::Soft));
            }
            r = next;
        }
    }
    Err(Error::UnboundedCut { energy: e, q: search.lo })
}

fn boundary_right(e: f64, search: &Interval) -> Result<(f64, Endpoint)> {
    Err(Error::UnboundedCut { energy: e, q: search.hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> UnitSystem {
        UnitSystem::default()
    }

    #[test]
    fn harmonic_single_cut() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let cs = find_cuts_default(&h, &u(), 0.5).unwrap();
        assert_eq!(cs.nu(), 1);
        assert_eq!(cs.mu(), 2);
        let c = cs.cuts()[0];
        assert!((c.left + 1.0).abs() < 1e-11);
        assert!((c.right - 1.0).abs() < 1e-11);
    }

    #[test]
    fn double_well_two_cuts() {
        let dw = PotentialSpec::double_well(1.0, 1.0).unwrap();
        let cs = find_cuts_default(&dw, &u(), 0.5).unwrap();
        assert_eq!(cs.nu(), 2);
        assert_eq!(cs.mu(), 4);
        // (q^2 - 1)^2 = 1/2  =>  q^2 = 1 -/+ sqrt(1/2)
        let inner = (1.0 - 0.5f64.sqrt()).sqrt();
        let outer = (1.0 + 0.5f64.sqrt()).sqrt();
        let expect = [(-outer, -inner), (inner, outer)];
        for (c, (l, r)) in cs.cuts().iter().zip(expect) {
            assert!((c.left - l).abs() < 1e-11, "{} vs {l}", c.left);
            assert!((c.right - r).abs() < 1e-11, "{} vs {r}", c.right);
        }
        assert!((outer - 1.30656).abs() < 1e-5 && (inner - 0.54120).abs() < 1e-5);
    }

    #[test]
    fn quartic_cut() {
        let q = PotentialSpec::quartic(1.0).unwrap();
        let cs = find_cuts_default(&q, &u(), 1.0).unwrap();
        assert_eq!(cs.mu(), 2);
        assert!((cs.cuts()[0].left + 1.0).abs() < 1e-11);
        assert!((cs.cuts()[0].right - 1.0).abs() < 1e-11);
    }

    #[test]
    fn below_floor_and_barrier_top() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        assert!(matches!(
            find_cuts_default(&h, &u(), -0.1),
            Err(Error::EnergyBelowFloor { .. })
        ));
        let dw = PotentialSpec::double_well(1.0, 1.0).unwrap();
        assert!(matches!(
            find_cuts_default(&dw, &u(), 1.0),
            Err(Error::DegenerateTurningPoints { .. })
        ));
        // just above the barrier the wells merge
        let cs = find_cuts_default(&dw, &u(), 1.0 + 1e-6).unwrap();
        assert_eq!(cs.nu(), 1);
    }

    #[test]
    fn tiny_cut_found_through_anchor() {
        let h = PotentialSpec::harmonic(1.0).unwrap();
        let cs = find_cuts(&h, &u(), 1e-12, Interval::new(-50.0, 50.0).unwrap()).unwrap();
        assert_eq!(cs.nu(), 1);
        assert!((cs.cuts()[0].right - (2e-12f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coulomb_turning_points() {
        let c = PotentialSpec::coulomb(1.0, 0.5).unwrap();
        let cs = find_cuts_default(&c, &u(), -0.5).unwrap();
        assert_eq!(cs.mu(), 2);
        // -r^2 + 2r - 1/4 = 0
        let (l, r) = (1.0 - 0.75f64.sqrt(), 1.0 + 0.75f64.sqrt());
        assert!((cs.cuts()[0].left - l).abs() < 1e-11);
        assert!((cs.cuts()[0].right - r).abs() < 1e-10);

        let bare = PotentialSpec::coulomb(1.0, 0.0).unwrap();
        let cs = find_cuts_default(&bare, &u(), -0.5).unwrap();
        assert_eq!(cs.cuts()[0].left, 0.0);
        assert_eq!(cs.cuts()[0].left_kind, Endpoint::Clamped);
        assert!((cs.cuts()[0].right - 2.0).abs() < 1e-10);
    }

    #[test]
    fn walls_count_twice() {
        let w = PotentialSpec::constant_momentum_well(0.0, 1.0).unwrap();
        let cs = find_cuts_default(&w, &u(), 1.0).unwrap();
        assert_eq!(cs.mu(), 4);
        assert_eq!((cs.cuts()[0].left, cs.cuts()[0].right), (0.0, 1.0));
    }

    #[test]
    fn unbounded_morse() {
        let m = PotentialSpec::morse(10.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            find_cuts_default(&m, &u(), 10.5),
            Err(Error::UnboundedCut { .. })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn catalog() -> Vec<PotentialSpec> {
            vec![
                PotentialSpec::harmonic(1.3).unwrap(),
                PotentialSpec::morse(10.0, 1.0, 0.5).unwrap(),
                PotentialSpec::quartic(0.7).unwrap(),
                PotentialSpec::double_well(1.5, 0.8).unwrap(),
            ]
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn union_of_cuts_matches_sampling(frac in 0.01f64..0.95, which in 0usize..4) {
                let spec = catalog()[which];
                let e = match spec.family() {
                    Family::Morse { depth, .. } => frac * depth,
                    Family::DoubleWellQuartic { a, scale } => 2.0 * frac * scale * a.powi(4),
                    _ => 10.0 * frac,
                };
                let units = UnitSystem::default();
                let search = spec.default_search(&units, e);
                let cs = match find_cuts(&spec, &units, e, search) {
                    Ok(cs) => cs,
                    Err(Error::DegenerateTurningPoints { .. }) => return Ok(()),
                    Err(err) => return Err(TestCaseError::fail(err.to_string())),
                };
                prop_assert_eq!(cs.mu() as usize, 2 * cs.nu());
                for w in cs.cuts().windows(2) {
                    prop_assert!(w[0].right < w[1].left);
                }
                let n = 5000;
                for i in 0..=n {
                    let q = search.lo + search.width() * i as f64 / n as f64;
                    let inside = cs.cuts().iter().any(|c| c.left <= q && q <= c.right);
                    let near_tp = cs.cuts().iter().any(|c| {
                        (q - c.left).abs() < 1e-9 || (q - c.right).abs() < 1e-9
                    });
                    if !near_tp {
                        prop_assert_eq!(inside, spec.excess(1.0, e, q) > 0.0, "q = {}", q);
                    }
                }
            }

            #[test]
            fn cuts_grow_with_energy(e in 0.05f64..5.0, de in 0.01f64..2.0) {
                let units = UnitSystem::default();
                for spec in catalog() {
                    let (Ok(lo), Ok(hi)) = (
                        find_cuts_default(&spec, &units, e),
                        find_cuts_default(&spec, &units, e + de),
                    ) else { continue };
                    for c in lo.cuts() {
                        prop_assert!(hi.cuts().iter().any(|d| d.left <= c.left && c.right <= d.right));
                    }
                }
            }
        }
    }
}
