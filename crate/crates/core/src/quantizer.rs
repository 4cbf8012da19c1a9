//! Energies from the action quantization condition
//! `J(E) = 2 pi hbar (N + mu / 4)`.
//!
//! With one cut and two soft turning points this is the familiar
//! `2 pi hbar (n + 1/2)`; with `nu` cuts, `mu = 2 nu` and `N` is the total
//! number of nodes over all cuts. `mu` is recomputed at every trial energy so
//! double wells pass correctly between their one-cut and two-cut regimes.

use std::f64::consts::PI;

use crate::action::action_over_cuts;
use crate::error::{Error, Result};
use crate::potential::{Family, Interval, PotentialSpec, UnitSystem};
use crate::turning_points::find_cuts;

/// Which Maslov index enters the target action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MaslovRule {
    /// Count turning points at each trial energy.
    #[default]
    Auto,
    /// Impose a fixed index, e.g. `Fixed(2)` for the two-turning-point
    /// standing wave between hard walls.
    Fixed(u32),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Absolute tolerance on `|J - target|`; `None` means `1e-9 hbar`.
    pub tol: Option<f64>,
    /// Restricts turning-point search, e.g. to one well of a double well.
    pub search: Option<Interval>,
    pub maslov: MaslovRule,
    /// Upper bound on bracket expansion; defaults to the family's ceiling.
    pub e_max: Option<f64>,
    /// Optional lower bracket seed (ignored if it is not below the level).
    pub e_start: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: None,
            search: None,
            maslov: MaslovRule::Auto,
            e_max: None,
            e_start: None,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol: Some(tol),
            ..Self::default()
        }
    }

    fn tolerance(&self, units: &UnitSystem) -> f64 {
        self.tol.unwrap_or(1e-9 * units.hbar())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantizationTarget {
    pub n: u32,
    pub mu: u32,
    pub target_action: f64,
}

impl QuantizationTarget {
    pub fn new(n: u32, mu: u32, units: &UnitSystem) -> Result<Self> {
        if mu < 2 {
            return Err(Error::InvalidParameter(format!("Maslov index must be at least 2, got {mu}")));
        }
        Ok(Self {
            n,
            mu,
            target_action: 2.0 * PI * units.hbar() * (n as f64 + mu as f64 / 4.0),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyLevel {
    pub n: u32,
    pub energy: f64,
    /// `|J(E) - target|` at the returned energy.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub mu: u32,
}

#[derive(Clone, Copy, Debug)]
struct Trial {
    f: f64,
    mu: u32,
}

struct Problem<'a> {
    spec: &'a PotentialSpec,
    units: &'a UnitSystem,
    n: u32,
    opts: &'a SolveOptions,
    tol: f64,
}

impl Problem<'_> {
    fn search(&self, e: f64) -> Result<Interval> {
        match self.opts.search {
            Some(s) => {
                let s = s.intersect(&self.spec.domain())?;
                if let Family::CoulombRadialEffective { .. } = self.spec.family() {
                    return Ok(Interval {
                        lo: s.lo.max(1e-6),
                        hi: s.hi,
                    });
                }
                Ok(s)
            }
            None => Ok(self.spec.default_search(self.units, e)),
        }
    }

    fn eval(&self, e: f64) -> Result<Trial> {
        self.eval_to(e, 1e-3 * self.tol)
    }

    /// Sign-only evaluation for bracket expansion; tightened when `f` is
    /// within reach of the looser quadrature error.
    fn eval_sign(&self, e: f64) -> Result<Trial> {
        let loose = (1e-3 * self.tol).max(1e-8 * self.units.hbar());
        let t = self.eval_to(e, loose)?;
        if t.f.abs() <= 10.0 * loose {
            return self.eval(e);
        }
        Ok(t)
    }

    fn eval_to(&self, e: f64, action_tol: f64) -> Result<Trial> {
        let cuts = find_cuts(self.spec, self.units, e, self.search(e)?)?;
        let mu = match self.opts.maslov {
            MaslovRule::Auto => cuts.mu(),
            MaslovRule::Fixed(m) => m,
        };
        let target = QuantizationTarget::new(self.n, mu, self.units)?;
        let j = action_over_cuts(self.spec, self.units, e, &cuts, action_tol)?;
        Ok(Trial {
            f: j.full_period - target.target_action,
            mu,
        })
    }

    /// Inside the bisection a barrier-top degeneracy means the root sits on
    /// the topology change.
    fn eval_inner(&self, e: f64) -> Result<Trial> {
        self.eval(e).map_err(|err| match err {
            Error::DegenerateTurningPoints { .. } => Error::StraddlesTopologyChange { level: self.n, energy: e },
            other => other,
        })
    }

    fn lower_start(&self) -> Result<(f64, Trial)> {
        if let Some(seed) = self.opts.e_start {
            if let Ok(t) = self.eval(seed) {
                if t.f < 0.0 {
                    return Ok((seed, t));
                }
            }
        }
        let floor_window = match self.opts.search {
            Some(s) => s.intersect(&self.spec.domain())?,
            None => self.spec.domain(),
        };
        let v_min = self.spec.floor_on(self.units, &floor_window);
        let lo = if v_min.is_finite() {
            v_min + 1e-9 * v_min.abs().max(1.0)
        } else {
            // bare Coulomb: J -> 0 as E -> -inf
            let (alpha, m, hbar) = match self.spec.family() {
                Family::CoulombRadialEffective { alpha, .. } => (*alpha, self.units.mass(), self.units.hbar()),
                _ => (1.0, 1.0, 1.0),
            };
            -1e8 * m * alpha * alpha / (hbar * hbar)
        };
        let t = self.eval(lo)?;
        if t.f >= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "quantization residual is non-negative at the potential floor (E = {lo})"
            )));
        }
        Ok((lo, t))
    }
}

/// Solves one level with default options and absolute action tolerance `tol`.
pub fn solve_level(spec: &PotentialSpec, units: &UnitSystem, n: u32, tol: f64) -> Result<EnergyLevel> {
    solve_level_with(spec, units, n, &SolveOptions::with_tol(tol))
}

/// Brackets `J(E) - target` by expansion from the potential floor, bisects
/// to `1e-3 tol` and polishes with a secant step.
pub fn solve_level_with(spec: &PotentialSpec, units: &UnitSystem, n: u32, opts: &SolveOptions) -> Result<EnergyLevel> {
    let tol = opts.tolerance(units);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let problem = Problem {
        spec,
        units,
        n,
        opts,
        tol,
    };
    solve(&problem).map_err(|e| e.at_level(n))
}

fn solve(p: &Problem<'_>) -> Result<EnergyLevel> {
    let ceiling = p.opts.e_max.unwrap_or(p.spec.energy_ceiling());
    let (mut lo, mut t_lo) = p.lower_start()?;
    if lo >= ceiling {
        return Err(Error::UnboundedSearch { level: p.n, e_max: ceiling });
    }

    // bracket expansion
    let mut step = 1e-6 * lo.abs().max(1.0);
    let (mut hi, mut t_hi);
    let mut iterations = 0;
    // energies past a failed evaluation (cut leaving the search window) are off limits
    let mut limit = ceiling;
    let mut blocked: Option<Error> = None;
    loop {
        iterations += 1;
        let mut candidate = lo + step;
        if candidate >= limit {
            candidate = lo + 0.5 * (limit - lo);
        }
        if candidate <= lo || iterations > 2000 || !candidate.is_finite() || step > 1e300 {
            return Err(blocked.unwrap_or(Error::UnboundedSearch { level: p.n, e_max: ceiling }));
        }
        let t = match p.eval_sign(candidate) {
            Ok(t) => t,
            Err(err @ (Error::UnboundedCut { .. } | Error::DegenerateTurningPoints { .. })) => {
                limit = candidate;
                blocked = Some(err);
                continue;
            }
            Err(err) => return Err(err),
        };
        if t.f >= 0.0 {
            hi = candidate;
            t_hi = t;
            break;
        }
        lo = candidate;
        t_lo = t;
        step *= 2.0;
    }

    // bisection
    let mut best = (0.5 * (lo + hi), None::<Trial>);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let t = p.eval_inner(mid)?;
        best = (mid, Some(t));
        if t.f.abs() <= 1e-3 * p.tol {
            break;
        }
        if t.f < 0.0 {
            lo = mid;
            t_lo = t;
        } else {
            hi = mid;
            t_hi = t;
        }
    }

    if matches!(p.opts.maslov, MaslovRule::Auto) && t_lo.mu != t_hi.mu {
        return Err(Error::StraddlesTopologyChange {
            level: p.n,
            energy: best.0,
        });
    }

    let (mut energy, mut trial) = match best {
        (e, Some(t)) => (e, t),
        (e, None) => (e, p.eval_inner(e)?),
    };

    // secant polish inside the bracket
    if t_hi.f != t_lo.f {
        let secant = lo - t_lo.f * (hi - lo) / (t_hi.f - t_lo.f);
        if secant > lo && secant < hi {
            if let Ok(t) = p.eval_inner(secant) {
                if t.f.abs() < trial.f.abs() {
                    energy = secant;
                    trial = t;
                }
            }
        }
    }

    if !(energy > lo && energy < hi) {
        // bisection ran out of floating-point resolution on an endpoint
        lo = energy.next_down();
        hi = energy.next_up();
    }

    let residual = trial.f.abs();
    if residual > p.tol {
        return Err(Error::NotConverged {
            level: p.n,
            residual,
            tol: p.tol,
        });
    }
    Ok(EnergyLevel {
        n: p.n,
        energy,
        residual,
        bracket: (lo, hi),
        mu: trial.mu,
    })
}

/// Levels `0..=n_max`, each bracket seeded from the previous energy.
pub fn spectrum(spec: &PotentialSpec, units: &UnitSystem, n_max: u32, tol: f64) -> Result<Vec<EnergyLevel>> {
    spectrum_with(spec, units, n_max, &SolveOptions::with_tol(tol))
}

pub fn spectrum_with(
    spec: &PotentialSpec,
    units: &UnitSystem,
    n_max: u32,
    opts: &SolveOptions,
) -> Result<Vec<EnergyLevel>> {
    let mut levels: Vec<EnergyLevel> = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let mut o = *opts;
        if let Some(prev) = levels.last() {
            o.e_start = Some(prev.energy);
        }
        let level = solve_level_with(spec, units, n, &o)?;
        if let Some(prev) = levels.last() {
            if level.energy <= prev.energy {
                return Err(Error::Level {
                    level: n,
                    source: Box::new(Error::InvalidParameter(format!(
                        "energy {} does not exceed the previous level {}",
                        level.energy, prev.energy
                    ))),
                });
            }
        }
        levels.push(level);
    }
    Ok(levels)
}

/// Rotation in a cyclic coordinate: `J = 2 pi hbar n`, `P = J / 2 pi`.
pub fn rotation_action(n: i64, units: &UnitSystem) -> Result<(f64, f64)> {
    if n < 0 {
        return Err(Error::InvalidParameter(format!("rotation quantum number must be >= 0, got {n}")));
    }
    let j = 2.0 * PI * units.hbar() * n as f64;
    Ok((j, j / (2.0 * PI)))
}
