//! Phase-space action over cuts and the phase function `phi(q)`.

use crate::error::{Error, Result};
use crate::potential::{Family, Interval, PotentialSpec, UnitSystem};
use crate::quadrature::integrate_adaptive;
use crate::turning_points::{find_cuts, Cut, CutSet, Endpoint};

/// Relative accuracy used when callers have no better estimate of `J`.
pub const DEFAULT_ACTION_RTOL: f64 = 1e-10;

/// `estimated_error` bounds the error of `full_period`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionValue {
    pub one_way: f64,
    pub full_period: f64,
    pub mu: u32,
    pub estimated_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseKind {
    OscillatoryPhase,
    DecayExponent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseValue {
    pub phi: f64,
    pub kind: PhaseKind,
}

/// `int p dq` between `from` and `to` (unsigned), with `|p|` from either
/// region. Error bound `tol`.
pub(crate) fn momentum_integral(
    spec: &PotentialSpec,
    mass: f64,
    e: f64,
    from: f64,
    to: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let (a, b) = if from <= to { (from, to) } else { (to, from) };
    match spec.family() {
        Family::ConstantMomentumWell { .. } => {
            return Ok((spec.momentum_magnitude(mass, e, a) * (b - a), 0.0));
        }
        // centrifugal tails grow like 1/r; integrate in ln r
        Family::CoulombRadialEffective { .. } if a > 0.0 && b > 4.0 * a => {
            let est = integrate_adaptive(
                |s| {
                    let r = s.exp();
                    spec.momentum_magnitude(mass, e, r) * r
                },
                a.ln(),
                b.ln(),
                tol,
            )?;
            return Ok((est.value, est.error));
        }
        _ => {}
    }
    let est = integrate_adaptive(|q| spec.momentum_magnitude(mass, e, q), a, b, tol)?;
    Ok((est.value, est.error))
}

/// One-way action `int_{q_left}^{q_right} p dq` over a single cut.
pub fn action_over_cut(spec: &PotentialSpec, units: &UnitSystem, e: f64, cut: &Cut, tol: f64) -> Result<ActionValue> {
    let mass = units.mass();
    let (one_way, err) = if spec.is_hard_wall() {
        momentum_integral(spec, mass, e, cut.left, cut.right, tol)?
    } else {
        let est = integrate_adaptive(
            |q| (2.0 * mass * spec.excess(mass, e, q).max(0.0)).sqrt(),
            cut.left,
            cut.right,
            tol,
        )?;
        (est.value, est.error)
    };
    Ok(ActionValue {
        one_way,
        full_period: 2.0 * one_way,
        mu: cut.maslov(),
        estimated_error: 2.0 * err,
    })
}

/// `J = 2 * sum of one-way integrals` over every cut in `cuts`.
pub fn action_over_cuts(spec: &PotentialSpec, units: &UnitSystem, e: f64, cuts: &CutSet, tol: f64) -> Result<ActionValue> {
    let per_cut = tol / (2 * cuts.nu().max(1)) as f64;
    let mut total = ActionValue {
        one_way: 0.0,
        full_period: 0.0,
        mu: cuts.mu(),
        estimated_error: 0.0,
    };
    for cut in cuts.cuts() {
        let a = action_over_cut(spec, units, e, cut, per_cut)?;
        total.one_way += a.one_way;
        total.full_period += a.full_period;
        total.estimated_error += a.estimated_error;
    }
    Ok(total)
}

/// Total action over every cut of the default search window.
pub fn total_action(spec: &PotentialSpec, units: &UnitSystem, e: f64, tol: f64) -> Result<ActionValue> {
    total_action_in(spec, units, e, spec.default_search(units, e), tol)
}

pub fn total_action_in(
    spec: &PotentialSpec,
    units: &UnitSystem,
    e: f64,
    search: Interval,
    tol: f64,
) -> Result<ActionValue> {
    let cuts = find_cuts(spec, units, e, search)?;
    action_over_cuts(spec, units, e, &cuts, tol)
}

/// `phi = (1/hbar) int |p| dq` measured from the turning point
/// `reference_tp` to `q`.
///
/// Inside the adjacent cut the result is an oscillatory phase; on the
/// forbidden side (up to the next cut) it is a decay exponent. Anything
/// farther is a mixed-region request.
pub fn phase_at(
    spec: &PotentialSpec,
    units: &UnitSystem,
    e: f64,
    reference_tp: f64,
    q: f64,
    tol: f64,
) -> Result<PhaseValue> {
    let domain = spec.domain();
    for x in [reference_tp, q] {
        if !(domain.contains_open(x) || (x == domain.lo && x.is_finite())) {
            return Err(Error::Domain {
                q: x,
                lo: domain.lo,
                hi: domain.hi,
            });
        }
    }
    let default = spec.default_search(units, e);
    let mut search = Interval {
        lo: default.lo.min(q).min(reference_tp),
        hi: default.hi.max(q).max(reference_tp),
    };
    if matches!(spec.family(), Family::CoulombRadialEffective { .. }) {
        search.lo = search.lo.max(f64::MIN_POSITIVE);
    }
    let cuts = find_cuts(spec, units, e, search)?;
    let (index, is_left) = locate_turning_point(&cuts, reference_tp)?;
    let cut = cuts.cuts()[index];
    let tp = if is_left { cut.left } else { cut.right };
    if q == reference_tp {
        return Ok(PhaseValue {
            phi: 0.0,
            kind: PhaseKind::OscillatoryPhase,
        });
    }

    let slack = 1e-12 * q.abs().max(1.0);
    let inward = if is_left { q > tp } else { q < tp };
    let kind = if inward {
        let inside = q >= cut.left - slack && q <= cut.right + slack;
        if !inside {
            return Err(Error::MixedRegionPhase { reference: reference_tp, q });
        }
        PhaseKind::OscillatoryPhase
    } else {
        let neighbour = if is_left {
            index.checked_sub(1).map(|i| cuts.cuts()[i].right)
        } else {
            cuts.cuts().get(index + 1).map(|c| c.left)
        };
        let crosses = match neighbour {
            Some(n) if is_left => q < n - slack,
            Some(n) => q > n + slack,
            None => false,
        };
        let wall_edge = matches!(
            if is_left { cut.left_kind } else { cut.right_kind },
            Endpoint::Clamped
        );
        if crosses || wall_edge {
            return Err(Error::MixedRegionPhase { reference: reference_tp, q });
        }
        PhaseKind::DecayExponent
    };
    let (integral, _) = momentum_integral(spec, units.mass(), e, tp, q, tol * units.hbar())?;
    Ok(PhaseValue {
        phi: integral / units.hbar(),
        kind,
    })
}

fn locate_turning_point(cuts: &CutSet, reference: f64) -> Result<(usize, bool)> {
    let tol = 1e-8 * reference.abs().max(1.0);
    for (i, c) in cuts.cuts().iter().enumerate() {
        if (c.left - reference).abs() <= tol {
            return Ok((i, true));
        }
        if (c.right - reference).abs() <= tol {
            return Ok((i, false));
        }
    }
    Err(Error::InvalidParameter(format!(
        "reference {reference} is not a turning point at this energy"
    )))
}
