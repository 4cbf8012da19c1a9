//! Potential families, point evaluation, and the classical momentum
//! `p(q) = sqrt(2m |E - V(q)|)`.
//!
//! Every family is parameterized declaratively by [`Family`] and wrapped in a
//! validated [`PotentialSpec`]. The special [`Family::ConstantMomentumWell`]
//! has no smooth potential: it stands for a particle with constant momentum
//! `P = sqrt(2mE)` between two hard walls, with exponential tails of the same
//! rate outside them.

use crate::error::{Error, Result};

/// Relative tolerance on `|E - V|` below which a point is a turning point.
pub const TURNING_POINT_TOL: f64 = 1e-12;

/// Planck's reduced constant and particle mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitSystem {
    hbar: f64,
    mass: f64,
}

impl UnitSystem {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { hbar, mass })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

/// A coordinate interval; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidParameter(format!("empty interval ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub const fn full_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub const fn positive_half_line() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    /// Closed membership `lo <= q <= hi` for finite `q`.
    pub fn contains(&self, q: f64) -> bool {
        q.is_finite() && self.lo <= q && q <= self.hi
    }

    /// Open membership `lo < q < hi` for finite `q`.
    pub fn contains_open(&self, q: f64) -> bool {
        q.is_finite() && self.lo < q && q < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn intersect(&self, other: &Interval) -> Result<Interval> {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

/// The catalog of supported potential shapes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// `V = m omega^2 q^2 / 2`
    Harmonic { omega: f64 },
    /// `V = D (1 - exp(-a (q - q0)))^2`
    Morse { depth: f64, width: f64, center: f64 },
    /// `V = c4 q^4`
    QuarticWell { c4: f64 },
    /// `V = scale (q^2 - a^2)^2`
    DoubleWellQuartic { a: f64, scale: f64 },
    /// `V = -alpha / r + P_theta^2 / (2 m r^2)` on `r > 0`
    CoulombRadialEffective { alpha: f64, p_theta: f64 },
    /// Constant momentum between hard walls at `q1 < q2`.
    ConstantMomentumWell { q1: f64, q2: f64 },
}

/// Whether `p` is in the classically allowed or forbidden region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MomentumRegion {
    Allowed,
    Forbidden,
    TurningPoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentumValue {
    pub magnitude: f64,
    pub region: MomentumRegion,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialSpec {
    family: Family,
    domain: Interval,
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {value}")))
    }
}

fn require_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {value}")))
    }
}

impl PotentialSpec {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::Harmonic { omega } => require_positive("omega", omega)?,
            Family::Morse { depth, width, center } => {
                require_positive("D", depth)?;
                require_positive("a", width)?;
                require_finite("q0", center)?;
            }
            Family::QuarticWell { c4 } => require_positive("c4", c4)?,
            Family::DoubleWellQuartic { a, scale } => {
                require_positive("a", a)?;
                require_positive("scale", scale)?;
            }
            Family::CoulombRadialEffective { alpha, p_theta } => {
                require_positive("alpha", alpha)?;
                if !(p_theta.is_finite() && p_theta >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "P_theta must be non-negative, got {p_theta}"
                    )));
                }
            }
            Family::ConstantMomentumWell { q1, q2 } => {
                require_finite("q1", q1)?;
                require_finite("q2", q2)?;
                if q2 <= q1 {
                    return Err(Error::InvalidParameter(format!(
                        "walls must satisfy q1 < q2, got q1 = {q1}, q2 = {q2}"
                    )));
                }
            }
        }
        let domain = match family {
            Family::CoulombRadialEffective { .. } => Interval::positive_half_line(),
            _ => Interval::full_line(),
        };
        Ok(Self { family, domain })
    }

    pub fn harmonic(omega: f64) -> Result<Self> {
        Self::new(Family::Harmonic { omega })
    }

    pub fn morse(depth: f64, width: f64, center: f64) -> Result<Self> {
        Self::new(Family::Morse { depth, width, center })
    }

    pub fn quartic(c4: f64) -> Result<Self> {
        Self::new(Family::QuarticWell { c4 })
    }

    pub fn double_well(a: f64, scale: f64) -> Result<Self> {
        Self::new(Family::DoubleWellQuartic { a, scale })
    }

    pub fn coulomb(alpha: f64, p_theta: f64) -> Result<Self> {
        Self::new(Family::CoulombRadialEffective { alpha, p_theta })
    }

    pub fn constant_momentum_well(q1: f64, q2: f64) -> Result<Self> {
        Self::new(Family::ConstantMomentumWell { q1, q2 })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// The maximal interval on which [`eval_v`](Self::eval_v) is defined.
    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn is_hard_wall(&self) -> bool {
        matches!(self.family, Family::ConstantMomentumWell { .. })
    }

    /// `V(q)`. Hard walls evaluate to `+inf` outside the well.
    pub fn eval_v(&self, units: &UnitSystem, q: f64) -> Result<f64> {
        self.check_domain(q)?;
        Ok(self.v(units.mass(), q))
    }

    pub(crate) fn check_domain(&self, q: f64) -> Result<()> {
        if self.domain.contains_open(q) {
            Ok(())
        } else {
            Err(Error::Domain {
                q,
                lo: self.domain.lo,
                hi: self.domain.hi,
            })
        }
    }

    /// Unchecked potential; callers guarantee `q` is in the domain.
    pub(crate) fn v(&self, mass: f64, q: f64) -> f64 {
        match self.family {
            Family::Harmonic { omega } => 0.5 * mass * omega * omega * q * q,
            Family::Morse { depth, width, center } => {
                let s = 1.0 - (-width * (q - center)).exp();
                depth * s * s
            }
            Family::QuarticWell { c4 } => c4 * q.powi(4),
            Family::DoubleWellQuartic { a, scale } => {
                let s = q * q - a * a;
                scale * s * s
            }
            Family::CoulombRadialEffective { alpha, p_theta } => {
                -alpha / q + p_theta * p_theta / (2.0 * mass * q * q)
            }
            Family::ConstantMomentumWell { q1, q2 } => {
                if (q1..=q2).contains(&q) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `E - V(q)` as seen by the momentum; for hard walls the sign alone
    /// carries meaning.
    pub(crate) fn excess(&self, mass: f64, e: f64, q: f64) -> f64 {
        match self.family {
            Family::ConstantMomentumWell { q1, q2 } => {
                if (q1..=q2).contains(&q) {
                    e
                } else {
                    -e
                }
            }
            _ => e - self.v(mass, q),
        }
    }

    /// Unchecked `|p(q)|`.
    pub(crate) fn momentum_magnitude(&self, mass: f64, e: f64, q: f64) -> f64 {
        match self.family {
            Family::ConstantMomentumWell { .. } => (2.0 * mass * e.max(0.0)).sqrt(),
            _ => (2.0 * mass * (e - self.v(mass, q)).abs()).sqrt(),
        }
    }

    pub fn classical_momentum(&self, units: &UnitSystem, e: f64, q: f64) -> Result<MomentumValue> {
        self.check_domain(q)?;
        let m = units.mass();
        if let Family::ConstantMomentumWell { q1, q2 } = self.family {
            let magnitude = self.momentum_magnitude(m, e, q);
            let region = if magnitude == 0.0 {
                MomentumRegion::TurningPoint
            } else if (q1..=q2).contains(&q) {
                MomentumRegion::Allowed
            } else {
                MomentumRegion::Forbidden
            };
            return Ok(MomentumValue { magnitude, region });
        }
        let diff = e - self.v(m, q);
        if diff.abs() <= TURNING_POINT_TOL * e.abs().max(1.0) {
            return Ok(MomentumValue {
                magnitude: 0.0,
                region: MomentumRegion::TurningPoint,
            });
        }
        let magnitude = (2.0 * m * diff.abs()).sqrt();
        let region = if diff > 0.0 {
            MomentumRegion::Allowed
        } else {
            MomentumRegion::Forbidden
        };
        Ok(MomentumValue { magnitude, region })
    }

    /// Local extrema of `V`, used as mandatory scan anchors.
    pub(crate) fn critical_points(&self, mass: f64) -> Vec<f64> {
        match self.family {
            Family::Harmonic { .. } | Family::QuarticWell { .. } => vec![0.0],
            Family::Morse { center, .. } => vec![center],
            Family::DoubleWellQuartic { a, .. } => vec![-a, 0.0, a],
            Family::CoulombRadialEffective { alpha, p_theta } => {
                if p_theta > 0.0 {
                    vec![p_theta * p_theta / (mass * alpha)]
                } else {
                    vec![]
                }
            }
            Family::ConstantMomentumWell { .. } => vec![],
        }
    }

    /// Global minima of `V` (coordinates at which the floor is attained).
    pub(crate) fn minima(&self, mass: f64) -> Vec<f64> {
        match self.family {
            Family::DoubleWellQuartic { a, .. } => vec![-a, a],
            Family::ConstantMomentumWell { q1, q2 } => vec![0.5 * (q1 + q2)],
            _ => self.critical_points(mass),
        }
    }

    /// Lowest value of `V` attained inside `search`; `-inf` for the bare
    /// Coulomb potential.
    pub fn floor_on(&self, units: &UnitSystem, search: &Interval) -> f64 {
        let m = units.mass();
        if let Family::CoulombRadialEffective { p_theta, .. } = self.family {
            if p_theta == 0.0 {
                return f64::NEG_INFINITY;
            }
        }
        let mut best = f64::INFINITY;
        for q in self.minima(m) {
            if search.contains(q) {
                best = best.min(self.v(m, q));
            }
        }
        if best.is_finite() {
            return best;
        }
        // Minimum outside the search window: the lower endpoint value wins for
        // every catalog family restricted to an interval free of minima.
        let lo = self.v(m, search.lo.max(self.domain.lo + f64::MIN_POSITIVE));
        let hi = self.v(m, search.hi);
        lo.min(hi)
    }

    /// Upper limit of the bound spectrum: the dissociation energy for Morse
    /// and zero for Coulomb.
    pub fn energy_ceiling(&self) -> f64 {
        match self.family {
            Family::Morse { depth, .. } => depth,
            Family::CoulombRadialEffective { .. } => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// Center for even-parity families.
    pub fn reflection_center(&self) -> Option<f64> {
        match self.family {
            Family::Harmonic { .. } | Family::QuarticWell { .. } | Family::DoubleWellQuartic { .. } => {
                Some(0.0)
            }
            Family::ConstantMomentumWell { q1, q2 } => Some(0.5 * (q1 + q2)),
            _ => None,
        }
    }

    /// Outermost classical turning points estimated in closed form.
    fn classical_extent(&self, mass: f64, e: f64) -> Option<(f64, f64)> {
        let extent = match self.family {
            Family::Harmonic { omega } => {
                let amp = (2.0 * e / (mass * omega * omega)).sqrt();
                (-amp, amp)
            }
            Family::QuarticWell { c4 } => {
                let amp = (e / c4).powf(0.25);
                (-amp, amp)
            }
            Family::DoubleWellQuartic { a, scale } => {
                let amp = (a * a + (e / scale).sqrt()).sqrt();
                (-amp, amp)
            }
            Family::Morse { depth, width, center } => {
                let s = (e / depth).sqrt();
                (center - (1.0 + s).ln() / width, center - (1.0 - s).ln() / width)
            }
            Family::CoulombRadialEffective { .. } | Family::ConstantMomentumWell { .. } => {
                return None
            }
        };
        (e > 0.0 && extent.0.is_finite() && extent.1.is_finite() && extent.0 < extent.1)
            .then_some(extent)
    }

    /// Search window for turning points at energy `e`.
    ///
    /// Confining families scan their closed-form extent padded by half its
    /// width on each side, falling back to `center +/- 50`. Coulomb scans
    /// `[1e-6, 1e3 * alpha / |E|]`; hard walls are padded by the well width.
    pub fn default_search(&self, units: &UnitSystem, e: f64) -> Interval {
        let m = units.mass();
        match self.family {
            Family::CoulombRadialEffective { alpha, .. } => {
                let hi = if e < 0.0 { 1e3 * alpha / e.abs() } else { f64::MAX };
                Interval { lo: 1e-6, hi: hi.max(1e-5) }
            }
            Family::ConstantMomentumWell { q1, q2 } => {
                let w = q2 - q1;
                Interval {
                    lo: q1 - w,
                    hi: q2 + w,
                }
            }
            _ => match self.classical_extent(m, e) {
                Some((lo, hi)) => {
                    let pad = 0.5 * (hi - lo);
                    Interval {
                        lo: lo - pad,
                        hi: hi + pad,
                    }
                }
                None => {
                    let c = match self.family {
                        Family::Morse { center, .. } => center,
                        _ => 0.0,
                    };
                    Interval {
                        lo: c - 50.0,
                        hi: c + 50.0,
                    }
                }
            },
        }
    }
}

/// Parses `family:key=value,...`, e.g. `morse:D=10,a=1,q0=0`.
///
/// Family names and keys are case-insensitive. `coulomb` accepts either the
/// angular quantum number `l` (mapped to `P_theta = hbar (l + 1/2)`) or an
/// explicit `ptheta`.
pub fn parse_potential(input: &str, units: &UnitSystem) -> Result<PotentialSpec> {
    let err = |reason: String| Error::Parse {
        input: input.to_string(),
        reason,
    };
    let (name, rest) = match input.split_once(':') {
        Some((n, r)) => (n.trim().to_ascii_lowercase(), r.trim()),
        None => (input.trim().to_ascii_lowercase(), ""),
    };
    let mut pairs: Vec<(String, f64)> = Vec::new();
    if !rest.is_empty() {
        for item in rest.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got '{item}'")))?;
            let key = k.trim().to_ascii_lowercase();
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| err(format!("value for '{key}' is not a number: '{}'", v.trim())))?;
            if pairs.iter().any(|(existing, _)| *existing == key) {
                return Err(err(format!("duplicate key '{key}'")));
            }
            pairs.push((key, value));
        }
    }

    let allowed: &[&str] = match name.as_str() {
        "harmonic" => &["omega"],
        "morse" => &["d", "a", "q0"],
        "quartic" | "quarticwell" => &["c4"],
        "doublewell" => &["a", "scale"],
        "coulomb" => &["alpha", "l", "ptheta"],
        "cmwell" => &["q1", "q2"],
        other => return Err(err(format!("unknown family '{other}'"))),
    };
    if let Some((bad, _)) = pairs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(err(format!("unknown key '{bad}' for family '{name}'")));
    }
    let get = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
    let need = |key: &str| get(key).ok_or_else(|| err(format!("missing key '{key}'")));

    let family = match name.as_str() {
        "harmonic" => Family::Harmonic {
            omega: need("omega")?,
        },
        "morse" => Family::Morse {
            depth: need("d")?,
            width: need("a")?,
            center: get("q0").unwrap_or(0.0),
        },
        "quartic" | "quarticwell" => Family::QuarticWell { c4: need("c4")? },
        "doublewell" => Family::DoubleWellQuartic {
            a: need("a")?,
            scale: get("scale").unwrap_or(1.0),
        },
        "coulomb" => {
            let p_theta = match (get("l"), get("ptheta")) {
                (Some(_), Some(_)) => return Err(err("give either 'l' or 'ptheta', not both".into())),
                (Some(l), None) => {
                    if l < 0.0 || l.fract() != 0.0 {
                        return Err(err(format!("'l' must be a non-negative integer, got {l}")));
                    }
                    units.hbar() * (l + 0.5)
                }
                (None, Some(p)) => p,
                (None, None) => units.hbar() * 0.5,
            };
            Family::CoulombRadialEffective {
                alpha: get("alpha").unwrap_or(1.0),
                p_theta,
            }
        }
        "cmwell" => Family::ConstantMomentumWell {
            q1: need("q1")?,
            q2: need("q2")?,
        },
        _ => unreachable!(),
    };
    PotentialSpec::new(family).map_err(|e| err(e.to_string()))
}
