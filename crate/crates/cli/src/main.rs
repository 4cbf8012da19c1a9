use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use actionq::action::phase_at;
use actionq::coulomb::semiclassical_radial_spec;
use actionq::{
    build_state_function, coulomb_closed_form, coulomb_spectrum, fd_eigenvalues, find_cuts_default,
    parse_potential, sig15, solve_level_with, spectrum_with, CoulombParams, EnergyLevel, Error, Family, FdGrid,
    GridSpec, PhaseKind, PotentialSpec, QuantumNumbers, SolveOptions, UnitSystem,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "actionq", version, about = "Semiclassical bound-state energies from quantized action")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Levels 0..=nmax as `N,E,J_residual`
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        nmax: i64,
    },
    /// Semiclassical levels against the finite-difference oracle
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        nmax: i64,
        /// `qmin,qmax,points`; derived from the top level's turning points when omitted
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Option<FdGrid>,
    },
    /// Normalized state function of one level as `q,psi,region`
    Statefn {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
        level: i64,
        /// Samples per half-wave of the oscillatory region
        #[arg(long, default_value_t = GridSpec::default().samples_per_half_wave)]
        samples: usize,
    },
    /// Coulomb levels up to principal number nmax: closed form, action insertion and radial solve
    Coulomb {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        nmax: i64,
    },
}

#[derive(Args)]
struct Common {
    /// Potential, e.g. `harmonic:omega=1` or `morse:d=10,a=1,q0=0`
    #[arg(long)]
    potential: Option<String>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    mass: f64,
    /// Absolute tolerance on the action residual (default 1e-9 hbar)
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

enum Failure {
    Parse(String),
    Solver(String),
    Oracle(String),
    Unsupported(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Oracle(_) => 4,
            Failure::Unsupported(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Solver(m) | Failure::Oracle(m) | Failure::Unsupported(m) => m,
        }
    }
}

fn solver(e: Error) -> Failure {
    match e {
        Error::Unsupported(detail) => Failure::Unsupported(format!("statefn supports two-turning-point levels: {detail}")),
        other => Failure::Solver(other.to_string()),
    }
}

fn oracle(e: Error) -> Failure {
    Failure::Oracle(format!("oracle: {e}"))
}

fn parse_grid(s: &str) -> Result<FdGrid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected qmin,qmax,points, got '{s}'"));
    }
    let q_min: f64 = parts[0].parse().map_err(|_| format!("bad qmin '{}'", parts[0]))?;
    let q_max: f64 = parts[1].parse().map_err(|_| format!("bad qmax '{}'", parts[1]))?;
    let points: usize = parts[2].parse().map_err(|_| format!("bad point count '{}'", parts[2]))?;
    FdGrid::new(q_min, q_max, points).map_err(|e| e.to_string())
}

struct Setup {
    spec: PotentialSpec,
    units: UnitSystem,
    opts: SolveOptions,
}

fn setup(common: &Common, default_potential: Option<&str>) -> Result<Setup, Failure> {
    let units = UnitSystem::new(common.hbar, common.mass).map_err(|e| Failure::Parse(e.to_string()))?;
    let text = match (&common.potential, default_potential) {
        (Some(p), _) => p.as_str(),
        (None, Some(d)) => d,
        (None, None) => return Err(Failure::Parse("--potential is required".into())),
    };
    let spec = parse_potential(text, &units).map_err(|e| Failure::Parse(e.to_string()))?;
    if let Some(tol) = common.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::Parse(format!("--tol must be positive, got {tol}")));
        }
    }
    let opts = SolveOptions {
        tol: common.tol,
        ..SolveOptions::default()
    };
    Ok(Setup { spec, units, opts })
}

fn non_negative(flag: &str, v: i64) -> Result<u32, Failure> {
    u32::try_from(v).map_err(|_| Failure::Parse(format!("--{flag} must be a non-negative integer, got {v}")))
}

fn cmd_spectrum(common: &Common, nmax: i64) -> Result<String, Failure> {
    let nmax = non_negative("nmax", nmax)?;
    let s = setup(common, None)?;
    let levels = spectrum_with(&s.spec, &s.units, nmax, &s.opts).map_err(solver)?;
    let mut out = String::from("N,E,J_residual\n");
    for l in &levels {
        let _ = writeln!(out, "{},{},{}", l.n, sig15(l.energy), sig15(l.residual));
    }
    Ok(out)
}

/// Oracle potential: the centrifugal constant `P` becomes `sqrt(P^2 - hbar^2 / 4)`,
/// i.e. `hbar^2 l (l + 1)` for `P = hbar (l + 1/2)`.
fn oracle_spec(spec: &PotentialSpec, units: &UnitSystem) -> Result<PotentialSpec, Failure> {
    match *spec.family() {
        Family::CoulombRadialEffective { alpha, p_theta } => {
            let h = units.hbar();
            let p = (p_theta * p_theta - 0.25 * h * h).max(0.0).sqrt();
            PotentialSpec::coulomb(alpha, p).map_err(oracle)
        }
        _ => Ok(*spec),
    }
}

/// Distance past `tp` at which the decay exponent reaches `target`.
fn tail_reach(spec: &PotentialSpec, units: &UnitSystem, e: f64, tp: f64, outward: f64, width: f64, target: f64) -> f64 {
    let domain = spec.domain();
    let mut d = 0.25 * width;
    let mut q = tp;
    for _ in 0..80 {
        q = (tp + outward * d).clamp(domain.lo, domain.hi);
        match phase_at(spec, units, e, tp, q, 1e-8) {
            Ok(p) if p.kind == PhaseKind::DecayExponent && p.phi >= target => return q,
            Ok(_) => {}
            Err(_) => return q,
        }
        d *= 1.5;
    }
    q
}

fn default_grid(spec: &PotentialSpec, units: &UnitSystem, top: &EnergyLevel) -> Result<FdGrid, Failure> {
    if let Family::ConstantMomentumWell { q1, q2 } = *spec.family() {
        return FdGrid::new(q1, q2, 8001).map_err(oracle);
    }
    let e = top.energy;
    let cuts = find_cuts_default(spec, units, e).map_err(oracle)?;
    let (left, right) = match (cuts.cuts().first(), cuts.cuts().last()) {
        (Some(a), Some(b)) => (a.left, b.right),
        _ => return Err(Failure::Oracle("oracle: no allowed region at the top level".into())),
    };
    let width = right - left;
    let q_max = tail_reach(spec, units, e, right, 1.0, width, 30.0);
    if let Family::CoulombRadialEffective { .. } = spec.family() {
        return FdGrid::new(1e-4, q_max, 40001).map_err(oracle);
    }
    let q_min = tail_reach(spec, units, e, left, -1.0, width, 30.0);
    FdGrid::new(q_min, q_max, 8001).map_err(oracle)
}

fn cmd_compare(common: &Common, nmax: i64, grid: Option<FdGrid>) -> Result<String, Failure> {
    let nmax = non_negative("nmax", nmax)?;
    let s = setup(common, None)?;
    let levels = spectrum_with(&s.spec, &s.units, nmax, &s.opts).map_err(solver)?;
    let top = levels.last().expect("spectrum has at least one level");
    let grid = match grid {
        Some(g) => g,
        None => default_grid(&s.spec, &s.units, top)?,
    };
    let reference = oracle_spec(&s.spec, &s.units)?;
    let fd = fd_eigenvalues(&reference, &s.units, &grid, levels.len()).map_err(oracle)?;
    let mut out = String::from("N,E_semiclassical,E_fd,abs_error\n");
    for (l, e_fd) in levels.iter().zip(&fd) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            l.n,
            sig15(l.energy),
            sig15(*e_fd),
            sig15((l.energy - e_fd).abs())
        );
    }
    Ok(out)
}

fn cmd_statefn(common: &Common, level: i64, samples: usize) -> Result<String, Failure> {
    let n = non_negative("level", level)?;
    let s = setup(common, None)?;
    let grid = GridSpec {
        samples_per_half_wave: samples,
        ..GridSpec::default()
    };
    if samples < 16 {
        return Err(Failure::Parse(format!("--samples must be at least 16, got {samples}")));
    }
    let lv = solve_level_with(&s.spec, &s.units, n, &s.opts).map_err(solver)?;
    let table = build_state_function(&s.spec, &s.units, &lv, &grid).map_err(|e| match e {
        Error::Unsupported(_) => solver(e),
        other => Failure::Solver(format!("level {n}: {other}")),
    })?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf).map_err(|e| Failure::Solver(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}

fn cmd_coulomb(common: &Common, nmax: i64) -> Result<String, Failure> {
    let nmax = non_negative("nmax", nmax)?;
    if nmax == 0 {
        return Err(Failure::Parse("--nmax is a principal quantum number and must be at least 1".into()));
    }
    let s = setup(common, Some("coulomb"))?;
    let alpha = match *s.spec.family() {
        Family::CoulombRadialEffective { alpha, .. } => alpha,
        _ => return Err(Failure::Parse("the coulomb table needs a coulomb potential".into())),
    };
    let cp = CoulombParams::new(alpha, s.units.mass(), s.units.hbar()).map_err(|e| Failure::Parse(e.to_string()))?;
    let mut out = String::from("n,l,n_r,E_closed,E_actions,E_semiclassical\n");
    for n in 1..=nmax {
        for l in 0..n {
            let n_r = n - l - 1;
            let qn = QuantumNumbers::new(n_r, l, 0);
            let radial = semiclassical_radial_spec(&cp, l);
            let e = solve_level_with(&radial, &s.units, n_r, &s.opts)
                .map_err(|e| Failure::Solver(format!("n = {n}, l = {l}: {e}")))?;
            let _ = writeln!(
                out,
                "{n},{l},{n_r},{},{},{}",
                sig15(coulomb_closed_form(&cp, &qn)),
                sig15(coulomb_spectrum(&cp, &qn)),
                sig15(e.energy)
            );
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum { common, nmax } => cmd_spectrum(common, *nmax),
        Command::Compare { common, nmax, grid } => cmd_compare(common, *nmax, *grid),
        Command::Statefn { common, level, samples } => cmd_statefn(common, *level, *samples),
        Command::Coulomb { common, nmax } => cmd_coulomb(common, *nmax),
    };
    match result {
        Ok(csv) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(csv.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("actionq: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
