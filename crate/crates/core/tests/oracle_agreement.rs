use actionq::coulomb::{quantum_radial_spec, semiclassical_radial_spec};
use actionq::{fd_eigenvalues, parse_potential, solve_level, spectrum, CoulombParams, FdGrid, PotentialSpec, UnitSystem};

fn u() -> UnitSystem {
    UnitSystem::default()
}

#[test]
fn quartic_semiclassical_error_shrinks_with_n() {
    let spec = PotentialSpec::quartic(1.0).unwrap();
    let fd = fd_eigenvalues(&spec, &u(), &FdGrid::new(-6.0, 6.0, 12001).unwrap(), 11).unwrap();
    let sc = spectrum(&spec, &u(), 10, 1e-10).unwrap();
    let rel: Vec<f64> = sc.iter().zip(&fd).map(|(s, f)| ((s.energy - f) / f).abs()).collect();
    // the quartic ground state is the classic 18% WKB miss
    assert!((0.17..0.19).contains(&rel[0]), "{}", rel[0]);
    assert!(rel[10] < 1e-3);
    assert!(rel.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn langer_constant_matches_quantum_radial_oracle() {
    let cp = CoulombParams::default();
    let grid = FdGrid::new(1e-4, 200.0, 40001).unwrap();
    for l in 0..=2u32 {
        let fd = fd_eigenvalues(&quantum_radial_spec(&cp, l), &u(), &grid, 2).unwrap();
        let sc = semiclassical_radial_spec(&cp, l);
        for (n_r, e_fd) in fd.iter().enumerate() {
            let e = solve_level(&sc, &u(), n_r as u32, 1e-10).unwrap().energy;
            let n = (n_r as u32 + l + 1) as f64;
            assert!((e + 0.5 / (n * n)).abs() < 1e-9);
            assert!((e - e_fd).abs() < 2e-3, "l = {l}, n_r = {n_r}: {e} vs {e_fd}");
        }
    }
}

#[test]
fn parsed_and_constructed_specs_agree() {
    let parsed = parse_potential("morse:d=25,a=0.5,q0=1", &u()).unwrap();
    let built = PotentialSpec::morse(25.0, 0.5, 1.0).unwrap();
    assert_eq!(parsed, built);
    let a = solve_level(&parsed, &u(), 3, 1e-10).unwrap();
    let b = solve_level(&built, &u(), 3, 1e-10).unwrap();
    assert_eq!(a.energy.to_bits(), b.energy.to_bits());
}

#[test]
fn scaled_units_rescale_harmonic_levels() {
    let units = UnitSystem::new(0.5, 2.0).unwrap();
    let spec = PotentialSpec::harmonic(3.0).unwrap();
    for n in 0..5u32 {
        let e = solve_level(&spec, &units, n, 1e-10).unwrap().energy;
        assert!((e - 0.5 * 3.0 * (n as f64 + 0.5)).abs() < 1e-9);
    }
    let fd = fd_eigenvalues(&spec, &units, &FdGrid::new(-4.0, 4.0, 4001).unwrap(), 3).unwrap();
    for (n, e) in fd.iter().enumerate() {
        assert!((e - 1.5 * (n as f64 + 0.5)).abs() < 1e-4);
    }
}
