use scrap_fwm::multilevel::{
    compare_reduced_vs_full, evolve_full, population_rate, DetuningSet, FieldPulses, OracleConfig,
};
use scrap_fwm::{PulseSpec, TimeGrid};

const PI_HALF_R: f64 = 0.886_226_925_452_758;

#[test]
fn pi_half_pump_agrees_with_reduced_model() {
    let r = compare_reduced_vs_full(&OracleConfig::pump_only(PI_HALF_R, 100.0, 1.0)).unwrap();
    assert!(r.max_pop_err < 0.02, "{r:?}");
    assert!(r.max_coh_err < 0.02, "{r:?}");
}

#[test]
fn mismatch_shrinks_as_detunings_grow() {
    let errs: Vec<f64> = [100.0, 200.0, 400.0]
        .iter()
        .map(|&om| {
            let mut cfg = OracleConfig::pump_only(PI_HALF_R, om, 1.0);
            cfg.grid = TimeGrid::new(-5.0, 5.0, 401).unwrap();
            compare_reduced_vs_full(&cfg).unwrap().max_pop_err
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn marginal_detuning_is_worse() {
    let run = |om: f64| {
        let mut cfg = OracleConfig::pump_only(PI_HALF_R, om, 1.0);
        cfg.grid = TimeGrid::new(-5.0, 5.0, 401).unwrap();
        compare_reduced_vs_full(&cfg).unwrap().max_pop_err
    };
    assert!(run(10.0) > run(100.0));
}

#[test]
fn stark_shift_emerges_from_far_level() {
    // pump on resonance plus a strong Stark pulse: the reduced model sees
    // s = |g_St|²/Ω_nf and must track the full evolution
    let mut cfg = OracleConfig::pump_only(1.5, 200.0, 1.0);
    cfg.fields.stark = PulseSpec::gaussian((3.0f64 * 200.0).sqrt(), 1.6, 1.0);
    cfg.grid = TimeGrid::new(-5.0, 6.0, 441).unwrap();
    let r = compare_reduced_vs_full(&cfg).unwrap();
    assert!(r.max_pop_err < 0.02, "{r:?}");
    // and the shift must matter: without it the pump alone nearly inverts
    let full =
        |c: &OracleConfig| evolve_full(&c.fields, &c.detunings, c.a, &c.grid, c.tol).unwrap().last().unwrap().rho_n;
    let mut bare = cfg;
    bare.fields.stark = PulseSpec::off();
    assert!(full(&bare) - full(&cfg) > 0.5);
}

#[test]
fn perturbative_coherence_scales_linearly() {
    let det = DetuningSet::new(0.0, -100.0, -100.0, 100.0);
    let grid = TimeGrid::new(-4.0, 4.0, 801).unwrap();
    let peak = |g: f64| {
        let f = FieldPulses::pump_only(PulseSpec::gaussian(g, 1.0, 0.0));
        let s = evolve_full(&f, &det, 1.0, &grid, 1e-9).unwrap();
        s.iter().map(|x| x.rho_gm.norm()).fold(0.0, f64::max)
    };
    let (p1, p2) = (peak(0.5), peak(1.0));
    assert!((p2 / p1 - 2.0).abs() < 0.01, "{p1} {p2}");
    assert!((p1 - 0.5 / 100.0).abs() < 5e-4, "{p1}");
}

#[test]
fn population_matches_quadrature_of_its_rate() {
    let cfg = OracleConfig::pump_only(PI_HALF_R, 100.0, 1.0);
    let det = cfg.detunings;
    let n = 40_001;
    let grid = TimeGrid::new(-4.0, 4.0, n).unwrap();
    let states = evolve_full(&cfg.fields, &det, cfg.a, &grid, 1e-10).unwrap();
    let rates: Vec<f64> = states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let t = grid.time(k);
            population_rate(s, &cfg.fields.at(t), &det, cfg.a, t)
        })
        .collect();
    let h = grid.dt();
    // composite Simpson over pairs of intervals
    let mut acc = 0.0;
    let mut worst = 0.0f64;
    for k in (2..n).step_by(2) {
        acc += h / 3.0 * (rates[k - 2] + 4.0 * rates[k - 1] + rates[k]);
        worst = worst.max((acc - (states[k].rho_n - states[0].rho_n)).abs());
    }
    assert!(worst < 1e-6, "{worst}");
    let last = states.last().unwrap();
    assert!((last.rho_n + last.rho_g() - 1.0).abs() < 1e-15);
    assert!(states.iter().all(|s| (0.0..=1.0).contains(&s.rho_n)));
    assert!(states.iter().all(|s| s.rho_gn.norm() <= 1.0 && s.rho_gm.norm() <= 1.0));
}
