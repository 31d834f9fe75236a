//! Acceptance suite: one pass/fail line per criterion.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use fockmarket_cli::{run, RunOptions, Scenario};
use fockmarket_core::dynamics::{
    price_supply_solution, time_grid, two_trader_closed_form, two_trader_period, OneBodyPropagator,
};
use fockmarket_core::fock::{
    evolve_exact, hop_operator, number_sum, real_expectation, FockSector, Hop, HopTerm, OccupationVector, StateVector,
    DEFAULT_MAX_DIM,
};
use fockmarket_core::hamiltonians::{build_model1, build_model2, conserved_model2, ModelOneConfig, ModelTwoConfig};
use fockmarket_core::kms::{equilibrium_residual, solve_equilibrium, KmsCase, KmsMode, KmsProblem, Outcome};
use fockmarket_core::meanfield::{
    nl_appendix2, nl_closed_form, nl_resonant, theta_system, Appendix2Params, MeanFieldParams,
};
use fockmarket_core::perturbation::{epsilon_pair, heisenberg_series};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn coupling(l: usize, value: f64, zero: &[(usize, usize)]) -> Vec<Vec<f64>> {
    let mut p = vec![vec![value; l]; l];
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(i, j) in zero {
        p[i][j] = 0.0;
        p[j][i] = 0.0;
    }
    p
}

fn model1(alpha: Vec<f64>, p: Vec<Vec<f64>>, n: Vec<u32>) -> ModelOneConfig {
    ModelOneConfig { alpha, p, initial_n: n, price_m: 1, epsilon: 1.0 }
}

/// `⟨n̂_j⟩` of every trader at every grid time, from exact sector evolution.
fn exact_shares(cfg: &ModelOneConfig, times: &[f64]) -> Result<Vec<Vec<f64>>, String> {
    let sector = cfg.sector(DEFAULT_MAX_DIM).map_err(err)?;
    let h = build_model1(cfg, &sector).map_err(err)?;
    let psi = cfg.initial_state(&sector).map_err(err)?;
    let states = evolve_exact(&h, &psi, times).map_err(err)?;
    let ops = (0..cfg.traders()).map(|j| cfg.shares(&sector, j)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    states.iter().map(|s| ops.iter().map(|op| real_expectation(s, op).map_err(err)).collect()).collect()
}

fn criterion_1() -> Check {
    let grid = [0.0, 0.5, 1.0, 2.0];
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for &alpha in &grid {
        for &p in &grid {
            let period = two_trader_period(alpha, p).unwrap_or(1.0);
            let times = time_grid(2.0 * period, 400);
            for n1 in 0..=10u32 {
                for n2 in 0..=(10 - n1) {
                    let cfg = model1(vec![0.0, alpha], coupling(2, p, &[]), vec![n1, n2]);
                    let exact = exact_shares(&cfg, &times)?;
                    for (t, row) in times.iter().zip(&exact) {
                        let (c1, c2) = two_trader_closed_form(alpha, p, n1 as f64, n2 as f64, *t);
                        worst = worst.max((c1 - row[0]).abs()).max((c2 - row[1]).abs());
                    }
                    cases += 1;
                }
            }
        }
    }
    ensure(worst < 1e-8, || format!("max deviation {worst:e} over {cases} cases"))?;
    Ok(format!("{cases} cases x 400 points, max deviation {worst:.2e}"))
}

fn criterion_2() -> Check {
    let fig1 = model1(vec![1.0, 2.0, 3.0], coupling(3, 1.0, &[]), vec![40, 0, 0]);
    let fig2 = model1(vec![1.0, 2.0, 3.0, 4.0, 5.0], coupling(5, 1.0, &[(0, 4), (1, 4)]), vec![40, 0, 0, 0, 0]);
    let mut details = Vec::new();
    for (cfg, times) in [(fig1, time_grid(10.0, 400)), (fig2, time_grid(2.0, 21))] {
        let exact = exact_shares(&cfg, &times)?;
        let prop = OneBodyPropagator::from_config(&cfg).map_err(err)?;
        let n0: Vec<f64> = cfg.initial_n.iter().map(|&n| n as f64).collect();
        let occ = prop.occupations(&n0, &times).map_err(err)?;
        let mut worst: f64 = 0.0;
        let mut sum_dev: f64 = 0.0;
        for (a, b) in exact.iter().zip(&occ) {
            for j in 0..cfg.traders() {
                worst = worst.max((a[j] - b[j]).abs());
            }
            sum_dev = sum_dev.max((b.iter().sum::<f64>() - 40.0).abs()).max((a.iter().sum::<f64>() - 40.0).abs());
        }
        let l = cfg.traders();
        ensure(worst < 1e-8, || format!("L={l}: propagator vs exact {worst:e}"))?;
        ensure(sum_dev < 1e-10, || format!("L={l}: total shares drift {sum_dev:e}"))?;
        details.push(format!("L={l} max diff {worst:.2e}, sum drift {sum_dev:.2e}"));
    }
    Ok(details.join("; "))
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn criterion_3() -> Check {
    let opts = RunOptions { method: None, order: None, max_dim: DEFAULT_MAX_DIM };
    let mut amplitudes = Vec::new();
    for a3 in [3, 10, 100] {
        let path = scenario_dir().join(format!("figure1-alpha{a3}.json"));
        let scn = Scenario::load(&path).map_err(err)?;
        let out = run(&scn, &opts).map_err(err)?;
        let n3 = out.table.column("n3").ok_or("n3 channel missing")?;
        let hi = n3.iter().copied().fold(f64::MIN, f64::max);
        let lo = n3.iter().copied().fold(f64::MAX, f64::min);
        amplitudes.push(hi - lo);
    }
    ensure(amplitudes[0] > amplitudes[1] && amplitudes[1] > amplitudes[2], || {
        format!("amplitudes not strictly decreasing: {amplitudes:?}")
    })?;

    let fig2 = model1(vec![1.0, 2.0, 3.0, 4.0, 5.0], coupling(5, 1.0, &[(0, 4), (1, 4)]), vec![40, 0, 0, 0, 0]);
    let prop = OneBodyPropagator::from_config(&fig2).map_err(err)?;
    let occ = prop.occupations(&[40.0, 0.0, 0.0, 0.0, 0.0], &time_grid(10.0, 400)).map_err(err)?;
    let n5_move = occ.iter().map(|row| row[4].abs()).fold(0.0, f64::max);
    ensure(n5_move > 0.0, || "n5 never moves".into())?;

    let isolated = model1(vec![1.0, 2.0, 3.0], coupling(3, 1.0, &[(0, 2), (1, 2)]), vec![20, 10, 5]);
    let exact = exact_shares(&isolated, &time_grid(10.0, 400))?;
    let drift = exact.iter().map(|row| (row[2] - 5.0).abs()).fold(0.0, f64::max);
    ensure(drift < 1e-10, || format!("isolated n3 drifted {drift:e}"))?;
    Ok(format!(
        "n3 amplitudes {:.4} > {:.4} > {:.6}; max |n5 - n5(0)| {n5_move:.3}; isolated n3 drift {drift:.1e}",
        amplitudes[0], amplitudes[1], amplitudes[2]
    ))
}

fn random_superposition(sector: &FockSector, rng: &mut StdRng) -> StateVector {
    let amps: Vec<Complex64> =
        (0..sector.dim()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|z| z / norm).collect())
}

fn criterion_4() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    let times = time_grid(5.0, 101);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for m in [1u32, 2] {
        for _ in 0..20 {
            let p12 = rng.gen_range(0.2..1.5);
            let cfg = ModelTwoConfig {
                alpha: vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                beta: vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                p: coupling(2, p12, &[]),
                price_m: m,
                initial_n: vec![rng.gen_range(0..4), rng.gen_range(0..4)],
                initial_k: vec![rng.gen_range(0..5), rng.gen_range(0..5)],
                initial_o: rng.gen_range(0..4),
                initial_mp: rng.gen_range(0..4),
                gamma_share: rng.gen_range(0.5..3.0),
            };
            let sector = cfg.sector(DEFAULT_MAX_DIM).map_err(err)?;
            let h = build_model2(&cfg, &sector).map_err(err)?;
            let psi = random_superposition(&sector, &mut rng);
            let states = evolve_exact(&h, &psi, &times).map_err(err)?;
            for c in conserved_model2(&cfg, &sector).map_err(err)? {
                let v0 = real_expectation(&states[0], &c.op).map_err(err)?;
                for s in &states {
                    let drift = (real_expectation(s, &c.op).map_err(err)? - v0).abs();
                    ensure(drift < 1e-9, || format!("{} drifted {drift:e} (M={m})", c.name))?;
                    worst = worst.max(drift);
                }
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} random states, N K Gamma Q1 Q2 max drift {worst:.2e}"))
}

fn criterion_5() -> Check {
    let mut worst_c1: f64 = 0.0;
    let mut worst_c2: f64 = 0.0;
    let mut worst_series: f64 = 0.0;
    let configs = [
        ([0u32, 1], [1u32, 0], 1u32, 0.7),
        ([1, 3], [2, 2], 1, 1.0),
        ([2, 1], [4, 2], 2, 0.5),
        ([3, 0], [1, 5], 1, 1.3),
        ([2, 2], [3, 3], 2, 0.9),
    ];
    for (n, k, m, p12) in configs {
        let cfg = ModelTwoConfig {
            alpha: vec![0.4, 1.3],
            beta: vec![-0.2, 0.9],
            p: coupling(2, p12, &[]),
            price_m: m,
            initial_n: n.to_vec(),
            initial_k: k.to_vec(),
            initial_o: 2,
            initial_mp: m,
            gamma_share: 2.0,
        };
        let sector = cfg.sector(DEFAULT_MAX_DIM).map_err(err)?;
        let h = build_model2(&cfg, &sector).map_err(err)?;
        let psi = cfg.initial_state(&sector).map_err(err)?;
        let n1 = cfg.shares(&sector, 0).map_err(err)?;
        let series = heisenberg_series(&h, &n1, &psi, 8).map_err(err)?;
        worst_c1 = worst_c1.max(series.coefficients[1].norm());
        let expected = p12 * p12 * epsilon_pair(n[0], n[1], k[0], k[1], m).imbalance();
        let c2 = series.coefficients[2].re;
        let rel = if expected == 0.0 { c2.abs() } else { (c2 - expected).abs() / expected.abs() };
        worst_c2 = worst_c2.max(rel);

        let t_max = 0.1 * series.radius_hint;
        let times = time_grid(t_max, 11);
        let states = evolve_exact(&h, &psi, &times).map_err(err)?;
        for (t, s) in times.iter().zip(&states) {
            let exact = real_expectation(s, &n1).map_err(err)?;
            worst_series = worst_series.max((series.evaluate(*t).re - exact).abs());
        }
    }
    ensure(worst_c1 < 1e-10, || format!("first coefficient {worst_c1:e}"))?;
    ensure(worst_c2 < 1e-8, || format!("second coefficient relative error {worst_c2:e}"))?;
    ensure(worst_series < 1e-6, || format!("order-8 series vs exact {worst_series:e}"))?;
    Ok(format!("|c1| {worst_c1:.1e}, c2 rel err {worst_c2:.1e}, order-8 vs exact {worst_series:.1e}"))
}

fn criterion_6() -> Check {
    let times = time_grid(2.0 * PI, 200);
    let mut worst: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for o in 0..=6u32 {
        for pr in 0..=6u32 {
            let sector =
                FockSector::enumerate(OccupationVector::new(vec![o, pr]), vec![Hop::transfer(0, 1)], DEFAULT_MAX_DIM)
                    .map_err(err)?;
            let h = number_sum(&sector, &[(0, 1.0), (1, 1.0)])
                .and_then(|d| d.add(&hop_operator(&sector, HopTerm::plain(0, 1))?))
                .and_then(|d| d.add(&hop_operator(&sector, HopTerm::plain(1, 0))?))
                .map_err(err)?;
            let psi = StateVector::basis(&sector, &OccupationVector::new(vec![o, pr])).map_err(err)?;
            let states = evolve_exact(&h, &psi, &times).map_err(err)?;
            let supply = number_sum(&sector, &[(0, 1.0)]).map_err(err)?;
            let price = number_sum(&sector, &[(1, 1.0)]).map_err(err)?;
            for (t, s) in times.iter().zip(&states) {
                let (p_r, o_f) = price_supply_solution(o as f64, pr as f64, *t);
                worst = worst.max((p_r - real_expectation(s, &price).map_err(err)?).abs());
                worst = worst.max((o_f - real_expectation(s, &supply).map_err(err)?).abs());
                worst_sum = worst_sum.max((p_r + o_f - (o + pr) as f64).abs());
                if o == pr {
                    ensure(p_r == pr as f64 && o_f == o as f64, || format!("O=P={o} not flat at t={t}"))?;
                }
            }
        }
    }
    ensure(worst < 1e-9, || format!("closed form vs exact {worst:e}"))?;
    // O_f + P_r is (P + O) up to the last bit of the two half-sums
    ensure(worst_sum <= 4.0 * f64::EPSILON * 12.0, || format!("O_f + P_r varies by {worst_sum:e}"))?;
    Ok(format!("49 sectors, closed form vs exact {worst:.1e}, sum deviation {worst_sum:.1e}, O=P flat"))
}

fn random_meanfield(rng: &mut StdRng) -> MeanFieldParams {
    loop {
        let n: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..5.0)).collect();
        let k: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..5.0)).collect();
        let x0 = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let p = MeanFieldParams::new(rng.gen_range(-3.0..3.0), x0, n, k).expect("valid holdings");
        if p.detuning().abs() > 1e-2 {
            return p;
        }
    }
}

fn criterion_7() -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    let times = time_grid(5.0, 50);
    let mut worst: f64 = 0.0;
    let mut worst_d1: f64 = 0.0;
    let mut worst_d2: f64 = 0.0;
    let h = 1e-4;
    for _ in 0..100 {
        let p = random_meanfield(&mut rng);
        for l in 0..p.traders() {
            let theta = theta_system(&p, l, &times).map_err(err)?;
            for (t, th) in times.iter().zip(&theta) {
                worst = worst.max((nl_closed_form(&p, l, *t).map_err(err)? - th).abs());
            }
            let f = |t: f64| nl_closed_form(&p, l, t).map_err(err);
            let (fp, f0, fm) = (f(h)?, f(0.0)?, f(-h)?);
            let d1 = (fp - fm) / (2.0 * h);
            let d2 = (fp - 2.0 * f0 + fm) / (h * h);
            let expected = 8.0 * p.x0.norm_sqr() * (p.k[l] - p.n[l]);
            worst_d1 = worst_d1.max(d1.abs() / f0.abs().max(1.0));
            worst_d2 = worst_d2.max((d2 - expected).abs() / expected.abs().max(1.0));
        }
    }
    ensure(worst < 1e-8, || format!("closed form vs theta system {worst:e}"))?;
    ensure(worst_d1 < 1e-5, || format!("first derivative at 0: {worst_d1:e}"))?;
    ensure(worst_d2 < 1e-5, || format!("second derivative at 0: {worst_d2:e}"))?;

    // X0 = 0 freezes every trader
    let still = MeanFieldParams::new(1.5, Complex64::new(0.0, 0.0), vec![1.0, 4.0], vec![3.0, 0.5]).map_err(err)?;
    for l in 0..2 {
        for t in &times {
            ensure(nl_closed_form(&still, l, *t).map_err(err)? == still.n[l], || "X0 = 0 not constant".into())?;
        }
    }

    // resonance: t = 0 value, derivatives, and the limit of the closed form
    // η = Q/2 puts every Φ on resonance
    let mut res = MeanFieldParams::new(0.7, Complex64::new(0.3, -0.4), vec![1.0, 3.0], vec![2.0, 2.0]).map_err(err)?;
    res.x_l0 = Some(vec![Complex64::new(0.0, 0.0); 2]);
    ensure(res.is_resonant(), || format!("resonant setup has detuning {}", res.detuning()))?;
    let mut near = res.clone();
    near.qbar += 5e-8;
    let mut worst_res: f64 = 0.0;
    for l in 0..2 {
        ensure((nl_resonant(&res, l, 0.0).map_err(err)? - res.n[l]).abs() < 1e-14, || "resonant n(0)".into())?;
        let f = |t: f64| nl_resonant(&res, l, t).map_err(err);
        let d2 = (f(h)? - 2.0 * f(0.0)? + f(-h)?) / (h * h);
        let expected = 8.0 * res.x0.norm_sqr() * (res.k[l] - res.n[l]);
        ensure((d2 - expected).abs() < 1e-5 * expected.abs().max(1.0), || format!("resonant n'' {d2} vs {expected}"))?;
        for t in &times {
            worst_res = worst_res
                .max((nl_closed_form(&near, l, *t).map_err(err)? - nl_resonant(&res, l, *t).map_err(err)?).abs());
        }
    }
    ensure(worst_res < 1e-8, || format!("near-resonant closed form vs resonant branch {worst_res:e}"))?;

    // heterogeneous traders: t = 0 and the |γ_l| → ∞ limit
    let base = Appendix2Params {
        gamma_l: vec![0.5, -1.0, 2.0],
        phi_tilde: 1.0,
        mu: -0.5,
        x0: Complex64::new(0.6, 0.2),
        n: vec![1.0, 2.0, 4.0],
        k: vec![3.0, 1.0, 0.5],
    };
    let mut worst_app: f64 = 0.0;
    for l in 0..3 {
        ensure((nl_appendix2(&base, l, 0.0).map_err(err)? - base.n[l]).abs() < 1e-12, || "appendix n(0)".into())?;
        let mut far = base.clone();
        far.gamma_l[l] = 1e8;
        for t in &times {
            worst_app = worst_app.max((nl_appendix2(&far, l, *t).map_err(err)? - far.n[l]).abs());
        }
    }
    ensure(worst_app < 1e-10, || format!("large gamma_l still moves by {worst_app:e}"))?;
    Ok(format!(
        "sweep max diff {worst:.1e}; n'(0) {worst_d1:.1e}, n''(0) rel {worst_d2:.1e}; resonant limit {worst_res:.1e}; large-gamma drift {worst_app:.1e}"
    ))
}

fn criterion_8() -> Check {
    let expected = [
        (
            1.0,
            [
                (KmsCase::Ia, Outcome::UniquePair),
                (KmsCase::Ib, Outcome::BetaZeroOnly),
                (KmsCase::Ic, Outcome::NoSolution),
            ],
        ),
        (
            0.0,
            [
                (KmsCase::IiWithout, Outcome::NoSolution),
                (KmsCase::IiWith, Outcome::AnyBeta),
                (KmsCase::IiWithout, Outcome::NoSolution),
            ],
        ),
        (
            -1.0,
            [
                (KmsCase::IIIa, Outcome::NoSolution),
                (KmsCase::IIIb, Outcome::BetaZeroOnly),
                (KmsCase::IIIc, Outcome::UniquePair),
            ],
        ),
    ];
    let q = 4.0;
    for (phi, row) in expected {
        for (nc, (case, outcome)) in [1.0, 2.0, 3.0].into_iter().zip(row) {
            let sol = solve_equilibrium(&KmsProblem { phi, q_l: q, mode: KmsMode::SolveBetaGivenNc { n_c: nc } })
                .map_err(err)?;
            ensure(sol.case == case && case.outcome() == outcome, || {
                format!("phi={phi}, n_c={nc}: got {} ({:?})", sol.case, sol.case.outcome())
            })?;
            let consistent = match outcome {
                Outcome::UniquePair => {
                    sol.beta0.is_some_and(|b| b > 0.0) && equilibrium_residual(phi, &sol).is_some_and(|r| r < 1e-10)
                }
                Outcome::BetaZeroOnly => sol.beta0 == Some(0.0),
                Outcome::AnyBeta => sol.beta0.is_none() && sol.nc0 == Some(nc),
                Outcome::NoSolution => sol.beta0.is_none() && sol.nc0.is_none(),
            };
            ensure(consistent, || format!("cell {case} returned {sol:?}"))?;
        }
    }

    let mut worst: f64 = 0.0;
    let mut solved = 0;
    for phi in [-2.0, -0.5, 0.5, 2.0] {
        for q in [1.0, 10.0, 100.0] {
            for i in 0..=20 {
                let beta = 0.25 * i as f64;
                let sol =
                    solve_equilibrium(&KmsProblem { phi, q_l: q, mode: KmsMode::SolvePair { beta } }).map_err(err)?;
                if let Some(r) = equilibrium_residual(phi, &sol) {
                    ensure(r < 1e-10, || format!("residual {r:e} at phi={phi}, Q={q}, beta={beta}"))?;
                    let total = sol.nc0.unwrap() + sol.na0.unwrap();
                    ensure((total - q).abs() <= 1e-12 * q, || format!("n_a + n_c = {total} != {q}"))?;
                    worst = worst.max(r);
                    solved += 1;
                }
            }
        }
    }

    let q = 10.0;
    let mut previous = f64::INFINITY;
    for i in 0..50 {
        let x = -5.0 + 10.0 * i as f64 / 49.0;
        let (phi, beta) = if x < 0.0 { (-1.0, -x) } else { (1.0, x) };
        let sol = solve_equilibrium(&KmsProblem { phi, q_l: q, mode: KmsMode::SolvePair { beta } }).map_err(err)?;
        let nc = sol.nc0.ok_or_else(|| format!("no pair at beta*phi = {x}"))?;
        ensure(nc < previous, || format!("n_c not decreasing at beta*phi = {x}"))?;
        previous = nc;
    }
    Ok(format!("9 cells match; {solved} pairs, max residual {worst:.1e}; n_c strictly decreasing over 50 points"))
}

fn criterion_9() -> Check {
    let bin = env!("CARGO_BIN_EXE_fockmarket");
    let tmp = std::env::temp_dir().join(format!("fockmarket-acceptance-{}", std::process::id()));
    let scenario = scenario_dir().join("figure1-alpha3.json");
    let mut outputs = Vec::new();
    for run_id in 0..2 {
        let out = tmp.join(format!("run{run_id}"));
        let status = Command::new(bin).arg("run").arg(&scenario).arg("--out").arg(&out).output().map_err(err)?.status;
        ensure(status.code() == Some(0), || format!("run exited with {status}"))?;
        outputs.push(std::fs::read(out.join("figure1-alpha3.csv")).map_err(err)?);
    }
    ensure(outputs[0] == outputs[1], || "CSV differs between runs".into())?;

    let broken = tmp.join("broken.json");
    let text = std::fs::read_to_string(&scenario).map_err(err)?;
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(err)?;
    value["name"] = "broken".into();
    value["test_hooks"] = serde_json::json!({ "break_conservation": 0.3 });
    std::fs::write(&broken, value.to_string()).map_err(err)?;
    let status = Command::new(bin).arg("verify").arg(&broken).output().map_err(err)?;
    ensure(status.status.code() == Some(3), || format!("negative control exited with {:?}", status.status.code()))?;
    let _ = std::fs::remove_dir_all(&tmp);
    Ok(format!("{} byte CSV identical across runs; negative control exit 3", outputs[0].len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("two-trader closed form vs exact diagonalization", criterion_1),
        ("one-body propagator vs exact evolution (L = 3, 5)", criterion_2),
        ("figure behaviour: alpha_3 inertia, indirect coupling, isolated trader", criterion_3),
        ("model II conservation on random states", criterion_4),
        ("Heisenberg series coefficients and order-8 accuracy", criterion_5),
        ("price/supply closed form vs exact exchange dynamics", criterion_6),
        ("mean-field closed forms, derivatives and limits", criterion_7),
        ("KMS case table, residuals and monotonicity", criterion_8),
        ("CLI determinism and conservation negative control", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
