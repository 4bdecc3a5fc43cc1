//! Acceptance suite. Prints one PASS/FAIL line per criterion; failures are
//! reported, not asserted.

mod common;

use std::time::Instant;

use common::{classical_ground_state, params, random_profiles, rel};
use hardy_nls::classify::{classify, ThresholdData, Verdict};
use hardy_nls::dynamics::*;
use hardy_nls::ground_state::{
    sharp_constant_general, sharp_constant_mass_critical, solve, uniqueness_probe, GroundState, ShootOptions,
};
use hardy_nls::pohozaev::{verify_identity, Variant, PASS_THRESHOLD};
use hardy_nls::variational::{oracle, OracleOptions};
use hardy_nls::ModelParams;
use num_complex::Complex64;

struct Tally {
    failed: Vec<String>,
}

impl Tally {
    fn line(&mut self, id: &str, name: &str, pass: bool, detail: String) {
        println!("{} [{id}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id.to_string());
        }
    }
}

fn mc3(c: f64) -> ModelParams {
    params(3, 10.0 / 3.0, c)
}

fn ground_state_residual(t: &mut Tally, id: &str, p: &ModelParams) -> GroundState {
    let start = Instant::now();
    let gs = solve(p, &ShootOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let res = gs.max_residual().unwrap();
    let width = gs.bracket.1 - gs.bracket.0;
    t.line(
        id,
        "ground-state residual",
        res < 1e-8 && width < 1e-10 && secs < 10.0,
        format!("{p}: residual {res:.3e}, bracket {width:.3e}, runtime {secs:.2} s"),
    );
    gs
}

fn uniqueness(t: &mut Tally, id: &str, p: &ModelParams) {
    let v0s = uniqueness_probe(p, &ShootOptions::default(), 16, 2024).unwrap();
    let min = v0s.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = v0s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    t.line(id, "uniqueness probe", max - min < 1e-9, format!("{p}: 16 brackets, v0 spread {:.3e}", max - min));
}

fn oracle_agreement(t: &mut Tally, id: &str, cases: &[ModelParams]) {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in cases {
        let gs = solve(p, &ShootOptions::default()).unwrap();
        let est = oracle(p, &OracleOptions::default()).unwrap();
        let e = rel(est.mass, gs.mass);
        ok &= e < 1e-4;
        parts.push(format!("{p} {e:.2e}"));
        if p.c == 0.0 {
            let (_, mass) = classical_ground_state(p.d, p.p);
            let e = rel(mass, gs.mass);
            ok &= e < 1e-4;
            parts.push(format!("classical {e:.2e}"));
        }
    }
    t.line(id, "oracle agreement", ok, parts.join("; "));
}

fn structural(t: &mut Tally, id: &str, gs: &GroundState) {
    let (f, m2, lp) = (gs.form_norm_sq, gs.mass * gs.mass, gs.lp_norm_p);
    let nehari = rel(f + m2, lp);
    let derrick = rel(f, gs.constants.theta * lp);
    let energy = gs.energy.abs();
    let c_gen = sharp_constant_general(gs.mass, &gs.params);
    let c_mc = sharp_constant_mass_critical(gs.mass, gs.params.d);
    let formulas = rel(c_gen, c_mc);
    t.line(
        id,
        "structural identities",
        nehari < 1e-6 && derrick < 1e-6 && energy < 1e-6 && formulas < 1e-12,
        format!(
            "Nehari {nehari:.2e}, Derrick {derrick:.2e}, |E(Q)| {energy:.2e}, C_HGN formulas {formulas:.2e} (C_HGN = {c_gen})"
        ),
    );
}

fn optimality(t: &mut Tally, id: &str, gs: &GroundState) {
    let k = gs.params.derive();
    let min = random_profiles(gs, 100, 99)
        .iter()
        .map(|prof| prof.hgn_quotient(&k, gs.params.p))
        .fold(f64::INFINITY, f64::min);
    let q = rel(gs.q_profile.hgn_quotient(&k, gs.params.p), gs.c_hgn);
    t.line(
        id,
        "HGN optimality",
        min >= gs.c_hgn - 1e-8 && q < 1e-6,
        format!("min quotient - C_HGN = {:.3e} over 100 profiles, quotient(Q) rel {q:.2e}", min - gs.c_hgn),
    );
}

fn pohozaev(t: &mut Tally, id: &str, gs: &GroundState) {
    let rep = verify_identity(gs, Variant::ConsistentExponent).unwrap();
    let printed = verify_identity(gs, Variant::AsPrinted).unwrap();
    let positive = rep.j_positive();
    let increase = rep.first_increase(0.0);
    let slope = rep.inner_log_slope();
    let (_, last, max) = rep.endpoint_values();
    let inner = slope > 0.0;
    let outer = last.abs() < PASS_THRESHOLD * max;
    let pass = rep.max_relative_residual < PASS_THRESHOLD && positive && increase.is_none() && inner && outer;
    t.line(
        id,
        "Pohozaev identity",
        pass,
        format!(
            "consistent residual {:.3e}, J>0 {positive}, first increase {}, inner log slope {slope:.3}, J(r_max)/max J {:.2e}; printed residual {:.3e}",
            rep.max_relative_residual,
            increase.map_or("none".to_string(), |r| format!("r={r:.3e}")),
            last / max,
            printed.max_relative_residual,
        ),
    );
}

fn main() {
    let mut t = Tally { failed: Vec::new() };
    let crit = mc3(0.25);

    let gs = ground_state_residual(&mut t, "1", &crit);
    uniqueness(&mut t, "2", &crit);
    oracle_agreement(&mut t, "3", &[crit, params(3, 4.0, 0.25), params(3, 4.0, 0.0), params(4, 3.0, 1.0)]);
    structural(&mut t, "4", &gs);
    optimality(&mut t, "5", &gs);
    pohozaev(&mut t, "6", &gs);

    // exact blow-up solution
    let ebp = ExactBlowupParams::new(1.0, 1.0, 0.0).unwrap();
    let grid = RadialGrid::new(&crit, GridSpec { dr_min: 1e-3, ..Default::default() }).unwrap();
    let start = Instant::now();
    let v0 = exact_blowup_v(&gs, &ebp, 0.0, &grid.r).unwrap();
    let prop = Propagator::new(&crit, grid.clone(), StepOptions::default());
    let exact_run =
        prop.evolve(v0, &EvolveOptions { dt: 1e-4, t_end: 0.5, log_interval: 0.01, ..Default::default() }).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let want = exact_blowup_v(&gs, &ebp, exact_run.t, &grid.r).unwrap();
    let err = grid.relative_l2(&exact_run.v, &want);
    let m0 = exact_run.log[0].mass;
    let mass_drift = exact_run.log.iter().map(|r| rel(r.mass, m0)).fold(0.0, f64::max);
    let e0 = exact_blowup(&crit, &ebp, 0.0, &gs).unwrap().energy(&gs.constants, crit.p);
    let gamma_err = exact_run
        .log
        .iter()
        .map(|r| rel(r.gamma, 8.0 * e0 * (1.0 - r.t).powi(2)))
        .fold(0.0, f64::max);
    t.line(
        "7",
        "exact blow-up reproduction",
        err < 1e-3 && mass_drift < 1e-8 && gamma_err < 1e-2 && secs < 300.0,
        format!(
            "t={}: L2 error {err:.3e}, mass drift {mass_drift:.2e}, Gamma vs 8E(T-t)^2 {gamma_err:.2e}, runtime {secs:.1} s",
            exact_run.t
        ),
    );

    // standing wave
    let grid = RadialGrid::new(&crit, GridSpec { dr_min: 2.5e-4, ..Default::default() }).unwrap();
    let v0: Vec<Complex64> = grid.r.iter().map(|&r| Complex64::new(gs.eval_v(r).unwrap(), 0.0)).collect();
    let prop = Propagator::new(&crit, grid.clone(), StepOptions::default());
    let snapshot_times: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
    let opts = EvolveOptions { dt: 5e-4, t_end: 1.0, log_interval: 0.01, snapshot_times, ..Default::default() };
    let wave = prop.evolve(v0.clone(), &opts).unwrap();
    let scale = v0.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let drift = wave
        .snapshots
        .iter()
        .chain(std::iter::once(&(wave.t, wave.v.clone())))
        .flat_map(|(_, v)| v.iter().zip(&v0).map(|(a, b)| (a.norm() - b.norm()).abs()).collect::<Vec<_>>())
        .fold(0.0f64, f64::max)
        / scale;

    let vw = virial_check(&wave.log, &crit, VirialVariant::Derived).unwrap().max_residual;
    let ve = virial_check(&exact_run.log, &crit, VirialVariant::Derived).unwrap().max_residual;
    t.line("8", "virial identity", vw < 1e-2 && ve < 1e-2, format!("standing wave {vw:.3e}, exact blow-up {ve:.3e}"));
    {
        let p4 = params(3, 4.0, 0.25);
        let gs4 = solve(&p4, &ShootOptions::default()).unwrap();
        let grid = RadialGrid::new(&p4, GridSpec { dr_min: 2e-3, r_max: 30.0, stretch: 2.0 }).unwrap();
        let v0: Vec<Complex64> = grid.r.iter().map(|&r| Complex64::new(gs4.eval_v(r).unwrap(), 0.0)).collect();
        let st = Propagator::new(&p4, grid, StepOptions::default())
            .evolve(v0, &EvolveOptions { dt: 1e-3, t_end: 0.1, log_interval: 0.01, ..Default::default() })
            .unwrap();
        let d = virial_check(&st.log, &p4, VirialVariant::Derived).unwrap().max_residual;
        let pr = virial_check(&st.log, &p4, VirialVariant::Printed).unwrap().max_residual;
        println!("INFO [8] p=4 standing wave: derived coefficient residual {d:.3e}, printed coefficient residual {pr:.3e}");
    }
    t.line("9", "standing wave", drift < 1e-6, format!("sup |v| drift / sup |v0| = {drift:.3e} over t in [0,1]"));

    // classifier
    let verdict = |a: f64| classify(&gs.q_scaled(a), &crit, &gs, true).unwrap().verdict;
    let s_zero = classify(&exact_blowup(&crit, &ebp, 0.0, &gs).unwrap(), &crit, &gs, true).unwrap().verdict;
    let p4 = params(3, 4.0, 0.25);
    let gs4 = solve(&p4, &ShootOptions::default()).unwrap();
    let th = ThresholdData::new(&gs4).unwrap();
    let s0_err = rel(th.s0, ThresholdData::s0_from_ground_state(&gs4, th.q));
    let f_err = rel(th.f(th.s0), gs4.energy * gs4.mass.powf(th.q));
    let (v09, v15) = (verdict(0.9), verdict(1.5));
    t.line(
        "10",
        "classifier",
        v09 == Verdict::Global && v15 == Verdict::BlowUp && s_zero == Verdict::Indeterminate && s0_err < 1e-6 && f_err < 1e-8,
        format!("0.9Q {v09}, 1.5Q {v15}, S(0) {s_zero}; p=4: s0 routes {s0_err:.2e}, f(s0) vs E(Q)|Q|^q {f_err:.2e}"),
    );

    // subcritical coupling
    let sub = mc3(0.125);
    let kappa = 0.5 - (0.25f64 - 0.125).sqrt();
    let before = t.failed.len();
    let gs_sub = ground_state_residual(&mut t, "11.1", &sub);
    uniqueness(&mut t, "11.2", &sub);
    oracle_agreement(&mut t, "11.3", &[sub]);
    structural(&mut t, "11.4", &gs_sub);
    optimality(&mut t, "11.5", &gs_sub);
    pohozaev(&mut t, "11.6", &gs_sub);
    let kappa_err = (gs_sub.constants.kappa - kappa).abs();
    t.line(
        "11",
        "subcritical extension",
        t.failed.len() == before && kappa_err < 1e-15,
        format!("c = c*/2, kappa {} (error {kappa_err:.1e}), failing parts: {:?}", gs_sub.constants.kappa, &t.failed[before..]),
    );

    println!("acceptance: {} criteria failing: {:?}", t.failed.len(), t.failed);
}
