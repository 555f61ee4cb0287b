use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::json;
use trivortex::full::{IntegratorOptions, Termination};
use trivortex::output::{write_grid_csv, write_reduced_csv, write_trajectory_csv};
use trivortex::portrait::pauli_to_chart;
use trivortex::transforms::{check_symplectic, full_chain, MapId};
use trivortex::verification::verification_report;
use trivortex::{
    compare_flows, extract_contours, find_relative_equilibria, integrate_full,
    integrate_reduced_with, make_pauli, reduced_hamiltonian, render_svg, sample_portrait,
    shape_map, Basis, ChartKind, Config, Coords, ReducedOptions, State, Strengths,
};

use crate::settings::{fixed, pick, required, Settings};
use crate::{
    ChartArg, CliError, Common, CompareArgs, EquilibriaArgs, PortraitArgs, ReducedArgs,
    SimulateArgs, Tolerances, TransformsArgs, VerifyArgs,
};

fn strengths(c: &Common, f: &Settings) -> Result<Strengths, CliError> {
    let g = fixed::<3>(required(pick(c.gammas.clone(), &f.gammas), "gammas")?, "gammas")?;
    Ok(Strengths::from_array(g)?)
}

fn family(c: &Common, f: &Settings) -> Result<Option<[f64; 3]>, CliError> {
    pick(c.x.clone(), &f.x).map(|x| fixed::<3>(x, "x")).transpose()
}

fn basis(c: &Common, f: &Settings, s: &Strengths) -> Result<Basis, CliError> {
    Ok(make_pauli(s, family(c, f)?)?)
}

fn positions(z: &Option<Vec<f64>>, f: &Settings) -> Result<Config, CliError> {
    let xy = fixed::<6>(required(pick(z.clone(), &f.z), "z")?, "z")?;
    Ok(Config::from_xy(xy)?)
}

fn t_end(t: Option<f64>, f: &Settings) -> Result<f64, CliError> {
    let t = required(pick(t, &f.t_end), "t-end")?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(CliError::Usage("--t-end must be a non-negative number".into()));
    }
    Ok(t)
}

fn integrator(t: &Tolerances, f: &Settings) -> Result<IntegratorOptions<f64>, CliError> {
    let mut o = IntegratorOptions::default();
    if let Some(r) = pick(t.rtol, &f.rtol) {
        o.rel_tol = r;
    }
    if let Some(a) = pick(t.atol, &f.atol) {
        o.abs_tol = a;
    }
    if let Some(dt) = pick(t.dt, &f.dt) {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(CliError::Usage("--dt must be positive".into()));
        }
        o.sample_interval = Some(dt);
    }
    Ok(o)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_out(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let mut w = create(path)?;
    body(&mut w).and_then(|_| w.flush()).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn print(v: &serde_json::Value) {
    let text = serde_json::to_string_pretty(v).expect("json values always serialize");
    // a closed pipe downstream is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn finish(t: Termination) -> Result<(), CliError> {
    match t {
        Termination::StepFailure => Err(CliError::Numerical("step-size control gave up".into())),
        _ => Ok(()),
    }
}

pub fn simulate(a: SimulateArgs, f: &Settings) -> Result<(), CliError> {
    let s = strengths(&a.common, f)?;
    let cfg = positions(&a.z, f)?;
    let t = t_end(a.t_end, f)?;
    let opts = integrator(&a.tol, f)?;
    let out = required(pick(a.out, &f.out), "out")?;
    let tr = integrate_full(&cfg, &s, t, &opts)?;
    write_out(&out, |w| write_trajectory_csv(w, &tr))?;
    print(&json!({
        "termination": tr.termination,
        "t_final": tr.times.last(),
        "samples": tr.times.len(),
        "energy_drift": tr.drift.h_scaled,
        "theta0_drift": tr.drift.theta0,
        "z0_drift": tr.drift.z0,
    }));
    finish(tr.termination)
}

pub fn simulate_reduced(a: ReducedArgs, f: &Settings) -> Result<(), CliError> {
    let s = strengths(&a.common, f)?;
    let pb = basis(&a.common, f, &s)?;
    let coords = fixed::<4>(required(pick(a.a.clone(), &f.a), "a")?, "a")?;
    let st = State::new(Coords::new(coords))?;
    let t = t_end(a.t_end, f)?;
    let renormalize = !a.no_renormalize && f.renormalize.unwrap_or(true);
    let opts = ReducedOptions {
        integrator: integrator(&a.tol, f)?,
        renormalize,
        reverse: false,
    };
    let out = required(pick(a.out, &f.out), "out")?;
    let tr = integrate_reduced_with(&st, &pb, t, &opts)?;
    write_out(&out, |w| write_reduced_csv(w, &tr))?;
    print(&json!({
        "termination": tr.termination,
        "t_final": tr.times.last(),
        "samples": tr.times.len(),
        "energy_drift": tr.energy_drift,
        "casimir_drift": tr.max_raw_drift,
    }));
    finish(tr.termination)
}

pub fn compare(a: CompareArgs, f: &Settings) -> Result<(), CliError> {
    let s = strengths(&a.common, f)?;
    let pb = basis(&a.common, f, &s)?;
    let cfg = positions(&a.z, f)?;
    let t = t_end(a.t_end, f)?;
    let opts = integrator(&a.tol, f)?;
    let full = integrate_full(&cfg, &s, t, &opts)?;
    let st = State::new(pb.to_pauli_coords(&shape_map(&cfg)))?;
    let red = integrate_reduced_with(
        &st,
        &pb,
        t,
        &ReducedOptions {
            integrator: opts,
            ..ReducedOptions::default()
        },
    )?;
    let dev = compare_flows(&full, &pb, &red)?;
    print(&json!({
        "sup_deviation": dev,
        "casimir_drift": red.max_raw_drift,
        "energy_drift": red.energy_drift,
        "full_energy_drift": full.drift.h_scaled,
        "full_termination": full.termination,
        "reduced_termination": red.termination,
    }));
    finish(full.termination).and(finish(red.termination))
}

pub fn portrait(a: PortraitArgs, f: &Settings) -> Result<(), CliError> {
    let s = strengths(&a.common, f)?;
    let pb = basis(&a.common, f, &s)?;
    let mu = required(pick(a.mu, &f.mu), "mu")?;
    let chart = match pick(a.chart, &f.chart).unwrap_or(ChartArg::Phi) {
        ChartArg::Phi => ChartKind::Phi,
        ChartArg::Alpha => ChartKind::Alpha,
    };
    let nu = pick(a.nu, &f.nu).unwrap_or(200);
    let nv = pick(a.nv, &f.nv).unwrap_or(400);
    let out = required(pick(a.out, &f.out), "out")?;
    let grid = sample_portrait(mu, &pb, chart, nu, nv)?;

    let svg = out.extension().is_some_and(|e| e.eq_ignore_ascii_case("svg"));
    if !svg {
        write_out(&out, |w| write_grid_csv(w, &grid))?;
        print(&json!({ "range": grid.finite_range(), "collision_points": grid.collision_points }));
        return Ok(());
    }
    let levels = match pick(a.levels, &f.levels) {
        Some(l) => l,
        None => {
            let n = pick(a.n_levels, &f.n_levels).unwrap_or(15);
            let (lo, hi) = grid
                .finite_range()
                .ok_or_else(|| CliError::Numerical("no finite samples on the grid".into()))?;
            (1..=n).map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64).collect()
        }
    };
    let contours = extract_contours(&grid, &levels);
    write_out(&out, |w| w.write_all(render_svg(&grid, &contours).as_bytes()))?;
    print(&json!({
        "range": grid.finite_range(),
        "levels": levels,
        "polylines": contours.iter().map(|c| c.polylines.len()).sum::<usize>(),
        "collision_points": grid.collision_points,
    }));
    Ok(())
}

pub fn verify(a: VerifyArgs, f: &Settings) -> Result<(), CliError> {
    let s = strengths(&a.common, f)?;
    let x = family(&a.common, f)?;
    let samples = pick(a.samples, &f.samples).unwrap_or(100);
    let seed = pick(a.seed, &f.seed).unwrap_or(0);
    let report = verification_report(&s, x, samples, seed)?;
    print(&serde_json::to_value(report).expect("report serializes"));
    Ok(())
}

pub fn transforms(a: TransformsArgs, f: &Settings) -> Result<(), CliError> {
    let s = strengths(&a.common, f)?;
    let cfg = positions(&a.z, f)?;
    let chain = full_chain(&cfg, &s)?;
    let direct = make_pauli(&s, None)?.to_pauli_coords(&shape_map(&cfg));
    let xy = cfg.to_xy();
    let j = chain.jbh;
    let jac = [j.z0.re, j.z0.im, j.r.re, j.r.im, j.s.re, j.s.im];
    let aa = chain.action_angle;
    let flat = [aa.kx, aa.ky, aa.j1, aa.j2, aa.theta1, aa.theta2];
    print(&json!({
        "jbh": chain.jbh,
        "action_angle": chain.action_angle,
        "mixed": chain.mixed,
        "pauli": chain.pauli,
        "pauli_direct": direct,
        "symplectic_residual": {
            "t1": check_symplectic(MapId::T1, &xy, &s)?,
            "t2": check_symplectic(MapId::T2, &jac, &s)?,
            "t3": check_symplectic(MapId::T3, &flat, &s)?,
            "composite": check_symplectic(MapId::Composite, &xy, &s)?,
        },
    }));
    Ok(())
}

pub fn equilibria(a: EquilibriaArgs, f: &Settings) -> Result<(), CliError> {
    let s = strengths(&a.common, f)?;
    let pb = basis(&a.common, f, &s)?;
    let mu = required(pick(a.mu, &f.mu), "mu")?;
    let grid = pick(a.grid, &f.grid).unwrap_or(64);
    let found = find_relative_equilibria(mu, &pb, grid)?;
    let list = found
        .iter()
        .map(|st| {
            Ok(json!({
                "a": st.a.a,
                "h": reduced_hamiltonian(&st.a, &pb)?,
                "phi_chart": pauli_to_chart(&st.a, ChartKind::Phi),
            }))
        })
        .collect::<Result<Vec<_>, trivortex::Error>>()?;
    print(&serde_json::Value::Array(list));
    Ok(())
}
