//! Subcommand runners. Each writes CSVs atomically into the output
//! directory, optionally renders SVG charts, and returns the list of
//! files produced (the manifest is written by `main` so that partial
//! results from a failed run still get recorded).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use scq_core::fock::{DensityMatrix, FockSpace, Ket};
use scq_core::lindblad::{EvolutionConfig, NoiseParams};
use scq_core::ratelab::{study, Measure, Scenario, StudyGrid, StudyOptions, StudyRow};
use scq_core::stateprep::{target_state, unconditional_convergence, DarkOpParams};
use scq_core::states::{beta, CodeParams};
use scq_core::zgate::{pz_model, simulate_gate, GateOptions};

use crate::config::{CircuitConfig, PrepConfig, RatesConfig, ZgateConfig};
use crate::output::{fnum, r_db, rates_csv, write_atomic};
use crate::svg::{render, Chart, Scale, Series};
use crate::CliError;

fn runtime(e: scq_core::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn run_rates(cfg: &RatesConfig, out: &Path, plot: bool) -> Result<Vec<String>, CliError> {
    cfg.validate()?;
    let scenario = match cfg.scenario.as_str() {
        "loss" => Scenario::Loss,
        "dephasing" => Scenario::Dephasing { kappa_minus: cfg.kappa_minus.unwrap() },
        "gain" => Scenario::Gain { kappa1: cfg.kappa1.unwrap() },
        "kerr" => Scenario::Kerr { kappa_minus: cfg.kappa_minus.unwrap() },
        _ => unreachable!("validated"),
    };
    let grid = StudyGrid { alpha_sq: cfg.alpha_sq.clone(), r: cfg.r.clone(), knob: cfg.knob.clone() };
    let opts = StudyOptions {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        sample_count: cfg.sample_count,
        t_max: cfg.t_max,
        measure: match cfg.measure.as_str() {
            "bit" => Measure::BitOnly,
            "phase" => Measure::PhaseOnly,
            _ => Measure::Both,
        },
        ..Default::default()
    };
    let rows = study(scenario, &grid, &opts).map_err(runtime)?;

    let mut outputs = Vec::new();
    write_atomic(&out.join("rates.csv"), &rates_csv(&rows))?;
    outputs.push("rates.csv".into());
    if plot {
        outputs.extend(plot_rates(&rows, out)?);
    }
    Ok(outputs)
}

fn plot_rates(rows: &[StudyRow], out: &Path) -> Result<Vec<String>, CliError> {
    let mut outputs = Vec::new();
    let alpha_count = {
        let mut a: Vec<f64> = rows.iter().map(|r| r.alpha_sq).collect();
        a.dedup();
        a.len()
    };
    for (kind, get) in [
        ("bit", &(|r: &StudyRow| r.bit) as &dyn Fn(&StudyRow) -> Option<scq_core::ratelab::RateFit>),
        ("phase", &|r: &StudyRow| r.phase),
    ] {
        // Group into one series per (r, knob), or per r when the knob is swept.
        let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        let vs_alpha = alpha_count > 1;
        for row in rows {
            let Some(fit) = get(row) else { continue };
            if fit.floor_clipped {
                continue;
            }
            let (key, x) = if vs_alpha {
                (format!("r={}, {}={:.1e}", row.r, row.knob_name, row.knob_value), row.alpha_sq)
            } else {
                (format!("r={}", row.r), row.knob_value)
            };
            series.entry(key).or_default().push((x, fit.rate));
        }
        if series.values().all(|v| v.len() < 2) {
            continue;
        }
        let chart = Chart {
            title: format!("Γ_{kind} / κ₂"),
            x_label: if vs_alpha { "α²".into() } else { rows[0].knob_name.into() },
            y_label: format!("Γ_{kind} / κ₂"),
            x_scale: if vs_alpha { Scale::Linear } else { Scale::Log },
            y_scale: Scale::Log,
            series: series
                .into_iter()
                .map(|(label, points)| Series { label, points, dashed: false })
                .collect(),
        };
        let name = format!("rates_{kind}.svg");
        write_atomic(&out.join(&name), &render(&chart))?;
        outputs.push(name);
    }
    Ok(outputs)
}

pub const ZGATE_HEADER: &str = "alpha_sq,r,theta,t_gate,epsilon_z,p_z,p_x,p_z_model,r_db";

pub fn run_zgate(cfg: &ZgateConfig, out: &Path, plot: bool) -> Result<Vec<String>, CliError> {
    cfg.validate()?;
    let noise = NoiseParams::new(1.0, cfg.kappa_minus, 0.0, 0.0, 0.0).map_err(runtime)?;
    let opts = GateOptions { rel_tol: cfg.rel_tol, abs_tol: cfg.abs_tol, ..Default::default() };
    let mut csv = String::from(ZGATE_HEADER);
    csv.push('\n');
    let mut series: BTreeMap<String, (Vec<(f64, f64)>, Vec<(f64, f64)>)> = BTreeMap::new();
    for &alpha_sq in &cfg.alpha_sq {
        for &r in &cfg.r {
            let code = CodeParams::real(alpha_sq.sqrt(), r).map_err(runtime)?;
            for &t_gate in &cfg.t_gate {
                let res = simulate_gate(&code, &noise, cfg.theta, t_gate, &opts).map_err(runtime)?;
                let model = pz_model(&code, cfg.kappa_minus, 1.0, t_gate);
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{}",
                    fnum(alpha_sq),
                    fnum(r),
                    fnum(cfg.theta),
                    fnum(t_gate),
                    fnum(res.epsilon_z),
                    fnum(res.p_z),
                    fnum(res.p_x),
                    fnum(model),
                    fnum(r_db(r)),
                );
                let entry = series.entry(format!("α²={alpha_sq}, r={r}")).or_default();
                entry.0.push((t_gate, res.p_z));
                entry.1.push((t_gate, model));
            }
        }
    }
    let mut outputs = vec!["zgate.csv".to_string()];
    write_atomic(&out.join("zgate.csv"), &csv)?;
    if plot {
        let mut all = Vec::new();
        for (label, (sim, model)) in series {
            all.push(Series { label: label.clone(), points: sim, dashed: false });
            all.push(Series { label: format!("{label} (model)"), points: model, dashed: true });
        }
        let chart = Chart {
            title: "Z(θ) gate phase-flip probability".into(),
            x_label: "T κ₂".into(),
            y_label: "p_Z".into(),
            x_scale: Scale::Log,
            y_scale: Scale::Log,
            series: all,
        };
        write_atomic(&out.join("zgate.svg"), &render(&chart))?;
        outputs.push("zgate.svg".into());
    }
    Ok(outputs)
}

pub fn run_prep(cfg: &PrepConfig, out: &Path, plot: bool) -> Result<Vec<String>, CliError> {
    cfg.validate()?;
    let p = DarkOpParams::new(
        C64::new(cfg.mu0_over_mu1, 0.0),
        C64::new(1.0, 0.0),
        C64::new(cfg.nu_over_mu1, 0.0),
        cfg.r,
        cfg.phi,
    )
    .map_err(runtime)?;
    let alpha = p.cat_alpha().map_err(runtime)?;
    // Appendix-A β sign convention (α cosh r − α* e^{iφ} sinh r) differs
    // from the code-space one; size the space for the prep target.
    let beta_prep = alpha * cfg.r.cosh()
        - alpha.conj() * C64::from_polar(cfg.r.sinh(), cfg.phi);
    let space = FockSpace::adequate_for(beta_prep.norm_sqr() + cfg.r.sinh().powi(2));
    let _ = target_state(space, &p).map_err(runtime)?;

    let mut csv = String::from("initial,time,fidelity\n");
    let mut series = Vec::new();
    for init_name in &cfg.initial {
        let rho0 = match init_name.as_str() {
            "vacuum" => DensityMatrix::pure(&Ket::vacuum(space)),
            "fock1" => DensityMatrix::pure(&Ket::fock_state(space, 1).map_err(runtime)?),
            "thermal" => DensityMatrix::thermal(space, cfg.n_th).map_err(runtime)?,
            _ => unreachable!("validated"),
        };
        let mut curve: Vec<(f64, f64)> = Vec::new();
        let rho0 = match cfg.anneal_t {
            None => rho0,
            Some(t_anneal) => {
                // Anneal with μ₀ = μ₁ first; curve times stay global.
                let p1 = DarkOpParams::new(
                    C64::new(1.0, 0.0),
                    C64::new(1.0, 0.0),
                    C64::new(cfg.nu_over_mu1, 0.0),
                    cfg.r,
                    cfg.phi,
                )
                .map_err(runtime)?;
                let samples = (cfg.sample_count / 4).max(2);
                let evo = EvolutionConfig::new(t_anneal, samples, 1e-7, 1e-11).map_err(runtime)?;
                let report = unconditional_convergence(space, &p1, &rho0, &evo).map_err(runtime)?;
                curve.extend(report.times.iter().zip(&report.fidelities).map(|(&t, &f)| (t, f)));
                report.final_state
            }
        };
        let t_offset = cfg.anneal_t.unwrap_or(0.0);
        let evo = EvolutionConfig::new(cfg.t_final, cfg.sample_count, 1e-7, 1e-11).map_err(runtime)?;
        let report = unconditional_convergence(space, &p, &rho0, &evo).map_err(runtime)?;
        curve.extend(report.times.iter().zip(&report.fidelities).map(|(&t, &f)| (t + t_offset, f)));
        for &(t, f) in &curve {
            let _ = writeln!(csv, "{init_name},{},{}", fnum(t), fnum(f));
        }
        series.push(Series { label: init_name.clone(), points: curve, dashed: false });
    }
    let mut outputs = vec!["prep.csv".to_string()];
    write_atomic(&out.join("prep.csv"), &csv)?;
    if plot {
        let chart = Chart {
            title: "Unconditional preparation: fidelity to target squeezed cat".into(),
            x_label: "t κ".into(),
            y_label: "fidelity".into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series,
        };
        write_atomic(&out.join("prep.svg"), &render(&chart))?;
        outputs.push("prep.svg".into());
    }
    Ok(outputs)
}

pub fn run_circuit(cfg: &CircuitConfig, out: &Path, plot: bool) -> Result<Vec<String>, CliError> {
    cfg.validate()?;
    let code = CodeParams::real(cfg.alpha_sq.sqrt(), cfg.r).map_err(runtime)?;
    let cp = scq_core::circuit::CircuitParams {
        g3: cfg.g3,
        kappa_w: cfg.kappa_w,
        e_j: cfg.e_j,
        lambda: cfg.lambda,
        omega_a: cfg.omega_a,
        omega_w: cfg.omega_w,
        phi_a: cfg.phi_a,
        phi_c: cfg.phi_c,
        phi_w: cfg.phi_w,
        eta: cfg.eta,
    };
    let plan = scq_core::circuit::pump_plan(&cp, &code).map_err(runtime)?;
    let mut csv = String::from("quantity,value\n");
    for (name, v) in [
        ("omega_1", plan.omega_1),
        ("omega_2", plan.omega_2),
        ("omega_3", plan.omega_3),
        ("eps_1", plan.eps_1),
        ("eps_2", plan.eps_2),
        ("eps_3", plan.eps_3),
        ("kappa2_eff", plan.kappa2_eff),
        ("omega_eff", plan.omega_eff),
        ("validity_ratio", plan.validity_ratio),
        ("beta_sq", beta(&code).norm_sqr()),
        ("r_db", r_db(cfg.r)),
    ] {
        let _ = writeln!(csv, "{name},{}", fnum(v));
    }
    let mut outputs = vec!["pump_plan.csv".to_string()];
    write_atomic(&out.join("pump_plan.csv"), &csv)?;

    if cfg.two_mode {
        let tm_cfg = scq_core::circuit::TwoModeConfig::default();
        let report = scq_core::circuit::two_mode_validation(&cp, &code, &tm_cfg).map_err(runtime)?;
        let mut csv = String::from("time_kappa2,trace_distance\n");
        for (&t, &d) in report.times.iter().zip(&report.trace_distances) {
            let _ = writeln!(csv, "{},{}", fnum(t), fnum(d));
        }
        write_atomic(&out.join("two_mode.csv"), &csv)?;
        outputs.push("two_mode.csv".into());
        if plot {
            let chart = Chart {
                title: format!("Two-mode vs effective model (validity {:.3})", report.validity_ratio),
                x_label: "t κ₂_eff".into(),
                y_label: "trace distance".into(),
                x_scale: Scale::Linear,
                y_scale: Scale::Linear,
                series: vec![Series {
                    label: "‖ρ_storage − ρ_eff‖₁/2".into(),
                    points: report.times.iter().cloned().zip(report.trace_distances.iter().cloned()).collect(),
                    dashed: false,
                }],
            };
            write_atomic(&out.join("two_mode.svg"), &render(&chart))?;
            outputs.push("two_mode.svg".into());
        }
    }
    Ok(outputs)
}
