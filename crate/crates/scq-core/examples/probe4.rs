use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use scq_core::fock::{annihilation, DensityMatrix, FockSpace};
use scq_core::lindblad::{build_master_equation, evolve, EvolutionConfig, NoiseParams};
use scq_core::observables::parity_jx;
use scq_core::states::{squeezed_cat, CodeParams, Parity};
use scq_core::zgate::{drive_amplitude, pz_model};

fn main() {
    let theta = std::f64::consts::PI;
    let noise = NoiseParams::ideal();
    for r in [0.0, 0.2] {
        let code = CodeParams::real(2.0, r).unwrap();
        let space = FockSpace::new(FockSpace::required_dim(code.n_bar_confinement())).unwrap();
        let a = annihilation(space);
        for t_gate in [0.3, 0.6, 1.0, 3.0] {
            let eps = drive_amplitude(theta, 2.0, t_gate).unwrap();
            let drive = a.dagger().add(&a).scale(C64::new(eps, 0.0));
            let me_gate = build_master_equation(space, &code, &noise, Some(&drive)).unwrap();
            let me_idle = build_master_equation(space, &code, &noise, None).unwrap();
            let plus = squeezed_cat(space, &code, Parity::Even).unwrap();
            let mut obs = BTreeMap::new();
            obs.insert("jx".to_string(), parity_jx(space));
            let cfg = EvolutionConfig::new(t_gate, 16, 1e-8, 1e-12).unwrap();
            let traj = evolve(&me_gate, &DensityMatrix::pure(&plus.ket), &cfg, &obs).unwrap();
            let raw = (1.0 + traj.observable("jx").unwrap().last().unwrap()) / 2.0;
            for t_settle in [0.25, 0.5, 1.0] {
                let cfg2 = EvolutionConfig::new(t_settle, 8, 1e-8, 1e-12).unwrap();
                let traj2 = evolve(&me_idle, &traj.final_state, &cfg2, &obs).unwrap();
                let settled = (1.0 + traj2.observable("jx").unwrap().last().unwrap()) / 2.0;
                let model = pz_model(&code, 0.0, 1.0, t_gate);
                println!(
                    "r={r} T={t_gate} settle={t_settle}: raw={raw:.4e} settled={settled:.4e} model={model:.4e} ratio={:.3}",
                    settled / model
                );
            }
        }
    }
}
