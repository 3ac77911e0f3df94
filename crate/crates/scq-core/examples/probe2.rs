use num_complex::Complex64 as C64;
use scq_core::circuit::{two_mode_validation, CircuitParams, TwoModeConfig};
use scq_core::fock::{DensityMatrix, FockSpace, Ket};
use scq_core::lindblad::EvolutionConfig;
use scq_core::stateprep::{unconditional_convergence, DarkOpParams};
use scq_core::states::CodeParams;

fn main() {
    let mode = std::env::args().nth(1).unwrap();
    match mode.as_str() {
        "twomode" => {
            let validity: f64 = std::env::args().nth(2).unwrap().parse().unwrap();
            let alpha: f64 = std::env::args().nth(3).unwrap().parse().unwrap();
            let r: f64 = std::env::args().nth(4).unwrap().parse().unwrap();
            let code = CodeParams::real(alpha, r).unwrap();
            let g3 = validity * 50.0 / (2.0 * code.alpha.norm());
            let cp = CircuitParams {
                g3, kappa_w: 50.0, e_j: 1000.0, lambda: 0.05,
                omega_a: 4000.0, omega_w: 6000.0,
                phi_a: 0.3, phi_c: 0.2, phi_w: 0.25, eta: 0.0,
            };
            let t = std::time::Instant::now();
            let rep = two_mode_validation(&cp, &code, &TwoModeConfig::default()).unwrap();
            println!("validity={validity} final_td={:.4} level4={:.2e} in {:.1?}",
                rep.final_trace_distance, rep.level4_max, t.elapsed());
        }
        "prep" => {
            let mu0: f64 = std::env::args().nth(2).unwrap().parse().unwrap();
            let t_final: f64 = std::env::args().nth(3).unwrap().parse().unwrap();
            let p = DarkOpParams::new(C64::new(mu0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0), 0.25, 0.0).unwrap();
            let alpha = p.cat_alpha().unwrap();
            let beta = alpha * 0.25f64.cosh() - alpha.conj() * 0.25f64.sinh();
            let space = FockSpace::adequate_for(beta.norm_sqr() + 0.25f64.sinh().powi(2));
            println!("dim={} alpha={alpha}", space.dim());
            let cfg = EvolutionConfig::new(t_final, 48, 1e-7, 1e-11).unwrap();
            for (name, rho) in [
                ("vacuum", DensityMatrix::pure(&Ket::vacuum(space))),
                ("fock1", DensityMatrix::pure(&Ket::fock_state(space, 1).unwrap())),
                ("thermal", DensityMatrix::thermal(space, 0.2).unwrap()),
            ] {
                let t = std::time::Instant::now();
                let rep = unconditional_convergence(space, &p, &rho, &cfg).unwrap();
                println!("mu0={mu0} init={name} final_fid={:.5} in {:.1?}", rep.final_fidelity, t.elapsed());
            }
        }
        _ => panic!("unknown mode"),
    }
}
