use num_complex::Complex64 as C64;
use scq_core::fock::{DensityMatrix, FockSpace, Ket};
use scq_core::lindblad::EvolutionConfig;
use scq_core::stateprep::{unconditional_convergence, DarkOpParams};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let nu: f64 = args[1].parse().unwrap();
    let mu0: f64 = args[2].parse().unwrap();
    let dim: usize = args[3].parse().unwrap();
    let t_final: f64 = args[4].parse().unwrap();
    let rel: f64 = args[5].parse().unwrap();

    let mk = |m0: f64| {
        DarkOpParams::new(C64::new(m0, 0.0), C64::new(1.0, 0.0), C64::new(nu, 0.0), 0.2, 0.0)
            .unwrap()
    };
    let space = FockSpace::new(dim).unwrap();
    let cfg1 = EvolutionConfig::new(12.0, 8, rel, rel * 1e-4).unwrap();
    let cfg2 = EvolutionConfig::new(t_final, 16, rel, rel * 1e-4).unwrap();
    for (name, rho0) in [
        ("vacuum", DensityMatrix::pure(&Ket::vacuum(space))),
        ("fock1", DensityMatrix::pure(&Ket::fock_state(space, 1).unwrap())),
        ("thermal", DensityMatrix::thermal(space, 0.5).unwrap()),
    ] {
        let t0 = std::time::Instant::now();
        let stage1 = unconditional_convergence(space, &mk(1.0), &rho0, &cfg1).unwrap();
        let stage2 = unconditional_convergence(space, &mk(mu0), &stage1.final_state, &cfg2).unwrap();
        println!(
            "nu={nu} mu0={mu0} dim={dim} t2={t_final} rel={rel} init={name} fid1={:.5} fid={:.5} in {:.1}s",
            stage1.final_fidelity,
            stage2.final_fidelity,
            t0.elapsed().as_secs_f64()
        );
    }
}
