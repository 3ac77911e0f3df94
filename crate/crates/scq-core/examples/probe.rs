use scq_core::lindblad::NoiseParams;
use scq_core::ratelab::{study_point, Measure, StudyOptions};
use scq_core::states::CodeParams;

fn main() {
    // args: alpha_sq r kappa_minus [kerr]
    let args: Vec<String> = std::env::args().collect();
    let alpha_sq: f64 = args[1].parse().unwrap();
    let r: f64 = args[2].parse().unwrap();
    let km: f64 = args[3].parse().unwrap();
    let kerr: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0.0);
    let code = CodeParams::real(alpha_sq.sqrt(), r).unwrap();
    let noise = NoiseParams::new(1.0, km, 0.0, 0.0, kerr).unwrap();
    let opts = StudyOptions { measure: Measure::BitOnly, ..Default::default() };
    let t = std::time::Instant::now();
    let (bit, _, w) = study_point(&code, &noise, &opts).unwrap();
    let b = bit.unwrap();
    println!("a2={alpha_sq} r={r} K={kerr} bit={:.6e} stderr={:.1e} clipped={} warn={} in {:.1?}",
        b.rate, b.stderr, b.floor_clipped, w.len(), t.elapsed());
}
