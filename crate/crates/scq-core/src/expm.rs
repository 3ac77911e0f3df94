//! Dense matrix exponential via Padé approximation with scaling and squaring
//! (Higham 2005). Sufficient for the generator norms that occur here
//! (displacement/squeezing generators on N ≤ ~200 truncated spaces).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

fn one_norm(a: &DMatrix<C64>) -> f64 {
    let mut max = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        max = max.max(s);
    }
    max
}

fn pade_uv(a: &DMatrix<C64>, b: &[f64]) -> (DMatrix<C64>, DMatrix<C64>) {
    // U = A (b1 I + b3 A² + ...), V = b0 I + b2 A² + ...
    let n = a.nrows();
    let a2 = a * a;
    let mut even = DMatrix::identity(n, n) * C64::new(b[0], 0.0);
    let mut odd = DMatrix::identity(n, n) * C64::new(b[1], 0.0);
    let mut pow = DMatrix::identity(n, n);
    for k in (2..b.len()).step_by(2) {
        pow = &pow * &a2;
        even += &pow * C64::new(b[k], 0.0);
        if k + 1 < b.len() {
            odd += &pow * C64::new(b[k + 1], 0.0);
        }
    }
    (a * odd, even)
}

fn pade13_uv(a: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let b: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let id = DMatrix::<C64>::identity(n, n);
    let c = |x: f64| C64::new(x, 0.0);
    let u_inner = &a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]);
    let u = a * (&a6 * u_inner + &a6 * c(b[7]) + &a4 * c(b[5]) + &a2 * c(b[3]) + &id * c(b[1]));
    let v_inner = &a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]);
    let v = &a6 * v_inner + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + &id * c(b[0]);
    (u, v)
}

/// exp(A) for a square complex matrix.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let norm = one_norm(a);
    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = pade_uv(a, &[120.0, 60.0, 12.0, 1.0]);
        (u, v, 0)
    } else if norm <= THETA_5 {
        let (u, v) = pade_uv(a, &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0]);
        (u, v, 0)
    } else if norm <= THETA_7 {
        let (u, v) =
            pade_uv(a, &[17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0]);
        (u, v, 0)
    } else if norm <= THETA_9 {
        let (u, v) = pade_uv(
            a,
            &[
                17643225600.0,
                8821612800.0,
                2075673600.0,
                302702400.0,
                30270240.0,
                2162160.0,
                110880.0,
                3960.0,
                90.0,
                1.0,
            ],
        );
        (u, v, 0)
    } else {
        let squarings = ((norm / THETA_13).log2().ceil()).max(0.0) as u32;
        let scaled = a * C64::new(0.5f64.powi(squarings as i32), 0.0);
        let (u, v) = pade13_uv(&scaled);
        (u, v, squarings)
    };

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_zero_is_identity() {
        let z = DMatrix::<C64>::zeros(5, 5);
        let e = expm(&z);
        assert!((e - DMatrix::<C64>::identity(5, 5)).iter().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn exp_diagonal_phases() {
        let n = 6;
        let mut d = DMatrix::<C64>::zeros(n, n);
        for k in 0..n {
            d[(k, k)] = C64::new(0.0, 0.3 * k as f64);
        }
        let e = expm(&d);
        for k in 0..n {
            let want = C64::from_polar(1.0, 0.3 * k as f64);
            assert!((e[(k, k)] - want).norm() < 1e-14);
        }
    }

    #[test]
    fn exp_inverse_pair() {
        // exp(A) exp(−A) = I for a displacement-type generator at N = 40.
        let n = 40;
        let alpha = 2.0;
        let mut a = DMatrix::<C64>::zeros(n, n);
        for k in 1..n {
            let s = (k as f64).sqrt();
            a[(k, k - 1)] += C64::new(alpha * s, 0.0);
            a[(k - 1, k)] -= C64::new(alpha * s, 0.0);
        }
        let e = expm(&a);
        let e_neg = expm(&(-&a));
        let prod = &e * &e_neg;
        let dev = (&prod - DMatrix::<C64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10, "deviation {dev}");
    }
}
