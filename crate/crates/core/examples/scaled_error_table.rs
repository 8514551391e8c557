//! Prints the dominant-eigenvalue asymptotic errors over the decade ladder
//! and the single constant that bounds them all. The last number is what the
//! regression fixture in tests/fixtures/fitted_c.txt pins.

use rstar_core::arith::OmegaHistogram;
use rstar_core::charpoly::reduced_poly;
use rstar_core::config::{ROOT_TOL, SEGMENT_SIZE};
use rstar_core::spectral::{
    asymptotic_lambda, compute_constants, lambda_error_scaled, nontrivial_eigenvalues,
};

fn main() {
    let c = compute_constants(12).expect("constant self-test");
    println!("n,lambda_plus,lambda_minus,asym_plus,asym_minus,err_plus_scaled,err_minus_scaled");
    let mut fitted = 0.0f64;
    for exp in 2..=6 {
        let n = 10u64.pow(exp);
        let h = OmegaHistogram::build(n, SEGMENT_SIZE).expect("histogram");
        let (q, _, _) = reduced_poly(&h).expect("reduced polynomial");
        let report = nontrivial_eigenvalues(&q, ROOT_TOL).expect("roots");
        let (ap, am) = asymptotic_lambda(n, &c);
        let (ep, em) = lambda_error_scaled(n, report.lambda_plus, report.lambda_minus, &c);
        println!(
            "{n},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e},{:.6e}",
            report.lambda_plus, report.lambda_minus, ap, am, ep, em
        );
        fitted = fitted.max(ep).max(em);
    }
    println!("fitted_c,{fitted:.9e}");
}
