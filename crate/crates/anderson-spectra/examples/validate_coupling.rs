//! Admissibility checks for an algebraic coupling constant: smallness,
//! algebraic size of the minimal polynomial, and existence of a conjugate
//! root of modulus ≥ 1. Shows one admissible coupling from the quadratic
//! family x² + kx − 1 and one that fails two of the three conditions.
//!
//! Run with: cargo run --release --example validate_coupling

use anderson_spectra::model::{validate_coupling, CouplingReport, CouplingSpec};
use anderson_spectra::Result;

fn print_report(spec: &CouplingSpec, report: &CouplingReport) {
    println!(
        "lambda = {:.17}, poly = {:?}, C = {}, lambda0 = {}",
        spec.lambda, spec.poly_coeffs, spec.coeff_bound_exponent, spec.lambda0
    );
    for (name, check) in [
        ("smallness        ", &report.smallness),
        ("algebraic size   ", &report.algebraic_size),
        ("conjugate modulus", &report.conjugate_modulus),
    ] {
        println!(
            "  {} : {}  ({})",
            name,
            if check.satisfied { "ok    " } else { "FAILED" },
            check.detail
        );
    }
    println!("  roots            : {:?}", report.roots);
    println!("  conjugate moduli : {:?}", report.conjugate_moduli);
    println!("  residual |P(λ)|  : {:.3e}", report.residual_at_lambda);
    println!("  irreducibility   : {}", report.irreducibility);
    println!("  all satisfied    : {}\n", report.all_satisfied());
}

fn main() -> Result<()> {
    // λ = −5 + √26 ≈ 0.0990: root of x² + 10x − 1. The root product is −1,
    // so the conjugate automatically has modulus 1/λ > 1.
    let good = CouplingSpec::quadratic_small_root(10, 10.0, 0.2);
    let report = validate_coupling(&good)?;
    print_report(&good, &report);
    assert!(report.all_satisfied());

    // Same family with k = 3 but hostile thresholds: λ ≈ 0.303 exceeds
    // λ₀ = 0.1, and C = 2 rejects its own degree-2 polynomial.
    let bad = CouplingSpec::quadratic_small_root(3, 2.0, 0.1);
    let report = validate_coupling(&bad)?;
    print_report(&bad, &report);
    assert!(!report.smallness.satisfied);
    assert!(!report.algebraic_size.satisfied);
    assert!(report.conjugate_modulus.satisfied);

    // A hand-written spec: λ must actually be a root of the polynomial,
    // otherwise the validator refuses outright.
    let not_a_root = CouplingSpec {
        lambda: 0.25,
        poly_coeffs: vec![-1, 10, 1],
        coeff_bound_exponent: 10.0,
        lambda0: 0.5,
    };
    match validate_coupling(&not_a_root) {
        Err(e) => println!("λ = 0.25 against x² + 10x − 1 refused: {e}"),
        Ok(_) => unreachable!("0.25 is not a root and must be rejected"),
    }
    Ok(())
}
