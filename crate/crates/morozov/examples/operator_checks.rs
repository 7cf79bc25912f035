//! Numerical-kernel self-checks: Jacobians against central finite
//! differences, the adjoint identity ⟨Jv, w⟩ = ⟨v, Jᵀw⟩, the soft-threshold
//! operator against a brute-force prox search, and monotonicity of the
//! scalar-lasso discrepancy. The same suite backs `morozov --mode check`.
//!
//! Run with: cargo run --release --example operator_checks

use morozov::run_checks;

fn main() {
    let lines = run_checks().expect("check suite failed to run");
    let mut all = true;
    for l in &lines {
        println!(
            "{:<28} {}  {}",
            l.name,
            if l.passed { "pass" } else { "FAIL" },
            l.detail
        );
        all &= l.passed;
    }
    if all {
        println!("\nall {} checks passed", lines.len());
    } else {
        println!("\nsome checks FAILED");
        std::process::exit(1);
    }
}
