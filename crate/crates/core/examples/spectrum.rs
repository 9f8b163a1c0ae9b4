//! Near-kernel of the linearized operator on R T_ω(𝕋).
//!
//! Usage: `cargo run --release --example spectrum [truncation]` (default 12).

use willmore::mobius::MobiusParam;
use willmore::variational::{assemble_flat_operator, jacobi_residuals, near_kernel};

fn main() -> willmore::Result<()> {
    let k: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(12);
    for s in [0.0, 0.4] {
        let p = MobiusParam::along_x(s)?;
        let op = assemble_flat_operator(&p, k)?;
        let r = near_kernel(&op, None)?;
        println!("|w| = {s}: basis {} (asymmetry {:.1e})", op.size, op.asymmetry);
        println!("  near-kernel count {} below {:.3e}, gap ratio {:.3e}", r.near_kernel_count, r.threshold, r.gap_ratio);
        let head: Vec<String> = r.eigenvalues.iter().take(11).map(|v| format!("{v:.2e}")).collect();
        println!("  smallest |eigenvalues|: {}", head.join(" "));
        for (label, res) in jacobi_residuals(&p, 96)? {
            println!("  {label:<14} {res:.2e}");
        }
    }
    Ok(())
}
