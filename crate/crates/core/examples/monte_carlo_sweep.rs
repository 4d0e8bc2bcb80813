//! Default Monte Carlo sweep: four policies over 0.1 to 0.5 MHz, printing the
//! mean normalized quality per budget.
//!
//! ```bash
//! cargo run --release --example monte_carlo_sweep -- [trials] [eps_th]
//! ```

use semdeadline::sim::{run_sweep, summarize, SimConfig};

fn main() -> semdeadline::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = SimConfig::default();
    if let Some(trials) = args.next().and_then(|s| s.parse().ok()) {
        cfg.trials = trials;
    }
    if let Some(eps_th) = args.next().and_then(|s| s.parse().ok()) {
        cfg.eps_th = eps_th;
    }
    let records = run_sweep(&cfg)?;
    println!(
        "{:>10}  {:<13} {:>8} {:>8}",
        "B_total", "policy", "mean_q", "mean_dB"
    );
    for row in summarize(&records)? {
        println!(
            "{:>10.0}  {:<13} {:>8.4} {:>8.2}",
            row.b_total,
            row.policy.to_string(),
            row.mean_q,
            row.mean_psnr
        );
    }
    Ok(())
}
