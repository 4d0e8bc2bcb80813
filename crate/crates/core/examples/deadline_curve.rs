//! Semantic deadline curve of the default toy surface, printed as CSV.
//!
//! ```bash
//! cargo run --example deadline_curve -- [K] [eps_th]
//! ```

use semdeadline::deadline::deadline_curve;
use semdeadline::{QualitySurface, ToyDiffusionConfig};

fn main() -> semdeadline::Result<()> {
    let mut args = std::env::args().skip(1);
    let k = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let eps_th = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.65);

    let surface = QualitySurface::from_toy(&ToyDiffusionConfig::default())?;
    let curve = deadline_curve(&surface, eps_th, k)?;
    print!("{}", curve.to_csv());
    eprintln!("{} grid cells scanned", curve.cells_visited);
    Ok(())
}
