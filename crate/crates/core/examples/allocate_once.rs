//! All four policies on one channel draw, at the SNRs of the visual
//! comparison scenario (2.3 dB mask link, 3.5 dB text link).
//!
//! ```bash
//! cargo run --example allocate_once -- [bandwidth_hz]
//! ```

use semdeadline::allocator::allocate;
use semdeadline::channel::{db_to_linear, LinkPair, LinkSpec, BITS_PER_KB};
use semdeadline::{Policy, QualitySurface, ToyDiffusionConfig};

fn main() -> semdeadline::Result<()> {
    let b_total: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3e5);
    let surface = QualitySurface::from_toy(&ToyDiffusionConfig::default())?;
    let links = LinkPair::new(
        LinkSpec::new(4 * BITS_PER_KB, db_to_linear(2.3))?,
        LinkSpec::new(BITS_PER_KB, db_to_linear(3.5))?,
    );

    println!("budget {:.0} kHz", b_total / 1e3);
    for policy in [
        Policy::Benchmark1,
        Policy::Benchmark2,
        Policy::Proposed { k: 4 },
        Policy::Proposed { k: 20 },
    ] {
        let a = allocate(policy, &surface, &links, b_total, 0.65)?;
        println!(
            "{:<13} B=({:>7.0}, {:>7.0}) Hz  t=({:.3}, {:.3}) s  eps*={:<6}  q={:.3}  {:.1} dB",
            policy.to_string(),
            a.bandwidth_s,
            a.bandwidth_l,
            a.t_s,
            a.t_l,
            a.eps_star.map_or("-".to_string(), |e| format!("{e:.3}")),
            a.q(),
            a.psnr()
        );
    }
    Ok(())
}
