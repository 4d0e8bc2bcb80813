//! How the leftover-bandwidth rule behaves as the budget grows for one channel
//! draw. The default rule never lets a link drop below its threshold minimum;
//! the signed rule follows the next deadline point even when that means
//! taking bandwidth away from one link. Where the curve switches contour arms
//! the default rule can lose a little quality as the budget grows.
//!
//! ```bash
//! cargo run --example leftover_rules
//! ```

use semdeadline::allocator::{
    evaluate_allocation, solve_p2, solve_p3_with, LeftoverRule, P2Outcome,
};
use semdeadline::channel::{LinkPair, LinkSpec, BITS_PER_KB};
use semdeadline::deadline::deadline_curve;
use semdeadline::{QualitySurface, ToyDiffusionConfig};

fn main() -> semdeadline::Result<()> {
    let surface = QualitySurface::from_toy(&ToyDiffusionConfig::default())?;
    let curve = deadline_curve(&surface, 0.65, 20)?;
    let links = LinkPair::new(
        LinkSpec::new(4 * BITS_PER_KB, 1.306)?,
        LinkSpec::new(BITS_PER_KB, 1.380)?,
    );

    println!("  budget   eps*    q(non-negative)  q(signed)");
    for i in 0..=16 {
        let b = 80e3 + i as f64 * 5e3;
        let P2Outcome::Feasible { eps_star, .. } = solve_p2(&curve, &links, b) else {
            println!("{b:>8.0}   no threshold fits");
            continue;
        };
        let q = |rule| -> semdeadline::Result<f64> {
            let a = solve_p3_with(&curve, Some(eps_star), &links, b, rule)?;
            Ok(evaluate_allocation(&a, &links, &surface)?.q())
        };
        println!(
            "{b:>8.0}   {eps_star:.3}  {:>15.4}  {:>9.4}",
            q(LeftoverRule::NonNegative)?,
            q(LeftoverRule::Signed)?
        );
    }
    Ok(())
}
