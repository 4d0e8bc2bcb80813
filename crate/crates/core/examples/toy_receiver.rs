//! The toy receiver: conditioning cases per step for one pair of arrival
//! steps, and a coarse view of the resulting PSNR grid.
//!
//! ```bash
//! cargo run --example toy_receiver
//! ```

use semdeadline::toy_diffusion::{
    generate_grid, psnr, reference, run_traced, ConditioningCase, ConditioningSet,
    ToyDiffusionConfig,
};

fn main() -> semdeadline::Result<()> {
    let cfg = ToyDiffusionConfig::default();
    let cond = ConditioningSet::for_config(&cfg)?;

    let (mask_step, text_step) = (3, 7);
    let (z, trace) = run_traced(mask_step, text_step, &cfg, &cond)?;
    let schedule: String = trace
        .iter()
        .map(|c| match c {
            ConditioningCase::NeitherArrived => '.',
            ConditioningCase::MaskOnly => 'm',
            ConditioningCase::TextOnly => 't',
            ConditioningCase::BothArrived => '#',
        })
        .collect();
    let z_ref = reference(&cfg, &cond)?;
    println!("mask at step {mask_step}, text at step {text_step}: {schedule}");
    println!(
        "PSNR against on-time reference: {:.2} dB",
        psnr(&z_ref, &z, cfg.max_signal, cfg.psnr_cap)?
    );

    let grid = generate_grid(&cfg, &cond)?;
    println!("\nPSNR (dB), rows = mask step, cols = text step, every 4th step");
    print!("      ");
    for b in (0..=cfg.steps).step_by(4) {
        print!("{b:>7}");
    }
    println!();
    for a in (0..=cfg.steps).step_by(4) {
        print!("{a:>5} ");
        for b in (0..=cfg.steps).step_by(4) {
            print!("{:>7.1}", grid[a][b]);
        }
        println!();
    }
    Ok(())
}
