//! Toy, parametric and file-loaded quality surfaces behind one interface.
//! Pass a JSON grid path to load your own (for example one measured on a
//! real diffusion model).
//!
//! ```bash
//! cargo run --example surfaces -- [grid.json]
//! ```

use std::path::Path;

use semdeadline::surface::{ParametricParams, QualitySurface};
use semdeadline::ToyDiffusionConfig;

fn describe(name: &str, s: &QualitySurface) -> semdeadline::Result<()> {
    let (psnr, q) = s.evaluate(0.12, 0.3)?;
    println!(
        "{name:<11} T={} omega={} ref={:.2} dB | t=(0.12 s, 0.30 s) -> {psnr:.2} dB, q={q:.3} | |G_0.8|={}",
        s.steps(),
        s.omega(),
        s.psnr_ref(),
        s.superlevel_set(0.8)?.len()
    );
    Ok(())
}

fn main() -> semdeadline::Result<()> {
    let toy = QualitySurface::from_toy(&ToyDiffusionConfig::default())?;
    describe("toy", &toy)?;
    describe(
        "parametric",
        &QualitySurface::from_parametric(&ParametricParams::default())?,
    )?;

    let loaded = match std::env::args().nth(1) {
        Some(path) => QualitySurface::load(Path::new(&path))?,
        // round trip the toy grid through the JSON exchange format
        None => QualitySurface::from_json(&toy.to_document().to_json()?)?,
    };
    describe("file", &loaded)?;
    Ok(())
}
