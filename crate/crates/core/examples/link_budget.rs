//! Transmission delays for the mask and text payloads, the bandwidth each
//! needs to hit a deadline, and a few Gamma-faded SNR draws.
//!
//! ```bash
//! cargo run --example link_budget
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semdeadline::channel::{
    db_to_linear, linear_to_db, required_bandwidth, sample_gain, transmission_time, FadingModel,
    LinkSpec, BITS_PER_KB,
};

fn main() -> semdeadline::Result<()> {
    let mask = LinkSpec::new(4 * BITS_PER_KB, db_to_linear(2.3))?;
    let text = LinkSpec::new(BITS_PER_KB, db_to_linear(3.5))?;

    println!("bandwidth   mask delay   text delay");
    for khz in [50.0, 100.0, 150.0, 300.0] {
        let b = khz * 1e3;
        println!(
            "{khz:>5} kHz   {:>8.4} s   {:>8.4} s",
            transmission_time(&mask, b)?,
            transmission_time(&text, b)?
        );
    }

    let deadline = 0.25;
    println!(
        "\nto arrive within {deadline} s: mask needs {:.0} Hz, text needs {:.0} Hz",
        required_bandwidth(&mask, deadline)?,
        required_bandwidth(&text, deadline)?
    );

    let fading = FadingModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws: Vec<String> = (0..6)
        .map(|_| {
            format!(
                "{:.1} dB",
                linear_to_db(2.0 * sample_gain(&mut rng, &fading))
            )
        })
        .collect();
    println!(
        "\nfaded SNRs (mean gain 1, scaled by 2): {}",
        draws.join(", ")
    );
    Ok(())
}
