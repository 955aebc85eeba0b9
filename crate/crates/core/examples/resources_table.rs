//! Resource comparison between comb-based spectroscopy at several resolutions and
//! the CA protocol: number of settings and minimum pulse spacing.
//!
//! Run with `cargo run --release --example resources_table`.

use qns::comb::{delta_tau, principal_domain_and_count};
use qns::qns::UnknownSet;

fn main() -> qns::Result<()> {
    let (coherence, reps) = (100.0, 20);
    println!("{:<8} {:>7} {:>10} {:>10}", "method", "m_max", "settings", "Δτ [μs]");
    for m in [47, 15, 10, 4] {
        let (_, count) = principal_domain_and_count(m)?;
        println!("{:<8} {m:>7} {count:>10} {:>10.3}", "comb", delta_tau(coherence, reps, m));
    }
    let (l, t) = (4, 3.2);
    for k in [2, 4] {
        let n = UnknownSet::for_truncation(l, k)?.keys().len();
        println!("{:<8} {:>7} {n:>10} {:>10.3}", format!("CA K={k}"), "-", t / l as f64);
    }
    Ok(())
}
