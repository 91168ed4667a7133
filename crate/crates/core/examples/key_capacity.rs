//! How much traffic a given secret-key rate can protect when one 256-bit key
//! is spent per 64 GB of data.
//!
//!     cargo run -p siqkd --example key_capacity

use siqkd::cli::format_rate;
use siqkd::keybudget::{required_skr, securable_capacity, KeyBudgetPolicy};

fn main() -> siqkd::Result<()> {
    let policy = KeyBudgetPolicy::default();
    for skr in [37.0, 370.0, 3.7e3, 1e6] {
        println!(
            "{:>10} of key  ->  {:>10} of traffic",
            format_rate(skr),
            format_rate(securable_capacity(skr, &policy)?)
        );
    }

    let link = 100e9;
    println!("a {} link needs {} of key", format_rate(link), format_rate(required_skr(link, &policy)?));

    // rotating keys ten times as often costs ten times the key rate
    let strict = KeyBudgetPolicy { chunk_bytes: 6.4e9, ..policy };
    println!("with 6.4 GB chunks: {}", format_rate(required_skr(link, &strict)?));
    Ok(())
}
