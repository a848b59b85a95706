//! Fits the lower-bound constant `c1` (with `c2` fixed) on races drawn from
//! seeds disjoint from the acceptance suite, and prints the values to pin in
//! `bounds.rs`.
//!
//! cargo run --release -p chebias --example calibrate

use chebias::bounds::{fit_lower_constants, BoundConstants, TailObservation, PINNED_C2};
use chebias::experiments::sandwich_races;

const CALIBRATION_SEED: u64 = 0xCA11_B8A7E;

fn main() {
    let k = BoundConstants::default();
    let rows = sandwich_races(CALIBRATION_SEED, 100, 3, 100_000, &k).expect("calibration races");
    let obs: Vec<TailObservation> = rows
        .iter()
        .map(|r| TailObservation {
            tail: r.tail,
            q: r.q,
            bias: r.bias,
        })
        .collect();
    for coverage in [0.95, 0.99, 1.0] {
        let c1 =
            fit_lower_constants(&obs, PINNED_C2, coverage).expect("positive-bias observations");
        println!("coverage {coverage:.2}: c1 = {c1:.6}");
    }
    let above = rows.iter().filter(|r| r.tail > r.upper).count();
    println!("{} races, {} above the upper bound", rows.len(), above);
    let qs: Vec<f64> = rows.iter().map(|r| r.q).collect();
    println!(
        "Q range [{:.3}, {:.3}]",
        qs.iter().cloned().fold(f64::INFINITY, f64::min),
        qs.iter().cloned().fold(0.0, f64::max)
    );
}
