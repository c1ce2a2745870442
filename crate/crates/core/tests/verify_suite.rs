use std::time::Instant;

use desing::verify::{run_suite, DEFAULT_SEED};

#[test]
fn suite_passes_with_default_seed() {
    let start = Instant::now();
    let r = run_suite(DEFAULT_SEED);
    print!("{}", r.to_text());
    println!("elapsed {:?}", start.elapsed());
    assert!(r.all_passed());
}
