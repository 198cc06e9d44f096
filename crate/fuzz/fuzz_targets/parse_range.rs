#![no_main]

use cosra_cli::config::parse_range;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(grid) = parse_range(text) else { return };
    assert!(!grid.is_empty());
    assert!(grid.iter().all(|v| v.is_finite()));
    assert!(grid.windows(2).all(|w| w[0] < w[1]));
});
