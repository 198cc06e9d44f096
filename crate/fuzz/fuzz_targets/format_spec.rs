#![no_main]

use cosra::FormatSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = text.parse::<FormatSpec>() else { return };
    let again: FormatSpec = spec.to_string().parse().expect("display output parses");
    assert_eq!(spec, again);
});
