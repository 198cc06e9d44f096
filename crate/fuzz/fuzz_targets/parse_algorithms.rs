#![no_main]

use cosra::Algorithm;
use cosra_cli::config::parse_algorithms;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(alg) = text.parse::<Algorithm>() {
        assert_eq!(alg.to_string().parse::<Algorithm>().expect("display output parses"), alg);
    }
    let Ok(algorithms) = parse_algorithms(text) else { return };
    let joined: Vec<String> = algorithms.iter().map(Algorithm::to_string).collect();
    assert_eq!(parse_algorithms(&joined.join(",")).expect("joined list parses"), algorithms);
});
