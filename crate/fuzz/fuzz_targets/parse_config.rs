#![no_main]

use cosra_cli::config::{parse_config, Manifest};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(settings) = parse_config(text) else { return };
    let Ok(manifest) = Manifest::from_settings(&settings) else { return };
    let echoed = parse_config(&manifest.echo()).expect("echo parses");
    assert_eq!(Manifest::from_settings(&echoed).expect("echo resolves"), manifest);
});
