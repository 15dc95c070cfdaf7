#![no_main]

use libfuzzer_sys::fuzz_target;
use qlidar_cli::parse_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 1024 {
        return;
    }
    let args = std::iter::once("qlidar").chain(s.split('\0').filter(|a| !a.starts_with("--config")));
    let _ = parse_spec(args);
});
