#![no_main]

use libfuzzer_sys::fuzz_target;
use qlidar_cli::config::parse_config;
use qlidar_cli::spec::{Command, ScanSpec};

const COMMANDS: [Command; 7] = [
    Command::Signal,
    Command::Sensitivity,
    Command::Fwhm,
    Command::Wigner,
    Command::Loss,
    Command::Peaks,
    Command::OracleCheck,
];

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(map) = parse_config(text) else { return };
    for key in map.keys() {
        assert!(!key.is_empty() && !key.contains('_'));
    }
    for command in COMMANDS {
        if let Ok(spec) = ScanSpec::from_map(command, &map) {
            assert!(spec.phi_max > spec.phi_min);
            assert!(spec.phi_steps >= 2);
            assert!(!spec.grid.is_empty());
            assert!((0.0..1.0).contains(&spec.loss_r));
        }
    }
});
