#![no_main]

use libfuzzer_sys::fuzz_target;
use qlidar::detection::Scheme;
use qlidar::states::StateKind;
use qlidar_cli::spec::{parse_angle, parse_bool, parse_grid, parse_second, parse_side, parse_states, Format, SweepVar};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 512 {
        return;
    }
    if let Ok(v) = parse_angle(s) {
        assert!(v.is_finite());
    }
    if let Ok(grid) = parse_grid(s) {
        assert!(!grid.is_empty());
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }
    if let Ok(states) = parse_states(s) {
        assert!(!states.is_empty() && states.len() <= 6);
    }
    let _ = parse_second(s);
    let _ = parse_side(s);
    let _ = parse_bool(s);
    let _ = s.parse::<Format>();
    let _ = s.parse::<SweepVar>();
    let _ = s.parse::<Scheme>();
    if let Ok(kind) = s.parse::<StateKind>() {
        assert_eq!(kind.label().parse::<StateKind>(), Ok(kind));
    }
});
