#![no_main]

use libfuzzer_sys::fuzz_target;
use radflux_cli::args::{parse_direction, parse_size, parse_subset, parse_vec3};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_vec3(text) {
        assert!(v.iter().all(|x| x.is_finite()));
    }
    if let Ok(d) = parse_direction(text) {
        assert!((d.as_vector().norm() - 1.0).abs() <= 1e-12);
    }
    if let Ok(h) = parse_size(text) {
        assert!(h.is_finite() && h > 0.0);
    }
    let _ = parse_subset(text);
});
