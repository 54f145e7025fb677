#![no_main]

use isac_clutter::harness::parse_sweep_file;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((cfg, spec)) = parse_sweep_file(text) {
        spec.validate().expect("parser returned an invalid sweep");
        // every axis value must map to a config or a clean error
        for &v in &spec.values {
            let _ = spec.axis.apply(&cfg, spec.delta_theta_deg, v);
        }
    }
});
