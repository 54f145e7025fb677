#![no_main]

use isac_clutter::scene::ScenarioConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ScenarioConfig::from_toml_str(text) {
        // accepted configs are valid and derive a layout
        cfg.validate().expect("parser returned an invalid config");
        let _ = cfg.layout();
        let _ = cfg.range_bin_width();
    }
});
