#![no_main]

use libfuzzer_sys::fuzz_target;
use tracesim::io::{ExperimentConfig, RawConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(raw) = RawConfig::parse(text) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::from_raw(&raw) {
        let again = ExperimentConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(again, cfg);
    }
});
