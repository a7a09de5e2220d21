#![no_main]

use libfuzzer_sys::fuzz_target;
use tracesim::io::GraphSpec;

// Parsing and printing only; generation is far too slow for fuzzing.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = text.parse::<GraphSpec>() {
        let again: GraphSpec = spec.to_string().parse().unwrap();
        assert_eq!(again, spec);
    }
});
