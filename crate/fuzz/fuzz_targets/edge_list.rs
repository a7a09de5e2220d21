#![no_main]

use libfuzzer_sys::fuzz_target;
use tracesim::io::{parse_edge_list, parse_edge_list_with_limit, write_edge_list};

// A small vertex cap keeps huge labels from turning into huge allocations.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(g) = parse_edge_list_with_limit(text, 1 << 12) else {
        return;
    };
    let mut out = Vec::new();
    write_edge_list(&g, &mut out).unwrap();
    let back = parse_edge_list(std::str::from_utf8(&out).unwrap()).unwrap();
    assert_eq!(back, g);
});
