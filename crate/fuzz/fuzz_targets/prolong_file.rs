#![no_main]

use crjet_core::input;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ps) = input::parse_prolong(text, Some(3)) {
        if ps.jets.order <= 2 {
            let _ = input::parse_prolong(&input::prolong_to_toml(&ps), None).expect("round trip");
        }
    }
});
