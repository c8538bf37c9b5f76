#![no_main]

use crjet_core::input;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sys) = input::parse_bb(text, Some(4)) {
        let again = input::parse_bb(&input::bb_to_toml(&sys), None).expect("round trip");
        assert_eq!(again.f, sys.f);
    }
});
