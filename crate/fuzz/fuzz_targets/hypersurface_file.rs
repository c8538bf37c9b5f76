#![no_main]

use crjet_core::input;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(hs) = input::parse_hypersurface(text, Some(6)) {
        let again = input::parse_hypersurface(&input::hypersurface_to_toml(&hs), None).expect("round trip");
        assert_eq!(again, hs);
    }
});
