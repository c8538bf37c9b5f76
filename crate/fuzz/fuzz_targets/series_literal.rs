#![no_main]

use crjet_core::{parse_series, VarNames};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let names = VarNames::cr(2);
    if let Ok(s) = parse_series(text, &names, 6) {
        let printed = s.display_with(&names).to_string();
        let again = parse_series(&printed, &names, 6).expect("printed literal reparses");
        assert_eq!(again, s);
    }
});
