#![no_main]

use crjet_core::{input, Error};
use libfuzzer_sys::fuzz_target;

const BASE: &str = "n = 1\ntrunc = 6\nphi = \"s*z1*c1\"\n";

fn load(rel: &str) -> Result<String, Error> {
    match rel {
        "m0.toml" => Ok(BASE.to_string()),
        _ => Err(Error::Io { path: rel.to_string(), msg: "not found".into() }),
    }
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mf) = input::parse_map(text, Some(6), load) {
        let _ = mf.map.maps_into();
    }
});
