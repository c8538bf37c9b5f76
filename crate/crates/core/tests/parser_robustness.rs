//! The fuzz target bodies, replayed on the checked-in seeds and on mutated
//! seeds. No input may panic; accepted input must round-trip.

use std::path::{Path, PathBuf};

use crjet_core::{input, parse_series, Error, VarNames};
use proptest::prelude::*;

fn seeds(target: &str) -> Vec<String> {
    let dir: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<String> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| std::fs::read_to_string(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn literal(text: &str) {
    let names = VarNames::cr(2);
    if let Ok(s) = parse_series(text, &names, 6) {
        let printed = s.display_with(&names).to_string();
        assert_eq!(parse_series(&printed, &names, 6).unwrap(), s, "{text:?}");
    }
}

fn hypersurface(text: &str) {
    if let Ok(hs) = input::parse_hypersurface(text, Some(6)) {
        let again = input::parse_hypersurface(&input::hypersurface_to_toml(&hs), None).unwrap();
        assert_eq!(again, hs, "{text:?}");
    }
}

fn load(rel: &str) -> Result<String, Error> {
    match rel {
        "m0.toml" => Ok("n = 1\ntrunc = 6\nphi = \"s*z1*c1\"\n".to_string()),
        _ => Err(Error::Io { path: rel.to_string(), msg: "not found".into() }),
    }
}

fn map(text: &str) {
    if let Ok(mf) = input::parse_map(text, Some(6), load) {
        let _ = mf.map.maps_into();
    }
}

fn bb(text: &str) {
    if let Ok(sys) = input::parse_bb(text, Some(4)) {
        let again = input::parse_bb(&input::bb_to_toml(&sys), None).unwrap();
        assert_eq!(again.f, sys.f, "{text:?}");
    }
}

fn prolong(text: &str) {
    if let Ok(ps) = input::parse_prolong(text, Some(3)) {
        if ps.jets.order <= 2 {
            input::parse_prolong(&input::prolong_to_toml(&ps), None).unwrap();
        }
    }
}

const TARGETS: [(&str, fn(&str)); 5] = [
    ("series_literal", literal),
    ("hypersurface_file", hypersurface),
    ("map_file", map),
    ("bb_file", bb),
    ("prolong_file", prolong),
];

#[test]
fn seeds_replay() {
    for (target, body) in TARGETS {
        for s in seeds(target) {
            body(&s);
        }
    }
}

#[test]
fn valid_seeds_are_accepted() {
    assert!(input::parse_hypersurface(&seeds("hypersurface_file").join(""), None).is_err());
    let ok = seeds("bb_file").iter().filter(|s| input::parse_bb(s, None).is_ok()).count();
    assert_eq!(ok, 4);
    let ok = seeds("map_file").iter().filter(|s| input::parse_map(s, None, load).is_ok()).count();
    assert!(ok >= 3);
}

/// Byte-level edits of a seed: delete, insert or replace at a position.
fn mutated(target: &'static str) -> impl Strategy<Value = String> {
    let seeds = seeds(target);
    let n = seeds.len();
    (0..n, prop::collection::vec((0usize..400, 0u8..3, prop::sample::select(b" =\"[]*^+-/.0123456789szcuwyt\n#ix".to_vec())), 1..5))
        .prop_map(move |(i, edits)| {
            let mut bytes = seeds[i].clone().into_bytes();
            for (pos, op, b) in edits {
                let p = if bytes.is_empty() { 0 } else { pos % (bytes.len() + 1) };
                match op {
                    0 if p < bytes.len() => {
                        bytes.remove(p);
                    }
                    1 => bytes.insert(p, b),
                    _ if p < bytes.len() => bytes[p] = b,
                    _ => bytes.push(b),
                }
            }
            String::from_utf8_lossy(&bytes).into_owned()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mutated_literals(s in mutated("series_literal")) { literal(&s); }

    #[test]
    fn mutated_hypersurfaces(s in mutated("hypersurface_file")) { hypersurface(&s); }

    #[test]
    fn mutated_maps(s in mutated("map_file")) { map(&s); }

    #[test]
    fn mutated_bb(s in mutated("bb_file")) { bb(&s); }

    #[test]
    fn mutated_prolong(s in mutated("prolong_file")) { prolong(&s); }

    #[test]
    fn arbitrary_text_never_panics(s in "\\PC{0,60}") {
        for (_, body) in TARGETS {
            body(&s);
        }
    }
}
