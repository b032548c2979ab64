#![no_main]

use adams_core::fpmod::{parse_mod, realize_to};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(pres) = parse_mod(text) else { return };
    if pres.gens.len() <= 8 && pres.gens.iter().all(|g| g.1.abs() <= 64) {
        let lo = pres.gens.iter().map(|g| g.1).min().unwrap_or(0);
        let _ = realize_to(&pres, lo + 24);
    }
});
