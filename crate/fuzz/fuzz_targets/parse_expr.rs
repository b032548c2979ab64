#![no_main]

use adams_core::steenrod::{parse_expr, Profile};
use libfuzzer_sys::fuzz_target;

// First byte picks the algebra, the rest is the expression.
fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let (p, name) = [(2, "A(1)"), (2, "A(2)"), (3, "E(1)"), (3, "A(1)")][sel as usize % 4];
    let profile = Profile::named(p, name).unwrap();
    let _ = parse_expr(text, &profile);
});
