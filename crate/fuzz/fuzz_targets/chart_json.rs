#![no_main]

use adams_core::chartio::{emit_json, emit_svg, emit_text, read_json, SvgStyle};
use libfuzzer_sys::fuzz_target;

// Anything read_json accepts must survive a round trip and render.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(chart) = read_json(text) else { return };
    let json = emit_json(&chart);
    assert_eq!(read_json(&json).unwrap(), chart);
    let _ = emit_text(&chart, 200);
    let _ = emit_svg(&chart, &SvgStyle::default());
});
