#![no_main]

use libfuzzer_sys::fuzz_target;
use logthh_core::galg::{parse_expr, FreeGCA};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    // A line `=expr` after the JSON exercises the expression parser too.
    let (json, expr) = s.split_once("\n=").unwrap_or((s, ""));
    let _ = FreeGCA::from_json(json);
    let _ = parse_expr(expr);
});
