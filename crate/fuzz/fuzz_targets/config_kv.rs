#![no_main]

use libfuzzer_sys::fuzz_target;
use logthh_cli::config::CommonArgs;
use logthh_cli::{parse_config, RunConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(map) = parse_config(s) {
        let _ = RunConfig::resolve(&CommonArgs::default(), &map);
    }
});
