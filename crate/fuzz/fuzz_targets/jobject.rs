#![no_main]

use libfuzzer_sys::fuzz_target;
use logthh_core::jcat::JObject;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(o) = JObject::parse(s) {
        assert_eq!(JObject::parse(&format!("{},{}", o.m1, o.m2)), Ok(o));
    }
});
