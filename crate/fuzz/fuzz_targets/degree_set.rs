#![no_main]

use libfuzzer_sys::fuzz_target;
use logthh_core::monoid::DegreeSet;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(d) = DegreeSet::parse(s) {
        if let (Some(lo), Some(hi)) = (d.min(), d.max()) {
            assert!(lo <= hi && d.contains(lo) && d.contains(hi));
        }
    }
});
