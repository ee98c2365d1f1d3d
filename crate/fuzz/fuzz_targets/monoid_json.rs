#![no_main]

use libfuzzer_sys::fuzz_target;
use logthh_core::monoid::GradedCommMonoid;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(m) = GradedCommMonoid::from_json(s) {
        // Accepted specs round-trip.
        assert_eq!(GradedCommMonoid::from_json(&m.to_json()).as_ref(), Ok(&m));
    }
});
