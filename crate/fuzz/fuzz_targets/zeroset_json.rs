#![no_main]

use libfuzzer_sys::fuzz_target;
use ra_bergman::generator::ZeroSet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(set) = ZeroSet::from_json(text) {
        let again = ZeroSet::from_json(&set.to_json()).expect("written zero sets parse");
        assert_eq!(again.points(), set.points());
    }
});
