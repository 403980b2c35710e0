#![no_main]

use libfuzzer_sys::fuzz_target;
use ra_bergman::quadrature::GridSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = GridSpec::from_json(text) {
        assert!(spec.radius > 0.0 && spec.n_r > 0);
    }
});
