#![no_main]

use libfuzzer_sys::fuzz_target;
use ra_bergman::generator::Generator;
use ra_bergman::parse::{function_by_name, parse_complex, parse_complex_list, parse_list, parse_usize_list};
use ra_bergman::quadrature::Weight;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(z) = parse_complex(text) {
        assert!(z.re.is_finite() && z.im.is_finite());
    }
    if let Ok(v) = parse_list(text) {
        assert!(v.iter().all(|x| x.is_finite()));
    }
    let _ = parse_complex_list(text);
    let _ = parse_usize_list(text);
    let _ = Weight::parse(text);
    if text.len() < 64 {
        let gen = Generator::triple_sine(10.0).expect("generator");
        let _ = function_by_name(text, &gen);
    }
});
