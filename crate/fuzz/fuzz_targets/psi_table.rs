#![no_main]

use conifold_lab::solver::RadialFunction;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = RadialFunction::from_table(text) {
        assert!(!f.r.is_empty() && f.r.len() == f.values.len());
        assert!(f.r.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(RadialFunction::from_table(&f.to_table()).unwrap(), f);
    }
});
