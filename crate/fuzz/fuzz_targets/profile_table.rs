#![no_main]

use conifold_lab::cdlo::RadialProfile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(profile) = RadialProfile::from_table(text) {
        let (lo, hi) = profile.y_range();
        assert!(lo > 0.0 && hi > lo);
        for t in [0.0, 0.25, 0.5, 1.0] {
            let _ = profile.evaluate(lo + t * (hi - lo));
        }
        let _ = profile.evaluate(hi * 2.0);
        let _ = profile.is_positive();
    }
});
