#![no_main]

use conifold_lab::cli::RunConfig;
use conifold_lab::config::parse_key_values;
use conifold_lab::gluing::GluingParams;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(entries) = parse_key_values(text) {
        for e in &entries {
            assert!(!e.key.is_empty() && !e.value.is_empty());
        }
    }
    if let Ok(params) = GluingParams::from_config_str(text) {
        assert_eq!(GluingParams::from_config_str(&params.to_config_string()).unwrap(), params);
        let _ = params.check_feasible();
    }
    if let Ok(config) = RunConfig::from_config_str(text) {
        assert!(config.validate().is_ok());
    }
});
