#![no_main]

use fourier_inpaint::harness::config::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = ExperimentConfig::parse(text) {
            assert!(cfg.validate().is_ok());
            for &len in &cfg.lengths {
                for &f in &cfg.fractions {
                    let d = ExperimentConfig::gap_len(len, f);
                    assert!(d >= 1 && d <= len);
                }
            }
        }
    }
});
