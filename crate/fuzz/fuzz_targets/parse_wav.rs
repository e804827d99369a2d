#![no_main]

use fourier_inpaint::harness::wav::parse_wav;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(audio) = parse_wav(data) {
        assert!(audio
            .signal
            .samples()
            .iter()
            .all(|s| (-1.0..1.0).contains(s)));
        assert!(audio.channels == 1 || audio.channels == 2);
    }
});
