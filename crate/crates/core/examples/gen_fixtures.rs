//! Regenerates the bundled WAV fixtures under `tests/fixtures/wav`.
//!
//! Each file is a short speech-like utterance at 16 kHz: voiced syllables
//! from a glottal pulse train through three formant resonators, separated by
//! pauses and unvoiced noise bursts, over a low background noise floor.
//!
//! ```text
//! cargo run -p fourier-inpaint --example gen_fixtures [out_dir]
//! ```

use std::f64::consts::PI;
use std::path::PathBuf;

use fourier_inpaint::harness::wav::write_wav;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const RATE: u32 = 16_000;
const DURATION: f64 = 0.75;
// about -55 dB below the peak, like a quiet room recording
const NOISE_FLOOR: f64 = 0.001;

// (F1, F2, F3) in Hz
const VOWELS: [[f64; 3]; 5] = [
    [730.0, 1090.0, 2440.0],
    [270.0, 2290.0, 3010.0],
    [530.0, 1840.0, 2480.0],
    [300.0, 870.0, 2240.0],
    [570.0, 840.0, 2410.0],
];

struct Resonator {
    a1: f64,
    a2: f64,
    gain: f64,
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new(freq: f64, bandwidth: f64) -> Self {
        let r = (-PI * bandwidth / RATE as f64).exp();
        let theta = 2.0 * PI * freq / RATE as f64;
        Resonator {
            a1: 2.0 * r * theta.cos(),
            a2: -r * r,
            gain: 1.0 - r,
            y1: 0.0,
            y2: 0.0,
        }
    }

    fn step(&mut self, x: f64) -> f64 {
        let y = self.gain * x + self.a1 * self.y1 + self.a2 * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

fn utterance(index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + index as u64);
    let n = (DURATION * RATE as f64) as usize;
    let mut out = vec![0.0; n];
    let base_f0 = rng.random_range(95.0..220.0);

    let mut t = (0.03 * RATE as f64) as usize;
    let mut syllable = 0;
    while t < n {
        let voiced_len = (rng.random_range(0.10..0.22) * RATE as f64) as usize;
        let formants = VOWELS[(index + syllable) % VOWELS.len()];
        let mut filters: Vec<Resonator> = formants
            .iter()
            .zip([80.0, 110.0, 160.0])
            .map(|(&f, bw)| Resonator::new(f, bw))
            .collect();
        let mut phase = 0.0;
        for k in 0..voiced_len.min(n - t) {
            let pos = k as f64 / voiced_len as f64;
            let f0 = base_f0 * (1.0 + 0.08 * (PI * pos).sin() - 0.05 * pos);
            phase += f0 / RATE as f64;
            let pulse = if phase >= 1.0 {
                phase -= 1.0;
                1.0
            } else {
                0.0
            };
            let noise: f64 = StandardNormal.sample(&mut rng);
            let excitation = pulse + 0.02 * noise;
            let y: f64 = filters.iter_mut().map(|r| r.step(excitation)).sum();
            let envelope = (PI * pos).sin().powf(0.6);
            out[t + k] += envelope * y;
        }
        t += voiced_len;

        // unvoiced burst or pause
        let gap_len = (rng.random_range(0.04..0.12) * RATE as f64) as usize;
        if rng.random_bool(0.5) {
            let mut prev = 0.0;
            for k in 0..gap_len.min(n.saturating_sub(t)) {
                let w: f64 = StandardNormal.sample(&mut rng);
                let hp = w - prev;
                prev = w;
                let pos = k as f64 / gap_len as f64;
                out[t + k] += 0.01 * (PI * pos).sin() * hp;
            }
        }
        t += gap_len;
        syllable += 1;
    }

    let peak = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    out.iter()
        .map(|v| {
            let floor: f64 = StandardNormal.sample(&mut rng);
            0.7 * v / peak + NOISE_FLOOR * floor
        })
        .collect()
}

fn main() -> std::io::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/wav"));
    std::fs::create_dir_all(&dir)?;
    for i in 0..5 {
        let path = dir.join(format!("utterance_{:02}.wav", i + 1));
        write_wav(&path, &utterance(i), RATE)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
