//! RIFF/WAVE reader and writer for 16-bit PCM.

use std::path::Path;

use thiserror::Error;

use crate::signal::RealSignal;

const FORMAT_PCM: u16 = 0x0001;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a RIFF file")]
    NotRiff,
    #[error("RIFF container is not WAVE")]
    NotWave,
    #[error("truncated {0}")]
    Truncated(&'static str),
    #[error("missing `{0}` chunk")]
    MissingChunk(&'static str),
    #[error("malformed fmt chunk: {0}")]
    MalformedFormat(&'static str),
    #[error("unsupported codec tag {0:#06x}, only PCM is supported")]
    UnsupportedCodec(u16),
    #[error("unsupported bit depth {0}, only 16-bit is supported")]
    UnsupportedBitDepth(u16),
    #[error("unsupported channel count {0}, expected mono or stereo")]
    UnsupportedChannels(u16),
    #[error("data chunk holds no samples")]
    Empty,
}

/// Decoded audio, downmixed to mono and scaled by `1/32768`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavAudio {
    pub signal: RealSignal,
    pub sample_rate: u32,
    pub channels: u16,
}

struct Format {
    channels: u16,
    sample_rate: u32,
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_format(body: &[u8]) -> Result<Format, WavError> {
    if body.len() < 16 {
        return Err(WavError::Truncated("fmt chunk"));
    }
    let mut codec = u16_at(body, 0);
    let channels = u16_at(body, 2);
    let sample_rate = u32_at(body, 4);
    let block_align = u16_at(body, 12);
    let bits = u16_at(body, 14);
    if codec == FORMAT_EXTENSIBLE {
        if body.len() < 26 {
            return Err(WavError::Truncated("extensible fmt chunk"));
        }
        codec = u16_at(body, 24);
    }
    if codec != FORMAT_PCM {
        return Err(WavError::UnsupportedCodec(codec));
    }
    if bits != 16 {
        return Err(WavError::UnsupportedBitDepth(bits));
    }
    if channels != 1 && channels != 2 {
        return Err(WavError::UnsupportedChannels(channels));
    }
    if block_align != 2 * channels {
        return Err(WavError::MalformedFormat(
            "block align does not match channels",
        ));
    }
    if sample_rate == 0 {
        return Err(WavError::MalformedFormat("zero sample rate"));
    }
    Ok(Format {
        channels,
        sample_rate,
    })
}

/// Parses a complete WAV file held in memory.
pub fn parse_wav(bytes: &[u8]) -> Result<WavAudio, WavError> {
    if bytes.len() < 4 || &bytes[0..4] != b"RIFF" {
        return Err(WavError::NotRiff);
    }
    if bytes.len() < 12 {
        return Err(WavError::Truncated("RIFF header"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(WavError::NotWave);
    }

    let mut format = None;
    let mut data = None;
    let mut pos = 12usize;
    while pos < bytes.len() {
        if bytes.len() - pos < 8 {
            return Err(WavError::Truncated("chunk header"));
        }
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let start = pos + 8;
        let end = start
            .checked_add(size)
            .filter(|&e| e <= bytes.len())
            .ok_or(if id == b"data" {
                WavError::Truncated("data chunk")
            } else {
                WavError::Truncated("chunk body")
            })?;
        match id {
            b"fmt " if format.is_none() => format = Some(parse_format(&bytes[start..end])?),
            b"data" if data.is_none() => data = Some(&bytes[start..end]),
            _ => {}
        }
        // Chunks are padded to even sizes.
        pos = end + (size & 1);
    }

    let format = format.ok_or(WavError::MissingChunk("fmt "))?;
    let data = data.ok_or(WavError::MissingChunk("data"))?;
    let frame = 2 * format.channels as usize;
    if data.len() % frame != 0 {
        return Err(WavError::Truncated("sample frame"));
    }
    if data.is_empty() {
        return Err(WavError::Empty);
    }
    let samples: Vec<f64> = data
        .chunks_exact(frame)
        .map(|f| {
            let sum: f64 = f
                .chunks_exact(2)
                .map(|s| i16::from_le_bytes([s[0], s[1]]) as f64)
                .sum();
            sum / format.channels as f64 / 32768.0
        })
        .collect();
    Ok(WavAudio {
        signal: RealSignal::new(samples).map_err(|_| WavError::Empty)?,
        sample_rate: format.sample_rate,
        channels: format.channels,
    })
}

pub fn load_wav(path: impl AsRef<Path>) -> Result<WavAudio, WavError> {
    parse_wav(&std::fs::read(path)?)
}

/// Encodes mono 16-bit PCM; samples are clamped to `[-1, 32767/32768]`.
pub fn encode_wav(samples: &[f64], sample_rate: u32) -> Vec<u8> {
    let data_len = samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in samples {
        let q = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    out
}

pub fn write_wav(path: impl AsRef<Path>, samples: &[f64], sample_rate: u32) -> std::io::Result<()> {
    std::fs::write(path, encode_wav(samples, sample_rate))
}
