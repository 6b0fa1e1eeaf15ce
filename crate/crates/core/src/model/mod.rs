//! System model: array geometry, OFDM framing, the frequency-selective MIMO
//! channel and the time/frequency covariance relations.

mod array;
mod channel;
mod config;
mod covariance;
mod ofdm;
mod precoder;

pub use array::ArrayGeometry;
pub use channel::{ChannelFile, FreqChannel};
pub use config::SystemConfig;
pub use covariance::CovarianceSet;
pub use ofdm::{demodulate, modulate_frame, propagate_stream, propagate_time, OfdmFrame, ReceivedSignal};
pub use precoder::{receive_freq, PrecoderSet};

/// Converts an SNR in dB to a noise variance under unit transmit power.
pub fn noise_var_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}
