//! Fact streams, synthetic data and theory files.

mod stream;
mod synth;
mod theory;

pub use stream::{read_stream, window_frames, write_frames, Frame, StreamReader, Windower, DEFAULT_SKEW};
pub use synth::{generate_synthetic, theory_target, NoiseSpec, SynthConfig, SyntheticStream};
pub use theory::{parse_theory, render_theory, write_theory};
