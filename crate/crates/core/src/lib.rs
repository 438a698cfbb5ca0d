//! Joint linear-programming decoding of binary LDPC codes over finite-state
//! intersymbol-interference channels.
//!
//! The crate is organized the way a decode flows:
//!
//! * [`channel`] describes a finite-state channel and samples its output.
//! * [`trellis`] unrolls a channel over a block, computes branch costs and
//!   runs the Viterbi reference decoder.
//! * [`code`] holds parity-check codes, their local codeword polytopes and
//!   the alist format.
//! * [`lp`] assembles and solves the trellis-only and joint LPs and
//!   classifies the optimal vertex.
//! * [`pcw`] turns decoder failures into generalized distances and a
//!   (truncated) union bound.
//! * [`jimpd`] is the turbo-equalization baseline.
//! * [`sim`] drives seeded Monte-Carlo experiments.

pub mod channel;
pub mod code;
pub mod config;
pub mod error;
pub mod jimpd;
pub mod lp;
pub mod pcw;
pub mod sim;
pub mod trellis;

pub use channel::{ChannelModel, InitialState, Transition};
pub use code::ParityCheckCode;
pub use error::{Error, ErrorCategory, Result};
pub use lp::{DecodeOutcome, EdgeFlow, JointDecoder, OutcomeKind};
pub use pcw::{DistanceSpectrum, PcwRecord};
pub use trellis::{BranchCosts, CostMode, Trellis};
