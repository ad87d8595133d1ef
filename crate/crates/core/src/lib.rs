//! Lexicon-constrained Viterbi decoding of letter-HMM observation sequences.
//!
//! A word list is compiled into a minimal node automaton (letters on nodes,
//! one shared sink), every full path gets a dense index through per-arc
//! increments, and the automaton is expanded into a flat HMM by substituting
//! one left-to-right letter model per letter node. The decoders then pass
//! tokens carrying a score and a path index, so the winning word falls out of
//! the final token without any back-pointers.
//!
//! Everything numeric is generic over [`LogScore`]; the aliases at the crate
//! root fix the scalar for the common cases.

pub mod automaton;
pub mod decoder;
pub mod error;
pub mod letter_hmm;
pub mod lexicon;
pub mod lexicon_hmm;
pub mod oracle;
pub mod pph;
pub mod score;
pub mod workbench;

pub use automaton::{
    build_dawg, build_trie, minimize, AutomatonStats, NodeAutomaton, NodeId, NodeLabel,
};
pub use decoder::{decode, Counters, DecodeResult, Hypothesis, MergeRule, Token, Variant};
pub use error::{Error, Result};
pub use letter_hmm::{Alphabet, HmmConfig, LetterHmm, LetterModels, ObservationSequence, Routing};
pub use lexicon::Lexicon;
pub use lexicon_hmm::{DecodeStats, LexiconHmm};
pub use pph::{Pph, PphCoding};
pub use score::{FixedLog, LogScore};

pub type LexiconHmmF64 = LexiconHmm<f64>;
pub type LexiconHmmF32 = LexiconHmm<f32>;
pub type LexiconHmmExact = LexiconHmm<FixedLog>;
pub type LetterModelsF64 = LetterModels<f64>;
pub type LetterModelsF32 = LetterModels<f32>;
pub type LetterModelsExact = LetterModels<FixedLog>;
pub type DecodeResultF64 = DecodeResult<f64>;
pub type DecodeResultExact = DecodeResult<FixedLog>;
