//! Surface-group words, Dehn reduction, exact ball enumeration and the
//! shortlex coding automaton.

pub mod automaton;
pub mod ball;
pub mod dehn;
pub mod word;

pub use automaton::{validate_automaton, AutomatonReport, CodingAutomaton};
pub use ball::{sphere_sizes, Ball};
pub use dehn::DehnReducer;
pub use word::{format_word, inverse, parse_word, symbol, Gen, GroupPresentation, Word};
