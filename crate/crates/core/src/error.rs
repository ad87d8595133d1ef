use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lexicon is empty")]
    EmptyLexicon,

    #[error("empty word in lexicon")]
    EmptyWord,

    #[error("word {0:?} contains whitespace")]
    InvalidWord(String),

    #[error("malformed automaton: {0}")]
    Structure(String),

    #[error("automaton contains a cycle through node {0}")]
    Cycle(usize),

    #[error("path count overflows the path-index width ({0} paths)")]
    PathCountOverflow(String),

    #[error("path is not in the automaton: {0}")]
    PathNotInAutomaton(String),

    #[error("path index {value} out of range for {words} words")]
    PathIndexOutOfRange { value: u64, words: u64 },

    #[error("invalid HMM configuration: {0}")]
    Config(String),

    #[error("symbol {0:?} is not in the observation alphabet")]
    UnknownSymbol(String),

    #[error("no letter model for {0:?}")]
    MissingLetterModel(char),

    #[error("path-index annotation does not match the automaton: {0}")]
    Annotation(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
