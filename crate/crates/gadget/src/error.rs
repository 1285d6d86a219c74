use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: empty dataset")]
    EmptyDataset { path: PathBuf },
    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error("empty trace")]
    EmptyTrace,
    #[error(transparent)]
    Core(#[from] gadget_core::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Attaches the file being read to a content error.
    pub(crate) fn in_file(path: &Path) -> impl FnOnce(Error) -> Error + '_ {
        move |e| Error::InFile { path: path.to_path_buf(), source: Box::new(e) }
    }

    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { key: key.into(), msg: msg.into() }
    }
}
