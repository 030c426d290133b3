//! MLS: a small R-like language with lexical environments, lazy promises,
//! copy-on-modify values, three object systems and a purity analyzer.

mod builtins;
pub mod env;
pub mod error;
pub mod eval;
pub mod format;
pub mod module;
pub mod par;
pub mod purity;
pub mod reader;
pub mod refclass;
pub mod rng;
pub mod s3;
pub mod s4;
pub mod sweep;
pub mod value;

pub use builtins::builtin_names;
pub use env::{Binding, EnvRef, FrameSnapshot, Promise};
pub use error::{EvalError, MlsError};
pub use eval::{Interpreter, SharedBuffer};
pub use module::ModuleUnit;
pub use par::Strategy;
pub use value::{Data, Kind, Value};
