use rfeig::Error as CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 3 for anything wrong with the inputs, 4 for failures of the numerics.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Core(e) => match e {
                CoreError::Parse { .. }
                | CoreError::Io { .. }
                | CoreError::Dimension(_)
                | CoreError::InvalidArgument(_)
                | CoreError::InvalidMatrix(_)
                | CoreError::Serialize(_) => EXIT_INPUT,
                _ => EXIT_NUMERICAL,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
