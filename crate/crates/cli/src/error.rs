use std::fmt;

use rxnmine::bootstrap::BootstrapError;
use rxnmine::corpus::CorpusError;
use rxnmine::extractor::ExtractorError;
use rxnmine::pattern::PatternError;
use rxnmine::pipeline::PipelineError;
use rxnmine::supervision::SupervisionError;
use serde::Serialize;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Exit {
    Usage = 2,
    Data = 3,
    State = 4,
}

/// A failed command: a stable code name, a human detail, and the exit
/// class. Printed on stderr as one JSON line and sent as the HTTP error
/// body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliError {
    #[serde(rename = "error")]
    pub code: &'static str,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pending: Vec<String>,
    #[serde(skip)]
    pub exit: Exit,
}

impl CliError {
    pub fn new(code: &'static str, exit: Exit, detail: impl Into<String>) -> CliError {
        CliError { code, detail: detail.into(), pending: Vec::new(), exit }
    }

    pub fn usage(detail: impl Into<String>) -> CliError {
        CliError::new("Usage", Exit::Usage, detail)
    }

    pub fn missing_file(path: &std::path::Path) -> CliError {
        CliError::new("MissingFile", Exit::Data, format!("{} does not exist", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

impl std::error::Error for CliError {}

impl From<BootstrapError> for CliError {
    fn from(e: BootstrapError) -> CliError {
        let detail = e.to_string();
        let (code, exit) = match e {
            BootstrapError::Corpus(e) => return e.into(),
            BootstrapError::Pattern(e) => return e.into(),
            BootstrapError::Extractor(e) => return e.into(),
            BootstrapError::Supervision(e) => return e.into(),
            BootstrapError::Io(e) => return e.into(),
            BootstrapError::PendingDecisions(ids) => {
                return CliError { pending: ids, ..CliError::new("PendingDecisions", Exit::State, detail) }
            }
            BootstrapError::EmptyCorpus => ("EmptyCorpus", Exit::Data),
            BootstrapError::NoPatterns => ("NoPatterns", Exit::State),
            BootstrapError::UnknownCandidate(_) => ("UnknownCandidate", Exit::Data),
            BootstrapError::UnknownIteration(_) => ("UnknownIteration", Exit::State),
            BootstrapError::AlreadyFinalized(_) => ("AlreadyFinalized", Exit::State),
            BootstrapError::ConflictingDecision { .. } => ("ConflictingDecision", Exit::State),
            BootstrapError::NotFinalized(_) => ("NotFinalized", Exit::State),
            BootstrapError::Locked(_) => ("Locked", Exit::State),
            BootstrapError::InvalidConfig(_) => ("InvalidConfig", Exit::Usage),
            BootstrapError::Parse { .. } => ("Parse", Exit::Data),
        };
        CliError::new(code, exit, detail)
    }
}

impl From<ExtractorError> for CliError {
    fn from(e: ExtractorError) -> CliError {
        let (code, exit) = match &e {
            ExtractorError::UntrainedRole(_) => ("UntrainedRole", Exit::State),
            ExtractorError::MissingCondition(_) => ("MissingCondition", Exit::Data),
            ExtractorError::EmptyTrainingSet => ("EmptyTrainingSet", Exit::Data),
            ExtractorError::MissingDocument(_) => ("MissingDocument", Exit::Data),
            ExtractorError::InvalidThreshold(_) => ("InvalidConfig", Exit::Usage),
            ExtractorError::Parse(_) => ("Parse", Exit::Data),
            ExtractorError::Io(_) => ("Io", Exit::Data),
        };
        CliError::new(code, exit, e.to_string())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> CliError {
        let code = match &e {
            CorpusError::Io(_) => "Io",
            CorpusError::DuplicateId(_) => "DuplicateId",
            _ => "Parse",
        };
        CliError::new(code, Exit::Data, e.to_string())
    }
}

impl From<PatternError> for CliError {
    fn from(e: PatternError) -> CliError {
        let code = match &e {
            PatternError::InvalidRange { .. } => "InvalidRange",
            _ => "Pattern",
        };
        CliError::new(code, Exit::Data, e.to_string())
    }
}

impl From<SupervisionError> for CliError {
    fn from(e: SupervisionError) -> CliError {
        let code = match &e {
            SupervisionError::Io(_) => "Io",
            SupervisionError::ConflictingContext(_) => "ConflictingContext",
            SupervisionError::Parse { .. } => "Parse",
        };
        CliError::new(code, Exit::Data, e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> CliError {
        match e {
            PipelineError::Extractor(e) => e.into(),
            PipelineError::Io(e) => e.into(),
            PipelineError::Parse { .. } => CliError::new("Parse", Exit::Data, e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::new("Io", Exit::Data, e.to_string())
    }
}
