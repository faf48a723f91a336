use std::path::Path;

use exemplar_core::corpus::CorpusMode;
use exemplar_core::formats::parse_key_values;
use exemplar_core::model::{ExemplarMode, ModelConfig};

use crate::error::{CliError, Result};

/// Settings shared by every stage: the model configuration plus the corpus
/// and exemplar modes.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub mode: CorpusMode,
    pub exemplar: ExemplarMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { model: ModelConfig::default(), mode: CorpusMode::Standard, exemplar: ExemplarMode::Retrieved }
    }
}

impl RunConfig {
    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mode" => self.mode = value.parse().map_err(CliError::Usage)?,
            "exemplar" => self.exemplar = value.parse()?,
            _ => {
                if !self.model.set(key, value)? {
                    return Err(CliError::Usage(format!("unknown setting `{key}`")));
                }
            }
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let pairs = parse_key_values(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        for (k, v) in pairs {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut pairs =
            vec![("mode".to_string(), self.mode.to_string()), ("exemplar".to_string(), self.exemplar.to_string())];
        pairs.extend(self.model.to_pairs());
        pairs
    }

    pub fn validate(&self) -> Result<()> {
        Ok(self.model.validate()?)
    }
}
