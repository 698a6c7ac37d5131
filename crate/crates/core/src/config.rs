//! `key = value` configuration files shared by the planner and the tracker.

use thiserror::Error;

use crate::sequencer::SequencerConfig;
use crate::tracking::TrackerParams;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

/// Apply one setting to whichever parameter sets know the key; `t_max` and
/// `resolution` are shared by both.
pub fn apply_setting(
    key: &str,
    value: &str,
    sequencer: &mut SequencerConfig,
    tracker: &mut TrackerParams,
) -> Result<(), String> {
    let a = sequencer.set(key, value).map_err(|e| e.to_string())?;
    let b = tracker.set(key, value).map_err(|e| e.to_string())?;
    if a || b {
        Ok(())
    } else {
        Err(format!("unknown key `{}`", key.trim()))
    }
}

/// Blank lines and `#` comments are ignored.
pub fn parse_config(text: &str, sequencer: &mut SequencerConfig, tracker: &mut TrackerParams) -> Result<(), ConfigError> {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError { line: i + 1, message };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
        apply_setting(key, value, sequencer, tracker).map_err(err)?;
    }
    Ok(())
}
