use thiserror::Error;

use super::Event;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

/// One event per line: `next`, `prev`, `anchor`, `recognized <phase>`,
/// `lost`, `togglewf`. Blank lines and `#` comments are skipped.
pub fn parse_script(text: &str) -> Result<Vec<Event>, ScriptError> {
    let mut events = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ScriptError { line: i + 1, message };
        let mut words = line.split_whitespace();
        let word = words.next().unwrap_or_default().to_ascii_lowercase();
        let event = match word.as_str() {
            "next" => Event::Next,
            "prev" => Event::Prev,
            "anchor" => Event::AnchorPlaced,
            "lost" => Event::TrackingLost,
            "togglewf" => Event::ToggleWireframe,
            "recognized" => {
                let arg = words.next().ok_or_else(|| err("`recognized` needs a phase id".into()))?;
                Event::TargetRecognized(arg.parse().map_err(|_| err(format!("invalid phase id `{arg}`")))?)
            }
            other => return Err(err(format!("unknown event `{other}`"))),
        };
        if let Some(extra) = words.next() {
            return Err(err(format!("unexpected `{extra}` after `{word}`")));
        }
        events.push(event);
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_event_kinds() {
        let text = "# walk\nanchor\nnext\n\nrecognized 2  # lock on\nlost\nTOGGLEWF\nprev\n";
        assert_eq!(
            parse_script(text).unwrap(),
            vec![
                Event::AnchorPlaced,
                Event::Next,
                Event::TargetRecognized(2),
                Event::TrackingLost,
                Event::ToggleWireframe,
                Event::Prev
            ]
        );
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(parse_script("next\njump\n").unwrap_err().line, 2);
        assert_eq!(parse_script("recognized\n").unwrap_err().line, 1);
        assert_eq!(parse_script("recognized x\n").unwrap_err().line, 1);
        assert_eq!(parse_script("next now\n").unwrap_err().line, 1);
    }
}
