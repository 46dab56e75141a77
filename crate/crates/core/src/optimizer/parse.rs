//! Response parsing: tag extraction and fenced-code recovery.

use thiserror::Error;

use crate::reward::matches_response_format;

/// A parsed optimizer response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedResponse {
    pub thinking: String,
    pub solution_body: String,
    /// The runnable payload: the first fenced block of the solution body,
    /// else the whole body trimmed, else the first fenced block anywhere.
    pub code: String,
    /// Mirrors a format reward of +1.
    pub format_ok: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("response contains no extractable code")]
    NoCodeFound,
}

fn extract_between<'a>(text: &'a str, open: &str, close: &str, last_close: bool) -> Option<&'a str> {
    let start = text.find(open)? + open.len();
    let rest = &text[start..];
    let end = if last_close { rest.rfind(close)? } else { rest.find(close)? };
    Some(&rest[..end])
}

/// First markdown-fenced block; the info string after the opening fence is
/// dropped. An unclosed fence extends to the end of the text.
pub fn extract_fenced_code(text: &str) -> Option<String> {
    let open = text.find("```")?;
    let after_fence = &text[open + 3..];
    let body_start = after_fence.find('\n').map(|i| i + 1).unwrap_or(after_fence.len());
    let body = &after_fence[body_start..];
    let code = match body.find("```") {
        Some(end) => &body[..end],
        None => body,
    };
    Some(code.strip_suffix('\n').unwrap_or(code).to_string())
}

/// Extracts thinking/solution bodies and the code payload. Falls back to the
/// first fenced block anywhere when the tags are absent or empty; a response
/// with neither tags nor fences has no code.
pub fn parse_response(response: &str) -> Result<ParsedResponse, ParseError> {
    let format_ok = matches_response_format(response);
    let thinking = extract_between(response, "<thinking>", "</thinking>", false)
        .unwrap_or_default()
        .to_string();

    if let Some(solution_body) = extract_between(response, "<solution>", "</solution>", true) {
        let code = extract_fenced_code(solution_body)
            .unwrap_or_else(|| solution_body.trim().to_string());
        if !code.is_empty() {
            return Ok(ParsedResponse {
                thinking,
                solution_body: solution_body.to_string(),
                code,
                format_ok,
            });
        }
    }

    match extract_fenced_code(response) {
        Some(code) if !code.trim().is_empty() => Ok(ParsedResponse {
            thinking,
            solution_body: String::new(),
            code,
            format_ok: false,
        }),
        _ => Err(ParseError::NoCodeFound),
    }
}
