use serde::{Deserialize, Serialize};

use super::RecommenderError;

pub const SYSTEM_PROMPT: &str =
    "You are a scrum master, skilled in creating better User Stories for agile software projects";
pub const USER_PREFIX: &str = "How can I improve this user story: ";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

/// Chat-completions request body. Sampling parameters are left to the server.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
}

/// Builds the two-message improvement prompt. The story is appended to the
/// user prefix verbatim, whitespace included.
pub fn build_prompt(model: &str, story_text: &str) -> Result<ChatRequest, RecommenderError> {
    if story_text.trim().is_empty() {
        return Err(RecommenderError::EmptyText);
    }
    Ok(ChatRequest {
        model: model.to_owned(),
        messages: vec![
            ChatMessage { role: "system".into(), content: SYSTEM_PROMPT.into() },
            ChatMessage { role: "user".into(), content: format!("{USER_PREFIX}{story_text}") },
        ],
    })
}
