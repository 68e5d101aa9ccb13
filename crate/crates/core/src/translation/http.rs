//! Client for the `/translate` wire protocol.

use std::time::Duration;

use super::{
    BatchLimits, TranslationBackend, TranslationError, TranslationRequest, TranslationResponse,
};

/// `POST {endpoint}/translate` with a JSON [`TranslationRequest`]; expects
/// status 200 and a JSON [`TranslationResponse`] of the same length.
#[derive(Debug)]
pub struct HttpBackend {
    endpoint: String,
    url: String,
    agent: ureq::Agent,
    limits: BatchLimits,
}

impl HttpBackend {
    pub fn new(endpoint: impl Into<String>, timeout: Duration, limits: BatchLimits) -> Self {
        let endpoint = endpoint.into();
        let url = format!("{}/translate", endpoint.trim_end_matches('/'));
        let agent = ureq::AgentBuilder::new().timeout(timeout).build();
        HttpBackend {
            endpoint,
            url,
            agent,
            limits,
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }
}

fn is_timeout(err: &ureq::Transport) -> bool {
    let mut source: Option<&(dyn std::error::Error + 'static)> = std::error::Error::source(err);
    while let Some(e) = source {
        if let Some(io) = e.downcast_ref::<std::io::Error>() {
            if matches!(
                io.kind(),
                std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock
            ) {
                return true;
            }
        }
        source = e.source();
    }
    err.to_string().contains("timed out")
}

impl TranslationBackend for HttpBackend {
    fn id(&self) -> &str {
        &self.endpoint
    }

    fn limits(&self) -> BatchLimits {
        self.limits
    }

    fn translate_batch(
        &self,
        request: &TranslationRequest,
    ) -> Result<TranslationResponse, TranslationError> {
        let response = match self.agent.post(&self.url).send_json(request) {
            Ok(r) => r,
            Err(ureq::Error::Status(code, r)) => {
                let body = r.into_string().unwrap_or_default();
                return Err(TranslationError::BackendProtocolError(format!(
                    "HTTP {code}: {}",
                    body.trim()
                )));
            }
            Err(ureq::Error::Transport(t)) => {
                return Err(if is_timeout(&t) {
                    TranslationError::Timeout(t.to_string())
                } else {
                    TranslationError::BackendUnavailable(t.to_string())
                })
            }
        };
        if response.status() != 200 {
            return Err(TranslationError::BackendProtocolError(format!(
                "HTTP {}",
                response.status()
            )));
        }
        let body: TranslationResponse = response.into_json().map_err(|e| {
            if e.kind() == std::io::ErrorKind::TimedOut {
                TranslationError::Timeout(e.to_string())
            } else {
                TranslationError::BackendProtocolError(format!("bad response body: {e}"))
            }
        })?;
        if body.translations.len() != request.texts.len() {
            return Err(TranslationError::BackendProtocolError(format!(
                "sent {} texts, received {} translations",
                request.texts.len(),
                body.translations.len()
            )));
        }
        Ok(body)
    }
}
