use std::time::Duration;

use futures::stream::{self, StreamExt, TryStreamExt};

use super::parse::{parse_reply, validate_plot};
use super::pool::{IdeaPool, PlotIdea};
use super::prompt::{build_generation_prompt, CountStyle};
use super::provider::{ChatRequest, TextGenerator};
use super::{GenerationError, GenerationParams};
use crate::persona::PersonaDescription;

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    /// Extra plots requested beyond `n`; the surplus is discarded.
    pub extra: usize,
    pub count_style: CountStyle,
    /// Delay before the first retry; doubles on each further retry.
    pub backoff: Duration,
    /// Personas generated at the same time by [`generate_pool`].
    pub concurrency: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            extra: 1,
            count_style: CountStyle::Words,
            backoff: Duration::from_millis(500),
            concurrency: 4,
        }
    }
}

/// Requests `n + extra` plots and keeps the first `n` that validate,
/// regenerating the whole batch on failure within the retry budget.
pub async fn generate_plots(
    persona: &PersonaDescription,
    n: usize,
    provider: &dyn TextGenerator,
    params: &GenerationParams,
    options: &GenerateOptions,
) -> Result<Vec<PlotIdea>, GenerationError> {
    params.validate()?;
    if n == 0 {
        return Err(GenerationError::InvalidParams("n must be at least 1".into()));
    }
    let bundle = build_generation_prompt(persona, n + options.extra, options.count_style);
    let request = ChatRequest {
        system: bundle.system,
        user: bundle.user,
        params: params.clone(),
        expected_items: bundle.count,
    };
    let banned = [persona.spec.name.as_str()];
    let mut best = 0;
    let mut last_error = None;
    for attempt in 0..=params.retry_budget {
        if attempt > 0 {
            let delay = options.backoff * 2u32.saturating_pow(attempt - 1);
            tracing::debug!(persona = %persona.spec.id, attempt, ?delay, "retrying generation");
            tokio::time::sleep(delay).await;
        }
        let reply = match provider.complete(&request).await {
            Ok(r) => r,
            Err(e) => {
                tracing::warn!(persona = %persona.spec.id, error = %e, "generation call failed");
                last_error = Some(e);
                continue;
            }
        };
        let valid: Vec<_> = parse_reply(&reply)
            .iter()
            .filter_map(|c| validate_plot(c, &banned).ok())
            .take(n)
            .collect();
        if valid.len() == n {
            return Ok(valid
                .into_iter()
                .enumerate()
                .map(|(i, v)| PlotIdea {
                    id: format!("{}-{:02}", persona.spec.id, i + 1),
                    persona_id: persona.spec.id.clone(),
                    text: v.text,
                    sentence_count: v.sentence_count,
                    created_with: Some(params.clone()),
                })
                .collect());
        }
        best = best.max(valid.len());
        last_error = None;
    }
    Err(last_error.unwrap_or(GenerationError::Insufficient {
        got: best,
        needed: n,
        attempts: params.retry_budget + 1,
    }))
}

/// Generates `per_persona` plots for every persona, several personas at a
/// time, and assembles them in persona order.
pub async fn generate_pool(
    personas: &[PersonaDescription],
    per_persona: usize,
    provider: &dyn TextGenerator,
    params: &GenerationParams,
    options: &GenerateOptions,
) -> Result<IdeaPool, GenerationError> {
    let batches: Vec<Vec<PlotIdea>> = stream::iter(personas)
        .map(|p| generate_plots(p, per_persona, provider, params, options))
        .buffered(options.concurrency.max(1))
        .try_collect()
        .await?;
    let ideas = batches.into_iter().flatten().collect();
    IdeaPool::new(ideas).map_err(|e| GenerationError::Provider(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideas::MockGenerator;
    use crate::persona::load_fixture_personas;

    fn fast() -> GenerateOptions {
        GenerateOptions { backoff: Duration::ZERO, ..Default::default() }
    }

    #[tokio::test]
    async fn mock_thirty() {
        let amina = &load_fixture_personas()[0];
        let ideas = generate_plots(amina, 30, &MockGenerator::new(1), &GenerationParams::default(), &fast())
            .await
            .unwrap();
        assert_eq!(ideas.len(), 30);
        assert!(ideas.iter().all(|i| i.sentence_count == 3));
        assert_eq!(ideas[0].id, "amina-01");
    }

    #[tokio::test]
    async fn retries_after_invalid_batch() {
        let amina = &load_fixture_personas()[0];
        let mock = MockGenerator::new(1).with_invalid_every(3);
        let ideas = generate_plots(amina, 5, &mock, &GenerationParams::default(), &fast()).await.unwrap();
        assert_eq!(ideas.len(), 5);
    }

    #[tokio::test]
    async fn provider_errors_exhaust_budget() {
        let amina = &load_fixture_personas()[0];
        let params = GenerationParams { retry_budget: 1, ..Default::default() };
        let err = generate_plots(amina, 2, &MockGenerator::new(1).with_failures(5), &params, &fast())
            .await
            .unwrap_err();
        assert!(matches!(err, GenerationError::Provider(_)));
        let ok = generate_plots(amina, 2, &MockGenerator::new(1).with_failures(1), &params, &fast()).await;
        assert!(ok.is_ok());
    }

    #[tokio::test]
    async fn rejects_bad_params() {
        let amina = &load_fixture_personas()[0];
        let params = GenerationParams { top_p: 0.0, ..Default::default() };
        assert!(matches!(
            generate_plots(amina, 1, &MockGenerator::new(1), &params, &fast()).await,
            Err(GenerationError::InvalidParams(_))
        ));
    }
}
