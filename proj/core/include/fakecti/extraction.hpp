#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fakecti/corpus.hpp"
#include "fakecti/tuples.hpp"

namespace fakecti
{

struct ExtractionConfig
{
    std::string model_id;
    double temperature = 0.3;
    std::string endpoint = "http://localhost:8000/v1/chat/completions";
    std::size_t max_retries = 2;
    std::size_t concurrency_limit = 4;
    double request_timeout_seconds = 120.0;
    /// Article text longer than this (in bytes) is truncated at a UTF-8 boundary.
    std::size_t max_input_chars = 24000;
    bool prepend_title = false;

    /// Throws Error(InvalidSpec).
    void validate() const;
    /// True for temperatures outside the studied {0, 0.3, 0.6} settings.
    bool unusual_temperature() const noexcept;
};

struct ChatRequest
{
    std::string model;
    double temperature = 0.3;
    std::string prompt;
};

/// Chat-completion transport. Implementations throw Error(TransportFailure)
/// for retryable failures and Error(AuthFailure) for rejected credentials.
class ChatClient
{
  public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// OpenAI-style chat-completions client over HTTP(S).
class HttpChatClient final : public ChatClient
{
  public:
    HttpChatClient(std::string endpoint, std::optional<std::string> api_key, double timeout_seconds);

    /// Endpoint from FAKECTI_LLM_ENDPOINT when set (else `fallback_endpoint`),
    /// key from FAKECTI_LLM_API_KEY.
    static std::unique_ptr<HttpChatClient> from_environment(const std::string& fallback_endpoint,
                                                            double timeout_seconds);

    std::string complete(const ChatRequest& request) override;

    const std::string& endpoint() const noexcept
    {
        return endpoint_;
    }

  private:
    std::string endpoint_;
    std::optional<std::string> api_key_;
    double timeout_seconds_;
};

/// Request body for the chat-completion wire contract.
std::string chat_request_body(const ChatRequest& request);
/// Extracts choices[0].message.content; throws Error(TransportFailure) when absent.
std::string chat_response_content(const std::string& body);

enum class ExtractionStatus
{
    Ok,
    Empty,
    Failed,
};

std::string_view to_string(ExtractionStatus status) noexcept;

struct ArticleExtraction
{
    std::string article_id;
    std::vector<ExtractedTuple> tuples;
    ExtractionStatus status = ExtractionStatus::Ok;
    double seconds = 0.0;
    std::size_t attempts = 0;
    std::size_t skipped_lines = 0;
    bool truncated = false;
    std::string message;
};

/// Text sent to the model for one article (title prepended on request,
/// truncated to config.max_input_chars).
std::string extraction_input(const Article& article, const ExtractionConfig& config, bool* truncated = nullptr);

/// One request per attempt; retries on transport failures and on completions
/// with no parsable tuples, up to config.max_retries extra attempts. Zero
/// tuples after all attempts is reported as ExtractionStatus::Empty.
/// Throws Error(TransportFailure) when every attempt fails in transport and
/// Error(AuthFailure) immediately.
ArticleExtraction extract_article(const Article& article, const ExtractionConfig& config, ChatClient& client);

struct CorpusExtraction
{
    /// Every dataset article that has been processed successfully (including
    /// empty extractions), in dataset order.
    TupleSet tuples;
    std::vector<ArticleExtraction> results;  ///< new results, dataset order
    std::vector<ArticleExtraction> failures; ///< new failures, dataset order
    std::size_t requests_issued = 0;
    std::size_t skipped_existing = 0;
    bool aborted = false;
};

/// Extracts every article not already recorded in `out_path` (or its progress
/// journal `<out_path>.progress.jsonl`), with at most config.concurrency_limit
/// requests in flight. The tuples file is rewritten atomically in dataset
/// order. Each finished article is journaled immediately so an interrupted
/// run can resume. Throws Error(AuthFailure) after persisting completed work.
CorpusExtraction extract_corpus(const Dataset& dataset, const ExtractionConfig& config, ChatClient& client,
                                const std::string& out_path);

/// Path of the per-article progress journal written next to a tuples file.
std::string progress_journal_path(const std::string& out_path);

/// Wall-clock seconds of every successful (ok or empty) journal entry; the
/// latest entry per article wins. Empty when the journal does not exist.
std::vector<double> load_extraction_seconds(const std::string& journal_path);

} // namespace fakecti
