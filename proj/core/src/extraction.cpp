#include "fakecti/extraction.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "fakecti/error.hpp"
#include "fakecti/fileio.hpp"
#include "fakecti/prompt.hpp"
#include "http.hpp"
#include "json_lines.hpp"
#include "text_util.hpp"

namespace fakecti
{

void ExtractionConfig::validate() const
{
    if (!(temperature >= 0.0 && temperature <= 1.0))
        throw Error(ErrorCode::InvalidSpec, "temperature must lie in [0, 1]");
    if (concurrency_limit < 1)
        throw Error(ErrorCode::InvalidSpec, "concurrency limit must be at least 1");
    if (!(request_timeout_seconds > 0.0))
        throw Error(ErrorCode::InvalidSpec, "request timeout must be positive");
    if (max_input_chars == 0)
        throw Error(ErrorCode::InvalidSpec, "input character cap must be positive");
}

bool ExtractionConfig::unusual_temperature() const noexcept
{
    for (double studied : {0.0, 0.3, 0.6})
        if (std::abs(temperature - studied) < 1e-12)
            return false;
    return true;
}

std::string_view to_string(ExtractionStatus status) noexcept
{
    switch (status)
    {
    case ExtractionStatus::Ok: return "ok";
    case ExtractionStatus::Empty: return "empty";
    case ExtractionStatus::Failed: return "failed";
    }
    return "failed";
}

std::string chat_request_body(const ChatRequest& request)
{
    nlohmann::ordered_json body;
    body["model"] = request.model;
    body["temperature"] = request.temperature;
    body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", request.prompt}}});
    return body.dump();
}

std::string chat_response_content(const std::string& body)
{
    nlohmann::json response;
    try
    {
        response = nlohmann::json::parse(body);
    }
    catch (const nlohmann::json::parse_error&)
    {
        throw Error(ErrorCode::TransportFailure, "chat completion response is not JSON");
    }
    const auto choices = response.find("choices");
    if (choices == response.end() || !choices->is_array() || choices->empty())
        throw Error(ErrorCode::TransportFailure, "chat completion response has no choices");
    const auto& first = (*choices)[0];
    if (!first.is_object() || !first.contains("message") || !first["message"].is_object())
        throw Error(ErrorCode::TransportFailure, "chat completion choice has no message");
    const auto& message = first["message"];
    const auto content = message.find("content");
    if (content == message.end() || !content->is_string())
        throw Error(ErrorCode::TransportFailure, "chat completion message has no content");
    return content->get<std::string>();
}

HttpChatClient::HttpChatClient(std::string endpoint, std::optional<std::string> api_key, double timeout_seconds)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds)
{
    detail::split_url(endpoint_);
}

std::unique_ptr<HttpChatClient> HttpChatClient::from_environment(const std::string& fallback_endpoint,
                                                                 double timeout_seconds)
{
    auto endpoint = detail::env("FAKECTI_LLM_ENDPOINT").value_or(fallback_endpoint);
    return std::make_unique<HttpChatClient>(std::move(endpoint), detail::env("FAKECTI_LLM_API_KEY"), timeout_seconds);
}

std::string HttpChatClient::complete(const ChatRequest& request)
{
    const auto response = detail::http_post_json(endpoint_, chat_request_body(request), api_key_, timeout_seconds_);
    if (response.status == 401 || response.status == 403)
        throw Error(ErrorCode::AuthFailure, endpoint_ + " rejected credentials (HTTP " + std::to_string(response.status) + ")");
    if (response.status < 200 || response.status >= 300)
        throw Error(ErrorCode::TransportFailure, endpoint_ + " returned HTTP " + std::to_string(response.status));
    return chat_response_content(response.body);
}

std::string extraction_input(const Article& article, const ExtractionConfig& config, bool* truncated)
{
    std::string input;
    if (config.prepend_title && !detail::trim(article.title).empty())
    {
        input = std::string(detail::trim(article.title));
        input += "\n\n";
    }
    input += article.text;
    const bool cut = input.size() > config.max_input_chars;
    if (cut)
    {
        std::size_t end = config.max_input_chars;
        while (end > 0 && (static_cast<unsigned char>(input[end]) & 0xC0) == 0x80)
            --end;
        input.resize(end);
    }
    if (truncated != nullptr)
        *truncated = cut;
    return input;
}

ArticleExtraction extract_article(const Article& article, const ExtractionConfig& config, ChatClient& client)
{
    using clock = std::chrono::steady_clock;
    ArticleExtraction result;
    result.article_id = article.id;

    const auto started = clock::now();
    const std::string input = extraction_input(article, config, &result.truncated);
    const ChatRequest request{config.model_id, config.temperature, build_prompt(input)};

    bool got_completion = false;
    std::string last_error;
    const std::size_t attempts = config.max_retries + 1;
    for (std::size_t attempt = 0; attempt < attempts; ++attempt)
    {
        ++result.attempts;
        std::string completion;
        try
        {
            completion = client.complete(request);
        }
        catch (const Error& e)
        {
            if (e.code() != ErrorCode::TransportFailure)
                throw;
            last_error = e.what();
            continue;
        }
        got_completion = true;
        auto parsed = parse_tuples(completion, article.id);
        result.skipped_lines = parsed.skipped_lines;
        if (!parsed.tuples.empty())
        {
            result.tuples = std::move(parsed.tuples);
            break;
        }
    }
    result.seconds = std::chrono::duration<double>(clock::now() - started).count();

    if (!got_completion)
        throw Error(ErrorCode::TransportFailure,
                    article.id + " failed after " + std::to_string(result.attempts) + " attempts: " + last_error);
    if (result.tuples.empty())
    {
        result.status = ExtractionStatus::Empty;
        result.message = "EmptyExtraction: no tuples parsed for " + article.id;
    }
    if (result.truncated)
    {
        if (!result.message.empty())
            result.message += "; ";
        result.message += "input truncated to " + std::to_string(config.max_input_chars) + " bytes";
    }
    return result;
}

std::string progress_journal_path(const std::string& out_path)
{
    return out_path + ".progress.jsonl";
}

namespace
{

std::string journal_line(const ArticleExtraction& r)
{
    nlohmann::ordered_json record;
    record["article_id"] = r.article_id;
    record["status"] = std::string(to_string(r.status));
    record["seconds"] = r.seconds;
    record["attempts"] = r.attempts;
    record["skipped_lines"] = r.skipped_lines;
    auto tuples = nlohmann::ordered_json::array();
    for (const auto& t : r.tuples)
        tuples.push_back({{"subject", t.subject}, {"relation", t.relation}, {"object", t.object}});
    record["tuples"] = std::move(tuples);
    if (!r.message.empty())
        record["message"] = r.message;
    return record.dump();
}

/// Successful (ok/empty) journal entries keyed by article id; later lines win.
std::unordered_map<std::string, std::vector<ExtractedTuple>> read_journal(const std::string& path)
{
    std::unordered_map<std::string, std::vector<ExtractedTuple>> done;
    std::ifstream in(path);
    if (!in)
        return done;
    detail::for_each_json_line(in, "extraction journal", [&](const nlohmann::json& record, std::size_t line) {
        const std::string where = "extraction journal line " + std::to_string(line);
        const auto id = detail::required_string(record, "article_id", where);
        const auto status = detail::required_string(record, "status", where);
        if (status == "failed")
        {
            done.erase(id);
            return;
        }
        std::vector<ExtractedTuple> tuples;
        if (auto it = record.find("tuples"); it != record.end() && it->is_array())
            for (const auto& t : *it)
                tuples.push_back(ExtractedTuple{id, detail::required_string(t, "subject", where),
                                                detail::required_string(t, "relation", where),
                                                detail::required_string(t, "object", where), std::nullopt});
        done[id] = std::move(tuples);
    });
    return done;
}

} // namespace

std::vector<double> load_extraction_seconds(const std::string& journal_path)
{
    std::ifstream in(journal_path);
    if (!in)
        return {};
    std::vector<std::string> order;
    std::unordered_map<std::string, double> seconds;
    detail::for_each_json_line(in, "extraction journal", [&](const nlohmann::json& record, std::size_t line) {
        const std::string where = "extraction journal line " + std::to_string(line);
        const auto id = detail::required_string(record, "article_id", where);
        if (detail::required_string(record, "status", where) == "failed")
            return;
        const auto it = record.find("seconds");
        if (it == record.end() || !it->is_number())
            throw Error(ErrorCode::MalformedLine, where + ": missing seconds");
        if (!seconds.contains(id))
            order.push_back(id);
        seconds[id] = it->get<double>();
    });
    std::vector<double> out;
    out.reserve(order.size());
    for (const auto& id : order)
        out.push_back(seconds[id]);
    return out;
}

CorpusExtraction extract_corpus(const Dataset& dataset, const ExtractionConfig& config, ChatClient& client,
                                const std::string& out_path)
{
    config.validate();
    if (dataset.empty())
        throw Error(ErrorCode::EmptyInput, "dataset has no articles");

    TupleSet existing;
    if (file_exists(out_path))
        existing = load_tuples(out_path);
    const std::string journal_path = progress_journal_path(out_path);
    auto journaled = read_journal(journal_path);

    CorpusExtraction out;
    std::vector<const Article*> pending;
    for (const auto& a : dataset.articles())
    {
        if (existing.contains(a.id) || journaled.contains(a.id))
            ++out.skipped_existing;
        else
            pending.push_back(&a);
    }

    std::vector<std::optional<ArticleExtraction>> slots(pending.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex journal_mutex;
    std::optional<Error> auth_error;
    std::ofstream journal;
    if (!pending.empty())
    {
        journal.open(journal_path, std::ios::app);
        if (!journal)
            throw Error(ErrorCode::IoFailure, "cannot open extraction journal " + journal_path);
    }

    auto worker = [&] {
        for (;;)
        {
            if (abort.load())
                return;
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size())
                return;
            const Article& article = *pending[i];
            ArticleExtraction result;
            try
            {
                result = extract_article(article, config, client);
            }
            catch (const Error& e)
            {
                if (e.code() == ErrorCode::AuthFailure)
                {
                    std::lock_guard lock(journal_mutex);
                    if (!auth_error)
                        auth_error = e;
                    abort.store(true);
                    return;
                }
                result.article_id = article.id;
                result.status = ExtractionStatus::Failed;
                result.attempts = config.max_retries + 1;
                result.message = e.what();
            }
            std::lock_guard lock(journal_mutex);
            journal << journal_line(result) << '\n';
            journal.flush();
            slots[i] = std::move(result);
        }
    };

    const std::size_t n_workers = std::min(config.concurrency_limit, pending.size());
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < n_workers; ++w)
            workers.emplace_back(worker);
    }

    std::unordered_map<std::string, const ArticleExtraction*> fresh;
    for (const auto& slot : slots)
        if (slot)
        {
            out.requests_issued += slot->attempts;
            if (slot->status == ExtractionStatus::Failed)
                out.failures.push_back(*slot);
            else
                fresh.emplace(slot->article_id, &*slot);
            out.results.push_back(*slot);
        }

    for (const auto& a : dataset.articles())
    {
        if (const auto* group = existing.find(a.id))
        {
            out.tuples.ensure_group(a.id);
            for (const auto& t : group->tuples)
                out.tuples.add(t);
        }
        else if (auto it = journaled.find(a.id); it != journaled.end())
        {
            out.tuples.ensure_group(a.id);
            for (const auto& t : it->second)
                out.tuples.add(t);
        }
        else if (auto f = fresh.find(a.id); f != fresh.end())
        {
            out.tuples.ensure_group(a.id);
            for (const auto& t : f->second->tuples)
                out.tuples.add(t);
        }
    }

    std::ostringstream buffer;
    write_tuples(buffer, out.tuples);
    write_file_atomic(out_path, buffer.str());

    if (auth_error)
    {
        out.aborted = true;
        throw *auth_error;
    }
    return out;
}

} // namespace fakecti
