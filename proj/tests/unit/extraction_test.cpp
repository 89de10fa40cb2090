#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "fakecti/error.hpp"
#include "fakecti/extraction.hpp"
#include "fakecti/prompt.hpp"
#include "fixtures.hpp"

using namespace fakecti;
using fakecti::testing::make_article;
using fakecti::testing::slurp;
using fakecti::testing::TempDir;

namespace
{

/// Scripted chat client: `respond` sees the prompt and the 0-based call number.
class StubClient final : public ChatClient
{
  public:
    using Responder = std::function<std::string(const ChatRequest&, std::size_t)>;

    explicit StubClient(Responder respond) : respond_(std::move(respond))
    {
    }

    std::string complete(const ChatRequest& request) override
    {
        const std::size_t n = calls_.fetch_add(1);
        {
            std::lock_guard lock(mutex_);
            prompts_.push_back(request.prompt);
        }
        const int now = ++in_flight_;
        int seen = max_in_flight_.load();
        while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now))
        {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
        --in_flight_;
        return respond_(request, n);
    }

    std::size_t calls() const
    {
        return calls_.load();
    }
    int max_in_flight() const
    {
        return max_in_flight_.load();
    }
    std::vector<std::string> prompts() const
    {
        std::lock_guard lock(mutex_);
        return prompts_;
    }

    int delay_ms = 0;

  private:
    Responder respond_;
    std::atomic<std::size_t> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
    mutable std::mutex mutex_;
    std::vector<std::string> prompts_;
};

/// Echoes one tuple naming the article text so results can be checked per article.
std::string echo_text(const ChatRequest& request)
{
    const auto pos = request.prompt.rfind("Text: ");
    return "Article - says - " + request.prompt.substr(pos + 6) + "\nEND LIST\n";
}

ExtractionConfig config_with(std::size_t retries, std::size_t concurrency = 4)
{
    ExtractionConfig c;
    c.model_id = "stub-model";
    c.max_retries = retries;
    c.concurrency_limit = concurrency;
    return c;
}

Dataset numbered(std::size_t n)
{
    std::vector<Article> articles;
    for (std::size_t i = 0; i < n; ++i)
        articles.push_back(make_article("a" + std::to_string(i), "C", "body " + std::to_string(i)));
    return Dataset(articles);
}

} // namespace

TEST_CASE("extract_article pipes the completion through the parser")
{
    StubClient client([](const ChatRequest&, std::size_t) {
        return std::string("Example: Text: \"John gave a book to Mary.\"\nTuple: John - gave - a book to Mary\n"
                           "END LIST");
    });
    const auto r = extract_article(make_article("a1", "C", "John gave a book to Mary."), config_with(2), client);
    CHECK(r.status == ExtractionStatus::Ok);
    REQUIRE(r.tuples.size() == 1);
    CHECK(r.tuples[0] == ExtractedTuple{"a1", "John", "gave", "a book to Mary", {}});
    CHECK(r.attempts == 1);
    CHECK(r.seconds >= 0.0);
    CHECK(client.prompts().at(0) == build_prompt("John gave a book to Mary."));
}

TEST_CASE("extract_article stops reading at END LIST")
{
    StubClient client([](const ChatRequest&, std::size_t) {
        return std::string("A - r - B\nC - s - D\nEND LIST\nE - t - F\ngarbage");
    });
    const auto r = extract_article(make_article("a1", "C"), config_with(0), client);
    CHECK(r.tuples.size() == 2);
}

TEST_CASE("extract_article gives up after max_retries + 1 transport failures")
{
    StubClient client([](const ChatRequest&, std::size_t) -> std::string {
        throw Error(ErrorCode::TransportFailure, "timeout");
    });
    try
    {
        (void)extract_article(make_article("a1", "C"), config_with(2), client);
        FAIL("expected TransportFailure");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::TransportFailure);
    }
    CHECK(client.calls() == 3);
}

TEST_CASE("extract_article retries empty completions and then reports Empty")
{
    StubClient client([](const ChatRequest&, std::size_t) { return std::string("I cannot help.\nEND LIST"); });
    const auto r = extract_article(make_article("a1", "C"), config_with(2), client);
    CHECK(r.status == ExtractionStatus::Empty);
    CHECK(r.tuples.empty());
    CHECK(r.attempts == 3);
    CHECK(r.message.find("EmptyExtraction") != std::string::npos);
}

TEST_CASE("extract_article recovers after a transient failure")
{
    StubClient client([](const ChatRequest&, std::size_t n) -> std::string {
        if (n == 0)
            throw Error(ErrorCode::TransportFailure, "503");
        if (n == 1)
            return "nothing";
        return "A - r - B\nEND LIST";
    });
    const auto r = extract_article(make_article("a1", "C"), config_with(2), client);
    CHECK(r.status == ExtractionStatus::Ok);
    CHECK(r.attempts == 3);
    CHECK(r.tuples.size() == 1);
}

TEST_CASE("extract_article does not retry authentication failures")
{
    StubClient client([](const ChatRequest&, std::size_t) -> std::string {
        throw Error(ErrorCode::AuthFailure, "401");
    });
    CHECK_THROWS_AS((void)extract_article(make_article("a1", "C"), config_with(5), client), Error);
    CHECK(client.calls() == 1);
}

TEST_CASE("extraction_input truncates on a UTF-8 boundary and can prepend the title")
{
    ExtractionConfig c = config_with(0);
    c.max_input_chars = 5;
    bool truncated = false;
    // "abcd" + U+00E9 (2 bytes): the cut at byte 5 would split the character.
    CHECK(extraction_input(make_article("a", "C", "abcd\xC3\xA9xyz"), c, &truncated) == "abcd");
    CHECK(truncated);
    c.max_input_chars = 100;
    CHECK(extraction_input(make_article("a", "C", "body"), c, &truncated) == "body");
    CHECK_FALSE(truncated);
    c.prepend_title = true;
    CHECK(extraction_input(make_article("a", "C", "body"), c) == "title of a\n\nbody");
}

TEST_CASE("extraction config validation and temperature flagging")
{
    auto c = config_with(2);
    CHECK_NOTHROW(c.validate());
    CHECK_FALSE(c.unusual_temperature());
    c.temperature = 0.0;
    CHECK_FALSE(c.unusual_temperature());
    c.temperature = 0.45;
    CHECK(c.unusual_temperature());
    c.temperature = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = config_with(2, 0);
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("chat wire contract helpers")
{
    const auto body = nlohmann::json::parse(chat_request_body({"m", 0.3, "hello"}));
    CHECK(body["model"] == "m");
    CHECK(body["temperature"].get<double>() == doctest::Approx(0.3));
    REQUIRE(body["messages"].size() == 1);
    CHECK(body["messages"][0]["role"] == "user");
    CHECK(body["messages"][0]["content"] == "hello");

    CHECK(chat_response_content(R"({"choices":[{"message":{"role":"assistant","content":"x"}}]})") == "x");
    for (const char* bad : {"not json", "{}", R"({"choices":[]})", R"({"choices":[{"message":{}}]})"})
    {
        try
        {
            (void)chat_response_content(bad);
            FAIL("expected TransportFailure");
        }
        catch (const Error& e)
        {
            CHECK(e.code() == ErrorCode::TransportFailure);
        }
    }
}

TEST_CASE("extract_corpus keeps dataset order and bounds concurrency")
{
    TempDir dir;
    const auto out = dir.file("tuples.jsonl");
    const auto ds = numbered(10);
    StubClient client([](const ChatRequest& r, std::size_t) { return echo_text(r); });
    client.delay_ms = 5;
    const auto result = extract_corpus(ds, config_with(2, 4), client, out);

    REQUIRE(result.tuples.groups().size() == 10);
    for (std::size_t i = 0; i < 10; ++i)
    {
        CHECK(result.tuples.groups()[i].article_id == "a" + std::to_string(i));
        CHECK(result.tuples.groups()[i].tuples.at(0).object == "body " + std::to_string(i));
    }
    CHECK(result.failures.empty());
    CHECK(result.requests_issued == 10);
    CHECK(client.max_in_flight() <= 4);

    const auto on_disk = load_tuples(out);
    REQUIRE(on_disk.groups().size() == 10);
    CHECK(on_disk.groups()[3].article_id == "a3");
    CHECK(load_extraction_seconds(progress_journal_path(out)).size() == 10);
}

TEST_CASE("extract_corpus resumes without new requests")
{
    TempDir dir;
    const auto out = dir.file("tuples.jsonl");
    const auto ds = numbered(6);
    StubClient first([](const ChatRequest& r, std::size_t) { return echo_text(r); });
    (void)extract_corpus(ds, config_with(2), first, out);
    const auto bytes = slurp(out);

    StubClient second([](const ChatRequest& r, std::size_t) { return echo_text(r); });
    const auto again = extract_corpus(ds, config_with(2), second, out);
    CHECK(second.calls() == 0);
    CHECK(again.requests_issued == 0);
    CHECK(again.skipped_existing == 6);
    CHECK(slurp(out) == bytes);
}

TEST_CASE("extract_corpus resumes empty extractions from the journal")
{
    TempDir dir;
    const auto out = dir.file("tuples.jsonl");
    const auto ds = numbered(3);
    StubClient first([](const ChatRequest& r, std::size_t) {
        return r.prompt.ends_with("body 1") ? std::string("no tuples") : echo_text(r);
    });
    const auto r1 = extract_corpus(ds, config_with(1), first, out);
    CHECK(r1.tuples.groups().size() == 3);
    CHECK(r1.tuples.find("a1")->tuples.empty());

    StubClient second([](const ChatRequest& r, std::size_t) { return echo_text(r); });
    (void)extract_corpus(ds, config_with(1), second, out);
    CHECK(second.calls() == 0);
}

TEST_CASE("extract_corpus records failures and retries them on the next run")
{
    TempDir dir;
    const auto out = dir.file("tuples.jsonl");
    const auto ds = numbered(3);
    StubClient flaky([](const ChatRequest& r, std::size_t) -> std::string {
        if (r.prompt.ends_with("body 1"))
            throw Error(ErrorCode::TransportFailure, "down");
        return echo_text(r);
    });
    const auto r = extract_corpus(ds, config_with(2), flaky, out);
    CHECK(r.tuples.groups().size() == 2);
    REQUIRE(r.failures.size() == 1);
    CHECK(r.failures[0].article_id == "a1");
    CHECK(r.failures[0].status == ExtractionStatus::Failed);
    CHECK(flaky.calls() == 5);

    StubClient healthy([](const ChatRequest& req, std::size_t) { return echo_text(req); });
    const auto r2 = extract_corpus(ds, config_with(2), healthy, out);
    CHECK(healthy.calls() == 1);
    CHECK(r2.tuples.groups().size() == 3);
    CHECK(r2.tuples.groups()[1].article_id == "a1");
}

TEST_CASE("extract_corpus output does not depend on completion order")
{
    const auto ds = numbered(12);
    std::string reference;
    for (int variant = 0; variant < 3; ++variant)
    {
        TempDir dir;
        const auto out = dir.file("t.jsonl");
        StubClient client([variant](const ChatRequest& r, std::size_t n) {
            std::this_thread::sleep_for(std::chrono::milliseconds((n * 7 + variant * 3) % 11));
            return echo_text(r);
        });
        (void)extract_corpus(ds, config_with(0, variant == 0 ? 1 : 4 + variant), client, out);
        if (variant == 0)
            reference = slurp(out);
        else
            CHECK(slurp(out) == reference);
    }
}

TEST_CASE("extract_corpus aborts on authentication failure after persisting completed work")
{
    TempDir dir;
    const auto out = dir.file("t.jsonl");
    const auto ds = numbered(4);
    StubClient client([](const ChatRequest& r, std::size_t) -> std::string {
        if (r.prompt.ends_with("body 2"))
            throw Error(ErrorCode::AuthFailure, "401");
        return echo_text(r);
    });
    try
    {
        (void)extract_corpus(ds, config_with(2, 1), client, out);
        FAIL("expected AuthFailure");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::AuthFailure);
    }
    const auto saved = load_tuples(out);
    CHECK(saved.groups().size() == 2);
    CHECK(client.calls() == 3);
}

TEST_CASE("extract_corpus rejects an empty dataset")
{
    TempDir dir;
    StubClient client([](const ChatRequest& r, std::size_t) { return echo_text(r); });
    CHECK_THROWS_AS((void)extract_corpus(Dataset{}, config_with(2), client, dir.file("t.jsonl")), Error);
}
