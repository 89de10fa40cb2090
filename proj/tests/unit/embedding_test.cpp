#include <doctest.h>

#include <cmath>

#include "fakecti/embedding.hpp"
#include "fakecti/error.hpp"
#include "fakecti/rng.hpp"
#include "fixtures.hpp"

using namespace fakecti;
using fakecti::testing::TempDir;

namespace
{

/// Wraps the stub and counts what reaches the backend.
class CountingProvider final : public EmbeddingProvider
{
  public:
    explicit CountingProvider(std::size_t dim = 16, std::size_t returned_dim = 0)
        : dim_(dim), returned_dim_(returned_dim ? returned_dim : dim)
    {
    }
    std::string identity() const override
    {
        return "counting:" + std::to_string(dim_);
    }
    std::size_t dimension() const override
    {
        return dim_;
    }
    std::vector<DenseVector> embed_batch(const std::vector<std::string>& texts) override
    {
        ++requests;
        texts_seen += texts.size();
        std::vector<DenseVector> out;
        for (const auto& t : texts)
        {
            auto v = stub_embed(t, returned_dim_);
            for (auto& x : v.values)
                x *= 3.0; // unnormalized on purpose
            out.push_back(v);
        }
        if (drop_one && !out.empty())
            out.pop_back();
        return out;
    }

    std::size_t requests = 0;
    std::size_t texts_seen = 0;
    bool drop_one = false;

  private:
    std::size_t dim_;
    std::size_t returned_dim_;
};

} // namespace

TEST_CASE("stub_embed is deterministic, order-free and canonicalizes synonyms")
{
    CHECK(stub_embed("Country X funds Y").values == stub_embed("Country X funds Y").values);
    CHECK(stub_embed("a b").values == stub_embed("b a").values);
    CHECK(stub_embed("A, b!").values == stub_embed("a b").values);

    const SynonymMap syn{{"finances", "funds"}, {"nation", "country"}};
    CHECK(stub_embed("Nation X finances Y", 256, &syn).values == stub_embed("country x funds y", 256, &syn).values);
    CHECK(stub_embed("Nation X finances Y").values != stub_embed("country x funds y").values);

    const auto v = stub_embed("one two three", 64);
    CHECK(v.dimension() == 64);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stub_embed("", 8).is_zero());
    CHECK(stub_embed("!!", 8).is_zero());
    CHECK_THROWS_AS((void)stub_embed("x", 1), Error);
}

TEST_CASE("stub_embed token invariance holds on random token bags")
{
    Xoshiro256StarStar rng(8);
    const SynonymMap syn{{"s0", "w0"}, {"s1", "w1"}, {"s2", "w2"}};
    for (int round = 0; round < 100; ++round)
    {
        std::vector<std::string> tokens;
        const auto n = 1 + rng.below(8);
        for (std::uint64_t i = 0; i < n; ++i)
            tokens.push_back((rng.below(2) ? "w" : "s") + std::to_string(rng.below(3)));
        std::string forward, backward, canonical;
        for (std::size_t i = 0; i < tokens.size(); ++i)
        {
            forward += tokens[i] + " ";
            backward += tokens[tokens.size() - 1 - i] + " ";
            canonical += "w" + tokens[i].substr(1) + " ";
        }
        CHECK(stub_embed(forward, 32, &syn).values == stub_embed(backward, 32, &syn).values);
        CHECK(stub_embed(forward, 32, &syn).values == stub_embed(canonical, 32, &syn).values);
    }
}

TEST_CASE("stub provider identity reflects its configuration")
{
    StubEmbeddingProvider plain(256);
    StubEmbeddingProvider small(32);
    StubEmbeddingProvider syn(256, SynonymMap{{"a", "b"}});
    StubEmbeddingProvider syn2(256, SynonymMap{{"a", "c"}});
    CHECK(plain.identity() == "stub:256");
    CHECK(small.identity() == "stub:32");
    CHECK(syn.identity().starts_with("stub:256:syn-"));
    CHECK(syn.identity() != syn2.identity());

    const auto out = plain.embed_batch({"x y", "z", "x y"});
    REQUIRE(out.size() == 3);
    CHECK(out[0].values == out[2].values);
}

TEST_CASE("embed_with_provider contract")
{
    StubEmbeddingProvider stub(64);
    EmbeddingCache cache;
    const auto out = embed_with_provider(stub, {"one", "two", "three"}, cache);
    REQUIRE(out.size() == 3);
    for (const auto& v : out)
    {
        CHECK(v.dimension() == 64);
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("embed_with_provider deduplicates, renormalizes and caches")
{
    CountingProvider provider;
    EmbeddingCache cache;
    const auto first = embed_with_provider(provider, {"a b", "c", "a b"}, cache);
    CHECK(provider.requests == 1);
    CHECK(provider.texts_seen == 2);
    CHECK(first[0].values == first[2].values);
    CHECK(first[0].norm() == doctest::Approx(1.0).epsilon(1e-12));

    const auto second = embed_with_provider(provider, {"c", "a b"}, cache);
    CHECK(provider.requests == 1);
    CHECK(second[0].values == first[1].values);

    (void)embed_with_provider(provider, {"c", "new"}, cache);
    CHECK(provider.requests == 2);
    CHECK(provider.texts_seen == 3);
    CHECK(cache.size() == 3);

    CHECK(embed_with_provider(provider, {}, cache).empty());
}

TEST_CASE("embed_with_provider rejects wrong dimensions and counts")
{
    EmbeddingCache cache;
    CountingProvider wrong_dim(16, 8);
    try
    {
        (void)embed_with_provider(wrong_dim, {"x"}, cache);
        FAIL("expected DimensionMismatch");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
    CountingProvider short_batch;
    short_batch.drop_one = true;
    CHECK_THROWS_AS((void)embed_with_provider(short_batch, {"x", "y"}, cache), Error);
}

TEST_CASE("file-backed cache survives a restart")
{
    TempDir dir;
    const auto path = dir.file("cache.jsonl");
    std::vector<DenseVector> first;
    {
        CountingProvider provider;
        EmbeddingCache cache(path);
        first = embed_with_provider(provider, {"alpha", "beta"}, cache);
        CHECK(provider.requests == 1);
    }
    CountingProvider provider;
    EmbeddingCache cache(path);
    CHECK(cache.size() == 2);
    const auto again = embed_with_provider(provider, {"beta", "alpha"}, cache);
    CHECK(provider.requests == 0);
    CHECK(again[0].values == first[1].values);
    CHECK(again[1].values == first[0].values);

    // A different provider identity never reads these entries.
    StubEmbeddingProvider other(16);
    CHECK_FALSE(cache.get(other.identity(), "alpha").has_value());
}

TEST_CASE("synonym map loading lowercases both sides")
{
    TempDir dir;
    const auto path = dir.write("syn.json", R"({"Finances": "FUNDS", "nation": "country"})");
    const auto map = load_synonym_map(path);
    CHECK(map.at("finances") == "funds");
    CHECK(map.at("nation") == "country");
    CHECK_THROWS_AS(load_synonym_map(dir.write("bad.json", "[1,2]")), Error);
    CHECK_THROWS_AS(load_synonym_map(dir.file("missing.json")), Error);
}
