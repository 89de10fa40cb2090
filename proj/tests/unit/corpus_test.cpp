#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "fakecti/corpus.hpp"
#include "fakecti/error.hpp"
#include "fakecti/rng.hpp"
#include "fixtures.hpp"

using namespace fakecti;
using fakecti::testing::make_article;
using fakecti::testing::TempDir;

namespace
{

ErrorCode code_of(auto&& fn)
{
    try
    {
        fn();
    }
    catch (const Error& e)
    {
        return e.code();
    }
    FAIL("expected fakecti::Error");
    return ErrorCode::IoFailure;
}

Dataset parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_dataset(in);
}

std::map<std::string, std::string> campaign_of(const Dataset& ds)
{
    std::map<std::string, std::string> out;
    for (const auto& a : ds.articles())
        out[a.id] = a.campaign;
    return out;
}

} // namespace

TEST_CASE("load_dataset reads well-formed lines in file order")
{
    const auto ds = parse(R"({"id":"a1","title":"T1","text":"x","campaign":"C1"}
{"id":"a2","title":"T2","text":"y","campaign":"C2","link":"https://www.example.com/a"}
{"id":"a3","title":"T3","text":"z","campaign":"C1","threat_actor":"Actor","medium":"web"}
)");
    CHECK(ds.size() == 3);
    CHECK(ds.campaigns() == std::set<std::string>{"C1", "C2"});
    CHECK(ds.articles()[1].id == "a2");
    CHECK(ds.articles()[1].link == "https://www.example.com/a");
    CHECK(ds.articles()[2].threat_actor == "Actor");
    CHECK(ds.find("a3") != nullptr);
    CHECK(ds.find("nope") == nullptr);
}

TEST_CASE("load_dataset validation errors")
{
    SUBCASE("missing text names the line")
    {
        try
        {
            parse("{\"id\":\"a1\",\"text\":\"x\",\"campaign\":\"C\"}\n{\"id\":\"a2\",\"campaign\":\"C\"}\n");
            FAIL("expected MalformedLine");
        }
        catch (const Error& e)
        {
            CHECK(e.code() == ErrorCode::MalformedLine);
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("duplicate id")
    {
        CHECK(code_of([] { parse("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n"); }) ==
              ErrorCode::DuplicateId);
    }
    SUBCASE("empty text")
    {
        CHECK(code_of([] { parse("{\"id\":\"a\",\"text\":\"   \"}\n"); }) == ErrorCode::EmptyText);
    }
    SUBCASE("not json")
    {
        CHECK(code_of([] { parse("{\"id\":\"a\",\"text\":\"x\"}\nnot json\n"); }) == ErrorCode::MalformedLine);
    }
    SUBCASE("wrong field type")
    {
        CHECK(code_of([] { parse("{\"id\":\"a\",\"text\":5}\n"); }) == ErrorCode::MalformedLine);
    }
    SUBCASE("missing file")
    {
        CHECK(code_of([] { load_dataset("/nonexistent/dir/data.jsonl"); }) == ErrorCode::IoFailure);
    }
}

TEST_CASE("missing id falls back to row-<line> and missing campaign to the sentinel")
{
    const auto ds = parse("{\"text\":\"x\",\"campaign\":\"C\"}\n\n{\"text\":\"y\"}\n");
    REQUIRE(ds.size() == 2);
    CHECK(ds.articles()[0].id == "row-1");
    CHECK(ds.articles()[1].id == "row-3");
    CHECK(ds.articles()[1].campaign == kUnlabeled);
    CHECK_FALSE(ds.articles()[1].labeled());
    CHECK_FALSE(ds.all_labeled());
}

TEST_CASE("dataset round-trips through write_dataset")
{
    Xoshiro256StarStar rng(7);
    for (int round = 0; round < 50; ++round)
    {
        std::vector<Article> articles;
        const auto n = rng.below(8);
        for (std::uint64_t i = 0; i < n; ++i)
        {
            Article a = make_article("id-" + std::to_string(i), "C" + std::to_string(rng.below(3)),
                                     "text \"quoted\" \\ \xC3\xA9 " + std::to_string(rng()));
            if (rng.below(2))
                a.link = "https://site" + std::to_string(rng.below(4)) + ".org/p";
            if (rng.below(2))
                a.threat_actor = "actor " + std::to_string(rng.below(3));
            if (rng.below(2))
                a.medium = "medium";
            articles.push_back(a);
        }
        const Dataset original(articles);
        std::ostringstream out;
        write_dataset(out, original);
        const auto back = parse(out.str());
        REQUIRE(back.size() == original.size());
        for (std::size_t i = 0; i < back.size(); ++i)
        {
            const auto& a = original.articles()[i];
            const auto& b = back.articles()[i];
            CHECK(a.id == b.id);
            CHECK(a.title == b.title);
            CHECK(a.text == b.text);
            CHECK(a.link == b.link);
            CHECK(a.campaign == b.campaign);
            CHECK(a.threat_actor == b.threat_actor);
            CHECK(a.medium == b.medium);
        }
        CHECK(back.campaigns() == original.campaigns());
    }
}

TEST_CASE("dataset_stats counts distinct values")
{
    CHECK(dataset_stats(Dataset{}) == DatasetStats{0, 0, 0, 0});

    auto a1 = make_article("a1", "C");
    auto a2 = make_article("a2", "C");
    a1.threat_actor = "Actor 1";
    a2.threat_actor = "Actor 2";
    a1.link = "https://news.example.com/x";
    a2.link = "http://www.example.com/y";
    const auto stats = dataset_stats(Dataset({a1, a2}));
    CHECK(stats.n_samples == 2);
    CHECK(stats.n_campaigns == 1);
    CHECK(stats.n_threat_actors == 2);
    CHECK(stats.n_sources <= 2);
    CHECK(stats.n_sources == 1);
}

TEST_CASE("published FakeCTI corpus statistics" * doctest::skip(std::getenv("FAKECTI_CORPUS") == nullptr))
{
    const auto stats = dataset_stats(load_dataset(std::getenv("FAKECTI_CORPUS")));
    CHECK(stats.n_samples == 12155);
    CHECK(stats.n_campaigns == 43);
    CHECK(stats.n_threat_actors == 73);
    CHECK(stats.n_sources == 149);
}

TEST_CASE("source_of extracts the registrable host")
{
    CHECK(source_of("https://www.bbc.co.uk/news/1") == "bbc.co.uk");
    CHECK(source_of("http://news.example.com:8080/a?b") == "example.com");
    CHECK(source_of("HTTPS://Example.COM") == "example.com");
    CHECK(source_of("https://user@sub.site.org/") == "site.org");
    CHECK(source_of("example.net/path") == "example.net");
    CHECK(source_of("http://192.168.0.1/x") == "192.168.0.1");
    CHECK(source_of("https://abc.net.au/story") == "abc.net.au");
    CHECK_FALSE(source_of("").has_value());
    CHECK_FALSE(source_of("https:///nohost").has_value());
}

TEST_CASE("split spec parsing and validation")
{
    const auto parts = parse_fractions("train=0.66, test=0.34");
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].name == "train");
    CHECK(parts[1].fraction == doctest::Approx(0.34));

    CHECK(code_of([] { SplitSpec{{{"all", 0.5}}, 0, SplitMode::Stratified}.validate(); }) == ErrorCode::InvalidSpec);
    CHECK(code_of([] { SplitSpec{{{"a", 0.5}, {"b", 0.6}}, 0, SplitMode::Stratified}.validate(); }) ==
          ErrorCode::InvalidSpec);
    CHECK(code_of([] { parse_fractions("train:0.5"); }) == ErrorCode::InvalidSpec);
    CHECK(code_of([] { parse_fractions("train=abc"); }) == ErrorCode::InvalidSpec);
    CHECK(code_of([] { stratified_split(Dataset{}, SplitSpec{{{"a", 0.5}, {"b", 0.5}}, 0, SplitMode::Stratified}); }) ==
          ErrorCode::InvalidSpec);
    CHECK(parse_split_mode("campaign") == SplitMode::CampaignPartitioned);
    CHECK(code_of([] { parse_split_mode("random"); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("apportion uses largest remainders with declaration-order ties")
{
    // 0.66*3 = 1.98, 0.34*3 = 1.02 -> floors (1, 1), leftover to train.
    CHECK(apportion(3, {0.66, 0.34}) == std::vector<std::size_t>{2, 1});
    // 4 campaigns at 0.75/0.25 -> exactly (3, 1).
    CHECK(apportion(4, {0.75, 0.25}) == std::vector<std::size_t>{3, 1});
    // 0.5*1 each: residues tie, the first part wins.
    CHECK(apportion(1, {0.5, 0.5}) == std::vector<std::size_t>{1, 0});
    // 0.8/0.1/0.1 of 10 -> (8, 1, 1).
    CHECK(apportion(10, {0.8, 0.1, 0.1}) == std::vector<std::size_t>{8, 1, 1});
    // 1/3 each of 2: residues .667 tie -> first two parts.
    CHECK(apportion(2, {1.0 / 3, 1.0 / 3, 1.0 / 3}) == std::vector<std::size_t>{1, 1, 0});
}

TEST_CASE("stratified split of two three-article campaigns")
{
    const Dataset ds({make_article("a1", "A"), make_article("b1", "B"), make_article("a2", "A"),
                      make_article("b2", "B"), make_article("a3", "A"), make_article("b3", "B")});
    const SplitSpec spec{{{"train", 0.66}, {"test", 0.34}}, 42, SplitMode::Stratified};
    const auto split = stratified_split(ds, spec);
    const auto campaigns = campaign_of(ds);
    std::map<std::string, int> train, test;
    for (const auto& id : split.part("train"))
        ++train[campaigns.at(id)];
    for (const auto& id : split.part("test"))
        ++test[campaigns.at(id)];
    CHECK(train["A"] == 2);
    CHECK(train["B"] == 2);
    CHECK(test["A"] == 1);
    CHECK(test["B"] == 1);

    // Deterministic for a fixed seed.
    CHECK(stratified_split(ds, spec).parts == split.parts);
}

TEST_CASE("campaign-partitioned split keeps campaigns whole")
{
    std::vector<Article> articles;
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < 3 + c; ++i)
            articles.push_back(make_article("c" + std::to_string(c) + "-" + std::to_string(i), "C" + std::to_string(c)));
    const Dataset ds(articles);
    const SplitSpec spec{{{"train", 0.75}, {"test", 0.25}}, 9, SplitMode::CampaignPartitioned};
    const auto split = stratified_split(ds, spec);
    const auto campaigns = campaign_of(ds);
    std::set<std::string> train, test;
    for (const auto& id : split.part("train"))
        train.insert(campaigns.at(id));
    for (const auto& id : split.part("test"))
        test.insert(campaigns.at(id));
    CHECK(train.size() == 3);
    CHECK(test.size() == 1);
    for (const auto& c : test)
        CHECK_FALSE(train.contains(c));
}

TEST_CASE("split invariants hold on random datasets")
{
    Xoshiro256StarStar rng(2024);
    const std::vector<std::vector<SplitPart>> layouts{
        {{"train", 0.66}, {"test", 0.34}},
        {{"train", 0.8}, {"val", 0.1}, {"test", 0.1}},
        {{"a", 0.25}, {"b", 0.25}, {"c", 0.5}},
    };
    for (int round = 0; round < 200; ++round)
    {
        std::vector<Article> articles;
        const auto n_campaigns = 1 + rng.below(6);
        const auto n_articles = 1 + rng.below(60);
        for (std::uint64_t i = 0; i < n_articles; ++i)
            articles.push_back(make_article("id" + std::to_string(i), "C" + std::to_string(rng.below(n_campaigns))));
        const Dataset ds(articles);
        const auto& layout = layouts[rng.below(layouts.size())];
        for (auto mode : {SplitMode::Stratified, SplitMode::CampaignPartitioned})
        {
            const SplitSpec spec{layout, rng(), mode};
            const auto split = stratified_split(ds, spec);

            // Partition: disjoint and covering.
            std::multiset<std::string> seen;
            for (const auto& [name, ids] : split.parts)
                seen.insert(ids.begin(), ids.end());
            REQUIRE(seen.size() == ds.size());
            for (const auto& a : ds.articles())
                CHECK(seen.count(a.id) == 1);

            std::map<std::string, std::map<std::string, std::size_t>> counts; // campaign -> part -> n
            std::map<std::string, std::size_t> sizes;
            for (const auto& a : ds.articles())
                ++sizes[a.campaign];
            for (const auto& [name, ids] : split.parts)
                for (const auto& id : ids)
                    ++counts[ds.find(id)->campaign][name];

            for (const auto& [campaign, size] : sizes)
            {
                if (mode == SplitMode::CampaignPartitioned)
                {
                    CHECK(counts[campaign].size() == 1);
                    continue;
                }
                if (size < layout.size())
                {
                    // Small campaigns go wholly to the largest part.
                    CHECK(counts[campaign].size() == 1);
                    continue;
                }
                for (const auto& part : layout)
                {
                    const double expected = part.fraction * static_cast<double>(size);
                    CHECK(std::abs(static_cast<double>(counts[campaign][part.name]) - expected) <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("xoshiro256** and Fisher-Yates are reproducible")
{
    Xoshiro256StarStar a(1), b(1), c(2);
    for (int i = 0; i < 10; ++i)
    {
        const auto x = a();
        CHECK(x == b());
        (void)c();
    }
    CHECK(Xoshiro256StarStar(1)() != Xoshiro256StarStar(2)());

    std::vector<int> v(20);
    for (int i = 0; i < 20; ++i)
        v[i] = i;
    auto w = v;
    Xoshiro256StarStar r1(5), r2(5);
    fisher_yates(std::span<int>(v), r1);
    fisher_yates(std::span<int>(w), r2);
    CHECK(v == w);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 20; ++i)
        CHECK(sorted[i] == i);

    Xoshiro256StarStar r3(11);
    for (int i = 0; i < 1000; ++i)
        CHECK(r3.below(7) < 7);
}
