#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fakecti/attribution.hpp"
#include "fakecti/corpus.hpp"
#include "fakecti/embedding.hpp"
#include "fakecti/rng.hpp"
#include "fakecti/tuples.hpp"
#include "oracles.hpp"

namespace fakecti::testing
{

/// Scratch directory removed on destruction.
class TempDir
{
  public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("fakecti-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const
    {
        return (path_ / name).string();
    }
    std::string write(const std::string& name, const std::string& content) const
    {
        const auto p = file(name);
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

  private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline Article make_article(std::string id, std::string campaign, std::string text = "some article text")
{
    Article a;
    a.id = std::move(id);
    a.title = "title of " + a.id;
    a.text = std::move(text);
    a.campaign = std::move(campaign);
    return a;
}

/// Campaign c, word j of its private vocabulary, and that word's paraphrase.
inline std::string campaign_word(std::size_t c, std::size_t j)
{
    return "c" + std::to_string(c) + "w" + std::to_string(j);
}
inline std::string campaign_synonym(std::size_t c, std::size_t j)
{
    return "c" + std::to_string(c) + "s" + std::to_string(j);
}

/// Labeled corpus whose campaigns use pairwise-disjoint vocabularies. Every
/// article gets `tuples_per_article` tuples of three words drawn from its
/// campaign's pool of `pool` words. `paraphrased` holds the same tuples with
/// every word replaced by its synonym; `synonyms` maps synonyms back.
struct SyntheticCorpus
{
    Dataset dataset;
    TupleSet tuples;
    TupleSet paraphrased;
    SynonymMap synonyms;
};

inline SyntheticCorpus make_disjoint_corpus(std::size_t campaigns, std::size_t articles_per_campaign,
                                            std::size_t tuples_per_article, std::size_t pool, std::uint64_t seed)
{
    SyntheticCorpus out;
    Xoshiro256StarStar rng(seed);
    std::vector<Article> articles;
    for (std::size_t c = 0; c < campaigns; ++c)
        for (std::size_t j = 0; j < pool; ++j)
            out.synonyms[campaign_synonym(c, j)] = campaign_word(c, j);

    // Interleave campaigns so file order is not grouped by label.
    for (std::size_t i = 0; i < articles_per_campaign; ++i)
        for (std::size_t c = 0; c < campaigns; ++c)
        {
            const std::string id = "art-" + std::to_string(c) + "-" + std::to_string(i);
            std::string text;
            for (std::size_t k = 0; k < tuples_per_article; ++k)
            {
                std::size_t w[3];
                for (auto& x : w)
                    x = static_cast<std::size_t>(rng.below(pool));
                out.tuples.add(ExtractedTuple{id, campaign_word(c, w[0]), campaign_word(c, w[1]), campaign_word(c, w[2]), {}});
                out.paraphrased.add(
                    ExtractedTuple{id, campaign_synonym(c, w[0]), campaign_synonym(c, w[1]), campaign_synonym(c, w[2]), {}});
                text += campaign_word(c, w[0]) + " " + campaign_word(c, w[1]) + " " + campaign_word(c, w[2]) + ". ";
            }
            articles.push_back(make_article(id, "campaign-" + std::to_string(c), text));
        }
    out.dataset = Dataset(std::move(articles));
    return out;
}

/// Library-side view of an oracle attribution case.
struct IndexedCase
{
    CampaignIndex index;
    std::vector<Embedding> tuples;
    AttributionConfig config;
};

inline IndexedCase index_case(const oracle::AttributionCase& c)
{
    std::vector<ReferenceVector> refs;
    for (std::size_t k = 0; k < c.labels.size(); ++k)
        for (const auto& r : c.references[k])
            refs.push_back(ReferenceVector{c.labels[k], "", DenseVector{r}});
    std::vector<Embedding> tuples;
    for (const auto& t : c.tuples)
        tuples.emplace_back(DenseVector{t});
    AttributionConfig config;
    config.tau = c.tau;
    config.min_matches = c.min_matches;
    config.per_campaign_min = c.overrides;
    return IndexedCase{CampaignIndex(Modality::Semantic, std::move(refs)), std::move(tuples), config};
}

} // namespace fakecti::testing
