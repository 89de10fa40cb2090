#include "fakecti/attribution.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "fakecti/error.hpp"
#include "text_util.hpp"

namespace fakecti
{

std::string_view to_string(Modality modality) noexcept
{
    return modality == Modality::Lexical ? "lexical" : "semantic";
}

std::string_view to_string(Method method) noexcept
{
    switch (method)
    {
    case Method::TfidfVote: return "tfidf-vote";
    case Method::TfidfThreshold: return "tfidf-threshold";
    case Method::Semantic: return "semantic";
    case Method::Neural: return "neural";
    }
    return "tfidf-vote";
}

Method parse_method(std::string_view text)
{
    for (auto m : {Method::TfidfVote, Method::TfidfThreshold, Method::Semantic, Method::Neural})
        if (to_string(m) == text)
            return m;
    throw Error(ErrorCode::InvalidSpec, "unknown attribution method '" + std::string(text) + "'");
}

Modality modality_of(Method method) noexcept
{
    return method == Method::Semantic ? Modality::Semantic : Modality::Lexical;
}

CampaignIndex::CampaignIndex(Modality modality, std::vector<ReferenceVector> references,
                             const std::vector<std::string>* required_campaigns)
    : modality_(modality)
{
    std::unordered_map<std::string, std::size_t> slot;
    for (auto& ref : references)
    {
        const bool sparse = std::holds_alternative<SparseVector>(ref.vector);
        if (sparse != (modality == Modality::Lexical))
            throw Error(ErrorCode::ModalityMismatch, "reference vector for '" + ref.campaign + "' is not " +
                                                         std::string(to_string(modality)));
        auto [it, inserted] = slot.try_emplace(ref.campaign, campaigns_.size());
        if (inserted)
            campaigns_.push_back(CampaignReferences{ref.campaign, {}, {}});
        auto& group = campaigns_[it->second];
        group.vectors.push_back(std::move(ref.vector));
        group.texts.push_back(std::move(ref.text));
    }
    if (required_campaigns != nullptr)
        for (const auto& c : *required_campaigns)
            if (!slot.contains(c))
                throw Error(ErrorCode::EmptyCampaign, c);
}

std::vector<std::string> CampaignIndex::labels() const
{
    std::vector<std::string> out;
    out.reserve(campaigns_.size());
    for (const auto& c : campaigns_)
        out.push_back(c.campaign);
    return out;
}

const CampaignReferences* CampaignIndex::find(std::string_view campaign) const
{
    for (const auto& c : campaigns_)
        if (c.campaign == campaign)
            return &c;
    return nullptr;
}

CampaignIndex build_campaign_index(const std::vector<LabeledText>& references, const TfidfModel& model,
                                   const std::vector<std::string>* required_campaigns)
{
    std::vector<ReferenceVector> vectors;
    vectors.reserve(references.size());
    for (const auto& r : references)
        vectors.push_back(ReferenceVector{r.campaign, r.text, model.transform(r.text)});
    return CampaignIndex(Modality::Lexical, std::move(vectors), required_campaigns);
}

CampaignIndex build_campaign_index(const std::vector<LabeledText>& references, EmbeddingProvider& provider,
                                   EmbeddingCache& cache, const std::vector<std::string>* required_campaigns)
{
    std::vector<std::string> texts;
    texts.reserve(references.size());
    for (const auto& r : references)
        texts.push_back(r.text);
    auto embedded = embed_with_provider(provider, texts, cache);
    std::vector<ReferenceVector> vectors;
    vectors.reserve(references.size());
    for (std::size_t i = 0; i < references.size(); ++i)
        vectors.push_back(ReferenceVector{references[i].campaign, references[i].text, std::move(embedded[i])});
    return CampaignIndex(Modality::Semantic, std::move(vectors), required_campaigns);
}

void AttributionConfig::validate() const
{
    if (!(tau >= 0.0 && tau <= 1.0))
        throw Error(ErrorCode::InvalidSpec, "tau must lie in [0, 1]");
    if (min_matches < 1)
        throw Error(ErrorCode::InvalidSpec, "min_matches must be at least 1");
    for (const auto& [campaign, n] : per_campaign_min)
        if (n < 1)
            throw Error(ErrorCode::InvalidSpec, "minimum for '" + campaign + "' must be at least 1");
}

std::size_t AttributionConfig::required_matches(const std::string& campaign) const
{
    auto it = per_campaign_min.find(campaign);
    return it == per_campaign_min.end() ? min_matches : it->second;
}

std::map<std::string, std::size_t> parse_campaign_minimums(std::string_view text)
{
    std::map<std::string, std::size_t> out;
    while (!text.empty())
    {
        auto comma = text.find(',');
        auto item = detail::trim(text.substr(0, comma));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        if (item.empty())
            continue;
        auto eq = item.rfind('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::InvalidSpec, "expected campaign=count, got '" + std::string(item) + "'");
        const auto value = std::string(detail::trim(item.substr(eq + 1)));
        std::size_t used = 0;
        unsigned long long n = 0;
        try
        {
            n = std::stoull(value, &used);
        }
        catch (const std::exception&)
        {
            used = 0;
        }
        if (used == 0 || used != value.size())
            throw Error(ErrorCode::InvalidSpec, "bad count '" + value + "'");
        out[std::string(detail::trim(item.substr(0, eq)))] = static_cast<std::size_t>(n);
    }
    return out;
}

double sim_to_campaign(const Embedding& tuple_vector, std::span<const Embedding> campaign_vectors)
{
    double best = 0.0;
    if (is_zero(tuple_vector))
    {
        // Still surfaces modality/dimension errors for malformed input.
        for (const auto& member : campaign_vectors)
            (void)cosine(tuple_vector, member);
        return 0.0;
    }
    for (const auto& member : campaign_vectors)
        best = std::max(best, cosine(tuple_vector, member));
    return best;
}

SimilarityMatrix compute_similarities(std::span<const Embedding> tuple_vectors, const CampaignIndex& index)
{
    SimilarityMatrix m;
    m.campaigns = index.labels();
    m.sims.reserve(tuple_vectors.size());
    for (const auto& v : tuple_vectors)
    {
        std::vector<double> row;
        row.reserve(index.campaigns().size());
        for (const auto& c : index.campaigns())
            row.push_back(sim_to_campaign(v, c.vectors));
        m.sims.push_back(std::move(row));
    }
    return m;
}

VoteTally tally_votes(const SimilarityMatrix& matrix, double tau, VoteMode mode)
{
    VoteTally tally;
    for (const auto& c : matrix.campaigns)
    {
        tally.votes[c] = 0;
        tally.best_sim[c] = 0.0;
    }
    for (const auto& row : matrix.sims)
    {
        std::optional<std::size_t> exclusive_pick;
        for (std::size_t c = 0; c < row.size(); ++c)
        {
            const auto& label = matrix.campaigns[c];
            tally.best_sim[label] = std::max(tally.best_sim[label], row[c]);
            if (row[c] < tau)
                continue;
            if (mode == VoteMode::Inclusive)
                ++tally.votes[label];
            else if (!exclusive_pick || row[c] > row[*exclusive_pick] ||
                     (row[c] == row[*exclusive_pick] && label < matrix.campaigns[*exclusive_pick]))
                exclusive_pick = c;
        }
        if (exclusive_pick)
            ++tally.votes[matrix.campaigns[*exclusive_pick]];
    }
    return tally;
}

std::optional<std::string> select_verdict(const VoteTally& tally,
                                          const std::function<bool(const std::string&, std::size_t)>& eligible)
{
    const std::string* best = nullptr;
    std::size_t best_votes = 0;
    double best_key = 0.0;
    // std::map iterates labels in ascending order, so a strict comparison keeps
    // the lexicographically smallest label among equals.
    for (const auto& [label, votes] : tally.votes)
    {
        if (votes == 0 || !eligible(label, votes))
            continue;
        const auto& keys = tally.probability_mass.empty() ? tally.best_sim : tally.probability_mass;
        const auto key_it = keys.find(label);
        const double key = key_it == keys.end() ? 0.0 : key_it->second;
        if (best == nullptr || votes > best_votes || (votes == best_votes && key > best_key))
        {
            best = &label;
            best_votes = votes;
            best_key = key;
        }
    }
    if (best == nullptr)
        return std::nullopt;
    return *best;
}

AttributionResult attribute_voting(std::string article_id, const SimilarityMatrix& matrix,
                                   const AttributionConfig& config, Method method)
{
    config.validate();
    AttributionResult result;
    result.article_id = std::move(article_id);
    result.method = method;
    result.tally = tally_votes(matrix, config.tau, config.vote_mode);
    result.verdict = select_verdict(result.tally, [](const std::string&, std::size_t) { return true; });
    return result;
}

AttributionResult attribute_thresholding(std::string article_id, const SimilarityMatrix& matrix,
                                         const AttributionConfig& config)
{
    config.validate();
    AttributionResult result;
    result.article_id = std::move(article_id);
    result.method = Method::TfidfThreshold;
    result.tally = tally_votes(matrix, config.tau, config.vote_mode);
    result.verdict = select_verdict(result.tally, [&](const std::string& label, std::size_t votes) {
        return votes >= config.required_matches(label);
    });
    return result;
}

AttributionResult attribute_voting(std::string article_id, std::span<const Embedding> tuple_vectors,
                                   const CampaignIndex& index, const AttributionConfig& config)
{
    const Method method = index.modality() == Modality::Semantic ? Method::Semantic : Method::TfidfVote;
    return attribute_voting(std::move(article_id), compute_similarities(tuple_vectors, index), config, method);
}

AttributionResult attribute_thresholding(std::string article_id, std::span<const Embedding> tuple_vectors,
                                         const CampaignIndex& index, const AttributionConfig& config)
{
    return attribute_thresholding(std::move(article_id), compute_similarities(tuple_vectors, index), config);
}

AttributionResult attribute_neural(std::string article_id, std::span<const TuplePrediction> predictions,
                                   const std::vector<std::string>& labels)
{
    AttributionResult result;
    result.article_id = std::move(article_id);
    result.method = Method::Neural;
    for (const auto& label : labels)
    {
        result.tally.votes[label] = 0;
        result.tally.best_sim[label] = 0.0;
        result.tally.probability_mass[label] = 0.0;
    }
    for (const auto& p : predictions)
    {
        auto it = result.tally.votes.find(p.argmax);
        if (it == result.tally.votes.end())
            throw Error(ErrorCode::UnknownLabel, p.argmax);
        ++it->second;
        if (p.probs.empty())
            continue;
        if (p.probs.size() != labels.size())
            throw Error(ErrorCode::DimensionMismatch, "probability vector of length " + std::to_string(p.probs.size()) +
                                                          " for " + std::to_string(labels.size()) + " labels");
        for (std::size_t i = 0; i < labels.size(); ++i)
        {
            result.tally.probability_mass[labels[i]] += p.probs[i];
            auto& best = result.tally.best_sim[labels[i]];
            best = std::max(best, p.probs[i]);
        }
    }
    result.verdict = select_verdict(result.tally, [](const std::string&, std::size_t) { return true; });
    return result;
}

std::string attribution_json_line(const AttributionResult& result)
{
    nlohmann::ordered_json record;
    record["article_id"] = result.article_id;
    record["method"] = std::string(to_string(result.method));
    record["verdict"] = result.verdict ? nlohmann::ordered_json(*result.verdict) : nlohmann::ordered_json(nullptr);
    record["unclassified"] = result.unclassified();
    auto tally = nlohmann::ordered_json::object();
    for (const auto& [label, votes] : result.tally.votes)
        tally[label] = votes;
    auto best = nlohmann::ordered_json::object();
    for (const auto& [label, sim] : result.tally.best_sim)
        best[label] = sim;
    record["tally"] = std::move(tally);
    record["best_sim"] = std::move(best);
    return record.dump();
}

} // namespace fakecti
