#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fakecti/embedding.hpp"
#include "fakecti/vectorize.hpp"

namespace fakecti
{

enum class Modality
{
    Lexical,
    Semantic,
};

enum class Method
{
    TfidfVote,
    TfidfThreshold,
    Semantic,
    Neural,
};

std::string_view to_string(Modality modality) noexcept;
std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view text);
Modality modality_of(Method method) noexcept;

/// Reference tuple of a known campaign.
struct ReferenceVector
{
    std::string campaign;
    std::string text;
    Embedding vector;
};

struct CampaignReferences
{
    std::string campaign;
    std::vector<Embedding> vectors;
    std::vector<std::string> texts;
};

/// Per-campaign reference vectors of a single modality. Campaigns keep the
/// order in which they first appear in the input.
class CampaignIndex
{
  public:
    /// `required_campaigns`, when given, must each end up with at least one
    /// reference vector (Error(EmptyCampaign) otherwise). Vectors of the wrong
    /// modality raise Error(ModalityMismatch).
    CampaignIndex(Modality modality, std::vector<ReferenceVector> references,
                  const std::vector<std::string>* required_campaigns = nullptr);

    Modality modality() const noexcept
    {
        return modality_;
    }
    const std::vector<CampaignReferences>& campaigns() const noexcept
    {
        return campaigns_;
    }
    std::vector<std::string> labels() const;
    const CampaignReferences* find(std::string_view campaign) const;

  private:
    Modality modality_;
    std::vector<CampaignReferences> campaigns_;
};

struct LabeledText
{
    std::string campaign;
    std::string text;
};

/// Lexical index: each text transformed with the (training-fitted) model.
CampaignIndex build_campaign_index(const std::vector<LabeledText>& references, const TfidfModel& model,
                                   const std::vector<std::string>* required_campaigns = nullptr);
/// Semantic index: texts embedded through the provider and cache.
CampaignIndex build_campaign_index(const std::vector<LabeledText>& references, EmbeddingProvider& provider,
                                   EmbeddingCache& cache, const std::vector<std::string>* required_campaigns = nullptr);

/// Whether a tuple votes for every campaign clearing tau (inclusive) or only
/// for its single best campaign (exclusive).
enum class VoteMode
{
    Inclusive,
    Exclusive,
};

struct AttributionConfig
{
    double tau = 0.25;
    std::size_t min_matches = 3;
    std::map<std::string, std::size_t> per_campaign_min;
    VoteMode vote_mode = VoteMode::Inclusive;

    /// Throws Error(InvalidSpec).
    void validate() const;
    std::size_t required_matches(const std::string& campaign) const;
};

/// Parses "C1=2,C2=1".
std::map<std::string, std::size_t> parse_campaign_minimums(std::string_view text);

struct VoteTally
{
    std::map<std::string, std::size_t> votes;
    /// Best similarity (or, for neural, best per-tuple probability) observed.
    std::map<std::string, double> best_sim;
    /// Summed per-tuple probability; neural only.
    std::map<std::string, double> probability_mass;
};

struct AttributionResult
{
    std::string article_id;
    std::optional<std::string> verdict;
    VoteTally tally;
    Method method = Method::TfidfVote;

    bool unclassified() const noexcept
    {
        return !verdict.has_value();
    }
};

/// Max cosine between `tuple_vector` and any member, floored at 0. Zero for a
/// zero vector or an empty member list.
double sim_to_campaign(const Embedding& tuple_vector, std::span<const Embedding> campaign_vectors);

/// sims[t][c]: similarity of tuple t to index campaign c.
struct SimilarityMatrix
{
    std::vector<std::string> campaigns;
    std::vector<std::vector<double>> sims;
};

SimilarityMatrix compute_similarities(std::span<const Embedding> tuple_vectors, const CampaignIndex& index);

/// V_C counts tuples with sim >= tau. Every campaign in the matrix appears in
/// the tally, with zero votes where nothing clears tau.
VoteTally tally_votes(const SimilarityMatrix& matrix, double tau, VoteMode mode = VoteMode::Inclusive);

/// Verdict among campaigns accepted by `eligible`: most votes, then highest
/// best_sim, then the lexicographically smallest label. Campaigns with zero
/// votes never win.
std::optional<std::string> select_verdict(const VoteTally& tally,
                                          const std::function<bool(const std::string&, std::size_t)>& eligible);

AttributionResult attribute_voting(std::string article_id, std::span<const Embedding> tuple_vectors,
                                   const CampaignIndex& index, const AttributionConfig& config);
AttributionResult attribute_thresholding(std::string article_id, std::span<const Embedding> tuple_vectors,
                                         const CampaignIndex& index, const AttributionConfig& config);

/// Same decisions from precomputed similarities (used by sweeps).
AttributionResult attribute_voting(std::string article_id, const SimilarityMatrix& matrix,
                                   const AttributionConfig& config, Method method = Method::TfidfVote);
AttributionResult attribute_thresholding(std::string article_id, const SimilarityMatrix& matrix,
                                         const AttributionConfig& config);

/// Per-tuple classifier output. `probs` is parallel to the batch labels.
struct TuplePrediction
{
    std::string article_id;
    std::string argmax;
    std::vector<double> probs;
};

/// Majority vote over per-tuple argmax predictions. Ties go to the larger
/// summed probability, then the smallest label. Throws Error(UnknownLabel)
/// for a label outside `labels` and Error(DimensionMismatch) when a probability
/// vector does not match `labels`.
AttributionResult attribute_neural(std::string article_id, std::span<const TuplePrediction> predictions,
                                   const std::vector<std::string>& labels);

/// One JSON Lines record: {article_id, method, verdict, unclassified, tally, best_sim}.
std::string attribution_json_line(const AttributionResult& result);

} // namespace fakecti
