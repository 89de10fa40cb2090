#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fakecti/attribution.hpp"
#include "fakecti/classifier_client.hpp"
#include "fakecti/corpus.hpp"
#include "fakecti/embedding.hpp"
#include "fakecti/tuples.hpp"

namespace fakecti
{

struct ExperimentSpec
{
    Method method = Method::TfidfVote;
    SplitSpec split{{{"train", 0.66}, {"test", 0.34}}, 0, SplitMode::Stratified};
    std::size_t repetitions = 5;
    /// Ascending. evaluate() requires exactly one value.
    std::vector<double> taus{0.25};
    /// min_matches, per_campaign_min and vote_mode apply; tau comes from `taus`.
    AttributionConfig attribution;

    /// Throws Error(InvalidSpec).
    void validate() const;
};

/// Optional collaborators. Semantic runs need provider + cache; neural runs
/// need either recorded predictions or a classifier client.
struct ExperimentResources
{
    EmbeddingProvider* provider = nullptr;
    EmbeddingCache* cache = nullptr;
    const PredictionBatch* predictions = nullptr;
    const ClassifierClient* classifier = nullptr;
    /// Tuples used for test articles instead of the main tuple set (for
    /// example paraphrased extractions). Training always uses the main set.
    const TupleSet* test_tuples = nullptr;
};

struct RepetitionResult
{
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    std::size_t n_articles = 0;
    std::size_t n_correct = 0;
    std::size_t n_unclassified = 0;
    double accuracy = 0.0;
};

struct CampaignBreakdown
{
    std::size_t correct = 0;
    std::size_t total = 0;
};

/// Counts are totals over all repetitions; mean_accuracy is the arithmetic
/// mean of the per-repetition accuracies.
struct EvalReport
{
    Method method = Method::TfidfVote;
    double tau = 0.0;
    std::vector<RepetitionResult> repetitions;
    double mean_accuracy = 0.0;
    std::size_t n_articles = 0;
    std::size_t n_correct = 0;
    std::size_t n_unclassified = 0;
    std::map<std::string, CampaignBreakdown> per_campaign;
    /// Test articles that had no tuple group at all (attributed as zero-tuple).
    std::vector<std::string> missing_tuples;
};

struct SweepResult
{
    Method method = Method::TfidfVote;
    /// One report per tau, ascending.
    std::vector<EvalReport> rows;
};

/// Repetition r splits with seed split.seed + r, builds the index from the
/// training part only and attributes every test article. Unclassified and
/// wrong verdicts both count as incorrect.
EvalReport evaluate(const ExperimentSpec& spec, const Dataset& dataset, const TupleSet& tuples,
                    const ExperimentResources& resources = {});

/// Evaluates every tau in spec.taus; within a repetition all taus share the
/// same split and index.
SweepResult sweep(const ExperimentSpec& spec, const Dataset& dataset, const TupleSet& tuples,
                  const ExperimentResources& resources = {});

/// min, min + step, ... up to max inclusive (values rounded to 1e-9).
std::vector<double> tau_range(double min, double max, double step);

} // namespace fakecti
