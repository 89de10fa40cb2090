#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fakecti/attribution.hpp"
#include "fakecti/corpus.hpp"
#include "fakecti/tuples.hpp"

namespace fakecti
{

/// Body of a /predict response (also the recorded-predictions file format).
struct PredictionBatch
{
    std::string model_version;
    std::vector<std::string> labels;
    std::vector<TuplePrediction> predictions;

    /// Predictions grouped by article id, keeping tuple order.
    std::map<std::string, std::vector<TuplePrediction>> by_article() const;
};

struct PredictItem
{
    std::string article_id;
    std::string text;
};

std::string predict_request_body(const std::vector<PredictItem>& items);
/// Throws Error(ProviderFailure) on malformed input or inconsistent vectors.
PredictionBatch parse_prediction_batch(const std::string& json_text);
PredictionBatch load_predictions(const std::string& path);

/// Client for the classifier service (/predict, /health).
class ClassifierClient
{
  public:
    ClassifierClient(std::string base_url, double timeout_seconds = 60.0, std::size_t max_batch = 256);
    /// Base URL from FAKECTI_CLF_URL; throws Error(InvalidSpec) when unset.
    static std::unique_ptr<ClassifierClient> from_environment();

    PredictionBatch predict(const std::vector<PredictItem>& items) const;
    /// model_version reported by /health; throws Error(ProviderFailure).
    std::string health() const;

  private:
    std::string base_url_;
    double timeout_seconds_;
    std::size_t max_batch_;
};

/// Labeled tuple records {article_id, text, campaign} for the given articles,
/// the training input of the classifier service.
void write_labeled_tuples(std::ostream& out, const Dataset& dataset, const TupleSet& tuples,
                          const std::vector<std::string>& article_ids);

} // namespace fakecti
