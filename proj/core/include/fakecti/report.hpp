#pragma once

#include <string>

#include "fakecti/corpus.hpp"
#include "fakecti/evaluation.hpp"
#include "fakecti/scoring.hpp"

namespace fakecti
{

/// Pretty-printed JSON, stable key order, trailing newline.
std::string eval_report_json(const EvalReport& report);
std::string sweep_report_json(const SweepResult& sweep);
std::string quality_report_json(const ExtractionQualityReport& report);
std::string stats_json(const DatasetStats& stats);
std::string split_json(const SplitResult& split, const SplitSpec& spec);

/// CSV with header method,tau,rep,accuracy,n_unclassified: one row per
/// repetition followed by a rep=mean row for each tau. Reals use six
/// fractional digits.
std::string sweep_csv(const SweepResult& sweep);

} // namespace fakecti
