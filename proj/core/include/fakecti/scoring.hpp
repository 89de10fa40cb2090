#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fakecti/tuples.hpp"

namespace fakecti
{

struct ConceptGold
{
    std::string article_id;
    std::vector<std::string> concepts;
};

struct GoldMatch
{
    std::size_t matched_extracted = 0;
    std::size_t matched_gold = 0;
};

/// Human judgments for one article. tuple_correct is parallel to the article's
/// extracted tuples and concepts_covered to its gold concepts.
struct JudgmentRecord
{
    std::string article_id;
    std::vector<bool> tuple_correct;
    std::vector<bool> concepts_covered;
    std::optional<GoldMatch> gold_matched;
};

struct ArticleQuality
{
    std::string article_id;
    std::size_t correct_tuples = 0;    // N_CT
    std::size_t extracted_tuples = 0;  // N_ET
    std::size_t covered_concepts = 0;  // N_CC
    std::size_t total_concepts = 0;    // N_TC
    double accuracy = 0.0;
    double coverage = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

struct ExtractionQualityReport
{
    std::vector<ArticleQuality> articles;
    double mean_accuracy = 0.0;
    double mean_coverage = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> avg_extraction_seconds;
};

double f1_score(double precision, double recall) noexcept;

/// Percentage truncated (not rounded) to one decimal place, the way quality
/// tables report it: 2/7 -> "28.5", 6/7 -> "85.7", 1 -> "100.0".
std::string format_percent(double ratio);

/// Accuracy N_CT/N_ET and coverage N_CC/N_TC per judged article; corpus values
/// are unweighted means. Precision/recall use the optional matched counts; the
/// corpus F1 is the harmonic mean of the corpus precision and recall.
/// Throws Error(MissingGold) or Error(LengthMismatch).
ExtractionQualityReport score_extraction(const TupleSet& tuples, const std::vector<ConceptGold>& gold,
                                         const std::vector<JudgmentRecord>& judgments,
                                         const std::vector<double>& extraction_seconds = {});

std::vector<ConceptGold> load_concept_gold(const std::string& path);
std::vector<ConceptGold> parse_concept_gold(std::istream& in);
std::vector<JudgmentRecord> load_judgments(const std::string& path);
std::vector<JudgmentRecord> parse_judgments(std::istream& in);

} // namespace fakecti
