#include "fakecti/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "fakecti/error.hpp"
#include "json_lines.hpp"

namespace fakecti
{

double f1_score(double precision, double recall) noexcept
{
    const double sum = precision + recall;
    return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

std::string format_percent(double ratio)
{
    // Truncate toward zero at one decimal; the epsilon absorbs representation
    // error such as 0.29 * 1000 = 289.99999999999997.
    const double tenths = std::floor(ratio * 1000.0 + 1e-9);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", tenths / 10.0);
    return buf;
}

namespace
{

double ratio(std::size_t num, std::size_t den)
{
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double mean(const std::vector<double>& xs)
{
    return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

} // namespace

ExtractionQualityReport score_extraction(const TupleSet& tuples, const std::vector<ConceptGold>& gold,
                                         const std::vector<JudgmentRecord>& judgments,
                                         const std::vector<double>& extraction_seconds)
{
    std::unordered_map<std::string, const ConceptGold*> gold_by_id;
    for (const auto& g : gold)
        gold_by_id[g.article_id] = &g;

    ExtractionQualityReport report;
    std::vector<double> accuracies, coverages, precisions, recalls;
    for (const auto& j : judgments)
    {
        auto g = gold_by_id.find(j.article_id);
        if (g == gold_by_id.end())
            throw Error(ErrorCode::MissingGold, j.article_id);
        const auto* group = tuples.find(j.article_id);
        const std::size_t n_extracted = group ? group->tuples.size() : 0;
        const std::size_t n_concepts = g->second->concepts.size();
        if (j.tuple_correct.size() != n_extracted)
            throw Error(ErrorCode::LengthMismatch, j.article_id + ": " + std::to_string(j.tuple_correct.size()) +
                                                       " tuple judgments for " + std::to_string(n_extracted) + " tuples");
        if (j.concepts_covered.size() != n_concepts)
            throw Error(ErrorCode::LengthMismatch, j.article_id + ": " + std::to_string(j.concepts_covered.size()) +
                                                       " concept judgments for " + std::to_string(n_concepts) + " concepts");

        ArticleQuality q;
        q.article_id = j.article_id;
        q.extracted_tuples = n_extracted;
        q.correct_tuples = static_cast<std::size_t>(std::count(j.tuple_correct.begin(), j.tuple_correct.end(), true));
        q.total_concepts = n_concepts;
        q.covered_concepts =
            static_cast<std::size_t>(std::count(j.concepts_covered.begin(), j.concepts_covered.end(), true));
        q.accuracy = ratio(q.correct_tuples, q.extracted_tuples);
        q.coverage = ratio(q.covered_concepts, q.total_concepts);
        if (j.gold_matched)
        {
            if (j.gold_matched->matched_extracted > n_extracted || j.gold_matched->matched_gold > n_concepts)
                throw Error(ErrorCode::LengthMismatch, j.article_id + ": matched counts exceed their totals");
            q.precision = ratio(j.gold_matched->matched_extracted, n_extracted);
            q.recall = ratio(j.gold_matched->matched_gold, n_concepts);
            q.f1 = f1_score(*q.precision, *q.recall);
            precisions.push_back(*q.precision);
            recalls.push_back(*q.recall);
        }
        accuracies.push_back(q.accuracy);
        coverages.push_back(q.coverage);
        report.articles.push_back(std::move(q));
    }

    report.mean_accuracy = mean(accuracies);
    report.mean_coverage = mean(coverages);
    if (!precisions.empty())
    {
        report.precision = mean(precisions);
        report.recall = mean(recalls);
        report.f1 = f1_score(*report.precision, *report.recall);
    }
    if (!extraction_seconds.empty())
        report.avg_extraction_seconds = mean(extraction_seconds);
    return report;
}

std::vector<ConceptGold> parse_concept_gold(std::istream& in)
{
    std::vector<ConceptGold> out;
    detail::for_each_json_line(in, "concept gold", [&](const nlohmann::json& record, std::size_t line) {
        const std::string where = "concept gold line " + std::to_string(line);
        ConceptGold g;
        g.article_id = detail::required_string(record, "article_id", where);
        const auto it = record.find("concepts");
        if (it == record.end() || !it->is_array())
            throw Error(ErrorCode::MalformedLine, where + ": \"concepts\" must be an array");
        for (const auto& c : *it)
        {
            if (!c.is_string() || c.get<std::string>().empty())
                throw Error(ErrorCode::MalformedLine, where + ": concepts must be non-empty strings");
            g.concepts.push_back(c.get<std::string>());
        }
        out.push_back(std::move(g));
    });
    return out;
}

namespace
{

std::vector<bool> bool_array(const nlohmann::json& record, const char* key, const std::string& where)
{
    const auto it = record.find(key);
    if (it == record.end() || !it->is_array())
        throw Error(ErrorCode::MalformedLine, where + ": \"" + key + "\" must be a boolean array");
    std::vector<bool> out;
    for (const auto& v : *it)
    {
        if (!v.is_boolean())
            throw Error(ErrorCode::MalformedLine, where + ": \"" + key + "\" must be a boolean array");
        out.push_back(v.get<bool>());
    }
    return out;
}

std::optional<std::size_t> optional_count(const nlohmann::json& record, const char* key, const std::string& where)
{
    const auto it = record.find(key);
    if (it == record.end() || it->is_null())
        return std::nullopt;
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0))
        throw Error(ErrorCode::MalformedLine, where + ": \"" + key + "\" must be a non-negative integer");
    return it->get<std::size_t>();
}

} // namespace

std::vector<JudgmentRecord> parse_judgments(std::istream& in)
{
    std::vector<JudgmentRecord> out;
    detail::for_each_json_line(in, "judgments", [&](const nlohmann::json& record, std::size_t line) {
        const std::string where = "judgments line " + std::to_string(line);
        JudgmentRecord j;
        j.article_id = detail::required_string(record, "article_id", where);
        j.tuple_correct = bool_array(record, "tuple_correct", where);
        j.concepts_covered = bool_array(record, "concepts_covered", where);
        auto extracted = optional_count(record, "matched_extracted", where);
        auto gold = optional_count(record, "matched_gold", where);
        if (extracted.has_value() != gold.has_value())
            throw Error(ErrorCode::MalformedLine, where + ": matched_extracted and matched_gold go together");
        if (extracted)
            j.gold_matched = GoldMatch{*extracted, *gold};
        out.push_back(std::move(j));
    });
    return out;
}

std::vector<ConceptGold> load_concept_gold(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot open concept gold " + path);
    return parse_concept_gold(in);
}

std::vector<JudgmentRecord> load_judgments(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot open judgments " + path);
    return parse_judgments(in);
}

} // namespace fakecti
