#include "fakecti/report.hpp"

#include <cstdio>

#include <json.hpp>

namespace fakecti
{

namespace
{

using ojson = nlohmann::ordered_json;

std::string fixed6(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

ojson report_object(const EvalReport& report)
{
    ojson j;
    j["method"] = std::string(to_string(report.method));
    j["tau"] = report.tau;
    j["mean_accuracy"] = report.mean_accuracy;
    j["n_articles"] = report.n_articles;
    j["n_correct"] = report.n_correct;
    j["n_unclassified"] = report.n_unclassified;
    auto reps = ojson::array();
    for (const auto& r : report.repetitions)
        reps.push_back({{"rep", r.rep},
                        {"seed", r.seed},
                        {"accuracy", r.accuracy},
                        {"n_articles", r.n_articles},
                        {"n_correct", r.n_correct},
                        {"n_unclassified", r.n_unclassified}});
    j["repetitions"] = std::move(reps);
    auto campaigns = ojson::object();
    for (const auto& [label, b] : report.per_campaign)
        campaigns[label] = {{"correct", b.correct}, {"total", b.total}};
    j["per_campaign"] = std::move(campaigns);
    j["missing_tuples"] = report.missing_tuples;
    return j;
}

template <typename T>
void put_optional(ojson& j, const char* key, const std::optional<T>& value)
{
    if (value)
        j[key] = *value;
}

} // namespace

std::string eval_report_json(const EvalReport& report)
{
    return report_object(report).dump(2) + "\n";
}

std::string sweep_report_json(const SweepResult& sweep)
{
    ojson j;
    j["method"] = std::string(to_string(sweep.method));
    auto rows = ojson::array();
    for (const auto& r : sweep.rows)
        rows.push_back(report_object(r));
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string sweep_csv(const SweepResult& sweep)
{
    std::string out = "method,tau,rep,accuracy,n_unclassified\n";
    const std::string method(to_string(sweep.method));
    for (const auto& row : sweep.rows)
    {
        const std::string tau = fixed6(row.tau);
        double unclassified_sum = 0.0;
        for (const auto& r : row.repetitions)
        {
            out += method + "," + tau + "," + std::to_string(r.rep) + "," + fixed6(r.accuracy) + "," +
                   std::to_string(r.n_unclassified) + "\n";
            unclassified_sum += static_cast<double>(r.n_unclassified);
        }
        const double n = row.repetitions.empty() ? 1.0 : static_cast<double>(row.repetitions.size());
        out += method + "," + tau + ",mean," + fixed6(row.mean_accuracy) + "," + fixed6(unclassified_sum / n) + "\n";
    }
    return out;
}

std::string quality_report_json(const ExtractionQualityReport& report)
{
    ojson j;
    j["n_articles"] = report.articles.size();
    j["mean_accuracy"] = report.mean_accuracy;
    j["mean_coverage"] = report.mean_coverage;
    j["accuracy_percent"] = format_percent(report.mean_accuracy);
    j["coverage_percent"] = format_percent(report.mean_coverage);
    put_optional(j, "precision", report.precision);
    put_optional(j, "recall", report.recall);
    put_optional(j, "f1", report.f1);
    put_optional(j, "avg_extraction_seconds", report.avg_extraction_seconds);
    auto articles = ojson::array();
    for (const auto& a : report.articles)
    {
        ojson item;
        item["article_id"] = a.article_id;
        item["correct_tuples"] = a.correct_tuples;
        item["extracted_tuples"] = a.extracted_tuples;
        item["covered_concepts"] = a.covered_concepts;
        item["total_concepts"] = a.total_concepts;
        item["accuracy"] = a.accuracy;
        item["coverage"] = a.coverage;
        item["accuracy_percent"] = format_percent(a.accuracy);
        item["coverage_percent"] = format_percent(a.coverage);
        put_optional(item, "precision", a.precision);
        put_optional(item, "recall", a.recall);
        put_optional(item, "f1", a.f1);
        articles.push_back(std::move(item));
    }
    j["articles"] = std::move(articles);
    return j.dump(2) + "\n";
}

std::string stats_json(const DatasetStats& stats)
{
    ojson j;
    j["n_samples"] = stats.n_samples;
    j["n_campaigns"] = stats.n_campaigns;
    j["n_threat_actors"] = stats.n_threat_actors;
    j["n_sources"] = stats.n_sources;
    return j.dump(2) + "\n";
}

std::string split_json(const SplitResult& split, const SplitSpec& spec)
{
    ojson j;
    j["seed"] = spec.seed;
    j["mode"] = std::string(to_string(spec.mode));
    auto fractions = ojson::object();
    for (const auto& p : spec.parts)
        fractions[p.name] = p.fraction;
    j["fractions"] = std::move(fractions);
    auto parts = ojson::object();
    for (const auto& [name, ids] : split.parts)
        parts[name] = ids;
    j["parts"] = std::move(parts);
    return j.dump(2) + "\n";
}

} // namespace fakecti
