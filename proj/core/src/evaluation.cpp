#include "fakecti/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

#include "fakecti/error.hpp"

namespace fakecti
{

void ExperimentSpec::validate() const
{
    split.validate();
    if (repetitions < 1)
        throw Error(ErrorCode::InvalidSpec, "repetitions must be at least 1");
    if (taus.empty())
        throw Error(ErrorCode::InvalidSpec, "at least one tau value is required");
    for (std::size_t i = 0; i < taus.size(); ++i)
    {
        if (!(taus[i] >= 0.0 && taus[i] <= 1.0))
            throw Error(ErrorCode::InvalidSpec, "tau values must lie in [0, 1]");
        if (i > 0 && taus[i] < taus[i - 1])
            throw Error(ErrorCode::InvalidSpec, "tau values must be sorted ascending");
    }
    AttributionConfig probe = attribution;
    probe.tau = taus.front();
    probe.validate();
}

std::vector<double> tau_range(double min, double max, double step)
{
    if (!(step > 0.0) || !(min >= 0.0) || !(max <= 1.0) || min > max)
        throw Error(ErrorCode::InvalidSpec, "tau range needs 0 <= min <= max <= 1 and a positive step");
    const auto n = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9));
    std::vector<double> taus;
    taus.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        taus.push_back(std::round((min + static_cast<double>(i) * step) * 1e9) / 1e9);
    return taus;
}

namespace
{

struct ArticleOutcome
{
    std::string campaign;
    bool correct = false;
    bool unclassified = false;
};

// outcomes[tau][test article]
using RepOutcomes = std::vector<std::vector<ArticleOutcome>>;

struct RepRun
{
    RepOutcomes outcomes;
    std::vector<std::string> missing;
};

const std::string& pick_part(const SplitSpec& spec, std::string_view preferred, bool first)
{
    for (const auto& p : spec.parts)
        if (p.name == preferred)
            return p.name;
    return first ? spec.parts.front().name : spec.parts.back().name;
}

RepRun run_repetition(const ExperimentSpec& spec, std::size_t rep, const Dataset& dataset, const TupleSet& tuples,
                      const ExperimentResources& resources)
{
    SplitSpec split_spec = spec.split;
    split_spec.seed += rep;
    const SplitResult split = stratified_split(dataset, split_spec);
    const auto& train_ids = split.part(pick_part(spec.split, "train", true));
    const auto& test_ids = split.part(pick_part(spec.split, "test", false));
    const TupleSet& test_tuples = resources.test_tuples != nullptr ? *resources.test_tuples : tuples;

    RepRun run;
    run.outcomes.assign(spec.taus.size(), {});

    auto record = [&](std::size_t tau_index, const Article& article, const AttributionResult& result) {
        ArticleOutcome o;
        o.campaign = article.campaign;
        o.unclassified = result.unclassified();
        o.correct = result.verdict && *result.verdict == article.campaign;
        run.outcomes[tau_index].push_back(std::move(o));
    };

    std::vector<const ArticleTuples*> test_groups;
    for (const auto& id : test_ids)
    {
        const auto* group = test_tuples.find(id);
        if (group == nullptr)
            run.missing.push_back(id);
        test_groups.push_back(group);
    }

    if (spec.method == Method::Neural)
    {
        PredictionBatch fetched;
        const PredictionBatch* batch = resources.predictions;
        if (batch == nullptr)
        {
            if (resources.classifier == nullptr)
                throw Error(ErrorCode::InvalidSpec, "neural evaluation needs recorded predictions or a classifier");
            std::vector<PredictItem> items;
            for (const auto* group : test_groups)
                if (group != nullptr)
                    for (const auto& t : group->tuples)
                        items.push_back(PredictItem{group->article_id, tuple_text(t)});
            if (!items.empty())
                fetched = resources.classifier->predict(items);
            batch = &fetched;
        }
        const auto grouped = batch->by_article();
        for (std::size_t i = 0; i < test_ids.size(); ++i)
        {
            const Article& article = *dataset.find(test_ids[i]);
            std::span<const TuplePrediction> predictions;
            if (test_groups[i] != nullptr && !test_groups[i]->tuples.empty())
                if (auto it = grouped.find(article.id); it != grouped.end())
                    predictions = it->second;
            const auto result = attribute_neural(article.id, predictions, batch->labels);
            for (std::size_t t = 0; t < spec.taus.size(); ++t)
                record(t, article, result);
        }
        return run;
    }

    std::vector<LabeledText> references;
    for (const auto& id : train_ids)
        if (const auto* group = tuples.find(id))
        {
            const Article& article = *dataset.find(id);
            for (const auto& t : group->tuples)
                references.push_back(LabeledText{article.campaign, tuple_text(t)});
        }
    if (references.empty())
        throw Error(ErrorCode::EmptyCorpus, "training part of repetition " + std::to_string(rep) + " has no tuples");

    std::vector<std::string> test_texts;
    for (const auto* group : test_groups)
        if (group != nullptr)
            for (const auto& t : group->tuples)
                test_texts.push_back(tuple_text(t));

    std::optional<CampaignIndex> index;
    std::vector<Embedding> test_vectors;
    test_vectors.reserve(test_texts.size());
    if (modality_of(spec.method) == Modality::Lexical)
    {
        std::vector<std::string> train_texts;
        train_texts.reserve(references.size());
        for (const auto& r : references)
            train_texts.push_back(r.text);
        const auto model = TfidfModel::fit(train_texts);
        index.emplace(build_campaign_index(references, model));
        for (const auto& text : test_texts)
            test_vectors.emplace_back(model.transform(text));
    }
    else
    {
        if (resources.provider == nullptr || resources.cache == nullptr)
            throw Error(ErrorCode::InvalidSpec, "semantic evaluation needs an embedding provider and cache");
        index.emplace(build_campaign_index(references, *resources.provider, *resources.cache));
        for (auto& v : embed_with_provider(*resources.provider, test_texts, *resources.cache))
            test_vectors.emplace_back(std::move(v));
    }

    std::size_t offset = 0;
    for (std::size_t i = 0; i < test_ids.size(); ++i)
    {
        const Article& article = *dataset.find(test_ids[i]);
        const std::size_t n = test_groups[i] != nullptr ? test_groups[i]->tuples.size() : 0;
        const auto matrix =
            compute_similarities(std::span<const Embedding>(test_vectors).subspan(offset, n), *index);
        offset += n;
        for (std::size_t t = 0; t < spec.taus.size(); ++t)
        {
            AttributionConfig config = spec.attribution;
            config.tau = spec.taus[t];
            const auto result = spec.method == Method::TfidfThreshold
                                    ? attribute_thresholding(article.id, matrix, config)
                                    : attribute_voting(article.id, matrix, config, spec.method);
            record(t, article, result);
        }
    }
    return run;
}

std::vector<EvalReport> run_all(const ExperimentSpec& spec, const Dataset& dataset, const TupleSet& tuples,
                                const ExperimentResources& resources)
{
    spec.validate();
    if (dataset.empty())
        throw Error(ErrorCode::InvalidSpec, "dataset is empty");
    for (const auto& a : dataset.articles())
        if (!a.labeled())
            throw Error(ErrorCode::InvalidSpec, "article " + a.id + " has no campaign label");

    std::vector<RepRun> runs(spec.repetitions);
    if (spec.repetitions == 1)
        runs[0] = run_repetition(spec, 0, dataset, tuples, resources);
    else
    {
        std::vector<std::future<RepRun>> futures;
        for (std::size_t r = 0; r < spec.repetitions; ++r)
            futures.push_back(std::async(std::launch::async, run_repetition, std::cref(spec), r, std::cref(dataset),
                                         std::cref(tuples), std::cref(resources)));
        for (std::size_t r = 0; r < spec.repetitions; ++r)
            runs[r] = futures[r].get();
    }

    std::set<std::string> missing;
    for (const auto& run : runs)
        missing.insert(run.missing.begin(), run.missing.end());

    std::vector<EvalReport> reports;
    for (std::size_t t = 0; t < spec.taus.size(); ++t)
    {
        EvalReport report;
        report.method = spec.method;
        report.tau = spec.taus[t];
        report.missing_tuples.assign(missing.begin(), missing.end());
        double accuracy_sum = 0.0;
        for (std::size_t r = 0; r < runs.size(); ++r)
        {
            RepetitionResult rep;
            rep.rep = r;
            rep.seed = spec.split.seed + r;
            for (const auto& o : runs[r].outcomes[t])
            {
                ++rep.n_articles;
                rep.n_correct += o.correct ? 1 : 0;
                rep.n_unclassified += o.unclassified ? 1 : 0;
                auto& breakdown = report.per_campaign[o.campaign];
                ++breakdown.total;
                breakdown.correct += o.correct ? 1 : 0;
            }
            rep.accuracy = rep.n_articles == 0 ? 0.0
                                               : static_cast<double>(rep.n_correct) / static_cast<double>(rep.n_articles);
            accuracy_sum += rep.accuracy;
            report.n_articles += rep.n_articles;
            report.n_correct += rep.n_correct;
            report.n_unclassified += rep.n_unclassified;
            report.repetitions.push_back(rep);
        }
        report.mean_accuracy = accuracy_sum / static_cast<double>(runs.size());
        reports.push_back(std::move(report));
    }
    return reports;
}

} // namespace

EvalReport evaluate(const ExperimentSpec& spec, const Dataset& dataset, const TupleSet& tuples,
                    const ExperimentResources& resources)
{
    if (spec.taus.size() != 1)
        throw Error(ErrorCode::InvalidSpec, "evaluate takes exactly one tau; use sweep for several");
    return run_all(spec, dataset, tuples, resources).front();
}

SweepResult sweep(const ExperimentSpec& spec, const Dataset& dataset, const TupleSet& tuples,
                  const ExperimentResources& resources)
{
    SweepResult result;
    result.method = spec.method;
    result.rows = run_all(spec, dataset, tuples, resources);
    return result;
}

} // namespace fakecti
