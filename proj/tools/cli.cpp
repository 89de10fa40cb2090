#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fakecti/fakecti.hpp"

namespace fakecti::cli
{

namespace
{

/// Missing or inconsistent flags detected after CLI11 parsing.
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct GlobalOptions
{
    int verbosity = 0;
    std::uint64_t seed = 0;
};

struct ProviderOptions
{
    std::string provider = "stub";
    std::size_t dimension = 256;
    std::string synonyms;
    std::string embed_endpoint = "http://localhost:8080/v1/embeddings";
    std::string embed_model = "sentence-transformers/all-MiniLM-L6-v2";
    std::string embed_cache;
};

struct AttributionOptions
{
    std::string method = "tfidf-vote";
    double tau = 0.25;
    std::size_t min_matches = 3;
    std::string per_campaign_min;
    bool exclusive = false;
    std::string predictions;
};

void add_provider_flags(CLI::App* sub, ProviderOptions& p)
{
    sub->add_option("--provider", p.provider, "Embedding provider for semantic attribution")
        ->check(CLI::IsMember({"stub", "remote"}))
        ->capture_default_str();
    sub->add_option("--dim", p.dimension, "Embedding dimension")->check(CLI::Range(2, 1 << 20))->capture_default_str();
    sub->add_option("--synonyms", p.synonyms, "JSON object mapping terms to canonical terms (stub provider)");
    sub->add_option("--embed-endpoint", p.embed_endpoint, "Remote embeddings endpoint")->capture_default_str();
    sub->add_option("--embed-model", p.embed_model, "Remote embedding model id")->capture_default_str();
    sub->add_option("--embed-cache", p.embed_cache, "Append-only embedding cache file");
}

void add_attribution_flags(CLI::App* sub, AttributionOptions& a, bool with_tau)
{
    sub->add_option("--method", a.method, "tfidf-vote | tfidf-threshold | semantic | neural")
        ->check(CLI::IsMember({"tfidf-vote", "tfidf-threshold", "semantic", "neural"}))
        ->capture_default_str();
    if (with_tau)
        sub->add_option("--tau", a.tau, "Similarity threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    sub->add_option("--min-matches", a.min_matches, "Minimum matching tuples (thresholding)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--per-campaign-min", a.per_campaign_min, "Per-campaign minimums, e.g. C1=2,C2=1");
    sub->add_flag("--exclusive", a.exclusive, "Each tuple votes only for its best campaign");
    sub->add_option("--predictions", a.predictions, "Recorded /predict response (neural, offline)");
}

AttributionConfig make_attribution_config(const AttributionOptions& a)
{
    AttributionConfig config;
    config.tau = a.tau;
    config.min_matches = a.min_matches;
    config.per_campaign_min = parse_campaign_minimums(a.per_campaign_min);
    config.vote_mode = a.exclusive ? VoteMode::Exclusive : VoteMode::Inclusive;
    config.validate();
    return config;
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderOptions& p)
{
    if (p.provider == "remote")
        return RemoteEmbeddingProvider::from_environment(p.embed_endpoint, p.embed_model, p.dimension);
    SynonymMap synonyms;
    if (!p.synonyms.empty())
        synonyms = load_synonym_map(p.synonyms);
    return std::make_unique<StubEmbeddingProvider>(p.dimension, std::move(synonyms));
}

std::unique_ptr<EmbeddingCache> make_cache(const ProviderOptions& p)
{
    return p.embed_cache.empty() ? std::make_unique<EmbeddingCache>() : std::make_unique<EmbeddingCache>(p.embed_cache);
}

void emit(const std::string& path, const std::string& content, std::ostream& out)
{
    if (path.empty() || path == "-")
        out << content;
    else
        write_file_atomic(path, content);
}

std::optional<std::string> env_value(const char* name)
{
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0')
        return std::nullopt;
    return std::string(value);
}

std::string synopsis(const CLI::App& app)
{
    const auto subs = app.get_subcommands();
    return subs.empty() ? app.help() : subs.front()->help();
}

// ---------------------------------------------------------------------------

struct StatsCommand
{
    std::string dataset;

    void attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("stats", "Dataset statistics as JSON");
        sub->add_option("--dataset", dataset, "Dataset JSON Lines file")->required();
    }

    void run(std::ostream& out) const
    {
        out << stats_json(dataset_stats(load_dataset(dataset)));
    }
};

struct SplitCommand
{
    std::string dataset;
    std::string fractions = "train=0.66,test=0.34";
    std::string mode = "stratified";
    std::string out_path;
    std::string tuples;
    std::string labeled_dir;

    void attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("split", "Seeded train/test split");
        sub->add_option("--dataset", dataset, "Dataset JSON Lines file")->required();
        sub->add_option("--fractions", fractions, "Parts and fractions")->capture_default_str();
        sub->add_option("--mode", mode, "stratified | campaign")
            ->check(CLI::IsMember({"stratified", "campaign"}))
            ->capture_default_str();
        sub->add_option("--out", out_path, "Split JSON output")->required();
        sub->add_option("--tuples", tuples, "Tuples file; with --labeled-dir writes labeled tuples per part");
        sub->add_option("--labeled-dir", labeled_dir, "Directory for <part>.jsonl labeled tuple files");
    }

    void run(const GlobalOptions& g, std::ostream& err) const
    {
        if (labeled_dir.empty() != tuples.empty())
            throw UsageError("--tuples and --labeled-dir must be given together");
        const auto ds = load_dataset(dataset);
        SplitSpec spec{parse_fractions(fractions), g.seed, parse_split_mode(mode)};
        const auto split = stratified_split(ds, spec);
        write_file_atomic(out_path, split_json(split, spec));
        if (!labeled_dir.empty())
        {
            const auto ts = load_tuples(tuples);
            for (const auto& [name, ids] : split.parts)
            {
                std::ostringstream buffer;
                write_labeled_tuples(buffer, ds, ts, ids);
                write_file_atomic((std::filesystem::path(labeled_dir) / (name + ".jsonl")).string(), buffer.str());
            }
        }
        if (g.verbosity > 0)
            for (const auto& [name, ids] : split.parts)
                err << name << ": " << ids.size() << " articles\n";
    }
};

struct ExtractCommand
{
    std::string dataset;
    std::string out_path;
    ExtractionConfig config;
    std::string endpoint;
    double timeout = 120.0;

    void attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("extract", "Extract tuples through a chat-completion endpoint");
        sub->add_option("--dataset", dataset, "Dataset JSON Lines file")->required();
        sub->add_option("--out", out_path, "Tuples JSON Lines output (resumable)")->required();
        sub->add_option("--model", config.model_id, "Model id sent to the endpoint")->required();
        sub->add_option("--temperature", config.temperature, "Sampling temperature")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        sub->add_option("--endpoint", endpoint, "Chat-completions URL (else FAKECTI_LLM_ENDPOINT)");
        sub->add_option("--concurrency", config.concurrency_limit, "Requests in flight")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_option("--max-retries", config.max_retries, "Extra attempts per article")->capture_default_str();
        sub->add_option("--timeout", timeout, "Request timeout in seconds")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--max-chars", config.max_input_chars, "Article text cap in bytes")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sub->add_flag("--prepend-title", config.prepend_title, "Send the title before the article text");
    }

    void run(const GlobalOptions& g, std::ostream& err)
    {
        config.request_timeout_seconds = timeout;
        config.validate();
        if (config.unusual_temperature())
            err << "warning: temperature " << config.temperature << " is outside the studied settings {0, 0.3, 0.6}\n";
        const auto ds = load_dataset(dataset);
        std::unique_ptr<HttpChatClient> client =
            endpoint.empty() ? HttpChatClient::from_environment(config.endpoint, timeout)
                             : std::make_unique<HttpChatClient>(endpoint, env_value("FAKECTI_LLM_API_KEY"), timeout);
        config.endpoint = client->endpoint();
        const auto result = extract_corpus(ds, config, *client, out_path);
        for (const auto& r : result.results)
            if (!r.message.empty() && (g.verbosity > 0 || r.status != ExtractionStatus::Ok))
                err << "warning: " << r.article_id << ": " << r.message << "\n";
        err << "extracted " << result.results.size() - result.failures.size() << " articles, skipped "
            << result.skipped_existing << " already done, " << result.failures.size() << " failed, "
            << result.requests_issued << " requests\n";
        if (!result.failures.empty())
            throw Error(ErrorCode::TransportFailure,
                        std::to_string(result.failures.size()) + " articles failed; rerun to retry them");
    }
};

struct ScoreCommand
{
    std::string tuples;
    std::string gold;
    std::string judgments;
    std::string journal;
    std::string out_path;

    void attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("score-extraction", "Accuracy/coverage from human judgments");
        sub->add_option("--tuples", tuples, "Tuples JSON Lines file")->required();
        sub->add_option("--gold", gold, "Concept gold JSON Lines file")->required();
        sub->add_option("--judgments", judgments, "Judgments JSON Lines file")->required();
        sub->add_option("--journal", journal, "Extraction journal for timing (default <tuples>.progress.jsonl)");
        sub->add_option("--out", out_path, "Report JSON (default: output stream)");
    }

    void run(std::ostream& out) const
    {
        const auto seconds = load_extraction_seconds(journal.empty() ? progress_journal_path(tuples) : journal);
        const auto report = score_extraction(load_tuples(tuples), load_concept_gold(gold), load_judgments(judgments), seconds);
        emit(out_path, quality_report_json(report), out);
    }
};

std::vector<LabeledText> labeled_references(const TupleSet& train, const std::optional<Dataset>& dataset)
{
    std::vector<LabeledText> refs;
    for (const auto& group : train.groups())
        for (const auto& t : group.tuples)
        {
            std::optional<std::string> campaign = t.campaign;
            if (!campaign && dataset)
                if (const auto* article = dataset->find(group.article_id); article && article->labeled())
                    campaign = article->campaign;
            if (!campaign)
                throw Error(ErrorCode::InvalidSpec,
                            "training tuple of " + group.article_id + " has no campaign (add a campaign key or --dataset)");
            refs.push_back(LabeledText{*campaign, tuple_text(t)});
        }
    return refs;
}

struct AttributeCommand
{
    std::string tuples;
    std::string train_tuples;
    std::string dataset;
    std::string out_path;
    AttributionOptions attribution;
    ProviderOptions provider;

    void attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("attribute", "Attribute articles to campaigns");
        sub->add_option("--tuples", tuples, "Tuples of the articles to attribute")->required();
        sub->add_option("--train-tuples", train_tuples, "Reference tuples (campaign key or --dataset labels)");
        sub->add_option("--dataset", dataset, "Dataset providing campaign labels for --train-tuples");
        sub->add_option("--out", out_path, "Attribution JSON Lines output")->required();
        add_attribution_flags(sub, attribution, true);
        add_provider_flags(sub, provider);
    }

    void run(std::ostream& err) const
    {
        const Method method = parse_method(attribution.method);
        const auto config = make_attribution_config(attribution);
        const auto targets = load_tuples(tuples);
        std::string lines;

        if (method == Method::Neural)
        {
            PredictionBatch batch;
            if (!attribution.predictions.empty())
                batch = load_predictions(attribution.predictions);
            else
            {
                std::vector<PredictItem> items;
                for (const auto& g : targets.groups())
                    for (const auto& t : g.tuples)
                        items.push_back(PredictItem{g.article_id, tuple_text(t)});
                if (!items.empty())
                    batch = ClassifierClient::from_environment()->predict(items);
            }
            const auto grouped = batch.by_article();
            for (const auto& g : targets.groups())
            {
                std::span<const TuplePrediction> preds;
                if (auto it = grouped.find(g.article_id); it != grouped.end() && !g.tuples.empty())
                    preds = it->second;
                lines += attribution_json_line(attribute_neural(g.article_id, preds, batch.labels)) + "\n";
            }
            write_file_atomic(out_path, lines);
            return;
        }

        if (train_tuples.empty())
            throw UsageError("--train-tuples is required for --method " + attribution.method);
        std::optional<Dataset> labels;
        if (!dataset.empty())
            labels = load_dataset(dataset);
        const auto refs = labeled_references(load_tuples(train_tuples), labels);

        std::vector<std::string> texts;
        for (const auto& g : targets.groups())
            for (const auto& t : g.tuples)
                texts.push_back(tuple_text(t));

        std::optional<CampaignIndex> index;
        std::vector<Embedding> vectors;
        if (modality_of(method) == Modality::Lexical)
        {
            std::vector<std::string> train_texts;
            for (const auto& r : refs)
                train_texts.push_back(r.text);
            const auto model = TfidfModel::fit(train_texts);
            index.emplace(build_campaign_index(refs, model));
            for (const auto& text : texts)
                vectors.emplace_back(model.transform(text));
        }
        else
        {
            auto p = make_provider(provider);
            auto cache = make_cache(provider);
            index.emplace(build_campaign_index(refs, *p, *cache));
            for (auto& v : embed_with_provider(*p, texts, *cache))
                vectors.emplace_back(std::move(v));
        }

        std::size_t offset = 0;
        std::size_t unclassified = 0;
        for (const auto& g : targets.groups())
        {
            const auto slice = std::span<const Embedding>(vectors).subspan(offset, g.tuples.size());
            offset += g.tuples.size();
            const auto result = method == Method::TfidfThreshold ? attribute_thresholding(g.article_id, slice, *index, config)
                                                                 : attribute_voting(g.article_id, slice, *index, config);
            unclassified += result.unclassified() ? 1 : 0;
            lines += attribution_json_line(result) + "\n";
        }
        write_file_atomic(out_path, lines);
        err << "attributed " << targets.groups().size() << " articles, " << unclassified << " unclassified\n";
    }
};

struct ExperimentOptions
{
    std::string dataset;
    std::string tuples;
    std::string test_tuples;
    std::string fractions = "train=0.66,test=0.34";
    std::string mode = "stratified";
    std::size_t reps = 5;
    std::string out_path;
    AttributionOptions attribution;
    ProviderOptions provider;

    void attach(CLI::App* sub)
    {
        sub->add_option("--dataset", dataset, "Labeled dataset JSON Lines file")->required();
        sub->add_option("--tuples", tuples, "Tuples JSON Lines file")->required();
        sub->add_option("--test-tuples", test_tuples, "Alternative tuples for test articles");
        sub->add_option("--fractions", fractions, "Parts and fractions")->capture_default_str();
        sub->add_option("--mode", mode, "stratified | campaign")
            ->check(CLI::IsMember({"stratified", "campaign"}))
            ->capture_default_str();
        sub->add_option("--reps", reps, "Repetitions (seed, seed+1, ...)")->check(CLI::PositiveNumber)->capture_default_str();
        add_provider_flags(sub, provider);
    }

    ExperimentSpec spec(const GlobalOptions& g, std::vector<double> taus) const
    {
        ExperimentSpec s;
        s.method = parse_method(attribution.method);
        s.split = SplitSpec{parse_fractions(fractions), g.seed, parse_split_mode(mode)};
        s.repetitions = reps;
        s.taus = std::move(taus);
        AttributionOptions a = attribution;
        a.tau = s.taus.front();
        s.attribution = make_attribution_config(a);
        s.validate();
        return s;
    }

    /// Loads inputs and runs `body` with fully wired resources.
    template <typename Body>
    void with_resources(const ExperimentSpec& spec, Body&& body) const
    {
        const auto ds = load_dataset(dataset);
        const auto ts = load_tuples(tuples);
        std::optional<TupleSet> alt;
        if (!test_tuples.empty())
            alt = load_tuples(test_tuples);

        ExperimentResources resources;
        resources.test_tuples = alt ? &*alt : nullptr;
        std::unique_ptr<EmbeddingProvider> p;
        std::unique_ptr<EmbeddingCache> cache;
        std::optional<PredictionBatch> predictions;
        std::unique_ptr<ClassifierClient> classifier;
        if (spec.method == Method::Semantic)
        {
            p = make_provider(provider);
            cache = make_cache(provider);
            resources.provider = p.get();
            resources.cache = cache.get();
        }
        else if (spec.method == Method::Neural)
        {
            if (!attribution.predictions.empty())
            {
                predictions = load_predictions(attribution.predictions);
                resources.predictions = &*predictions;
            }
            else
            {
                classifier = ClassifierClient::from_environment();
                resources.classifier = classifier.get();
            }
        }
        body(ds, ts, resources);
    }
};

struct EvalCommand
{
    ExperimentOptions options;

    void attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("eval", "Repeated split evaluation at one tau");
        options.attach(sub);
        add_attribution_flags(sub, options.attribution, true);
        sub->add_option("--out", options.out_path, "Report JSON (default: output stream)");
    }

    void run(const GlobalOptions& g, std::ostream& out) const
    {
        const auto spec = options.spec(g, {options.attribution.tau});
        options.with_resources(spec, [&](const Dataset& ds, const TupleSet& ts, const ExperimentResources& res) {
            emit(options.out_path, eval_report_json(evaluate(spec, ds, ts, res)), out);
        });
    }
};

struct SweepCommand
{
    ExperimentOptions options;
    double tau_min = 0.1;
    double tau_max = 0.9;
    double tau_step = 0.05;
    std::string json_out;

    void attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("sweep", "Accuracy across a tau range");
        options.attach(sub);
        add_attribution_flags(sub, options.attribution, false);
        sub->add_option("--tau-min", tau_min, "First tau")->check(CLI::Range(0.0, 1.0))->capture_default_str();
        sub->add_option("--tau-max", tau_max, "Last tau")->check(CLI::Range(0.0, 1.0))->capture_default_str();
        sub->add_option("--tau-step", tau_step, "Tau increment")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--out", options.out_path, "Sweep CSV (default: output stream)");
        sub->add_option("--json-out", json_out, "Full per-tau reports as JSON");
    }

    void run(const GlobalOptions& g, std::ostream& out) const
    {
        const auto spec = options.spec(g, tau_range(tau_min, tau_max, tau_step));
        options.with_resources(spec, [&](const Dataset& ds, const TupleSet& ts, const ExperimentResources& res) {
            const auto result = sweep(spec, ds, ts, res);
            emit(options.out_path, sweep_csv(result), out);
            if (!json_out.empty())
                write_file_atomic(json_out, sweep_report_json(result));
        });
    }
};

struct GraphCommand
{
    std::string tuples;
    std::string article_id;
    std::string out_path;

    void attach(CLI::App& app)
    {
        auto* sub = app.add_subcommand("graph", "DOT entity graph of one article");
        sub->add_option("--tuples", tuples, "Tuples JSON Lines file")->required();
        sub->add_option("--article-id", article_id, "Article id")->required();
        sub->add_option("--out", out_path, "DOT output (default: output stream)");
    }

    void run(std::ostream& out) const
    {
        const auto ts = load_tuples(tuples);
        const auto* group = ts.find(article_id);
        if (group == nullptr)
            throw Error(ErrorCode::EmptyArticle, article_id + " has no tuples");
        emit(out_path, export_graph(*group), out);
    }
};

} // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Concept-based CTI indicators and disinformation campaign attribution", "fakecti"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file (flags override file values)");

    GlobalOptions global;
    app.add_flag("-v,--verbose", global.verbosity, "More diagnostics");
    app.add_option("--seed", global.seed, "Seed for every randomized step")->capture_default_str();

    StatsCommand stats;
    SplitCommand split;
    ExtractCommand extract;
    ScoreCommand score;
    AttributeCommand attribute;
    EvalCommand eval;
    SweepCommand sweep_cmd;
    GraphCommand graph;
    stats.attach(app);
    split.attach(app);
    extract.attach(app);
    score.attach(app);
    attribute.attach(app);
    eval.attach(app);
    sweep_cmd.attach(app);
    graph.attach(app);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&)
    {
        out << synopsis(app);
        return kExitOk;
    }
    catch (const CLI::CallForAllHelp&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    }
    catch (const CLI::ParseError& e)
    {
        const auto extras = app.remaining();
        if (app.get_subcommands().empty() && !extras.empty())
            err << "error: unknown subcommand '" << extras.front() << "'\n\n" << synopsis(app);
        else
            err << "error: " << e.what() << "\n\n" << synopsis(app);
        return kExitUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try
    {
        if (name == "stats")
            stats.run(out);
        else if (name == "split")
            split.run(global, err);
        else if (name == "extract")
            extract.run(global, err);
        else if (name == "score-extraction")
            score.run(out);
        else if (name == "attribute")
            attribute.run(err);
        else if (name == "eval")
            eval.run(global, out);
        else if (name == "sweep")
            sweep_cmd.run(global, out);
        else if (name == "graph")
            graph.run(out);
    }
    catch (const UsageError& e)
    {
        const auto extras = app.remaining();
        if (app.get_subcommands().empty() && !extras.empty())
            err << "error: unknown subcommand '" << extras.front() << "'\n\n" << synopsis(app);
        else
            err << "error: " << e.what() << "\n\n" << synopsis(app);
        return kExitUsage;
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace fakecti::cli
