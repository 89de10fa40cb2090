#include "fakecti/classifier_client.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "fakecti/error.hpp"
#include "fakecti/fileio.hpp"
#include "http.hpp"

namespace fakecti
{

std::map<std::string, std::vector<TuplePrediction>> PredictionBatch::by_article() const
{
    std::map<std::string, std::vector<TuplePrediction>> out;
    for (const auto& p : predictions)
        out[p.article_id].push_back(p);
    return out;
}

std::string predict_request_body(const std::vector<PredictItem>& items)
{
    nlohmann::ordered_json body;
    auto tuples = nlohmann::ordered_json::array();
    for (const auto& item : items)
        tuples.push_back({{"article_id", item.article_id}, {"text", item.text}});
    body["tuples"] = std::move(tuples);
    return body.dump();
}

PredictionBatch parse_prediction_batch(const std::string& json_text)
{
    PredictionBatch batch;
    try
    {
        const auto doc = nlohmann::json::parse(json_text);
        if (auto v = doc.find("model_version"); v != doc.end() && v->is_string())
            batch.model_version = v->get<std::string>();
        batch.labels = doc.at("labels").get<std::vector<std::string>>();
        for (const auto& item : doc.at("predictions"))
        {
            TuplePrediction p;
            p.article_id = item.at("article_id").get<std::string>();
            p.argmax = item.at("argmax").get<std::string>();
            if (auto probs = item.find("probs"); probs != item.end())
                p.probs = probs->get<std::vector<double>>();
            batch.predictions.push_back(std::move(p));
        }
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorCode::ProviderFailure, std::string("malformed prediction response: ") + e.what());
    }
    for (const auto& p : batch.predictions)
    {
        if (p.probs.empty())
            continue;
        if (p.probs.size() != batch.labels.size())
            throw Error(ErrorCode::ProviderFailure, "prediction for " + p.article_id + " has " +
                                                        std::to_string(p.probs.size()) + " probabilities for " +
                                                        std::to_string(batch.labels.size()) + " labels");
        double sum = 0.0;
        for (double x : p.probs)
        {
            if (!(x >= 0.0))
                throw Error(ErrorCode::ProviderFailure, "negative probability for " + p.article_id);
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw Error(ErrorCode::ProviderFailure, "probabilities for " + p.article_id + " sum to " + std::to_string(sum));
    }
    return batch;
}

PredictionBatch load_predictions(const std::string& path)
{
    return parse_prediction_batch(read_file(path));
}

ClassifierClient::ClassifierClient(std::string base_url, double timeout_seconds, std::size_t max_batch)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds), max_batch_(std::max<std::size_t>(1, max_batch))
{
    while (base_url_.ends_with('/'))
        base_url_.pop_back();
    detail::split_url(base_url_);
}

std::unique_ptr<ClassifierClient> ClassifierClient::from_environment()
{
    auto url = detail::env("FAKECTI_CLF_URL");
    if (!url)
        throw Error(ErrorCode::InvalidSpec, "FAKECTI_CLF_URL is not set and no predictions file was given");
    return std::make_unique<ClassifierClient>(*url);
}

PredictionBatch ClassifierClient::predict(const std::vector<PredictItem>& items) const
{
    if (items.empty())
        throw Error(ErrorCode::EmptyInput, "no tuples to classify");
    PredictionBatch merged;
    for (std::size_t start = 0; start < items.size(); start += max_batch_)
    {
        const std::size_t end = std::min(items.size(), start + max_batch_);
        std::vector<PredictItem> chunk(items.begin() + static_cast<std::ptrdiff_t>(start),
                                       items.begin() + static_cast<std::ptrdiff_t>(end));
        detail::HttpResponse response;
        try
        {
            response = detail::http_post_json(base_url_ + "/predict", predict_request_body(chunk), std::nullopt,
                                              timeout_seconds_);
        }
        catch (const Error& e)
        {
            throw Error(ErrorCode::ProviderFailure, e.what());
        }
        if (response.status != 200)
            throw Error(ErrorCode::ProviderFailure,
                        "classifier /predict returned HTTP " + std::to_string(response.status) + ": " + response.body);
        auto batch = parse_prediction_batch(response.body);
        if (batch.predictions.size() != chunk.size())
            throw Error(ErrorCode::ProviderFailure, "classifier returned " + std::to_string(batch.predictions.size()) +
                                                        " predictions for " + std::to_string(chunk.size()) + " tuples");
        if (start == 0)
        {
            merged.model_version = batch.model_version;
            merged.labels = batch.labels;
        }
        else if (batch.labels != merged.labels)
            throw Error(ErrorCode::ProviderFailure, "classifier label set changed between requests");
        for (auto& p : batch.predictions)
            merged.predictions.push_back(std::move(p));
    }
    return merged;
}

std::string ClassifierClient::health() const
{
    detail::HttpResponse response;
    try
    {
        response = detail::http_get(base_url_ + "/health", timeout_seconds_);
    }
    catch (const Error& e)
    {
        throw Error(ErrorCode::ProviderFailure, e.what());
    }
    if (response.status != 200)
        throw Error(ErrorCode::ProviderFailure, "classifier /health returned HTTP " + std::to_string(response.status));
    try
    {
        const auto doc = nlohmann::json::parse(response.body);
        if (doc.at("status").get<std::string>() != "ok")
            throw Error(ErrorCode::ProviderFailure, "classifier reports status " + doc.at("status").dump());
        return doc.value("model_version", std::string{});
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error(ErrorCode::ProviderFailure, std::string("malformed health response: ") + e.what());
    }
}

void write_labeled_tuples(std::ostream& out, const Dataset& dataset, const TupleSet& tuples,
                          const std::vector<std::string>& article_ids)
{
    for (const auto& id : article_ids)
    {
        const Article* article = dataset.find(id);
        const ArticleTuples* group = tuples.find(id);
        if (article == nullptr || group == nullptr || !article->labeled())
            continue;
        for (const auto& t : group->tuples)
        {
            nlohmann::ordered_json record;
            record["article_id"] = id;
            record["text"] = tuple_text(t);
            record["campaign"] = article->campaign;
            out << record.dump() << '\n';
        }
    }
}

} // namespace fakecti
