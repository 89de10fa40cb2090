#include "fakecti/embedding.hpp"

#include <cstdio>
#include <fstream>
#include <mutex>
#include <unordered_map>

#include <json.hpp>

#include "fakecti/error.hpp"
#include "http.hpp"
#include "json_lines.hpp"
#include "text_util.hpp"

namespace fakecti
{

DenseVector stub_embed(std::string_view text, std::size_t dimension, const SynonymMap* synonyms)
{
    if (dimension < 2)
        throw Error(ErrorCode::InvalidSpec, "stub embedding dimension must be at least 2");
    DenseVector v;
    v.values.assign(dimension, 0.0);
    for (const auto& token : tokenize(text))
    {
        std::string_view canonical = token;
        if (synonyms != nullptr)
            if (auto it = synonyms->find(token); it != synonyms->end())
                canonical = it->second;
        v.values[fnv1a64(canonical) % dimension] += 1.0;
    }
    l2_normalize(v);
    return v;
}

SynonymMap load_synonym_map(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot open synonym map " + path);
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw Error(ErrorCode::MalformedLine, path + ": " + e.what());
    }
    if (!doc.is_object())
        throw Error(ErrorCode::MalformedLine, path + ": synonym map must be a JSON object");
    SynonymMap map;
    for (const auto& [key, value] : doc.items())
    {
        if (!value.is_string())
            throw Error(ErrorCode::MalformedLine, path + ": synonym for '" + key + "' is not a string");
        map[detail::lower_ascii(key)] = detail::lower_ascii(value.get<std::string>());
    }
    return map;
}

StubEmbeddingProvider::StubEmbeddingProvider(std::size_t dimension, SynonymMap synonyms)
    : dimension_(dimension), synonyms_(std::move(synonyms))
{
    if (dimension_ < 2)
        throw Error(ErrorCode::InvalidSpec, "stub embedding dimension must be at least 2");
    // Order-independent fingerprint so differently configured stubs never share cache entries.
    for (const auto& [from, to] : synonyms_)
        synonym_fingerprint_ ^= fnv1a64(from + '\x1f' + to) * 0x9e3779b97f4a7c15ULL;
}

std::string StubEmbeddingProvider::identity() const
{
    std::string id = "stub:" + std::to_string(dimension_);
    if (!synonyms_.empty())
    {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(synonym_fingerprint_));
        id += ":syn-";
        id += buf;
    }
    return id;
}

std::vector<DenseVector> StubEmbeddingProvider::embed_batch(const std::vector<std::string>& texts)
{
    std::vector<DenseVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts)
        out.push_back(stub_embed(t, dimension_, synonyms_.empty() ? nullptr : &synonyms_));
    return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(std::string endpoint, std::string model, std::size_t dimension,
                                                 std::optional<std::string> api_key, double timeout_seconds,
                                                 std::size_t max_batch)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), dimension_(dimension), api_key_(std::move(api_key)),
      timeout_seconds_(timeout_seconds), max_batch_(std::max<std::size_t>(1, max_batch))
{
    detail::split_url(endpoint_);
}

std::unique_ptr<RemoteEmbeddingProvider> RemoteEmbeddingProvider::from_environment(std::string endpoint,
                                                                                   std::string model,
                                                                                   std::size_t dimension)
{
    return std::make_unique<RemoteEmbeddingProvider>(std::move(endpoint), std::move(model), dimension,
                                                     detail::env("FAKECTI_EMBED_API_KEY"));
}

std::string RemoteEmbeddingProvider::identity() const
{
    return "remote:" + model_ + "@" + endpoint_;
}

std::vector<DenseVector> RemoteEmbeddingProvider::embed_batch(const std::vector<std::string>& texts)
{
    std::vector<DenseVector> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += max_batch_)
    {
        const std::size_t end = std::min(texts.size(), start + max_batch_);
        nlohmann::ordered_json body;
        body["input"] = std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                                 texts.begin() + static_cast<std::ptrdiff_t>(end));
        body["model"] = model_;

        detail::HttpResponse response;
        try
        {
            response = detail::http_post_json(endpoint_, body.dump(), api_key_, timeout_seconds_);
        }
        catch (const Error& e)
        {
            throw Error(ErrorCode::ProviderFailure, e.what());
        }
        if (response.status < 200 || response.status >= 300)
            throw Error(ErrorCode::ProviderFailure, endpoint_ + " returned HTTP " + std::to_string(response.status));

        try
        {
            const auto doc = nlohmann::json::parse(response.body);
            const auto& data = doc.at("data");
            if (!data.is_array() || data.size() != end - start)
                throw Error(ErrorCode::ProviderFailure, "embedding response has " +
                                                            std::to_string(data.is_array() ? data.size() : 0) +
                                                            " vectors for " + std::to_string(end - start) + " inputs");
            for (const auto& item : data)
            {
                DenseVector v;
                v.values = item.at("embedding").get<std::vector<double>>();
                out.push_back(std::move(v));
            }
        }
        catch (const nlohmann::json::exception& e)
        {
            throw Error(ErrorCode::ProviderFailure, std::string("malformed embedding response: ") + e.what());
        }
    }
    return out;
}

EmbeddingCache::EmbeddingCache(std::string path) : path_(std::move(path))
{
    std::ifstream in(path_);
    if (!in)
        return;
    detail::for_each_json_line(in, "embedding cache", [&](const nlohmann::json& record, std::size_t line) {
        const std::string where = "embedding cache line " + std::to_string(line);
        const auto provider = detail::required_string(record, "provider", where);
        const auto hash_text = detail::required_string(record, "text_hash", where);
        DenseVector v;
        try
        {
            v.values = record.at("vector").get<std::vector<double>>();
        }
        catch (const nlohmann::json::exception&)
        {
            throw Error(ErrorCode::MalformedLine, where + ": bad vector");
        }
        entries_[{provider, std::stoull(hash_text, nullptr, 16)}] = std::move(v);
    });
}

std::optional<DenseVector> EmbeddingCache::get(const std::string& provider, std::string_view text) const
{
    std::shared_lock lock(mutex_);
    auto it = entries_.find({provider, fnv1a64(text)});
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

void EmbeddingCache::put(const std::string& provider, std::string_view text, const DenseVector& vector)
{
    const auto hash = fnv1a64(text);
    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.insert_or_assign({provider, hash}, vector);
    (void)it;
    if (!inserted || path_.empty())
        return;
    std::ofstream out(path_, std::ios::app);
    if (!out)
        throw Error(ErrorCode::IoFailure, "cannot append to embedding cache " + path_);
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    nlohmann::ordered_json record;
    record["provider"] = provider;
    record["text_hash"] = buf;
    record["vector"] = vector.values;
    out << record.dump() << '\n';
}

std::size_t EmbeddingCache::size() const
{
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::vector<DenseVector> embed_with_provider(EmbeddingProvider& provider, const std::vector<std::string>& texts,
                                             EmbeddingCache& cache)
{
    const std::string identity = provider.identity();
    std::vector<std::optional<DenseVector>> resolved(texts.size());
    std::vector<std::string> missing;
    std::unordered_map<std::string, std::size_t> missing_index;
    for (std::size_t i = 0; i < texts.size(); ++i)
    {
        resolved[i] = cache.get(identity, texts[i]);
        if (resolved[i] && resolved[i]->dimension() != provider.dimension())
            resolved[i].reset();
        if (!resolved[i] && missing_index.emplace(texts[i], missing.size()).second)
            missing.push_back(texts[i]);
    }

    if (!missing.empty())
    {
        auto fetched = provider.embed_batch(missing);
        if (fetched.size() != missing.size())
            throw Error(ErrorCode::DimensionMismatch, "provider returned " + std::to_string(fetched.size()) +
                                                          " vectors for " + std::to_string(missing.size()) + " texts");
        for (std::size_t k = 0; k < fetched.size(); ++k)
        {
            if (fetched[k].dimension() != provider.dimension())
                throw Error(ErrorCode::DimensionMismatch, "provider returned dimension " +
                                                              std::to_string(fetched[k].dimension()) + ", expected " +
                                                              std::to_string(provider.dimension()));
            l2_normalize(fetched[k]);
            cache.put(identity, missing[k], fetched[k]);
        }
        for (std::size_t i = 0; i < texts.size(); ++i)
            if (!resolved[i])
                resolved[i] = fetched[missing_index.at(texts[i])];
    }

    std::vector<DenseVector> out;
    out.reserve(texts.size());
    for (auto& r : resolved)
    {
        l2_normalize(*r);
        out.push_back(std::move(*r));
    }
    return out;
}

} // namespace fakecti
