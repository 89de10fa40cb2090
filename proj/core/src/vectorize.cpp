#include "fakecti/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fakecti/error.hpp"

namespace fakecti
{

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text)
    {
        const auto c = static_cast<unsigned char>(ch);
        if (c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z'))
            current += ch;
        else if (c >= 'A' && c <= 'Z')
            current += static_cast<char>(c - 'A' + 'a');
        else if (!current.empty())
            tokens.push_back(std::move(current)), current.clear();
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

std::uint32_t Vocabulary::add(const std::string& term)
{
    auto [it, inserted] = index_.try_emplace(term, static_cast<std::uint32_t>(terms_.size()));
    if (inserted)
        terms_.push_back(term);
    return it->second;
}

std::int64_t Vocabulary::find(std::string_view term) const
{
    auto it = index_.find(term);
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

double SparseVector::norm() const noexcept
{
    double sum = 0.0;
    for (const auto& [i, w] : entries)
        sum += w * w;
    return std::sqrt(sum);
}

bool SparseVector::is_zero() const noexcept
{
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.second == 0.0; });
}

double DenseVector::norm() const noexcept
{
    double sum = 0.0;
    for (double v : values)
        sum += v * v;
    return std::sqrt(sum);
}

bool DenseVector::is_zero() const noexcept
{
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

void l2_normalize(SparseVector& v) noexcept
{
    const double n = v.norm();
    if (n == 0.0)
        return;
    for (auto& e : v.entries)
        e.second /= n;
}

void l2_normalize(DenseVector& v) noexcept
{
    const double n = v.norm();
    if (n == 0.0)
        return;
    for (double& x : v.values)
        x /= n;
}

TfidfModel TfidfModel::fit(const std::vector<std::string>& documents)
{
    if (documents.empty())
        throw Error(ErrorCode::EmptyCorpus, "cannot fit TF-IDF on zero documents");

    TfidfModel model;
    model.document_count_ = documents.size();
    std::vector<std::size_t> df;
    std::vector<std::size_t> last_seen;
    for (std::size_t d = 0; d < documents.size(); ++d)
    {
        for (const auto& token : tokenize(documents[d]))
        {
            const auto idx = model.vocabulary_.add(token);
            if (idx == df.size())
            {
                df.push_back(0);
                last_seen.push_back(static_cast<std::size_t>(-1));
            }
            if (last_seen[idx] != d)
            {
                last_seen[idx] = d;
                ++df[idx];
            }
        }
    }

    const double n = static_cast<double>(model.document_count_);
    model.idf_.resize(df.size());
    for (std::size_t i = 0; i < df.size(); ++i)
        model.idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[i]))) + 1.0;
    return model;
}

SparseVector TfidfModel::transform(std::string_view document) const
{
    std::map<std::uint32_t, double> counts;
    for (const auto& token : tokenize(document))
    {
        const auto idx = vocabulary_.find(token);
        if (idx >= 0)
            counts[static_cast<std::uint32_t>(idx)] += 1.0;
    }
    SparseVector v;
    v.dimension = vocabulary_.size();
    v.entries.reserve(counts.size());
    for (const auto& [idx, tf] : counts)
        v.entries.emplace_back(idx, tf * idf_[idx]);
    l2_normalize(v);
    return v;
}

double TfidfModel::idf(std::string_view term) const
{
    const auto idx = vocabulary_.find(term);
    if (idx < 0)
        throw std::out_of_range("term not in vocabulary: " + std::string(term));
    return idf_[static_cast<std::size_t>(idx)];
}

namespace
{

double finish_cosine(double dot, double nx, double ny)
{
    if (nx == 0.0 || ny == 0.0)
        return 0.0;
    return std::clamp(dot / (nx * ny), -1.0, 1.0);
}

} // namespace

double cosine(const SparseVector& x, const SparseVector& y)
{
    if (x.dimension != y.dimension)
        throw Error(ErrorCode::DimensionMismatch, "sparse vectors over vocabularies of size " +
                                                      std::to_string(x.dimension) + " and " + std::to_string(y.dimension));
    double dot = 0.0;
    auto a = x.entries.begin();
    auto b = y.entries.begin();
    while (a != x.entries.end() && b != y.entries.end())
    {
        if (a->first < b->first)
            ++a;
        else if (b->first < a->first)
            ++b;
        else
        {
            dot += a->second * b->second;
            ++a;
            ++b;
        }
    }
    return finish_cosine(dot, x.norm(), y.norm());
}

double cosine(const DenseVector& x, const DenseVector& y)
{
    if (x.dimension() != y.dimension())
        throw Error(ErrorCode::DimensionMismatch, "dense vectors of dimension " + std::to_string(x.dimension()) +
                                                      " and " + std::to_string(y.dimension()));
    double dot = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i)
        dot += x.values[i] * y.values[i];
    return finish_cosine(dot, x.norm(), y.norm());
}

double cosine(const Embedding& x, const Embedding& y)
{
    if (x.index() != y.index())
        throw Error(ErrorCode::ModalityMismatch, "cosine between sparse and dense vectors");
    if (const auto* sx = std::get_if<SparseVector>(&x))
        return cosine(*sx, std::get<SparseVector>(y));
    return cosine(std::get<DenseVector>(x), std::get<DenseVector>(y));
}

bool is_zero(const Embedding& v) noexcept
{
    return std::visit([](const auto& vec) { return vec.is_zero(); }, v);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c : bytes)
    {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

} // namespace fakecti
