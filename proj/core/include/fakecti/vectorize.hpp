#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace fakecti
{

/// Lowercases ASCII letters and splits on every maximal run of ASCII
/// non-alphanumeric characters. Bytes >= 0x80 are kept inside tokens so
/// non-English words survive intact. No stop words, no stemming.
std::vector<std::string> tokenize(std::string_view text);

class Vocabulary
{
  public:
    /// Returns the column of `term`, inserting it at the end when new.
    std::uint32_t add(const std::string& term);
    /// -1 when absent.
    std::int64_t find(std::string_view term) const;

    std::size_t size() const noexcept
    {
        return terms_.size();
    }
    const std::string& term(std::uint32_t index) const
    {
        return terms_.at(index);
    }
    const std::vector<std::string>& terms() const noexcept
    {
        return terms_;
    }

  private:
    struct Hash
    {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept
        {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
};

/// Sparse vector over a vocabulary of `dimension` columns with strictly
/// increasing indices.
struct SparseVector
{
    std::size_t dimension = 0;
    std::vector<std::pair<std::uint32_t, double>> entries;

    double norm() const noexcept;
    bool is_zero() const noexcept;
};

struct DenseVector
{
    std::vector<double> values;

    std::size_t dimension() const noexcept
    {
        return values.size();
    }
    double norm() const noexcept;
    bool is_zero() const noexcept;
};

/// Scales to unit L2 norm; all-zero vectors are left untouched.
void l2_normalize(SparseVector& v) noexcept;
void l2_normalize(DenseVector& v) noexcept;

/// Smooth-idf TF-IDF: idf(t) = ln((1 + N) / (1 + df(t))) + 1, raw term counts,
/// L2-normalized output. Vocabulary is in first-appearance order.
class TfidfModel
{
  public:
    /// Throws Error(EmptyCorpus) when `documents` is empty.
    static TfidfModel fit(const std::vector<std::string>& documents);

    /// Out-of-vocabulary terms are ignored; an all-OOV document maps to zero.
    SparseVector transform(std::string_view document) const;

    const Vocabulary& vocabulary() const noexcept
    {
        return vocabulary_;
    }
    const std::vector<double>& idf() const noexcept
    {
        return idf_;
    }
    std::size_t document_count() const noexcept
    {
        return document_count_;
    }
    /// idf of `term`; throws std::out_of_range when the term is unknown.
    double idf(std::string_view term) const;

  private:
    Vocabulary vocabulary_;
    std::vector<double> idf_;
    std::size_t document_count_ = 0;
};

/// A vector of either modality. Attribution indices hold one alternative only.
using Embedding = std::variant<SparseVector, DenseVector>;

/// dot(x, y) / (|x| |y|), clamped to [-1, 1]; 0 when either side is all-zero.
/// Throws Error(DimensionMismatch) for differing dimensions and
/// Error(ModalityMismatch) for a sparse/dense pair.
double cosine(const SparseVector& x, const SparseVector& y);
double cosine(const DenseVector& x, const DenseVector& y);
double cosine(const Embedding& x, const Embedding& y);

bool is_zero(const Embedding& v) noexcept;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

} // namespace fakecti
