#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fakecti
{

/// A concept-based indicator: <subject, relation, object> bound to its article.
struct ExtractedTuple
{
    std::string article_id;
    std::string subject;
    std::string relation;
    std::string object;
    /// Optional campaign label carried by labeled reference tuple files.
    std::optional<std::string> campaign;

    friend bool operator==(const ExtractedTuple&, const ExtractedTuple&) = default;
};

/// Space-joined "subject relation object" used as the document for
/// vectorization and for the classifier service.
std::string tuple_text(const ExtractedTuple& tuple);

struct ArticleTuples
{
    std::string article_id;
    std::vector<ExtractedTuple> tuples;
};

/// Tuples grouped by article. Groups keep first-appearance order and each
/// group keeps its tuples in extraction order.
class TupleSet
{
  public:
    TupleSet() = default;
    explicit TupleSet(const std::vector<ExtractedTuple>& tuples);

    void add(ExtractedTuple tuple);
    /// Registers an article with no tuples (an empty extraction).
    void ensure_group(const std::string& article_id);

    const std::vector<ArticleTuples>& groups() const noexcept
    {
        return groups_;
    }
    const ArticleTuples* find(std::string_view article_id) const;
    bool contains(std::string_view article_id) const
    {
        return find(article_id) != nullptr;
    }
    std::size_t tuple_count() const noexcept;

  private:
    std::vector<ArticleTuples> groups_;
    std::unordered_map<std::string, std::size_t> index_;
};

// JSON Lines: article_id, subject, relation, object (+ optional campaign).
TupleSet load_tuples(const std::string& path);
TupleSet parse_tuples_jsonl(std::istream& in);
void write_tuples(std::ostream& out, const TupleSet& tuples);

} // namespace fakecti
