#include "fakecti/tuples.hpp"

#include <fstream>

#include <json.hpp>

#include "fakecti/error.hpp"
#include "json_lines.hpp"
#include "text_util.hpp"

namespace fakecti
{

std::string tuple_text(const ExtractedTuple& tuple)
{
    std::string out(detail::trim(tuple.subject));
    for (std::string_view field : {std::string_view(tuple.relation), std::string_view(tuple.object)})
    {
        auto trimmed = detail::trim(field);
        if (trimmed.empty())
            continue;
        if (!out.empty())
            out += ' ';
        out += trimmed;
    }
    return out;
}

TupleSet::TupleSet(const std::vector<ExtractedTuple>& tuples)
{
    for (const auto& t : tuples)
        add(t);
}

void TupleSet::ensure_group(const std::string& article_id)
{
    if (index_.find(article_id) != index_.end())
        return;
    index_.emplace(article_id, groups_.size());
    groups_.push_back(ArticleTuples{article_id, {}});
}

void TupleSet::add(ExtractedTuple tuple)
{
    ensure_group(tuple.article_id);
    groups_[index_.at(tuple.article_id)].tuples.push_back(std::move(tuple));
}

const ArticleTuples* TupleSet::find(std::string_view article_id) const
{
    auto it = index_.find(std::string(article_id));
    return it == index_.end() ? nullptr : &groups_[it->second];
}

std::size_t TupleSet::tuple_count() const noexcept
{
    std::size_t n = 0;
    for (const auto& g : groups_)
        n += g.tuples.size();
    return n;
}

TupleSet parse_tuples_jsonl(std::istream& in)
{
    TupleSet set;
    detail::for_each_json_line(in, "tuples", [&](const nlohmann::json& record, std::size_t line) {
        const std::string where = "tuples line " + std::to_string(line);
        ExtractedTuple t;
        t.article_id = detail::required_string(record, "article_id", where);
        t.subject = std::string(detail::trim(detail::required_string(record, "subject", where)));
        t.relation = std::string(detail::trim(detail::required_string(record, "relation", where)));
        t.object = std::string(detail::trim(detail::required_string(record, "object", where)));
        if (t.article_id.empty() || t.subject.empty() || t.relation.empty() || t.object.empty())
            throw Error(ErrorCode::MalformedLine, where + ": empty tuple field");
        t.campaign = detail::optional_string(record, "campaign", where);
        set.add(std::move(t));
    });
    return set;
}

TupleSet load_tuples(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot open tuples file " + path);
    return parse_tuples_jsonl(in);
}

void write_tuples(std::ostream& out, const TupleSet& tuples)
{
    for (const auto& group : tuples.groups())
        for (const auto& t : group.tuples)
        {
            nlohmann::ordered_json record;
            record["article_id"] = t.article_id;
            record["subject"] = t.subject;
            record["relation"] = t.relation;
            record["object"] = t.object;
            if (t.campaign)
                record["campaign"] = *t.campaign;
            out << record.dump() << '\n';
        }
}

} // namespace fakecti
