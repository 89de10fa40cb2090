#include <fstream>

#include <json.hpp>

#include "fakecti/corpus.hpp"
#include "fakecti/error.hpp"
#include "json_lines.hpp"

namespace fakecti
{

Dataset parse_dataset(std::istream& in)
{
    std::vector<Article> articles;
    detail::for_each_json_line(in, "dataset", [&](const nlohmann::json& record, std::size_t line) {
        const std::string where = "dataset line " + std::to_string(line);
        Article a;
        a.id = detail::optional_string(record, "id", where).value_or("row-" + std::to_string(line));
        if (a.id.empty())
            throw Error(ErrorCode::MalformedLine, where + ": empty id");
        a.title = detail::optional_string(record, "title", where).value_or("");
        a.text = detail::required_string(record, "text", where);
        if (detail::trim(a.text).empty())
            throw Error(ErrorCode::EmptyText, a.id);
        a.link = detail::optional_string(record, "link", where);
        auto campaign = detail::optional_string(record, "campaign", where);
        a.campaign = campaign && !detail::trim(*campaign).empty() ? *campaign : std::string(kUnlabeled);
        a.threat_actor = detail::optional_string(record, "threat_actor", where);
        a.medium = detail::optional_string(record, "medium", where);
        articles.push_back(std::move(a));
    });
    return Dataset(std::move(articles));
}

Dataset load_dataset(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot open dataset " + path);
    return parse_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& dataset)
{
    for (const auto& a : dataset.articles())
    {
        nlohmann::ordered_json record;
        record["id"] = a.id;
        record["title"] = a.title;
        record["text"] = a.text;
        if (a.link)
            record["link"] = *a.link;
        record["campaign"] = a.campaign;
        if (a.threat_actor)
            record["threat_actor"] = *a.threat_actor;
        if (a.medium)
            record["medium"] = *a.medium;
        out << record.dump() << '\n';
    }
}

} // namespace fakecti
