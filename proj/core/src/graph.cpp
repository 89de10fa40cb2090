#include "fakecti/graph.hpp"

#include <unordered_map>

#include "fakecti/error.hpp"

namespace fakecti
{

TupleGraph build_graph(std::string name, std::span<const ExtractedTuple> tuples)
{
    if (tuples.empty())
        throw Error(ErrorCode::EmptyArticle, name);
    TupleGraph graph;
    graph.name = std::move(name);
    std::unordered_map<std::string, std::size_t> ids;
    auto node = [&](const std::string& entity) {
        auto [it, inserted] = ids.try_emplace(entity, graph.nodes.size());
        if (inserted)
            graph.nodes.push_back(entity);
        return it->second;
    };
    for (const auto& t : tuples)
    {
        const auto from = node(t.subject);
        const auto to = node(t.object);
        graph.edges.push_back({from, to, t.relation});
    }
    return graph;
}

namespace
{

std::string quoted(std::string_view text)
{
    std::string out = "\"";
    for (char c : text)
    {
        switch (c)
        {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

} // namespace

std::string to_dot(const TupleGraph& graph)
{
    std::string out = "digraph " + quoted(graph.name) + " {\n";
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
        out += "  n" + std::to_string(i) + " [label=" + quoted(graph.nodes[i]) + "];\n";
    for (const auto& e : graph.edges)
        out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) + " [label=" + quoted(e.label) + "];\n";
    out += "}\n";
    return out;
}

} // namespace fakecti
