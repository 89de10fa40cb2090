#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fakecti/tuples.hpp"

namespace fakecti
{

/// Entity graph of one article: nodes are distinct subject/object strings,
/// one directed edge per tuple labeled with its relation.
struct TupleGraph
{
    struct Edge
    {
        std::size_t from = 0;
        std::size_t to = 0;
        std::string label;
    };

    std::string name;
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
};

/// Nodes in first-appearance order. Throws Error(EmptyArticle) with no tuples.
TupleGraph build_graph(std::string name, std::span<const ExtractedTuple> tuples);

/// DOT digraph with node ids n0..nk.
std::string to_dot(const TupleGraph& graph);

inline std::string export_graph(const ArticleTuples& article)
{
    return to_dot(build_graph(article.article_id, article.tuples));
}

} // namespace fakecti
