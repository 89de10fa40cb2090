#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fakecti/tuples.hpp"

namespace fakecti
{

inline constexpr std::string_view kEndListMarker = "END LIST";
inline constexpr std::string_view kTupleDelimiter = " - ";

/// Fixed extraction instructions. The article text follows a "Text:" marker.
std::string_view prompt_template() noexcept;

/// Throws Error(EmptyInput) for empty (or whitespace-only) text.
std::string build_prompt(std::string_view article_text);

struct ParsedCompletion
{
    std::vector<ExtractedTuple> tuples;
    std::size_t skipped_lines = 0;
    bool saw_end_marker = false;
};

/// Lenient line parser for "Subject - Relation - Object" completions.
///
/// Lines are scanned top to bottom and scanning stops at the first line whose
/// trimmed content is exactly END LIST. Leading list markers ("-", "*", "•",
/// "1.", "1)") and a leading "Tuple:" label are removed, then the line is split
/// on " - " into at most three parts; the object keeps any further delimiters.
/// Lines that do not yield three non-empty parts are skipped and counted
/// (blank lines are ignored without being counted).
ParsedCompletion parse_tuples(std::string_view completion, std::string_view article_id);

/// Inverse of parse_tuples for a single tuple.
std::string render_tuple(const ExtractedTuple& tuple);

} // namespace fakecti
