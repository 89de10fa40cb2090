#include "fakecti/prompt.hpp"

#include <cctype>

#include "fakecti/error.hpp"
#include "text_util.hpp"

namespace fakecti
{

namespace
{

constexpr std::string_view kTemplate =
    "Role: You are a natural language processing expert specialized in analyzing textual data and extracting "
    "structured information. Your task is to identify subject-relation-object relationships from the input text, "
    "which represent key actions and relationships between entities. These tuples will be used for structured "
    "representation of fake news articles.\n"
    "\n"
    "Context: Subject-relation-object relationships capture the fundamental structure of actions and relationships "
    "described in a sentence. In these relationships, the subject represents the entity performing an action, the "
    "verb describes the action or relationship, and the object represents the entity affected by the action. "
    "Identifying these relationships helps in organizing unstructured textual data into a structured format, "
    "enabling easier analysis and interpretation.\n"
    "\n"
    "Example: Text: \"John gave a book to Mary.\"\n"
    "Tuple: John - gave - a book to Mary\n"
    "\n"
    "Instructions: Read the following text and identify all the tuples in the subject-verb-object form. The tuples "
    "should reflect the main actions and relationships between the entities mentioned in the text. Follow these "
    "steps:\n"
    "1. Identify the subject of the action.\n"
    "2. Identify the verb that describes the action or relationship.\n"
    "3. Identify the object or destination of the action.\n"
    "Return the tuples in this format: Subject - Relation - Object. At the end of the process, print \"END LIST\" "
    "to indicate the conclusion of the extraction.\n"
    "\n"
    "Text: ";

// "-", "*", "•", "1.", "12)" followed by whitespace.
std::string_view strip_list_marker(std::string_view line)
{
    std::size_t n = 0;
    if (line.starts_with("-") || line.starts_with("*"))
        n = 1;
    else if (line.starts_with("\xE2\x80\xA2"))
        n = 3;
    else
    {
        while (n < line.size() && std::isdigit(static_cast<unsigned char>(line[n])))
            ++n;
        if (n == 0 || n >= line.size() || (line[n] != '.' && line[n] != ')'))
            return line;
        ++n;
    }
    if (n >= line.size() || !detail::is_space(line[n]))
        return line;
    return detail::trim(line.substr(n));
}

std::string_view strip_tuple_label(std::string_view line)
{
    constexpr std::string_view label = "tuple:";
    if (line.size() < label.size())
        return line;
    for (std::size_t i = 0; i < label.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(line[i])) != label[i])
            return line;
    return detail::trim(line.substr(label.size()));
}

} // namespace

std::string_view prompt_template() noexcept
{
    return kTemplate;
}

std::string build_prompt(std::string_view article_text)
{
    if (detail::trim(article_text).empty())
        throw Error(ErrorCode::EmptyInput, "article text is empty");
    std::string prompt;
    prompt.reserve(kTemplate.size() + article_text.size());
    prompt.append(kTemplate);
    prompt.append(article_text);
    return prompt;
}

ParsedCompletion parse_tuples(std::string_view completion, std::string_view article_id)
{
    ParsedCompletion out;
    while (!completion.empty())
    {
        auto nl = completion.find('\n');
        std::string_view line = detail::trim(completion.substr(0, nl));
        completion = nl == std::string_view::npos ? std::string_view{} : completion.substr(nl + 1);

        if (line == kEndListMarker)
        {
            out.saw_end_marker = true;
            break;
        }
        if (line.empty())
            continue;

        line = strip_tuple_label(strip_list_marker(line));
        auto first = line.find(kTupleDelimiter);
        auto second = first == std::string_view::npos ? first : line.find(kTupleDelimiter, first + kTupleDelimiter.size());
        if (second == std::string_view::npos)
        {
            ++out.skipped_lines;
            continue;
        }
        auto subject = detail::trim(line.substr(0, first));
        auto relation = detail::trim(line.substr(first + kTupleDelimiter.size(), second - first - kTupleDelimiter.size()));
        auto object = detail::trim(line.substr(second + kTupleDelimiter.size()));
        if (subject.empty() || relation.empty() || object.empty())
        {
            ++out.skipped_lines;
            continue;
        }
        out.tuples.push_back(ExtractedTuple{std::string(article_id), std::string(subject), std::string(relation),
                                            std::string(object), std::nullopt});
    }
    return out;
}

std::string render_tuple(const ExtractedTuple& tuple)
{
    std::string out = tuple.subject;
    out += kTupleDelimiter;
    out += tuple.relation;
    out += kTupleDelimiter;
    out += tuple.object;
    return out;
}

} // namespace fakecti
