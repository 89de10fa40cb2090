#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <string>

#include <json.hpp>

#include "fakecti/error.hpp"
#include "text_util.hpp"

namespace fakecti::detail
{

/// Calls `visit(object, line_number)` for every non-blank line. Lines that are
/// not JSON objects raise Error(MalformedLine) naming the 1-based line.
inline void for_each_json_line(std::istream& in, const std::string& what,
                               const std::function<void(const nlohmann::json&, std::size_t)>& visit)
{
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line))
    {
        ++number;
        if (trim(line).empty())
            continue;
        nlohmann::json record;
        try
        {
            record = nlohmann::json::parse(line);
        }
        catch (const nlohmann::json::parse_error& e)
        {
            throw Error(ErrorCode::MalformedLine, what + " line " + std::to_string(number) + ": " + e.what());
        }
        if (!record.is_object())
            throw Error(ErrorCode::MalformedLine, what + " line " + std::to_string(number) + ": not a JSON object");
        visit(record, number);
    }
    if (in.bad())
        throw Error(ErrorCode::IoFailure, "read failure in " + what);
}

/// String field; nullopt when missing or null. Any other type is malformed.
inline std::optional<std::string> optional_string(const nlohmann::json& record, const char* key,
                                                  const std::string& where)
{
    auto it = record.find(key);
    if (it == record.end() || it->is_null())
        return std::nullopt;
    if (!it->is_string())
        throw Error(ErrorCode::MalformedLine, where + ": field \"" + key + "\" is not a string");
    return it->get<std::string>();
}

inline std::string required_string(const nlohmann::json& record, const char* key, const std::string& where)
{
    auto value = optional_string(record, key, where);
    if (!value)
        throw Error(ErrorCode::MalformedLine, where + ": missing field \"" + key + "\"");
    return *value;
}

} // namespace fakecti::detail
