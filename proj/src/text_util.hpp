#pragma once

// Line-oriented tokenizing shared by the text format parsers.

#include "nupnsat/error.hpp"

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nupnsat::detail {

/// Calls `fn(line_number, tokens)` for each non-blank line after stripping
/// `#` comments and a trailing CR.
template <class Fn>
void for_each_line(std::string_view text, char comment, Fn&& fn)
{
    std::size_t line_no = 0;
    std::vector<std::string_view> tokens;
    while (!text.empty()) {
        ++line_no;
        auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (comment != '\0') {
            if (auto c = line.find(comment); c != std::string_view::npos)
                line = line.substr(0, c);
        }
        tokens.clear();
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
                ++i;
            std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t')
                ++i;
            if (i > start)
                tokens.push_back(line.substr(start, i - start));
        }
        if (!tokens.empty())
            fn(line_no, tokens);
    }
}

inline bool is_valid_name(std::string_view name)
{
    if (name.empty())
        return false;
    for (char c : name) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.'
            || c == '-';
        if (!ok)
            return false;
    }
    return true;
}

template <class Int>
bool parse_int(std::string_view token, Int& out)
{
    if (!token.empty() && token.front() == '+')
        token.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

} // namespace nupnsat::detail
