// Copyright 2026 The VAM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vam/errors.hpp"

/// RFC 4180 style delimited text: comma separated, double-quote escaping,
/// CRLF or LF line endings, quoted fields may span lines.
namespace vam::csv {

using Row = std::vector<std::string>;

struct ParsedRow {
    Row fields;
    std::size_t line = 0; ///< 1-based line where the record starts
};

/// Parses a whole document. Blank lines are skipped. An unterminated quote
/// raises ValidationError with the starting line.
inline std::vector<ParsedRow> parse(std::string_view text, char delimiter = ',')
{
    std::vector<ParsedRow> rows;
    ParsedRow current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        bool blank = current.fields.empty() && field.empty() && !field_started;
        if (!blank) {
            end_field();
            rows.push_back(std::move(current));
        }
        current = ParsedRow{};
        current.line = line;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n')
                    ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty() && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == delimiter) {
            end_field();
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            continue;
        } else if (c == '\n') {
            ++line;
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes)
        throw ValidationError("unterminated quoted field starting in record at line " + std::to_string(current.line));
    end_record();
    return rows;
}

inline std::string escape(std::string_view field, char delimiter = ',')
{
    bool needs_quotes = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos;
    if (!needs_quotes && !field.empty() && (field.front() == ' ' || field.back() == ' '))
        needs_quotes = true;
    if (!needs_quotes)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += "\"\"";
        else
            out += c;
    }
    out += '"';
    return out;
}

/// One record terminated by '\n'.
inline std::string format_row(const Row& fields, char delimiter = ',')
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out += delimiter;
        out += escape(fields[i], delimiter);
    }
    out += '\n';
    return out;
}

} // namespace vam::csv
