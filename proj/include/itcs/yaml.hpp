#pragma once

// Minimal YAML subset, sufficient for the run-configuration schema:
// block maps, block lists ("- item"), flow lists ("[a, b]"), quoted and
// plain scalars, and "#" comments. Indentation is spaces only. Anchors,
// multi-line scalars and nested flow collections are out of scope and
// rejected rather than misparsed.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "itcs/errors.hpp"
#include "itcs/util.hpp"

namespace itcs::yaml {

struct Node {
    enum class Kind { Scalar, List, Map };
    Kind kind = Kind::Scalar;
    std::string scalar;
    std::vector<Node> list;
    std::vector<std::pair<std::string, Node>> map;

    bool has(const std::string& key) const {
        for (const auto& [k, _] : map)
            if (k == key) return true;
        return false;
    }
    const Node* find(const std::string& key) const {
        for (const auto& [k, v] : map)
            if (k == key) return &v;
        return nullptr;
    }
};

namespace detail {

struct Line {
    std::size_t indent = 0;
    std::string text;
    std::size_t number = 0;
};

inline std::string strip_comment(const std::string& line) {
    bool in_single = false, in_double = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '\'' && !in_double) in_single = !in_single;
        else if (c == '"' && !in_single) in_double = !in_double;
        else if (c == '#' && !in_single && !in_double)
            return line.substr(0, i);
    }
    return line;
}

inline std::string unquote(std::string_view s) {
    const auto t = trim(s);
    if (t.size() >= 2 && ((t.front() == '\'' && t.back() == '\'') ||
                          (t.front() == '"' && t.back() == '"')))
        return std::string(t.substr(1, t.size() - 2));
    return std::string(t);
}

inline Node scalar_or_flow(std::string_view raw, std::size_t line_number) {
    const auto t = trim(raw);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']')
            throw DataError("config line " + std::to_string(line_number) +
                            ": unterminated flow list");
        Node node;
        node.kind = Node::Kind::List;
        const auto body = t.substr(1, t.size() - 2);
        if (!trim(body).empty())
            for (const auto& item : split(body, ',')) {
                Node elem;
                elem.scalar = unquote(item);
                node.list.push_back(std::move(elem));
            }
        return node;
    }
    Node node;
    node.scalar = unquote(t);
    return node;
}

inline std::vector<Line> significant_lines(const std::string& text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    for (const auto& raw : split(text, '\n')) {
        ++number;
        const auto stripped = strip_comment(raw);
        if (trim(stripped).empty()) continue;
        if (stripped.find('\t') != std::string::npos)
            throw DataError("config line " + std::to_string(number) +
                            ": tabs are not allowed in indentation");
        std::size_t indent = 0;
        while (indent < stripped.size() && stripped[indent] == ' ') ++indent;
        lines.push_back({indent, std::string(trim(stripped)), number});
    }
    return lines;
}

inline Node parse_block(const std::vector<Line>& lines, std::size_t& pos, std::size_t indent);

inline Node parse_value(const std::vector<Line>& lines, std::size_t& pos, const Line& owner,
                        std::string_view inline_value) {
    if (!trim(inline_value).empty()) return scalar_or_flow(inline_value, owner.number);
    // Block value: the following lines, indented deeper.
    if (pos < lines.size() && lines[pos].indent > owner.indent)
        return parse_block(lines, pos, lines[pos].indent);
    // "key:" with nothing nested reads as an empty scalar.
    return Node{};
}

inline Node parse_block(const std::vector<Line>& lines, std::size_t& pos, std::size_t indent) {
    Node node;
    const bool is_list = lines[pos].text.rfind("- ", 0) == 0 || lines[pos].text == "-";
    node.kind = is_list ? Node::Kind::List : Node::Kind::Map;

    while (pos < lines.size() && lines[pos].indent == indent) {
        const Line line = lines[pos];
        if (is_list != (line.text.rfind("- ", 0) == 0 || line.text == "-"))
            throw DataError("config line " + std::to_string(line.number) +
                            ": cannot mix list items and mapping keys");
        ++pos;
        if (is_list) {
            const auto item = line.text.size() > 1 ? line.text.substr(2) : "";
            node.list.push_back(scalar_or_flow(item, line.number));
            continue;
        }
        const auto colon = line.text.find(':');
        if (colon == std::string::npos)
            throw DataError("config line " + std::to_string(line.number) +
                            ": expected 'key: value'");
        const std::string key = unquote(line.text.substr(0, colon));
        if (key.empty())
            throw DataError("config line " + std::to_string(line.number) + ": empty key");
        if (node.has(key))
            throw DataError("config line " + std::to_string(line.number) + ": duplicate key '" +
                            key + "'");
        node.map.emplace_back(key, parse_value(lines, pos, line, line.text.substr(colon + 1)));
    }
    if (pos < lines.size() && lines[pos].indent > indent)
        throw DataError("config line " + std::to_string(lines[pos].number) +
                        ": unexpected indentation");
    return node;
}

}  // namespace detail

inline Node parse(const std::string& text) {
    const auto lines = detail::significant_lines(text);
    if (lines.empty()) return Node{Node::Kind::Map, {}, {}, {}};
    std::size_t pos = 0;
    auto node = detail::parse_block(lines, pos, lines.front().indent);
    if (pos != lines.size())
        throw DataError("config line " + std::to_string(lines[pos].number) +
                        ": unexpected indentation");
    return node;
}

}  // namespace itcs::yaml
