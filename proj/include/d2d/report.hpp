#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace d2d {

/// One output line: scheme,k,c,metric,value,method,ci_halfwidth,trials,seed.
/// Unset optionals render as empty CSV fields and JSON nulls.
struct Row {
    std::string scheme;
    std::optional<std::int64_t> k;
    std::optional<std::int64_t> c;
    std::string metric;
    double value = 0.0;
    std::string method;
    std::optional<double> ci_halfwidth;
    std::optional<std::int64_t> trials;
    std::optional<std::uint64_t> seed;

    bool operator==(const Row& o) const;
};

enum class Format { csv, json };
Format parse_format(std::string_view s);

/// Doubles use the shortest representation that parses back to the same
/// value; non-finite values are written as inf, -inf and nan.
std::string render(const std::vector<Row>& rows, Format f);
std::string render_csv(const std::vector<Row>& rows);
std::string render_json(const std::vector<Row>& rows);

std::vector<Row> parse_rows(std::string_view text, Format f);

}  // namespace d2d
