#include "d2d/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "d2d/errors.hpp"

namespace d2d {

namespace {

const char* const kHeader = "scheme,k,c,metric,value,method,ci_halfwidth,trials,seed";

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

double parse_num(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("bad number '" + std::string(s) + "'");
    return v;
}

template <class T>
T parse_integer(std::string_view s) {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("bad integer '" + std::string(s) + "'");
    return v;
}

// Metric names may carry commas or quotes only in pathological cases; quote when needed.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                out.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.emplace_back();
        } else {
            out.back() += ch;
        }
    }
    return out;
}

nlohmann::ordered_json num_json(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v);
}

double num_from_json(const nlohmann::json& j) { return j.is_string() ? parse_num(j.get<std::string>()) : j.get<double>(); }

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

bool Row::operator==(const Row& o) const {
    const bool ci_eq = ci_halfwidth.has_value() == o.ci_halfwidth.has_value() &&
                       (!ci_halfwidth || same_double(*ci_halfwidth, *o.ci_halfwidth));
    return scheme == o.scheme && k == o.k && c == o.c && metric == o.metric && same_double(value, o.value) &&
           method == o.method && ci_eq && trials == o.trials && seed == o.seed;
}

Format parse_format(std::string_view s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw ConfigError("format must be csv or json, got '" + std::string(s) + "'");
}

std::string render_csv(const std::vector<Row>& rows) {
    std::ostringstream out;
    out << kHeader << '\n';
    for (const auto& r : rows) {
        out << csv_field(r.scheme) << ',' << (r.k ? std::to_string(*r.k) : "") << ','
            << (r.c ? std::to_string(*r.c) : "") << ',' << csv_field(r.metric) << ',' << fmt(r.value) << ','
            << csv_field(r.method) << ',' << (r.ci_halfwidth ? fmt(*r.ci_halfwidth) : "") << ','
            << (r.trials ? std::to_string(*r.trials) : "") << ',' << (r.seed ? std::to_string(*r.seed) : "") << '\n';
    }
    return out.str();
}

std::string render_json(const std::vector<Row>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["scheme"] = r.scheme;
        j["k"] = r.k ? nlohmann::ordered_json(*r.k) : nlohmann::ordered_json();
        j["c"] = r.c ? nlohmann::ordered_json(*r.c) : nlohmann::ordered_json();
        j["metric"] = r.metric;
        j["value"] = num_json(r.value);
        j["method"] = r.method;
        j["ci_halfwidth"] = r.ci_halfwidth ? nlohmann::ordered_json(num_json(*r.ci_halfwidth)) : nlohmann::ordered_json();
        j["trials"] = r.trials ? nlohmann::ordered_json(*r.trials) : nlohmann::ordered_json();
        j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json();
        arr.push_back(std::move(j));
    }
    return arr.dump(1) + '\n';
}

std::string render(const std::vector<Row>& rows, Format f) { return f == Format::csv ? render_csv(rows) : render_json(rows); }

std::vector<Row> parse_rows(std::string_view text, Format f) {
    std::vector<Row> rows;
    if (f == Format::json) {
        const auto arr = nlohmann::json::parse(text);
        for (const auto& j : arr) {
            Row r;
            r.scheme = j.at("scheme").get<std::string>();
            if (!j.at("k").is_null()) r.k = j.at("k").get<std::int64_t>();
            if (!j.at("c").is_null()) r.c = j.at("c").get<std::int64_t>();
            r.metric = j.at("metric").get<std::string>();
            r.value = num_from_json(j.at("value"));
            r.method = j.at("method").get<std::string>();
            if (!j.at("ci_halfwidth").is_null()) r.ci_halfwidth = num_from_json(j.at("ci_halfwidth"));
            if (!j.at("trials").is_null()) r.trials = j.at("trials").get<std::int64_t>();
            if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
            rows.push_back(std::move(r));
        }
        return rows;
    }
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kHeader) throw ConfigError("CSV header mismatch");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f9 = split_csv_line(line);
        if (f9.size() != 9) throw ConfigError("CSV row with " + std::to_string(f9.size()) + " fields");
        Row r;
        r.scheme = f9[0];
        if (!f9[1].empty()) r.k = parse_integer<std::int64_t>(f9[1]);
        if (!f9[2].empty()) r.c = parse_integer<std::int64_t>(f9[2]);
        r.metric = f9[3];
        r.value = parse_num(f9[4]);
        r.method = f9[5];
        if (!f9[6].empty()) r.ci_halfwidth = parse_num(f9[6]);
        if (!f9[7].empty()) r.trials = parse_integer<std::int64_t>(f9[7]);
        if (!f9[8].empty()) r.seed = parse_integer<std::uint64_t>(f9[8]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace d2d
