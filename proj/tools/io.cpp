#include "io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "cli.hpp"

namespace fraccalc::cli {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

namespace {

bool to_double(const std::string& s, double& x) {
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    const auto r = std::from_chars(b, e, x);
    return r.ec == std::errc() && r.ptr == e && b != e;
}

}  // namespace

double parse_number(const std::string& text, const std::string& what) {
    const std::string s = trim(text);
    double x = 0.0;
    if (s.rfind("2^", 0) == 0) {
        double k = 0.0;
        if (to_double(s.substr(2), k) && k == std::floor(k) && std::abs(k) < 1000.0) {
            return std::ldexp(1.0, static_cast<int>(k));
        }
    } else if (to_double(s, x)) {
        return x;
    }
    throw UsageError(what + ": cannot read '" + text + "' as a number");
}

std::size_t parse_count(const std::string& text, const std::string& what) {
    const double x = parse_number(text, what);
    if (!(x >= 0.0) || x != std::floor(x) || x > 1e15) throw UsageError(what + ": expected a non-negative integer, got '" + text + "'");
    return static_cast<std::size_t>(x);
}

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
    const std::string s = trim(text);
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty()) {
        throw UsageError(what + ": expected an unsigned 64-bit integer, got '" + text + "'");
    }
    return v;
}

std::vector<double> parse_numbers(const std::string& text, char sep, const std::string& what) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (const std::string& item : split(text, sep)) out.push_back(parse_number(item, what));
    return out;
}

std::complex<double> parse_complex(const std::string& text, const std::string& what) {
    const std::string s = trim(text);
    if (s.empty()) throw UsageError(what + ": empty value");
    if (s.back() != 'i') return {parse_number(s, what), 0.0};
    const std::string body = s.substr(0, s.size() - 1);
    std::size_t cut = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            cut = k;
            break;
        }
    }
    const std::string re = cut == std::string::npos ? "" : body.substr(0, cut);
    const std::string im = cut == std::string::npos ? body : body.substr(cut);
    double im_value = 0.0;
    if (im.empty() || im == "+") {
        im_value = 1.0;
    } else if (im == "-") {
        im_value = -1.0;
    } else {
        im_value = parse_number(im, what);
    }
    return {re.empty() ? 0.0 : parse_number(re, what), im_value};
}

CsvData read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    CsvData data;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (data.header.empty()) {
            data.header = split(t, ',');
            continue;
        }
        std::vector<double> row;
        for (const std::string& cell : split(t, ',')) {
            row.push_back(parse_number(cell, path + " line " + std::to_string(line_no)));
        }
        if (row.size() != data.header.size()) {
            throw UsageError(path + " line " + std::to_string(line_no) + ": expected " +
                             std::to_string(data.header.size()) + " columns");
        }
        data.rows.push_back(std::move(row));
    }
    if (data.header.empty()) throw UsageError("'" + path + "' has no header row");
    return data;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

namespace {

std::string cell_text(const Cell& c) {
    if (const double* x = std::get_if<double>(&c)) return format_number(*x);
    return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
    if (const double* x = std::get_if<double>(&c)) {
        return std::isfinite(*x) ? json(*x) : json(nullptr);
    }
    return std::get<std::string>(c);
}

std::string meta_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

void write_output(const Output& output, const json& config, const std::string& format, std::ostream& os) {
    const std::string command = config.value("command", std::string());
    if (format == "json") {
        json doc;
        json& meta = doc["meta"];
        meta["version"] = kVersion;
        meta["command"] = command;
        meta["config"] = config;
        for (const auto& [k, v] : output.meta.items()) meta[k] = v;
        if (!output.report.is_null()) {
            doc["report"] = output.report;
        } else {
            json& data = doc["data"];
            for (std::size_t c = 0; c < output.table.columns.size(); ++c) {
                json col = json::array();
                for (const auto& row : output.table.rows) col.push_back(cell_json(row[c]));
                data[output.table.columns[c]] = std::move(col);
            }
        }
        os << doc.dump(2) << '\n';
        return;
    }
    os << "# version=" << kVersion << '\n';
    os << "# command=" << command << '\n';
    os << "# config=" << config.dump() << '\n';
    for (const auto& [k, v] : output.meta.items()) os << "# " << k << '=' << meta_text(v) << '\n';
    for (std::size_t c = 0; c < output.table.columns.size(); ++c) os << (c ? "," : "") << output.table.columns[c];
    os << '\n';
    for (const auto& row : output.table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_text(row[c]);
        os << '\n';
    }
}

}  // namespace fraccalc::cli
