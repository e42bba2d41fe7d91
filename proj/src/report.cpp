#include "obslab/report.hpp"

#include "obslab/error.hpp"
#include "obslab/numerics.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace obslab {

namespace {

std::string number(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    // keep it a float on the way back in
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

void write(std::ostringstream& out, const Json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case Json::value_t::number_float: out << number(j.get<double>()); break;
        case Json::value_t::array:
            if (j.empty()) {
                out << "[]";
                break;
            }
            out << '[' << nl;
            for (std::size_t i = 0; i < j.size(); ++i) {
                out << pad;
                write(out, j[i], indent, depth + 1);
                if (i + 1 < j.size()) out << ',';
                out << nl;
            }
            out << close << ']';
            break;
        case Json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                break;
            }
            out << '{' << nl;
            std::size_t i = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++i) {
                out << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
                write(out, it.value(), indent, depth + 1);
                if (i + 1 < j.size()) out << ',';
                out << nl;
            }
            out << close << '}';
            break;
        }
        default: out << j.dump();
    }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::ostringstream out;
    write(out, j, indent, 0);
    out << '\n';
    return out.str();
}

Json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::string dump_csv(const CsvTable& t) {
    std::ostringstream out;
    for (const auto& c : t.comments) out << "# " << c << '\n';
    for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
    out << '\n';
    char buf[32];
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << '\n';
    }
    return out.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::precondition, "cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw Error(ErrorKind::precondition, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

// expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
// factor := number | "pi" | '(' expr ')' | '-' factor | number "pi"
class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    double parse() {
        double v = expr();
        skip();
        if (i_ != s_.size()) fail();
        return v;
    }

private:
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    [[noreturn]] void fail() const { throw Error(ErrorKind::precondition, "cannot parse number '" + s_ + "'"); }

    double expr() {
        double v = term();
        for (;;) {
            skip();
            if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) {
                const char op = s_[i_++];
                const double r = term();
                v = op == '+' ? v + r : v - r;
            } else {
                return v;
            }
        }
    }
    double term() {
        double v = factor();
        for (;;) {
            skip();
            if (i_ < s_.size() && (s_[i_] == '*' || s_[i_] == '/')) {
                const char op = s_[i_++];
                const double r = factor();
                v = op == '*' ? v * r : v / r;
            } else if (s_.compare(i_, 2, "pi") == 0) {
                i_ += 2;  // "3pi"
                v *= pi;
            } else {
                return v;
            }
        }
    }
    double factor() {
        skip();
        if (i_ >= s_.size()) fail();
        if (s_[i_] == '-') {
            ++i_;
            return -factor();
        }
        if (s_[i_] == '+') {
            ++i_;
            return factor();
        }
        if (s_[i_] == '(') {
            ++i_;
            const double v = expr();
            skip();
            if (i_ >= s_.size() || s_[i_] != ')') fail();
            ++i_;
            return v;
        }
        if (s_.compare(i_, 2, "pi") == 0) {
            i_ += 2;
            return pi;
        }
        const char* begin = s_.c_str() + i_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail();
        i_ += static_cast<std::size_t>(end - begin);
        return v;
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

double parse_number(const std::string& token) { return Parser(token).parse(); }

std::vector<double> parse_list(const std::string& token) {
    require(!token.empty(), "empty list");
    const auto dots = token.find("..");
    if (dots != std::string::npos) {
        std::string hi = token.substr(dots + 2);
        double step = 1;
        const auto colon = hi.find(':');
        if (colon != std::string::npos) {
            step = parse_number(hi.substr(colon + 1));
            hi = hi.substr(0, colon);
        }
        const double a = parse_number(token.substr(0, dots)), b = parse_number(hi);
        require(step > 0 && b >= a, "range needs a <= b and a positive step");
        std::vector<double> out;
        const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
        for (long i = 0; i <= n; ++i) out.push_back(a + i * step);
        return out;
    }
    std::vector<double> out;
    for (const auto& part : split(token, ',')) out.push_back(parse_number(part));
    return out;
}

namespace {

std::vector<Interval> read_interval_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::precondition, "cannot open set file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();
    std::vector<Interval> pieces;
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        Json j;
        try {
            j = Json::parse(text);
            for (const auto& p : j.at("intervals")) pieces.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::precondition, "bad set file " + path + ": " + e.what());
        }
        return pieces;
    }
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        double a, b;
        if (ls >> a >> b) pieces.push_back({a, b});
    }
    return pieces;
}

}  // namespace

SetFamily parse_set(const std::string& spec) {
    const auto colon = spec.find(':');
    require(colon != std::string::npos, "set spec needs the form kind:params, got '" + spec + "'");
    const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
    if (kind == "halfline") return SetFamily::half_line(parse_number(arg));
    if (kind == "bounded") return SetFamily::bounded(parse_number(arg));
    if (kind == "periodic") return SetFamily::periodic(parse_number(arg));
    if (kind == "polygap") return SetFamily::polynomial_gap(parse_number(arg));
    if (kind == "dyadic") {
        const auto v = parse_list(arg);
        require(v.size() == 2, "dyadic needs coeff,power");
        return SetFamily::dyadic_gap({v[0], v[1]});
    }
    if (kind == "intervals") {
        std::vector<Interval> pieces;
        for (const auto& p : split(arg, ',')) {
            const auto ab = split(p, ':');
            require(ab.size() == 2, "interval needs a:b");
            pieces.push_back({parse_number(ab[0]), parse_number(ab[1])});
        }
        return SetFamily::explicit_list(pieces);
    }
    if (kind == "file") return SetFamily::explicit_list(read_interval_file(arg));
    throw Error(ErrorKind::precondition, "unknown set kind '" + kind + "'");
}

Potential parse_potential(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos || spec.substr(0, colon) == "monomial") {
        const double m = parse_number(colon == std::string::npos ? spec : spec.substr(colon + 1));
        require(m >= 1 && m == std::floor(m), "monomial exponent must be a positive integer");
        return Potential::monomial(static_cast<int>(m));
    }
    if (spec.substr(0, colon) == "shifted") {
        const auto v = parse_list(spec.substr(colon + 1));
        require(v.size() == 2, "shifted needs C,c");
        return Potential::shifted_power(v[0], v[1]);
    }
    throw Error(ErrorKind::precondition, "unknown potential '" + spec + "'");
}

}  // namespace obslab
