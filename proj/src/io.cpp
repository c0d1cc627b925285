#include "lapi/io.hpp"

#include "lapi/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace lapi {

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_real(const std::string& token, std::size_t line) {
    double x = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last || token.empty())
        throw ParseError(line, "expected a real number, got '" + token + "'");
    return x;
}

long long parse_int(const std::string& token, std::size_t line) {
    long long x = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last || token.empty())
        throw ParseError(line, "expected an integer, got '" + token + "'");
    return x;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string tok; ss >> tok;) out.push_back(tok);
    return out;
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::size_t parse_index(const std::string& tok, std::size_t bound, std::size_t line, const char* what) {
    const long long v = parse_int(tok, line);
    if (v < 0 || static_cast<unsigned long long>(v) >= bound)
        throw ParseError(line, std::string(what) + " index " + tok + " out of range");
    return static_cast<std::size_t>(v);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return in;
}

}  // namespace

void write_mdp(std::ostream& out, const Mdp& mdp) {
    const std::size_t n = mdp.num_states();
    const std::size_t a = mdp.num_actions();
    out << "mdp " << n << ' ' << a << ' ' << format_real(mdp.discount()) << ' '
        << format_real(mdp.cost_noise_halfwidth()) << '\n';
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t u = 0; u < a; ++u)
            for (std::size_t j = 0; j < n; ++j) {
                const double p = mdp.prob(i, static_cast<int>(u), j);
                if (p != 0.0) out << "t " << i << ' ' << u << ' ' << j << ' ' << format_real(p) << '\n';
            }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t u = 0; u < a; ++u)
            out << "c " << i << ' ' << u << ' ' << format_real(mdp.cost(i, static_cast<int>(u))) << '\n';
}

Mdp read_mdp(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        header = split(line);
        break;
    }
    if (header.empty()) throw ParseError(0, "empty MDP file");
    if (header.size() != 5 || header[0] != "mdp")
        throw ParseError(lineno, "expected header 'mdp <states> <actions> <alpha> <rho>'");
    const long long ns = parse_int(header[1], lineno);
    const long long na = parse_int(header[2], lineno);
    if (ns < 1 || na < 1) throw ParseError(lineno, "state and action counts must be positive");
    const double alpha = parse_real(header[3], lineno);
    const double rho = parse_real(header[4], lineno);
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParseError(lineno, "discount must lie in (0,1)");
    if (!(rho >= 0.0)) throw ParseError(lineno, "rho must be >= 0");

    const auto n = static_cast<std::size_t>(ns);
    const auto a = static_cast<std::size_t>(na);
    std::vector<Eigen::MatrixXd> p(a, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(a));
    std::vector<char> seen_t(n * a * n, 0), seen_c(n * a, 0);
    std::vector<std::size_t> row_line(n * a, 0);  // first line mentioning each row

    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        const auto tok = split(line);
        if (tok[0] == "t") {
            if (tok.size() != 5) throw ParseError(lineno, "transition line needs 't <i> <u> <j> <prob>'");
            const auto i = parse_index(tok[1], n, lineno, "state");
            const auto u = parse_index(tok[2], a, lineno, "action");
            const auto j = parse_index(tok[3], n, lineno, "state");
            const double prob = parse_real(tok[4], lineno);
            if (!(prob >= 0.0 && prob <= 1.0)) throw ParseError(lineno, "probability out of [0,1]");
            if (seen_t[(i * a + u) * n + j]++) throw ParseError(lineno, "duplicate transition entry");
            if (!row_line[i * a + u]) row_line[i * a + u] = lineno;
            p[u](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = prob;
        } else if (tok[0] == "c") {
            if (tok.size() != 4) throw ParseError(lineno, "cost line needs 'c <i> <u> <cost>'");
            const auto i = parse_index(tok[1], n, lineno, "state");
            const auto u = parse_index(tok[2], a, lineno, "action");
            const double c = parse_real(tok[3], lineno);
            if (seen_c[i * a + u]++) throw ParseError(lineno, "duplicate cost entry");
            if (!(c >= rho && c <= 1.0 - rho))
                throw ParseError(lineno, "cost " + tok[3] + " for (state " + tok[1] + ", action " + tok[2] +
                                             ") is outside [rho, 1-rho]");
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(u)) = c;
        } else {
            throw ParseError(lineno, "unknown record type '" + tok[0] + "'");
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t u = 0; u < a; ++u) {
            const std::string row = "(state " + std::to_string(i) + ", action " + std::to_string(u) + ")";
            if (!row_line[i * a + u]) throw ParseError(0, "transition row " + row + " has no entries");
            const double sum = p[u].row(static_cast<Eigen::Index>(i)).sum();
            if (std::abs(sum - 1.0) > 1e-9)
                throw ParseError(row_line[i * a + u], "transition row " + row + " sums to " + format_real(sum));
            if (!seen_c[i * a + u]) throw ParseError(0, "missing cost for " + row);
        }
    return Mdp(std::move(p), std::move(g), alpha, rho, 1e-9);
}

void save_mdp(const Mdp& mdp, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_mdp(out, mdp);
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Mdp load_mdp(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return read_mdp(in);
    } catch (const ParseError& e) {
        throw e.in_file(path.string());
    }
}

void write_features(std::ostream& out, const Eigen::MatrixXd& phi) {
    out << "features " << phi.rows() << ' ' << phi.cols() << '\n';
    for (Eigen::Index i = 0; i < phi.rows(); ++i) {
        out << "f " << i;
        for (Eigen::Index c = 0; c < phi.cols(); ++c) out << ' ' << format_real(phi(i, c));
        out << '\n';
    }
}

Eigen::MatrixXd read_features(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        header = split(line);
        break;
    }
    if (header.empty()) throw ParseError(0, "empty feature file");
    if (header.size() != 3 || header[0] != "features")
        throw ParseError(lineno, "expected header 'features <states> <dim>'");
    const long long ns = parse_int(header[1], lineno);
    const long long d = parse_int(header[2], lineno);
    if (ns < 1 || d < 1) throw ParseError(lineno, "feature dimensions must be positive");
    Eigen::MatrixXd phi(ns, d);
    long long next = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        const auto tok = split(line);
        if (tok[0] != "f" || tok.size() != static_cast<std::size_t>(d) + 2)
            throw ParseError(lineno, "expected 'f <i>' followed by " + std::to_string(d) + " values");
        if (parse_int(tok[1], lineno) != next)
            throw ParseError(lineno, "feature rows must appear in state order; expected state " + std::to_string(next));
        if (next >= ns) throw ParseError(lineno, "more feature rows than states");
        for (long long c = 0; c < d; ++c) phi(next, c) = parse_real(tok[static_cast<std::size_t>(c) + 2], lineno);
        ++next;
    }
    if (next != ns) throw ParseError(0, "feature file has " + std::to_string(next) + " rows, expected " + std::to_string(ns));
    return phi;
}

void save_features(const Eigen::MatrixXd& phi, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_features(out, phi);
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Eigen::MatrixXd load_features(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return read_features(in);
    } catch (const ParseError& e) {
        throw e.in_file(path.string());
    }
}

}  // namespace lapi
