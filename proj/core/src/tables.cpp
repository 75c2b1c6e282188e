#include "rholab/tables.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace rholab {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "' for reading");
    return in;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw ConfigError("write to '" + path + "' failed");
}

} // namespace

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_field(const ScalarField& f, const std::string& path) {
    if (f.grid == nullptr) throw ParameterError("write_field: field has no grid");
    const Grid& g = *f.grid;
    if (f.values.size() != g.total_nodes())
        throw ParameterError("write_field: field size does not match its grid");

    std::size_t obstacle_count = 0;
    for (std::size_t i = 0; i < g.total_nodes(); ++i)
        if (g.is_inside(i) && f.values[i] == -1.0) ++obstacle_count;

    std::ofstream out = open_out(path);
    out << "# field rdim=" << g.rdim();
    out << " counts=";
    for (int a = 0; a < g.rdim(); ++a) out << (a ? " " : "") << g.count(a);
    out << " origin=";
    for (int a = 0; a < g.rdim(); ++a) out << (a ? " " : "") << format_g17(g.origin(a));
    out << " spacing=" << format_g17(g.spacing());
    out << " level=" << format_g17(f.level);
    out << " iterations=" << f.iterations;
    out << " residual=" << format_g17(f.final_residual);
    out << " converged=" << (f.converged ? 1 : 0);
    out << " tol=" << format_g17(f.tol);
    out << " obstacle=" << obstacle_count;
    out << "\n";

    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        if (!g.is_inside(i)) continue;
        const auto c = g.coords(i);
        for (int a = 0; a < g.rdim(); ++a) out << c[a] << ' ';
        out << format_g17(f.values[i]) << "\n";
    }
    finish(out, path);
}

ScalarField read_field(const Grid& g, const std::string& path) {
    std::ifstream in = open_in(path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("# field ", 0) != 0)
        throw ConfigError("field file '" + path + "' has no header");

    // Parse space-separated key=value tokens after "# field".
    std::istringstream hs(header.substr(8));
    ScalarField f;
    f.grid = &g;
    f.values.assign(g.total_nodes(), 0.0);
    f.obstacle.assign(g.total_nodes(), 0);

    int rdim = -1;
    std::vector<int> counts;
    std::vector<double> origin;
    double spacing = std::numeric_limits<double>::quiet_NaN();
    long obstacle_count = -1;
    std::string tok;
    std::string pending_key;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        std::string key, val;
        if (eq != std::string::npos) {
            key = tok.substr(0, eq);
            val = tok.substr(eq + 1);
            pending_key = key;
        } else {
            // bare continuation token of a list-valued key (counts / origin)
            key = pending_key;
            val = tok;
        }
        if (key == "rdim") rdim = std::stoi(val);
        else if (key == "counts") counts.push_back(std::stoi(val));
        else if (key == "origin") origin.push_back(std::strtod(val.c_str(), nullptr));
        else if (key == "spacing") spacing = std::strtod(val.c_str(), nullptr);
        else if (key == "level") f.level = std::strtod(val.c_str(), nullptr);
        else if (key == "iterations") f.iterations = std::stol(val);
        else if (key == "residual") f.final_residual = std::strtod(val.c_str(), nullptr);
        else if (key == "converged") f.converged = (val != "0");
        else if (key == "tol") f.tol = std::strtod(val.c_str(), nullptr);
        else if (key == "obstacle") obstacle_count = std::stol(val);
        else throw ConfigError("field file '" + path + "': unknown header key '" + key + "'");
    }

    if (rdim != g.rdim())
        throw ConfigError("field file '" + path + "' was written for rdim " +
                          std::to_string(rdim) + ", grid has " + std::to_string(g.rdim()));
    if (static_cast<int>(counts.size()) != g.rdim() ||
        static_cast<int>(origin.size()) != g.rdim())
        throw ConfigError("field file '" + path + "' header extents are incomplete");
    for (int a = 0; a < g.rdim(); ++a) {
        if (counts[a] != g.count(a))
            throw ConfigError("field file '" + path + "' node counts do not match the grid");
        if (origin[a] != g.origin(a))
            throw ConfigError("field file '" + path + "' origin does not match the grid");
    }
    if (spacing != g.spacing())
        throw ConfigError("field file '" + path + "' spacing does not match the grid");

    std::size_t rows = 0;
    std::string line;
    std::array<int, 4> ijk{0, 0, 0, 0};
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        for (int a = 0; a < g.rdim(); ++a) {
            if (!(ls >> ijk[a]))
                throw ConfigError("field file '" + path + "' has a malformed row: " + line);
            if (ijk[a] < 0 || ijk[a] >= g.count(a))
                throw ConfigError("field file '" + path + "' row indexes outside the grid: " + line);
        }
        std::string vtext;
        if (!(ls >> vtext))
            throw ConfigError("field file '" + path + "' row is missing a value: " + line);
        const std::size_t idx = g.index(ijk);
        if (!g.is_inside(idx))
            throw ConfigError("field file '" + path + "' row addresses a non-interior node: " + line);
        f.values[idx] = std::strtod(vtext.c_str(), nullptr);
        ++rows;
    }
    if (rows != g.interior_count())
        throw ConfigError("field file '" + path + "' holds " + std::to_string(rows) +
                          " rows, grid has " + std::to_string(g.interior_count()) +
                          " interior nodes");

    long rebuilt = 0;
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        if (g.is_inside(i) && f.values[i] == -1.0) {
            f.obstacle[i] = 1;
            ++rebuilt;
        }
    }
    if (obstacle_count >= 0 && rebuilt != obstacle_count)
        throw ConfigError("field file '" + path + "': rebuilt obstacle mask has " +
                          std::to_string(rebuilt) + " nodes, header records " +
                          std::to_string(obstacle_count));
    return f;
}

void write_decay_table(const KeyLemmaReport& rep, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "t,M,bound,margin,status\n";
    for (const KeyLemmaRow& row : rep.rows) {
        out << format_g17(row.r) << ',' << format_g17(row.M) << ','
            << format_g17(row.bound) << ',' << format_g17(row.margin) << ','
            << (row.ok ? "ok" : "violation") << "\n";
    }
    finish(out, path);
}

void write_decay_table(const DecayProfile& p, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "t,M,bound,margin,status\n";
    std::size_t live = 0, skipped = 0;
    // Rows in ascending t, merging measured and skipped entries.
    while (live < p.ts.size() || skipped < p.skipped_ts.size()) {
        const bool take_skipped =
            skipped < p.skipped_ts.size() &&
            (live >= p.ts.size() || p.skipped_ts[skipped] < p.ts[live]);
        if (take_skipped) {
            out << format_g17(p.skipped_ts[skipped]) << ",nan,nan,nan,empty-shell\n";
            ++skipped;
        } else {
            out << format_g17(p.ts[live]) << ',' << format_g17(p.M[live])
                << ",nan,nan,measured\n";
            ++live;
        }
    }
    finish(out, path);
}

void write_integrand_trace(const DecayBound& b, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "t,kappa,integrand,partial_integral\n";
    double partial = 0.0;
    double prev_t = 0.0, prev_integrand = 0.0;
    bool first = true;
    for (const auto& [t, kappa] : b.integrand_samples) {
        const double integrand = kappa / t;
        if (!first) partial += 0.5 * (integrand + prev_integrand) * (t - prev_t);
        out << format_g17(t) << ',' << format_g17(kappa) << ','
            << format_g17(integrand) << ',' << format_g17(partial) << "\n";
        prev_t = t;
        prev_integrand = integrand;
        first = false;
    }
    finish(out, path);
}

void write_fit_table(const std::vector<FitRow>& rows, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "name,value,residual\n";
    for (const FitRow& row : rows)
        out << row.name << ',' << format_g17(row.value) << ','
            << format_g17(row.residual) << "\n";
    finish(out, path);
}

void write_plot_data(const std::vector<std::pair<double, double>>& xy,
                     const std::string& path) {
    std::ofstream out = open_out(path);
    for (const auto& [x, y] : xy)
        out << format_g17(x) << ' ' << format_g17(y) << "\n";
    finish(out, path);
}

} // namespace rholab
