#ifndef NLC_IO_HPP
#define NLC_IO_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nlc/grid.hpp"

namespace nlc {

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw io_error("malformed number '" + std::string(s) + "'");
    return v;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    return out;
}

inline const char* diagnostics_header() {
    return "t,mass,E_total,E_kin,E_press,E_art,E_elastic,E_penalty,D_visc,D_dir,D_art,balance_res,max_d,"
           "rho_lg_int,u_L2,rho_dist,d_H1dist";
}

/// Header line followed by one comma-separated row per entry.
inline void write_csv(const std::filesystem::path& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
    auto out = open_output(path);
    out << header << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
        out << '\n';
    }
    if (!out) throw io_error("write failed for '" + path.string() + "'");
}

/// Text snapshot: `dim nx ny [nz] components t`, then one cell per line
/// (axis 0 fastest) with its components separated by spaces.
template <FieldKind Kind>
void write_snapshot(const std::filesystem::path& path, const Field<Kind>& f, double t) {
    auto out = open_output(path);
    const Grid& g = f.grid();
    out << g.dim;
    for (int a = 0; a < g.dim; ++a) out << ' ' << g.count[a];
    out << ' ' << f.components() << ' ' << format_double(t) << '\n';
    for (std::size_t i = 0; i < g.cells(); ++i) {
        for (int c = 0; c < f.components(); ++c) out << (c ? " " : "") << format_double(f(c, i));
        out << '\n';
    }
    if (!out) throw io_error("write failed for '" + path.string() + "'");
}

struct Snapshot {
    int dim = 0;
    std::array<int, 3> count{1, 1, 1};
    int components = 0;
    double t = 0.0;
    std::vector<double> values;  ///< cell-major: values[cell * components + c]
};

inline Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read '" + path.string() + "'");
    Snapshot s;
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty snapshot '" + path.string() + "'");
    std::istringstream head(line);
    std::vector<std::string> tok;
    for (std::string w; head >> w;) tok.push_back(w);
    if (tok.size() < 4) throw io_error("bad snapshot header in '" + path.string() + "'");
    s.dim = std::stoi(tok[0]);
    if ((s.dim != 2 && s.dim != 3) || tok.size() != static_cast<std::size_t>(s.dim + 3))
        throw io_error("bad snapshot header in '" + path.string() + "'");
    for (int a = 0; a < s.dim; ++a) s.count[a] = std::stoi(tok[1 + a]);
    s.components = std::stoi(tok[1 + s.dim]);
    s.t = parse_double(tok[2 + s.dim]);
    const std::size_t cells = static_cast<std::size_t>(s.count[0]) * s.count[1] * s.count[2];
    s.values.reserve(cells * s.components);
    for (std::string w; in >> w;) s.values.push_back(parse_double(w));
    if (s.values.size() != cells * s.components) throw io_error("truncated snapshot '" + path.string() + "'");
    return s;
}

/// Rebuild a field on `grid` from a snapshot; counts and components must match.
template <FieldKind Kind>
Field<Kind> field_from_snapshot(const Snapshot& s, const Grid& grid) {
    Field<Kind> f(grid);
    if (s.dim != grid.dim || s.components != f.components())
        throw io_error("snapshot does not match the requested field layout");
    for (int a = 0; a < grid.dim; ++a)
        if (s.count[a] != grid.count[a]) throw io_error("snapshot grid does not match");
    for (std::size_t i = 0; i < grid.cells(); ++i)
        for (int c = 0; c < f.components(); ++c) f(c, i) = s.values[i * s.components + c];
    return f;
}

}  // namespace nlc

#endif  // NLC_IO_HPP
