#pragma once

// File formats: domain JSON, CSV grids, barcode text, PGM maps, tuple and
// trajectory dumps, key=value reports.

#include "swarmap/domain.hpp"
#include "swarmap/ekf.hpp"
#include "swarmap/persistence.hpp"
#include "swarmap/swarm.hpp"
#include "swarmap/threshold.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace swarmap {

using Json = nlohmann::json;

struct DomainFile {
    DomainSpec domain;
    std::size_t rows = 50;
    std::size_t cols = 50;

    GridSpec grid() const { return make_grid(domain.bounds, rows, cols); }
};

namespace detail {

inline Vec2 parse_point(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw config_error("a point must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw config_error("cannot write " + p.string());
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw config_error("cannot read " + p.string());
    return in;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw config_error("trailing characters in number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw config_error("not a number: '" + s + "'");
    }
}

}  // namespace detail

// %.9g, with "inf" for +infinity.
inline std::string format_g9(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// Round-trip precision, for intermediates that later stages read back.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline DomainFile parse_domain(const Json& j) {
    try {
        DomainFile f;
        const auto& b = j.at("bounds");
        if (!b.is_array() || b.size() != 4) throw config_error("bounds must be [xmin, ymin, xmax, ymax]");
        f.domain.bounds = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
        if (!(f.domain.bounds.xmax > f.domain.bounds.xmin && f.domain.bounds.ymax > f.domain.bounds.ymin)) {
            throw config_error("bounds must have positive extent");
        }
        for (const auto& poly : j.value("obstacles", Json::array())) {
            Polygon p;
            for (const auto& pt : poly) p.push_back(detail::parse_point(pt));
            f.domain.obstacles.push_back(std::move(p));
        }
        for (const auto& t : j.at("transmitters")) {
            Transmitter tx;
            tx.position = detail::parse_point(t.at("pos"));
            tx.gain = t.value("k", 1.0);
            tx.power = t.value("pow", 1.0);
            tx.alpha = t.value("alpha", 2.0);
            f.domain.transmitters.push_back(tx);
        }
        if (j.contains("grid")) {
            f.rows = j["grid"].at("rows").get<std::size_t>();
            f.cols = j["grid"].at("cols").get<std::size_t>();
        }
        (void)f.grid();
        return f;
    } catch (const Json::exception& e) {
        throw config_error(std::string("domain file: ") + e.what());
    }
}

inline Json read_json(const std::filesystem::path& p) {
    auto in = detail::open_in(p);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw config_error(p.string() + ": " + e.what());
    }
}

inline DomainFile load_domain(const std::filesystem::path& p) { return parse_domain(read_json(p)); }

inline Json domain_to_json(const DomainFile& f) {
    Json j;
    const Rect& b = f.domain.bounds;
    j["bounds"] = {b.xmin, b.ymin, b.xmax, b.ymax};
    j["obstacles"] = Json::array();
    for (const auto& poly : f.domain.obstacles) {
        Json pj = Json::array();
        for (const auto& p : poly) pj.push_back({p.x(), p.y()});
        j["obstacles"].push_back(pj);
    }
    j["transmitters"] = Json::array();
    for (const auto& t : f.domain.transmitters) {
        j["transmitters"].push_back(
            {{"pos", {t.position.x(), t.position.y()}}, {"k", t.gain}, {"pow", t.power}, {"alpha", t.alpha}});
    }
    j["grid"] = {{"rows", f.rows}, {"cols", f.cols}};
    return j;
}

// One line per grid row, row 0 (lowest y) first.
template <class T>
void write_grid_csv(const std::filesystem::path& p, std::size_t rows, std::size_t cols, const std::vector<T>& v) {
    if (v.size() != rows * cols) throw dimension_error("grid values do not match grid size");
    auto out = detail::open_out(p);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) out << ',';
            if constexpr (std::is_floating_point_v<T>) {
                out << format_g9(static_cast<double>(v[r * cols + c]));
            } else {
                out << v[r * cols + c];
            }
        }
        out << '\n';
    }
}

struct CsvGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
};

inline CsvGrid read_grid_csv(const std::filesystem::path& p) {
    auto in = detail::open_in(p);
    CsvGrid g;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split(line, ',');
        if (g.rows == 0) g.cols = fields.size();
        if (fields.size() != g.cols) throw config_error(p.string() + ": ragged grid");
        for (const auto& f : fields) g.values.push_back(detail::parse_double(f));
        ++g.rows;
    }
    if (g.rows == 0) throw config_error(p.string() + ": empty grid");
    return g;
}

inline void write_barcode(const std::filesystem::path& p, const Barcode& b) {
    auto out = detail::open_out(p);
    for (const Interval& i : b.intervals) out << i.dim << ',' << format_g9(i.birth) << ',' << format_g9(i.death) << '\n';
}

inline Barcode read_barcode(const std::filesystem::path& p) {
    auto in = detail::open_in(p);
    Barcode b;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 3) throw config_error(p.string() + ": expected dim,birth,death");
        b.intervals.push_back({std::stoi(f[0]), detail::parse_double(f[1]), detail::parse_double(f[2])});
    }
    sort_barcode(b);
    return b;
}

// P2, top row (largest y) first; 0 occupied, 255 free.
inline void write_pgm(const std::filesystem::path& p, std::size_t rows, std::size_t cols, const std::vector<bool>& free) {
    auto out = detail::open_out(p);
    out << "P2\n" << cols << ' ' << rows << "\n255\n";
    for (std::size_t r = rows; r-- > 0;) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) out << ' ';
            out << (free[r * cols + c] ? 255 : 0);
        }
        out << '\n';
    }
}

inline void write_pgm(const std::filesystem::path& p, const BinaryMap& m) { write_pgm(p, m.rows, m.cols, m.free); }

inline BinaryMap read_pgm(const std::filesystem::path& p) {
    auto in = detail::open_in(p);
    std::string magic;
    std::size_t cols = 0, rows = 0;
    int maxval = 0;
    in >> magic >> cols >> rows >> maxval;
    if (magic != "P2" || !in || rows == 0 || cols == 0) throw config_error(p.string() + ": not a P2 map");
    BinaryMap m{rows, cols, std::vector<bool>(rows * cols)};
    for (std::size_t r = rows; r-- > 0;) {
        for (std::size_t c = 0; c < cols; ++c) {
            int v = 0;
            if (!(in >> v)) throw config_error(p.string() + ": truncated map");
            m.free[r * cols + c] = v > maxval / 2;
        }
    }
    return m;
}

inline void write_tuples_csv(const std::filesystem::path& p, const std::vector<DataTuple>& tuples) {
    auto out = detail::open_out(p);
    out << "j,t,mu_x,mu_y,s_xx,s_xy,s_yy\n";
    for (const DataTuple& d : tuples) {
        out << d.robot << ',' << format_g17(d.t) << ',' << format_g17(d.mu.x()) << ',' << format_g17(d.mu.y()) << ','
            << format_g17(d.sigma(0, 0)) << ',' << format_g17(d.sigma(0, 1)) << ',' << format_g17(d.sigma(1, 1)) << '\n';
    }
}

inline std::vector<DataTuple> read_tuples_csv(const std::filesystem::path& p) {
    auto in = detail::open_in(p);
    std::vector<DataTuple> tuples;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 7) throw config_error(p.string() + ": expected 7 tuple fields");
        DataTuple d;
        d.robot = static_cast<std::size_t>(std::stoull(f[0]));
        d.t = detail::parse_double(f[1]);
        d.mu = {detail::parse_double(f[2]), detail::parse_double(f[3])};
        const double sxy = detail::parse_double(f[5]);
        d.sigma << detail::parse_double(f[4]), sxy, sxy, detail::parse_double(f[6]);
        tuples.push_back(d);
    }
    return tuples;
}

inline void write_trajectory_csv(const std::filesystem::path& p, const std::vector<TrajectoryRow>& rows) {
    auto out = detail::open_out(p);
    out << "t,j,x_true,y_true,x_est,y_est\n";
    for (const auto& r : rows) {
        out << format_g9(r.t) << ',' << r.robot << ',' << format_g9(r.truth.x()) << ',' << format_g9(r.truth.y()) << ','
            << format_g9(r.estimate.x()) << ',' << format_g9(r.estimate.y()) << '\n';
    }
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline void write_key_values(const std::filesystem::path& p, const KeyValues& kv) {
    auto out = detail::open_out(p);
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

inline KeyValues read_key_values(const std::filesystem::path& p) {
    auto in = detail::open_in(p);
    KeyValues kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return kv;
}

}  // namespace swarmap
