#include "lpp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lpp {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

double need_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        config_error(std::string("missing numeric field '") + key + "'");
    return j[key].get<double>();
}

std::string need_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        config_error(std::string("missing string field '") + key + "'");
    return j[key].get<std::string>();
}

std::vector<double> need_array(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array())
        config_error(std::string("missing array field '") + key + "'");
    return j[key].get<std::vector<double>>();
}

json dist_to_json(const RateDist& d) {
    json j;
    switch (d.kind()) {
        case RateDist::Kind::Atoms:
            j["kind"] = "atoms";
            j["points"] = d.atom_points();
            j["weights"] = d.atom_weights();
            break;
        case RateDist::Kind::LowerPower:
            j["kind"] = "lower_power";
            j["lo"] = d.lo();
            j["width"] = d.power_width();
            j["exponent"] = d.power_exponent();
            break;
        case RateDist::Kind::UpperPower:
            j["kind"] = "upper_power";
            j["hi"] = d.hi();
            j["width"] = d.power_width();
            j["exponent"] = d.power_exponent();
            break;
    }
    return j;
}

RateDist dist_from_json(const json& j) {
    const std::string kind = need_string(j, "kind");
    if (kind == "atoms")
        return RateDist::atoms(need_array(j, "points"), need_array(j, "weights"));
    if (kind == "lower_power")
        return RateDist::lower_power(need_number(j, "lo"), need_number(j, "width"),
                                     need_number(j, "exponent"));
    if (kind == "upper_power")
        return RateDist::upper_power(need_number(j, "hi"), need_number(j, "width"),
                                     need_number(j, "exponent"));
    if (kind == "uniform")
        return RateDist::uniform(need_number(j, "lo"), need_number(j, "hi"));
    config_error("unknown rate distribution kind '" + kind + "'");
}

}  // namespace

json row_to_json(const RowLaw& row) {
    json j;
    switch (row.kind()) {
        case RowLaw::Kind::Bernoulli:
            j["kind"] = "bernoulli";
            j["p"] = row.bernoulli_p();
            break;
        case RowLaw::Kind::Exponential:
            j["kind"] = "exponential";
            j["rate"] = row.exponential_rate();
            break;
        case RowLaw::Kind::TwoPoint:
            j["kind"] = "two_point";
            j["lo"] = row.two_point_lo();
            j["hi"] = row.two_point_hi();
            j["p_hi"] = row.two_point_p_hi();
            break;
        case RowLaw::Kind::BoundedTable:
            j["kind"] = "bounded_table";
            j["support"] = row.table_xs();
            j["cdf"] = row.table_cs();
            break;
        case RowLaw::Kind::TruncatedUpper:
            j["kind"] = "tilde_truncated";
            j["rate"] = row.truncated_rate();
            j["tau"] = row.truncation_tau();
            break;
        case RowLaw::Kind::TruncatedBox:
            j["kind"] = "boxed";
            j["base"] = row_to_json(row.base());
            j["m"] = row.box_m();
            break;
    }
    return j;
}

RowLaw row_from_json(const json& j) {
    const std::string kind = need_string(j, "kind");
    if (kind == "bernoulli") return RowLaw::bernoulli(need_number(j, "p"));
    if (kind == "exponential") return RowLaw::exponential(need_number(j, "rate"));
    if (kind == "two_point")
        return RowLaw::two_point(need_number(j, "lo"), need_number(j, "hi"),
                                 need_number(j, "p_hi"));
    if (kind == "bounded_table")
        return RowLaw::bounded_table(need_array(j, "support"), need_array(j, "cdf"));
    if (kind == "uniform")
        return RowLaw::uniform(need_number(j, "lo"), need_number(j, "hi"));
    if (kind == "tilde_truncated")
        return tilde_truncate(RowLaw::exponential(need_number(j, "rate")),
                              need_number(j, "tau"));
    if (kind == "boxed") {
        if (!j.contains("base")) config_error("boxed row needs a base");
        return truncate_m(row_from_json(j["base"]), need_number(j, "m"));
    }
    config_error("unknown row law kind '" + kind + "'");
}

json law_to_json(const EnvironmentLaw& law) {
    json j;
    switch (law.kind()) {
        case EnvironmentLaw::Kind::PointMass:
            j["kind"] = "point_mass";
            j["row"] = row_to_json(law.row());
            break;
        case EnvironmentLaw::Kind::FiniteMixture: {
            j["kind"] = "finite_mixture";
            json rows = json::array();
            for (const auto& r : law.mixture_rows()) rows.push_back(row_to_json(r));
            j["rows"] = rows;
            j["weights"] = law.mixture_weights();
            break;
        }
        case EnvironmentLaw::Kind::BernoulliRate:
            j["kind"] = "bernoulli_rate";
            j["dist"] = dist_to_json(law.rate_dist());
            break;
        case EnvironmentLaw::Kind::ExponentialRate:
            j["kind"] = "exponential_rate";
            j["dist"] = dist_to_json(law.rate_dist());
            if (law.tail()) {
                j["tail"] = {{"nu", law.tail()->nu}, {"kappa", law.tail()->kappa}};
            }
            break;
    }
    return j;
}

EnvironmentLaw law_from_json(const json& j) {
    const std::string kind = need_string(j, "kind");
    if (kind == "point_mass") {
        if (!j.contains("row")) config_error("point_mass law needs a row");
        return EnvironmentLaw::point_mass(row_from_json(j["row"]));
    }
    if (kind == "finite_mixture") {
        if (!j.contains("rows") || !j["rows"].is_array())
            config_error("finite_mixture law needs rows");
        std::vector<RowLaw> rows;
        for (const auto& r : j["rows"]) rows.push_back(row_from_json(r));
        return EnvironmentLaw::finite_mixture(std::move(rows),
                                              need_array(j, "weights"));
    }
    if (kind == "bernoulli_rate") {
        if (!j.contains("dist")) config_error("bernoulli_rate law needs dist");
        return EnvironmentLaw::bernoulli_rate(dist_from_json(j["dist"]));
    }
    if (kind == "exponential_rate") {
        if (!j.contains("dist")) config_error("exponential_rate law needs dist");
        std::optional<TailSpec> tail;
        if (j.contains("tail"))
            tail = TailSpec{need_number(j["tail"], "nu"),
                            need_number(j["tail"], "kappa")};
        auto law = EnvironmentLaw::exponential_rate(dist_from_json(j["dist"]), tail);
        law.check_tail_consistency();
        return law;
    }
    config_error("unknown law kind '" + kind + "'");
}

Geometry geometry_from_name(const std::string& name) {
    if (name == "weak_weak" || name == "weak-weak") return Geometry::WeakWeak;
    if (name == "strict_x" || name == "strict-x") return Geometry::StrictX;
    if (name == "strict_y" || name == "strict-y") return Geometry::StrictY;
    if (name == "strict_strict" || name == "strict-strict")
        return Geometry::StrictStrict;
    config_error("unknown geometry '" + name + "'");
}

Convention convention_from_name(const std::string& name) {
    if (name == "exclude") return Convention::ExcludeEndpoint;
    if (name == "include") return Convention::IncludeEndpoint;
    config_error("unknown convention '" + name + "'");
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["schema"] = kConfigSchemaVersion;
    j["law"] = law_to_json(cfg.law);
    j["geometry"] = geometry_name(cfg.geometry);
    j["convention"] = convention_name(cfg.convention);
    if (!cfg.points.empty()) {
        json pts = json::array();
        for (const auto& p : cfg.points)
            pts.push_back({{"x", p.x}, {"y", p.y}, {"n", p.n}});
        j["targets"] = {{"type", "points"}, {"points", pts}};
    } else {
        j["targets"] = {{"type", "alpha_sweep"},
                        {"alphas", cfg.alphas},
                        {"axis", cfg.axis == AlphaAxis::XisAlpha ? "x" : "y"},
                        {"n", cfg.n}};
    }
    j["replicas"] = cfg.replicas;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["out_dir"] = cfg.out_dir;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    if (j.contains("schema") && j["schema"].get<int>() > kConfigSchemaVersion)
        config_error("config schema newer than this tool");
    if (!j.contains("law")) config_error("missing law");
    cfg.law = law_from_json(j["law"]);
    if (j.contains("geometry"))
        cfg.geometry = geometry_from_name(j["geometry"].get<std::string>());
    if (j.contains("convention"))
        cfg.convention = convention_from_name(j["convention"].get<std::string>());
    if (j.contains("targets")) {
        const json& t = j["targets"];
        const std::string type = need_string(t, "type");
        if (type == "points") {
            if (!t.contains("points") || !t["points"].is_array())
                config_error("points target needs a points array");
            for (const auto& p : t["points"]) {
                TargetPoint tp;
                tp.x = need_number(p, "x");
                tp.y = need_number(p, "y");
                tp.n = static_cast<std::int64_t>(need_number(p, "n"));
                cfg.points.push_back(tp);
            }
        } else if (type == "alpha_sweep") {
            cfg.alphas = need_array(t, "alphas");
            cfg.axis = need_string(t, "axis") == "y" ? AlphaAxis::YisAlpha
                                                     : AlphaAxis::XisAlpha;
            cfg.n = static_cast<std::int64_t>(need_number(t, "n"));
        } else if (type == "grid") {
            // cross product of xs and ys at one scale, expanded to points
            const auto xs = need_array(t, "xs");
            const auto ys = need_array(t, "ys");
            const auto n = static_cast<std::int64_t>(need_number(t, "n"));
            for (double gx : xs)
                for (double gy : ys) cfg.points.push_back({gx, gy, n});
        } else {
            config_error("unknown target type '" + type + "'");
        }
    }
    if (j.contains("replicas")) cfg.replicas = j["replicas"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (cfg.replicas < 1) config_error("replicas must be >= 1");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        config_error(std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        for (std::size_t i = 0; i < header.size(); ++i)
            out << header[i] << (i + 1 < header.size() ? "," : "\n");
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                out << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
    std::filesystem::rename(tmp, path);
}

void write_json(const std::string& path, const json& j) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct AxisScale {
    double lo, hi;
    double to_px(double v, double px_lo, double px_hi) const {
        const double t = (v - lo) / (hi - lo);
        return px_lo + t * (px_hi - px_lo);
    }
};

std::vector<double> nice_ticks(double lo, double hi, int want = 6) {
    const double span = hi - lo;
    if (!(span > 0)) return {lo};
    double step = std::pow(10.0, std::floor(std::log10(span / want)));
    for (double mult : {1.0, 2.0, 5.0, 10.0, 20.0}) {
        if (span / (step * mult) <= want) {
            step *= mult;
            break;
        }
    }
    std::vector<double> ticks;
    double v = std::ceil(lo / step) * step;
    for (; v <= hi + 1e-12 * span; v += step) ticks.push_back(v);
    return ticks;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
    const double W = 760, H = 520;
    const double L = 70, R = 20, T = 42, B = 52;
    double xlo = 1e308, xhi = -1e308, ylo = 1e308, yhi = -1e308;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
    if (xlo > xhi) { xlo = 0; xhi = 1; ylo = 0; yhi = 1; }
    if (xhi == xlo) { xhi = xlo + 1; }
    if (yhi == ylo) { yhi = ylo + 1; }
    const double ypad = 0.06 * (yhi - ylo);
    ylo -= ypad;
    yhi += ypad;
    const AxisScale xs{xlo, xhi}, ys{ylo, yhi};
    auto px = [&](double x) { return xs.to_px(x, L, W - R); };
    auto py = [&](double y) { return ys.to_px(y, H - B, T); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">"
        << title << "</text>\n";
    // axes
    svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R
        << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\""
        << H - B << "\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(xlo, xhi)) {
        const double x = px(t);
        svg << "<line x1=\"" << x << "\" y1=\"" << H - B << "\" x2=\"" << x
            << "\" y2=\"" << H - B + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << H - B + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << format_double(t) << "</text>\n";
    }
    for (double t : nice_ticks(ylo, yhi)) {
        const double y = py(t);
        svg << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L
            << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << L - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << format_double(t) << "</text>\n";
    }
    svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">"
        << x_label << "</text>\n";
    svg << "<text x=\"18\" y=\"" << (T + H - B) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 "
        << (T + H - B) / 2 << ")\">" << y_label << "</text>\n";
    // series
    double legend_y = T + 8;
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.6\" points=\"";
        for (const auto& [x, y] : s.points) svg << px(x) << "," << py(y) << " ";
        svg << "\"/>\n";
        if (s.draw_points)
            for (const auto& [x, y] : s.points)
                svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
                    << "\" r=\"2.6\" fill=\"" << s.color << "\"/>\n";
        svg << "<line x1=\"" << W - R - 150 << "\" y1=\"" << legend_y << "\" x2=\""
            << W - R - 126 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << W - R - 120 << "\" y=\"" << legend_y + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name
            << "</text>\n";
        legend_y += 18;
    }
    svg << "</svg>\n";

    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << svg.str();
    }
    std::filesystem::rename(tmp, path);
}

json make_manifest(const std::string& command, const RunConfig& cfg,
                   double wall_seconds, const std::vector<std::string>& outputs) {
    json j;
    j["tool"] = "lpp";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["config"] = config_to_json(cfg);
    j["seed"] = cfg.seed;
    j["replica_streams"] = {{"environment", "3r"}, {"weights", "3r+1"}, {"aux", "3r+2"}};
    j["wall_seconds"] = wall_seconds;
    j["outputs"] = outputs;
    return j;
}

}  // namespace lpp
