#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpp/envlaw.hpp"
#include "lpp/experiments.hpp"
#include "lpp/passage.hpp"

namespace lpp {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// -------- law/config (de)serialization; schema is stable and versioned ----

nlohmann::json row_to_json(const RowLaw& row);
RowLaw row_from_json(const nlohmann::json& j);

nlohmann::json law_to_json(const EnvironmentLaw& law);
EnvironmentLaw law_from_json(const nlohmann::json& j);

struct TargetPoint {
    double x = 1.0;
    double y = 1.0;
    std::int64_t n = 1000;
};

struct RunConfig {
    EnvironmentLaw law = EnvironmentLaw::point_mass(RowLaw::exponential(1.0));
    Geometry geometry = Geometry::WeakWeak;
    Convention convention = Convention::ExcludeEndpoint;
    // either points or an alpha sweep
    std::vector<TargetPoint> points;
    std::vector<double> alphas;
    AlphaAxis axis = AlphaAxis::XisAlpha;
    std::int64_t n = 1000;
    int replicas = 10;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out_dir = "out";
};

nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

Geometry geometry_from_name(const std::string& name);
Convention convention_from_name(const std::string& name);

// -------- CSV ---------------------------------------------------------------

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string format_double(double v);

// -------- SVG ---------------------------------------------------------------

struct PlotSeries {
    std::string name;
    std::string color;       // e.g. "#1f77b4"
    bool draw_points = false;
    std::vector<std::pair<double, double>> points;
};

// Self-contained SVG line plot: fixed axes schema, ticks, legend.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

// -------- run manifest -------------------------------------------------------

nlohmann::json make_manifest(const std::string& command, const RunConfig& cfg,
                             double wall_seconds,
                             const std::vector<std::string>& outputs);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace lpp
