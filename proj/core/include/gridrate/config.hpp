#pragma once

#include <filesystem>
#include <numbers>
#include <string>
#include <string_view>

#include "gridrate/grid.hpp"
#include "gridrate/kernel.hpp"
#include "gridrate/luck.hpp"

namespace gridrate {

enum class EngineKind { naive, fft, laplace };

EngineKind parse_engine_kind(std::string_view name);
std::string_view engine_kind_name(EngineKind kind);

/// Full system parameterization. Defaults: an 80% skill / 20% chance
/// logistic luck function on a 1001-point grid over [-7, 7], a N(0, 0.7^2)
/// prior, and 0.03 of Gaussian drift per match.
struct SystemConfig {
    double beta = 0.8;
    int n = 1000;
    double half_width = 7.0;
    double sigma0 = 0.7;
    double sigma_kappa = 0.03;
    EngineKind engine = EngineKind::fft;
    double display_scale = kDefaultDisplayScale;
    double display_offset = 1500.0;
    double var_cap = 70.0;  // display-units deviation cap for log-loss reporting

    static constexpr double kDefaultDisplayScale = 400.0 / std::numbers::ln10;

    void validate() const;  // throws DataError on out-of-range values

    Grid grid() const { return Grid(n, half_width); }
    DisplayTransform display() const { return DisplayTransform(display_scale, display_offset); }

    /// The luck function the configured engine runs with. The Laplace
    /// engine uses the unit-scale Laplace CDF in place of the logistic,
    /// which is the same luck family it can evaluate exactly.
    LuckFunction luck() const;

    /// The drift kernel; the Laplace engine gets a variance-matched
    /// single-component Laplace kernel (b = sigma_kappa / sqrt(2)).
    KernelSpec kernel() const;

    /// True when the model-defining fields (everything a stored belief
    /// depends on) are equal.
    bool same_model(const SystemConfig& other) const;
};

/// Flat key=value config text. Unknown keys and unparseable values are
/// DataErrors; '#' lines and blank lines are ignored.
SystemConfig parse_config_text(std::string_view text);
SystemConfig parse_config_file(const std::filesystem::path& path);
std::string format_config(const SystemConfig& config);

}  // namespace gridrate
