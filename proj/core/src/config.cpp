#include "gridrate/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gridrate/errors.hpp"

namespace gridrate {

EngineKind parse_engine_kind(std::string_view name) {
    if (name == "naive") return EngineKind::naive;
    if (name == "fft") return EngineKind::fft;
    if (name == "laplace") return EngineKind::laplace;
    throw DataError("unknown engine '" + std::string(name) + "' (expected naive, fft, or laplace)");
}

std::string_view engine_kind_name(EngineKind kind) {
    switch (kind) {
        case EngineKind::naive:
            return "naive";
        case EngineKind::fft:
            return "fft";
        case EngineKind::laplace:
            return "laplace";
    }
    return "?";
}

void SystemConfig::validate() const {
    if (!(beta >= 0.0 && beta <= 1.0)) throw DataError("beta must lie in [0, 1]");
    if (n < 1) throw DataError("n must be at least 1");
    if (!(half_width > 0.0)) throw DataError("half_width must be positive");
    if (!(sigma0 > 0.0)) throw DataError("sigma0 must be positive");
    if (!(sigma_kappa >= 0.0)) throw DataError("sigma_kappa must be non-negative");
    if (!(var_cap > 0.0)) throw DataError("var_cap must be positive");
    if (!std::isfinite(display_scale) || display_scale == 0.0 || !std::isfinite(display_offset)) {
        throw DataError("display transform must be a strictly monotone affine map");
    }
}

LuckFunction SystemConfig::luck() const {
    if (engine == EngineKind::laplace) {
        return LuckFunction::laplace_mix(beta, {{1.0, 1.0}});
    }
    return LuckFunction::sigmoid_mix(beta);
}

KernelSpec SystemConfig::kernel() const {
    if (sigma_kappa == 0.0) return KernelSpec::identity();
    if (engine == EngineKind::laplace) {
        // A Laplace density with scale b has variance 2 b^2.
        return KernelSpec::laplace_mix({{1.0, sigma_kappa / std::sqrt(2.0)}});
    }
    return KernelSpec::gaussian(sigma_kappa);
}

bool SystemConfig::same_model(const SystemConfig& other) const {
    return beta == other.beta && n == other.n && half_width == other.half_width &&
           sigma0 == other.sigma0 && sigma_kappa == other.sigma_kappa;
}

namespace {

double parse_double(std::string_view key, std::string_view value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw DataError("config key '" + std::string(key) + "' has a malformed value '" +
                        std::string(value) + "'");
    }
    return out;
}

int parse_int(std::string_view key, std::string_view value) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw DataError("config key '" + std::string(key) + "' has a malformed value '" +
                        std::string(value) + "'");
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

SystemConfig parse_config_text(std::string_view text) {
    SystemConfig config;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw DataError("config line " + std::to_string(line_no) + " is not key=value");
        }
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (key == "beta") {
            config.beta = parse_double(key, value);
        } else if (key == "n") {
            config.n = parse_int(key, value);
        } else if (key == "half_width") {
            config.half_width = parse_double(key, value);
        } else if (key == "sigma0") {
            config.sigma0 = parse_double(key, value);
        } else if (key == "sigma_kappa") {
            config.sigma_kappa = parse_double(key, value);
        } else if (key == "engine") {
            config.engine = parse_engine_kind(value);
        } else if (key == "display_scale") {
            config.display_scale = parse_double(key, value);
        } else if (key == "display_offset") {
            config.display_offset = parse_double(key, value);
        } else if (key == "var_cap") {
            config.var_cap = parse_double(key, value);
        } else {
            throw DataError("config line " + std::to_string(line_no) + " has unknown key '" +
                            std::string(key) + "'");
        }
    }
    config.validate();
    return config;
}

SystemConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

namespace {

std::string shortest(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace

std::string format_config(const SystemConfig& config) {
    std::ostringstream out;
    out << "beta=" << shortest(config.beta) << '\n';
    out << "n=" << config.n << '\n';
    out << "half_width=" << shortest(config.half_width) << '\n';
    out << "sigma0=" << shortest(config.sigma0) << '\n';
    out << "sigma_kappa=" << shortest(config.sigma_kappa) << '\n';
    out << "engine=" << engine_kind_name(config.engine) << '\n';
    out << "display_scale=" << shortest(config.display_scale) << '\n';
    out << "display_offset=" << shortest(config.display_offset) << '\n';
    out << "var_cap=" << shortest(config.var_cap) << '\n';
    return out.str();
}

}  // namespace gridrate
