// pnes: capacity of binary channels built on photon-number entangled states
// measured by noisy photon counters.
//
//   pnes capacity      --state twb --mean 5 --eta 0.9 --noise-mean 0.2
//   pnes sweep-energy  [--config fig1.json] [flags]
//   pnes sweep-noise   [--config fig2.json] [flags]
//   pnes kernel        --eta 0.7 --noise-mean 0 --n-max 10
//   pnes validate
//
// Exit status: 0 success, 1 validation failure, 2 configuration error.

#include "pnes/detector.hpp"
#include "pnes/sweep.hpp"
#include "pnes/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using pnes::ConfigError;

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_config = 2;

std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos)
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("--" + key + ": '" + item + "' is not a number");
        }
    }
    if (values.empty())
        throw ConfigError("--" + key + ": expected a number or comma-separated list");
    return values;
}

double parse_single(const std::string& key, const std::string& text)
{
    const auto values = parse_list(key, text);
    if (values.size() != 1)
        throw ConfigError("--" + key + " takes a single value here");
    return values.front();
}

std::string json_to_setting(const std::string& key, const nlohmann::json& value)
{
    auto scalar = [&](const nlohmann::json& v) -> std::string {
        if (v.is_string())
            return v.get<std::string>();
        if (v.is_number_integer())
            return std::to_string(v.get<long long>());
        if (v.is_number()) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
            return buf;
        }
        throw ConfigError("config key '" + key + "' has an unsupported value type");
    };
    if (!value.is_array())
        return scalar(value);
    std::string joined;
    for (const auto& v : value) {
        if (!joined.empty())
            joined += ',';
        joined += scalar(v);
    }
    return joined;
}

/// Settings keyed by flag name without the leading dashes. Config-file entries
/// are loaded first and command-line flags overwrite them.
using Settings = std::map<std::string, std::string>;

void load_config_file(const std::string& path, Settings& settings)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("config file '" + path + "' must hold a JSON object");
    for (const auto& [key, value] : doc.items()) {
        std::string flag = key;
        for (char& c : flag)
            if (c == '_')
                c = '-';
        settings[flag] = json_to_setting(key, value);
    }
}

std::vector<pnes::Family> parse_families(const std::string& text)
{
    if (text == "both")
        return {pnes::Family::TMC, pnes::Family::TWB};
    try {
        return {pnes::parse_family(text)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--state: ") + e.what());
    }
}

std::vector<pnes::NoiseStatistics> parse_statistics(const std::string& text)
{
    if (text == "both")
        return {pnes::NoiseStatistics::Poisson, pnes::NoiseStatistics::Thermal};
    try {
        return {pnes::parse_noise_statistics(text)};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--noise-stat: ") + e.what());
    }
}

void apply_settings(const Settings& settings, pnes::SweepConfig& config)
{
    const bool energy = config.axis == pnes::SweepAxis::SignalMean;
    for (const auto& [key, value] : settings) {
        if (key == "state") {
            config.families = parse_families(value);
        } else if (key == "mean") {
            if (energy)
                config.axis_grid = parse_list(key, value);
            else
                config.fixed_signal_mean = parse_single(key, value);
        } else if (key == "noise-mean") {
            if (energy)
                config.fixed_noise_mean = parse_single(key, value);
            else
                config.axis_grid = parse_list(key, value);
        } else if (key == "eta") {
            config.etas = parse_list(key, value);
        } else if (key == "noise-stat") {
            config.noise_statistics = parse_statistics(value);
        } else if (key == "threshold") {
            if (value == "auto") {
                config.threshold.reset();
            } else {
                const double t = parse_single(key, value);
                if (t < 0 || t != static_cast<double>(static_cast<long long>(t)))
                    throw ConfigError("--threshold must be 'auto' or a nonnegative integer");
                config.threshold = static_cast<std::size_t>(t);
            }
        } else if (key == "tol") {
            config.tol = parse_single(key, value);
        } else if (key == "format") {
            if (value == "csv")
                config.format = pnes::OutputFormat::CSV;
            else if (value == "json")
                config.format = pnes::OutputFormat::JSON;
            else
                throw ConfigError("--format must be csv or json");
        } else if (key == "jobs") {
            const double j = parse_single(key, value);
            if (j < 1 || j != static_cast<double>(static_cast<unsigned>(j)))
                throw ConfigError("--jobs must be a positive integer");
            config.jobs = static_cast<unsigned>(j);
        } else if (key != "out") {
            throw ConfigError("unknown setting '" + key + "'");
        }
    }
}

void emit(const std::string& text, const Settings& settings)
{
    const auto it = settings.find("out");
    if (it == settings.end() || it->second == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(it->second, std::ios::binary);
    if (!out)
        throw ConfigError("cannot open output file '" + it->second + "' for writing");
    out << text;
    if (!out)
        throw ConfigError("failed writing output file '" + it->second + "'");
}

struct CommonFlags {
    std::string config_path;
    Settings flags;
};

void add_flag(CLI::App* cmd, CommonFlags& common, const std::string& name, const std::string& help)
{
    cmd->add_option_function<std::string>(
        "--" + name, [&common, name](const std::string& v) { common.flags[name] = v; }, help);
}

Settings merged(const CommonFlags& common)
{
    Settings settings;
    if (!common.config_path.empty())
        load_config_file(common.config_path, settings);
    for (const auto& [k, v] : common.flags)
        settings[k] = v;
    return settings;
}

void add_sweep_flags(CLI::App* cmd, CommonFlags& common)
{
    cmd->add_option("--config", common.config_path, "JSON config file; command-line flags take precedence");
    add_flag(cmd, common, "state", "twb, tmc or both");
    add_flag(cmd, common, "mean", "signal mean photon number (list for sweep-energy and capacity)");
    add_flag(cmd, common, "eta", "detector efficiency, single value or comma-separated list");
    add_flag(cmd, common, "noise-mean", "dark-count mean photon number (list for sweep-noise)");
    add_flag(cmd, common, "noise-stat", "poisson, thermal or both");
    add_flag(cmd, common, "threshold", "auto or a fixed integer threshold");
    add_flag(cmd, common, "tol", "truncation tolerance");
    add_flag(cmd, common, "format", "csv or json");
    add_flag(cmd, common, "out", "output path (default stdout)");
    add_flag(cmd, common, "jobs", "worker threads");
}

int run_sweep_command(pnes::SweepConfig config, const CommonFlags& common)
{
    const Settings settings = merged(common);
    apply_settings(settings, config);
    const auto rows = pnes::run_sweep(config);
    emit(config.format == pnes::OutputFormat::CSV ? pnes::to_csv(rows) : pnes::to_json(rows, config), settings);
    return exit_ok;
}

int run_kernel_command(const CommonFlags& common)
{
    const Settings settings = merged(common);
    pnes::DetectorModel detector;
    detector.noise.mean = 0.0;
    std::size_t n_max = 10;
    double tol = 1e-10;
    for (const auto& [key, value] : settings) {
        if (key == "eta")
            detector.eta = parse_single(key, value);
        else if (key == "noise-mean")
            detector.noise.mean = parse_single(key, value);
        else if (key == "noise-stat") {
            const auto stats = parse_statistics(value);
            if (stats.size() != 1)
                throw ConfigError("--noise-stat must be poisson or thermal for the kernel dump");
            detector.noise.statistics = stats.front();
        } else if (key == "n-max") {
            const double n = parse_single(key, value);
            if (n < 0 || n != static_cast<double>(static_cast<std::size_t>(n)))
                throw ConfigError("--n-max must be a nonnegative integer");
            n_max = static_cast<std::size_t>(n);
        } else if (key == "tol")
            tol = parse_single(key, value);
        else if (key != "out")
            throw ConfigError("setting '" + key + "' does not apply to the kernel command");
    }
    if (!(detector.eta >= 0.0 && detector.eta <= 1.0))
        throw ConfigError("--eta must lie in [0, 1]");
    if (!(detector.noise.mean >= 0.0))
        throw ConfigError("--noise-mean must be nonnegative");
    if (!(tol > 0.0 && tol < 1.0))
        throw ConfigError("--tol must lie in (0, 1)");

    std::ostringstream text;
    pnes::write_kernel(text, pnes::build_kernel(detector, n_max, tol));
    emit(text.str(), settings);
    return exit_ok;
}

int run_validate_command(const CommonFlags& common, bool mutate_sign)
{
    pnes::ValidationOptions options;
    const Settings settings = merged(common);
    if (auto it = settings.find("eta"); it != settings.end()) {
        options.etas = parse_list("eta", it->second);
        for (double eta : options.etas)
            if (!(eta > 0.0 && eta < 1.0))
                throw ConfigError("--eta values for validate must lie strictly inside (0, 1)");
    }
    if (mutate_sign)
        options.oracle_sign = pnes::AmplitudeSign::dropped;
    const auto report = pnes::run_validation(options);
    std::ostringstream text;
    pnes::print_report(text, report);
    emit(text.str(), settings);
    return report.passed() ? exit_ok : exit_validation;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Capacity of binary channels built on photon-number entangled states with noisy photodetection"};
    app.set_version_flag("--version", pnes::tool_version);
    app.require_subcommand(1);

    CommonFlags capacity_flags, energy_flags, noise_flags, kernel_flags, validate_flags;

    auto* capacity_cmd = app.add_subcommand("capacity", "capacity at given signal mean(s), efficiencies and noise");
    add_sweep_flags(capacity_cmd, capacity_flags);

    auto* energy_cmd = app.add_subcommand("sweep-energy", "capacity versus signal mean photon number");
    add_sweep_flags(energy_cmd, energy_flags);

    auto* noise_cmd = app.add_subcommand("sweep-noise", "capacity versus dark-count mean photon number");
    add_sweep_flags(noise_cmd, noise_flags);

    auto* kernel_cmd = app.add_subcommand("kernel", "dump the count kernel K(s|n) as delimited text");
    kernel_cmd->add_option("--config", kernel_flags.config_path, "JSON config file");
    add_flag(kernel_cmd, kernel_flags, "eta", "detector efficiency");
    add_flag(kernel_cmd, kernel_flags, "noise-mean", "dark-count mean photon number");
    add_flag(kernel_cmd, kernel_flags, "noise-stat", "poisson or thermal");
    add_flag(kernel_cmd, kernel_flags, "n-max", "largest signal photon number (default 10)");
    add_flag(kernel_cmd, kernel_flags, "tol", "noise truncation tolerance");
    add_flag(kernel_cmd, kernel_flags, "out", "output path (default stdout)");

    bool mutate_sign = false;
    auto* validate_cmd = app.add_subcommand("validate", "run the numerical self-check suite");
    validate_cmd->add_option("--config", validate_flags.config_path, "JSON config file");
    add_flag(validate_cmd, validate_flags, "eta", "efficiency grid for the equivalence checks");
    add_flag(validate_cmd, validate_flags, "out", "report path (default stdout)");
    validate_cmd->add_flag("--mutate-amplitude-sign", mutate_sign,
                           "drop the (-1)^k2 noise-port sign in the oracle amplitudes; the suite must then fail");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (*capacity_cmd) {
            auto config = pnes::energy_sweep_defaults();
            config.axis_grid = {5.0};
            return run_sweep_command(config, capacity_flags);
        }
        if (*energy_cmd)
            return run_sweep_command(pnes::energy_sweep_defaults(), energy_flags);
        if (*noise_cmd)
            return run_sweep_command(pnes::noise_sweep_defaults(), noise_flags);
        if (*kernel_cmd)
            return run_kernel_command(kernel_flags);
        if (*validate_cmd)
            return run_validate_command(validate_flags, mutate_sign);
    } catch (const ConfigError& e) {
        std::cerr << "pnes: configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "pnes: configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "pnes: error: " << e.what() << "\n";
        return exit_config;
    }
    return exit_config;
}
