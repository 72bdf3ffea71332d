#include "pnes/sweep.hpp"

#include "pnes/channel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace pnes {

std::vector<double> log_spaced(double lo, double hi, std::size_t points)
{
    if (points == 1)
        return {lo};
    std::vector<double> grid(points);
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = lo * std::exp(step * static_cast<double>(i));
    grid.back() = hi;
    return grid;
}

std::vector<double> linear_spaced(double lo, double hi, std::size_t points)
{
    if (points == 1)
        return {lo};
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    return grid;
}

SweepConfig energy_sweep_defaults()
{
    SweepConfig c;
    c.axis = SweepAxis::SignalMean;
    c.axis_grid = log_spaced(0.25, 10.0, 40);
    c.etas = {0.5, 0.7, 0.9, 1.0};
    c.fixed_noise_mean = 0.2;
    return c;
}

SweepConfig noise_sweep_defaults()
{
    SweepConfig c;
    c.axis = SweepAxis::NoiseMean;
    c.axis_grid = linear_spaced(0.0, 2.0, 41);
    c.etas = {0.5, 0.7, 0.9};
    c.fixed_signal_mean = 5.0;
    return c;
}

namespace {

void require_increasing(const std::vector<double>& grid, const char* name)
{
    if (grid.empty())
        throw ConfigError(std::string(name) + " grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]))
            throw ConfigError(std::string(name) + " grid contains a non-finite value");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw ConfigError(std::string(name) + " grid must be strictly increasing (entry " + std::to_string(i) + ")");
    }
}

std::string fmt(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Point {
    Family family;
    double signal_mean;
    std::size_t group;
};

}  // namespace

void validate_config(const SweepConfig& config)
{
    if (config.families.empty())
        throw ConfigError("no state family selected");
    if (config.noise_statistics.empty())
        throw ConfigError("no noise statistics selected");
    const char* axis_name = config.axis == SweepAxis::SignalMean ? "signal mean" : "noise mean";
    require_increasing(config.axis_grid, axis_name);
    require_increasing(config.etas, "eta");
    if (config.axis_grid.front() < 0.0)
        throw ConfigError(std::string(axis_name) + " values must be nonnegative");
    for (double eta : config.etas)
        if (eta < 0.0 || eta > 1.0)
            throw ConfigError("eta=" + fmt(eta) + " is outside [0, 1]");
    if (!(config.tol > 0.0 && config.tol < 1.0))
        throw ConfigError("tol must lie in (0, 1)");
    if (config.axis == SweepAxis::SignalMean && !(config.fixed_noise_mean >= 0.0 && std::isfinite(config.fixed_noise_mean)))
        throw ConfigError("noise mean must be finite and nonnegative");
    if (config.axis == SweepAxis::NoiseMean && !(config.fixed_signal_mean >= 0.0 && std::isfinite(config.fixed_signal_mean)))
        throw ConfigError("signal mean must be finite and nonnegative");
    if (config.jobs == 0)
        throw ConfigError("jobs must be at least 1");
}

std::vector<SweepRow> run_sweep(const SweepConfig& config)
{
    validate_config(config);
    const bool energy = config.axis == SweepAxis::SignalMean;

    // States depend only on (family, mean); the truncation gets half of the
    // tail budget, the two kernels the rest.
    std::map<std::pair<Family, double>, PnesState> states;
    auto state_for = [&](Family f, double mean) -> const PnesState& {
        auto it = states.find({f, mean});
        if (it == states.end())
            it = states.emplace(std::pair{f, mean}, build_state(f, parameter_from_mean(f, mean), config.tol / 2)).first;
        return it->second;
    };

    std::vector<SweepRow> rows;
    std::vector<Point> points;
    std::vector<DetectorModel> groups;
    std::vector<std::size_t> group_n_max;
    std::map<std::tuple<int, double, double>, std::size_t> group_index;

    for (Family family : config.families) {
        for (NoiseStatistics stat : config.noise_statistics) {
            for (double eta : config.etas) {
                for (double value : config.axis_grid) {
                    const double signal_mean = energy ? value : config.fixed_signal_mean;
                    const double noise_mean = energy ? config.fixed_noise_mean : value;
                    const auto key = std::tuple{static_cast<int>(stat), eta, noise_mean};
                    auto [it, inserted] = group_index.emplace(key, groups.size());
                    if (inserted) {
                        groups.push_back({eta, NoiseModel{stat, noise_mean}});
                        group_n_max.push_back(0);
                    }
                    const PnesState& state = state_for(family, signal_mean);
                    group_n_max[it->second] = std::max(group_n_max[it->second], state.n_max());

                    SweepRow row;
                    row.family = family;
                    row.signal_mean = signal_mean;
                    row.eta = eta;
                    row.noise_mean = noise_mean;
                    row.noise_statistics = stat;
                    rows.push_back(row);
                    points.push_back({family, signal_mean, it->second});
                }
            }
        }
    }

    std::vector<std::vector<std::size_t>> members(groups.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        members[points[i].group].push_back(i);

    auto evaluate_group = [&](std::size_t g) {
        const CountKernel kernel = build_kernel(groups[g], group_n_max[g], config.tol);
        for (std::size_t i : members[g]) {
            const PnesState& state = states.at({points[i].family, points[i].signal_mean});
            SweepRow& row = rows[i];
            if (config.threshold) {
                const JointCountDistribution joint = joint_distribution(state, kernel);
                row.capacity_bits = mutual_information(confusion_matrix(joint, *config.threshold));
                row.optimal_threshold = *config.threshold;
                row.tail_mass = joint.tail_mass;
            } else {
                const CapacityResult result = capacity(state, kernel, config.tol);
                row.capacity_bits = result.capacity;
                row.optimal_threshold = result.optimal_threshold;
                row.tail_mass = result.tail_mass;
            }
        }
    };

    const unsigned workers = std::min<unsigned>(config.jobs, static_cast<unsigned>(groups.size()));
    if (workers <= 1) {
        for (std::size_t g = 0; g < groups.size(); ++g)
            evaluate_group(g);
        return rows;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t g = next++; g < groups.size(); g = next++) {
                try {
                    evaluate_group(g);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
    return rows;
}

std::vector<SweepRow> run_sweep_energy(const SweepConfig& config)
{
    if (config.axis != SweepAxis::SignalMean)
        throw ConfigError("sweep-energy requires the signal-mean axis");
    return run_sweep(config);
}

std::vector<SweepRow> run_sweep_noise(const SweepConfig& config)
{
    if (config.axis != SweepAxis::NoiseMean)
        throw ConfigError("sweep-noise requires the noise-mean axis");
    return run_sweep(config);
}

std::string to_csv(const std::vector<SweepRow>& rows)
{
    std::string out = csv_header;
    out += '\n';
    for (const auto& r : rows) {
        out += to_string(r.family);
        out += ',' + fmt(r.signal_mean) + ',' + fmt(r.eta) + ',' + fmt(r.noise_mean) + ',';
        out += to_string(r.noise_statistics);
        out += ',' + fmt(r.capacity_bits) + ',' + std::to_string(r.optimal_threshold) + ',' + fmt(r.tail_mass) + '\n';
    }
    return out;
}

std::string to_json(const std::vector<SweepRow>& rows, const SweepConfig& config)
{
    using nlohmann::json;
    json meta;
    meta["tool"] = "pnes";
    meta["version"] = tool_version;
    meta["tol"] = config.tol;
    meta["sweep_axis"] = config.axis == SweepAxis::SignalMean ? "signal_mean" : "noise_mean";
    meta["grid"] = config.axis_grid;
    meta["eta"] = config.etas;
    json families = json::array();
    for (Family f : config.families)
        families.push_back(std::string(to_string(f)));
    meta["families"] = families;
    json stats = json::array();
    for (NoiseStatistics s : config.noise_statistics)
        stats.push_back(std::string(to_string(s)));
    meta["noise_stat"] = stats;
    if (config.axis == SweepAxis::SignalMean)
        meta["noise_mean"] = config.fixed_noise_mean;
    else
        meta["signal_mean"] = config.fixed_signal_mean;
    if (config.threshold)
        meta["threshold"] = *config.threshold;
    else
        meta["threshold"] = "auto";
    meta["capacity_units"] = "bits";

    json out_rows = json::array();
    for (const auto& r : rows) {
        out_rows.push_back({{"family", std::string(to_string(r.family))},
                            {"signal_mean", r.signal_mean},
                            {"eta", r.eta},
                            {"noise_mean", r.noise_mean},
                            {"noise_stat", std::string(to_string(r.noise_statistics))},
                            {"capacity_bits", r.capacity_bits},
                            {"optimal_T", r.optimal_threshold},
                            {"tail_mass", r.tail_mass}});
    }
    json doc;
    doc["meta"] = meta;
    doc["rows"] = out_rows;
    return doc.dump(2) + "\n";
}

}  // namespace pnes
