#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "chemo/engine.hpp"
#include "chemo/errors.hpp"
#include "chemo/format.hpp"
#include "chemo/rng.hpp"

namespace chemo {
namespace {

std::uint64_t base_seed(const KeyValues& kv) {
    auto it = kv.entries().find("run.seed");
    if (it == kv.entries().end()) return 0;
    try {
        std::size_t pos = 0;
        if (it->second.empty() || it->second.front() == '-') throw std::invalid_argument(it->second);
        const std::uint64_t seed = std::stoull(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return seed;
    } catch (const std::exception&) {
        throw ConfigError("config: run.seed must be an unsigned integer, got '" + it->second + "'");
    }
}

SweepRow run_cell(const KeyValues& base, const std::vector<SweepAxis>& axes, std::size_t cell,
                  std::uint64_t seed, const std::string& outdir) {
    SweepRow row;
    row.cell = cell;
    row.a_inf = std::numeric_limits<double>::quiet_NaN();
    row.threshold = std::numeric_limits<double>::quiet_NaN();

    KeyValues kv = base;
    std::size_t rest = cell;
    for (auto axis = axes.rbegin(); axis != axes.rend(); ++axis) {
        row.axis_values.insert(row.axis_values.begin(), axis->values[rest % axis->values.size()]);
        rest /= axis->values.size();
    }
    for (std::size_t i = 0; i < axes.size(); ++i) kv.set(axes[i].key, row.axis_values[i]);
    kv.set("run.seed", std::to_string(derive_seed(seed, cell)));
    kv.set("output.dir", outdir.empty() ? std::string()
                                        : (std::filesystem::path(outdir) / ("cell_" + std::to_string(cell))).string());

    try {
        const RunConfig cfg = RunConfig::from_key_values(kv);
        const ThresholdVerdict tv = boundedness_threshold(cfg.model.chi, cfg.model.mu, cfg.model.a.inf());
        row.a_inf = tv.a_inf;
        row.threshold = tv.threshold;
        row.regime = tv.on_boundary ? "boundary" : (tv.satisfied ? "above" : "below");
        const RunOutcome out = run(cfg);
        row.verdict = to_string(out.verdict);
        row.trigger = out.trigger ? to_string(*out.trigger) : "";
        row.t_reached = out.t_reached;
        row.peak_max_u = out.peak_max_u;
        row.min_min_v = out.min_min_v;
    } catch (const ConfigError&) {
        row.verdict = "ConfigError";
    } catch (const std::exception&) {
        row.verdict = "Error";
    }
    return row;
}

}  // namespace

SweepAxis SweepAxis::parse(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("sweep: axis must look like key=v1,v2,...");
    SweepAxis axis;
    axis.key = spec.substr(0, eq);
    std::stringstream ss(spec.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) axis.values.push_back(item);
    }
    if (axis.values.empty()) throw ConfigError("sweep: axis '" + axis.key + "' has no values");
    return axis;
}

std::string SweepTable::csv() const {
    std::ostringstream os;
    os << "cell";
    for (const auto& k : axis_keys) os << ',' << k;
    os << ",a_inf,threshold,regime,verdict,trigger,t_reached,peak_max_u,min_min_v\n";
    for (const auto& r : rows) {
        os << r.cell;
        for (const auto& v : r.axis_values) os << ',' << v;
        os << ',' << format_double(r.a_inf) << ',' << format_double(r.threshold) << ',' << r.regime
           << ',' << r.verdict << ',' << r.trigger << ',' << format_double(r.t_reached) << ','
           << format_double(r.peak_max_u) << ',' << format_double(r.min_min_v) << '\n';
    }
    return os.str();
}

SweepTable sweep(const KeyValues& base, const std::vector<SweepAxis>& axes, const SweepOptions& options) {
    SweepTable table;
    std::size_t cells = 1;
    for (const auto& axis : axes) {
        if (axis.values.empty()) throw ConfigError("sweep: axis '" + axis.key + "' has no values");
        table.axis_keys.push_back(axis.key);
        cells *= axis.values.size();
    }
    std::vector<std::size_t> order = options.order;
    if (order.empty()) {
        order.resize(cells);
        std::iota(order.begin(), order.end(), 0);
    } else {
        std::vector<std::size_t> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i] != i || sorted.size() != cells) {
                throw ConfigError("sweep: execution order is not a permutation of the cells");
            }
        }
    }

    const std::uint64_t seed = base_seed(base);
    table.rows.resize(cells);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells; i = next++) {
            const std::size_t cell = order[i];
            table.rows[cell] = run_cell(base, axes, cell, seed, options.outdir);
        }
    };
    const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(cells)));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return table;
}

}  // namespace chemo
