#include "chemo/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "chemo/errors.hpp"
#include "chemo/rng.hpp"

namespace chemo {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Reads typed values and remembers which keys were used.
class Reader {
public:
    explicit Reader(const KeyValues& kv) : kv_(kv) {}

    bool has(const std::string& key) const { return kv_.contains(key); }

    double number(const std::string& key, double fallback) {
        const std::string* raw = lookup(key);
        if (raw == nullptr) return fallback;
        return parse_number(key, *raw);
    }

    int integer(const std::string& key, int fallback) {
        const std::string* raw = lookup(key);
        if (raw == nullptr) return fallback;
        const double x = parse_number(key, *raw);
        if (x != std::floor(x) || std::abs(x) > 1e9) {
            throw ConfigError("config: " + key + " must be an integer, got '" + *raw + "'");
        }
        return static_cast<int>(x);
    }

    std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
        const std::string* raw = lookup(key);
        if (raw == nullptr) return fallback;
        try {
            std::size_t pos = 0;
            // stoull silently wraps negative input.
            if (raw->empty() || raw->front() == '-') throw std::invalid_argument(*raw);
            const unsigned long long v = std::stoull(*raw, &pos);
            if (pos != raw->size()) throw std::invalid_argument(*raw);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config: " + key + " must be an unsigned integer, got '" + *raw + "'");
        }
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const std::string* raw = lookup(key);
        return raw == nullptr ? fallback : *raw;
    }

    bool boolean(const std::string& key, bool fallback) {
        const std::string* raw = lookup(key);
        if (raw == nullptr) return fallback;
        if (*raw == "true" || *raw == "1" || *raw == "yes") return true;
        if (*raw == "false" || *raw == "0" || *raw == "no") return false;
        throw ConfigError("config: " + key + " must be true or false, got '" + *raw + "'");
    }

    std::vector<double> list(const std::string& key, std::vector<double> fallback) {
        const std::string* raw = lookup(key);
        if (raw == nullptr) return fallback;
        std::vector<double> out;
        std::stringstream ss(*raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(parse_number(key, item));
        }
        return out;
    }

    void reject_unused() const {
        for (const auto& [key, value] : kv_.entries()) {
            if (used_.count(key) == 0) throw ConfigError("config: unknown key '" + key + "'");
        }
    }

private:
    const std::string* lookup(const std::string& key) {
        used_.insert(key);
        auto it = kv_.entries().find(key);
        return it == kv_.entries().end() ? nullptr : &it->second;
    }

    static double parse_number(const std::string& key, const std::string& raw) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config: " + key + " expects a number, got '" + raw + "'");
        }
    }

    const KeyValues& kv_;
    std::set<std::string> used_;
};

CoefficientSpec read_coefficient(Reader& in, const std::string& prefix) {
    const std::string family = in.text(prefix + ".family", "constant");
    const double scale = in.number(prefix + ".scale", 1.0);
    const double eps_x = in.number(prefix + ".eps_x", 0.0);
    const double k = in.number(prefix + ".k", 1.0);
    const double eps_t = in.number(prefix + ".eps_t", 0.0);
    const double omega = in.number(prefix + ".omega", 1.0);
    if (family == "constant") return CoefficientSpec::constant(scale);
    if (family == "separable") return CoefficientSpec::separable(scale, eps_x, k, eps_t, omega);
    throw ConfigError("config: " + prefix + ".family must be constant or separable");
}

}  // namespace

KeyValues KeyValues::parse(std::istream& is) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.find('=') == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key=value");
        }
        kv.set_assignment(t);
    }
    return kv;
}

KeyValues KeyValues::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse(in);
}

void KeyValues::set(const std::string& key, const std::string& value) {
    const std::string k = trim(key);
    if (k.empty()) throw ConfigError("config: empty key");
    entries_[k] = trim(value);
}

void KeyValues::set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected key=value, got '" + assignment + "'");
    set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

bool KeyValues::contains(const std::string& key) const { return entries_.count(key) != 0; }

Grid GridSpec::build() const {
    try {
        if (dim == 1) return Grid::line(lx, nx);
        if (dim == 2) return Grid::rect(lx, ly, nx, ny);
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    throw ConfigError("config: grid.dim must be 1 or 2");
}

ScalarField InitialCondition::build(const Grid& g, std::uint64_t seed) const {
    switch (type) {
        case Type::Constant:
            return ScalarField(g, value);
        case Type::Gaussian:
            return ScalarField::from_function(g, [&](double x, double y) {
                double r2 = (x - center_x) * (x - center_x);
                if (g.dim() == 2) r2 += (y - center_y) * (y - center_y);
                return baseline + amplitude * std::exp(-r2 / (2.0 * width * width));
            });
        case Type::Random: {
            ScalarField u(g);
            for (std::size_t k = 0; k < u.size(); ++k) {
                u[k] = baseline + amplitude * random_uniform(seed, 0, k);
            }
            return u;
        }
    }
    throw ConfigError("config: unknown initial condition type");
}

void RunConfig::validate() const {
    const Grid g = grid.build();
    try {
        model.validate();
        stepper.validate();
        elliptic.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!(model.a.inf() > 0.0) || !(model.b.inf() > 0.0)) {
        throw ConfigError("config: coefficients a and b need positive lower bounds");
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("config: run.t_end must be positive");
    if (!(diagnostics_every > 0.0) || diagnostics_every > t_end / 6.0) {
        throw ConfigError("config: run.diagnostics_every must lie in (0, t_end / 6] so every third of the run is sampled");
    }
    if (snapshot_every < 0.0) throw ConfigError("config: run.snapshot_every must be >= 0");
    if (!(bounded_factor >= 1.0)) throw ConfigError("config: run.bounded_factor must be >= 1");
    if (!(rayleigh_tol >= 0.0)) throw ConfigError("config: run.rayleigh_tol must be >= 0");
    const bool shaped = ic.type != InitialCondition::Type::Constant;
    if ((!shaped && !(ic.value >= 0.0)) || (shaped && (!(ic.baseline >= 0.0) || !(ic.amplitude >= 0.0)))) {
        throw ConfigError("config: initial condition must be nonnegative");
    }
    if (ic.type == InitialCondition::Type::Gaussian && !(ic.width > 0.0)) {
        throw ConfigError("config: ic.width must be positive");
    }
    const ScalarField u0 = ic.build(g, seed);
    if (!u0.all_finite() || !(integrate(u0) > 0.0)) {
        throw ConfigError("config: initial condition must have positive mass");
    }
    for (double p : monitor.lp_exponents) {
        if (!(p >= 1.0)) throw ConfigError("config: monitor.lp exponents must be >= 1");
    }
    for (double p : monitor.neg_power_exponents) {
        if (!(p > 0.0)) throw ConfigError("config: monitor.neg_power exponents must be positive");
    }
}

RunConfig RunConfig::from_key_values(const KeyValues& kv) {
    Reader in(kv);
    RunConfig c;
    c.grid.dim = in.integer("grid.dim", 1);
    c.grid.nx = in.integer("grid.nx", 128);
    c.grid.ny = in.integer("grid.ny", c.grid.nx);
    c.grid.lx = in.number("grid.lx", 1.0);
    c.grid.ly = in.number("grid.ly", c.grid.lx);

    c.model.chi = in.number("model.chi", 1.0);
    c.model.mu = in.number("model.mu", 1.0);
    c.model.nu = in.number("model.nu", 1.0);
    c.model.a = read_coefficient(in, "model.a");
    c.model.b = read_coefficient(in, "model.b");

    c.stepper.cfl_safety = in.number("stepper.cfl_safety", c.stepper.cfl_safety);
    c.stepper.dt_min = in.number("stepper.dt_min", c.stepper.dt_min);
    c.stepper.u_ceiling = in.number("stepper.u_ceiling", c.stepper.u_ceiling);
    c.stepper.v_floor = in.number("stepper.v_floor", c.stepper.v_floor);

    c.elliptic.rel_tolerance = in.number("elliptic.rel_tolerance", c.elliptic.rel_tolerance);
    c.elliptic.max_iterations = in.integer("elliptic.max_iterations", 0);
    const std::string method = in.text("elliptic.method", "auto");
    if (method == "auto") {
        c.elliptic.method = EllipticMethod::Auto;
    } else if (method == "direct") {
        c.elliptic.method = EllipticMethod::Direct1D;
    } else if (method == "cg") {
        c.elliptic.method = EllipticMethod::ConjugateGradient;
    } else {
        throw ConfigError("config: elliptic.method must be auto, direct or cg");
    }

    c.t_end = in.number("run.t_end", 10.0);
    c.diagnostics_every = in.number("run.diagnostics_every", c.t_end / 100.0);
    c.snapshot_every = in.number("run.snapshot_every", 0.0);
    c.seed = in.unsigned64("run.seed", 0);
    c.bounded_factor = in.number("run.bounded_factor", 1.1);
    c.rayleigh_tol = in.number("run.rayleigh_tol", 0.05);

    const std::string ic_type = in.text("ic.type", "constant");
    if (ic_type == "constant") {
        c.ic.type = InitialCondition::Type::Constant;
    } else if (ic_type == "gaussian") {
        c.ic.type = InitialCondition::Type::Gaussian;
    } else if (ic_type == "random") {
        c.ic.type = InitialCondition::Type::Random;
    } else {
        throw ConfigError("config: ic.type must be constant, gaussian or random");
    }
    c.ic.value = in.number("ic.value", 1.0);
    c.ic.center_x = in.number("ic.center_x", 0.5 * c.grid.lx);
    c.ic.center_y = in.number("ic.center_y", 0.5 * c.grid.ly);
    c.ic.width = in.number("ic.width", 0.1 * c.grid.lx);
    c.ic.amplitude = in.number("ic.amplitude", 1.0);
    c.ic.baseline = in.number("ic.baseline", 0.1);

    c.monitor.lp_exponents = in.list("monitor.lp", {2.0});
    c.monitor.neg_power_exponents = in.list("monitor.neg_power", {1.0});
    c.monitor.grad_ratio_exponents = in.list("monitor.grad_ratio", {1.5});
    c.auto_exponents = in.boolean("monitor.auto_exponents", true);

    c.output_dir = in.text("output.dir", "");

    in.reject_unused();
    c.validate();
    return c;
}

}  // namespace chemo
