#pragma once

/// @file config.hpp
/// @brief Flat `key=value` run configuration with dotted section prefixes.
///
/// Lines are `section.key = value`; blank lines and lines starting with `#`
/// are ignored. Unknown keys are rejected when a RunConfig is built, so typos
/// surface as ConfigError instead of silently falling back to defaults.
///
/// Recognized keys (defaults in brackets):
///
///   grid.dim [1]  grid.nx [128]  grid.ny [nx]  grid.lx [1]  grid.ly [lx]
///   model.chi [1]  model.mu [1]  model.nu [1]
///   model.a.family, model.b.family  constant|separable [constant]
///   model.{a,b}.scale [1]  .eps_x [0]  .k [1]  .eps_t [0]  .omega [1]
///   stepper.cfl_safety [0.4]  stepper.dt_min [1e-12]
///   stepper.u_ceiling [1e8]  stepper.v_floor [1e-12]
///   elliptic.rel_tolerance [1e-10]  elliptic.max_iterations [0 = 10 * cells]
///   elliptic.method  auto|direct|cg [auto]
///   run.t_end [10]  run.diagnostics_every [t_end / 100]  run.snapshot_every [0 = off]
///   run.seed [0]  run.bounded_factor [1.1]  run.rayleigh_tol [0.05]
///   ic.type  constant|gaussian|random [constant]
///   ic.value [1]  ic.center_x [lx/2]  ic.center_y [ly/2]  ic.width [0.1 lx]
///   ic.amplitude [1]  ic.baseline [0.1]
///   monitor.lp [2]  monitor.neg_power [1]  monitor.grad_ratio [1.5]  (comma lists)
///   monitor.auto_exponents [true]  adds the regime exponents when they exist
///   output.dir [empty = no files]

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "chemo/diagnostics.hpp"
#include "chemo/elliptic.hpp"
#include "chemo/mesh.hpp"
#include "chemo/stepper.hpp"

namespace chemo {

/// Ordered key/value store; later assignments override earlier ones.
class KeyValues {
public:
    static KeyValues parse(std::istream& is);
    static KeyValues parse_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    /// Parses `key=value`.
    void set_assignment(const std::string& assignment);
    bool contains(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

struct InitialCondition {
    enum class Type { Constant, Gaussian, Random };
    Type type = Type::Constant;
    double value = 1.0;
    double center_x = 0.5;
    double center_y = 0.5;
    double width = 0.1;
    double amplitude = 1.0;
    double baseline = 0.1;

    /// Random draws use stream 0 of `seed`, counter = cell index.
    ScalarField build(const Grid& g, std::uint64_t seed) const;
};

struct GridSpec {
    int dim = 1;
    int nx = 128;
    int ny = 128;
    double lx = 1.0;
    double ly = 1.0;

    Grid build() const;
};

struct RunConfig {
    GridSpec grid;
    ModelParams model;
    StepperConfig stepper;
    EllipticConfig elliptic;
    InitialCondition ic;
    MonitorSpec monitor;
    bool auto_exponents = true;
    double t_end = 10.0;
    double diagnostics_every = 0.1;
    double snapshot_every = 0.0;
    std::uint64_t seed = 0;
    double bounded_factor = 1.1;
    double rayleigh_tol = 0.05;
    std::string output_dir;

    /// Throws ConfigError for inconsistent settings, including nonpositive
    /// coefficient bounds and an initial condition without positive mass.
    void validate() const;

    static RunConfig from_key_values(const KeyValues& kv);
};

}  // namespace chemo
