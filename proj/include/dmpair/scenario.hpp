#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmpair/bvfunc.hpp"
#include "dmpair/field.hpp"
#include "dmpair/gaussgreen.hpp"
#include "dmpair/measure.hpp"
#include "dmpair/oracle.hpp"
#include "dmpair/pairing.hpp"

namespace dmpair {

/// Deterministic seeded generator for reproducible sampling.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
    double uniform();  // in [0,1)
    double uniform(double a, double b);
};

struct GlueConfig {
    std::string polygon;
    enum class Mode { Matching, ZeroOutside } mode = Mode::Matching;
};

struct Scenario {
    std::string name;
    DomainPtr domain;
    std::shared_ptr<PiecewiseField> field;
    std::shared_ptr<PiecewiseBV> bv;

    struct NamedSet {
        std::string name;
        FinitePerimeterSet set;
    };
    std::vector<NamedSet> polygons;
    std::vector<TestFunction> test_functions;
    std::uint64_t seed = 0;
    std::size_t random_count = 0;
    std::vector<double> eps_sequence;
    std::vector<std::string> checks;
    std::map<std::string, double> tolerances;
    std::optional<GlueConfig> glue;
    std::vector<std::string> gauss_green_polygons;
    std::vector<std::string> variation_polygons;
    std::map<std::string, double> gauss_green_references;  // polygon → known LHS=RHS value

    const FinitePerimeterSet& polygon(const std::string& pname) const;
    double tol(const std::string& key) const;
};

Scenario load_scenario(const std::string& path);

/// Seeded random bump supported inside the domain.
TestFunction random_bump(const PolygonalDomain& dom, SplitMix64& rng);

struct CheckRow {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct ConvergenceRow {
    std::string check;
    double parameter = 0.0;
    double value = 0.0;
    double extrapolated = 0.0;
    double order = 0.0;
};

struct RunOptions {
    quad::Options quad;
    oracle::Options oracle;
    std::optional<std::uint64_t> seed_override;
    bool serial = false;
};

struct RunResult {
    std::vector<CheckRow> rows;
    std::vector<ConvergenceRow> convergence;
    std::uint64_t seed = 0;
    bool ok = true;
};

RunResult run_scenario(const Scenario& sc, const RunOptions& opt = {});

std::string format_double(double v);
void write_report_csv(const std::string& path, const RunResult& result,
                      const std::string& scenario_name);
void write_convergence_csv(const std::string& path, const RunResult& result);

} // namespace dmpair
