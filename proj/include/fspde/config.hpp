#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fspde/coefficients.hpp"
#include "fspde/solver.hpp"
#include "fspde/verify.hpp"

namespace fspde {

enum class InitialKind { constant, spike, table };

struct InitialCondition {
    InitialKind kind = InitialKind::constant;
    double value = 0.0;                // constant
    std::vector<double> table_values;  // table (length nx)

    std::vector<double> sample(const GridSpec& grid) const;
    double sup(const GridSpec& grid) const;
};

// One configuration file drives every subcommand. Unknown keys are rejected
// so a typo cannot silently change a study.
struct RunConfig {
    ModelParams model;
    GridSpec grid;
    CoefficientSpec b = CoefficientSpec::linear(0.0);
    CoefficientSpec sigma = CoefficientSpec::linear(0.0);
    InitialCondition initial;
    std::size_t replicas = 100;
    std::uint64_t base_seed = 1;
    std::vector<double> truncation_levels;
    std::vector<double> probe_times;
    std::vector<double> probe_positions;
    std::vector<double> moment_orders;
    double constant_c = 4.0;
    std::optional<double> K0;

    void validate() const;

    // Grid-snapped probe points; warnings describe any snapping applied.
    std::vector<ProbePoint> probes(std::vector<std::string>* warnings = nullptr) const;

    std::string to_json_text() const;  // canonical serialization (round-trips)
    std::uint64_t content_hash() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

}  // namespace fspde
