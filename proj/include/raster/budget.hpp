#pragma once

#include <string>
#include <vector>

// Scalar efficiency-chain and trap-count accounting.
namespace raster::budget {

struct Stage {
    std::string name;
    double transmission = 1.0;  // [0, 1]
};

struct EfficiencyChain {
    std::string name;
    std::vector<Stage> stages;
    double input_power_w = 0.0;   // 0 when unspecified
    std::string input_power_note;  // provenance, e.g. "back-solved", never dropped
    void validate() const;
    static EfficiencyChain load(const std::string& path);
    static EfficiencyChain from_json(const std::string& json_text);
};

// Product of stage transmissions; 1.0 for an empty chain.
double chain_efficiency(const EfficiencyChain& chain);

// floor(power / power_per_trap). Throws on non-positive power_per_trap.
long trap_count(double power_at_atoms_w, double power_per_trap_w);

// Per-stage and cumulative transmission table; includes delivered power when
// input power is known.
std::string budget_table(const EfficiencyChain& chain, double input_power_w);

}  // namespace raster::budget
