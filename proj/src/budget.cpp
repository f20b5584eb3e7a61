#include "raster/budget.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace raster::budget {

void EfficiencyChain::validate() const {
    for (const auto& stage : stages)
        if (!(stage.transmission >= 0.0 && stage.transmission <= 1.0))
            throw std::invalid_argument("chain '" + name + "': transmission of '" +
                                        stage.name + "' must lie in [0, 1]");
    if (input_power_w < 0)
        throw std::invalid_argument("chain '" + name + "': negative input power");
}

EfficiencyChain EfficiencyChain::from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    EfficiencyChain chain;
    chain.name = j.value("name", "");
    for (const auto& js : j.at("stages"))
        chain.stages.push_back(
            {js.at("name").get<std::string>(), js.at("transmission").get<double>()});
    chain.input_power_w = j.value("input_power_w", 0.0);
    chain.input_power_note = j.value("input_power_note", "");
    chain.validate();
    return chain;
}

EfficiencyChain EfficiencyChain::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

double chain_efficiency(const EfficiencyChain& chain) {
    double eff = 1.0;
    for (const auto& stage : chain.stages) eff *= stage.transmission;
    return eff;
}

long trap_count(double power_at_atoms_w, double power_per_trap_w) {
    if (power_per_trap_w <= 0)
        throw std::invalid_argument("trap_count: power per trap must be positive");
    if (power_at_atoms_w < 0)
        throw std::invalid_argument("trap_count: negative power");
    return static_cast<long>(std::floor(power_at_atoms_w / power_per_trap_w));
}

std::string budget_table(const EfficiencyChain& chain, double input_power_w) {
    chain.validate();
    const double power = input_power_w > 0 ? input_power_w : chain.input_power_w;
    std::ostringstream out;
    out << "chain: " << (chain.name.empty() ? "(unnamed)" : chain.name) << "\n";
    if (power > 0) {
        out << "input power: " << power * 1e3 << " mW";
        if (!chain.input_power_note.empty()) out << " [" << chain.input_power_note << "]";
        out << "\n";
    }
    char line[160];
    std::snprintf(line, sizeof(line), "%-24s %12s %12s\n", "stage", "transmission",
                  "cumulative");
    out << line;
    double cumulative = 1.0;
    for (const auto& stage : chain.stages) {
        cumulative *= stage.transmission;
        std::snprintf(line, sizeof(line), "%-24s %12.4f %12.6f\n", stage.name.c_str(),
                      stage.transmission, cumulative);
        out << line;
    }
    std::snprintf(line, sizeof(line), "total efficiency: %.6f\n", cumulative);
    out << line;
    if (power > 0) {
        std::snprintf(line, sizeof(line), "delivered power: %.3f mW\n",
                      power * cumulative * 1e3);
        out << line;
    }
    return out.str();
}

}  // namespace raster::budget
