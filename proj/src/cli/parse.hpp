#pragma once
// Typed accessors over a config that already passed validate_config.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlab/fixtures.hpp"
#include "nlab/grid.hpp"
#include "nlab/integrands.hpp"
#include "nlab/sobolev.hpp"

namespace nlab::cli::detail {

using json = nlohmann::json;

GridPtr grid_of(const json& c);
double p_of(const json& c);
std::uint64_t seed_of(const json& c);
FamilyParams family_params_of(const json& c);
PairIntegrand pair_integrand_of(const json& spec);
LocalIntegrand local_integrand_of(const json& spec);
SequenceKind kind_of(const std::string& s);
std::vector<int> k_list_of(const json& c);

}  // namespace nlab::cli::detail
