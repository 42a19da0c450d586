#pragma once

#include <ostream>
#include <string>

namespace lpp::suites {

// Built-in verification suites behind `lpp verify`.
//   oracle: DP last-passage vs exhaustive enumeration on random small grids
//   solver: shape evaluators vs closed forms and residual contracts
//   rng:    empirical i.i.d. checks of the counter-based uniforms
// Returns true when every check passes; prints one line per check.
bool run_oracle_suite(int trials, std::ostream& os);
bool run_solver_suite(std::ostream& os);
bool run_rng_suite(std::ostream& os);
bool run_suite(const std::string& name, int trials, std::ostream& os);

}  // namespace lpp::suites
