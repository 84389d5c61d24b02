#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace braess {

// Runs one CLI invocation. Subcommands: solve-opt, worst-nash, poa, classify,
// best-subnet, approx-best-subnet, sparsify, gen-gap, witness-flows, paths,
// cuts, export-dot. Writes a ResultDocument (JSON) plus an optional
// Markdown/CSV table to `out`. Exit status: 0 success, 2 usage/domain/parse,
// 3 capacity, 4 infeasibility/unsupported-model/structure.
int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace braess
