#ifndef MMA_JSON_IO_HPP
#define MMA_JSON_IO_HPP

#include "mma/kernels.hpp"
#include "mma/machine.hpp"
#include "mma/trace.hpp"

#include <json.hpp>

#include <string>

namespace mma {

using Json = nlohmann::ordered_json;

Json stats_to_json(const StatCounters& s);
Json machine_to_json(const MachineState& m);
Json accview_to_json(const AccView& v);
Json report_to_json(const RunReport& r);
Json lint_to_json(const std::vector<LintDiag>& diags);

Json matrix_to_json(const MatrixF64& m);
Json matrix_to_json(const MatrixF32& m);
MatrixF64 matrix_f64_from_json(const Json& j);
MatrixF32 matrix_f32_from_json(const Json& j);

// Load a matrix from either a binary .mmat container or a JSON literal file
// holding an array of row arrays.
MatrixF64 load_matrix_f64(const std::string& path);
MatrixF32 load_matrix_f32(const std::string& path);

// Convolution problem descriptor: a JSON object with keys "h", "r", "g",
// "b" (each an inline matrix literal or a path string to a .mmat/.json
// file), optional "row" (default 0) and optional "n" (default: plane width).
ConvProblem load_conv_problem(const std::string& path);

} // namespace mma

#endif
