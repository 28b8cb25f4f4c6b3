#pragma once

#include "dcw/config.hpp"

#include <iosfwd>
#include <string>

namespace dcw {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;
inline constexpr int kExitNoConvergence = 4;

/// Dispatches the configured engine, writes its CSVs, the manifest and a
/// gnuplot script into out_dir, and maps failures to the documented exit
/// codes. Partial outputs of a failed run are kept next to a FAILED marker.
int run(const RunConfig& config, std::ostream& log);

/// Suffix identifying a parameter tuple in file names (deterministic,
/// seed-free), e.g. "alpha3_beta1_sigma0.1".
std::string param_tag(const ModelParams& params);

} // namespace dcw
