#pragma once

#include <iosfwd>
#include <string_view>

#include "xicorr/rankcorr.hpp"

namespace xicorr::cli {

inline constexpr std::string_view kVersion = "0.1.0";

/// Environment variable consulted for the default --seed.
inline constexpr const char* kSeedEnv = "XICORR_SEED";

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kTies = 3,
  kSimulationConfig = 4,
  kOracleMismatch = 5,
};

/// Comma-separated numeric table, one observation per row. A first row that
/// does not parse as numbers is treated as a header. Throws ParseError.
DataMatrix read_csv(std::istream& in);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xicorr::cli
