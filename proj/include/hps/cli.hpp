#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hps/numeric/certified.hpp"

namespace hps::cli {

using Json = nlohmann::ordered_json;

/// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kViolation = 1;
inline constexpr int kUsage = 2;

/// Entry point of the hpset tool. `args` excludes the program name.
/// Reports go to `out` (or --out FILE), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// {"rat": "p/q", "sqrt2": "r/s", "decimal": 30 significant digits}.
Json encode(const QSqrt2& x);
/// Exact encoding when available, otherwise {"lo": ..., "hi": ...} decimals.
Json encode(const CertifiedReal& x);
/// Inverse of encode(QSqrt2); throws std::invalid_argument.
QSqrt2 decode(const Json& j);

/// Re-check the invariants encoded in a report produced by run().
/// Returns the failed checks; `checks` receives the number performed.
std::vector<std::string> verify_report(const Json& report, std::size_t& checks);

}  // namespace hps::cli
