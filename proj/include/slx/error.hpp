#pragma once

#include <stdexcept>
#include <string>

namespace slx {

// Error categories used across the library. Kept coarse on purpose: callers
// branch on the category, the message carries the specifics.
enum class Errc {
  invalid_argument = 1,  // precondition violated by the caller
  numeric_failure,       // an algorithm lost accuracy beyond its contract
  no_convergence,        // iteration budget exhausted
  chart_miss,            // point outside the coordinate chart's domain
  near_singular_stratum, // decomposition undefined at this point (eigenvalue collision)
  degenerate_flag,       // Cartan gap too small to define a flag
  not_discrete,          // ping-pong certificate could not be built/verified
  bad_config,            // malformed experiment configuration
  io_failure,            // filesystem problem
  budget_exhausted,      // deterministic work budget ran out mid-computation
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc c, const std::string& what) : std::runtime_error(what), code(c) {}
  Errc code;
};

[[noreturn]] void fail(Errc c, const std::string& msg);

} // namespace slx

#define SLX_REQUIRE(cond, code, msg)                                           \
  do {                                                                         \
    if (!(cond)) ::slx::fail(code, msg);                                       \
  } while (0)
