#include "evt/error.hpp"

namespace evt {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::domain: return "domain";
    case Errc::out_of_range: return "out-of-range";
    case Errc::diverged_integral: return "diverged-integral";
    case Errc::wrong_branch: return "wrong-branch";
    case Errc::capability: return "capability";
    case Errc::invalid_representation: return "invalid-representation";
    case Errc::no_exceedance: return "no-exceedance";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::degenerate_sample: return "degenerate-sample";
    case Errc::non_convergence: return "non-convergence";
    case Errc::below_threshold: return "below-threshold";
    case Errc::invalid_input: return "invalid-input";
    case Errc::schema: return "schema";
    case Errc::config: return "config";
    case Errc::io: return "io";
  }
  return "unknown";
}

}  // namespace evt
