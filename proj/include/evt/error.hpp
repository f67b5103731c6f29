#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evt {

enum class Errc {
  invalid_parameter,
  domain,
  out_of_range,
  diverged_integral,
  wrong_branch,
  capability,
  invalid_representation,
  no_exceedance,
  insufficient_data,
  degenerate_sample,
  non_convergence,
  below_threshold,
  invalid_input,
  schema,
  config,
  io,
};

std::string_view to_string(Errc code) noexcept;

// Every library failure is reported through this type; `code()` lets callers
// (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace evt
