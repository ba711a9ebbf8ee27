#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smld {

// One code per violated constraint. code_name() gives the module-qualified
// spelling the CLI prints, e.g. "operator_core.n_not_above_beta".
enum class Errc {
  domain,
  series_nonconvergence,
  invalid_policy,
  n_not_above_beta,
  alpha_not_above_minus_one,
  n_not_above_beta_plus_growth,
  invalid_function,
  quadrature_nonconvergence,
  k_max_exceeded,
  unsupported_order,
  eigen_precondition,
  unbounded_coefficients,
  analysis_precondition,
  degenerate_data,
  usage,
  io,
};

std::string_view code_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace smld
