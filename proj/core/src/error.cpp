#include "smld/error.hpp"

namespace smld {

std::string_view code_name(Errc code) noexcept {
  switch (code) {
    case Errc::domain: return "special_fn.domain";
    case Errc::series_nonconvergence: return "special_fn.series_nonconvergence";
    case Errc::invalid_policy: return "special_fn.invalid_policy";
    case Errc::n_not_above_beta: return "operator_core.n_not_above_beta";
    case Errc::alpha_not_above_minus_one: return "operator_core.alpha_not_above_minus_one";
    case Errc::n_not_above_beta_plus_growth: return "operator_core.n_not_above_beta_plus_growth";
    case Errc::invalid_function: return "operator_core.invalid_function";
    case Errc::quadrature_nonconvergence: return "operator_core.quadrature_nonconvergence";
    case Errc::k_max_exceeded: return "operator_core.k_max_exceeded";
    case Errc::unsupported_order: return "moments.unsupported_order";
    case Errc::eigen_precondition: return "spectral.precondition";
    case Errc::unbounded_coefficients: return "spectral.unbounded_coefficients";
    case Errc::analysis_precondition: return "analysis_lab.precondition";
    case Errc::degenerate_data: return "analysis_lab.degenerate_data";
    case Errc::usage: return "cli_reporting.usage";
    case Errc::io: return "cli_reporting.io";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(code_name(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace smld
