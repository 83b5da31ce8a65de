#pragma once

#include <stdexcept>
#include <string>

namespace refugia {

enum class Errc {
  refuge_touches_boundary,
  disconnected_complement,
  region_mismatch,
  empty_refuge,
  nonelliptic_coefficient,
  solve_failure,
  no_convergence,
  out_of_regime,
  no_sign_change,
  degenerate_denominator,
  max_iterations,
  bad_parameter,
  correction_failed,
  stall_at_fold,
  blowup_detected,
  nonfinite_state,
  solution_not_found,
  parse_error,
  validation_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace refugia
