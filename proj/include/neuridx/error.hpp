#pragma once

#include <stdexcept>
#include <string>

namespace neuridx {

enum class Errc {
  missing_root,
  empty_corpus,
  decode_error,
  unknown_token,
  io_error,
  format_error,
  invalid_config,
  dimension_mismatch,
  non_finite_loss,
  training_diverged,
  keyword_out_of_range,
  empty_samples,
  unassigned_labels,
  empty_query,
  invalid_params,
};

/// Library-wide exception; carries the error class so callers can map it
/// to exit codes or recover selectively.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace neuridx
