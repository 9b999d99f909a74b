#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pulse {

// Fine-grained failure reasons. The C API folds these into coarser status
// codes but keeps the name available through pulse_last_error_code().
enum class Errc {
  invalid_argument,
  io_error,
  malformed_record,
  source_unreadable,
  unknown_label,
  duplicate_publisher,
  empty_input,
  wrong_kind,
  non_finite,
  missing_weekday,
  unknown_category,
  duplicate_date,
  missing_population,
  percent_out_of_range,
  share_group_mismatch,
  negative_share,
  wrong_granularity,
  zero_total,
  length_mismatch,
  zero_variance,
  empty_corpus,
  duplicate_key_in_batch,
  storage_full,
  key_too_long,
  corrupt_store,
  bind_failure,
  not_found,
  simulated_crash,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pulse
