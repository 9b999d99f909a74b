#include "common/error.hpp"

namespace pulse {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::io_error: return "io_error";
    case Errc::malformed_record: return "malformed_record";
    case Errc::source_unreadable: return "source_unreadable";
    case Errc::unknown_label: return "unknown_label";
    case Errc::duplicate_publisher: return "duplicate_publisher";
    case Errc::empty_input: return "empty_input";
    case Errc::wrong_kind: return "wrong_kind";
    case Errc::non_finite: return "non_finite";
    case Errc::missing_weekday: return "missing_weekday";
    case Errc::unknown_category: return "unknown_category";
    case Errc::duplicate_date: return "duplicate_date";
    case Errc::missing_population: return "missing_population";
    case Errc::percent_out_of_range: return "percent_out_of_range";
    case Errc::share_group_mismatch: return "share_group_mismatch";
    case Errc::negative_share: return "negative_share";
    case Errc::wrong_granularity: return "wrong_granularity";
    case Errc::zero_total: return "zero_total";
    case Errc::length_mismatch: return "length_mismatch";
    case Errc::zero_variance: return "zero_variance";
    case Errc::empty_corpus: return "empty_corpus";
    case Errc::duplicate_key_in_batch: return "duplicate_key_in_batch";
    case Errc::storage_full: return "storage_full";
    case Errc::key_too_long: return "key_too_long";
    case Errc::corrupt_store: return "corrupt_store";
    case Errc::bind_failure: return "bind_failure";
    case Errc::not_found: return "not_found";
    case Errc::simulated_crash: return "simulated_crash";
  }
  return "unknown";
}

}  // namespace pulse
