#pragma once

#include <stdexcept>
#include <string>

namespace evp {

// Every failure the toolkit can signal. CLI maps these onto exit codes.
enum class errc {
    // curve
    non_monotone_epsilon,
    accuracy_out_of_range,
    missing_clean_point,
    too_few_points,
    out_of_domain,
    // metrics
    empty_interval,
    no_sample_in_interval,
    threshold_exceeds_one,
    bound_exceeds_curve,
    budget_not_sampled,
    // sampling
    invalid_delta,
    budget_too_small,
    step_size_violation,
    // attacklab
    invalid_spec,
    diverged_loss,
    // generic
    invalid_argument,
    io_error,
    parse_error,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace evp
