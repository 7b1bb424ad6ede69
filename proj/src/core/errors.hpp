#pragma once

#include <stdexcept>
#include <string>

namespace ptelm {

// Every failure the library can raise, grouped into the categories the
// CLI maps to exit codes (config=2, data=3, numeric=4).
enum class ErrorKind {
    invalid_argument,
    dimension_mismatch,
    invalid_range,
    invalid_dimension,
    not_positive_definite,
    non_finite,
    label_out_of_range,
    parse_error,
    ragged_rows,
    empty_file,
    insufficient_class_samples,
    empty_domain,
    class_mismatch,
    invalid_config,
    io_error,
};

enum class ErrorCategory {
    invalid,  // API misuse (null handle, bad shapes)
    config,
    data,
    numeric,
};

constexpr ErrorCategory category_of(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_config:
        return ErrorCategory::config;
    case ErrorKind::label_out_of_range:
    case ErrorKind::parse_error:
    case ErrorKind::ragged_rows:
    case ErrorKind::empty_file:
    case ErrorKind::insufficient_class_samples:
    case ErrorKind::empty_domain:
    case ErrorKind::class_mismatch:
    case ErrorKind::io_error:
        return ErrorCategory::data;
    case ErrorKind::not_positive_definite:
    case ErrorKind::non_finite:
        return ErrorCategory::numeric;
    default:
        return ErrorCategory::invalid;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }
    ErrorCategory category() const { return category_of(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace ptelm
