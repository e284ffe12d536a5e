#ifndef STEEP_ERRORS_HPP
#define STEEP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace steep {

// Bad caller input: dimensions, signs, non-PSD covariances, malformed configs.
struct InvalidArgument : std::invalid_argument {
  explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

// Valid input that this code path deliberately does not handle
// (e.g. n_A < n_B probing, where the caller should swap roles).
struct UnsupportedConfig : std::invalid_argument {
  explicit UnsupportedConfig(const std::string& msg) : std::invalid_argument(msg) {}
};

// Channel matrix rank-deficient where a full-rank factorization is required.
struct SingularChannel : std::runtime_error {
  explicit SingularChannel(const std::string& msg) : std::runtime_error(msg) {}
};

// A quantity whose defining condition does not hold for these inputs
// (classic strength ratio with singular H_BA^H H_BA, bounds outside their regime).
struct NotApplicable : std::runtime_error {
  explicit NotApplicable(const std::string& msg) : std::runtime_error(msg) {}
};

// Two algebraic routes that must agree disagreed beyond tolerance.
struct InternalCheckFailure : std::logic_error {
  explicit InternalCheckFailure(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace steep

#endif
