#pragma once

#include <stdexcept>
#include <string>

namespace adiff {

/// A vertex label whose entries do not fit the tree degree.
class InvalidLabel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Protocol parameters queried outside their domain (odd t, h > t/2, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A table-backed protocol or hop distribution asked past its horizon.
class HorizonError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Estimator inputs that violate the estimator's stated assumptions.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exhaustive enumeration would exceed its outcome cap.
class BudgetExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace adiff
