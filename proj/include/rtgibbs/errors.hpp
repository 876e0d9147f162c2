#ifndef RTGIBBS_ERRORS_HPP
#define RTGIBBS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rtgibbs {

/// Invalid run settings: unknown prior, bad structure spec, missing plugin, ...
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad input data: ragged CSV, non-numeric cells, non-finite values, checksum mismatch.
struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: non-positive pivot, failed factorization, PD violation.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rtgibbs

#endif
