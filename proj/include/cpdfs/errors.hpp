#pragma once

#include <stdexcept>
#include <string>

namespace cpdfs {

// An exact computation whose enumeration size exceeds the configured cap.
class capacity_error : public std::runtime_error {
  public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// NaN/Inf or other numerical breakdown inside an iterative algorithm.
class numeric_error : public std::runtime_error {
  public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cpdfs
