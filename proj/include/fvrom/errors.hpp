/// @file errors.hpp
/// Exception taxonomy: usage_error for bad input/configuration (CLI exit
/// code 1), numerical_error for solver/algorithm failures (CLI exit code 2).
#pragma once

#include <stdexcept>
#include <string>

namespace fvrom {

struct usage_error : std::runtime_error {
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fvrom
