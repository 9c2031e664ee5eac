#pragma once

#include <stdexcept>
#include <string>

namespace tvbarc {

/// Malformed or inconsistent input data (bad CSV, date gaps, unreadable files).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical breakdown (non-finite posterior, failed initialization).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tvbarc
