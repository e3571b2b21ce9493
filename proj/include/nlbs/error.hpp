// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace nlbs {

/// Invalid user input. `field()` names the offending configuration entry.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A numerical kernel could not produce a result (zero pivot, singular input, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double achieved)
        : NumericalError(what + " (achieved relative error " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}

    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Reading or writing an artifact failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nlbs
