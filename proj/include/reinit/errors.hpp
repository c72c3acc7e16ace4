#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace reinit {

// Invalid user input: bad config values, ill-posed problem setups,
// out-of-range requests. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::string message,
                         std::map<std::string, std::string> detail = {})
        : std::runtime_error(std::move(message)), detail_(std::move(detail)) {}

    const std::map<std::string, std::string>& detail() const { return detail_; }

private:
    std::map<std::string, std::string> detail_;
};

// Runtime numerical failure: NaN/Inf states, non-convergent iterations.
// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(std::string message,
                            std::map<std::string, std::string> detail = {})
        : std::runtime_error(std::move(message)), detail_(std::move(detail)) {}

    const std::map<std::string, std::string>& detail() const { return detail_; }

private:
    std::map<std::string, std::string> detail_;
};

}  // namespace reinit
