#pragma once

#include <stdexcept>
#include <string>

namespace usplit {

/// Scenario or command-line configuration is malformed.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Estimation could not proceed (e.g. the pilot run went extinct).
class EstimationError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace usplit
