#pragma once

#include <stdexcept>
#include <string>

namespace qbreak {

/// Invalid parameters or arguments outside an operation's domain.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A requested computation exceeds the configured memory/size budget.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Time propagation could not reach the target time within tolerance.
class PropagationError : public std::runtime_error {
public:
    PropagationError(const std::string& msg, double time_reached)
        : std::runtime_error(msg), time_reached_(time_reached) {}
    double time_reached() const { return time_reached_; }

private:
    double time_reached_;
};

} // namespace qbreak
