#pragma once

#include <stdexcept>
#include <string>

namespace polariton {

// Process exit codes used by the CLI. Every engine exception maps onto one.
enum class ExitCode : int { ok = 0, config = 2, numerical = 3, identifiability = 4 };

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ExitCode::numerical, what) {}
};

// Raised when |xi| reaches the guard band where d(theta)/dt blows up.
class PoleError : public DomainError {
public:
    PoleError(double xi, double guard);
    double xi() const noexcept { return xi_; }

private:
    double xi_;
};

class NearResonanceError : public DomainError {
public:
    NearResonanceError(std::string denominator, double value, double band);
    const std::string& denominator() const noexcept { return denominator_; }
    double value() const noexcept { return value_; }

private:
    std::string denominator_;
    double value_;
};

class AmbiguityError : public DomainError {
public:
    using DomainError::DomainError;
};

// Step-size underflow in the adaptive integrator. Carries the last accepted state.
class StiffnessError : public DomainError {
public:
    StiffnessError(double t, double xi, double theta);
    double t() const noexcept { return t_; }
    double xi() const noexcept { return xi_; }
    double theta() const noexcept { return theta_; }

private:
    double t_, xi_, theta_;
};

// Winding undefined because the pendulum vector passed through the origin.
class InconclusiveError : public DomainError {
public:
    using DomainError::DomainError;
};

class NormDriftError : public DomainError {
public:
    NormDriftError(double drift, double budget, double dt_hint);
    double dt_hint() const noexcept { return dt_hint_; }

private:
    double dt_hint_;
};

class IdentifiabilityError : public Error {
public:
    explicit IdentifiabilityError(const std::string& what) : Error(ExitCode::identifiability, what) {}
};

}  // namespace polariton
