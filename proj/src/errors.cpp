#include "polariton/errors.hpp"

#include <sstream>

namespace polariton {

namespace {
std::string format(const char* head, double a, const char* mid, double b) {
    std::ostringstream os;
    os.precision(6);
    os << head << a << mid << b;
    return os.str();
}
std::string hint(double dt) {
    std::ostringstream os;
    os.precision(6);
    os << "; retry with dt <= " << dt;
    return os.str();
}
}  // namespace

PoleError::PoleError(double xi, double guard)
    : DomainError(format("pole: |xi| = ", xi < 0 ? -xi : xi, " is inside the guard band 1 - ", guard)), xi_(xi) {}

NearResonanceError::NearResonanceError(std::string denominator, double value, double band)
    : DomainError(format(("near resonance: denominator " + denominator + " = ").c_str(), value,
                         " is within the guard band ", band)),
      denominator_(std::move(denominator)),
      value_(value) {}

StiffnessError::StiffnessError(double t, double xi, double theta)
    : DomainError(format("step size underflow at t = ", t, ", last good xi = ", xi)), t_(t), xi_(xi), theta_(theta) {}

NormDriftError::NormDriftError(double drift, double budget, double dt_hint)
    : DomainError(format("norm drift ", drift, " exceeds budget ", budget) + hint(dt_hint)),
      dt_hint_(dt_hint) {}

}  // namespace polariton
