#pragma once

#include <stdexcept>
#include <string>

namespace dualplan {

enum class Errc {
  UnknownObject,
  ArmNotEligible,
  NotReady,
  PairingAmbiguous,
  FixtureInvalid,
  ProviderTransport,
  InvalidConfig,
  Io,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::UnknownObject: return "UNKNOWN_OBJECT";
    case Errc::ArmNotEligible: return "ARM_NOT_ELIGIBLE";
    case Errc::NotReady: return "NOT_READY";
    case Errc::PairingAmbiguous: return "PAIRING_AMBIGUOUS";
    case Errc::FixtureInvalid: return "FIXTURE_INVALID";
    case Errc::ProviderTransport: return "PROVIDER_TRANSPORT";
    case Errc::InvalidConfig: return "INVALID_CONFIG";
    case Errc::Io: return "IO";
  }
  return "UNKNOWN";
}

/// Exception carrying a stable error code. Planning outcomes (deadlock,
/// infeasible geometry, rejected candidates) are never reported this way;
/// they travel through result types.
class PlanError : public std::runtime_error {
 public:
  PlanError(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dualplan
