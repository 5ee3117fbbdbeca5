#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pptfe {

// Error families double as CLI exit codes.
enum class ErrorFamily : int {
  kUsage = 1,
  kFormat = 2,
  kVerification = 3,
  kProtocol = 4,
  kRange = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorFamily family, const std::string& what)
      : std::runtime_error(what), family_(family) {}
  ErrorFamily family() const noexcept { return family_; }

 private:
  ErrorFamily family_;
};

// Vector length does not match the public parameters, or l = 0.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorFamily::kUsage, what) {}
};

// Identity outside [1, p-1].
class IdentityDomainError : public Error {
 public:
  explicit IdentityDomainError(const std::string& what) : Error(ErrorFamily::kUsage, what) {}
};

// Non-canonical or truncated byte string.
class DecodeError : public Error {
 public:
  explicit DecodeError(const std::string& what) : Error(ErrorFamily::kFormat, what) {}
};

// KGC refuses to issue because the user's proof did not verify.
class ProtocolAbort : public Error {
 public:
  explicit ProtocolAbort(const std::string& what) : Error(ErrorFamily::kProtocol, what) {}
};

enum class IssuanceStage : std::uint8_t {
  kKgcProof = 1,      // Sigma_K rejected
  kPairingCheck = 2,  // e(B3, .) / e(B4, .) checks
  kKeyCheck = 3,      // assembled key fails verify_key
};

const char* to_string(IssuanceStage stage) noexcept;

// User-side finalization failure; no key is produced.
class IssuanceError : public Error {
 public:
  IssuanceError(IssuanceStage stage, const std::string& what)
      : Error(ErrorFamily::kVerification, what), stage_(stage) {}
  IssuanceStage stage() const noexcept { return stage_; }

 private:
  IssuanceStage stage_;
};

}  // namespace pptfe
