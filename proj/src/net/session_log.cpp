#include "pptfe/net/session_log.hpp"

namespace pptfe::net {

const char* to_string(SessionOutcome outcome) noexcept {
  switch (outcome) {
    case SessionOutcome::kIssued: return "issued";
    case SessionOutcome::kMalformed: return "aborted(malformed)";
    case SessionOutcome::kProofRejected: return "aborted(proof)";
    case SessionOutcome::kInternal: return "aborted(internal)";
    case SessionOutcome::kTransport: return "aborted(transport)";
  }
  return "unknown";
}

}  // namespace pptfe::net
