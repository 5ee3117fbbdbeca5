#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <vector>

namespace pptfe::net {

enum class SessionOutcome : std::uint8_t {
  kIssued,
  kMalformed,      // undecodable frame or payload
  kProofRejected,  // user proof failed
  kInternal,
  kTransport,      // peer vanished or timed out
};

const char* to_string(SessionOutcome outcome) noexcept;

// Deliberately holds no request data: there is no field that could carry an
// identity or any message payload.
struct SessionRecord {
  std::uint64_t id = 0;
  std::chrono::system_clock::time_point started;
  std::chrono::system_clock::time_point finished;
  SessionOutcome outcome = SessionOutcome::kInternal;
};

class SessionLog {
 public:
  std::uint64_t next_id() {
    std::lock_guard lock(mu_);
    return ++last_id_;
  }
  void append(const SessionRecord& rec) {
    std::lock_guard lock(mu_);
    records_.push_back(rec);
  }
  std::vector<SessionRecord> snapshot() const {
    std::lock_guard lock(mu_);
    return records_;
  }
  std::size_t count(SessionOutcome outcome) const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& r : records_) n += r.outcome == outcome;
    return n;
  }

 private:
  mutable std::mutex mu_;
  std::uint64_t last_id_ = 0;
  std::vector<SessionRecord> records_;
};

}  // namespace pptfe::net
