#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbs/array_geometry.hpp"
#include "sbs/scanning.hpp"

namespace sbs {

inline constexpr std::int64_t kHalfFrameNs = 5'000'000;
inline constexpr std::int64_t kFrameNs = 2 * kHalfFrameNs;

/// Durations of the downlink, guard and uplink intervals of a 5 ms half
/// frame, in integer nanoseconds.
struct FrameConfig {
  std::int64_t downlink_ns = 3'500'000;
  std::int64_t guard_ns = 500'000;
  std::int64_t uplink_ns = 1'000'000;

  /// Rounds each millisecond duration to the nearest nanosecond.
  static FrameConfig from_ms(double downlink_ms, double guard_ms, double uplink_ms);

  /// Throws DomainError unless all durations are >= 0 and sum to 5 ms.
  void validate() const;

  /// Guard covers the round trip of an echo from `range_m`.
  bool guard_covers_echo(double range_m) const;
};

enum class IntervalKind { kDownlink, kGuard, kUplink };
enum class SubarrayRole { kTransmitDownlinkIsac, kReceiveEcho, kIdle, kReceiveUplink };

const char* to_string(IntervalKind kind);
const char* to_string(SubarrayRole role);

struct FrameInterval {
  int half_frame = 0;  // 0 or 1 within the 10 ms frame
  IntervalKind kind = IntervalKind::kDownlink;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  SubarrayRole sbsa1 = SubarrayRole::kIdle;
  SubarrayRole sbsa2 = SubarrayRole::kIdle;
};

/// Roles of the two subarrays in each interval:
///   DI: SBSA-1 transmits downlink ISAC, SBSA-2 receives echo
///   GI: SBSA-1 idle,                    SBSA-2 receives echo
///   UI: both receive uplink
void interval_roles(IntervalKind kind, SubarrayRole& sbsa1, SubarrayRole& sbsa2);

/// The six intervals of frame `frame_index` (two half frames x DI/GI/UI),
/// with absolute start/end times. Zero-length intervals are kept.
std::vector<FrameInterval> build_frame(const FrameConfig& cfg, std::int64_t frame_index = 0);

/// Interval active at absolute time t_ns >= 0 (zero-length intervals are skipped).
FrameInterval interval_at(const FrameConfig& cfg, std::int64_t t_ns);

inline constexpr int kFdbBeamId = 0;

struct Assignment {
  int user_id = 0;
  int beam_id = 0;
  int subframe = 0;
  int block = 0;
};

/// Beam x subframe x subcarrier-block occupancy map. Beam 0 is the FDB,
/// beams 1..dcb_count are DCBs. A cell may record more than one occupant so
/// that conflicting schedules can be represented and then rejected by
/// check_interference_free; allocate() never creates one.
class ResourceGrid {
 public:
  ResourceGrid(int dcb_count, int subframes, int blocks);

  int beam_count() const { return beams_; }
  int dcb_count() const { return beams_ - 1; }
  int subframes() const { return subframes_; }
  int blocks() const { return blocks_; }

  const std::vector<int>& occupants(int beam, int subframe, int block) const;
  bool is_free(int beam, int subframe, int block) const { return occupants(beam, subframe, block).empty(); }

  /// Records `user` in the cell without any conflict check.
  void place(int beam, int subframe, int block, int user);

  /// Every recorded (user, cell) pair in beam-major, subframe, block order.
  std::vector<Assignment> assignments() const;

 private:
  std::size_t index(int beam, int subframe, int block) const;

  int beams_;
  int subframes_;
  int blocks_;
  std::vector<std::vector<int>> cells_;
};

struct UserRequest {
  int user_id = 0;
  int beam_id = 1;
  int demand = 1;  // block-subframes
};

struct Shortfall {
  int user_id = 0;
  int beam_id = 0;
  int demanded = 0;
  int granted = 0;
};

struct AllocationReport {
  std::vector<Assignment> granted;
  std::vector<Shortfall> unmet;
  bool complete() const { return unmet.empty(); }
};

/// Greedy first-fit: each request, in order, takes the free cells of its own
/// DCB in subframe-major then block order. Users in different DCBs may reuse
/// the same (subframe, block). Throws DomainError for a request that names
/// the FDB or a beam outside the grid, or has demand < 1.
AllocationReport allocate(ResourceGrid& grid, std::span<const UserRequest> requests);

struct Violation {
  enum class Kind { kDoubleBooking, kUserOnFdb, kFdbDcbCollision };
  Kind kind = Kind::kDoubleBooking;
  int beam = 0;
  int subframe = 0;
  int block = 0;
  std::vector<int> users;
  Direction direction;  // FDB dwell direction for collisions
  std::string describe() const;
};

struct InterferenceReport {
  bool ok = true;
  std::vector<Violation> violations;
};

/// Checks that no cell is shared, that the FDB beam carries no users, and that
/// no counted FDB dwell points at a DCB (same half-beamwidth test as the scan).
InterferenceReport check_interference_free(const ResourceGrid& grid, std::span<const ScanCell> scan,
                                           std::span<const Direction> dcb_dirs, const BeamWidths& widths);

}  // namespace sbs
