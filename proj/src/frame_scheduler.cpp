#include "sbs/frame_scheduler.hpp"

#include <cmath>
#include <sstream>

namespace sbs {

FrameConfig FrameConfig::from_ms(double downlink_ms, double guard_ms, double uplink_ms) {
  auto to_ns = [](double ms) { return static_cast<std::int64_t>(std::llround(ms * 1e6)); };
  FrameConfig cfg{to_ns(downlink_ms), to_ns(guard_ms), to_ns(uplink_ms)};
  cfg.validate();
  return cfg;
}

void FrameConfig::validate() const {
  if (downlink_ns < 0 || guard_ns < 0 || uplink_ns < 0) throw DomainError("interval durations must be >= 0");
  if (downlink_ns + guard_ns + uplink_ns != kHalfFrameNs) {
    std::ostringstream os;
    os << "DI + GI + UI = " << (downlink_ns + guard_ns + uplink_ns) << " ns, must equal the 5 ms half frame";
    throw DomainError(os.str());
  }
}

bool FrameConfig::guard_covers_echo(double range_m) const {
  return static_cast<double>(guard_ns) * 1e-9 >= 2.0 * range_m / kSpeedOfLight;
}

const char* to_string(IntervalKind kind) {
  switch (kind) {
    case IntervalKind::kDownlink: return "DI";
    case IntervalKind::kGuard: return "GI";
    case IntervalKind::kUplink: return "UI";
  }
  return "?";
}

const char* to_string(SubarrayRole role) {
  switch (role) {
    case SubarrayRole::kTransmitDownlinkIsac: return "transmit_downlink_isac";
    case SubarrayRole::kReceiveEcho: return "receive_echo";
    case SubarrayRole::kIdle: return "idle";
    case SubarrayRole::kReceiveUplink: return "receive_uplink";
  }
  return "?";
}

void interval_roles(IntervalKind kind, SubarrayRole& sbsa1, SubarrayRole& sbsa2) {
  switch (kind) {
    case IntervalKind::kDownlink:
      sbsa1 = SubarrayRole::kTransmitDownlinkIsac;
      sbsa2 = SubarrayRole::kReceiveEcho;
      return;
    case IntervalKind::kGuard:
      sbsa1 = SubarrayRole::kIdle;
      sbsa2 = SubarrayRole::kReceiveEcho;
      return;
    case IntervalKind::kUplink:
      sbsa1 = SubarrayRole::kReceiveUplink;
      sbsa2 = SubarrayRole::kReceiveUplink;
      return;
  }
}

std::vector<FrameInterval> build_frame(const FrameConfig& cfg, std::int64_t frame_index) {
  cfg.validate();
  if (frame_index < 0) throw DomainError("frame index must be >= 0");
  std::vector<FrameInterval> out;
  out.reserve(6);
  const std::int64_t durations[3] = {cfg.downlink_ns, cfg.guard_ns, cfg.uplink_ns};
  const IntervalKind kinds[3] = {IntervalKind::kDownlink, IntervalKind::kGuard, IntervalKind::kUplink};
  for (int half = 0; half < 2; ++half) {
    std::int64_t t = frame_index * kFrameNs + half * kHalfFrameNs;
    for (int i = 0; i < 3; ++i) {
      FrameInterval iv;
      iv.half_frame = half;
      iv.kind = kinds[i];
      iv.start_ns = t;
      iv.end_ns = t + durations[i];
      interval_roles(iv.kind, iv.sbsa1, iv.sbsa2);
      out.push_back(iv);
      t = iv.end_ns;
    }
  }
  return out;
}

FrameInterval interval_at(const FrameConfig& cfg, std::int64_t t_ns) {
  if (t_ns < 0) throw DomainError("time must be >= 0");
  for (const FrameInterval& iv : build_frame(cfg, t_ns / kFrameNs)) {
    if (t_ns >= iv.start_ns && t_ns < iv.end_ns) return iv;
  }
  throw DomainError("time not covered by the frame");  // unreachable for a valid config
}

ResourceGrid::ResourceGrid(int dcb_count, int subframes, int blocks)
    : beams_(dcb_count + 1), subframes_(subframes), blocks_(blocks) {
  if (dcb_count < 0 || subframes < 1 || blocks < 1) {
    throw DomainError("resource grid needs >= 0 DCBs and positive subframe and block counts");
  }
  cells_.resize(static_cast<std::size_t>(beams_) * subframes_ * blocks_);
}

std::size_t ResourceGrid::index(int beam, int subframe, int block) const {
  if (beam < 0 || beam >= beams_ || subframe < 0 || subframe >= subframes_ || block < 0 || block >= blocks_) {
    throw DomainError("resource cell outside the grid");
  }
  return (static_cast<std::size_t>(beam) * subframes_ + subframe) * blocks_ + block;
}

const std::vector<int>& ResourceGrid::occupants(int beam, int subframe, int block) const {
  return cells_[index(beam, subframe, block)];
}

void ResourceGrid::place(int beam, int subframe, int block, int user) {
  cells_[index(beam, subframe, block)].push_back(user);
}

std::vector<Assignment> ResourceGrid::assignments() const {
  std::vector<Assignment> out;
  for (int b = 0; b < beams_; ++b) {
    for (int s = 0; s < subframes_; ++s) {
      for (int k = 0; k < blocks_; ++k) {
        for (int user : occupants(b, s, k)) out.push_back({user, b, s, k});
      }
    }
  }
  return out;
}

AllocationReport allocate(ResourceGrid& grid, std::span<const UserRequest> requests) {
  for (const UserRequest& r : requests) {
    if (r.beam_id == kFdbBeamId) throw DomainError("user requests must name a DCB, not the FDB");
    if (r.beam_id < 1 || r.beam_id > grid.dcb_count()) {
      std::ostringstream os;
      os << "user " << r.user_id << " names beam " << r.beam_id << " but the grid has " << grid.dcb_count()
         << " DCBs";
      throw DomainError(os.str());
    }
    if (r.demand < 1) throw DomainError("user demand must be >= 1");
  }

  AllocationReport report;
  for (const UserRequest& r : requests) {
    int granted = 0;
    for (int s = 0; s < grid.subframes() && granted < r.demand; ++s) {
      for (int k = 0; k < grid.blocks() && granted < r.demand; ++k) {
        if (!grid.is_free(r.beam_id, s, k)) continue;
        grid.place(r.beam_id, s, k, r.user_id);
        report.granted.push_back({r.user_id, r.beam_id, s, k});
        ++granted;
      }
    }
    if (granted < r.demand) report.unmet.push_back({r.user_id, r.beam_id, r.demand, granted});
  }
  return report;
}

std::string Violation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kDoubleBooking:
      os << "double booking at beam " << beam << " subframe " << subframe << " block " << block << ": users";
      for (int u : users) os << ' ' << u;
      break;
    case Kind::kUserOnFdb:
      os << "user " << users.front() << " placed on the FDB at subframe " << subframe << " block " << block;
      break;
    case Kind::kFdbDcbCollision:
      os << "FDB dwell at (" << direction.phi_deg << ", " << direction.theta_deg << ") deg points at a DCB";
      break;
  }
  return os.str();
}

InterferenceReport check_interference_free(const ResourceGrid& grid, std::span<const ScanCell> scan,
                                           std::span<const Direction> dcb_dirs, const BeamWidths& widths) {
  InterferenceReport report;
  for (int b = 0; b < grid.beam_count(); ++b) {
    for (int s = 0; s < grid.subframes(); ++s) {
      for (int k = 0; k < grid.blocks(); ++k) {
        const auto& users = grid.occupants(b, s, k);
        if (users.size() > 1) {
          report.violations.push_back({Violation::Kind::kDoubleBooking, b, s, k, users, {}});
        }
        if (b == kFdbBeamId && !users.empty()) {
          report.violations.push_back({Violation::Kind::kUserOnFdb, b, s, k, {users.front()}, {}});
        }
      }
    }
  }
  for (const ScanCell& cell : scan) {
    if (cell.dcb_blocked) continue;  // the scan skipped this dwell
    const Direction dir{wrap_azimuth_deg(cell.phi_deg), cell.theta_deg};
    if (dcb_occupies(dir, dcb_dirs, widths)) {
      report.violations.push_back({Violation::Kind::kFdbDcbCollision, kFdbBeamId, 0, 0, {}, dir});
    }
  }
  report.ok = report.violations.empty();
  return report;
}

}  // namespace sbs
