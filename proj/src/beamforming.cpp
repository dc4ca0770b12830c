#include "sbs/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sbs {

std::vector<Direction> BeamSpec::all_directions() const {
  std::vector<Direction> dirs;
  dirs.reserve(dcb_dirs.size() + 1);
  dirs.push_back(fdb_dir);
  dirs.insert(dirs.end(), dcb_dirs.begin(), dcb_dirs.end());
  return dirs;
}

void BeamSpec::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("regularization factor must be >= 0");
  const auto dirs = all_directions();
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (std::size_t j = i + 1; j < dirs.size(); ++j) {
      if (direction_distance_deg(dirs[i], dirs[j]) < 1e-9) {
        throw DomainError("beam directions must be distinct");
      }
    }
  }
}

DirectionGrid DirectionGrid::azimuth_cut(double theta_deg, double step_deg) {
  if (!(step_deg > 0.0)) throw DomainError("grid step must be positive");
  const auto count = static_cast<std::size_t>(std::llround(360.0 / step_deg));
  DirectionGrid grid;
  grid.step_deg = step_deg;
  grid.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid.points.push_back(Direction::normalized(-180.0 + static_cast<double>(i) * step_deg, theta_deg));
  }
  return grid;
}

DirectionGrid DirectionGrid::hemisphere(double step_deg) {
  if (!(step_deg > 0.0)) throw DomainError("grid step must be positive");
  const auto n_phi = static_cast<std::size_t>(std::llround(360.0 / step_deg));
  const auto n_theta = static_cast<std::size_t>(std::floor(90.0 / step_deg + 1e-9)) + 1;
  DirectionGrid grid;
  grid.step_deg = step_deg;
  grid.points.reserve(n_phi * n_theta);
  for (std::size_t t = 0; t < n_theta; ++t) {
    const double theta = std::min(90.0, static_cast<double>(t) * step_deg);
    for (std::size_t i = 0; i < n_phi; ++i) {
      grid.points.push_back(Direction::normalized(-180.0 + static_cast<double>(i) * step_deg, theta));
    }
  }
  return grid;
}

DirectionGrid DirectionGrid::cross(const Direction& center, double half_span_deg, double step_deg) {
  if (!(step_deg > 0.0) || !(half_span_deg > 0.0)) throw DomainError("grid step and span must be positive");
  const auto half = static_cast<long>(std::llround(half_span_deg / step_deg));
  DirectionGrid grid;
  grid.step_deg = step_deg;
  for (long i = -half; i <= half; ++i) {
    const double theta = center.theta_deg + static_cast<double>(i) * step_deg;
    if (theta < 0.0 || theta > 90.0) continue;
    grid.points.push_back(Direction::normalized(center.phi_deg, theta));
  }
  for (long i = -half; i <= half; ++i) {
    if (i == 0) continue;
    grid.points.push_back(
        Direction::normalized(center.phi_deg + static_cast<double>(i) * step_deg, center.theta_deg));
  }
  return grid;
}

CVector single_beam_weights(const ArrayConfig& cfg, const Direction& dir) {
  return steering_vector(cfg, dir) / static_cast<double>(cfg.element_count());
}

DesiredResponse desired_response(const BeamSpec& spec, const DirectionGrid& grid) {
  spec.validate();
  if (grid.points.empty()) throw DomainError("direction grid is empty");
  DesiredResponse out;
  out.grid = grid.points;
  out.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.points.size()));
  const double reach = grid.step_deg / 2.0 + 1e-9;
  for (const Direction& dir : spec.all_directions()) {
    std::size_t best = grid.points.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
      const double dist = direction_distance_deg(dir, grid.points[i]);
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    if (best_dist > reach) {
      std::ostringstream os;
      os << "beam direction (" << dir.phi_deg << ", " << dir.theta_deg
         << ") deg is not representable on the grid (nearest point " << best_dist << " deg away)";
      throw DomainError(os.str());
    }
    if (out.values(static_cast<Eigen::Index>(best)) != 0.0) {
      throw DomainError("two beam directions snap to the same grid point; refine the grid");
    }
    out.values(static_cast<Eigen::Index>(best)) = 1.0;
    out.hits.push_back(best);
  }
  return out;
}

CMatrix build_weight_matrix(const ArrayConfig& cfg, const BeamSpec& spec) {
  const auto dirs = spec.all_directions();
  CMatrix w(cfg.element_count(), static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    w.col(static_cast<Eigen::Index>(i)) = single_beam_weights(cfg, dirs[i]);
  }
  return w;
}

namespace {

void check_dims(const CMatrix& weights, const CMatrix& steering, const Eigen::VectorXd& target) {
  if (weights.rows() != steering.rows()) {
    throw DomainError("weight matrix and steering matrix element counts differ");
  }
  if (steering.cols() != target.size()) {
    throw DomainError("steering matrix and desired response lengths differ");
  }
  if (weights.cols() == 0) throw DomainError("weight matrix has no beams");
}

}  // namespace

double combiner_objective(const CMatrix& weights, const CMatrix& steering, const Eigen::VectorXd& target,
                          double beta, const CVector& f_w) {
  check_dims(weights, steering, target);
  const CVector w_opt = weights * f_w;
  // (w^H D)^T conjugated is D^H w; r is real so the residual norm is unchanged.
  const CVector response = steering.adjoint() * w_opt;
  return (response - target.cast<Complex>()).squaredNorm() + beta * w_opt.squaredNorm();
}

CVector combiner_gradient(const CMatrix& weights, const CMatrix& steering, const Eigen::VectorXd& target,
                          double beta, const CVector& f_w) {
  check_dims(weights, steering, target);
  const CMatrix a = steering.adjoint() * weights;
  const CVector residual = a * f_w - target.cast<Complex>();
  return 2.0 * (a.adjoint() * residual + beta * (weights.adjoint() * (weights * f_w)));
}

CombinerSolution solve_joint_combiner(const CMatrix& weights, const CMatrix& steering,
                                      const DesiredResponse& response, double beta) {
  check_dims(weights, steering, response.values);
  if (!(beta >= 0.0)) throw DomainError("regularization factor must be >= 0");

  const CMatrix a = steering.adjoint() * weights;
  CMatrix normal = a.adjoint() * a + beta * (weights.adjoint() * weights);
  normal = (normal + normal.adjoint()).eval() / 2.0;
  const CVector rhs = a.adjoint() * response.values.cast<Complex>();

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(normal, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(lo > hi * 1e-13)) {
    std::ostringstream os;
    os << "reduced normal matrix is singular (condition estimate " << condition << ")";
    throw NumericalError(os.str());
  }

  CombinerSolution sol;
  sol.f_w = normal.ldlt().solve(rhs);
  sol.w_opt = weights * sol.f_w;
  sol.objective = combiner_objective(weights, steering, response.values, beta, sol.f_w);
  sol.condition = condition;
  return sol;
}

BeamPattern beam_pattern(const ArrayConfig& cfg, const CVector& w, std::span<const Direction> grid) {
  if (grid.empty()) throw DomainError("pattern grid is empty");
  if (w.size() != cfg.element_count()) throw DomainError("weight vector length does not match array");
  BeamPattern pattern;
  pattern.grid.assign(grid.begin(), grid.end());
  pattern.gain_db.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double mag = std::abs(w.dot(steering_vector(cfg, grid[i])));  // dot() conjugates w
    pattern.gain_db[i] = mag > 0.0 ? std::max(kPatternFloorDb, 20.0 * std::log10(mag)) : kPatternFloorDb;
  }
  return pattern;
}

namespace {

struct CutSample {
  double coord;
  double gain_db;
};

// Walks outward from the peak sample to the first sample 3 dB below it and
// interpolates the crossing linearly in dB.
double half_power_width(std::vector<CutSample> cut, double peak_coord, const char* axis) {
  std::sort(cut.begin(), cut.end(), [](const CutSample& a, const CutSample& b) { return a.coord < b.coord; });
  std::size_t peak = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cut.size(); ++i) {
    const double dist = std::abs(cut[i].coord - peak_coord);
    if (dist < best) {
      best = dist;
      peak = i;
    }
  }
  const double level = cut[peak].gain_db - 3.0;
  auto crossing = [&](int dir) -> double {
    long i = static_cast<long>(peak);
    while (true) {
      const long next = i + dir;
      if (next < 0 || next >= static_cast<long>(cut.size())) {
        std::ostringstream os;
        os << "half-power point of the " << axis << " cut lies outside the pattern grid";
        throw DomainError(os.str());
      }
      if (cut[next].gain_db < level) {
        const auto& in = cut[i];
        const auto& out = cut[next];
        const double t = (in.gain_db - level) / (in.gain_db - out.gain_db);
        return in.coord + t * (out.coord - in.coord);
      }
      i = next;
    }
  };
  return crossing(+1) - crossing(-1);
}

}  // namespace

Beamwidth measure_beamwidth(const BeamPattern& pattern, const Direction& peak_dir) {
  std::vector<CutSample> theta_cut;
  std::vector<CutSample> phi_cut;
  for (std::size_t i = 0; i < pattern.grid.size(); ++i) {
    const Direction& d = pattern.grid[i];
    if (std::abs(wrap_azimuth_deg(d.phi_deg - peak_dir.phi_deg)) < 1e-9) {
      theta_cut.push_back({d.theta_deg, pattern.gain_db[i]});
    }
    if (std::abs(d.theta_deg - peak_dir.theta_deg) < 1e-9) {
      phi_cut.push_back({peak_dir.phi_deg + wrap_azimuth_deg(d.phi_deg - peak_dir.phi_deg), pattern.gain_db[i]});
    }
  }
  if (theta_cut.size() < 3 || phi_cut.size() < 3) {
    throw DomainError("pattern grid does not contain both cuts through the peak");
  }
  return {half_power_width(std::move(theta_cut), peak_dir.theta_deg, "pitch"),
          half_power_width(std::move(phi_cut), peak_dir.phi_deg, "azimuth")};
}

std::vector<std::size_t> azimuth_local_maxima(const BeamPattern& cut) {
  const std::size_t n = cut.gain_db.size();
  std::vector<std::size_t> maxima;
  if (n < 3) return maxima;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = cut.gain_db[(i + n - 1) % n];
    const double right = cut.gain_db[(i + 1) % n];
    if (cut.gain_db[i] >= left && cut.gain_db[i] >= right && cut.gain_db[i] > kPatternFloorDb) {
      maxima.push_back(i);
    }
  }
  return maxima;
}

JointBeamforming design_joint_beams(const ArrayConfig& cfg, const BeamSpec& spec, const DirectionGrid& grid) {
  spec.validate();
  JointBeamforming out;
  out.weights = build_weight_matrix(cfg, spec);
  out.response = desired_response(spec, grid);
  const CMatrix steering = steering_matrix(cfg, grid.points);
  out.solution = solve_joint_combiner(out.weights, steering, out.response, spec.beta);
  const CVector ones = CVector::Ones(out.weights.cols());
  out.superposition = out.weights * ones;
  out.superposition_objective = combiner_objective(out.weights, steering, out.response.values, spec.beta, ones);
  return out;
}

}  // namespace sbs
