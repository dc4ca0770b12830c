#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sbs/array_geometry.hpp"

namespace sbs {

/// One free detection beam plus zero or more directional communication beams.
struct BeamSpec {
  Direction fdb_dir;
  std::vector<Direction> dcb_dirs;
  double beta = 0.01;

  /// FDB first, then DCBs in order.
  std::vector<Direction> all_directions() const;
  void validate() const;
};

/// Sampled set of directions used as the response-fitting grid D_d.
struct DirectionGrid {
  std::vector<Direction> points;
  double step_deg = 1.0;

  /// Azimuth sweep over [-180, 180) at fixed pitch.
  static DirectionGrid azimuth_cut(double theta_deg, double step_deg);
  /// Full hemisphere: pitch [0, 90] by azimuth [-180, 180).
  static DirectionGrid hemisphere(double step_deg);
  /// Union of a pitch cut and an azimuth cut through `center`, each spanning
  /// +-half_span_deg. Used for beamwidth measurement.
  static DirectionGrid cross(const Direction& center, double half_span_deg, double step_deg);
};

struct DesiredResponse {
  std::vector<Direction> grid;
  Eigen::VectorXd values;
  /// Grid index each specified direction snapped to (FDB first).
  std::vector<std::size_t> hits;
};

struct BeamPattern {
  std::vector<Direction> grid;
  std::vector<double> gain_db;
};

struct CombinerSolution {
  CVector f_w;
  CVector w_opt;
  double objective = 0.0;
  /// 2-norm condition number of the reduced normal matrix.
  double condition = 0.0;
};

struct Beamwidth {
  double delta_theta_deg = 0.0;
  double delta_phi_deg = 0.0;
};

inline constexpr double kPatternFloorDb = -120.0;

/// Matched-filter weights a(dir) / N_t, so that w^H a(dir) = 1.
CVector single_beam_weights(const ArrayConfig& cfg, const Direction& dir);

/// 1 at the grid point each beam direction snaps to (within half a step), 0
/// elsewhere. Throws DomainError if a direction has no grid point in reach.
DesiredResponse desired_response(const BeamSpec& spec, const DirectionGrid& grid);

/// [w_fdb, w_dcb1, ..., w_dcbn] column by column.
CMatrix build_weight_matrix(const ArrayConfig& cfg, const BeamSpec& spec);

/// ||(W f)^H D - r||^2 + beta ||W f||^2
double combiner_objective(const CMatrix& weights, const CMatrix& steering, const Eigen::VectorXd& target,
                          double beta, const CVector& f_w);

/// Gradient of combiner_objective with respect to conj(f_w), scaled by 2
/// (so that a real-valued perturbation d of f changes the objective by
/// Re(grad^H d) to first order).
CVector combiner_gradient(const CMatrix& weights, const CMatrix& steering, const Eigen::VectorXd& target,
                          double beta, const CVector& f_w);

/// Minimises the regularized response-fitting objective over f_w with
/// w_opt = W f_w. The substitution makes this a linear least-squares problem
/// in f_w, solved through its Hermitian normal equations
///   (A^H A + beta W^H W) f = A^H r,   A = D^H W.
/// Throws NumericalError if the normal matrix is numerically singular.
CombinerSolution solve_joint_combiner(const CMatrix& weights, const CMatrix& steering,
                                      const DesiredResponse& response, double beta);

/// 20 log10 |w^H a(dir)| per grid point, floored at kPatternFloorDb.
BeamPattern beam_pattern(const ArrayConfig& cfg, const CVector& w, std::span<const Direction> grid);

/// Half-power widths of the pitch and azimuth cuts through peak_dir. The
/// pattern grid must contain both cuts (see DirectionGrid::cross). Throws
/// DomainError if the -3 dB point is not reached inside the grid on either side.
Beamwidth measure_beamwidth(const BeamPattern& pattern, const Direction& peak_dir);

/// Grid indices of strict-or-plateau local maxima along an azimuth cut
/// (neighbours wrap around at +-180).
std::vector<std::size_t> azimuth_local_maxima(const BeamPattern& cut);

/// Everything the `beamform` experiment needs for one spec.
struct JointBeamforming {
  CMatrix weights;
  DesiredResponse response;
  CombinerSolution solution;
  /// Baseline: linear superposition W * 1.
  CVector superposition;
  double superposition_objective = 0.0;
};

JointBeamforming design_joint_beams(const ArrayConfig& cfg, const BeamSpec& spec, const DirectionGrid& grid);

}  // namespace sbs
