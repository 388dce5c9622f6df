#include "uimvdr/mixit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "uimvdr/error.hpp"

namespace uimvdr {

namespace {

constexpr std::size_t kMaxEnumeration = 4096;

void check_inputs(const Waveform& mixtures, const Waveform& sources) {
  require(!mixtures.empty() && !sources.empty(), ErrorKind::kInvalidArgument,
          "mixtures and sources must be non-empty");
  require(mixtures.samples() == sources.samples(), ErrorKind::kShapeMismatch,
          "mixtures and sources must have equal length");
  require(sources.channels() >= mixtures.channels(), ErrorKind::kInvalidArgument,
          "need at least as many sources as mixtures");
}

void check_constraint(const Waveform& mixtures, const Waveform& sources,
                      AssignmentConstraint constraint) {
  if (constraint == AssignmentConstraint::kWeakEnhancement) {
    require(mixtures.channels() == 2 && sources.channels() == 3,
            ErrorKind::kInvalidArgument,
            "weak enhancement assignment needs 2 mixtures and 3 sources");
  }
}

MixingMatrix best_of(const Waveform& mixtures, const Waveform& sources,
                     const std::vector<MixingMatrix>& candidates) {
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double err = reconstruction_error(mixtures, sources, candidates[i]);
    if (err < best_err) {
      best_err = err;
      best = i;
    }
  }
  return candidates[best];
}

}  // namespace

MixingMatrix::MixingMatrix(std::size_t mixtures,
                           std::vector<std::size_t> assignment)
    : mixtures_(mixtures), assignment_(std::move(assignment)) {
  require(mixtures_ >= 1, ErrorKind::kInvalidArgument,
          "mixing matrix needs at least one mixture");
  for (std::size_t m : assignment_) {
    require(m < mixtures_, ErrorKind::kInvalidArgument,
            "source assigned to a mixture out of range");
  }
}

std::string MixingMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t n = 0; n < mixtures_; ++n) {
    os << (n ? ",[" : "[");
    for (std::size_t s = 0; s < sources(); ++s) {
      os << (s ? "," : "") << static_cast<int>((*this)(n, s));
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

const std::vector<MixingMatrix>& weak_enhancement_candidates() {
  static const std::vector<MixingMatrix> kCandidates = {
      MixingMatrix(2, {0, 1, 1}),
      MixingMatrix(2, {0, 0, 1}),
      MixingMatrix(2, {0, 1, 0}),
  };
  return kCandidates;
}

bool satisfies(const MixingMatrix& a, AssignmentConstraint constraint) {
  if (constraint == AssignmentConstraint::kUnconstrained) return true;
  for (const auto& c : weak_enhancement_candidates()) {
    if (c == a) return true;
  }
  return false;
}

double reconstruction_error(const Waveform& mixtures, const Waveform& sources,
                            const MixingMatrix& a) {
  check_inputs(mixtures, sources);
  require(a.mixtures() == mixtures.channels() && a.sources() == sources.channels(),
          ErrorKind::kShapeMismatch, "mixing matrix does not match inputs");
  const std::size_t len = mixtures.samples();
  std::vector<double> residual(len);
  double total = 0.0;
  for (std::size_t n = 0; n < mixtures.channels(); ++n) {
    auto y = mixtures.channel(n);
    std::copy(y.begin(), y.end(), residual.begin());
    for (std::size_t s = 0; s < sources.channels(); ++s) {
      if (a.mixture_of(s) != n) continue;
      auto x = sources.channel(s);
      for (std::size_t i = 0; i < len; ++i) residual[i] -= x[i];
    }
    total += energy(residual);
  }
  return total;
}

MixingMatrix solve_mixing_matrix(const Waveform& mixtures,
                                 const Waveform& sources,
                                 AssignmentConstraint constraint) {
  check_inputs(mixtures, sources);
  check_constraint(mixtures, sources, constraint);
  if (constraint == AssignmentConstraint::kWeakEnhancement) {
    return best_of(mixtures, sources, weak_enhancement_candidates());
  }

  const std::size_t n_mix = mixtures.channels();
  const std::size_t n_src = sources.channels();
  const auto ns = static_cast<Eigen::Index>(n_src);
  const auto nm = static_cast<Eigen::Index>(n_mix);

  // Normal equations of y ~ A x over real A: (X X^T) A^T = X Y^T.
  Eigen::MatrixXd gram(ns, ns);
  Eigen::MatrixXd cross(ns, nm);
  for (std::size_t i = 0; i < n_src; ++i) {
    for (std::size_t j = i; j < n_src; ++j) {
      const double g = dot(sources.channel(i), sources.channel(j));
      gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g;
      gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = g;
    }
    for (std::size_t n = 0; n < n_mix; ++n) {
      cross(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)) =
          dot(sources.channel(i), mixtures.channel(n));
    }
  }
  std::vector<std::size_t> assignment(n_src, 0);
  if (gram.trace() <= 0.0 || !gram.allFinite()) {
    return MixingMatrix(n_mix, std::move(assignment));
  }
  // Minimum-norm solution when sources are collinear or silent.
  const Eigen::MatrixXd coeffs = gram.completeOrthogonalDecomposition().solve(cross);
  for (Eigen::Index s = 0; s < ns; ++s) {
    Eigen::Index best = 0;
    for (Eigen::Index n = 1; n < nm; ++n) {
      if (coeffs(s, n) > coeffs(s, best)) best = n;
    }
    assignment[static_cast<std::size_t>(s)] = static_cast<std::size_t>(best);
  }
  return MixingMatrix(n_mix, std::move(assignment));
}

MixingMatrix brute_force_mixing_matrix(const Waveform& mixtures,
                                       const Waveform& sources,
                                       AssignmentConstraint constraint) {
  check_inputs(mixtures, sources);
  check_constraint(mixtures, sources, constraint);
  const std::size_t n_mix = mixtures.channels();
  const std::size_t n_src = sources.channels();
  std::size_t total = 1;
  for (std::size_t s = 0; s < n_src; ++s) {
    total *= n_mix;
    require(total <= kMaxEnumeration, ErrorKind::kInvalidArgument,
            "too many assignments to enumerate (limit 4096)");
  }

  std::vector<MixingMatrix> candidates;
  candidates.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::size_t> assignment(n_src);
    std::size_t rest = code;
    for (std::size_t s = 0; s < n_src; ++s) {
      assignment[s] = rest % n_mix;
      rest /= n_mix;
    }
    MixingMatrix a(n_mix, std::move(assignment));
    if (satisfies(a, constraint)) candidates.push_back(std::move(a));
  }
  return best_of(mixtures, sources, candidates);
}

double LossConfig::tau() const { return std::pow(10.0, -snr_max / 10.0); }

void LossConfig::validate() const {
  require(snr_max >= 0.0 && std::isfinite(snr_max), ErrorKind::kInvalidArgument,
          "snr_max must be finite and >= 0");
  require(gamma >= 0.0 && std::isfinite(gamma), ErrorKind::kInvalidArgument,
          "gamma must be >= 0");
  require(beta > 0.0 && std::isfinite(beta), ErrorKind::kInvalidArgument,
          "beta must be > 0");
}

double snr_loss(std::span<const double> reference, std::span<const double> estimate,
                std::span<const double> threshold_anchor, const LossConfig& cfg) {
  cfg.validate();
  require(!reference.empty(), ErrorKind::kInvalidArgument,
          "snr loss of an empty reference");
  require(reference.size() == estimate.size() &&
              reference.size() == threshold_anchor.size(),
          ErrorKind::kShapeMismatch, "snr loss inputs differ in length");
  const double signal = energy(reference);
  require(signal > 0.0, ErrorKind::kInvalidArgument,
          "snr loss of an all-zero reference");
  double error = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - estimate[i];
    error += d * d;
  }
  const double denom = error + cfg.tau() * energy(threshold_anchor);
  if (denom <= 0.0) return -std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(signal / denom);
}

double energy_penalty(const ComplexSpectrogram& xhat, const LossConfig& cfg) {
  cfg.validate();
  require(xhat.channels() == 1, ErrorKind::kInvalidArgument,
          "energy penalty expects a single-channel spectrogram");
  const std::size_t cells = xhat.frames() * xhat.bins();
  require(cells > 0, ErrorKind::kInvalidArgument, "empty spectrogram");
  double acc = 0.0;
  for (const Complex& v : xhat.data()) {
    const double mag = std::abs(v);
    if (mag > 0.0) acc += std::pow(mag, cfg.beta);
  }
  const double penalty = cfg.gamma * acc / static_cast<double>(cells);
  require(std::isfinite(penalty), ErrorKind::kNumerical,
          "energy penalty is not finite");
  return penalty;
}

MixitLoss mixit_loss(const Waveform& mixtures, const Waveform& sources,
                     const ComplexSpectrogram& target_spectrum,
                     const MixingMatrix& a, const LossConfig& cfg) {
  cfg.validate();
  require(a.mixtures() == mixtures.channels() && a.sources() == sources.channels(),
          ErrorKind::kShapeMismatch, "mixing matrix does not match the inputs");
  require(mixtures.samples() == sources.samples(), ErrorKind::kShapeMismatch,
          "mixtures and sources differ in length");
  const std::size_t len = mixtures.samples();
  std::vector<double> rebuilt(len);
  double snr_term = 0.0;
  for (std::size_t n = 0; n < mixtures.channels(); ++n) {
    std::fill(rebuilt.begin(), rebuilt.end(), 0.0);
    for (std::size_t s = 0; s < sources.channels(); ++s) {
      if (a.mixture_of(s) != n) continue;
      auto x = sources.channel(s);
      for (std::size_t i = 0; i < len; ++i) rebuilt[i] += x[i];
    }
    auto y = mixtures.channel(n);
    snr_term += snr_loss(y, rebuilt, y, cfg);
  }
  const double energy_term =
      cfg.gamma > 0.0 ? energy_penalty(target_spectrum, cfg) : 0.0;
  return MixitLoss{snr_term + energy_term, snr_term, energy_term, a};
}

MixitLoss mixit_total_loss(const Waveform& mixtures, const Waveform& sources,
                           const ComplexSpectrogram& target_spectrum,
                           AssignmentConstraint constraint,
                           const LossConfig& cfg) {
  cfg.validate();
  return mixit_loss(mixtures, sources, target_spectrum,
                    solve_mixing_matrix(mixtures, sources, constraint), cfg);
}

}  // namespace uimvdr
