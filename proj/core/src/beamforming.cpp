#include "uimvdr/beamforming.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "uimvdr/error.hpp"

namespace uimvdr {

namespace {

using MatrixXcdR =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

bool finite(const Complex& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// Accumulates (1/T) sum_t v v^H for v produced by `snapshot(t, f, buf)`.
template <typename Snapshot>
Scm average_outer(std::size_t frames, std::size_t bins, std::size_t channels,
                  Snapshot snapshot) {
  require(frames >= 1, ErrorKind::kInvalidArgument, "empty spectrogram");
  Scm scm(bins, channels);
  std::vector<Complex> v(channels);
  const double inv_t = 1.0 / static_cast<double>(frames);
  for (std::size_t f = 0; f < bins; ++f) {
    auto out = scm.slice(f);
    for (std::size_t t = 0; t < frames; ++t) {
      snapshot(t, f, v);
      for (std::size_t i = 0; i < channels; ++i) {
        // Diagonal real, lower triangle mirrored below.
        out[i * channels + i] += std::norm(v[i]);
        for (std::size_t j = i + 1; j < channels; ++j) {
          out[i * channels + j] += v[i] * std::conj(v[j]);
        }
      }
    }
    for (std::size_t i = 0; i < channels; ++i) {
      for (std::size_t j = i; j < channels; ++j) {
        out[i * channels + j] *= inv_t;
        out[j * channels + i] = std::conj(out[i * channels + j]);
      }
    }
  }
  return scm;
}

}  // namespace

Scm::Scm(std::size_t bins, std::size_t channels)
    : bins_(bins), channels_(channels), data_(bins * channels * channels) {}

Complex Scm::trace(std::size_t f) const {
  Complex acc{};
  for (std::size_t i = 0; i < channels_; ++i) acc += at(f, i, i);
  return acc;
}

Scm& Scm::operator*=(double scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

void BeamformConfig::validate() const {
  require(diagonal_loading >= 0.0 && std::isfinite(diagonal_loading),
          ErrorKind::kInvalidArgument, "diagonal loading must be >= 0");
  require(postmask_floor >= 0.0 && postmask_floor <= 1.0,
          ErrorKind::kInvalidArgument, "post-mask floor must lie in [0, 1]");
}

BeamformerWeights BeamformerWeights::pass_through(std::size_t bins,
                                                  std::size_t channels,
                                                  std::size_t ref_mic) {
  require(ref_mic < channels, ErrorKind::kInvalidArgument,
          "reference microphone out of range");
  BeamformerWeights w{bins, channels, ref_mic,
                      std::vector<Complex>(bins * channels)};
  for (std::size_t f = 0; f < bins; ++f) w.weights[f * channels + ref_mic] = 1.0;
  return w;
}

Scm scm_target(const ComplexSpectrogram& xhat) {
  return average_outer(xhat.frames(), xhat.bins(), xhat.channels(),
                       [&](std::size_t t, std::size_t f, std::vector<Complex>& v) {
                         auto src = xhat.vec(t, f);
                         std::copy(src.begin(), src.end(), v.begin());
                       });
}

Scm scm_noise(const ComplexSpectrogram& mixture, const ComplexSpectrogram& xhat) {
  require(mixture.same_shape(xhat), ErrorKind::kShapeMismatch,
          "mixture and target estimate shapes differ");
  return average_outer(mixture.frames(), mixture.bins(), mixture.channels(),
                       [&](std::size_t t, std::size_t f, std::vector<Complex>& v) {
                         auto y = mixture.vec(t, f);
                         auto x = xhat.vec(t, f);
                         for (std::size_t c = 0; c < v.size(); ++c) v[c] = y[c] - x[c];
                       });
}

BeamformerWeights mvdr_weights(const Scm& phi_xx, const Scm& phi_nn,
                               const BeamformConfig& cfg) {
  cfg.validate();
  require(phi_xx.bins() == phi_nn.bins() &&
              phi_xx.channels() == phi_nn.channels(),
          ErrorKind::kShapeMismatch, "SCM dimensions differ");
  const std::size_t bins = phi_xx.bins();
  const auto c = static_cast<Eigen::Index>(phi_xx.channels());
  require(cfg.ref_mic < phi_xx.channels(), ErrorKind::kInvalidArgument,
          "reference microphone out of range");

  auto weights = BeamformerWeights::pass_through(bins, phi_xx.channels(),
                                                 cfg.ref_mic);
  const double degenerate = 1e-12 * static_cast<double>(c);
  const auto ref = static_cast<Eigen::Index>(cfg.ref_mic);
  for (std::size_t f = 0; f < bins; ++f) {
    auto xs = phi_xx.slice(f);
    auto ns = phi_nn.slice(f);
    require(std::all_of(xs.begin(), xs.end(), finite) &&
                std::all_of(ns.begin(), ns.end(), finite),
            ErrorKind::kNumerical, "SCM contains non-finite entries");

    Eigen::Map<const MatrixXcdR> xx(xs.data(), c, c);
    Eigen::Map<const MatrixXcdR> nn(ns.data(), c, c);
    const double eps =
        cfg.diagonal_loading * phi_nn.trace(f).real() / static_cast<double>(c);
    MatrixXcdR loaded = nn;
    loaded.diagonal().array() += eps;

    Eigen::LDLT<MatrixXcdR> solver(loaded);
    if (solver.info() != Eigen::Success || !solver.isPositive()) continue;
    const MatrixXcdR ratio = solver.solve(xx);
    const Complex denom = ratio.trace();
    if (!finite(denom) || !ratio.allFinite() || std::abs(denom) < degenerate) {
      continue;
    }
    // A singular loaded matrix surfaces as a blown-up but finite solve.
    if ((loaded * ratio - xx).norm() > 1e-6 * (xx.norm() + 1e-300)) continue;

    for (Eigen::Index i = 0; i < c; ++i) {
      weights.weights[f * phi_xx.channels() + static_cast<std::size_t>(i)] =
          ratio(i, ref) / denom;
    }
  }
  return weights;
}

ComplexSpectrogram mvdr_apply(const BeamformerWeights& weights,
                              const ComplexSpectrogram& mixture) {
  require(weights.channels == mixture.channels() &&
              weights.bins == mixture.bins(),
          ErrorKind::kShapeMismatch, "beamformer weights do not match mixture");
  ComplexSpectrogram out = mixture.zeros_like(1);
  for (std::size_t t = 0; t < mixture.frames(); ++t) {
    for (std::size_t f = 0; f < mixture.bins(); ++f) {
      auto y = mixture.vec(t, f);
      auto w = weights.at(f);
      Complex acc{};
      for (std::size_t c = 0; c < y.size(); ++c) acc += std::conj(w[c]) * y[c];
      out.at(t, f, 0) = acc;
    }
  }
  return out;
}

ComplexSpectrogram post_mask(const ComplexSpectrogram& beamformed,
                             const Mask& mask, double floor) {
  require(floor >= 0.0 && floor <= 1.0, ErrorKind::kInvalidArgument,
          "post-mask floor must lie in [0, 1]");
  require(mask.matches(beamformed), ErrorKind::kShapeMismatch,
          "mask shape does not match beamformed spectrogram");
  ComplexSpectrogram out = beamformed;
  for (std::size_t t = 0; t < out.frames(); ++t) {
    for (std::size_t f = 0; f < out.bins(); ++f) {
      const double g = std::max(mask(t, f), floor);
      for (auto& v : out.vec(t, f)) v *= g;
    }
  }
  return out;
}

}  // namespace uimvdr
