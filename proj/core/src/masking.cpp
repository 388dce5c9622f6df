#include "uimvdr/masking.hpp"

#include <cmath>
#include <string>

#include "uimvdr/error.hpp"

namespace uimvdr {

namespace {

bool in_unit_range(double v) { return v >= 0.0 && v <= 1.0; }

void require_pair(const ComplexSpectrogram& a, const ComplexSpectrogram& b,
                  std::size_t channel) {
  require(a.frames() == b.frames() && a.bins() == b.bins(),
          ErrorKind::kShapeMismatch, "spectrogram shapes differ");
  require(channel < a.channels() && channel < b.channels(),
          ErrorKind::kInvalidArgument, "mask channel out of range");
}

}  // namespace

Mask::Mask(std::size_t frames, std::size_t bins, double fill)
    : frames_(frames), bins_(bins), values_(frames * bins, fill) {
  require(in_unit_range(fill), ErrorKind::kInvalidArgument,
          "mask values must lie in [0, 1]");
}

Mask::Mask(std::size_t frames, std::size_t bins, std::vector<double> values)
    : frames_(frames), bins_(bins), values_(std::move(values)) {
  require(values_.size() == frames * bins, ErrorKind::kShapeMismatch,
          "mask value count does not match its dimensions");
  for (double v : values_) {
    require(in_unit_range(v), ErrorKind::kInvalidArgument,
            "mask values must lie in [0, 1]");
  }
}

void Mask::set(std::size_t t, std::size_t f, double value) {
  require(t < frames_ && f < bins_, ErrorKind::kInvalidArgument,
          "mask index out of range");
  require(in_unit_range(value), ErrorKind::kInvalidArgument,
          "mask values must lie in [0, 1]");
  values_[t * bins_ + f] = value;
}

ComplexSpectrogram apply_mask(const ComplexSpectrogram& spec, const Mask& mask) {
  require(mask.matches(spec), ErrorKind::kShapeMismatch,
          "mask shape does not match spectrogram");
  ComplexSpectrogram out = spec;
  for (std::size_t t = 0; t < spec.frames(); ++t) {
    for (std::size_t f = 0; f < spec.bins(); ++f) {
      const double m = mask(t, f);
      for (auto& v : out.vec(t, f)) v *= m;
    }
  }
  return out;
}

Mask oracle_wiener_mask(const ComplexSpectrogram& target,
                        const ComplexSpectrogram& mixture, double exponent,
                        std::size_t channel) {
  require(exponent > 0.0 && std::isfinite(exponent), ErrorKind::kInvalidArgument,
          "wiener exponent must be positive");
  require_pair(target, mixture, channel);
  Mask mask(target.frames(), target.bins());
  for (std::size_t t = 0; t < target.frames(); ++t) {
    for (std::size_t f = 0; f < target.bins(); ++f) {
      const Complex x = target.at(t, f, channel);
      const double xs = std::pow(std::abs(x), exponent);
      const double ns = std::pow(std::abs(mixture.at(t, f, channel) - x), exponent);
      const double denom = xs + ns;
      double m = denom > 0.0 ? xs / denom : 0.0;
      // Overflowing powers of huge magnitudes.
      if (!std::isfinite(m)) m = std::abs(x) >= std::abs(mixture.at(t, f, channel) - x) ? 1.0 : 0.0;
      mask.set(t, f, m);
    }
  }
  return mask;
}

Mask oracle_binary_mask(const ComplexSpectrogram& target,
                        const ComplexSpectrogram& noise, double threshold_db,
                        std::size_t channel) {
  require(!std::isnan(threshold_db), ErrorKind::kInvalidArgument,
          "binary mask threshold must not be NaN");
  require_pair(target, noise, channel);
  Mask mask(target.frames(), target.bins());
  for (std::size_t t = 0; t < target.frames(); ++t) {
    for (std::size_t f = 0; f < target.bins(); ++f) {
      const double xa = std::abs(target.at(t, f, channel));
      const double na = std::abs(noise.at(t, f, channel));
      bool on = false;
      if (xa > 0.0) {
        on = na == 0.0 || 20.0 * std::log10(xa / na) > threshold_db;
      }
      mask.set(t, f, on ? 1.0 : 0.0);
    }
  }
  return mask;
}

void validate(const MaskProvider& provider) {
  if (const auto* w = std::get_if<OracleWienerMask>(&provider)) {
    require(w->exponent > 0.0 && std::isfinite(w->exponent),
            ErrorKind::kInvalidArgument, "wiener exponent must be positive");
  } else if (const auto* b = std::get_if<OracleBinaryMask>(&provider)) {
    require(!std::isnan(b->threshold_db) && b->threshold_db != HUGE_VAL,
            ErrorKind::kInvalidArgument, "binary threshold must be below +inf");
  }
}

bool needs_target(const MaskProvider& provider) {
  return std::holds_alternative<OracleWienerMask>(provider) ||
         std::holds_alternative<OracleBinaryMask>(provider);
}

Mask resolve_mask(const MaskProvider& provider,
                  const ComplexSpectrogram& mixture,
                  const ComplexSpectrogram* target, std::size_t ref) {
  validate(provider);
  require(ref < mixture.channels(), ErrorKind::kInvalidArgument,
          "reference microphone out of range");
  if (needs_target(provider)) {
    require(target != nullptr, ErrorKind::kInvalidArgument,
            "oracle masks require the ground-truth target stem");
    // A mono target stem is taken to be the reference-channel image.
    const std::size_t tch = target->channels() == 1 ? 0 : ref;
    const ComplexSpectrogram t_ref = target->select_channel(tch);
    const ComplexSpectrogram y_ref = mixture.select_channel(ref);
    if (const auto* w = std::get_if<OracleWienerMask>(&provider)) {
      return oracle_wiener_mask(t_ref, y_ref, w->exponent);
    }
    ComplexSpectrogram noise = y_ref;
    require(noise.same_shape(t_ref), ErrorKind::kShapeMismatch,
            "target stem does not match mixture");
    for (std::size_t i = 0; i < noise.data().size(); ++i) {
      noise.data()[i] -= t_ref.data()[i];
    }
    return oracle_binary_mask(t_ref, noise,
                              std::get<OracleBinaryMask>(provider).threshold_db);
  }
  if (const auto* e = std::get_if<ExternalMask>(&provider)) {
    require(e->mask.matches(mixture), ErrorKind::kShapeMismatch,
            "external mask has " + std::to_string(e->mask.frames()) + "x" +
                std::to_string(e->mask.bins()) + " cells, mixture has " +
                std::to_string(mixture.frames()) + "x" +
                std::to_string(mixture.bins()));
    return e->mask;
  }
  return Mask(mixture.frames(), mixture.bins(), 1.0);
}

}  // namespace uimvdr
