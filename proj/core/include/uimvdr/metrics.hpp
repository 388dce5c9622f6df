#pragma once

#include <optional>
#include <span>
#include <string>

namespace uimvdr {

inline constexpr double kSiSdrClampDb = 100.0;

// Scale-invariant SDR in dB, clamped to +/-100 dB. No mean removal: the
// estimate is projected onto the raw reference.
double si_sdr(std::span<const double> estimate, std::span<const double> reference);

// si_sdr(estimate, reference) - si_sdr(mixture, reference)
double si_sdri(std::span<const double> estimate, std::span<const double> reference,
               std::span<const double> mixture);

struct MetricReport {
  std::string scene_id;
  double si_sdr = 0.0;
  std::optional<double> si_sdri;
};

}  // namespace uimvdr
