#include "uimvdr/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "uimvdr/error.hpp"
#include "uimvdr/waveform.hpp"

namespace uimvdr {

double si_sdr(std::span<const double> estimate, std::span<const double> reference) {
  require(estimate.size() == reference.size(), ErrorKind::kShapeMismatch,
          "si-sdr inputs differ in length");
  require(!reference.empty(), ErrorKind::kInvalidArgument,
          "si-sdr of an empty signal");
  const double ref_energy = energy(reference);
  require(ref_energy > 0.0, ErrorKind::kInvalidArgument,
          "si-sdr reference is all zeros");

  const double alpha = dot(estimate, reference) / ref_energy;
  double target = 0.0;
  double distortion = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double s = alpha * reference[i];
    const double e = estimate[i] - s;
    target += s * s;
    distortion += e * e;
  }
  if (target <= 0.0) return -kSiSdrClampDb;
  if (distortion <= 0.0) return kSiSdrClampDb;
  const double db = 10.0 * std::log10(target / distortion);
  return std::clamp(db, -kSiSdrClampDb, kSiSdrClampDb);
}

double si_sdri(std::span<const double> estimate, std::span<const double> reference,
               std::span<const double> mixture) {
  return si_sdr(estimate, reference) - si_sdr(mixture, reference);
}

}  // namespace uimvdr
