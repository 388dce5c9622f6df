#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uimvdr/stft.hpp"
#include "uimvdr/waveform.hpp"

namespace uimvdr {

// Binary [mixtures x sources] matrix with exactly one 1 per column: column s
// names the mixture that source s is assigned to.
class MixingMatrix {
 public:
  // `assignment[s]` is the mixture index of source s.
  MixingMatrix(std::size_t mixtures, std::vector<std::size_t> assignment);

  std::size_t mixtures() const { return mixtures_; }
  std::size_t sources() const { return assignment_.size(); }
  std::size_t mixture_of(std::size_t source) const { return assignment_[source]; }
  const std::vector<std::size_t>& assignment() const { return assignment_; }
  std::uint8_t operator()(std::size_t n, std::size_t s) const {
    return assignment_[s] == n ? 1 : 0;
  }

  // "[[1,1,0],[0,0,1]]"
  std::string to_string() const;

  friend bool operator==(const MixingMatrix&, const MixingMatrix&) = default;

 private:
  std::size_t mixtures_;
  std::vector<std::size_t> assignment_;
};

enum class AssignmentConstraint {
  kUnconstrained,
  // Two mixtures, three outputs: mixture 0 is rebuilt from output 0 alone or
  // together with exactly one of outputs 1 and 2; mixture 1 takes the rest.
  kWeakEnhancement,
};

// The three matrices admitted by kWeakEnhancement, in a fixed order.
const std::vector<MixingMatrix>& weak_enhancement_candidates();
bool satisfies(const MixingMatrix& a, AssignmentConstraint constraint);

// sum_n || y_n - sum_s A[n][s] x_s ||^2
double reconstruction_error(const Waveform& mixtures, const Waveform& sources,
                            const MixingMatrix& a);

// Least-squares mixing matrix followed by the per-column argmax projection
// (ties go to the lowest mixture index). kWeakEnhancement evaluates the three
// admissible matrices directly.
MixingMatrix solve_mixing_matrix(const Waveform& mixtures,
                                 const Waveform& sources,
                                 AssignmentConstraint constraint);

// Exhaustive search over all N^S one-hot assignments (guarded at 4096).
MixingMatrix brute_force_mixing_matrix(const Waveform& mixtures,
                                       const Waveform& sources,
                                       AssignmentConstraint constraint);

struct LossConfig {
  double snr_max = 30.0;  // dB
  double gamma = 0.01;
  double beta = 0.5;

  double tau() const;
  void validate() const;
};

// -10 log10(|x|^2 / (|x - x_hat|^2 + tau |anchor|^2))
double snr_loss(std::span<const double> reference, std::span<const double> estimate,
                std::span<const double> threshold_anchor, const LossConfig& cfg);

// (gamma / TF) sum_t sum_f |X_hat(t, f)|^beta over a single-channel spectrogram.
double energy_penalty(const ComplexSpectrogram& xhat, const LossConfig& cfg);

struct MixitLoss {
  double loss = 0.0;
  double snr_term = 0.0;
  double energy_term = 0.0;
  MixingMatrix assignment;
};

// Loss for a fixed assignment: each mixture is rebuilt from its assigned
// sources and scored with the thresholded SNR loss anchored on itself; the
// energy penalty of the first output's spectrum is added.
MixitLoss mixit_loss(const Waveform& mixtures, const Waveform& sources,
                     const ComplexSpectrogram& target_spectrum,
                     const MixingMatrix& assignment, const LossConfig& cfg);

// mixit_loss at the assignment chosen by solve_mixing_matrix.
MixitLoss mixit_total_loss(const Waveform& mixtures, const Waveform& sources,
                           const ComplexSpectrogram& target_spectrum,
                           AssignmentConstraint constraint,
                           const LossConfig& cfg);

}  // namespace uimvdr
