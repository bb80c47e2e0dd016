// SPDX-License-Identifier: Apache-2.0
//
// STAR-RIS coefficients under energy splitting and the temperature-driven
// coordinate-descent controller that configures them each slot.

#pragma once

#include <span>
#include <utility>

#include "uvaa/config.hpp"
#include "uvaa/rng.hpp"
#include "uvaa/types.hpp"

namespace uvaa {

struct ChannelRealization;

struct ElementCoeff {
  double amp_r = 0.5;  // a_R; a_T = 1 - a_R
  double phase_r = 0.0;
  double phase_t = 0.0;
};

// a_T is implicit so that a_R + a_T = 1 holds exactly.
class StarRisState {
 public:
  StarRisState() = default;
  explicit StarRisState(std::size_t elements, ElementCoeff init = {});

  std::size_t size() const { return amp_r_.size(); }
  ElementCoeff element(std::size_t s) const { return {amp_r_[s], phase_r_[s], phase_t_[s]}; }
  // Clamps the amplitude to [0, 1] and wraps both phases to [0, 2 pi).
  void set_element(std::size_t s, const ElementCoeff &c);

  double amp_r(std::size_t s) const { return amp_r_[s]; }
  double amp_t(std::size_t s) const { return 1.0 - amp_r_[s]; }
  double phase_r(std::size_t s) const { return phase_r_[s]; }
  double phase_t(std::size_t s) const { return phase_t_[s]; }

  bool operator==(const StarRisState &) const = default;

 private:
  std::vector<double> amp_r_;
  std::vector<double> phase_r_;
  std::vector<double> phase_t_;
};

double wrap_phase(double theta);

// Diagonals of Theta^R and Theta^T.
std::pair<ComplexVec, ComplexVec> coefficient_matrices(const StarRisState &state);
Complex reflection_coeff(const ElementCoeff &c);
Complex transmission_coeff(const ElementCoeff &c);

struct AnnealSchedule {
  double t_init = 1.0;
  double cooling = 0.95;
  double t_min = 0.1;
};

AnnealSchedule anneal_schedule(const AnnealConfig &cfg);

// Temperature-scaled perturbation grid around `current`:
// amplitudes current + {0, +d, -d, ...} * (T / T_init) clipped to [0, 1]
// (duplicates after clipping removed), phases current + {0, +d, -d, +2d, ...}
// * (T / T_init) wrapped. Always contains the current values first.
CandidateSet candidate_sets(const ElementCoeff &current, double temperature, const AnnealConfig &cfg);

// Enumeration order is amplitude-major: index = (ia * |R| + ir) * |T| + it.
ElementCoeff candidate_at(const CandidateSet &set, std::size_t index);

// |S_k + S_j|^2 for the whole surface.
double joint_metric(const ChannelRealization &chan, const StarRisState &state);

// |S_k + S_j|^2 with `candidate` substituted at element `index` only.
double candidate_metric(const ChannelRealization &chan, const StarRisState &state, std::size_t index,
                        const ElementCoeff &candidate);

// T > T_min: draw from softmax(metrics / T); otherwise argmax (lowest index
// on ties). Throws NumericError when no metric is finite.
std::size_t select_candidate(std::span<const double> metrics, double temperature, double t_min, Rng &rng);

// Softmax probabilities used by select_candidate.
std::vector<double> selection_probabilities(std::span<const double> metrics, double temperature);

// One coordinate-descent sweep over all elements with the temperature reset
// to T_init and cooled after every element.
StarRisState atso_optimize(const ChannelRealization &chan, const StarRisState &state, const AnnealConfig &cfg,
                           Rng &rng);

struct OracleResult {
  StarRisState state;
  double metric = 0.0;
  std::size_t evaluations = 0;
};

// Exact argmax of |S_k + S_j|^2 over the full grid for N_S <= 3.
OracleResult exhaustive_oracle(const ChannelRealization &chan, const CandidateSet &grid);

}  // namespace uvaa
