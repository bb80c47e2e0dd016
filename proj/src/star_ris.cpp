// SPDX-License-Identifier: Apache-2.0

#include "uvaa/star_ris.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uvaa/channel.hpp"

namespace uvaa {

double wrap_phase(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;  // fmod of a tiny negative can round up to 2 pi
  return w;
}

StarRisState::StarRisState(std::size_t elements, ElementCoeff init)
    : amp_r_(elements), phase_r_(elements), phase_t_(elements) {
  for (std::size_t s = 0; s < elements; ++s) set_element(s, init);
}

void StarRisState::set_element(std::size_t s, const ElementCoeff &c) {
  amp_r_.at(s) = std::clamp(c.amp_r, 0.0, 1.0);
  phase_r_[s] = wrap_phase(c.phase_r);
  phase_t_[s] = wrap_phase(c.phase_t);
}

Complex reflection_coeff(const ElementCoeff &c) { return std::polar(std::sqrt(c.amp_r), c.phase_r); }
Complex transmission_coeff(const ElementCoeff &c) { return std::polar(std::sqrt(1.0 - c.amp_r), c.phase_t); }

std::pair<ComplexVec, ComplexVec> coefficient_matrices(const StarRisState &state) {
  ComplexVec r(state.size());
  ComplexVec t(state.size());
  for (std::size_t s = 0; s < state.size(); ++s) {
    r[s] = reflection_coeff(state.element(s));
    t[s] = transmission_coeff(state.element(s));
  }
  return {std::move(r), std::move(t)};
}

AnnealSchedule anneal_schedule(const AnnealConfig &cfg) {
  if (!(cfg.t_min > 0.0) || !(cfg.t_init >= cfg.t_min)) {
    throw ConfigError("sa.t_min", "annealing requires T_init >= T_min > 0");
  }
  if (!(cfg.cooling > 0.0 && cfg.cooling < 1.0)) throw ConfigError("sa.cooling", "cooling rate must lie in (0, 1)");
  return {cfg.t_init, cfg.cooling, cfg.t_min};
}

namespace {

// 0, +1, -1, +2, -2, ...
double offset_multiplier(int k) { return k == 0 ? 0.0 : (k % 2 == 1 ? (k + 1) / 2 : -(k / 2)); }

void push_unique(std::vector<double> &v, double x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

}  // namespace

CandidateSet candidate_sets(const ElementCoeff &current, double temperature, const AnnealConfig &cfg) {
  const double scale = temperature / cfg.t_init;
  CandidateSet set;
  for (int k = 0; k < std::max(1, cfg.amp_count); ++k) {
    push_unique(set.amplitudes, std::clamp(current.amp_r + offset_multiplier(k) * cfg.amp_step * scale, 0.0, 1.0));
  }
  for (int k = 0; k < std::max(1, cfg.phase_count); ++k) {
    const double d = offset_multiplier(k) * cfg.phase_step * scale;
    push_unique(set.phases_r, wrap_phase(current.phase_r + d));
    push_unique(set.phases_t, wrap_phase(current.phase_t + d));
  }
  return set;
}

ElementCoeff candidate_at(const CandidateSet &set, std::size_t index) {
  const std::size_t nt = set.phases_t.size();
  const std::size_t nr = set.phases_r.size();
  const std::size_t it = index % nt;
  const std::size_t ir = (index / nt) % nr;
  const std::size_t ia = index / (nt * nr);
  return {set.amplitudes.at(ia), set.phases_r[ir], set.phases_t[it]};
}

namespace {

struct SideSums {
  Complex k;
  Complex j;
};

SideSums side_sums(const ChannelRealization &chan, const StarRisState &state) {
  SideSums s{chan.h_mk, chan.h_mj};
  for (std::size_t e = 0; e < chan.h_ms.size(); ++e) {
    const ElementCoeff c = state.element(e);
    s.k += chan.h_ms[e] * reflection_coeff(c) * chan.h_sk[e];
    s.j += chan.h_ms[e] * transmission_coeff(c) * chan.h_sj[e];
  }
  return s;
}

// Metric with element e swapped from `old_c` to `new_c`, given full sums.
double swapped_metric(const ChannelRealization &chan, const SideSums &sums, std::size_t e, const ElementCoeff &old_c,
                      const ElementCoeff &new_c) {
  const Complex k = sums.k + chan.h_ms[e] * chan.h_sk[e] * (reflection_coeff(new_c) - reflection_coeff(old_c));
  const Complex j = sums.j + chan.h_ms[e] * chan.h_sj[e] * (transmission_coeff(new_c) - transmission_coeff(old_c));
  return std::norm(k + j);
}

}  // namespace

double joint_metric(const ChannelRealization &chan, const StarRisState &state) {
  const SideSums s = side_sums(chan, state);
  return std::norm(s.k + s.j);
}

double candidate_metric(const ChannelRealization &chan, const StarRisState &state, std::size_t index,
                        const ElementCoeff &candidate) {
  StarRisState trial = state;
  trial.set_element(index, candidate);
  return joint_metric(chan, trial);
}

std::vector<double> selection_probabilities(std::span<const double> metrics, double temperature) {
  double top = -std::numeric_limits<double>::infinity();
  for (double m : metrics) {
    if (std::isfinite(m)) top = std::max(top, m);
  }
  if (!std::isfinite(top)) throw NumericError("select_candidate: no finite metric");
  std::vector<double> p(metrics.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (!std::isfinite(metrics[i])) continue;
    p[i] = std::exp((metrics[i] - top) / temperature);
    z += p[i];
  }
  for (double &x : p) x /= z;
  return p;
}

std::size_t select_candidate(std::span<const double> metrics, double temperature, double t_min, Rng &rng) {
  if (metrics.empty()) throw std::invalid_argument("select_candidate: empty metric list");
  if (temperature <= t_min) {
    std::size_t best = metrics.size();
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      if (!std::isfinite(metrics[i])) continue;
      if (best == metrics.size() || metrics[i] > metrics[best]) best = i;
    }
    if (best == metrics.size()) throw NumericError("select_candidate: no finite metric");
    return best;
  }
  const std::vector<double> p = selection_probabilities(metrics, temperature);
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    acc += p[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

StarRisState atso_optimize(const ChannelRealization &chan, const StarRisState &state, const AnnealConfig &cfg,
                           Rng &rng) {
  const AnnealSchedule sched = anneal_schedule(cfg);
  if (state.size() != chan.h_ms.size()) throw std::invalid_argument("atso_optimize: state/channel size mismatch");
  StarRisState out = state;
  double temperature = sched.t_init;
  std::vector<double> metrics;
  for (std::size_t e = 0; e < out.size(); ++e) {
    const ElementCoeff current = out.element(e);
    const CandidateSet cands = cfg.fixed_grid ? *cfg.fixed_grid : candidate_sets(current, temperature, cfg);
    const SideSums sums = side_sums(chan, out);
    metrics.resize(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
      metrics[i] = swapped_metric(chan, sums, e, current, candidate_at(cands, i));
    }
    if (cfg.normalize_metrics && !metrics.empty()) {
      const auto [lo, hi] = std::minmax_element(metrics.begin(), metrics.end());
      const double low = *lo;
      const double spread = *hi - low;
      if (spread > 0.0) {
        for (double &m : metrics) m = (m - low) / spread;
      }
    }
    const std::size_t pick = select_candidate(metrics, temperature, sched.t_min, rng);
    out.set_element(e, candidate_at(cands, pick));
    temperature = std::max(sched.cooling * temperature, sched.t_min);
  }
  return out;
}

OracleResult exhaustive_oracle(const ChannelRealization &chan, const CandidateSet &grid) {
  const std::size_t n = chan.h_ms.size();
  if (n == 0 || n > 3) throw std::invalid_argument("exhaustive_oracle: requires 1 <= N_S <= 3");
  const std::size_t per = grid.size();
  if (per == 0) throw std::invalid_argument("exhaustive_oracle: empty candidate grid");
  std::size_t total = 1;
  for (std::size_t e = 0; e < n; ++e) {
    total *= per;
    if (total > 1000000) throw std::invalid_argument("exhaustive_oracle: more than 1e6 combinations");
  }
  OracleResult best;
  best.metric = -1.0;
  StarRisState trial(n);
  for (std::size_t combo = 0; combo < total; ++combo) {
    // Element 0 is the most significant digit.
    std::size_t rest = combo;
    for (std::size_t e = n; e-- > 0;) {
      trial.set_element(e, candidate_at(grid, rest % per));
      rest /= per;
    }
    const double m = joint_metric(chan, trial);
    ++best.evaluations;
    if (m > best.metric) {
      best.metric = m;
      best.state = trial;
    }
  }
  return best;
}

}  // namespace uvaa
