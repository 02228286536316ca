// Copyright 2026 The uirs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file circuit_sim.hpp
 * Density-matrix simulation of noisy random Clifford sequences with an
 * interleaved channel, and sampling of shadow records.
 *
 * Layer i of a sequence applies Lambda_R, then U_{g_i}, then Lambda_L; the
 * interleaved channel sits between consecutive layers.
 */
#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uirs/channels.hpp"
#include "uirs/clifford.hpp"

namespace uirs {

enum class DataMode { Exact, Shots };

inline const char* to_string(DataMode m) { return m == DataMode::Exact ? "EXACT" : "SHOTS"; }

/// |0...0><0...0| on n qubits.
inline DenseOperator zero_state(int n) {
  const auto d = Eigen::Index{1} << n;
  DenseOperator rho = DenseOperator::Zero(d, d);
  rho(0, 0) = 1.0;
  return rho;
}

/// Computational-basis projectors |x><x|.
inline std::vector<DenseOperator> computational_povm(int n) {
  const auto d = Eigen::Index{1} << n;
  std::vector<DenseOperator> povm;
  for (Eigen::Index x = 0; x < d; ++x) {
    DenseOperator e = DenseOperator::Zero(d, d);
    e(x, x) = 1.0;
    povm.push_back(std::move(e));
  }
  return povm;
}

struct SequenceSpec {
  int n = 1;
  int m = 1;
  std::optional<Channel> interleave;
  NoiseModel noise = NoiseModel::ideal(1);
  DenseOperator rho = zero_state(1);
  std::vector<DenseOperator> povm = computational_povm(1);
  DataMode mode = DataMode::Exact;
  int shots = 1;

  /// Noiseless spec with nominal state and computational-basis POVM.
  static SequenceSpec nominal(int n, int m) {
    SequenceSpec s;
    s.n = n;
    s.m = m;
    s.noise = NoiseModel::ideal(n);
    s.rho = zero_state(n);
    s.povm = computational_povm(n);
    return s;
  }

  std::size_t dim() const { return std::size_t{1} << n; }

  bool computational_povm_in_use() const {
    if (povm.size() != dim()) return false;
    for (std::size_t x = 0; x < povm.size(); ++x) {
      DenseOperator e = DenseOperator::Zero(povm[x].rows(), povm[x].cols());
      e(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = 1.0;
      if ((povm[x] - e).cwiseAbs().maxCoeff() > 0.0) return false;
    }
    return true;
  }

  void validate() const {
    if (n < 1 || n > kMaxQubits) throw InvalidArgument("SequenceSpec: n must be in [1, 5]");
    if (m < 1) throw InvalidArgument("SequenceSpec: m must be at least 1");
    if (shots < 1) throw InvalidArgument("SequenceSpec: shots must be at least 1");
    const auto d = static_cast<Eigen::Index>(dim());
    if (rho.rows() != d || rho.cols() != d) throw DimensionMismatch("SequenceSpec: rho dimension");
    if (!is_hermitian(rho, 1e-10) || std::abs(rho.trace() - 1.0) > 1e-10) {
      throw InvalidArgument("SequenceSpec: rho must be Hermitian with unit trace");
    }
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw InvalidArgument("SequenceSpec: rho is not positive");
    DenseOperator total = DenseOperator::Zero(d, d);
    for (const auto& e : povm) {
      if (e.rows() != d || e.cols() != d) throw DimensionMismatch("SequenceSpec: POVM element dimension");
      Eigen::SelfAdjointEigenSolver<DenseOperator> ee(e, Eigen::EigenvaluesOnly);
      if (!is_hermitian(e, 1e-10) || ee.eigenvalues().minCoeff() < -1e-10) {
        throw InvalidArgument("SequenceSpec: POVM element is not positive");
      }
      total += e;
    }
    if ((total - DenseOperator::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
      throw InvalidArgument("SequenceSpec: POVM elements do not sum to the identity");
    }
    noise.validate();
    if (interleave && interleave->num_qubits() != n) {
      throw DimensionMismatch("SequenceSpec: interleaved channel has the wrong qubit count");
    }
  }
};

struct ShadowRecord {
  std::vector<CliffordElement> gates;
  std::vector<int> outcomes;
  std::optional<std::vector<double>> exact_probs;
};

/// Runs the noisy circuit for `gates` and returns the final density matrix
/// before the measurement-noise channel.
inline DenseOperator propagate_state(const SequenceSpec& spec,
                                     const std::vector<CliffordElement>& gates) {
  if (static_cast<int>(gates.size()) != spec.m) {
    throw InvalidArgument("outcome_distribution: expected " + std::to_string(spec.m) +
                          " gates, got " + std::to_string(gates.size()));
  }
  DenseOperator state = spec.noise.spam_prep.apply(spec.rho);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (i > 0 && spec.interleave) state = spec.interleave->apply(state);
    state = spec.noise.right.apply(state);
    state = gates[i].apply_to(state);
    state = spec.noise.left.apply(state);
  }
  return state;
}

/// p(x | gates) for the noisy circuit.
inline std::vector<double> outcome_distribution(const SequenceSpec& spec,
                                                const std::vector<CliffordElement>& gates) {
  const DenseOperator state = spec.noise.spam_meas.apply(propagate_state(spec, gates));
  std::vector<double> p(spec.povm.size());
  const bool diag = spec.povm.size() == spec.dim() && spec.computational_povm_in_use();
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    double v = diag ? state(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)).real()
                    : trace_product_real(spec.povm[x], state);
    if (v < -1e-12) {
      throw SimulationIntegrityError("outcome_distribution: probability " + std::to_string(v) +
                                     " for outcome " + std::to_string(x));
    }
    if (v < 0.0) v = 0.0;
    p[x] = v;
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw SimulationIntegrityError("outcome_distribution: probabilities sum to " +
                                   std::to_string(total));
  }
  return p;
}

/// Inverse-CDF draw from a normalized distribution.
inline int sample_outcome(const std::vector<double>& p, RandomStream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    acc += p[x];
    if (u < acc) return static_cast<int>(x);
  }
  for (std::size_t x = p.size(); x-- > 0;) {
    if (p[x] > 0.0) return static_cast<int>(x);
  }
  return 0;
}

using GateSampler = std::function<CliffordElement(int n, RandomStream& rng)>;

inline CliffordElement uniform_gate(int n, RandomStream& rng) { return random_clifford(n, rng); }

/// Record for sequence `index`: gates and shots come from their own
/// substreams of (seed, index), independent of all other sequences.
inline ShadowRecord sample_record(const SequenceSpec& spec, std::uint64_t seed, std::uint64_t index,
                                  const GateSampler& sampler = uniform_gate) {
  auto gate_rng = RandomStream::derive(seed, "gates", index);
  auto shot_rng = RandomStream::derive(seed, "shots", index);
  ShadowRecord rec;
  rec.gates.reserve(static_cast<std::size_t>(spec.m));
  for (int i = 0; i < spec.m; ++i) rec.gates.push_back(sampler(spec.n, gate_rng));
  auto p = outcome_distribution(spec, rec.gates);
  rec.outcomes.reserve(static_cast<std::size_t>(spec.shots));
  for (int k = 0; k < spec.shots; ++k) rec.outcomes.push_back(sample_outcome(p, shot_rng));
  if (spec.mode == DataMode::Exact) rec.exact_probs = std::move(p);
  return rec;
}

/// S records with indices first_index .. first_index + S - 1.
inline std::vector<ShadowRecord> sample_shadows(const SequenceSpec& spec, std::size_t S,
                                                std::uint64_t seed, std::uint64_t first_index = 0,
                                                const GateSampler& sampler = uniform_gate) {
  if (S < 1) throw InvalidArgument("sample_shadows: S must be at least 1");
  spec.validate();
  std::vector<ShadowRecord> out;
  out.reserve(S);
  for (std::size_t i = 0; i < S; ++i) out.push_back(sample_record(spec, seed, first_index + i, sampler));
  return out;
}

// Line-delimited JSON: {"gates": [[row, ...], ...], "outcomes": [...], "probs": [...]}.

inline nlohmann::json record_to_json(const ShadowRecord& r) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : r.gates) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : g.tableau_rows()) rows.push_back(p.str());
    gates.push_back(std::move(rows));
  }
  nlohmann::json j = {{"gates", std::move(gates)}, {"outcomes", r.outcomes}};
  if (r.exact_probs) j["probs"] = *r.exact_probs;
  return j;
}

inline ShadowRecord record_from_json(const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key != "gates" && key != "outcomes" && key != "probs") {
      throw InvalidArgument("shadow record: unknown field '" + key + "'");
    }
  }
  ShadowRecord r;
  for (const auto& g : j.at("gates")) {
    std::vector<PauliString> rows;
    for (const auto& s : g) rows.push_back(PauliString::parse(s.get<std::string>()));
    r.gates.push_back(CliffordElement::from_tableau_rows(rows));
  }
  r.outcomes = j.at("outcomes").get<std::vector<int>>();
  if (j.contains("probs")) r.exact_probs = j.at("probs").get<std::vector<double>>();
  return r;
}

inline void write_records(std::ostream& os, const std::vector<ShadowRecord>& records) {
  for (const auto& r : records) os << record_to_json(r).dump() << '\n';
}

inline std::vector<ShadowRecord> read_records(std::istream& is) {
  std::vector<ShadowRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace uirs
