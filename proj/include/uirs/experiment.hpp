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
 * @file experiment.hpp
 * Configured experiment runner: JSON config, protocol dispatch, CSV output.
 */
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uirs/fitting.hpp"
#include "uirs/oracle_suite.hpp"
#include "uirs/parallel.hpp"
#include "uirs/theory.hpp"

namespace uirs {

inline constexpr const char* kVersion = "0.1.0";

/// Pauli word placed on explicit sites, e.g. {"word": "Y", "sites": [2]}.
struct PauliSpec {
  std::string word;
  std::vector<int> sites;

  PauliString on(int n) const {
    std::string full(static_cast<std::size_t>(n), 'I');
    for (std::size_t i = 0; i < sites.size(); ++i) full[static_cast<std::size_t>(sites[i])] = word[i];
    return PauliString::parse(full);
  }
};

struct NoiseStrengths {
  double gate_left = 0.0;
  double gate_right = 0.0;
  double spam_prep = 0.0;
  double spam_meas = 0.0;

  NoiseModel model(int n) const { return NoiseModel::depolarizing(n, gate_left, gate_right, spam_prep, spam_meas); }
};

struct ExperimentConfig {
  std::string protocol;
  int n = 3;
  std::vector<int> m_list;  // empty: {1, 2} for OTOC, {1..8} for unitarity
  std::size_t S = 20000;
  std::vector<std::size_t> S_list;
  std::size_t N = 50;
  int r = 1;
  DataMode mode = DataMode::Exact;
  IsingParams ising;
  double t = 1.0;
  std::vector<double> t_list;
  std::optional<PauliSpec> V;
  std::optional<PauliSpec> W;
  NoiseStrengths noise;
  std::vector<double> p_list;
  std::optional<std::string> interleave;  // "ising" or "none"
  std::optional<std::vector<double>> weights;
  std::uint64_t master_seed = 1;
  std::string output_path;
  std::string records_path;

  bool is_otoc() const {
    return protocol == "otoc-converge" || protocol == "otoc-vs-time" || protocol == "spam-compare";
  }
  OtocObservables observables() const {
    if (!V && !W) return OtocObservables::standard(n);
    const auto std_obs = OtocObservables::standard(n);
    return {V ? V->on(n) : std_obs.V, W ? W->on(n) : std_obs.W};
  }
  std::vector<int> effective_m_list() const {
    if (!m_list.empty()) return m_list;
    if (protocol == "unitarity") return {1, 2, 3, 4, 5, 6, 7, 8};
    return {1, 2};
  }
  bool interleaves_ising() const { return interleave ? *interleave == "ising" : is_otoc(); }
  IsingParams ising_params() const {
    IsingParams p = ising;
    p.n = n;
    return p;
  }
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& path, const std::string& what) {
  throw ConfigError("config" + path + ": " + what);
}

inline void reject_unknown(const nlohmann::json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) config_fail(path, "must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : keys) ok = ok || k == a;
    if (!ok) config_fail(path + "." + k, "unknown key");
  }
}

template <class T>
T get_as(const nlohmann::json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    config_fail(path, "has the wrong type");
  }
}

inline double get_number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) config_fail(path, "must be a number");
  return j.get<double>();
}

inline std::size_t get_count(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    config_fail(path, "must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

inline double get_probability(const nlohmann::json& j, const std::string& path) {
  const double p = get_number(j, path);
  if (!(p >= 0.0 && p <= 1.0)) config_fail(path, "must be in [0, 1]");
  return p;
}

inline PauliSpec parse_pauli_spec(const nlohmann::json& j, const std::string& path, int n) {
  reject_unknown(j, path, {"word", "sites"});
  if (!j.contains("word") || !j.contains("sites")) config_fail(path, "needs 'word' and 'sites'");
  PauliSpec p;
  p.word = get_as<std::string>(j.at("word"), path + ".word");
  p.sites = get_as<std::vector<int>>(j.at("sites"), path + ".sites");
  if (p.word.size() != p.sites.size() || p.word.empty()) {
    config_fail(path, "'word' and 'sites' must have the same nonzero length");
  }
  std::set<int> seen;
  for (int s : p.sites) {
    if (s < 0 || s >= n) config_fail(path + ".sites", "site " + std::to_string(s) + " out of range");
    if (!seen.insert(s).second) config_fail(path + ".sites", "repeated site");
  }
  for (char c : p.word) {
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') config_fail(path + ".word", "letters must be I, X, Y or Z");
  }
  if (p.on(n).is_identity()) config_fail(path, "must not be the identity");
  return p;
}

}  // namespace detail

/// Parses and validates a config document; errors name the offending path.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using namespace detail;
  reject_unknown(j, "", {"protocol", "n", "m_list", "S", "S_list", "N", "r", "mode", "ising", "t", "t_list", "V",
                         "W", "noise", "p_list", "interleave", "weights", "master_seed", "output_path",
                         "records_path"});
  ExperimentConfig c;
  if (!j.contains("protocol")) config_fail(".protocol", "is required");
  c.protocol = get_as<std::string>(j.at("protocol"), ".protocol");
  if (!c.is_otoc() && c.protocol != "unitarity" && c.protocol != "oracle-check") {
    config_fail(".protocol", "unknown protocol '" + c.protocol + "'");
  }
  if (j.contains("n")) c.n = static_cast<int>(get_count(j.at("n"), ".n"));
  if (c.n < 1 || c.n > kMaxQubits) config_fail(".n", "must be in [1, 5]");
  if (c.is_otoc() && c.n < 2 && !(j.contains("V") && j.contains("W"))) {
    config_fail(".n", "the default V and W need at least two qubits");
  }
  if (j.contains("m_list")) {
    c.m_list = get_as<std::vector<int>>(j.at("m_list"), ".m_list");
    if (c.m_list.empty()) config_fail(".m_list", "must be nonempty");
    for (int m : c.m_list) {
      if (m < 1) config_fail(".m_list", "entries must be at least 1");
    }
  }
  if (c.is_otoc()) {
    const auto ms = c.effective_m_list();
    if (ms.size() != 2 || ms[1] != ms[0] + 1) config_fail(".m_list", "OTOC protocols need two consecutive lengths");
  }
  if (c.protocol == "unitarity") {
    const auto ms = c.effective_m_list();
    const std::set<int> distinct(ms.begin(), ms.end());
    if (distinct.size() < 3) config_fail(".m_list", "the unitarity fit needs at least three distinct lengths");
    if (!std::is_sorted(ms.begin(), ms.end()) || distinct.size() != ms.size()) {
      config_fail(".m_list", "must be strictly increasing");
    }
  }
  if (j.contains("S")) c.S = get_count(j.at("S"), ".S");
  if (c.S < 2) config_fail(".S", "must be at least 2");
  if (j.contains("S_list")) {
    for (std::size_t i = 0; i < j.at("S_list").size(); ++i) {
      const auto path = ".S_list[" + std::to_string(i) + "]";
      c.S_list.push_back(get_count(j.at("S_list").at(i), path));
      if (c.S_list.back() < 2) config_fail(path, "must be at least 2");
    }
    if (c.S_list.empty()) config_fail(".S_list", "must be nonempty");
  }
  if (j.contains("N")) c.N = get_count(j.at("N"), ".N");
  if (c.N < 2) config_fail(".N", "must be at least 2");
  if (j.contains("r")) c.r = static_cast<int>(get_count(j.at("r"), ".r"));
  if (c.r < 1) config_fail(".r", "must be at least 1");
  if (j.contains("mode")) {
    const auto mode = get_as<std::string>(j.at("mode"), ".mode");
    if (mode == "EXACT") {
      c.mode = DataMode::Exact;
    } else if (mode == "SHOTS") {
      c.mode = DataMode::Shots;
    } else {
      config_fail(".mode", "must be EXACT or SHOTS");
    }
  }
  if (c.protocol == "unitarity" && c.mode == DataMode::Shots && c.r < 2) {
    config_fail(".r", "SHOTS-mode unitarity needs at least two shots per sequence");
  }
  if (j.contains("ising")) {
    const auto& is = j.at("ising");
    reject_unknown(is, ".ising", {"J0", "alpha", "B", "Dmax", "disorder_seed"});
    if (is.contains("J0")) c.ising.J0 = get_number(is.at("J0"), ".ising.J0");
    if (is.contains("alpha")) c.ising.alpha = get_number(is.at("alpha"), ".ising.alpha");
    if (is.contains("B")) c.ising.B = get_number(is.at("B"), ".ising.B");
    if (is.contains("Dmax")) c.ising.Dmax = get_number(is.at("Dmax"), ".ising.Dmax");
    if (c.ising.Dmax < 0.0) config_fail(".ising.Dmax", "must be non-negative");
    if (is.contains("disorder_seed")) c.ising.disorder_seed = get_count(is.at("disorder_seed"), ".ising.disorder_seed");
  }
  if (j.contains("t")) c.t = get_number(j.at("t"), ".t");
  if (j.contains("t_list")) {
    for (std::size_t i = 0; i < j.at("t_list").size(); ++i) {
      c.t_list.push_back(get_number(j.at("t_list").at(i), ".t_list[" + std::to_string(i) + "]"));
    }
    if (c.t_list.empty()) config_fail(".t_list", "must be nonempty");
  }
  if (j.contains("V")) c.V = parse_pauli_spec(j.at("V"), ".V", c.n);
  if (j.contains("W")) c.W = parse_pauli_spec(j.at("W"), ".W", c.n);
  if (j.contains("noise")) {
    const auto& no = j.at("noise");
    reject_unknown(no, ".noise", {"gate_left", "gate_right", "spam_prep", "spam_meas"});
    if (no.contains("gate_left")) c.noise.gate_left = get_probability(no.at("gate_left"), ".noise.gate_left");
    if (no.contains("gate_right")) c.noise.gate_right = get_probability(no.at("gate_right"), ".noise.gate_right");
    if (no.contains("spam_prep")) c.noise.spam_prep = get_probability(no.at("spam_prep"), ".noise.spam_prep");
    if (no.contains("spam_meas")) c.noise.spam_meas = get_probability(no.at("spam_meas"), ".noise.spam_meas");
  }
  if (j.contains("p_list")) {
    for (std::size_t i = 0; i < j.at("p_list").size(); ++i) {
      c.p_list.push_back(get_probability(j.at("p_list").at(i), ".p_list[" + std::to_string(i) + "]"));
    }
    if (c.p_list.empty()) config_fail(".p_list", "must be nonempty");
  }
  if (j.contains("interleave")) {
    c.interleave = get_as<std::string>(j.at("interleave"), ".interleave");
    if (*c.interleave != "ising" && *c.interleave != "none") config_fail(".interleave", "must be 'ising' or 'none'");
    if (c.is_otoc() && *c.interleave != "ising") config_fail(".interleave", "OTOC protocols interleave the Ising evolution");
  }
  if (j.contains("weights")) {
    c.weights = get_as<std::vector<double>>(j.at("weights"), ".weights");
    if (c.weights->size() != (std::size_t{1} << c.n)) config_fail(".weights", "needs one weight per outcome (2^n)");
  }
  if (j.contains("master_seed")) c.master_seed = get_count(j.at("master_seed"), ".master_seed");
  if (j.contains("output_path")) c.output_path = get_as<std::string>(j.at("output_path"), ".output_path");
  if (c.output_path.empty() && c.protocol != "oracle-check") config_fail(".output_path", "is required");
  if (j.contains("records_path")) c.records_path = get_as<std::string>(j.at("records_path"), ".records_path");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

/// Ten equally spaced timestamps t_max/10, 2 t_max/10, ..., t_max.
inline std::vector<double> ten_timestamps(double t_max) {
  std::vector<double> out;
  for (int k = 1; k <= 10; ++k) out.push_back(t_max * k / 10.0);
  return out;
}

/// Seed of sweep point `index` for purpose `tag`.
inline std::uint64_t point_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
  return RandomStream::derive(master, tag, index)();
}

/// One OTOC ratio measurement: N batches of S records at lengths m and m+1.
struct OtocRun {
  DenseOperator u_t;
  OtocObservables obs{PauliString::parse("Y"), PauliString::parse("X")};
  NoiseModel noise = NoiseModel::ideal(1);
  int m = 1;
  std::size_t S = 1000;
  std::size_t N = 10;
  DataMode mode = DataMode::Exact;
  int shots = 1;
  std::uint64_t seed = 0;
};

/// Batch-by-batch ratio estimate. Records are summarized as they are
/// simulated, so memory stays O(S). Deterministic for any worker count.
/// When `keep` is given, batch 0's records are appended to it.
inline RatioEstimate run_otoc_ratio(const OtocRun& run, std::size_t workers,
                                    std::vector<ShadowRecord>* keep = nullptr) {
  const int n = run.obs.num_qubits();
  std::array<SequenceSpec, 2> specs;
  std::array<std::uint64_t, 2> seeds{};
  for (int k = 0; k < 2; ++k) {
    auto& s = specs[static_cast<std::size_t>(k)];
    s = SequenceSpec::nominal(n, run.m + k);
    s.interleave = unitary_channel(run.u_t);
    s.noise = run.noise;
    s.mode = run.mode;
    s.shots = run.shots;
    s.validate();
    seeds[static_cast<std::size_t>(k)] = RandomStream::derive(run.seed, "length", static_cast<std::uint64_t>(run.m + k))();
  }
  std::vector<std::pair<double, double>> k12;
  std::vector<OtocSummary> sums(run.S);
  std::vector<ShadowRecord> kept;
  for (std::size_t b = 0; b < run.N; ++b) {
    std::array<double, 2> k{};
    for (std::size_t idx = 0; idx < 2; ++idx) {
      const auto& spec = specs[idx];
      const bool keeping = keep != nullptr && b == 0;
      if (keeping) kept.assign(run.S, ShadowRecord{});
      parallel_for(run.S, workers, [&](std::size_t i) {
        auto rec = sample_record(spec, seeds[idx], b * run.S + i);
        sums[i] = summarize_otoc(rec, spec.m, run.obs, spec.rho, spec.povm, run.mode);
        if (keeping) kept[i] = std::move(rec);
      });
      if (keeping) keep->insert(keep->end(), kept.begin(), kept.end());
      k[idx] = khat_otoc_from_summaries(sums, spec.m, run.obs).value;
    }
    k12.emplace_back(k[0], k[1]);
  }
  return otoc_ratio_from_batches(k12, n);
}

/// Identical-sequence unitarity series k(m) for each m, S sequences each.
inline EstimateSeries run_unitarity_series(int n, const std::vector<int>& m_list, std::size_t S,
                                           const NoiseModel& noise, const std::optional<Channel>& interleave,
                                           const OutcomeWeights& weights, DataMode mode, int shots,
                                           std::uint64_t seed, std::size_t workers,
                                           std::vector<ShadowRecord>* keep = nullptr) {
  EstimateSeries series;
  series.S = S;
  series.N = 1;
  series.r = shots;
  series.mode = mode;
  for (int m : m_list) {
    auto spec = SequenceSpec::nominal(n, m);
    spec.noise = noise;
    spec.interleave = interleave;
    spec.mode = mode;
    spec.shots = shots;
    spec.validate();
    const auto s = RandomStream::derive(seed, "length", static_cast<std::uint64_t>(m))();
    std::vector<ShadowRecord> recs(S);
    parallel_for(S, workers, [&](std::size_t i) { recs[i] = sample_record(spec, s, i); });
    series.add(m, khat_identical_unitarity(recs, m, weights, mode));
    if (keep != nullptr) keep->insert(keep->end(), recs.begin(), recs.end());
  }
  return series;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write output file '" + path + "'");
  return out;
}

inline void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("failed writing output file '" + path + "'");
}

}  // namespace detail

/// Runs one configured experiment and writes its CSV. Returns the process
/// exit status; progress goes to `log`.
inline int run_experiment(const ExperimentConfig& c, std::size_t workers, std::ostream& log) {
  if (c.protocol == "oracle-check") {
    return oracles::report(oracles::run_all(c.master_seed), log) == 0 ? 0 : 1;
  }
  const auto ms = c.effective_m_list();
  std::vector<ShadowRecord> kept;
  std::vector<ShadowRecord>* keep = c.records_path.empty() ? nullptr : &kept;
  auto out = detail::open_output(c.output_path);
  using detail::fmt;

  if (c.is_otoc()) {
    const auto h = build_ising(c.ising_params());
    const auto obs = c.observables();
    auto base_run = [&](double t) {
      OtocRun run;
      run.u_t = evolve(h, t);
      run.obs = obs;
      run.noise = c.noise.model(c.n);
      run.m = ms[0];
      run.S = c.S;
      run.N = c.N;
      run.mode = c.mode;
      run.shots = c.r;
      return run;
    };
    auto exact_at = [&](const DenseOperator& u) {
      return decay_otoc(u, obs.V, obs.W) / static_cast<double>(std::size_t{1} << c.n);
    };
    if (c.protocol == "otoc-converge") {
      const auto sizes = c.S_list.empty() ? std::vector<std::size_t>{c.S} : c.S_list;
      out << "S,xbar,stderr,exact\n";
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        auto run = base_run(c.t);
        run.S = sizes[i];
        run.seed = point_seed(c.master_seed, "otoc-converge", i);
        const auto est = run_otoc_ratio(run, workers, i == 0 ? keep : nullptr);
        out << sizes[i] << ',' << fmt(est.xbar) << ',' << fmt(est.stderr) << ',' << fmt(exact_at(run.u_t)) << '\n';
        log << "S=" << sizes[i] << " xbar=" << est.xbar << " stderr=" << est.stderr << '\n';
      }
    } else if (c.protocol == "otoc-vs-time") {
      const auto ts = c.t_list.empty() ? ten_timestamps(c.t) : c.t_list;
      out << "t,xbar,stderr,exact\n";
      for (std::size_t i = 0; i < ts.size(); ++i) {
        auto run = base_run(ts[i]);
        run.seed = point_seed(c.master_seed, "otoc-vs-time", i);
        const auto est = run_otoc_ratio(run, workers, i == 0 ? keep : nullptr);
        out << fmt(ts[i]) << ',' << fmt(est.xbar) << ',' << fmt(est.stderr) << ',' << fmt(exact_at(run.u_t)) << '\n';
        log << "t=" << ts[i] << " xbar=" << est.xbar << " stderr=" << est.stderr << '\n';
      }
    } else {
      const auto ps = c.p_list.empty() ? std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4, 0.5} : c.p_list;
      out << "p,uirs,baseline,exact\n";
      // Common random numbers across the sweep: every p reuses the same seeds.
      const auto seed = point_seed(c.master_seed, "spam-compare", 0);
      for (std::size_t i = 0; i < ps.size(); ++i) {
        auto run = base_run(c.t);
        auto strengths = c.noise;
        strengths.spam_prep = ps[i];
        strengths.spam_meas = ps[i];
        run.noise = strengths.model(c.n);
        run.seed = seed;
        const auto est = run_otoc_ratio(run, workers, i == 0 ? keep : nullptr);
        const auto base = baseline_statistical_otoc(run.u_t, obs, run.noise, c.S * c.N,
                                                    RandomStream::derive(seed, "baseline")());
        out << fmt(ps[i]) << ',' << fmt(est.xbar) << ',' << fmt(base.value) << ',' << fmt(exact_at(run.u_t)) << '\n';
        log << "p=" << ps[i] << " uirs=" << est.xbar << " baseline=" << base.value << '\n';
      }
    }
  } else {
    std::optional<Channel> inter;
    if (c.interleaves_ising()) inter = unitary_channel(evolve(build_ising(c.ising_params()), c.t));
    const auto weights = c.weights ? OutcomeWeights{*c.weights} : OutcomeWeights::z_on_qubit(c.n, 0);
    const auto series = run_unitarity_series(c.n, ms, c.S, c.noise.model(c.n), inter, weights, c.mode, c.r,
                                             point_seed(c.master_seed, "unitarity", 0), workers, keep);
    out << "m,khat,stderr\n";
    for (const auto& p : series.points) out << p.m << ',' << fmt(p.value) << ',' << fmt(p.stderr) << '\n';
    const auto fit = fit_offset_decay(to_fit_points(series));
    const auto fit_path = (std::filesystem::path(c.output_path).parent_path() / "fit.json").string();
    auto fj = detail::open_output(fit_path);
    nlohmann::ordered_json doc = {{"a", fit.get("a")}, {"b", fit.get("b")}, {"u", fit.get("u")},
                                  {"residual", fit.residual}};
    fj << doc.dump(2) << '\n';
    detail::finish_output(fj, fit_path);
    log << "u=" << fit.get("u") << " residual=" << fit.residual << '\n';
  }
  detail::finish_output(out, c.output_path);
  if (keep != nullptr) {
    auto rf = detail::open_output(c.records_path);
    write_records(rf, kept);
    detail::finish_output(rf, c.records_path);
  }
  return 0;
}

}  // namespace uirs
