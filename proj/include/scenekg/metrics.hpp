#pragma once
// Coverage, static complexity (environment, obstacles, dynamic entities) and
// competence, plus the corpus-level index and calibration they rely on.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scenekg/error.hpp"
#include "scenekg/scene_model.hpp"
#include "scenekg/subscene_catalog.hpp"

namespace scenekg {

enum class NPolicy : std::uint8_t { Fixed, MeanOfComposites };

inline std::string_view to_string(NPolicy p) noexcept {
  return p == NPolicy::Fixed ? "fixed" : "mean_of_composites";
}

inline NPolicy parse_n_policy(std::string_view s) {
  if (s == "fixed") return NPolicy::Fixed;
  if (s == "mean_of_composites") return NPolicy::MeanOfComposites;
  throw Error(Errc::InvalidConfig, "unknown n_policy '" + std::string(s) + "'");
}

struct CoverageIndex {
  std::map<std::string, std::uint64_t> counts;  // signature key -> c(s)
  std::uint64_t n = 1;
  NPolicy n_policy = NPolicy::MeanOfComposites;

  std::uint64_t count(const std::string& key) const {
    auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
  }
};

/// min(n, c) / n.
inline double coverage(std::uint64_t c, std::uint64_t n) {
  if (n == 0) throw Error(Errc::InvalidConfig, "n must be >= 1");
  return static_cast<double>(std::min(n, c)) / static_cast<double>(n);
}

inline double coverage(const CoverageIndex& index, const std::string& key) {
  return coverage(index.count(key), index.n);
}

inline double coverage(const CoverageIndex& index, const SubsceneSignature& sig) {
  return coverage(index, sig.key());
}

/// Mean count over the non-Unknown keys, rounded half up; at least 1.
inline std::uint64_t mean_of_composites(const std::map<std::string, std::uint64_t>& counts) {
  std::uint64_t sum = 0;
  std::uint64_t keys = 0;
  for (const auto& [key, c] : counts) {
    if (key == kUnknownSignature) continue;
    sum += c;
    ++keys;
  }
  if (keys == 0) return 1;
  // floor((2 * sum + keys) / (2 * keys)) == floor(sum / keys + 1/2)
  return std::max<std::uint64_t>(1, (2 * sum + keys) / (2 * keys));
}

/// Builds the index from per-scene signature keys. `fixed_n` > 0 selects the
/// fixed policy.
inline CoverageIndex build_index(const std::vector<std::string>& keys, std::uint64_t fixed_n = 0) {
  CoverageIndex index;
  for (const auto& k : keys) ++index.counts[k];
  if (fixed_n > 0) {
    index.n_policy = NPolicy::Fixed;
    index.n = fixed_n;
  } else {
    index.n_policy = NPolicy::MeanOfComposites;
    index.n = mean_of_composites(index.counts);
  }
  return index;
}

// ---------------------------------------------------------------------------
// Complexity

struct ComplexityParams {
  std::map<std::string, double, std::less<>> type_constants{
      {"vehicle", 0.5}, {"bicycle", 0.8}, {"pedestrian", 1.0}};
  double default_type_constant = 0.5;
  std::set<std::string, std::less<>> obstacle_types{"generic_object", "traffic_cone", "barrier"};

  double type_constant(std::string_view type) const {
    auto it = type_constants.find(type);
    return it == type_constants.end() ? default_type_constant : it->second;
  }

  friend bool operator==(const ComplexityParams&, const ComplexityParams&) = default;
};

/// Distinct node-kind names together with distinct object types.
inline double raw_c1(const SceneGraph& g) {
  std::set<std::string, std::less<>> labels;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    const Node& n = g.node(i);
    labels.emplace(to_string(n.kind));
    if (n.kind == NodeKind::Object)
      if (auto type = n.text("object_type")) labels.emplace(*type);
  }
  return static_cast<double>(labels.size());
}

/// Objects whose type is an obstacle type.
inline double raw_c2(const SceneGraph& g, const ComplexityParams& params = {}) {
  std::size_t n = 0;
  for (NodeIndex i : g.nodes_of_kind(NodeKind::Object))
    if (params.obstacle_types.contains(g.node(i).text("object_type").value_or(""))) ++n;
  return static_cast<double>(n);
}

/// One object's term: (0.5 e^-|x| + 0.5 e^-|z|) ln(1 + e^t).
inline double dynamic_term(double x, double z, double type_constant) {
  return (0.5 * std::exp(-std::abs(x)) + 0.5 * std::exp(-std::abs(z))) * std::log1p(std::exp(type_constant));
}

/// Ego speed times the sum of dynamic_term over all objects.
inline double raw_c3(const SceneGraph& g, const ComplexityParams& params = {}) {
  double v_ego = 0.0;
  for (NodeIndex i : g.nodes_of_kind(NodeKind::Ego)) v_ego = g.node(i).number("velocity").value_or(0.0);
  double sum = 0.0;
  for (NodeIndex i : g.nodes_of_kind(NodeKind::Object)) {
    const Node& n = g.node(i);
    const Pair d = n.pair("distance").value_or(Pair{});
    sum += dynamic_term(d.first, d.second, params.type_constant(n.text("object_type").value_or("")));
  }
  return v_ego * sum;
}

using RawComplexity = std::array<double, 3>;

inline RawComplexity raw_complexity(const SceneGraph& g, const ComplexityParams& params = {}) {
  return {raw_c1(g), raw_c2(g, params), raw_c3(g, params)};
}

struct ComplexityCalibration {
  std::array<double, 3> min{0.0, 0.0, 0.0};
  std::array<double, 3> max{0.0, 0.0, 0.0};

  friend bool operator==(const ComplexityCalibration&, const ComplexityCalibration&) = default;
};

inline ComplexityCalibration calibrate(const std::vector<RawComplexity>& raws) {
  if (raws.empty()) throw Error(Errc::EmptyCorpus, "calibration needs at least one scene");
  ComplexityCalibration cal{raws.front(), raws.front()};
  for (const auto& r : raws) {
    for (std::size_t i = 0; i < 3; ++i) {
      cal.min[i] = std::min(cal.min[i], r[i]);
      cal.max[i] = std::max(cal.max[i], r[i]);
    }
  }
  return cal;
}

/// Min-max normalization of component `i`, clamped to [0, 1]; 0 when the
/// calibration range is empty.
inline double normalize(double raw, std::size_t i, const ComplexityCalibration& cal) {
  const double lo = cal.min.at(i);
  const double hi = cal.max.at(i);
  if (!(hi > lo)) return 0.0;
  return std::clamp((raw - lo) / (hi - lo), 0.0, 1.0);
}

inline double complexity(double c1, double c2, double c3) { return (c1 + c2 + c3) / 3.0; }

inline double competence(double coverage, double complexity) { return coverage * (1.0 - complexity); }

struct CompetenceReport {
  std::string scene_id;
  std::string signature;
  double coverage = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double complexity = 0.0;
  double competence = 0.0;
};

inline CompetenceReport score_scene(const std::string& scene_id, const std::string& signature_key,
                                    const RawComplexity& raw, const CoverageIndex& index,
                                    const ComplexityCalibration& cal) {
  CompetenceReport r;
  r.scene_id = scene_id;
  r.signature = signature_key;
  r.coverage = coverage(index, signature_key);
  r.c1 = normalize(raw[0], 0, cal);
  r.c2 = normalize(raw[1], 1, cal);
  r.c3 = normalize(raw[2], 2, cal);
  r.complexity = complexity(r.c1, r.c2, r.c3);
  r.competence = competence(r.coverage, r.complexity);
  return r;
}

/// Everything scoring needs from training.
struct Model {
  CoverageIndex index;
  ComplexityCalibration calibration;
  ComplexityParams params;
  std::string catalog_hash;
};

}  // namespace scenekg
