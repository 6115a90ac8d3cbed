#include <boost/multiprecision/cpp_bin_float.hpp>
#include <random>

#include "scenekg/metrics.hpp"
#include "scenekg/stats.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace scenekg;
using namespace th;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

SceneGraph with_objects(double v_ego, const std::vector<Node>& objects) {
  SceneGraph g("m");
  g.add_node(lane("L"));
  g.add_node(ego(v_ego));
  g.add_edge("ego", EdgeKind::On, "L");
  for (const auto& o : objects) {
    g.add_node(o);
    g.add_edge(o.id, EdgeKind::On, "L");
  }
  g.validate();
  return g;
}

// c3 evaluated in 50-digit arithmetic straight from the formula.
Big big_c3(const SceneGraph& g, const ComplexityParams& params) {
  Big sum = 0;
  for (NodeIndex i : g.nodes_of_kind(NodeKind::Object)) {
    const Node& n = g.node(i);
    const Pair d = *n.pair("distance");
    const Big t = params.type_constant(*n.text("object_type"));
    const Big half("0.5");
    sum += (half * exp(-abs(Big(d.first))) + half * exp(-abs(Big(d.second)))) * log(1 + exp(t));
  }
  return Big(*g.node(g.ego()).number("velocity")) * sum;
}

}  // namespace

// ---------------------------------------------------------------------------
// coverage

TEST(Coverage, Examples) {
  EXPECT_EQ(coverage(500, 1000), 0.5);
  EXPECT_EQ(coverage(2000, 1000), 1.0);
  EXPECT_EQ(coverage(0, 7), 0.0);
  const CoverageIndex idx = build_index({"a", "a", "b"}, 4);
  EXPECT_EQ(coverage(idx, "unseen"), 0.0);
  EXPECT_EQ(coverage(idx, "a"), 0.5);
  EXPECT_EQ(coverage(idx, SubsceneSignature::from_key("b")), 0.25);
  EXPECT_ERRC(coverage(1, 0), Errc::InvalidConfig);
}

TEST(Coverage, MeanOfComposites) {
  std::vector<std::string> keys(40, "straight_road");
  keys.insert(keys.end(), 10, "on_intersection");
  keys.insert(keys.end(), 99, "Unknown");
  const CoverageIndex idx = build_index(keys);
  EXPECT_EQ(idx.n, 25u);
  EXPECT_EQ(idx.n_policy, NPolicy::MeanOfComposites);
  EXPECT_EQ(idx.count("Unknown"), 99u);
  // Half rounds up; never below 1.
  EXPECT_EQ(mean_of_composites({{"a", 1}, {"b", 2}}), 2u);
  EXPECT_EQ(mean_of_composites({{"a", 1}, {"b", 1}, {"c", 2}}), 1u);
  EXPECT_EQ(mean_of_composites({{"Unknown", 5}}), 1u);
  EXPECT_EQ(mean_of_composites({}), 1u);
}

TEST(Property, CoverageMonotone) {
  std::mt19937_64 rng(2);
  const std::vector<std::uint64_t> grid{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 5000};
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t c = rng() % 3000;
    double prev = 2.0;
    for (std::uint64_t n : grid) {
      const double v = coverage(c, n);
      EXPECT_LE(v, prev);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      EXPECT_LE(coverage(c, n), coverage(c + 1 + rng() % 10, n));
      prev = v;
    }
  }
}

// ---------------------------------------------------------------------------
// raw components

TEST(RawC1, Examples) {
  EXPECT_EQ(raw_c1(with_objects(1, {})), 2.0);
  EXPECT_EQ(raw_c1(with_objects(1, {object("a", "vehicle"), object("b", "pedestrian"), object("c", "vehicle")})), 5.0);
  SceneGraph g("ego_only");
  g.add_node(ego());
  EXPECT_EQ(raw_c1(g), 1.0);
  // An object type spelled like a kind is counted once.
  EXPECT_EQ(raw_c1(with_objects(1, {object("a", "Lane")})), 3.0);
}

TEST(RawC2, Examples) {
  EXPECT_EQ(raw_c2(with_objects(1, {object("a", "traffic_cone"), object("b", "traffic_cone"), object("c", "traffic_cone"),
                                    object("d", "vehicle"), object("e", "vehicle")})),
            3.0);
  EXPECT_EQ(raw_c2(with_objects(1, {})), 0.0);
  EXPECT_EQ(raw_c2(with_objects(1, {object("a", "barrier"), object("b", "generic_object"), object("c", "pedestrian")})), 2.0);
}

TEST(RawC3, Examples) {
  EXPECT_EQ(raw_c3(with_objects(10, {})), 0.0);
  EXPECT_EQ(raw_c3(with_objects(0, {object("a", "vehicle", 0, 0)})), 0.0);
  ComplexityParams p;
  p.type_constants = {{"unit", 1.0}};
  // 10 ln(1 + e), evaluated to 40 digits with mpmath.
  EXPECT_NEAR(raw_c3(with_objects(10, {object("a", "unit", 0, 0)}), p), 13.132616875182228, 1e-9);
  // Three objects, mixed constants, also mpmath.
  ComplexityParams q;
  q.type_constants = {{"A", 0.5}, {"B", 1.0}, {"C", 0.8}};
  const auto g = with_objects(7.25, {object("a", "A", 3.5, -1.25), object("b", "B", -12, 0.75), object("c", "C", 0.1, 0.2)});
  EXPECT_NEAR(raw_c3(g, q), 10.684009997611194, 1e-9 * 10.684);
}

TEST(RawC3, DefaultConstantForUnlistedTypes) {
  ComplexityParams p;
  p.default_type_constant = 2.0;
  EXPECT_DOUBLE_EQ(raw_c3(with_objects(1, {object("a", "tram", 0, 0)}), p), std::log1p(std::exp(2.0)));
}

TEST(Property, RawC3MatchesHighPrecision) {
  std::mt19937_64 rng(31);
  const ComplexityParams params;
  for (int i = 0; i < 100; ++i) {
    const SceneGraph g = oracle::random_graph(rng);
    const Big want = big_c3(g, params);
    const double got = raw_c3(g, params);
    if (want == 0) {
      EXPECT_EQ(got, 0.0);
    } else {
      EXPECT_LE(abs((Big(got) - want) / want), Big("1e-9")) << i;
    }
  }
}

TEST(Property, RawC3AdditiveAndDecaying) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-15, 15), v(0.5, 30);
  const char* types[] = {"vehicle", "pedestrian", "bicycle", "barrier"};
  for (int i = 0; i < 300; ++i) {
    const double speed = v(rng);
    std::vector<Node> a, b;
    for (int k = 0; k < 3; ++k) a.push_back(object("a" + std::to_string(k), types[rng() % 4], d(rng), d(rng)));
    for (int k = 0; k < 2; ++k) b.push_back(object("b" + std::to_string(k), types[rng() % 4], d(rng), d(rng)));
    std::vector<Node> both = a;
    both.insert(both.end(), b.begin(), b.end());
    const double sum = raw_c3(with_objects(speed, a)) + raw_c3(with_objects(speed, b));
    EXPECT_NEAR(raw_c3(with_objects(speed, both)), sum, 1e-12 * std::max(1.0, sum));

    // Push one object further away along x or z.
    std::vector<Node> moved = both;
    Pair p = std::get<Pair>(moved[0].attrs["distance"]);
    const double step = 0.01 + std::abs(d(rng)) / 10;
    if (rng() % 2) {
      p.first = std::copysign(std::abs(p.first) + step, p.first);
    } else {
      p.second = std::copysign(std::abs(p.second) + step, p.second);
    }
    moved[0].attrs["distance"] = p;
    EXPECT_LT(raw_c3(with_objects(speed, moved)), raw_c3(with_objects(speed, both)));
  }
}

// ---------------------------------------------------------------------------
// calibration and normalization

TEST(Calibrate, Examples) {
  const auto cal = calibrate({{2, 0, 1}, {4, 0, 3}, {10, 0, 2}});
  EXPECT_EQ(cal.min[0], 2.0);
  EXPECT_EQ(cal.max[0], 10.0);
  EXPECT_EQ(normalize(5.0, 1, cal), 0.0);  // degenerate component
  const auto single = calibrate({{3, 3, 3}});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(normalize(3.0, i, single), 0.0);
  EXPECT_ERRC(calibrate({}), Errc::EmptyCorpus);
}

TEST(Normalize, Examples) {
  const auto cal = calibrate({{2, 1, 0.5}, {10, 5, 8.5}});
  EXPECT_EQ(normalize(2, 0, cal), 0.0);
  EXPECT_EQ(normalize(10, 0, cal), 1.0);
  EXPECT_EQ(normalize(4, 0, cal), 0.25);
  EXPECT_EQ(normalize(2.5, 2, cal), 0.25);
  EXPECT_EQ(normalize(-100, 1, cal), 0.0);
  EXPECT_EQ(normalize(100, 1, cal), 1.0);
}

TEST(Property, NormalizationOverRandomCorpora) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 500; ++i) {
    std::vector<RawComplexity> raws(1 + rng() % 20);
    for (auto& r : raws) r = {std::round(u(rng)), std::round(u(rng)), u(rng)};
    const auto cal = calibrate(raws);
    for (std::size_t c = 0; c < 3; ++c) {
      double lo = raws[0][c], hi = raws[0][c];
      for (const auto& r : raws) {
        lo = std::min(lo, r[c]);
        hi = std::max(hi, r[c]);
      }
      EXPECT_EQ(cal.min[c], lo);
      EXPECT_EQ(cal.max[c], hi);
      if (hi > lo) {
        EXPECT_EQ(normalize(lo, c, cal), 0.0);
        EXPECT_EQ(normalize(hi, c, cal), 1.0);
      } else {
        EXPECT_EQ(normalize(lo, c, cal), 0.0);
      }
      const double x = normalize(u(rng) * 3, c, cal);
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

// ---------------------------------------------------------------------------
// complexity and competence

TEST(Complexity, Examples) {
  EXPECT_EQ(complexity(0, 0, 0), 0.0);
  EXPECT_EQ(complexity(1, 1, 1), 1.0);
  EXPECT_DOUBLE_EQ(complexity(0.2, 0.4, 0.9), 0.5);
}

TEST(Competence, Examples) {
  EXPECT_EQ(competence(1, 0), 1.0);
  for (double c : {0.0, 0.3, 1.0}) EXPECT_EQ(competence(c, 1), 0.0);
  EXPECT_EQ(competence(0.5, 0.5), 0.25);
}

TEST(Property, CompetenceMonotone) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    double a = u(rng), b = u(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const double cx = u(rng) * 0.999;
    const double cov = 0.001 + u(rng) * 0.999;
    EXPECT_LT(competence(a, cx), competence(b, cx));
    EXPECT_GT(competence(cov, a), competence(cov, b));
    EXPECT_GE(competence(a, b), 0.0);
    EXPECT_LE(competence(b, a), 1.0);
  }
}

TEST(ScoreScene, ReportFields) {
  const CoverageIndex idx = build_index({"x", "x", "y"}, 4);
  const auto cal = calibrate({{1, 0, 0}, {5, 4, 8}});
  const auto r = score_scene("s1", "x", {3, 1, 10}, idx, cal);
  EXPECT_EQ(r.coverage, 0.5);
  EXPECT_EQ(r.c1, 0.5);
  EXPECT_EQ(r.c2, 0.25);
  EXPECT_EQ(r.c3, 1.0);
  EXPECT_DOUBLE_EQ(r.complexity, 1.75 / 3);
  EXPECT_EQ(r.competence, r.coverage * (1 - r.complexity));
  const auto unseen = score_scene("s2", "z", {3, 1, 10}, idx, cal);
  EXPECT_EQ(unseen.coverage, 0.0);
  EXPECT_EQ(unseen.competence, 0.0);
}

// ---------------------------------------------------------------------------
// statistics

TEST(Pearson, AgainstScipy) {
  // Reference values from scipy.stats.pearsonr.
  auto a = pearson({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {2.1, 3.9, 6.2, 7.8, 10.1, 12.2, 13.8, 16.1, 18.0, 20.2});
  EXPECT_NEAR(a.r, 0.9996697883603309, 1e-12);
  EXPECT_NEAR(a.p_value, 5.199666229082367e-14, 1e-20);
  auto b = pearson({0.5, 1.7, 2.2, 3.9, 4.1, 5.5, 6.0}, {3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0});
  EXPECT_NEAR(b.r, 0.3657433055233733, 1e-12);
  EXPECT_NEAR(b.p_value, 0.41977644965694744, 1e-10);
  auto c = pearson({1, 2, 3}, {1, 3, 2});
  EXPECT_NEAR(c.r, 0.5, 1e-12);
  EXPECT_NEAR(c.p_value, 2.0 / 3.0, 1e-10);
  EXPECT_EQ(c.n, 3u);
}

TEST(Pearson, Errors) {
  EXPECT_ERRC(pearson({1, 2}, {2, 1}), Errc::InsufficientOverlap);
  EXPECT_ERRC(pearson({1, 2, 3}, {1, 2}), Errc::InsufficientOverlap);
  EXPECT_ERRC(pearson({1, 1, 1}, {1, 2, 3}), Errc::ZeroVariance);
}

TEST(Pearson, SelfAndNegated) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(200), neg(200);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = u(rng);
    neg[i] = -x[i];
  }
  EXPECT_NEAR(pearson(x, x).r, 1.0, 1e-12);
  EXPECT_NEAR(pearson(x, neg).r, -1.0, 1e-12);
  EXPECT_EQ(pearson(x, x).p_value, 0.0);
}

TEST(Quantile, MatchesNumpyDefault) {
  const std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6};
  EXPECT_DOUBLE_EQ(quantile(v, 0.05), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 3.5);
  EXPECT_DOUBLE_EQ(quantile(v, 0.95), 7.95);
  EXPECT_EQ(quantile({}, 0.5), 0.0);
}
