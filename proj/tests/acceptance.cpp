// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance [--workdir DIR] [--only N]

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "scenekg/commands.hpp"
#include "scenekg/scenekg.hpp"
#include "support/oracles.hpp"
#include "support/run.hpp"
#include "support/snapshots.hpp"

using namespace scenekg;
namespace fs = std::filesystem;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// Tolerances.
constexpr double kC3RelTol = 1e-9;
constexpr double kC3SingleTol = 1e-9;
constexpr double kArclengthTol = 1e-6;
constexpr double kSelfCorrTol = 1e-12;
constexpr double kAntiCorrMax = -0.9;
constexpr double kMatcherSeconds = 60.0;
constexpr double kPlantedSeconds = 300.0;

// Collects failures for one criterion; the first few are printed.
struct Check {
  std::size_t failures = 0;
  std::vector<std::string> notes;
  void operator()(bool ok, const std::string& what) {
    if (ok) return;
    if (++failures <= 5) notes.push_back(what);
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

fs::path g_workdir;

fs::path fresh_dir(const std::string& name) {
  const fs::path d = g_workdir / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// ---------------------------------------------------------------------------

std::string criterion1(Check& check) {
  const auto start = Clock::now();
  std::mt19937_64 rng(500);
  const auto queries = catalog();
  std::size_t compared = 0;
  for (int i = 0; i < 500; ++i) {
    const SceneGraph g = oracle::random_graph(rng);
    check(g.node_count() <= 12, "graph over 12 nodes");
    for (const auto& q : queries) {
      const auto got = pattern::evaluate(q, g);
      const auto want = oracle::brute_evaluate(q, g);
      check(got.match_count == want.match_count && got.statement_counts == want.statement_counts &&
                got.root_involved == want.root_involved,
            "graph " + std::to_string(i) + " pattern " + q.name);
      ++compared;
    }
  }
  const double t = seconds_since(start);
  check(t < kMatcherSeconds, "took " + std::to_string(t) + " s");
  return std::to_string(compared) + " evaluations, " + std::to_string(t) + " s";
}

std::string criterion2(Check& check) {
  check(coverage(500, 1000) == 0.5, "coverage(500,1000)");
  check(coverage(2000, 1000) == 1.0, "coverage(2000,1000)");
  for (std::uint64_t n : {1u, 7u, 1000u}) check(coverage(0, n) == 0.0, "coverage(0,n)");
  std::mt19937_64 rng(2);
  const std::vector<std::uint64_t> grid{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t c = rng() % 20000;
    const std::uint64_t n = 1 + rng() % 20000;
    check(coverage(c, n) >= coverage(c, n + 1 + rng() % 100), "pair monotone");
    double prev = 1.0;
    for (std::uint64_t m : grid) {
      const double v = coverage(c, m);
      check(v <= prev && v >= 0.0, "grid monotone for c = " + std::to_string(c));
      prev = v;
    }
  }
  return "1000 random (c, n)";
}

Big big_c3(const SceneGraph& g, const ComplexityParams& params) {
  Big sum = 0;
  const Big half("0.5");
  for (NodeIndex i : g.nodes_of_kind(NodeKind::Object)) {
    const Node& n = g.node(i);
    const Pair d = *n.pair("distance");
    const Big t = params.type_constant(*n.text("object_type"));
    sum += (half * exp(-abs(Big(d.first))) + half * exp(-abs(Big(d.second)))) * log(1 + exp(t));
  }
  return Big(*g.node(g.ego()).number("velocity")) * sum;
}

std::string criterion3(Check& check) {
  std::mt19937_64 rng(31);
  const ComplexityParams params;
  double worst = 0.0;
  std::size_t nonzero = 0;
  for (int i = 0; i < 100; ++i) {
    const SceneGraph g = oracle::random_graph(rng);
    const Big want = big_c3(g, params);
    const double got = raw_c3(g, params);
    if (want == 0) {
      check(got == 0.0, "scene " + std::to_string(i) + " expected 0");
      continue;
    }
    ++nonzero;
    const double rel = static_cast<double>(abs((Big(got) - want) / want));
    worst = std::max(worst, rel);
    check(rel <= kC3RelTol, "scene " + std::to_string(i) + " rel " + std::to_string(rel));
  }
  SceneGraph one("one");
  one.add_node({"L", NodeKind::Lane, {{"speed_limit", 10.0}, {"length", 5.0}}});
  one.add_node({"ego", NodeKind::Ego, {{"velocity", 10.0}, {"dimensions", Pair{4.5, 1.9}}}});
  one.add_node({"o", NodeKind::Object,
                {{"object_type", std::string("unit")}, {"distance", Pair{0.0, 0.0}}, {"velocity", 0.0},
                 {"dimensions", Pair{1.0, 1.0}}}});
  one.add_edge("ego", EdgeKind::On, "L");
  one.add_edge("o", EdgeKind::On, "L");
  one.validate();
  ComplexityParams unit;
  unit.type_constants = {{"unit", 1.0}};
  const double single = raw_c3(one, unit);
  check(std::abs(single - 13.132616875) <= kC3SingleTol, "single object gave " + std::to_string(single));
  std::ostringstream s;
  s.precision(12);
  s << nonzero << " nonzero scenes, worst rel " << worst << ", single " << single;
  return s.str();
}

std::string criterion4(Check& check) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 500; ++i) {
    std::vector<RawComplexity> raws(1 + rng() % 30);
    for (auto& r : raws) r = {std::floor(u(rng)), std::floor(u(rng)), u(rng)};
    const auto cal = calibrate(raws);
    for (std::size_t c = 0; c < 3; ++c) {
      double lo = raws[0][c], hi = lo;
      for (const auto& r : raws) {
        lo = std::min(lo, r[c]);
        hi = std::max(hi, r[c]);
      }
      if (hi > lo) {
        check(normalize(lo, c, cal) == 0.0, "min -> 0");
        check(normalize(hi, c, cal) == 1.0, "max -> 1");
      } else {
        check(normalize(lo, c, cal) == 0.0, "degenerate -> 0");
      }
      const double far = u(rng) * 10;
      const double v = normalize(far, c, cal);
      check(v >= 0.0 && v <= 1.0, "clamp");
    }
  }
  const auto cal = calibrate({{2, 0, 0}, {10, 8, 4}});
  check(normalize(4, 0, cal) == 0.25, "interior 0.25 (c1)");
  check(normalize(2, 1, cal) == 0.25, "interior 0.25 (c2)");
  check(normalize(1, 2, cal) == 0.25, "interior 0.25 (c3)");
  check(normalize(-5, 0, cal) == 0.0 && normalize(50, 0, cal) == 1.0, "out of range clamps");
  const auto flat = calibrate({{3, 3, 3}, {3, 3, 3}});
  for (std::size_t c = 0; c < 3; ++c) check(normalize(3, c, flat) == 0.0, "degenerate corpus");
  return "500 random calibration corpora";
}

std::string criterion5(Check& check) {
  check(competence(1, 0) == 1.0, "competence(1,0)");
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 100; ++i) check(competence(u(rng), 1.0) == 0.0, "competence(x,1)");
  check(competence(0.5, 0.5) == 0.25, "competence(0.5,0.5)");
  int pairs = 0;
  while (pairs < 1000) {
    double a = u(rng), b = u(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const double cx = u(rng) * 0.999;
    const double cov = 0.001 + u(rng) * 0.999;
    check(competence(a, cx) < competence(b, cx), "increasing in coverage");
    check(competence(cov, a) > competence(cov, b), "decreasing in complexity");
    ++pairs;
  }
  return "1000 random pairs";
}

std::string criterion6(Check& check) {
  const fs::path dir = fresh_dir("planted");
  write_file(dir / "spec.json", R"({"seed": 2024, "scenes": 10000})");
  std::ostringstream log;
  const auto start = Clock::now();
  cli::GenerateOptions g;
  g.spec = dir / "spec.json";
  g.out = dir / "corpus.ndjson";
  g.jobs = 1;
  cli::cmd_generate(g, log);
  cli::AnalyzeOptions a;
  a.train = g.out;
  a.out_dir = dir / "analysis";
  a.jobs = 1;
  cli::cmd_analyze(a, log);
  const double t = seconds_since(start);

  const Json manifest = Json::parse(read_file(dir / "manifest.json"));
  const auto planted = manifest["signature_counts"].get<std::map<std::string, std::uint64_t>>();
  std::map<std::string, std::uint64_t> recovered;
  for (const auto& row : run::read_csv(a.out_dir / "counts.csv").rows)
    if (row.size() == 3 && row[0] == "composite") recovered[row[1]] = std::stoull(row[2]);
  for (const auto& [key, n] : planted)
    check(recovered.count(key) && recovered[key] == n, key + " planted " + std::to_string(n) + " recovered " +
                                                           std::to_string(recovered.count(key) ? recovered[key] : 0));
  for (const auto& [key, n] : recovered) check(planted.count(key), "unplanted signature " + key);
  const std::uint64_t unknown = planted.count("Unknown") ? planted.at("Unknown") : 0;
  const std::uint64_t lots = manifest["template_counts"].value("parking_lot", 0);
  check(lots > 0 && unknown >= lots, "Unknown accounting");
  check(t < kPlantedSeconds, "took " + std::to_string(t) + " s");
  return std::to_string(planted.size()) + " signatures, Unknown " + std::to_string(unknown) + " (parking lots " +
         std::to_string(lots) + "), " + std::to_string(t) + " s";
}

std::string criterion7(Check& check) {
  std::mt19937_64 rng(77);
  std::size_t lanes_checked = 0;
  for (int i = 0; i < 200; ++i) {
    const WorldSnapshot s = oracle::random_snapshot(rng, "a" + std::to_string(i));
    const SceneGraph g = build_scene(s).graph;
    const std::string tag = "snapshot " + std::to_string(i);
    auto segments_of = [&](const std::string& lane) {
      std::size_t n = 0;
      for (NodeIndex k : g.nodes_of_kind(NodeKind::Lane)) n += g.node(k).id.rfind(lane + "#", 0) == 0;
      return n;
    };
    for (NodeIndex n : g.nodes_of_kind(NodeKind::Lane)) {
      const double len = *g.node(n).number("length");
      check(len > 0.0 && len <= 10.0, tag + " segment length " + std::to_string(len));
    }
    for (const auto& group : s.map.groups) {
      std::set<std::size_t> counts;
      for (const auto& id : group.lanes)
        if (std::size_t c = segments_of(id)) counts.insert(c);
      check(counts.size() <= 1, tag + " group " + group.id + " uneven");
    }
    const geom::Vec2 ego{s.ego.pose.x, s.ego.pose.y};
    for (const auto& lane : s.map.lanes) {
      double total = 0.0;
      for (std::size_t j = 1; j < lane.centerline.size(); ++j)
        total += std::hypot(lane.centerline[j].x - lane.centerline[j - 1].x, lane.centerline[j].y - lane.centerline[j - 1].y);
      double walked = 0.0;
      geom::Vec2 mid = lane.centerline.front();
      for (std::size_t j = 1; j < lane.centerline.size(); ++j) {
        const geom::Vec2 p = lane.centerline[j - 1], q = lane.centerline[j];
        const double step = std::hypot(q.x - p.x, q.y - p.y);
        if (walked + step >= total / 2) {
          mid = p + (q - p) * ((total / 2 - walked) / step);
          break;
        }
        walked += step;
      }
      const bool inside = std::hypot(mid.x - ego.x, mid.y - ego.y) <= 50.0;
      const std::size_t k = segments_of(lane.id);
      if (!inside) {
        check(k == 0, tag + " lane " + lane.id + " outside radius kept");
        continue;
      }
      check(k > 0, tag + " lane " + lane.id + " inside radius dropped");
      double sum = 0.0;
      for (NodeIndex n : g.nodes_of_kind(NodeKind::Lane))
        if (g.node(n).id.rfind(lane.id + "#", 0) == 0) sum += *g.node(n).number("length");
      check(std::abs(sum - total) <= kArclengthTol, tag + " lane " + lane.id + " arclength");
      ++lanes_checked;
    }
    for (const auto& c : s.map.connectors)
      if (g.find(c.id)) check(geom::distance(center_of(c.centerline), ego) <= 50.0, tag + " connector outside radius");
    for (const auto& cw : s.map.crosswalks)
      if (g.find(cw.id)) check(geom::distance(geom::vertex_centroid(cw.polygon), ego) <= 50.0, tag + " crosswalk outside");
    check(g.nodes_of_kind(NodeKind::Ego).size() == 1 && g.has_root(), tag + " root");
  }
  return "200 snapshots, " + std::to_string(lanes_checked) + " lanes within radius";
}

std::string criterion8(Check& check) {
  for (const auto& q : catalog()) check(pattern::parse(pattern::unparse(q)) == q, "catalog " + q.name);
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto q = oracle::random_query(rng);
    try {
      check(pattern::parse(pattern::unparse(q)) == q, "ast " + std::to_string(i));
    } catch (const Error& e) {
      check(false, "ast " + std::to_string(i) + ": " + e.what());
    }
  }
  struct Case {
    const char* src;
    std::size_t line, column;
  };
  const Case cases[] = {
      {"", 1, 1},
      {"pattern", 1, 8},
      {"pattern p {", 1, 12},
      {"pattern p { }", 1, 13},
      {"pattern p {\n  match a:Lane);\n}", 2, 9},
      {"pattern p {\n  match (a:Lane)-[NEXT]>(b:Lane);\n}", 2, 24},
      {"pattern p {\n  match (a:Lane)\n}", 3, 1},
      {"pattern p {\n  match (a:Lane) where a.x in {};\n}", 2, 32},
      {"pattern p {\n  match (a:Lane) where a.x = \"open;\n}", 2, 30},
      {"pattern p {\n  match (a:Lane);\n  count();\n}", 3, 9},
      {"pattern p { match (a:Lane); } trailing", 1, 31},
      {"pattern match { }", 1, 9},
  };
  for (const Case& c : cases) {
    try {
      pattern::parse(c.src);
      check(false, std::string("no error for ") + c.src);
    } catch (const Error& e) {
      check(e.code() == Errc::SyntaxError && e.pos().line == c.line && e.pos().column == c.column && !e.expected().empty(),
            std::string(e.what()));
    }
  }
  return "catalog, 1000 ASTs, " + std::to_string(std::size(cases)) + " syntax errors";
}

struct PipelineOut {
  fs::path corpus, analysis, scoring;
};

PipelineOut pipeline(const fs::path& dir, std::uint64_t seed, std::size_t scenes) {
  write_file(dir / "spec.json", R"({"seed": )" + std::to_string(seed) + R"(, "scenes": )" + std::to_string(scenes) + "}");
  std::ostringstream log;
  cli::GenerateOptions g;
  g.spec = dir / "spec.json";
  g.out = dir / "corpus.ndjson";
  cli::cmd_generate(g, log);
  cli::AnalyzeOptions a;
  a.train = g.out;
  a.out_dir = dir / "analysis";
  cli::cmd_analyze(a, log);
  cli::ScoreOptions s;
  s.eval = g.out;
  s.model = a.out_dir / "model.json";
  s.out_dir = dir / "scoring";
  cli::cmd_score(s, log);
  return {g.out, a.out_dir, s.out_dir};
}

std::string criterion9(Check& check) {
  const fs::path dir = fresh_dir("correlate");
  const auto p = pipeline(dir, 5, 1000);
  const fs::path report = p.scoring / "report.csv";
  const auto [x, y] = run::noisy_metric(report, dir / "metric.csv", 0.1, 42);
  std::ostringstream out;
  cli::CorrelateOptions o;
  o.report = report;
  o.metric = dir / "metric.csv";
  const Correlation anti = cli::cmd_correlate(o, out);
  check(anti.r < kAntiCorrMax, "noisy r = " + std::to_string(anti.r));
  check(std::abs(anti.r - static_cast<double>(run::plain_pearson(x, y))) < 1e-9, "disagrees with plain formula");
  o.metric = report;
  o.column = "competence";
  const Correlation self = cli::cmd_correlate(o, out);
  check(std::abs(self.r - 1.0) <= kSelfCorrTol, "self r = " + std::to_string(self.r));
  std::ostringstream s;
  s.precision(12);
  s << "n = " << anti.n << ", noisy r = " << anti.r << ", self r = " << self.r;
  return s.str();
}

std::string criterion10(Check& check) {
  const fs::path a = fresh_dir("determinism_a"), b = fresh_dir("determinism_b");
  pipeline(a, 11, 2000);
  pipeline(b, 11, 2000);
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    check(fs::exists(b / rel) && read_file(entry.path()) == read_file(b / rel), rel.string() + " differs");
    ++files;
  }
  check(files >= 9, "only " + std::to_string(files) + " artifacts");
  return std::to_string(files) + " artifacts compared";
}

}  // namespace

int main(int argc, char** argv) {
  g_workdir = fs::temp_directory_path() / "scenekg_acceptance";
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--workdir" && i + 1 < argc) {
      g_workdir = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--workdir DIR] [--only N]\n";
      return 2;
    }
  }
  fs::create_directories(g_workdir);

  const std::vector<std::pair<std::string, std::function<std::string(Check&)>>> criteria{
      {"matcher equals brute-force oracle", criterion1},
      {"coverage values and monotonicity", criterion2},
      {"c3 against 50-digit evaluation", criterion3},
      {"normalization properties", criterion4},
      {"competence contract", criterion5},
      {"planted signature counts recovered (10000 scenes)", criterion6},
      {"scene builder rules (200 snapshots)", criterion7},
      {"pattern round-trips and syntax errors", criterion8},
      {"correlation plumbing", criterion9},
      {"pipeline determinism", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<std::size_t>(only) != i + 1) continue;
    Check check;
    std::string detail;
    try {
      detail = criteria[i].second(check);
    } catch (const std::exception& e) {
      check(false, std::string("exception: ") + e.what());
    }
    const bool ok = check.failures == 0;
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    for (const auto& n : check.notes) std::cout << "    " << n << "\n";
    if (check.failures > check.notes.size()) std::cout << "    ... " << check.failures << " failures\n";
    std::cout.flush();
  }
  return failed ? 1 : 0;
}
