#pragma once
// The CLI subcommands as library functions. Each returns normally on success
// and throws scenekg::Error otherwise; exit_code() maps errors to the
// process exit status.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "scenekg/config.hpp"
#include "scenekg/corpus.hpp"
#include "scenekg/error.hpp"
#include "scenekg/generator.hpp"
#include "scenekg/json_io.hpp"
#include "scenekg/metrics.hpp"
#include "scenekg/parallel.hpp"
#include "scenekg/scene_builder.hpp"
#include "scenekg/stats.hpp"
#include "scenekg/subscene_catalog.hpp"
#include "scenekg/util.hpp"

namespace scenekg::cli {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "scenekg 1.0.0";
inline constexpr std::size_t kChunk = 1024;

/// 2 for problems with how the tool was invoked (flags, config, spec,
/// unreadable inputs, pattern files), 1 for problems in the data.
inline int exit_code(Errc c) {
  switch (c) {
    case Errc::IoError:
    case Errc::InvalidConfig:
    case Errc::InvalidSpec:
    case Errc::SyntaxError:
    case Errc::UnboundVariable:
    case Errc::UnknownKind:
    case Errc::DuplicatePatternName:
    case Errc::UnknownMarkLabel: return 2;
    default: return 1;
  }
}

inline AppConfig config_or_default(const std::optional<fs::path>& path) {
  return path ? load_config(*path) : AppConfig{};
}

inline std::string hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
  std::uint64_t h = kFnvOffset;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a64(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
  }
  return hex64(h);
}

inline Json file_entry(const fs::path& path) {
  return {{"file", path.filename().string()}, {"fnv1a64", hash_file(path)}};
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(Errc::IoError, "cannot create output directory '" + dir.string() + "'");
}

/// Number rounded to the 9 significant digits used in every artifact.
inline double round9(double v) { return std::stod(fmt9(v)); }

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  fs::path spec;
  fs::path out;
  std::optional<fs::path> manifest;  // default: manifest.json beside `out`
  std::optional<fs::path> config;
  std::size_t jobs = 1;
};

inline void cmd_generate(const GenerateOptions& o, std::ostream& log) {
  Json spec_json;
  try {
    spec_json = Json::parse(read_file(o.spec));
  } catch (const Json::exception& e) {
    throw Error(Errc::InvalidSpec, "spec is not valid JSON: " + std::string(e.what()));
  }
  const gen::GeneratorSpec spec = gen::spec_from_json(spec_json);
  const AppConfig cfg = config_or_default(o.config);
  if (!cfg.catalog.pattern_sources.empty())
    throw Error(Errc::InvalidConfig, "generate plants signatures of the builtin catalog; pattern_files is not supported");

  CorpusWriter writer(o.out);
  std::map<std::string, std::uint64_t> template_counts;
  std::map<std::string, std::uint64_t> signature_counts;
  Json entries = Json::array();
  for (std::size_t start = 0; start < spec.scenes; start += kChunk) {
    const std::size_t n = std::min(kChunk, spec.scenes - start);
    std::vector<std::string> lines(n);
    std::vector<gen::GeneratedScene> scenes(n);
    parallel_for(n, o.jobs, [&](std::size_t i) {
      scenes[i] = gen::generate_scene(spec, start + i, cfg.catalog, cfg.build);
      BuildResult built = build_scene(scenes[i].snapshot, cfg.build);
      if (!built.dropped_actors.empty())
        throw Error(Errc::InvalidSpec, "generator placed an actor off the map in " + scenes[i].snapshot.scene_id);
      lines[i] = scene_line(built.graph);
    });
    for (std::size_t i = 0; i < n; ++i) {
      writer.write_line(lines[i]);
      const std::string tmpl(gen::to_string(scenes[i].kind));
      const std::string key = scenes[i].planted.key();
      ++template_counts[tmpl];
      ++signature_counts[key];
      entries.push_back({{"scene_id", scenes[i].snapshot.scene_id}, {"template", tmpl}, {"signature", key}});
    }
  }
  const Json manifest{{"seed", spec.seed},
                      {"scene_count", spec.scenes},
                      {"template_counts", template_counts},
                      {"signature_counts", signature_counts},
                      {"scenes", entries}};
  const fs::path manifest_path = o.manifest ? *o.manifest : o.out.parent_path() / "manifest.json";
  write_file(manifest_path, manifest.dump(2) + "\n");
  log << "generated " << spec.scenes << " scenes -> " << o.out.string() << " (manifest " << manifest_path.string() << ")\n";
}

// ---------------------------------------------------------------------------
// build

struct BuildOptions {
  std::vector<fs::path> snapshots;
  fs::path out;
  std::optional<fs::path> config;
};

/// Snapshot documents in a file: one object, an array, or one per line.
inline std::vector<Json> read_snapshot_docs(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<Json> docs;
  try {
    Json whole = Json::parse(text);
    if (whole.is_array()) {
      for (auto& d : whole) docs.push_back(std::move(d));
    } else {
      docs.push_back(std::move(whole));
    }
    return docs;
  } catch (const Json::exception&) {
  }
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      docs.push_back(Json::parse(line));
    } catch (const Json::exception& e) {
      throw Error(Errc::SchemaViolation, path.filename().string() + ": " + e.what(), {no, 0});
    }
  }
  return docs;
}

inline void cmd_build(const BuildOptions& o, std::ostream& log) {
  const AppConfig cfg = config_or_default(o.config);
  CorpusWriter writer(o.out);
  std::size_t count = 0;
  for (const auto& path : o.snapshots) {
    for (const Json& doc : read_snapshot_docs(path)) {
      BuildResult r = build_scene(snapshot_from_json(doc), cfg.build);
      for (const auto& id : r.dropped_actors)
        log << "warning: " << r.graph.scene_id() << ": actor '" << id << "' overlaps no segment, dropped\n";
      writer.write(r.graph);
      ++count;
    }
  }
  log << "built " << count << " scenes -> " << o.out.string() << "\n";
}

// ---------------------------------------------------------------------------
// analyze / score shared pass

struct SceneFacts {
  std::string scene_id;
  std::string signature;
  RawComplexity raw{};
};

/// Signature and raw complexity of every scene, sorted by scene id.
inline std::vector<SceneFacts> scan_corpus(const fs::path& path, const std::vector<pattern::PatternQuery>& catalog,
                                           const ComplexityParams& params, std::size_t jobs) {
  std::vector<SceneFacts> facts;
  CorpusReader reader(path);
  std::vector<SceneGraph> chunk;
  auto flush = [&] {
    const std::size_t base = facts.size();
    facts.resize(base + chunk.size());
    parallel_for(chunk.size(), jobs, [&](std::size_t i) {
      facts[base + i] = {chunk[i].scene_id(), signature(chunk[i], catalog).key(), raw_complexity(chunk[i], params)};
    });
    chunk.clear();
  };
  SceneGraph g;
  while (reader.next(g)) {
    chunk.push_back(std::move(g));
    if (chunk.size() == kChunk) flush();
  }
  flush();
  std::stable_sort(facts.begin(), facts.end(), [](const SceneFacts& a, const SceneFacts& b) { return a.scene_id < b.scene_id; });
  return facts;
}

inline std::vector<std::string> pattern_names(const std::vector<pattern::PatternQuery>& catalog) {
  std::vector<std::string> names;
  for (const auto& q : catalog) names.push_back(q.name);
  std::sort(names.begin(), names.end());
  return names;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  fs::path train;
  std::optional<fs::path> config;
  fs::path out_dir;
  std::optional<std::uint64_t> n;  // overrides n_policy
  std::size_t jobs = 1;
};

inline void cmd_analyze(const AnalyzeOptions& o, std::ostream& log) {
  const AppConfig cfg = config_or_default(o.config);
  const auto queries = catalog(cfg.catalog);
  const auto facts = scan_corpus(o.train, queries, cfg.complexity, o.jobs);
  if (facts.empty()) throw Error(Errc::EmptyCorpus, "training corpus '" + o.train.filename().string() + "' has no scenes");
  if (o.n && *o.n == 0) throw Error(Errc::InvalidConfig, "--n must be >= 1");

  std::vector<std::string> keys;
  std::vector<RawComplexity> raws;
  for (const auto& f : facts) {
    keys.push_back(f.signature);
    raws.push_back(f.raw);
  }
  const std::uint64_t fixed = o.n ? *o.n : (cfg.n_policy == NPolicy::Fixed ? cfg.n : 0);
  Model model{build_index(keys, fixed), calibrate(raws), cfg.complexity, catalog_hash(queries)};

  ensure_dir(o.out_dir);
  write_file(o.out_dir / "model.json", to_json(model).dump(2) + "\n");

  std::string counts = "kind,name,count\n";
  for (const auto& name : pattern_names(queries)) {
    std::uint64_t c = 0;
    for (const auto& [key, n] : model.index.counts)
      if (SubsceneSignature::from_key(key).contains(name)) c += n;
    counts += "subscene," + name + "," + std::to_string(c) + "\n";
  }
  for (const auto& [key, n] : model.index.counts) counts += "composite," + key + "," + std::to_string(n) + "\n";
  write_file(o.out_dir / "counts.csv", counts);

  std::string curve = "signature";
  for (std::uint64_t n : cfg.n_grid) curve += ",n=" + std::to_string(n);
  curve += "\n";
  for (const auto& [key, c] : model.index.counts) {
    curve += key;
    for (std::uint64_t n : cfg.n_grid) curve += "," + fmt9(coverage(c, n));
    curve += "\n";
  }
  curve += "mean_over_scenes";
  for (std::uint64_t n : cfg.n_grid) {
    double sum = 0.0;
    for (const auto& [key, c] : model.index.counts) sum += static_cast<double>(c) * coverage(c, n);
    curve += "," + fmt9(sum / static_cast<double>(facts.size()));
  }
  curve += "\n";
  write_file(o.out_dir / "coverage_curve.csv", curve);

  Json inputs{{"train", file_entry(o.train)}};
  if (o.config) inputs["config"] = file_entry(*o.config);
  const Json manifest{{"tool", kToolVersion},
                      {"command", "analyze"},
                      {"inputs", inputs},
                      {"config_hash", config_hash(cfg)},
                      {"catalog_hash", model.catalog_hash},
                      {"n_override", o.n ? Json(*o.n) : Json(nullptr)},
                      {"scenes", facts.size()},
                      {"outputs", {"model.json", "counts.csv", "coverage_curve.csv"}}};
  write_file(o.out_dir / "run_manifest.json", manifest.dump(2) + "\n");
  log << "analyzed " << facts.size() << " scenes, " << model.index.counts.size() << " signatures, n = " << model.index.n
      << " -> " << o.out_dir.string() << "\n";
}

// ---------------------------------------------------------------------------
// score

struct ScoreOptions {
  fs::path eval;
  fs::path model;
  std::optional<fs::path> config;
  fs::path out_dir;
  std::size_t jobs = 1;
};

inline Model load_model(const fs::path& path) {
  try {
    return model_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw Error(Errc::SchemaViolation, "model '" + path.filename().string() + "': " + e.what());
  }
}

inline Json distribution(std::vector<double> values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(std::max<std::size_t>(1, values.size()));
  return {{"min", round9(quantile(values, 0.0))},    {"q05", round9(quantile(values, 0.05))},
          {"q25", round9(quantile(values, 0.25))},   {"median", round9(quantile(values, 0.5))},
          {"q75", round9(quantile(values, 0.75))},   {"q95", round9(quantile(values, 0.95))},
          {"max", round9(quantile(values, 1.0))},    {"mean", round9(mean)}};
}

inline std::vector<CompetenceReport> cmd_score(const ScoreOptions& o, std::ostream& log) {
  const AppConfig cfg = config_or_default(o.config);
  const Model model = load_model(o.model);
  const auto queries = catalog(cfg.catalog);
  const std::string hash = catalog_hash(queries);
  if (hash != model.catalog_hash)
    throw Error(Errc::CatalogMismatch, "model was trained with catalog " + model.catalog_hash + ", current catalog is " + hash);
  const auto facts = scan_corpus(o.eval, queries, model.params, o.jobs);

  std::vector<CompetenceReport> reports;
  std::string csv = "scene_id,signature,coverage,c1,c2,c3,complexity,competence\n";
  for (const auto& f : facts) {
    const CompetenceReport r = score_scene(f.scene_id, f.signature, f.raw, model.index, model.calibration);
    csv += r.scene_id + "," + r.signature + "," + fmt9(r.coverage) + "," + fmt9(r.c1) + "," + fmt9(r.c2) + "," +
           fmt9(r.c3) + "," + fmt9(r.complexity) + "," + fmt9(r.competence) + "\n";
    reports.push_back(r);
  }
  ensure_dir(o.out_dir);
  write_file(o.out_dir / "report.csv", csv);

  std::vector<double> c1, c2, c3, cx, comp;
  std::vector<std::uint64_t> histogram(10, 0);
  for (const auto& r : reports) {
    c1.push_back(r.c1);
    c2.push_back(r.c2);
    c3.push_back(r.c3);
    cx.push_back(r.complexity);
    comp.push_back(r.competence);
    ++histogram[std::min<std::size_t>(9, static_cast<std::size_t>(r.complexity * 10.0))];
  }
  const Json summary{{"scenes", reports.size()},
                     {"c1", distribution(c1)},
                     {"c2", distribution(c2)},
                     {"c3", distribution(c3)},
                     {"complexity", distribution(cx)},
                     {"competence", distribution(comp)},
                     {"complexity_histogram", {{"bin_width", 0.1}, {"counts", histogram}}}};
  write_file(o.out_dir / "complexity_summary.json", summary.dump(2) + "\n");

  Json inputs{{"eval", file_entry(o.eval)}, {"model", file_entry(o.model)}};
  if (o.config) inputs["config"] = file_entry(*o.config);
  const Json manifest{{"tool", kToolVersion},
                      {"command", "score"},
                      {"inputs", inputs},
                      {"config_hash", config_hash(cfg)},
                      {"catalog_hash", hash},
                      {"scenes", reports.size()},
                      {"outputs", {"report.csv", "complexity_summary.json"}}};
  write_file(o.out_dir / "run_manifest.json", manifest.dump(2) + "\n");
  log << "scored " << reports.size() << " scenes -> " << o.out_dir.string() << "\n";
  return reports;
}

// ---------------------------------------------------------------------------
// correlate

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name, const fs::path& source) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw Error(Errc::SchemaViolation, "'" + source.filename().string() + "' has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

inline Table read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  Table t;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw Error(Errc::SchemaViolation, "'" + path.filename().string() + "' row has " + std::to_string(fields.size()) +
                                             " fields, header has " + std::to_string(t.header.size()),
                  {no, 0});
    t.rows.push_back(std::move(fields));
  }
  return t;
}

inline double csv_number(const std::string& s, const fs::path& source) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw Error(Errc::SchemaViolation, "'" + source.filename().string() + "': '" + s + "' is not a number");
  return v;
}

struct CorrelateOptions {
  fs::path report;
  fs::path metric;
  std::string column;  // metric column; empty = first column other than scene_id
  std::string report_column = "competence";
};

inline Correlation cmd_correlate(const CorrelateOptions& o, std::ostream& out) {
  const Table report = read_csv(o.report);
  const Table metric = read_csv(o.metric);
  const std::size_t rid = report.column("scene_id", o.report);
  const std::size_t rval = report.column(o.report_column, o.report);
  const std::size_t mid = metric.column("scene_id", o.metric);
  std::size_t mval = 0;
  if (!o.column.empty()) {
    mval = metric.column(o.column, o.metric);
  } else {
    mval = mid == 0 ? 1 : 0;
    if (mval >= metric.header.size()) throw Error(Errc::SchemaViolation, "metric file has no value column");
  }
  std::map<std::string, double> metric_by_id;
  for (const auto& row : metric.rows)
    if (!metric_by_id.emplace(row[mid], csv_number(row[mval], o.metric)).second)
      throw Error(Errc::SchemaViolation, "metric file repeats scene_id '" + row[mid] + "'");
  std::vector<std::pair<std::string, double>> joined_report;
  for (const auto& row : report.rows) joined_report.emplace_back(row[rid], csv_number(row[rval], o.report));
  std::sort(joined_report.begin(), joined_report.end());
  std::vector<double> x, y;
  for (const auto& [id, v] : joined_report) {
    auto it = metric_by_id.find(id);
    if (it == metric_by_id.end()) continue;
    x.push_back(v);
    y.push_back(it->second);
  }
  const Correlation c = pearson(x, y);
  out << "n = " << c.n << "\n";
  out << "r = " << fmt9(c.r) << "\n";
  out << "p_value = " << fmt9(c.p_value) << "\n";
  return c;
}

// ---------------------------------------------------------------------------
// patterns check

struct PatternsOptions {
  std::optional<fs::path> config;
  bool print = false;
};

inline void cmd_patterns_check(const PatternsOptions& o, std::ostream& out) {
  const AppConfig cfg = config_or_default(o.config);
  const auto queries = catalog(cfg.catalog);
  for (const auto& q : queries) {
    if (o.print) {
      out << pattern::unparse(q);
    } else {
      out << q.name << "\n";
    }
  }
  out << queries.size() << " patterns ok, catalog hash " << catalog_hash(queries) << "\n";
}

}  // namespace scenekg::cli
