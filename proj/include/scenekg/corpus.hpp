#pragma once
// Newline-delimited JSON corpora: one SceneDocument per line.

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "scenekg/error.hpp"
#include "scenekg/json_io.hpp"
#include "scenekg/scene_model.hpp"

namespace scenekg {

/// Streams scenes from a corpus file, holding one line at a time.
class CorpusReader {
 public:
  explicit CorpusReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(Errc::IoError, "cannot open corpus '" + path.string() + "'");
  }

  /// Reads the next scene; false at end of file. Blank lines are skipped.
  /// Any problem with a line is reported as SchemaViolation at that line.
  bool next(SceneGraph& out) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
      Json doc;
      try {
        doc = Json::parse(text);
      } catch (const Json::exception& e) {
        throw Error(Errc::SchemaViolation, "malformed JSON: " + std::string(e.what()), {line_, 0});
      }
      try {
        out = scene_from_json(doc);
      } catch (const Error& e) {
        std::string where;
        if (doc.is_object() && doc.contains("scene_id") && doc["scene_id"].is_string())
          where = "scene '" + doc["scene_id"].get<std::string>() + "': ";
        throw Error(Errc::SchemaViolation, where + e.what(), {line_, 0});
      } catch (const Json::exception& e) {
        throw Error(Errc::SchemaViolation, e.what(), {line_, 0});
      }
      return true;
    }
    if (in_.bad()) throw Error(Errc::IoError, "read error in '" + path_.string() + "'");
    return false;
  }

  std::size_t line() const noexcept { return line_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

inline void for_each_scene(const std::filesystem::path& path, const std::function<void(SceneGraph&&)>& fn) {
  CorpusReader reader(path);
  SceneGraph g;
  while (reader.next(g)) fn(std::move(g));
}

inline std::vector<SceneGraph> load_corpus(const std::filesystem::path& path) {
  std::vector<SceneGraph> out;
  for_each_scene(path, [&](SceneGraph&& g) { out.push_back(std::move(g)); });
  return out;
}

inline std::string scene_line(const SceneGraph& g) { return to_json(g).dump() + "\n"; }

class CorpusWriter {
 public:
  explicit CorpusWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(Errc::IoError, "cannot open '" + path.string() + "' for writing");
  }

  void write(const SceneGraph& g) { write_line(scene_line(g)); }

  void write_line(const std::string& line) {
    out_ << line;
    if (!out_) throw Error(Errc::IoError, "write to '" + path_.string() + "' failed");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

inline void save_corpus(const std::filesystem::path& path, const std::vector<SceneGraph>& scenes) {
  CorpusWriter w(path);
  for (const auto& g : scenes) w.write(g);
}

}  // namespace scenekg
