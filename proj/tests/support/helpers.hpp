#pragma once

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "scenekg/error.hpp"
#include "scenekg/scene_model.hpp"

#define EXPECT_ERRC(stmt, errc)                                                      \
  do {                                                                               \
    try {                                                                            \
      stmt;                                                                          \
      ADD_FAILURE() << "expected " << scenekg::to_string(errc) << ", nothing thrown"; \
    } catch (const scenekg::Error& e_) {                                             \
      EXPECT_EQ(e_.code(), errc) << e_.what();                                       \
    }                                                                                \
  } while (0)

namespace th {

using namespace scenekg;

inline Node lane(const std::string& id, double speed = 13.9, double length = 10.0) {
  return {id, NodeKind::Lane, {{"speed_limit", speed}, {"length", length}}};
}
inline Node connector(const std::string& id, const std::string& turn = "straight", double length = 12.0) {
  return {id, NodeKind::Connector, {{"turn_type", turn}, {"length", length}}};
}
inline Node marker(const std::string& id, const std::string& type = "dashed") {
  return {id, NodeKind::LaneMarker, {{"boundary_type", type}}};
}
inline Node crosswalk(const std::string& id) { return {id, NodeKind::Crosswalk, {}}; }
inline Node ego(double v = 10.0) {
  return {"ego", NodeKind::Ego, {{"velocity", v}, {"dimensions", Pair{4.5, 1.9}}}};
}
inline Node object(const std::string& id, const std::string& type, double x = 5.0, double z = 0.0, double v = 3.0) {
  return {id,
          NodeKind::Object,
          {{"object_type", type}, {"distance", Pair{x, z}}, {"velocity", v}, {"dimensions", Pair{4.5, 1.9}}}};
}

/// Scratch directory under the system temp dir, recreated empty.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("scenekg_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace th
