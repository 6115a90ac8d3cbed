#pragma once
// Umbrella header.

#include "scenekg/commands.hpp"
#include "scenekg/config.hpp"
#include "scenekg/corpus.hpp"
#include "scenekg/error.hpp"
#include "scenekg/generator.hpp"
#include "scenekg/geometry.hpp"
#include "scenekg/json_io.hpp"
#include "scenekg/metrics.hpp"
#include "scenekg/parallel.hpp"
#include "scenekg/pattern_ast.hpp"
#include "scenekg/pattern_eval.hpp"
#include "scenekg/pattern_parser.hpp"
#include "scenekg/scene_builder.hpp"
#include "scenekg/scene_model.hpp"
#include "scenekg/stats.hpp"
#include "scenekg/subscene_catalog.hpp"
#include "scenekg/util.hpp"
