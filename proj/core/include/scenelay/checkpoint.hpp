/* Copyright 2026 The SceneLay Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SCENELAY_CHECKPOINT_HPP_
#define SCENELAY_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "scenelay/model.hpp"
#include "scenelay/training.hpp"

namespace scenelay {

inline constexpr int kCheckpointVersion = 1;

// Self-describing JSON checkpoint: format version, training
// hyperparameters, model configuration, seed, and each parameter array as
// {name, shape, values} in param_views() order. Doubles are written with
// enough digits to round-trip exactly.
struct Checkpoint {
  TrainConfig train;
  std::uint64_t seed = 0;
  ModelParams params;
};

std::string checkpoint_to_json(const Checkpoint& ck);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string train_config_to_json(const TrainConfig& cfg, int indent = 2);

}  // namespace scenelay

#endif  // SCENELAY_CHECKPOINT_HPP_
