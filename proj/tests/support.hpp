/*
 * Copyright 2026 The tbt Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TBT_TESTS_SUPPORT_HPP_
#define TBT_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "tbt/boosting/ensemble.hpp"
#include "tbt/data/dataset.hpp"
#include "tbt/data/splitmix64.hpp"
#include "tbt/session/operation.hpp"
#include "tbt/session/session.hpp"

namespace tbt::testing {

std::filesystem::path DataDir();

// Full mushroom table, loaded once.
const data::Dataset& Mushroom();
// Seed 42, test fraction 0.3, computed once.
const data::TrainTestSplit& MushroomSplit();

// The four-row two-feature XOR table.
data::Dataset Xor();

// XOR splits have zero gain at the root, so the fixture lowers min_gain
// below zero to let the learner split on exact ties.
boosting::FitParams XorParams(int num_trees, int max_depth);

session::Session XorSession(int num_trees, int max_depth);
session::Session MushroomSession(const boosting::FitParams& params);

// Uniform integer in [lo, hi].
int64_t UniformInt(data::SplitMix64& rng, int64_t lo, int64_t hi);
// Uniform in [lo, hi).
double UniformReal(data::SplitMix64& rng, double lo, double hi);

// Random table with both classes present. Numeric cells are small
// multiples of 0.5 so ties are common; categorical features have 1-4
// categories.
data::Dataset RandomDataset(data::SplitMix64& rng, size_t min_samples,
                            size_t max_samples, size_t max_features);

// A random operation that is valid for the session's current state.
session::Operation RandomValidOperation(data::SplitMix64& rng,
                                        const session::Session& s);

}  // namespace tbt::testing

#endif  // TBT_TESTS_SUPPORT_HPP_
