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

#ifndef TBT_BOOSTING_MODEL_JSON_HPP_
#define TBT_BOOSTING_MODEL_JSON_HPP_

#include <string>

#include "json.hpp"
#include "tbt/boosting/ensemble.hpp"
#include "tbt/boosting/split_rule.hpp"
#include "tbt/boosting/tree.hpp"

namespace tbt::boosting {

// Model document:
//   {"base_score", "shrinkage", "lambda", "gammas": [...],
//    "trees": [{"nodes": [{"id", "kind", "feature", "test_kind",
//                          "threshold_or_code", "left", "right", "value",
//                          "n", "n_pos", "n_neg", "G", "H"}, ...]}, ...]}
// Leaves carry null rule fields and null children.
nlohmann::json TreeToJson(const Tree& tree);
Tree TreeFromJson(const nlohmann::json& json);
nlohmann::json EnsembleToJson(const Ensemble& ensemble);
Ensemble EnsembleFromJson(const nlohmann::json& json);

// Canonical bytes of a model, the unit of byte-identity comparisons.
std::string SerializeEnsemble(const Ensemble& ensemble);
std::string SerializeTree(const Tree& tree);

nlohmann::json RuleToJson(const SplitRule& rule);
SplitRule RuleFromJson(const nlohmann::json& json);

// Array of {"feature","test_kind","threshold_or_code","direction"} steps
// followed by a terminal {"feature","test_kind","threshold_or_code"} or
// {"leaf": true}.
nlohmann::json SignatureToJson(const PathSignature& signature);
PathSignature SignatureFromJson(const nlohmann::json& json);

// {"blocked": [ids], "forbidden_paths": [signatures], "max_trees",
//  "max_depth"}
nlohmann::json ConstraintsToJson(const ConstraintSet& constraints);
ConstraintSet ConstraintsFromJson(const nlohmann::json& json);

// {"num_trees","max_depth","eta","lambda","min_leaf","min_gain","max_trees"}
nlohmann::json ParamsToJson(const FitParams& params);
// Fields absent from `json` keep their value from `base`.
FitParams ParamsFromJson(const nlohmann::json& json,
                         const FitParams& base = FitParams());

}  // namespace tbt::boosting

#endif  // TBT_BOOSTING_MODEL_JSON_HPP_
