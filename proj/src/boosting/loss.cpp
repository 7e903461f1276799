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

#include "tbt/boosting/loss.hpp"

#include <algorithm>
#include <cmath>

#include "tbt/error.hpp"

namespace tbt::boosting {

double Sigmoid(double score) {
  if (score >= 0.0) return 1.0 / (1.0 + std::exp(-score));
  const double e = std::exp(score);
  return e / (1.0 + e);
}

double LogisticLoss(int label, double score) {
  // ln(1 + e^F) - y F, rewritten to keep the exponent non-positive.
  const double softplus =
      std::max(score, 0.0) + std::log1p(std::exp(-std::abs(score)));
  return softplus - (label == 1 ? score : 0.0);
}

GradHess LogisticGradHess(int label, double score) {
  const double p = Sigmoid(score);
  return {p - static_cast<double>(label), std::max(p * (1.0 - p), kMinHessian)};
}

double LeafValue(double grad_sum, double hess_sum, double lambda) {
  const double denom = hess_sum + lambda;
  if (!(denom > 0.0)) {
    throw FitError("degenerate leaf: hessian sum plus lambda is not positive");
  }
  return -grad_sum / denom;
}

double SplitGain(double grad_left, double hess_left, double grad_right,
                 double hess_right, double lambda) {
  const double grad = grad_left + grad_right;
  const double hess = hess_left + hess_right;
  return 0.5 * (grad_left * grad_left / (hess_left + lambda) +
                grad_right * grad_right / (hess_right + lambda) -
                grad * grad / (hess + lambda));
}

}  // namespace tbt::boosting
