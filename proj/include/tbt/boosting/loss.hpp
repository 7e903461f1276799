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

#ifndef TBT_BOOSTING_LOSS_HPP_
#define TBT_BOOSTING_LOSS_HPP_

namespace tbt::boosting {

// Floor applied to per-sample Hessians so saturated samples keep a positive
// curvature.
inline constexpr double kMinHessian = 1e-16;

double Sigmoid(double score);

// Binomial deviance L(y, F) = -[y ln p + (1 - y) ln(1 - p)], p = sigmoid(F),
// evaluated without overflow for large |F|.
double LogisticLoss(int label, double score);

struct GradHess {
  double grad = 0.0;
  double hess = 0.0;
};

// First and second derivative of LogisticLoss with respect to the score.
GradHess LogisticGradHess(int label, double score);

// Newton step -G / (H + lambda). Throws FitError when H + lambda is not
// positive.
double LeafValue(double grad_sum, double hess_sum, double lambda);

// Second-order loss reduction of splitting one leaf into two Newton leaves.
double SplitGain(double grad_left, double hess_left, double grad_right,
                 double hess_right, double lambda);

}  // namespace tbt::boosting

#endif  // TBT_BOOSTING_LOSS_HPP_
