// Copyright 2026 The bqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace bqec {

enum class FitForm {
    // 0.25 + A exp(-t / tau); params (A, tau)
    kExponential,
    // A p^m + B; params (A, p, B)
    kPowerDecay,
    // y0 + A exp(-t / tau) cos(omega t + phi0); params (y0, A, tau, omega, phi0)
    kDampedCosine,
};

struct FitResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;
    Eigen::VectorXd std_errors;
    double rss = 0.0;
    int restarts = 0;
};

using CurveModel = std::function<double(double, const Eigen::VectorXd&)>;

/// Levenberg-Marquardt fit of `model` to (t, y) starting at `guess`. Restarts from scaled
/// guesses when a run fails; throws FitDiverged once the restart budget is spent.
FitResult fit_curve(const CurveModel& model, const std::vector<double>& t, const std::vector<double>& y,
                    const Eigen::VectorXd& guess, int max_restarts = 4);

/// Fit one of the standard forms with data-driven initial guesses unless `guess` is given.
/// Requires at least four points with strictly increasing t.
FitResult fit_exponential(const std::vector<double>& t, const std::vector<double>& y, FitForm form,
                          const Eigen::VectorXd* guess = nullptr);

double evaluate_form(FitForm form, double t, const Eigen::VectorXd& params);

}  // namespace bqec
