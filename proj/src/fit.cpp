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

#include "bqec/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "bqec/errors.hpp"
#include "bqec/fock.hpp"

namespace bqec {

namespace {

struct Residuals {
    typedef double Scalar;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    typedef Eigen::VectorXd InputType;
    typedef Eigen::VectorXd ValueType;
    typedef Eigen::MatrixXd JacobianType;

    const CurveModel* model = nullptr;
    const std::vector<double>* t = nullptr;
    const std::vector<double>* y = nullptr;
    int n_params = 0;

    int inputs() const { return n_params; }
    int values() const { return static_cast<int>(t->size()); }

    int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
        for (std::size_t i = 0; i < t->size(); ++i) {
            r(static_cast<Eigen::Index>(i)) = (*model)((*t)[i], p) - (*y)[i];
        }
        return 0;
    }
};

void check_series(const std::vector<double>& t, const std::vector<double>& y, std::size_t min_points) {
    if (t.size() != y.size()) {
        throw DimensionMismatch("fit: t and y differ in length");
    }
    if (t.size() < min_points) {
        throw DomainError("fit: not enough points");
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) {
            throw DomainError("fit: t must be strictly increasing");
        }
    }
}

double exp_guess_tau(const std::vector<double>& t, const std::vector<double>& y, double floor) {
    // Log-linear slope through the points that sit clearly above the floor.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    const double top = y.front() - floor;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double v = y[i] - floor;
        if (v > 0.05 * std::abs(top) && v > 0) {
            const double l = std::log(v);
            sx += t[i];
            sy += l;
            sxx += t[i] * t[i];
            sxy += t[i] * l;
            ++n;
        }
    }
    const double span = t.back() - t.front();
    if (n < 2) {
        return span;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return slope < 0 ? -1.0 / slope : span;
}

Eigen::VectorXd cosine_guess(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    double mean = 0;
    for (double v : y) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double min_dt = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) {
        min_dt = std::min(min_dt, t[i] - t[i - 1]);
    }
    const double span = t.back() - t.front();
    // Periodogram peak over a grid finer than 1/span.
    const double w_max = kPi / min_dt;
    const int grid = static_cast<int>(std::clamp(8.0 * w_max * span / kTwoPi, 64.0, 20000.0));
    double best_w = 0, best_p = -1;
    cplx best_c;
    for (int k = 1; k <= grid; ++k) {
        const double w = w_max * k / grid;
        cplx s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            s += (y[i] - mean) * std::exp(-kI * w * t[i]);
        }
        if (std::norm(s) > best_p) {
            best_p = std::norm(s);
            best_w = w;
            best_c = s;
        }
    }
    double amp = 0;
    for (double v : y) {
        amp = std::max(amp, std::abs(v - mean));
    }
    Eigen::VectorXd g(5);
    g << mean, amp, span, best_w, std::arg(best_c);
    return g;
}

}  // namespace

double evaluate_form(FitForm form, double t, const Eigen::VectorXd& p) {
    switch (form) {
        case FitForm::kExponential:
            return 0.25 + p(0) * std::exp(-t / p(1));
        case FitForm::kPowerDecay:
            return p(0) * std::pow(p(1), t) + p(2);
        case FitForm::kDampedCosine:
            return p(0) + p(1) * std::exp(-t / p(2)) * std::cos(p(3) * t + p(4));
    }
    return 0.0;
}

FitResult fit_curve(const CurveModel& model, const std::vector<double>& t, const std::vector<double>& y,
                    const Eigen::VectorXd& guess, int max_restarts) {
    const int np = static_cast<int>(guess.size());
    check_series(t, y, static_cast<std::size_t>(np));
    Residuals f;
    f.model = &model;
    f.t = &t;
    f.y = &y;
    f.n_params = np;
    Eigen::NumericalDiff<Residuals, Eigen::Central> df(f);

    FitResult best;
    best.rss = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt <= max_restarts; ++attempt) {
        Eigen::VectorXd p = guess;
        if (attempt > 0) {
            // Deterministic rescaling of the starting point.
            const double s = (attempt % 2 == 1) ? 1.0 + 0.5 * attempt : 1.0 / (1.0 + 0.5 * attempt);
            p = guess * s;
        }
        Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residuals, Eigen::Central>> lm(df);
        lm.parameters.xtol = 1e-14;
        lm.parameters.ftol = 1e-14;
        lm.parameters.maxfev = 4000 * (np + 1);
        const int status = lm.minimize(p);
        Eigen::VectorXd r(t.size());
        f(p, r);
        const double rss = r.squaredNorm();
        const bool ok = status > 0 && status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation && std::isfinite(rss) &&
                        p.allFinite();
        if (ok && rss < best.rss) {
            best.params = p;
            best.rss = rss;
            best.restarts = attempt;
        }
        // Good enough once the residual is at the noise floor of the first success.
        if (ok && attempt == 0) {
            break;
        }
    }
    if (!std::isfinite(best.rss)) {
        throw FitDiverged("fit did not converge after restarts");
    }
    Eigen::MatrixXd J(t.size(), np);
    df.df(best.params, J);
    const double dof = std::max<double>(1.0, static_cast<double>(t.size()) - np);
    const double sigma2 = best.rss / dof;
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    best.covariance = JtJ.completeOrthogonalDecomposition().pseudoInverse() * sigma2;
    best.std_errors = best.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return best;
}

FitResult fit_exponential(const std::vector<double>& t, const std::vector<double>& y, FitForm form,
                          const Eigen::VectorXd* guess) {
    check_series(t, y, 4);
    Eigen::VectorXd g;
    if (guess) {
        g = *guess;
    } else {
        switch (form) {
            case FitForm::kExponential: {
                g.resize(2);
                const double tau = exp_guess_tau(t, y, 0.25);
                g << (y.front() - 0.25) * std::exp(t.front() / tau), tau;
                break;
            }
            case FitForm::kPowerDecay: {
                g.resize(3);
                const double floor = std::min(y.back(), y.front()) * 0.5;
                const double tau = exp_guess_tau(t, y, floor);
                g << y.front() - floor, std::exp(-1.0 / tau), floor;
                break;
            }
            case FitForm::kDampedCosine:
                g = cosine_guess(t, y);
                break;
        }
    }
    const CurveModel model = [form](double x, const Eigen::VectorXd& p) { return evaluate_form(form, x, p); };
    FitResult r = fit_curve(model, t, y, g);
    if (form == FitForm::kDampedCosine && r.params(1) < 0) {
        // Canonical sign: positive amplitude, phase in (-pi, pi].
        r.params(1) = -r.params(1);
        r.params(4) += kPi;
    }
    if (form == FitForm::kDampedCosine) {
        if (r.params(3) < 0) {
            r.params(3) = -r.params(3);
            r.params(4) = -r.params(4);
        }
        r.params(4) = std::remainder(r.params(4), kTwoPi);
    }
    return r;
}

}  // namespace bqec
