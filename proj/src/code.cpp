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

#include "bqec/code.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "bqec/errors.hpp"

namespace bqec {

namespace {

constexpr double kOrthoTol = 1e-9;

// Diagonal of -i H_eff for the no-jump oscillator evolution in the matched frame.
Eigen::VectorXcd nojump_generator(const HilbertConfig& cfg, const DeviceParams& dev, const NoiseParams& noise) {
    const double w = four_photon_frame_rate(dev);
    const double k = nojump_rate(noise);
    Eigen::VectorXcd g(cfg.osc_dim());
    for (int n = 0; n <= cfg.n_max; ++n) {
        g(n) = -kI * (kerr_energy(dev, n) - w * n) - 0.5 * k * n;
    }
    return g;
}

Ket evolve_diag(const Eigen::VectorXcd& gen, const Ket& psi, double t) {
    return (gen * t).array().exp().matrix().cwiseProduct(psi);
}

Ket normalized(const Ket& v) { return v / v.norm(); }

void check_orthonormal(const std::vector<Ket>& vs, const char* what) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (std::abs(vs[i].norm() - 1.0) > kOrthoTol) {
            std::ostringstream msg;
            msg << what << " " << i << " is not normalized";
            throw NonOrthogonalInput(msg.str());
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(vs[i].dot(vs[j])) > kOrthoTol) {
                std::ostringstream msg;
                msg << what << "s " << j << " and " << i << " are not orthogonal";
                throw NonOrthogonalInput(msg.str());
            }
        }
    }
}

// Orthonormal basis whose first members are `head`, completed from e_0, e_1, ...
std::vector<Ket> complete_basis(const std::vector<Ket>& head, int dim) {
    std::vector<Ket> basis = head;
    for (int k = 0; k < dim && static_cast<int>(basis.size()) < dim; ++k) {
        Ket v = Ket::Zero(dim);
        v(k) = 1.0;
        // Two Gram-Schmidt passes for numerical orthogonality.
        for (int pass = 0; pass < 2; ++pass) {
            for (const Ket& b : basis) {
                v -= b * b.dot(v);
            }
        }
        const double n = v.norm();
        if (n > 1e-8) {
            basis.push_back(v / n);
        }
    }
    return basis;
}

}  // namespace

CodeWords binomial_code(const HilbertConfig& cfg) {
    const HilbertConfig osc = cfg.oscillator_only();
    if (osc.n_max < 5) {
        throw DimensionMismatch("binomial code needs n_max >= 5");
    }
    return {(fock_ket(osc, 0) + fock_ket(osc, 4)) / std::sqrt(2.0), fock_ket(osc, 2)};
}

CodeWords fock_code(const HilbertConfig& cfg) {
    const HilbertConfig osc = cfg.oscillator_only();
    return {fock_ket(osc, 0), fock_ket(osc, 1)};
}

double nojump_rate(const NoiseParams& noise) { return noise.kappa_s * (1.0 + 2.0 * noise.n_th_s); }

DeformationParams compute_deformation(const DeviceParams& dev, const NoiseParams& noise, double t) {
    if (t < 0.0) {
        throw DomainError("compute_deformation: t must be non-negative");
    }
    const HilbertConfig osc{6, false};
    const Eigen::VectorXcd gen = nojump_generator(osc, dev, noise);
    const CodeWords code = binomial_code(osc);
    const Ket z = evolve_diag(gen, code.zero_L, t);
    const Ket o = evolve_diag(gen, code.one_L, t);
    DeformationParams d;
    d.t = t;
    d.theta = std::atan2(std::abs(z(4)), std::abs(z(0)));
    d.phi4 = std::arg(z(4) / z(0));
    d.phi2 = std::arg(o(2));
    // a|0_L'> ~ e^{i phi4}|3>, a|1_L'> ~ e^{i phi2}|1>
    d.phi3 = std::remainder(d.phi4 - d.phi2, kTwoPi);
    return d;
}

Operator build_isometry_unitary(const std::vector<std::pair<Ket, Ket>>& pairs, int dim) {
    std::vector<Ket> src;
    std::vector<Ket> dst;
    for (const auto& [s, t] : pairs) {
        if (s.size() != dim || t.size() != dim) {
            throw DimensionMismatch("build_isometry_unitary: ket dimension mismatch");
        }
        src.push_back(s);
        dst.push_back(t);
    }
    check_orthonormal(src, "source");
    check_orthonormal(dst, "target");
    const std::vector<Ket> sb = complete_basis(src, dim);
    const std::vector<Ket> tb = complete_basis(dst, dim);
    if (static_cast<int>(sb.size()) != dim || static_cast<int>(tb.size()) != dim) {
        throw NonOrthogonalInput("build_isometry_unitary: basis completion failed");
    }
    Operator U = Operator::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        U += tb[k] * sb[k].adjoint();
    }
    return U;
}

Operator build_isometry_unitary(const std::vector<std::pair<Ket, Ket>>& pairs, const HilbertConfig& cfg) {
    return build_isometry_unitary(pairs, cfg.dim());
}

Operator logical_operator(const CodeWords& code, const Qubit2& u) {
    const Ket* w[2] = {&code.zero_L, &code.one_L};
    const Eigen::Index d = code.zero_L.size();
    Operator op = Operator::Identity(d, d);
    for (int i = 0; i < 2; ++i) {
        op -= (*w[i]) * w[i]->adjoint();
    }
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            op += u(i, j) * (*w[i]) * w[j]->adjoint();
        }
    }
    return op;
}

Operator subspace_pauli(const Ket& b0, const Ket& b1, int index) {
    Qubit2 p;
    switch (index) {
        case 0:
            p << 1.0, 0.0, 0.0, 1.0;
            break;
        case 1:
            p << 0.0, 1.0, 1.0, 0.0;
            break;
        case 2:
            p << 0.0, -kI, kI, 0.0;
            break;
        case 3:
            p << 1.0, 0.0, 0.0, -1.0;
            break;
        default:
            throw DomainError("subspace_pauli: index must be 0..3");
    }
    return logical_operator(CodeWords{b0, b1}, p);
}

namespace {

Qubit2 remove_global_phase(const Qubit2& u) {
    // Fix the phase so that the first entry with |u| > 0.1 is real positive.
    for (int k = 0; k < 4; ++k) {
        const cplx v = u(k % 2, k / 2);
        if (std::abs(v) > 0.1) {
            return u * (std::abs(v) / v);
        }
    }
    return u;
}

bool same_up_to_phase(const Qubit2& a, const Qubit2& b) {
    const cplx ov = (a.adjoint() * b).trace() / 2.0;
    return std::abs(std::abs(ov) - 1.0) < 1e-9;
}

}  // namespace

const std::vector<Qubit2>& clifford_group() {
    static const std::vector<Qubit2> group = [] {
        Qubit2 h;
        h << 1.0, 1.0, 1.0, -1.0;
        h /= std::sqrt(2.0);
        Qubit2 s;
        s << 1.0, 0.0, 0.0, kI;
        std::vector<Qubit2> out{Qubit2::Identity()};
        // Breadth-first closure under right multiplication by {H, S}.
        for (std::size_t head = 0; head < out.size(); ++head) {
            for (const Qubit2& g : {h, s}) {
                const Qubit2 c = remove_global_phase(out[head] * g);
                bool seen = false;
                for (const Qubit2& e : out) {
                    if (same_up_to_phase(e, c)) {
                        seen = true;
                        break;
                    }
                }
                if (!seen) {
                    out.push_back(c);
                }
            }
        }
        return out;
    }();
    return group;
}

int clifford_index(const Qubit2& u) {
    const auto& g = clifford_group();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (same_up_to_phase(g[k], u)) {
            return static_cast<int>(k);
        }
    }
    return -1;
}

ProtocolTiming default_timing(const DeviceParams& dev, double t_w) {
    ProtocolTiming t;
    t.t_w = t_w;
    t.measure_window = dev.parity_wait() + dev.meas.T_BM + dev.meas.T_AM;
    return t;
}

RecoverySet make_recovery_set(const HilbertConfig& cfg, const DeviceParams& dev, const NoiseParams& noise,
                              const ProtocolTiming& timing, int steps, bool exact_deformation) {
    if (steps < 1) {
        throw DomainError("make_recovery_set: steps must be >= 1");
    }
    const HilbertConfig osc = cfg.oscillator_only();
    const Eigen::VectorXcd gen = nojump_generator(osc, dev, noise);
    const CodeWords code = binomial_code(osc);
    const Operator a = destroy(osc);
    const double kappa = nojump_rate(noise);

    RecoverySet rs;
    rs.steps = steps;
    rs.timing = timing;
    for (int k = 0; k < steps; ++k) {
        const double r = timing.recovery_time(k);
        const Ket z = evolve_diag(gen, code.zero_L, r);
        const Ket o = evolve_diag(gen, code.one_L, r);
        rs.deformed.push_back({normalized(z), normalized(o)});
    }

    // Jump-averaged coherence between the error images of the two code words.
    using Quad = boost::math::quadrature::gauss<double, 30>;
    for (int k = 0; k < steps; ++k) {
        const double w0 = (k == 0) ? 0.0 : timing.projection_time(k - 1);
        const double w1 = timing.projection_time(k);
        const double r = timing.recovery_time(k);
        auto image = [&](const Ket& c, double tau) { return evolve_diag(gen, a * evolve_diag(gen, c, tau), r - tau); };
        auto cross = [&](double tau) {
            const Ket e0 = image(code.zero_L, tau);
            const Ket e1 = image(code.one_L, tau);
            return e0(3) * std::conj(e1(1));
        };
        const double re = Quad::integrate([&](double tau) { return cross(tau).real(); }, w0, w1);
        const double im = Quad::integrate([&](double tau) { return cross(tau).imag(); }, w0, w1);
        const double phase = std::atan2(im, re);
        const Ket e3 = std::exp(kI * phase) * fock_ket(osc, 3);
        const Ket e1 = fock_ket(osc, 1);
        rs.error_basis.push_back({e3, e1});
        const CodeWords& target = (k == steps - 1) ? code : rs.deformed[k];
        rs.odd.push_back(build_isometry_unitary({{e3, target.zero_L}, {e1, target.one_L}}, osc));
        if (exact_deformation) {
            const double m0 = std::sqrt(Quad::integrate([&](double tau) { return kappa * image(code.zero_L, tau).squaredNorm(); }, w0, w1));
            const double m1 = std::sqrt(Quad::integrate([&](double tau) { return kappa * image(code.one_L, tau).squaredNorm(); }, w0, w1));
            // Restore the amplitude ratio of the no-jump branch at the recovery instant.
            const bool last_step = (k == steps - 1);
            const double n0 = last_step ? 1.0 : evolve_diag(gen, code.zero_L, r).norm();
            const double n1 = last_step ? 1.0 : evolve_diag(gen, code.one_L, r).norm();
            Operator f = Operator::Identity(osc.dim(), osc.dim()) / std::max(m0, m1);
            f(3, 3) = n0 / m0;
            f(1, 1) = n1 / m1;
            rs.odd_filter.push_back(f / f.cwiseAbs().maxCoeff());
        }
    }
    const CodeWords& last = rs.deformed.back();
    rs.even_final = build_isometry_unitary({{last.zero_L, code.zero_L}, {last.one_L, code.one_L}}, osc);
    if (exact_deformation) {
        const double r = timing.recovery_time(steps - 1);
        const double n0 = evolve_diag(gen, code.zero_L, r).norm();
        const double n1 = evolve_diag(gen, code.one_L, r).norm();
        Operator f = Operator::Identity(osc.dim(), osc.dim()) / std::max(n0, n1);
        f -= (last.zero_L * last.zero_L.adjoint() + last.one_L * last.one_L.adjoint()) / std::max(n0, n1);
        f += last.zero_L * last.zero_L.adjoint() / n0 + last.one_L * last.one_L.adjoint() / n1;
        rs.even_filter = f * std::min(n0, n1);
    }
    return rs;
}

Operator make_encoder(const HilbertConfig& cfg, const CodeWords& code) {
    const HilbertConfig joint = cfg.with_ancilla();
    return build_isometry_unitary({{fock_ket(joint, 0, 0), embed_ket(joint, code.zero_L, 0)},
                                   {fock_ket(joint, 0, 1), embed_ket(joint, code.one_L, 0)}},
                                  joint);
}

GateSet make_gates(const HilbertConfig& cfg, const DeviceParams& dev, const NoiseParams& noise, double t_w) {
    const HilbertConfig osc = cfg.oscillator_only();
    GateSet g;
    g.code = binomial_code(osc);
    g.EN = make_encoder(cfg, g.code);
    g.DE = g.EN.adjoint();
    const ProtocolTiming timing = default_timing(dev, t_w);
    g.one_step = make_recovery_set(osc, dev, noise, timing, 1);
    g.two_step = make_recovery_set(osc, dev, noise, timing, 2);
    g.U1 = g.one_step.even_final;
    g.U2_single_step = g.one_step.odd[0];
    g.U2 = g.two_step.odd[0];
    g.U3 = g.two_step.even_final;
    g.U4 = g.two_step.odd[1];
    for (const Qubit2& c : clifford_group()) {
        g.cliffords.push_back(logical_operator(g.code, c));
    }
    Qubit2 t;
    t << 1.0, 0.0, 0.0, std::exp(kI * kPi / 4.0);
    g.T_L = logical_operator(g.code, t);
    return g;
}

}  // namespace bqec
