// Copyright 2026 The tbepp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tbepp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <variant>

#include <unsupported/Eigen/KroneckerProduct>

#include "tbepp/errors.hpp"

namespace tbepp::oracle {
namespace {

using Complex = std::complex<double>;
using SparseVector = std::vector<std::pair<std::size_t, Complex>>;

constexpr double kUnitarityTolerance = 1e-10;
constexpr double kDropBelow = 1e-15;

int pol_bit(Polarization p) { return p == Polarization::H ? 0 : 1; }

// Column i of one element's matrix, as a sparse list of (row, value).
SparseVector element_column(const Element &e, const LocalBasis &basis, std::size_t i) {
    const PhotonBasis p = basis.at(i);
    const int span = basis.max_delay() + 1;
    const double r = std::numbers::sqrt2 / 2.0;
    auto at = [&](const Mode &m, Polarization pol, int delay) { return basis.index(m, pol, delay); };
    auto wrap = [span](int d) { return ((d % span) + span) % span; };

    if (const auto *x = std::get_if<Pbs>(&e)) {
        if (p.mode == x->in) {
            return {{at(p.pol == Polarization::H ? x->transmit : x->reflect, p.pol, p.delay), 1.0}};
        }
        if (p.mode == x->transmit && p.pol == Polarization::H) return {{at(x->in, p.pol, p.delay), 1.0}};
        if (p.mode == x->reflect && p.pol == Polarization::V) return {{at(x->in, p.pol, p.delay), 1.0}};
    } else if (const auto *x = std::get_if<Hwp>(&e)) {
        if (p.mode == x->mode) return {{at(p.mode, flipped(p.pol), p.delay), 1.0}};
    } else if (const auto *x = std::get_if<BeamSplitter>(&e)) {
        // [[0, Had], [Had, 0]] on (in1, in2, out1, out2).
        if (p.mode == x->in1) return {{at(x->out1, p.pol, p.delay), r}, {at(x->out2, p.pol, p.delay), r}};
        if (p.mode == x->in2) return {{at(x->out1, p.pol, p.delay), r}, {at(x->out2, p.pol, p.delay), -r}};
        if (p.mode == x->out1) return {{at(x->in1, p.pol, p.delay), r}, {at(x->in2, p.pol, p.delay), r}};
        if (p.mode == x->out2) return {{at(x->in1, p.pol, p.delay), r}, {at(x->in2, p.pol, p.delay), -r}};
    } else if (const auto *x = std::get_if<Delay>(&e)) {
        if (p.mode == x->mode) return {{at(p.mode, p.pol, wrap(p.delay + x->delta)), 1.0}};
    } else if (const auto *x = std::get_if<PolDelay>(&e)) {
        if (p.mode == x->mode) {
            int d = p.pol == Polarization::H ? x->delta_h : x->delta_v;
            return {{at(p.mode, p.pol, wrap(p.delay + d)), 1.0}};
        }
    } else if (const auto *x = std::get_if<Pockels>(&e)) {
        if (p.mode == x->mode && p.delay == x->gate_delay) return {{at(p.mode, flipped(p.pol), p.delay), 1.0}};
    } else if (const auto *x = std::get_if<Route>(&e)) {
        if (p.mode == x->from) return {{at(x->to, p.pol, p.delay), 1.0}};
        if (p.mode == x->to) return {{at(x->from, p.pol, p.delay), 1.0}};
    }
    return {{i, 1.0}};
}

bool touches(const Element &e, const LocalBasis &basis) {
    auto modes = wired_modes(e);
    return std::any_of(modes.begin(), modes.end(), [&](const Mode &m) { return basis.has(m); });
}

// Nonzero entries of each column of a dense matrix.
std::vector<SparseVector> columns_of(const Matrix &u) {
    std::vector<SparseVector> cols(static_cast<std::size_t>(u.cols()));
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            if (std::abs(u(i, j)) > kDropBelow) cols[j].emplace_back(static_cast<std::size_t>(i), u(i, j));
        }
    }
    return cols;
}

template <class F>
void for_each_nonzero(const SparseMatrix &m, F f) {
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            f(static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()), it.value());
        }
    }
}

SparseMatrix from_triplets(std::size_t dim, const std::vector<Eigen::Triplet<Complex>> &triplets) {
    SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.prune(Complex(0.0), kDropBelow);
    return m;
}

}  // namespace

LocalBasis::LocalBasis(std::vector<Mode> modes, int max_delay) : modes_(std::move(modes)), max_delay_(max_delay) {
    if (max_delay < 0) throw std::invalid_argument("oracle basis needs max_delay >= 0");
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (!slot_.emplace(modes_[i], i).second) throw std::invalid_argument("duplicate mode in oracle basis");
    }
}

bool LocalBasis::has(const Mode &m) const { return slot_.contains(m); }

std::optional<std::size_t> LocalBasis::index(const PhotonBasis &p) const {
    auto it = slot_.find(p.mode);
    if (it == slot_.end() || p.delay < 0 || p.delay > max_delay_) return std::nullopt;
    return index(p.mode, p.pol, p.delay);
}

std::size_t LocalBasis::index(const Mode &m, Polarization pol, int delay) const {
    const std::size_t span = static_cast<std::size_t>(max_delay_ + 1);
    return slot_.at(m) * 2 * span + static_cast<std::size_t>(pol_bit(pol)) * span + static_cast<std::size_t>(delay);
}

PhotonBasis LocalBasis::at(std::size_t i) const {
    const std::size_t span = static_cast<std::size_t>(max_delay_ + 1);
    return {modes_.at(i / (2 * span)), (i / span) % 2 ? Polarization::V : Polarization::H, static_cast<int>(i % span)};
}

JointBasis::JointBasis(std::vector<LocalBasis> photons) : photons_(std::move(photons)) {
    for (const auto &p : photons_) dim_ *= p.dim();
}

JointBasis JointBasis::for_circuit(const Circuit &c, std::span<const std::set<Mode>> start_modes, int max_delay) {
    std::vector<LocalBasis> photons;
    for (const auto &start : start_modes) {
        std::set<Mode> reach = start;
        for (bool grew = true; grew;) {
            grew = false;
            for (const auto &e : c.elements()) {
                auto wired = wired_modes(e);
                if (std::none_of(wired.begin(), wired.end(), [&](const Mode &m) { return reach.contains(m); })) continue;
                for (const auto &m : wired) grew |= reach.insert(m).second;
            }
        }
        photons.emplace_back(std::vector<Mode>(reach.begin(), reach.end()), max_delay);
    }
    return JointBasis(std::move(photons));
}

std::size_t JointBasis::index(const BasisKet &ket) const {
    if (ket.size() != photons_.size()) throw std::invalid_argument("ket photon count does not match oracle basis");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < photons_.size(); ++k) {
        const auto &local = photons_[k];
        if (!local.has(ket[k].mode)) {
            throw std::invalid_argument("mode " + ket[k].mode.label() + " of photon " + std::to_string(k) +
                                        " is outside the oracle basis");
        }
        if (ket[k].delay > local.max_delay()) {
            throw std::invalid_argument("delay " + std::to_string(ket[k].delay) + " exceeds D_max = " +
                                        std::to_string(local.max_delay()) + "; requires D_max >= " +
                                        std::to_string(ket[k].delay));
        }
        idx = idx * local.dim() + *local.index(ket[k]);
    }
    return idx;
}

std::vector<std::size_t> JointBasis::digits(std::size_t i) const {
    std::vector<std::size_t> d(photons_.size());
    for (std::size_t k = photons_.size(); k-- > 0;) {
        d[k] = i % photons_[k].dim();
        i /= photons_[k].dim();
    }
    return d;
}

BasisKet JointBasis::ket(std::size_t i) const {
    auto d = digits(i);
    BasisKet ket;
    for (std::size_t k = 0; k < photons_.size(); ++k) ket.photons.push_back(photons_[k].at(d[k]));
    return ket;
}

double DensityMatrix::trace() const {
    Complex t = 0.0;
    for_each_nonzero(rho, [&](std::size_t i, std::size_t j, Complex v) {
        if (i == j) t += v;
    });
    return t.real();
}

double DensityMatrix::hermiticity_error() const {
    SparseMatrix diff = rho - SparseMatrix(rho.adjoint());
    double worst = 0.0;
    for_each_nonzero(diff, [&](std::size_t, std::size_t, Complex v) { worst = std::max(worst, std::abs(v)); });
    return worst;
}

double DensityMatrix::min_eigenvalue() const {
    std::set<std::size_t> support;
    for_each_nonzero(rho, [&](std::size_t i, std::size_t j, Complex v) {
        if (std::abs(v) > kDropBelow) {
            support.insert(i);
            support.insert(j);
        }
    });
    if (support.empty()) return 0.0;
    std::vector<std::size_t> idx(support.begin(), support.end());
    std::unordered_map<std::size_t, Eigen::Index> pos;
    for (std::size_t k = 0; k < idx.size(); ++k) pos[idx[k]] = static_cast<Eigen::Index>(k);
    Matrix block = Matrix::Zero(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
    for_each_nonzero(rho, [&](std::size_t i, std::size_t j, Complex v) { block(pos.at(i), pos.at(j)) = v; });
    Eigen::SelfAdjointEigenSolver<Matrix> solver(block, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double tol) const {
    if (double h = hermiticity_error(); h > tol) {
        throw ConsistencyError("density matrix not Hermitian: deviation " + std::to_string(h));
    }
    if (double t = trace(); std::abs(t - 1.0) > tol) {
        throw ConsistencyError("density matrix trace " + std::to_string(t) + " != 1");
    }
    if (double m = min_eigenvalue(); m < -1e-10) {
        throw ConsistencyError("density matrix not positive semidefinite: eigenvalue " + std::to_string(m));
    }
}

Complex DensityMatrix::expectation(std::span<const std::pair<std::size_t, Complex>> v) const {
    Complex acc = 0.0;
    for (const auto &[i, a] : v) {
        for (const auto &[j, b] : v) acc += std::conj(a) * rho.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * b;
    }
    return acc;
}

DensityMatrix dm_from_ensemble(const Ensemble &e, const JointBasis &basis) {
    std::vector<Eigen::Triplet<Complex>> triplets;
    for (const auto &c : e.components()) {
        SparseVector psi;
        for (const auto &t : c.state.terms()) psi.emplace_back(basis.index(t.ket), t.amp);
        for (const auto &[i, a] : psi) {
            for (const auto &[j, b] : psi) {
                triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j),
                                      c.weight * a * std::conj(b));
            }
        }
    }
    return {basis, from_triplets(basis.dim(), triplets)};
}

Matrix local_unitary(const Circuit &c, const LocalBasis &basis) {
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    Matrix u = Matrix::Identity(dim, dim);
    for (const auto &e : c.elements()) {
        if (!touches(e, basis)) continue;
        Matrix m = Matrix::Zero(dim, dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            for (const auto &[i, v] : element_column(e, basis, static_cast<std::size_t>(j))) {
                m(static_cast<Eigen::Index>(i), j) += v;
            }
        }
        u = m * u;
    }
    return u;
}

double unitarity_error(const Matrix &u) {
    Matrix d = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

SparseMatrix circuit_unitary(const Circuit &c, const JointBasis &basis) {
    SparseMatrix u(1, 1);
    u.insert(0, 0) = 1.0;
    for (std::size_t k = 0; k < basis.photon_count(); ++k) {
        SparseMatrix local = local_unitary(c, basis.photon(k)).sparseView(1.0, kDropBelow);
        SparseMatrix next = Eigen::kroneckerProduct(u, local);
        u = std::move(next);
    }
    return u;
}

DensityMatrix evolve_dm(const DensityMatrix &d, const Circuit &c, bool inverse) {
    const JointBasis &basis = d.basis;
    std::vector<std::vector<SparseVector>> local_cols;
    for (std::size_t k = 0; k < basis.photon_count(); ++k) {
        Matrix u = local_unitary(c, basis.photon(k));
        if (double err = unitarity_error(u); err > kUnitarityTolerance) {
            throw ConsistencyError("assembled circuit matrix for photon " + std::to_string(k) +
                                   " is not unitary: deviation " + std::to_string(err));
        }
        if (inverse) u = u.adjoint().eval();
        local_cols.push_back(columns_of(u));
    }

    // Column i of the joint Kronecker-product unitary, built on demand.
    std::unordered_map<std::size_t, SparseVector> cache;
    auto joint_column = [&](std::size_t i) -> const SparseVector & {
        if (auto it = cache.find(i); it != cache.end()) return it->second;
        auto digits = basis.digits(i);
        SparseVector col{{0, 1.0}};
        for (std::size_t k = 0; k < digits.size(); ++k) {
            SparseVector next;
            const std::size_t local_dim = basis.photon(k).dim();
            for (const auto &[row, amp] : col) {
                for (const auto &[r, v] : local_cols[k][digits[k]]) next.emplace_back(row * local_dim + r, amp * v);
            }
            col = std::move(next);
        }
        return cache.emplace(i, std::move(col)).first->second;
    };

    std::vector<Eigen::Triplet<Complex>> triplets;
    for_each_nonzero(d.rho, [&](std::size_t i, std::size_t j, Complex v) {
        const auto &ci = joint_column(i);
        const auto &cj = joint_column(j);
        for (const auto &[r, a] : ci) {
            for (const auto &[s, b] : cj) {
                triplets.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s), a * v * std::conj(b));
            }
        }
    });
    return {basis, from_triplets(basis.dim(), triplets)};
}

DensityMatrix noisy_branch_dm(const NoiseParams &p, const Branch &branch, const JointBasis &basis) {
    p.validate();
    const int n = branch.parties();
    if (basis.photon_count() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("oracle basis photon count does not match branch");
    }
    const auto modes = branch.modes();
    const double r = std::numbers::sqrt2 / 2.0;
    using enum Polarization;
    struct PolTerm {
        Polarization a, b;
        double amp;
    };
    auto bell_terms = [&](BellKind k) -> std::vector<PolTerm> {
        switch (k) {
            case BellKind::PhiPlus: return {{H, H, r}, {V, V, r}};
            case BellKind::PhiMinus: return {{H, H, r}, {V, V, -r}};
            case BellKind::PsiPlus: return {{H, V, r}, {V, H, r}};
            case BellKind::PsiMinus: return {{H, V, r}, {V, H, -r}};
        }
        return {};
    };
    // Time-bin pair on this branch: (|0..0> + sign e^{i phi}|1..1>)/sqrt2.
    const Complex early = r;
    const Complex late = r * static_cast<double>(branch.timebin_sign()) * std::polar(1.0, p.dephasing);

    std::vector<Eigen::Triplet<Complex>> triplets;
    for (BellKind kind : kBellKinds) {
        double w = p.weight(kind);
        if (w <= 0.0) continue;
        SparseVector psi;
        for (const auto &pt : bell_terms(kind)) {
            for (int delay : {0, 1}) {
                BasisKet ket;
                Complex amp = pt.amp * (delay == 0 ? early : late);
                for (int k = 0; k < n; ++k) {
                    Polarization pol = k == 0 ? pt.a : (k == 1 ? pt.b : H);
                    ket.photons.push_back({modes[k], pol, delay});
                    if (k == 0) amp *= std::polar(1.0, p.theta_A);
                    if (k == 1) amp *= std::polar(1.0, p.theta_B);
                }
                psi.emplace_back(basis.index(ket), amp);
            }
        }
        for (const auto &[i, a] : psi) {
            for (const auto &[j, b] : psi) {
                triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), w * a * std::conj(b));
            }
        }
    }
    return {basis, from_triplets(basis.dim(), triplets)};
}

double PatternStatistics::mean_fidelity() const {
    if (accepted <= 0.0) return 0.0;
    double acc = 0.0;
    for (const auto &[label, f] : fidelity) acc += probability.at(label) * f;
    return acc / accepted;
}

PatternStatistics heralded_statistics(const DensityMatrix &out, const Branch &branch) {
    const int n = branch.parties();
    PatternStatistics stats;
    std::map<std::string, Pattern> seen;
    for_each_nonzero(out.rho, [&](std::size_t i, std::size_t j, Complex v) {
        if (i != j) return;
        BasisKet ket = out.basis.ket(i);
        Pattern pattern;
        for (const auto &p : ket.photons) pattern.ports.push_back(p.mode);
        auto label = pattern.label();
        stats.probability[label] += v.real();
        seen.emplace(label, std::move(pattern));
    });

    const double r = std::numbers::sqrt2 / 2.0;
    for (const auto &[label, pattern] : seen) {
        if (!pattern.accepting()) continue;
        double prob = stats.probability[label];
        stats.accepted += prob;
        if (prob <= kTolerance) continue;
        // Corrected target Z|GHZ+> at common delay 1: Z on one photon flips the all-V sign.
        BasisKet all_h, all_v;
        for (int k = 0; k < n; ++k) {
            all_h.photons.push_back({pattern.ports[k], Polarization::H, 1});
            all_v.photons.push_back({pattern.ports[k], Polarization::V, 1});
        }
        SparseVector v{{out.basis.index(all_h), r}, {out.basis.index(all_v), r * branch.timebin_sign()}};
        stats.fidelity[label] = out.expectation(v).real() / prob;
    }
    return stats;
}

PatternStatistics engine_statistics(const NoiseParams &p, const Branch &branch) {
    p.validate();
    const auto modes = branch.modes();
    Ensemble e = Ensemble::pure(branch_state(branch));
    e = noisy_fiber_channel(e, p);
    e = collective_phase_channel(e, {{modes[0], p.theta_A}, {modes[1], p.theta_B}});
    e = timebin_dephasing_channel(e, p.dephasing);

    PatternStatistics stats;
    std::map<std::string, double> weighted_fidelity;
    for (const auto &c : e.components()) {
        for (const auto &o : purify_and_detect(c.state, branch)) {
            auto label = o.pattern.label();
            double w = c.weight * o.probability;
            stats.probability[label] += w;
            if (o.pattern.accepting()) {
                stats.accepted += w;
                weighted_fidelity[label] += w * fidelity(correct(o, branch), target_state(o));
            }
        }
    }
    for (const auto &[label, wf] : weighted_fidelity) {
        double prob = stats.probability[label];
        if (prob > kTolerance) stats.fidelity[label] = wf / prob;
    }
    return stats;
}

PatternStatistics oracle_statistics(const NoiseParams &p, const Branch &branch) {
    Circuit purifier = build_purifier(branch);
    std::vector<std::set<Mode>> starts;
    for (const auto &m : branch.modes()) starts.push_back({m});
    JointBasis basis = JointBasis::for_circuit(purifier, starts);
    DensityMatrix in = noisy_branch_dm(p, branch, basis);
    in.validate();
    DensityMatrix out = evolve_dm(in, purifier);
    out.validate();
    return heralded_statistics(out, branch);
}

double deviation(const PatternStatistics &engine, const PatternStatistics &oracle) {
    double worst = std::abs(engine.accepted - oracle.accepted);
    std::set<std::string> labels;
    for (const auto &[l, v] : engine.probability) labels.insert(l);
    for (const auto &[l, v] : oracle.probability) labels.insert(l);
    auto get = [](const std::map<std::string, double> &m, const std::string &l) {
        auto it = m.find(l);
        return it == m.end() ? 0.0 : it->second;
    };
    for (const auto &l : labels) {
        worst = std::max(worst, std::abs(get(engine.probability, l) - get(oracle.probability, l)));
        bool in_e = engine.fidelity.contains(l), in_o = oracle.fidelity.contains(l);
        if (in_e && in_o) {
            worst = std::max(worst, std::abs(engine.fidelity.at(l) - oracle.fidelity.at(l)));
        } else if (in_e != in_o && std::max(get(engine.probability, l), get(oracle.probability, l)) > 1e-9) {
            worst = std::max(worst, 1.0);
        }
    }
    return worst;
}

double cross_check(const NoiseParams &p, const Branch &branch) {
    return deviation(engine_statistics(p, branch), oracle_statistics(p, branch));
}

}  // namespace tbepp::oracle
