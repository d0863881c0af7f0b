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

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tbepp/channels.hpp"
#include "tbepp/optics.hpp"
#include "tbepp/protocol.hpp"
#include "tbepp/state.hpp"

// Brute-force density-matrix reference. Elements are re-derived here as
// explicit permutation and Hadamard matrices; nothing in this module calls
// the state-vector element code.
namespace tbepp::oracle {

/// Delays 0..kDefaultMaxDelay are representable; the protocol only needs 0 and 1.
inline constexpr int kDefaultMaxDelay = 3;

using Matrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<std::complex<double>>;

/// Single-photon basis: every (mode, polarization, delay) with delay <= max_delay.
class LocalBasis {
   public:
    LocalBasis(std::vector<Mode> modes, int max_delay);

    std::size_t dim() const { return modes_.size() * 2 * static_cast<std::size_t>(max_delay_ + 1); }
    int max_delay() const { return max_delay_; }
    const std::vector<Mode> &modes() const { return modes_; }
    bool has(const Mode &m) const;

    /// nullopt if the mode is not in the basis or the delay overflows.
    std::optional<std::size_t> index(const PhotonBasis &p) const;
    std::size_t index(const Mode &m, Polarization pol, int delay) const;
    PhotonBasis at(std::size_t i) const;

   private:
    std::vector<Mode> modes_;
    std::map<Mode, std::size_t> slot_;
    int max_delay_;
};

/// Tensor product of per-photon bases; photon 0 is the most significant digit.
class JointBasis {
   public:
    explicit JointBasis(std::vector<LocalBasis> photons);

    /// Each photon's basis spans the modes reachable from its starting modes
    /// through the circuit's wiring.
    static JointBasis for_circuit(const Circuit &c, std::span<const std::set<Mode>> start_modes,
                                  int max_delay = kDefaultMaxDelay);

    std::size_t dim() const { return dim_; }
    std::size_t photon_count() const { return photons_.size(); }
    const LocalBasis &photon(std::size_t k) const { return photons_[k]; }

    /// Throws std::invalid_argument on unknown modes or delay overflow (naming the D_max needed).
    std::size_t index(const BasisKet &ket) const;
    BasisKet ket(std::size_t i) const;
    std::vector<std::size_t> digits(std::size_t i) const;

   private:
    std::vector<LocalBasis> photons_;
    std::size_t dim_ = 1;
};

struct DensityMatrix {
    JointBasis basis;
    SparseMatrix rho;

    double trace() const;
    /// max |rho - rho^dagger|.
    double hermiticity_error() const;
    /// Smallest eigenvalue restricted to the support (rows with nonzero entries).
    double min_eigenvalue() const;
    /// Throws ConsistencyError unless Hermitian and unit-trace within tol and PSD within 1e-10.
    void validate(double tol = kTolerance) const;
    /// <v|rho|v> for a sparse vector given as (index, amplitude) pairs.
    std::complex<double> expectation(std::span<const std::pair<std::size_t, std::complex<double>>> v) const;
};

DensityMatrix dm_from_ensemble(const Ensemble &e, const JointBasis &basis);

/// The circuit as an explicit unitary on one photon's basis.
Matrix local_unitary(const Circuit &c, const LocalBasis &basis);
/// max |U^dagger U - I|.
double unitarity_error(const Matrix &u);
/// Full Kronecker-product unitary over the joint basis. Only for small bases.
SparseMatrix circuit_unitary(const Circuit &c, const JointBasis &basis);

/// U rho U^dagger (or U^dagger rho U when `inverse`). Throws ConsistencyError
/// if an assembled per-photon matrix deviates from unitarity by more than 1e-10.
DensityMatrix evolve_dm(const DensityMatrix &d, const Circuit &c, bool inverse = false);

/// Bell-diagonal polarization (photons 0, 1) times the branch's time-bin pair,
/// with per-side collective phases and photon-B dephasing, built directly from
/// the Bell-state definitions.
DensityMatrix noisy_branch_dm(const NoiseParams &p, const Branch &branch, const JointBasis &basis);

/// Per-pattern detection probability and post-correction fidelity to GHZ+ at
/// common delay 1.
struct PatternStatistics {
    std::map<std::string, double> probability;
    std::map<std::string, double> fidelity;
    double accepted = 0.0;

    /// Probability-weighted mean corrected fidelity over accepting patterns.
    double mean_fidelity() const;
};

PatternStatistics heralded_statistics(const DensityMatrix &out, const Branch &branch);
/// Same statistics from the state-vector engine (ensemble route).
PatternStatistics engine_statistics(const NoiseParams &p, const Branch &branch);
/// Same statistics from the oracle route.
PatternStatistics oracle_statistics(const NoiseParams &p, const Branch &branch);

/// max over patterns of |engine - oracle| for probabilities and fidelities.
double deviation(const PatternStatistics &engine, const PatternStatistics &oracle);
double cross_check(const NoiseParams &p, const Branch &branch);

}  // namespace tbepp::oracle
