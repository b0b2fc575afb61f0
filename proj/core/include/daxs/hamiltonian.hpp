#pragma once

// Block Hamiltonian H = diag(H_T, H_S) of the (1,3)-(0,4) double dot.
//
// Triplet basis order: L2V L2G L1V L1G R4V R4G R2V R2G
// Singlet basis order: L2V L2G L1V L1G R3V R3G R1V
//
// Left-dot states sit at +eps/2 (+ l21), right-dot states at -eps/2 (+ r_i1).
// The valley phase is fixed at zero, so the triplet block is two identical
// uncoupled copies; the singlet block is not, because R1 has a single valley
// state.

#include <array>
#include <vector>

#include <Eigen/Core>

#include "daxs/model.hpp"

namespace daxs {

inline constexpr int kTripletDim = 8;
inline constexpr int kSingletDim = 7;
/// Distinct triplet branches after collapsing the two identical valley copies.
inline constexpr int kTripletBranches = 4;
inline constexpr int kSingletBranches = 7;

using TripletBlock = Eigen::Matrix<double, kTripletDim, kTripletDim>;
using SingletBlock = Eigen::Matrix<double, kSingletDim, kSingletDim>;

TripletBlock build_triplet_block(const ModelParams& params, double eps);
SingletBlock build_singlet_block(const ModelParams& params, double eps);

/// Zero-field sorted branch energies of both sectors at one detuning.
struct SectorEnergies {
    std::array<double, kTripletBranches> triplet{};
    std::array<double, kSingletBranches> singlet{};

    /// Energy of a labeled branch; triplet spin_z adds spin_z * zeeman.
    /// Throws InputError for an index outside the sector.
    double energy(const BranchLabel& label, double zeeman) const;
};

/// Fast path used by the renderers and the global fit. Skips validation.
SectorEnergies sector_energies(const ModelParams& params, double eps);

/// All 15 eigenvalues of the assembled Hamiltonian, ascending.
std::array<double, kTripletDim + kSingletDim> raw_eigenvalues(const ModelParams& params,
                                                              double eps);

struct Branch {
    BranchLabel label;
    double energy = 0.0;
};

/// Labeled branches: triplets first (each replicated at -E_Z, 0, +E_Z when
/// zeeman > 0), then singlets. Within a sector indices follow ascending energy.
std::vector<Branch> eigen_branches(const ModelParams& params, double eps);

/// Every branch label eigen_branches can produce for the given zeeman energy.
std::vector<BranchLabel> branch_labels(double zeeman);

using SignAssignment = std::array<int, 8>;

enum class SignClass { all_positive, one_negative_per_sector };

/// Representatives of the two coupling-sign equivalence classes:
/// [0] all positive, [1] t21 and t11 negative.
std::array<SignAssignment, 2> sign_class_representatives();

const SignAssignment& representative(SignClass c);

/// Copy of `couplings` with signs replaced by `signs` (magnitudes kept).
TunnelCouplings apply_signs(const TunnelCouplings& couplings, const SignAssignment& signs);

}  // namespace daxs
