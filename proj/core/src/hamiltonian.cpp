#include "daxs/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace daxs {

namespace {

void require_finite_eps(double eps) {
    if (!std::isfinite(eps)) throw InputError("detuning must be finite");
}

template <typename Matrix>
void couple(Matrix& h, int row, int col, double t) {
    h(row, col) = t;
    h(col, row) = t;
}

template <int N>
std::array<double, N> sorted_eigenvalues(const Eigen::Matrix<double, N, N>& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> solver(h, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    std::array<double, N> out{};
    for (int i = 0; i < N; ++i) out[static_cast<std::size_t>(i)] = ev(i);
    std::sort(out.begin(), out.end());
    return out;
}

TripletBlock triplet_block_unchecked(const ModelParams& p, double eps) {
    const auto& c = p.couplings;
    const auto& o = p.offsets;
    TripletBlock h = TripletBlock::Zero();
    const double left = 0.5 * eps;
    const double right = -0.5 * eps;
    h.diagonal() << left + o.l21, left + o.l21, left, left, right + o.r41, right + o.r41,
        right + o.r21, right + o.r21;
    // 0:L2V 1:L2G 2:L1V 3:L1G 4:R4V 5:R4G 6:R2V 7:R2G
    couple(h, 0, 4, c.value(Coupling::t42));
    couple(h, 1, 5, c.value(Coupling::t42));
    couple(h, 0, 6, c.value(Coupling::t22));
    couple(h, 1, 7, c.value(Coupling::t22));
    couple(h, 2, 4, c.value(Coupling::t41));
    couple(h, 3, 5, c.value(Coupling::t41));
    couple(h, 2, 6, c.value(Coupling::t21));
    couple(h, 3, 7, c.value(Coupling::t21));
    return h;
}

SingletBlock singlet_block_unchecked(const ModelParams& p, double eps) {
    const auto& c = p.couplings;
    const auto& o = p.offsets;
    SingletBlock h = SingletBlock::Zero();
    const double left = 0.5 * eps;
    const double right = -0.5 * eps;
    h.diagonal() << left + o.l21, left + o.l21, left, left, right + o.r31, right + o.r31, right;
    // 0:L2V 1:L2G 2:L1V 3:L1G 4:R3V 5:R3G 6:R1V
    couple(h, 0, 4, c.value(Coupling::t32));
    couple(h, 1, 5, c.value(Coupling::t32));
    couple(h, 0, 6, c.value(Coupling::t12));
    couple(h, 2, 4, c.value(Coupling::t31));
    couple(h, 3, 5, c.value(Coupling::t31));
    couple(h, 2, 6, c.value(Coupling::t11));
    return h;
}

}  // namespace

TripletBlock build_triplet_block(const ModelParams& params, double eps) {
    validate(params);
    require_finite_eps(eps);
    return triplet_block_unchecked(params, eps);
}

SingletBlock build_singlet_block(const ModelParams& params, double eps) {
    validate(params);
    require_finite_eps(eps);
    return singlet_block_unchecked(params, eps);
}

double SectorEnergies::energy(const BranchLabel& label, double zeeman) const {
    if (label.sector == Sector::triplet) {
        if (label.index < 0 || label.index >= kTripletBranches) {
            throw InputError("triplet branch index out of range: " + to_string(label));
        }
        return triplet[static_cast<std::size_t>(label.index)] + label.spin_z * zeeman;
    }
    if (label.index < 0 || label.index >= kSingletBranches || label.spin_z != 0) {
        throw InputError("singlet branch label out of range: " + to_string(label));
    }
    return singlet[static_cast<std::size_t>(label.index)];
}

SectorEnergies sector_energies(const ModelParams& params, double eps) {
    SectorEnergies out;
    // The triplet block is a basis permutation of diag(A, A), so its sorted
    // spectrum pairs up exactly; every second value is one collapsed branch.
    const auto t = sorted_eigenvalues<kTripletDim>(triplet_block_unchecked(params, eps));
    for (int i = 0; i < kTripletBranches; ++i) {
        out.triplet[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(2 * i)];
    }
    out.singlet = sorted_eigenvalues<kSingletDim>(singlet_block_unchecked(params, eps));
    return out;
}

std::array<double, kTripletDim + kSingletDim> raw_eigenvalues(const ModelParams& params,
                                                              double eps) {
    validate(params);
    require_finite_eps(eps);
    const auto t = sorted_eigenvalues<kTripletDim>(triplet_block_unchecked(params, eps));
    const auto s = sorted_eigenvalues<kSingletDim>(singlet_block_unchecked(params, eps));
    std::array<double, kTripletDim + kSingletDim> all{};
    std::copy(t.begin(), t.end(), all.begin());
    std::copy(s.begin(), s.end(), all.begin() + kTripletDim);
    std::sort(all.begin(), all.end());
    return all;
}

std::vector<BranchLabel> branch_labels(double zeeman) {
    std::vector<BranchLabel> labels;
    for (int i = 0; i < kTripletBranches; ++i) {
        if (zeeman > 0.0) {
            for (int m : {-1, 0, 1}) labels.push_back({Sector::triplet, i, m});
        } else {
            labels.push_back({Sector::triplet, i, 0});
        }
    }
    for (int i = 0; i < kSingletBranches; ++i) labels.push_back({Sector::singlet, i, 0});
    return labels;
}

std::vector<Branch> eigen_branches(const ModelParams& params, double eps) {
    validate(params);
    require_finite_eps(eps);
    const SectorEnergies e = sector_energies(params, eps);
    std::vector<Branch> out;
    for (const auto& label : branch_labels(params.zeeman)) {
        out.push_back({label, e.energy(label, params.zeeman)});
    }
    return out;
}

std::array<SignAssignment, 2> sign_class_representatives() {
    SignAssignment positive;
    positive.fill(+1);
    SignAssignment mixed = positive;
    mixed[static_cast<std::size_t>(Coupling::t21)] = -1;
    mixed[static_cast<std::size_t>(Coupling::t11)] = -1;
    return {positive, mixed};
}

const SignAssignment& representative(SignClass c) {
    static const auto reps = sign_class_representatives();
    return reps[c == SignClass::all_positive ? 0 : 1];
}

TunnelCouplings apply_signs(const TunnelCouplings& couplings, const SignAssignment& signs) {
    TunnelCouplings out = couplings;
    for (Coupling c : kAllCouplings) {
        out[c].sign = signs[static_cast<std::size_t>(c)] < 0 ? -1 : +1;
    }
    return out;
}

}  // namespace daxs
