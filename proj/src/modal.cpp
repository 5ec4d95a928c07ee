#include "corowave/modal.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace corowave {

void SobolevOrder::validate(int n, bool diagnostic) const {
    if (diagnostic) return;
    const double lo = 0.5 * n - 1.0;
    const double hi = lo + 1.0 / (2.0 * n - 4.0);
    if (!(s > lo && s < hi)) {
        std::ostringstream os;
        os << "SobolevOrder: s = " << s << " outside (" << lo << ", " << hi
           << ") for n = " << n;
        throw std::invalid_argument(os.str());
    }
    if (k <= n) throw std::invalid_argument("SobolevOrder: need integer k > n");
}

ModalBasis ModalBasis::build(const RadialGrid& grid, int n) {
    if (grid.n_points > 4096)
        throw std::invalid_argument("ModalBasis: dense eigensolve capped at 4096 nodes");
    ModalBasis b;
    b.grid_ = grid;
    b.n_ = n;
    b.w_ = cell_weights(grid, n);
    const int N = grid.n_points;

    // symmetrize -Laplacian_h by D^{1/2} with D = diag(w); B = D^{1/2} A D^{-1/2}
    MatrixXd A(N, N);
    VectorXd e = VectorXd::Zero(N), col;
    for (int j = 0; j < N; ++j) {
        e[j] = 1.0;
        laplacian_apply(grid, n, e, col);
        A.col(j) = -col;
        e[j] = 0.0;
    }
    const VectorXd dh = b.w_.array().sqrt();
    MatrixXd B = dh.asDiagonal() * A * dh.cwiseInverse().asDiagonal();
    B = 0.5 * (B + B.transpose()).eval();  // symmetric up to round-off

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(B);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("ModalBasis: eigensolver failed");
    b.lambda_ = es.eigenvalues().cwiseMax(0.0);
    b.modes_ = dh.cwiseInverse().asDiagonal() * es.eigenvectors();
    b.analysis_ = b.modes_.transpose() * b.w_.asDiagonal();
    return b;
}

VectorXd ModalBasis::helmholtz(const VectorXd& f, int p) const {
    if (p != 1 && p != 2) throw std::invalid_argument("helmholtz: p must be 1 or 2");
    VectorXd a = coeffs(f);
    for (int k = 0; k < a.size(); ++k) {
        const double m = 1.0 + lambda_[k];
        a[k] /= (p == 1) ? m : m * m;
    }
    return synth(a);
}

VectorXd ModalBasis::heat(const VectorXd& f, double t) const {
    if (t < 0) throw std::domain_error("heat: t must be >= 0");
    VectorXd a = coeffs(f);
    for (int k = 0; k < a.size(); ++k) a[k] *= std::exp(-t * (1.0 + lambda_[k]));
    return synth(a);
}

SobolevNorm ModalBasis::sobolev(const StatePair& state, const SobolevOrder& order,
                                bool diagnostic) const {
    order.validate(n_, diagnostic);
    const VectorXd a = coeffs(state.u);
    const VectorXd b = coeffs(state.u_hat);
    SobolevNorm out;
    for (int k = 0; k < a.size(); ++k) {
        const double l = lambda_[k];
        out.hs_u += std::pow(l, order.s) * a[k] * a[k];
        out.hs_v += std::pow(l, order.s - 1.0) * b[k] * b[k];
        if (diagnostic) {
            // the k-seminorm amplifies the highest modes by lambda^k; it is a
            // resolution-limited diagnostic, never part of the controlling norm
            out.hk_u += std::pow(l, order.k) * a[k] * a[k];
            out.hk_v += std::pow(l, order.k - 1.0) * b[k] * b[k];
        }
    }
    out.total = std::sqrt(out.hs_u + out.hs_v);
    out.hs_u = std::sqrt(out.hs_u);
    out.hk_u = std::sqrt(out.hk_u);
    out.hs_v = std::sqrt(out.hs_v);
    out.hk_v = std::sqrt(out.hk_v);
    return out;
}

std::string ModalBasis::checksum() const {
    uint64_t hash = 1469598103934665603ULL;
    auto mix = [&hash](const void* p, size_t len) {
        const unsigned char* b = static_cast<const unsigned char*>(p);
        for (size_t i = 0; i < len; ++i) {
            hash ^= b[i];
            hash *= 1099511628211ULL;
        }
    };
    mix(lambda_.data(), sizeof(double) * lambda_.size());
    mix(&n_, sizeof(n_));
    std::ostringstream os;
    os << std::hex << hash;
    return os.str();
}

}  // namespace corowave
