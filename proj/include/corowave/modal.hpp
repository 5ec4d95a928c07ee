#pragma once

#include <cstdint>
#include <string>

#include "corowave/grid.hpp"

namespace corowave {

// Fractional/integer Sobolev orders (s, k). The admissible window for the
// ambient dimension n is n/2-1 < s < n/2-1 + 1/(2n-4) and integer k > n.
struct SobolevOrder {
    double s = 1.6;
    int k = 6;

    // Throws std::invalid_argument outside the window unless diagnostic=true.
    void validate(int n, bool diagnostic = false) const;
};

struct SobolevNorm {
    double hs_u = 0, hk_u = 0;  // lambda^s and lambda^k parts of u
    double hs_v = 0, hk_v = 0;  // lambda^{s-1} and lambda^{k-1} parts of u_hat
    double total = 0;           // pair norm sqrt(hs_u^2 + hs_v^2); never includes hk
};

// Dense eigen-decomposition of -Laplacian_h on a radial grid, orthonormal in
// the weighted inner product sum f_j g_j w_j over cell volumes w. Immutable after build.
class ModalBasis {
  public:
    static ModalBasis build(const RadialGrid& grid, int n);

    const RadialGrid& grid() const { return grid_; }
    int dim_n() const { return n_; }
    int size() const { return static_cast<int>(lambda_.size()); }
    const VectorXd& eigenvalues() const { return lambda_; }
    double lambda(int k) const { return lambda_[k]; }
    const VectorXd& weights() const { return w_; }
    VectorXd mode(int k) const { return modes_.col(k); }
    const MatrixXd& modes() const { return modes_; }

    // coefficients a_k = <f, e_k>_w and the inverse synthesis
    VectorXd coeffs(const VectorXd& f) const { return analysis_ * f; }
    VectorXd synth(const VectorXd& a) const { return modes_ * a; }

    // (I - Laplacian)^{-p}, p in {1, 2}; exact on the discrete operator
    VectorXd helmholtz(const VectorXd& f, int p) const;
    // heat semigroup e^{t(Laplacian - I)}; t >= 0
    VectorXd heat(const VectorXd& f, double t) const;

    SobolevNorm sobolev(const StatePair& state, const SobolevOrder& order,
                        bool diagnostic = false) const;

    // FNV-1a over the eigenvalue bytes; identifies grid+dimension in manifests
    std::string checksum() const;

  private:
    RadialGrid grid_;
    int n_ = 0;
    VectorXd lambda_;
    MatrixXd modes_;     // columns e_k on the grid
    MatrixXd analysis_;  // modes^T diag(w)
    VectorXd w_;
};

}  // namespace corowave
