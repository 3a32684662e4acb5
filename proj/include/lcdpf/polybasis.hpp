#pragma once

#include "lcdpf/gaussfilter.hpp"

#include <Eigen/Core>
#include <Eigen/QR>

#include <stdexcept>
#include <vector>

namespace lcdpf {

/// All multi-indices of total degree ≤ `degree` in `dim` variables, one per
/// row, in graded lexicographic order: by total degree, then by decreasing
/// power of the first variable. Row 0 is the constant monomial.
inline Eigen::MatrixXi enumerate_exponents(int dim, int degree) {
    if (dim < 1 || degree < 0) throw std::invalid_argument("exponent enumeration needs dim >= 1, degree >= 0");
    std::vector<Eigen::VectorXi> rows;
    Eigen::VectorXi current(dim);
    // Fill positions [pos, dim) with exactly `remaining` total degree.
    auto fill = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == dim - 1) {
            current(pos) = remaining;
            rows.push_back(current);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            current(pos) = e;
            self(self, pos + 1, remaining - e);
        }
    };
    for (int total = 0; total <= degree; ++total) fill(fill, 0, total);

    Eigen::MatrixXi out(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    return out;
}

/// binom(degree + dim, dim).
inline long basis_size(int dim, int degree) {
    long num = 1;
    for (int i = 1; i <= dim; ++i) num = num * (degree + i) / i;
    return num;
}

/// Affine whitening y = L⁻¹(x - c).
template <typename Scalar>
struct Whitening {
    Vec<Scalar> center;
    Mat<Scalar> lower;

    template <typename Derived>
    Vec<Scalar> apply(const Eigen::MatrixBase<Derived>& x) const {
        return lower.template triangularView<Eigen::Lower>().solve((x - center).eval());
    }

    static Whitening identity(Eigen::Index dim) { return {Vec<Scalar>::Zero(dim), Mat<Scalar>::Identity(dim, dim)}; }
};

/// c = mean, L = chol(cov). Throws if cov is not positive definite.
template <typename Scalar>
Whitening<Scalar> make_whitening(const GaussianBelief<Scalar>& b) {
    return {b.mean, cholesky_lower(b.cov)};
}

/// Monomials φ_r(x) = Π_i y_i^{e_ri} in whitened coordinates y.
/// `include_constant` decides whether the constant coefficient is part of the
/// consensus payload; the constant is always fitted.
template <typename Scalar>
struct MonomialBasis {
    int degree = 0;
    Eigen::MatrixXi exponents;
    Whitening<Scalar> whitening;
    bool include_constant = false;

    MonomialBasis() = default;
    MonomialBasis(int dim, int deg, Whitening<Scalar> w, bool with_constant = false)
        : degree(deg), exponents(enumerate_exponents(dim, deg)), whitening(std::move(w)),
          include_constant(with_constant) {}

    Eigen::Index dim() const { return exponents.cols(); }
    Eigen::Index size() const { return exponents.rows(); }
    /// Number of coefficients exchanged by consensus.
    Eigen::Index payload_size() const { return include_constant ? size() : size() - 1; }
};

template <typename Scalar, typename Derived>
Vec<Scalar> eval_basis(const MonomialBasis<Scalar>& basis, const Eigen::MatrixBase<Derived>& x) {
    const Vec<Scalar> y = basis.whitening.apply(x);
    const Eigen::Index m = basis.dim();
    Mat<Scalar> powers(m, basis.degree + 1);
    powers.col(0).setOnes();
    for (int p = 1; p <= basis.degree; ++p) powers.col(p) = powers.col(p - 1).cwiseProduct(y);

    Vec<Scalar> out(basis.size());
    for (Eigen::Index r = 0; r < basis.size(); ++r) {
        Scalar v(1);
        for (Eigen::Index i = 0; i < m; ++i) v *= powers(i, basis.exponents(r, i));
        out(r) = v;
    }
    return out;
}

/// J x R design matrix; `points` holds one state per column.
template <typename Scalar, typename Derived>
Mat<Scalar> design_matrix(const MonomialBasis<Scalar>& basis, const Eigen::MatrixBase<Derived>& points) {
    Mat<Scalar> phi(points.cols(), basis.size());
    for (Eigen::Index j = 0; j < points.cols(); ++j) phi.row(j) = eval_basis(basis, points.col(j)).transpose();
    return phi;
}

template <typename Scalar>
struct LeastSquaresFit {
    Vec<Scalar> coefficients;
    Eigen::Index rank = 0;
    bool rank_deficient = false;
};

/// Minimum-norm least-squares coefficients via column-pivoted complete
/// orthogonal decomposition. Rank deficiency is reported, not thrown.
template <typename Scalar, typename DerivedX, typename DerivedT>
LeastSquaresFit<Scalar> fit_least_squares(const MonomialBasis<Scalar>& basis, const Eigen::MatrixBase<DerivedX>& points,
                                          const Eigen::MatrixBase<DerivedT>& targets) {
    if (points.cols() != targets.size()) throw std::invalid_argument("one target per data point required");
    const Mat<Scalar> phi = design_matrix(basis, points);
    Eigen::CompleteOrthogonalDecomposition<Mat<Scalar>> cod(phi);
    LeastSquaresFit<Scalar> fit;
    fit.coefficients = cod.solve(Vec<Scalar>(targets));
    fit.rank = cod.rank();
    fit.rank_deficient = fit.rank < basis.size();
    return fit;
}

}  // namespace lcdpf
