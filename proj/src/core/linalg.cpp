#include "taoquant/linalg.hpp"

#include <cmath>

#include "taoquant/errors.hpp"
#include "taoquant/kernels.hpp"

namespace taoquant::linalg {

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw Error("matmul: shape mismatch");
    Mat c(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        auto out = c.col(j);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) continue;
            const auto ak = a.col(k);
            for (std::size_t i = 0; i < a.rows(); ++i) out[i] += ak[i] * bkj;
        }
    }
    return c;
}

Mat gram(const Mat& x) {
    Mat g(x.cols(), x.cols());
    for (std::size_t i = 0; i < x.cols(); ++i) {
        for (std::size_t j = i; j < x.cols(); ++j) {
            const double v = kernels::dot(x.col(i), x.col(j));
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

std::vector<double> tvec(const Mat& x, std::span<const double> y) {
    if (y.size() != x.rows()) throw Error("tvec: shape mismatch");
    std::vector<double> out(x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) out[j] = kernels::dot(x.col(j), y);
    return out;
}

Cholesky::Cholesky(const Mat& a, const std::vector<std::string>& names) : l_(a.rows(), a.cols()) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw Error("cholesky: matrix not square");

    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
    const double tol = 1e-12 * std::max(max_diag, 1.0);

    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
        if (!(d > tol)) {
            std::vector<std::string> cols;
            if (j < names.size()) cols.push_back(names[j]);
            const std::string label = cols.empty() ? "column " + std::to_string(j) : cols[0];
            throw SingularDesignError("singular design: " + label +
                                          " is collinear with the preceding columns",
                                      cols);
        }
        const double ljj = std::sqrt(d);
        l_(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
            l_(i, j) = s / ljj;
        }
    }
}

std::vector<double> Cholesky::solve(std::span<const double> b) const {
    const std::size_t n = l_.rows();
    if (b.size() != n) throw Error("cholesky solve: shape mismatch");
    std::vector<double> x(b.begin(), b.end());
    // Ly = b
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * x[k];
        x[i] = s / l_(i, i);
    }
    // L'x = y
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * x[k];
        x[ii] = s / l_(ii, ii);
    }
    return x;
}

Mat Cholesky::inverse() const {
    const std::size_t n = l_.rows();
    Mat inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const auto x = solve(e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = x[i];
        e[j] = 0.0;
    }
    return inv;
}

double Cholesky::inv_quad(std::span<const double> v) const {
    const auto x = solve(v);
    return kernels::dot(v, x);
}

}  // namespace taoquant::linalg
