#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <variant>
#include <vector>

#include "fermigas/geometry.hpp"
#include "fermigas/special.hpp"
#include "fermigas/spectral.hpp"
#include "fermigas/weyl.hpp"

// Rescaled one-body matrix of the lowest-N spectral projector, its shifted
// variant, the one-body density, the pair correlation, and the universal
// Bessel-form limit curves they converge to.

namespace fermigas {

enum class FieldKind { Q, Q_shifted, P, rho };

/// Symmetric tensor lattice for the relative coordinate: every axis carries
/// the values {-M dy, ..., 0, ..., M dy} with M = round(extent / spacing).
struct TensorYLattice {
    int dim = 2;
    double extent = 0.0;
    double spacing = 0.0;
    std::vector<double> axis;

    TensorYLattice() = default;
    TensorYLattice(int n, double R, double dy) : dim(n), extent(R), spacing(dy) {
        const int M = static_cast<int>(std::lround(R / dy));
        axis.reserve(static_cast<std::size_t>(2 * M + 1));
        for (int i = -M; i <= M; ++i) axis.push_back(i * dy);
    }

    std::size_t per_axis() const { return axis.size(); }
    std::size_t size() const {
        std::size_t s = axis.size() * axis.size();
        if (dim == 3) s *= axis.size();
        return s;
    }
    /// Linear index decomposition (first axis slowest, matching the storage).
    Point point(std::size_t flat) const {
        const std::size_t m = axis.size();
        Point y{0.0, 0.0, 0.0};
        if (dim == 2) {
            y[0] = axis[flat / m];
            y[1] = axis[flat % m];
        } else {
            y[0] = axis[flat / (m * m)];
            y[1] = axis[(flat / m) % m];
            y[2] = axis[flat % m];
        }
        return y;
    }
    double abs_y(std::size_t flat) const {
        const Point y = point(flat);
        return std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    }
    std::size_t flat_of(std::size_t i0, std::size_t i1, std::size_t i2 = 0) const {
        const std::size_t m = axis.size();
        return dim == 2 ? i0 * m + i1 : (i0 * m + i1) * m + i2;
    }
    std::size_t center_index() const {
        const std::size_t c = axis.size() / 2;
        return dim == 2 ? flat_of(c, c) : flat_of(c, c, c);
    }
};

struct CorrelationField {
    FieldKind kind = FieldKind::Q;
    int N = 0;
    int dim = 2;
    double h = 0.0;  // N^{-1/dim}
    std::uint64_t basis_hash = 0;
    std::vector<Point> x_samples;
    double x_weight = 0.0;  // quadrature measure carried by one x sample
    TensorYLattice y;       // empty axis for rho fields
    Eigen::MatrixXd values; // x-major: values(xi, flat_y)
};

namespace corrdetail {

/// Per-axis factor tables for separable box bases. W(t,j) and Z(t,j) hold the
/// normalized 1-d factors of mode index j at w_a(t) and z_a(t); the zero
/// extension is per-axis exact for boxes.
struct PairTables {
    std::array<Eigen::MatrixXd, 3> W, Z;
};

inline PairTables box_pair_tables(const EigenBasis& basis, const Point& x, double h,
                                  const TensorYLattice& y, bool half_shift) {
    const auto& ar = basis.analytic_rep();
    const int dim = static_cast<int>(ar.lengths.size());
    const int jmax = basis.max_mode_index() + 1;
    const auto m = static_cast<int>(y.per_axis());
    PairTables T;
    std::vector<double> buf(static_cast<std::size_t>(jmax));
    for (int a = 0; a < dim; ++a) {
        T.W[static_cast<std::size_t>(a)].resize(m, jmax);
        T.Z[static_cast<std::size_t>(a)].resize(m, jmax);
        for (int t = 0; t < m; ++t) {
            const double dy = y.axis[static_cast<std::size_t>(t)];
            const double w = x[static_cast<std::size_t>(a)] + (half_shift ? 0.5 : 1.0) * h * dy;
            const double z = half_shift ? x[static_cast<std::size_t>(a)] - 0.5 * h * dy
                                        : x[static_cast<std::size_t>(a)];
            basis.axis_table(a, w, buf.data(), jmax);
            for (int j = 0; j < jmax; ++j) T.W[static_cast<std::size_t>(a)](t, j) = buf[static_cast<std::size_t>(j)];
            basis.axis_table(a, z, buf.data(), jmax);
            for (int j = 0; j < jmax; ++j) T.Z[static_cast<std::size_t>(a)](t, j) = buf[static_cast<std::size_t>(j)];
        }
    }
    return T;
}

/// sum_k coeff_k u_k(w(x,y)) u_k(z(x,y)) over the whole tensor y-lattice for
/// one x, written into `out` (flat y-major layout).
inline void box_pair_sum(const EigenBasis& basis, const std::vector<int>& modes,
                         const std::vector<double>& coeff, const Point& x, double h,
                         const TensorYLattice& y, bool half_shift, double* out) {
    const auto& ar = basis.analytic_rep();
    const int dim = static_cast<int>(ar.lengths.size());
    const int jmax = basis.max_mode_index() + 1;
    const auto m = static_cast<int>(y.per_axis());
    PairTables T = box_pair_tables(basis, x, h, y, half_shift);
    std::array<Eigen::MatrixXd, 3> q;
    for (int a = 0; a < dim; ++a)
        q[static_cast<std::size_t>(a)] =
            T.W[static_cast<std::size_t>(a)].cwiseProduct(T.Z[static_cast<std::size_t>(a)]);

    if (dim == 2) {
        Eigen::MatrixXd occ = Eigen::MatrixXd::Zero(jmax, jmax);
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const auto& md = ar.modes[static_cast<std::size_t>(modes[i])];
            occ(md[0], md[1]) += coeff[i];
        }
        Eigen::MatrixXd field = q[0] * occ * q[1].transpose();  // (t0, t1)
        // storage is flat row-major in (t0, t1); the map is column-major
        Eigen::Map<Eigen::MatrixXd>(out, m, m) = field.transpose();
        return;
    }

    // dim == 3: contract axis 3 within (j1,j2) groups, then the outer two.
    // bucket modes by (j1, j2)
    std::vector<std::vector<std::pair<int, double>>> bucket(
        static_cast<std::size_t>(jmax) * jmax);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto& md = ar.modes[static_cast<std::size_t>(modes[i])];
        bucket[static_cast<std::size_t>(md[0]) * jmax + md[1]].emplace_back(md[2], coeff[i]);
    }
    // s(j1,j2; t3) = sum_{j3} coeff q3(t3, j3)
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<int>(jmax) * jmax, m);
    for (int j1 = 0; j1 < jmax; ++j1)
        for (int j2 = 0; j2 < jmax; ++j2) {
            const auto& bk = bucket[static_cast<std::size_t>(j1) * jmax + j2];
            if (bk.empty()) continue;
            auto row = s.row(j1 * jmax + j2);
            for (const auto& [j3, c] : bk) row += c * q[2].col(j3).transpose();
        }
    // out(t1,t2,t3) = sum_{j1,j2} q1(t1,j1) q2(t2,j2) s(j1 j2, t3)
    for (int t1 = 0; t1 < m; ++t1) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);  // (t2, t3)
        for (int j1 = 0; j1 < jmax; ++j1) {
            const double w1 = q[0](t1, j1);
            if (w1 == 0.0) continue;
            for (int j2 = 0; j2 < jmax; ++j2) {
                const auto row = s.row(j1 * jmax + j2);
                if (row.isZero(0)) continue;
                acc.noalias() += (w1 * q[1].col(j2)) * row;
            }
        }
        for (int t2 = 0; t2 < m; ++t2)
            for (int t3 = 0; t3 < m; ++t3)
                out[(static_cast<std::size_t>(t1) * m + t2) * m + t3] = acc(t2, t3);
    }
}

/// Generic pair sum through evaluate_all, for grid bases or scattered points.
inline void generic_pair_sum(const EigenBasis& basis, int nmodes,
                             const Point& x, double h, const TensorYLattice& y,
                             bool half_shift, double inv_n, double* out) {
    std::vector<double> valw(static_cast<std::size_t>(nmodes));
    std::vector<double> valz(static_cast<std::size_t>(nmodes));
    const std::size_t ny = y.size();
    Point z_fixed = x;
    if (!half_shift) basis.evaluate_all(z_fixed, nmodes, valz.data());
    for (std::size_t q = 0; q < ny; ++q) {
        const Point dy = y.point(q);
        Point w = x, z = x;
        for (int a = 0; a < 3; ++a) {
            const double s = half_shift ? 0.5 : 1.0;
            w[static_cast<std::size_t>(a)] += s * h * dy[static_cast<std::size_t>(a)];
            if (half_shift) z[static_cast<std::size_t>(a)] -= 0.5 * h * dy[static_cast<std::size_t>(a)];
        }
        basis.evaluate_all(w, nmodes, valw.data());
        if (half_shift) basis.evaluate_all(z, nmodes, valz.data());
        double acc = 0.0;
        for (int k = 0; k < nmodes; ++k)
            acc += valw[static_cast<std::size_t>(k)] * valz[static_cast<std::size_t>(k)];
        out[q] = inv_n * acc;
    }
}

}  // namespace corrdetail

/// Q_N(x,y) = N^{-1} sum_{k<N} u_k(x + h y/2) u_k(x - h y/2), h = N^{-1/n}.
inline CorrelationField one_body_matrix(const EigenBasis& basis, int N,
                                        const std::vector<Point>& x_samples,
                                        const TensorYLattice& y,
                                        double x_weight = 0.0) {
    if (N > basis.size())
        throw NTooLarge("N=" + std::to_string(N) + " exceeds basis size " +
                        std::to_string(basis.size()));
    CorrelationField f;
    f.kind = FieldKind::Q;
    f.N = N;
    f.dim = basis.domain.dim;
    f.h = std::pow(static_cast<double>(N), -1.0 / f.dim);
    f.basis_hash = basis.hash();
    f.x_samples = x_samples;
    f.x_weight = x_weight;
    f.y = y;
    f.values.resize(static_cast<Eigen::Index>(x_samples.size()),
                    static_cast<Eigen::Index>(y.size()));
    const double inv_n = 1.0 / N;

    if (basis.analytic()) {
        std::vector<int> modes(static_cast<std::size_t>(N));
        std::vector<double> coeff(static_cast<std::size_t>(N), inv_n);
        for (int k = 0; k < N; ++k) modes[static_cast<std::size_t>(k)] = k;
#pragma omp parallel for schedule(dynamic)
        for (std::size_t xi = 0; xi < x_samples.size(); ++xi)
            corrdetail::box_pair_sum(basis, modes, coeff, x_samples[xi], f.h, y, true,
                                     f.values.row(static_cast<Eigen::Index>(xi)).data());
    } else {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t xi = 0; xi < x_samples.size(); ++xi)
            corrdetail::generic_pair_sum(basis, N, x_samples[xi], f.h, y, true, inv_n,
                                         f.values.row(static_cast<Eigen::Index>(xi)).data());
    }
    return f;
}

/// Shifted variant: Q~_N(x,y) = Q_N(x + h y / 2, y) = N^{-1} sum u_k(x+hy) u_k(x).
inline CorrelationField one_body_matrix_shifted(const EigenBasis& basis, int N,
                                                const std::vector<Point>& x_samples,
                                                const TensorYLattice& y,
                                                double x_weight = 0.0) {
    if (N > basis.size()) throw NTooLarge("N exceeds basis size");
    CorrelationField f;
    f.kind = FieldKind::Q_shifted;
    f.N = N;
    f.dim = basis.domain.dim;
    f.h = std::pow(static_cast<double>(N), -1.0 / f.dim);
    f.basis_hash = basis.hash();
    f.x_samples = x_samples;
    f.x_weight = x_weight;
    f.y = y;
    f.values.resize(static_cast<Eigen::Index>(x_samples.size()),
                    static_cast<Eigen::Index>(y.size()));
    const double inv_n = 1.0 / N;
    if (basis.analytic()) {
        std::vector<int> modes(static_cast<std::size_t>(N));
        std::vector<double> coeff(static_cast<std::size_t>(N), inv_n);
        for (int k = 0; k < N; ++k) modes[static_cast<std::size_t>(k)] = k;
#pragma omp parallel for schedule(dynamic)
        for (std::size_t xi = 0; xi < x_samples.size(); ++xi)
            corrdetail::box_pair_sum(basis, modes, coeff, x_samples[xi], f.h, y, false,
                                     f.values.row(static_cast<Eigen::Index>(xi)).data());
    } else {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t xi = 0; xi < x_samples.size(); ++xi)
            corrdetail::generic_pair_sum(basis, N, x_samples[xi], f.h, y, false, inv_n,
                                         f.values.row(static_cast<Eigen::Index>(xi)).data());
    }
    return f;
}

/// rho_{1,N}(x) = N^{-1} sum_{k<N} |u_k(x)|^2.
inline CorrelationField one_body_density(const EigenBasis& basis, int N,
                                         const std::vector<Point>& x_samples,
                                         double x_weight = 0.0) {
    if (N > basis.size()) throw NTooLarge("N exceeds basis size");
    CorrelationField f;
    f.kind = FieldKind::rho;
    f.N = N;
    f.dim = basis.domain.dim;
    f.h = std::pow(static_cast<double>(N), -1.0 / f.dim);
    f.basis_hash = basis.hash();
    f.x_samples = x_samples;
    f.x_weight = x_weight;
    f.values.resize(static_cast<Eigen::Index>(x_samples.size()), 1);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t xi = 0; xi < x_samples.size(); ++xi) {
        std::vector<double> vals(static_cast<std::size_t>(N));
        basis.evaluate_all(x_samples[xi], N, vals.data());
        double acc = 0.0;
        for (double v : vals) acc += v * v;
        f.values(static_cast<Eigen::Index>(xi), 0) = acc / N;
    }
    return f;
}

/// P_N = -|Q_N|^2 / 2, pointwise.
inline CorrelationField pair_correlation(const CorrelationField& q) {
    if (q.kind != FieldKind::Q)
        throw KindMismatch("pair_correlation needs a one-body (Q) field");
    CorrelationField p = q;
    p.kind = FieldKind::P;
    p.values = -0.5 * q.values.cwiseProduct(q.values);
    return p;
}

/// Limit curve of Q_N at |y| = r (x-independent inside the domain).
inline double limit_Q_at(const DomainSpec& domain, double r) {
    return special::limit_profile(domain.dim, gamma_omega(domain) * r) / domain.volume;
}

/// Limit curve of P_N at |y| = r; equals -limit_Q^2/2.
inline double limit_P_at(const DomainSpec& domain, double r) {
    const double q = limit_Q_at(domain, r);
    return -0.5 * q * q;
}

inline std::vector<double> limit_Q(const DomainSpec& domain, const TensorYLattice& y) {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = limit_Q_at(domain, y.abs_y(i));
    return out;
}

inline std::vector<double> limit_P(const DomainSpec& domain, const TensorYLattice& y) {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = limit_P_at(domain, y.abs_y(i));
    return out;
}

struct ErrorNorms {
    double sup_on_compact = 0.0;
    double L1_global = 0.0;
    double L2_global = 0.0;
};

/// Norms of field - oracle. The sup restricts x to the compact subset; the
/// global norms integrate over the sampled lattice with the field's carried
/// x weight and the y-lattice cell measure.
inline ErrorNorms error_norms(const CorrelationField& field,
                              const std::vector<double>& oracle,
                              const CompactSubset& subset) {
    if (static_cast<std::size_t>(field.values.cols()) != oracle.size() &&
        !(field.kind == FieldKind::rho && oracle.size() == 1))
        throw LatticeMismatch("oracle length does not match field lattice");
    ErrorNorms n;
    const double wy = field.kind == FieldKind::rho
                          ? 1.0
                          : std::pow(field.y.spacing, field.dim);
    const double wx = field.x_weight > 0.0 ? field.x_weight : 1.0;
    for (std::size_t xi = 0; xi < field.x_samples.size(); ++xi) {
        const bool in_subset = subset.contains(field.x_samples[xi]);
        for (Eigen::Index q = 0; q < field.values.cols(); ++q) {
            const double d = field.values(static_cast<Eigen::Index>(xi), q) -
                             (oracle.size() == 1 ? oracle[0]
                                                 : oracle[static_cast<std::size_t>(q)]);
            const double a = std::abs(d);
            if (in_subset) n.sup_on_compact = std::max(n.sup_on_compact, a);
            n.L1_global += a * wx * wy;
            n.L2_global += d * d * wx * wy;
        }
    }
    n.L2_global = std::sqrt(n.L2_global);
    return n;
}

/// Lattice value of the squared L^2 norm of Q_N under the measure-preserving
/// (w,z) change of variables: N^{-1} ||Gram||_F^2 with the Gram matrix taken
/// over the interior lattice at the given resolution. Exactly 1 in exact
/// arithmetic while the lattice resolves every mode.
inline double one_body_l2_norm_sq(const EigenBasis& basis, int N, int resolution) {
    if (N > basis.size()) throw NTooLarge("N exceeds basis size");
    if (basis.analytic()) {
        const auto& ar = basis.analytic_rep();
        const int dim = static_cast<int>(ar.lengths.size());
        const int jmax = basis.max_mode_index() + 1;
        std::array<Eigen::MatrixXd, 3> gram;
        for (int a = 0; a < dim; ++a) {
            const double L = ar.lengths[static_cast<std::size_t>(a)];
            const int M = static_cast<int>(std::lround(L * resolution)) - 1;
            if (M < jmax)
                throw LatticeMismatch("resolution too coarse for the mode content");
            const double dx = L / (M + 1);
            Eigen::MatrixXd tab(M, jmax);
            std::vector<double> buf(static_cast<std::size_t>(jmax));
            for (int i = 0; i < M; ++i) {
                basis.axis_table(a, (i + 1) * dx, buf.data(), jmax);
                for (int j = 0; j < jmax; ++j) tab(i, j) = buf[static_cast<std::size_t>(j)];
            }
            gram[static_cast<std::size_t>(a)] = tab.transpose() * tab * dx;
        }
        double acc = 0.0;
        for (int k = 0; k < N; ++k)
            for (int mth = 0; mth < N; ++mth) {
                const auto& jk = ar.modes[static_cast<std::size_t>(k)];
                const auto& jm = ar.modes[static_cast<std::size_t>(mth)];
                double g = gram[0](jk[0], jm[0]) * gram[1](jk[1], jm[1]);
                if (dim == 3) g *= gram[2](jk[2], jm[2]);
                acc += g * g;
            }
        return acc / N;
    }
    const auto& gr = basis.grid_rep();
    Eigen::MatrixXd V = gr.vectors.leftCols(N);
    Eigen::MatrixXd G = V.transpose() * V * gr.grid.cell_measure;
    return G.squaredNorm() / N;
}

}  // namespace fermigas
