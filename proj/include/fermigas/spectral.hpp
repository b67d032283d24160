#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fermigas/common.hpp"
#include "fermigas/geometry.hpp"

// Ordered orthonormal eigenbases of -Laplace on a domain: closed-form
// separable bases on boxes, sparse finite-difference bases elsewhere.

namespace fermigas {

enum class BC { dirichlet, neumann };

inline const char* to_string(BC bc) {
    return bc == BC::dirichlet ? "dirichlet" : "neumann";
}

/// Separable box modes: eigenfunction k is a product of sines (Dirichlet,
/// indices >= 1) or cosines (Neumann, indices >= 0) along each axis.
struct AnalyticRep {
    std::vector<double> lengths;
    std::vector<std::array<int, 3>> modes;  // per eigenpair
};

/// Grid eigenvectors over interior nodes, normalized in the cell-measure
/// weighted inner product; column k is mode k.
struct GridRep {
    Grid grid;
    Eigen::MatrixXd vectors;  // size() x K
};

class EigenBasis {
public:
    BC bc = BC::dirichlet;
    DomainSpec domain;
    std::vector<double> eigenvalues;
    std::variant<AnalyticRep, GridRep> rep;
    double ortho_defect = 0.0;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    bool analytic() const { return std::holds_alternative<AnalyticRep>(rep); }
    const AnalyticRep& analytic_rep() const { return std::get<AnalyticRep>(rep); }
    const GridRep& grid_rep() const { return std::get<GridRep>(rep); }

    /// Value of mode k at a point; zero extension outside the domain.
    double evaluate(int k, const Point& p) const {
        if (k < 0 || k >= size()) throw IndexOutOfRange("mode index " + std::to_string(k));
        if (analytic()) return eval_analytic(analytic_rep(), k, p);
        return eval_grid(grid_rep(), k, p);
    }

    /// Values of modes 0..count-1 at a point. The separable representation
    /// shares per-axis trigonometric tables across modes, which is what makes
    /// the correlation sums affordable.
    void evaluate_all(const Point& p, int count, double* out) const {
        if (count > size()) throw IndexOutOfRange("count exceeds basis size");
        if (analytic()) {
            const auto& ar = analytic_rep();
            const int dim = static_cast<int>(ar.lengths.size());
            thread_local std::vector<double> tables;  // per-axis scaled trig values
            const int jmax = max_mode_index() + 1;
            tables.assign(static_cast<std::size_t>(dim) * jmax, 0.0);
            for (int a = 0; a < dim; ++a)
                axis_table(a, p[static_cast<std::size_t>(a)],
                           &tables[static_cast<std::size_t>(a) * jmax], jmax);
            for (int k = 0; k < count; ++k) {
                const auto& m = ar.modes[static_cast<std::size_t>(k)];
                double v = tables[static_cast<std::size_t>(m[0])];
                v *= tables[static_cast<std::size_t>(jmax + m[1])];
                if (dim == 3) v *= tables[static_cast<std::size_t>(2 * jmax + m[2])];
                out[k] = v;
            }
            return;
        }
        const auto& gr = grid_rep();
        Eigen::Map<Eigen::RowVectorXd> dst(out, count);
        dst.setZero();
        interpolate_rows(gr, p, count, dst);
    }

    /// Largest per-axis mode index of the analytic representation.
    int max_mode_index() const {
        const auto& ar = analytic_rep();
        int j = 0;
        for (const auto& m : ar.modes) j = std::max({j, m[0], m[1], m[2]});
        return j;
    }

    /// Scaled 1-d factor table: out[j] = norm_j * trig(j pi x / L) for
    /// j = 0..jmax-1, honoring zero extension outside [0, L].
    void axis_table(int axis, double x, double* out, int jmax) const {
        const auto& ar = analytic_rep();
        const double L = ar.lengths[static_cast<std::size_t>(axis)];
        if (x < 0.0 || x > L) {
            std::fill(out, out + jmax, 0.0);
            return;
        }
        const double theta = kPi * x / L;
        const double step = 2.0 * std::cos(theta);
        const double dnorm = std::sqrt(2.0 / L);
        if (bc == BC::dirichlet) {
            double sm = 0.0, s = std::sin(theta);
            out[0] = 0.0;  // index 0 unused for Dirichlet
            for (int j = 1; j < jmax; ++j) {
                out[j] = dnorm * s;
                const double sn = step * s - sm;
                sm = s;
                s = sn;
            }
        } else {
            double cm = std::cos(-theta), c = 1.0;
            out[0] = std::sqrt(1.0 / L);
            for (int j = 1; j < jmax; ++j) {
                const double cn = step * c - cm;
                cm = c;
                c = cn;
                out[j] = dnorm * c;
            }
        }
    }

    std::string canonical() const {
        std::string s = domain.canonical();
        s += ";bc=";
        s += to_string(bc);
        s += ";K=" + std::to_string(size());
        s += analytic() ? ";rep=analytic"
                        : ";rep=grid;h=" + std::to_string(grid_rep().grid.spacing);
        return s;
    }
    std::uint64_t hash() const { return fnv1a64(canonical()); }

private:
    static double eval_analytic(const AnalyticRep& ar, int k, const Point& p);
    static double eval_grid(const GridRep& gr, int k, const Point& p);
    void interpolate_rows(const GridRep& gr, const Point& p, int count,
                          Eigen::Map<Eigen::RowVectorXd>& dst) const;

    friend EigenBasis analytic_basis_box(const std::vector<double>&, BC, int);
};

inline double EigenBasis::eval_analytic(const AnalyticRep& ar, int k, const Point& p) {
    const int dim = static_cast<int>(ar.lengths.size());
    const auto& m = ar.modes[static_cast<std::size_t>(k)];
    double v = 1.0;
    for (int a = 0; a < dim; ++a) {
        const double L = ar.lengths[static_cast<std::size_t>(a)];
        const double x = p[static_cast<std::size_t>(a)];
        if (x < 0.0 || x > L) return 0.0;
        const int j = m[static_cast<std::size_t>(a)];
        if (j == 0)
            v *= std::sqrt(1.0 / L);  // Neumann constant factor
        else
            v *= std::sqrt(2.0 / L) * std::sin(kPi * j * x / L);
    }
    return v;
}

inline double EigenBasis::eval_grid(const GridRep& gr, int k, const Point& p) {
    double out = 0.0;
    const Grid& g = gr.grid;
    const int dim = g.dim;
    double frac[3] = {0, 0, 0};
    int base[3] = {0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        const double t = p[static_cast<std::size_t>(a)] / g.spacing;
        base[a] = static_cast<int>(std::floor(t));
        frac[a] = t - base[a];
    }
    const int corners = 1 << dim;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        int idx[3] = {base[0], base[1], base[2]};
        for (int a = 0; a < dim; ++a) {
            if (c & (1 << a)) {
                idx[a] += 1;
                w *= frac[a];
            } else {
                w *= 1.0 - frac[a];
            }
        }
        const std::int32_t node = g.node_at(idx[0], idx[1], dim == 3 ? idx[2] : 0);
        if (node >= 0) out += w * gr.vectors(node, k);
    }
    return out;
}

inline void EigenBasis::interpolate_rows(const GridRep& gr, const Point& p, int count,
                                         Eigen::Map<Eigen::RowVectorXd>& dst) const {
    const Grid& g = gr.grid;
    const int dim = g.dim;
    double frac[3] = {0, 0, 0};
    int base[3] = {0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        const double t = p[static_cast<std::size_t>(a)] / g.spacing;
        base[a] = static_cast<int>(std::floor(t));
        frac[a] = t - base[a];
    }
    const int corners = 1 << dim;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        int idx[3] = {base[0], base[1], base[2]};
        for (int a = 0; a < dim; ++a) {
            if (c & (1 << a)) {
                idx[a] += 1;
                w *= frac[a];
            } else {
                w *= 1.0 - frac[a];
            }
        }
        if (w == 0.0) continue;
        const std::int32_t node = g.node_at(idx[0], idx[1], dim == 3 ? idx[2] : 0);
        if (node >= 0) dst += w * gr.vectors.row(node).head(count);
    }
}

/// Closed-form ordered eigenbasis of a box domain. Ties are broken by the
/// lexicographic mode index, so equal-eigenvalue clusters come out in a
/// reproducible order.
inline EigenBasis analytic_basis_box(const std::vector<double>& lengths, BC bc, int K) {
    if (K < 1) throw ConfigError("analytic_basis_box needs K >= 1");
    const int dim = static_cast<int>(lengths.size());
    if (dim != 2 && dim != 3) throw DimensionUnsupported("box basis needs dim 2 or 3");

    struct ModeEntry {
        double lambda;
        std::array<int, 3> j;
    };
    std::vector<ModeEntry> entries;

    double volume = 1.0;
    for (double l : lengths) volume *= l;
    // Weyl-law guess for the eigenvalue cutoff, then enlarge until K modes fit.
    const double gamma_est =
        2.0 * std::sqrt(kPi) *
        std::pow(std::tgamma(0.5 * dim + 1.0), 1.0 / dim) / std::pow(volume, 1.0 / dim);
    double cut = gamma_est * gamma_est * std::pow(static_cast<double>(K), 2.0 / dim);
    cut = cut * 1.4 + 30.0;
    const int j_lo = bc == BC::dirichlet ? 1 : 0;
    for (;;) {
        entries.clear();
        std::array<int, 3> jmax{0, 0, 0};
        for (int a = 0; a < dim; ++a)
            jmax[static_cast<std::size_t>(a)] = static_cast<int>(
                std::ceil(lengths[static_cast<std::size_t>(a)] * std::sqrt(cut) / kPi));
        for (int j1 = j_lo; j1 <= jmax[0]; ++j1)
            for (int j2 = j_lo; j2 <= jmax[1]; ++j2) {
                if (dim == 2) {
                    const double lam =
                        kPi * kPi * (j1 * j1 / (lengths[0] * lengths[0]) +
                                     j2 * j2 / (lengths[1] * lengths[1]));
                    if (lam <= cut) entries.push_back({lam, {j1, j2, 0}});
                } else {
                    for (int j3 = j_lo; j3 <= jmax[2]; ++j3) {
                        const double lam =
                            kPi * kPi * (j1 * j1 / (lengths[0] * lengths[0]) +
                                         j2 * j2 / (lengths[1] * lengths[1]) +
                                         j3 * j3 / (lengths[2] * lengths[2]));
                        if (lam <= cut) entries.push_back({lam, {j1, j2, j3}});
                    }
                }
            }
        if (static_cast<int>(entries.size()) >= K) break;
        cut *= 1.6;
    }
    std::sort(entries.begin(), entries.end(), [](const ModeEntry& a, const ModeEntry& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        return a.j < b.j;
    });
    entries.resize(static_cast<std::size_t>(K));

    EigenBasis basis;
    basis.bc = bc;
    basis.domain = DomainSpec::rectangle(lengths);
    AnalyticRep ar;
    ar.lengths = lengths;
    basis.eigenvalues.reserve(static_cast<std::size_t>(K));
    ar.modes.reserve(static_cast<std::size_t>(K));
    for (const auto& e : entries) {
        basis.eigenvalues.push_back(e.lambda);
        ar.modes.push_back(e.j);
    }
    basis.rep = std::move(ar);
    basis.ortho_defect = 0.0;  // exact inner products
    return basis;
}

/// Second-order finite-difference realization of -Laplace on the interior
/// lattice. Dirichlet drops exterior neighbors; Neumann mirrors the center
/// value into them, which zeroes the row sums exactly.
struct SpectralOperator {
    Eigen::SparseMatrix<double> matrix;
    BC bc = BC::dirichlet;
    Grid grid;
    DomainSpec domain;

    std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
};

inline SpectralOperator assemble_laplacian(const Grid& grid, const DomainSpec& domain,
                                           BC bc) {
    if (grid.size() == 0) throw EmptyInterior("cannot assemble on an empty grid");
    const double inv_h2 = 1.0 / (grid.spacing * grid.spacing);
    const std::size_t n = grid.size();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n * (2 * static_cast<std::size_t>(grid.dim) + 1));
    for (std::size_t r = 0; r < n; ++r) {
        const auto& c = grid.nodes[r];
        int present = 0;
        for (int a = 0; a < grid.dim; ++a)
            for (int s = -1; s <= 1; s += 2) {
                std::array<int, 3> nb = c;
                nb[static_cast<std::size_t>(a)] += s;
                const std::int32_t q = grid.node_at(nb[0], nb[1], nb[2]);
                if (q >= 0) {
                    trip.emplace_back(static_cast<int>(r), q, -inv_h2);
                    ++present;
                }
            }
        const double diag = bc == BC::dirichlet ? 2.0 * grid.dim * inv_h2
                                                : present * inv_h2;
        trip.emplace_back(static_cast<int>(r), static_cast<int>(r), diag);
    }
    SpectralOperator op;
    op.bc = bc;
    op.grid = grid;
    op.domain = domain;
    op.matrix.resize(static_cast<int>(n), static_cast<int>(n));
    op.matrix.setFromTriplets(trip.begin(), trip.end());
    op.matrix.makeCompressed();
    return op;
}

}  // namespace fermigas

#include "fermigas/eigensolve.hpp"
