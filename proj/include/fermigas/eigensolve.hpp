#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "fermigas/common.hpp"
#include "fermigas/spectral.hpp"

// Smallest eigenpairs of the sparse -Laplace operator.
//
// Small problems go through a dense solve. Large ones use shift-and-invert
// block Lanczos over a moving ladder of shifts: each slice factorizes
// A - sigma I, harvests the eigenvalues between the previous shift and the
// current one, and cross-checks completeness against the LDLT inertia, so a
// missed cluster is detected rather than silently skipped. Previously
// accepted vectors are deflated out of later slices.

namespace fermigas {

struct SolveReport {
    int slices = 0;
    int factorizations = 0;
    int lanczos_vectors = 0;
    double max_residual = 0.0;
};

namespace eigdetail {

using SpMat = Eigen::SparseMatrix<double>;

inline SpMat shifted(const SpMat& A, double sigma) {
    SpMat S = A;
    for (int i = 0; i < S.rows(); ++i) S.coeffRef(i, i) -= sigma;
    return S;
}

struct Factor {
    std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt;
    double sigma = 0.0;
    int below = 0;  // #eigenvalues < sigma
    bool ok = false;
};

/// Factorize A - sigma I, nudging sigma off near-singular pivots.
inline Factor factor_near(const SpMat& A, double sigma, double scale, int& nfact) {
    Factor f;
    f.ldlt = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
    double s = sigma;
    for (int attempt = 0; attempt < 8; ++attempt) {
        f.ldlt->compute(shifted(A, s));
        ++nfact;
        if (f.ldlt->info() == Eigen::Success) {
            const auto d = f.ldlt->vectorD();
            double dmax = 0.0, dmin = 1e300;
            int below = 0;
            bool finite = true;
            for (int i = 0; i < d.size(); ++i) {
                const double v = d[i];
                if (!std::isfinite(v)) finite = false;
                dmax = std::max(dmax, std::abs(v));
                dmin = std::min(dmin, std::abs(v));
                if (v < 0.0) ++below;
            }
            if (finite && dmin > 1e-13 * dmax) {
                f.sigma = s;
                f.below = below;
                f.ok = true;
                return f;
            }
        }
        s += (attempt + 1) * 1e-4 * scale;  // deterministic nudge sequence
    }
    return f;
}

inline void orth_against(Eigen::MatrixXd& X, const Eigen::Ref<const Eigen::MatrixXd>& D) {
    if (D.cols() == 0) return;
    X.noalias() -= D * (D.transpose() * X);
}

/// Thin QR of X in place; rank-deficient columns are replaced with fresh
/// random directions orthogonal to `defl`.
inline bool orthonormalize_block(Eigen::MatrixXd& X,
                                 const Eigen::Ref<const Eigen::MatrixXd>& defl,
                                 std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
        Eigen::MatrixXd R = qr.matrixQR()
                                .topRows(X.cols())
                                .template triangularView<Eigen::Upper>();
        double dmin = 1e300, dmax = 0.0;
        for (int i = 0; i < X.cols(); ++i) {
            dmin = std::min(dmin, std::abs(R(i, i)));
            dmax = std::max(dmax, std::abs(R(i, i)));
        }
        Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(X.rows(), X.cols());
        Q.applyOnTheLeft(qr.householderQ());
        X = Q;
        if (dmax > 0.0 && dmin > 1e-10 * dmax) return true;
        // breakdown: refresh the block
        for (int c = 0; c < X.cols(); ++c)
            if (true) {
                for (int r = 0; r < X.rows(); ++r) X(r, c) += 1e-3 * gauss(rng);
            }
        orth_against(X, defl);
    }
    return false;
}

struct SliceOut {
    bool ok = false;
    std::vector<double> values;
    Eigen::MatrixXd vectors;
    int used_vectors = 0;
    double max_residual = 0.0;
};

/// Harvest all eigenpairs with lambda in (window_lo, sigma] where `want` is
/// the inertia-certified count.
inline SliceOut run_slice(const SpMat& A, Factor& F, double window_lo, int want,
                          const Eigen::Ref<const Eigen::MatrixXd>& defl, double tol,
                          double lambda_scale, std::uint64_t seed) {
    SliceOut out;
    const int P = static_cast<int>(A.rows());
    const int b = 8;
    const int m_cap = std::min(std::max(2 * want + 80, 128), std::min(P, 448));
    const double sigma = F.sigma;

    Eigen::MatrixXd V(P, m_cap), Y(P, m_cap);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m_cap, m_cap);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd X(P, b);
    for (int c = 0; c < b; ++c)
        for (int r = 0; r < P; ++r) X(r, c) = gauss(rng);
    orth_against(X, defl);
    if (!orthonormalize_block(X, defl, rng)) return out;

    int m = 0;
    while (m + b <= m_cap) {
        V.middleCols(m, b) = X;
        Y.middleCols(m, b) = F.ldlt->solve(X);
        M.block(0, m, m + b, b).noalias() =
            V.leftCols(m + b).transpose() * Y.middleCols(m, b);
        M.block(m, 0, b, m) = M.block(0, m, m, b).transpose();
        m += b;

        // next block: inverse-iterated directions, deflated and reorthogonalized
        X = Y.middleCols(m - b, b);
        orth_against(X, defl);
        X.noalias() -= V.leftCols(m) * (V.leftCols(m).transpose() * X);
        X.noalias() -= V.leftCols(m) * (V.leftCols(m).transpose() * X);
        orth_against(X, defl);
        if (!orthonormalize_block(X, defl, rng)) break;

        if (m % 32 != 0 && m + b <= m_cap) continue;

        // Rayleigh-Ritz on the projected inverse operator
        Eigen::MatrixXd Msym = 0.5 * (M.topLeftCorner(m, m) +
                                      M.topLeftCorner(m, m).transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Msym);
        if (es.info() != Eigen::Success) continue;

        std::vector<int> cand;
        for (int i = 0; i < m; ++i) {
            const double theta = es.eigenvalues()[i];
            if (theta == 0.0) continue;
            const double lam = sigma + 1.0 / theta;
            if (lam > window_lo && lam <= sigma) cand.push_back(i);
        }
        if (static_cast<int>(cand.size()) < want) continue;

        Eigen::MatrixXd S(m, static_cast<int>(cand.size()));
        std::vector<double> lam(cand.size());
        for (std::size_t i = 0; i < cand.size(); ++i) {
            S.col(static_cast<int>(i)) = es.eigenvectors().col(cand[i]);
            lam[i] = sigma + 1.0 / es.eigenvalues()[cand[i]];
        }
        Eigen::MatrixXd Z = V.leftCols(m) * S;
        Eigen::MatrixXd AZ = A * Z;
        std::vector<std::pair<double, int>> good;  // (lambda, column)
        double worst = 0.0;
        bool all_ok = true;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            const double res =
                (AZ.col(static_cast<int>(i)) - lam[i] * Z.col(static_cast<int>(i)))
                    .norm();
            const double thresh = tol * std::max(lam[i], 1e-3 * lambda_scale);
            if (res <= thresh)
                good.emplace_back(lam[i], static_cast<int>(i));
            else
                all_ok = false;
            worst = std::max(worst, res);
        }
        if (static_cast<int>(good.size()) == want) {
            std::stable_sort(good.begin(), good.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            out.ok = true;
            out.values.resize(good.size());
            out.vectors.resize(P, static_cast<int>(good.size()));
            for (std::size_t i = 0; i < good.size(); ++i) {
                out.values[i] = good[i].first;
                out.vectors.col(static_cast<int>(i)) = Z.col(good[i].second);
            }
            out.used_vectors = m;
            out.max_residual = worst;
            return out;
        }
        (void)all_ok;
    }
    return out;
}

}  // namespace eigdetail

/// K smallest eigenpairs of the operator, cell-measure orthonormalized, with
/// per-pair residual ||(A - lambda) u|| <= tol * lambda (scale-guarded for the
/// Neumann zero mode). Deterministic for a fixed seed.
inline EigenBasis solve_lowest(const SpectralOperator& op, int K, double tol,
                               std::uint64_t seed, SolveReport* report = nullptr) {
    const int P = static_cast<int>(op.size());
    if (K < 1) throw ConfigError("solve_lowest needs K >= 1");
    const int guard = std::max(1, static_cast<int>(0.05 * P));
    if (K > guard)
        throw KTooLarge("K=" + std::to_string(K) + " exceeds dispersion guard 0.05*nodes=" +
                        std::to_string(guard));

    SolveReport local;
    SolveReport& rpt = report ? *report : local;

    Eigen::MatrixXd vectors;  // Euclidean-orthonormal columns
    std::vector<double> values;

    if (P <= 1200) {
        Eigen::MatrixXd dense = Eigen::MatrixXd(op.matrix);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
        if (es.info() != Eigen::Success) throw NoConvergence("dense eigensolver failed");
        values.assign(es.eigenvalues().data(), es.eigenvalues().data() + K);
        vectors = es.eigenvectors().leftCols(K);
    } else {
        const auto& A = op.matrix;
        const double vol = static_cast<double>(P) * op.grid.cell_measure;
        const int dim = op.grid.dim;
        const double gamma2 =
            std::pow(2.0 * std::sqrt(kPi) *
                         std::pow(std::tgamma(0.5 * dim + 1.0), 1.0 / dim) /
                         std::pow(vol, 1.0 / dim),
                     2.0);
        auto lambda_hat = [&](double k) {
            return gamma2 * std::pow(std::max(k, 1.0), 2.0 / dim);
        };

        vectors.resize(P, K);
        int nc = 0;
        double prev_sigma = -1e-8 * std::max(gamma2, 1.0);
        int chunk = 48;
        int stall = 0;
        std::uint64_t slice_salt = 0;

        while (nc < K) {
            if (++rpt.slices > 400 || stall > 40)
                throw NoConvergence("eigenvalue slicing stalled at k=" + std::to_string(nc) +
                                    " of " + std::to_string(K));
            const int want_goal = std::min(chunk, K - nc + 4);
            double sigma = lambda_hat(nc + want_goal + 2.0);
            sigma = std::max(sigma, prev_sigma + 1e-3 * std::max(gamma2, 1.0));

            auto F = eigdetail::factor_near(A, sigma, std::max(gamma2, 1.0),
                                            rpt.factorizations);
            if (!F.ok) throw NoConvergence("LDLT factorization failed near sigma");

            const int want = F.below - nc;
            if (want < 0)
                throw NoConvergence("inertia went backwards; shift ladder inconsistent");
            if (want == 0) {
                prev_sigma = F.sigma;
                chunk = std::min(2 * chunk, 96);  // window was empty, stride farther
                ++stall;
                continue;
            }
            if (want > 140) {  // window too rich for one Krylov body, halve it
                chunk = std::max(chunk / 2, 8);
                ++stall;
                continue;
            }

            const int ndefl = std::min(nc, 256);  // only nearby modes can resurge
            auto slice = eigdetail::run_slice(
                A, F, prev_sigma, want, vectors.middleCols(nc - ndefl, ndefl), tol,
                lambda_hat(static_cast<double>(K)), seed ^ (0x9e3779b97f4a7c15ull + slice_salt++));
            rpt.lanczos_vectors += slice.used_vectors;
            if (!slice.ok) {
                chunk = std::max(2 * chunk / 3, 8);
                ++stall;
                continue;
            }
            stall = 0;
            rpt.max_residual = std::max(rpt.max_residual, slice.max_residual);
            for (std::size_t i = 0; i < slice.values.size(); ++i) {
                if (nc + static_cast<int>(i) < K)
                    vectors.col(nc + static_cast<int>(i)) =
                        slice.vectors.col(static_cast<int>(i));
            }
            const int kept = std::min(static_cast<int>(slice.values.size()), K - nc);
            values.insert(values.end(), slice.values.begin(),
                          slice.values.begin() + kept);
            nc += kept;
            prev_sigma = F.sigma;
        }
    }

    // Stable ascending order with contiguous degenerate clusters.
    std::vector<int> order(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[static_cast<std::size_t>(a)] <
                                                values[static_cast<std::size_t>(b)]; });
    Eigen::MatrixXd sorted(P, K);
    std::vector<double> lam_sorted(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) {
        sorted.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
        lam_sorted[static_cast<std::size_t>(i)] =
            values[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    }

    // Orthonormality audit in the weighted inner product; one MGS pass if the
    // cross-slice defect is above target.
    auto defect_of = [&](const Eigen::MatrixXd& V) {
        Eigen::MatrixXd G = V.transpose() * V;
        G.diagonal().array() -= 1.0;
        return G.cwiseAbs().maxCoeff();
    };
    double defect = defect_of(sorted);
    if (defect > 5e-7) {
        for (int c = 0; c < K; ++c) {
            for (int pass = 0; pass < 2; ++pass)
                if (c > 0)
                    sorted.col(c).noalias() -=
                        sorted.leftCols(c) * (sorted.leftCols(c).transpose() * sorted.col(c));
            sorted.col(c).normalize();
        }
        defect = defect_of(sorted);
    }

    EigenBasis basis;
    basis.bc = op.bc;
    basis.domain = op.domain;
    basis.eigenvalues = std::move(lam_sorted);
    GridRep gr;
    gr.grid = op.grid;
    gr.vectors = sorted / std::sqrt(op.grid.cell_measure);  // weighted normalization
    basis.rep = std::move(gr);
    basis.ortho_defect = defect;
    return basis;
}

}  // namespace fermigas
