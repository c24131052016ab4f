// SPDX-License-Identifier: Apache-2.0
//
// irsce - compressive channel estimation for IRS-aided mmWave massive MIMO-OFDM
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "irsce/common.hpp"

namespace irsce {

/// Output of the distributed greedy recovery. The support is shared by all K
/// coefficient vectors; support indices are stored in selection order.
struct SparseEstimate {
    std::vector<int> support;
    std::vector<Eigen::VectorXcd> coeffs;     // K vectors, zero off the support
    std::vector<Eigen::RowVectorXcd> h_d_hat; // filled by the reconstruction step
    std::vector<Eigen::RowVectorXcd> h_r_hat;
    int iterations = 0;
    double final_residual = 0.0;         // mean residual power per measurement
    std::vector<double> residual_trace;  // same quantity after each iteration
    bool converged = true;               // false when the support cap was hit
};

/// Sensing operator whose per-subcarrier matrix is [U, g(k) * W]. The
/// subcarrier dependence is the single scalar g(k), which lets one shared QR
/// factorization serve all K least-squares solves.
struct StructuredSensing {
    Eigen::MatrixXcd U; // N_P x G1
    Eigen::MatrixXcd W; // N_P x G2
    Eigen::VectorXcd g; // K
};

namespace detail {

// relative cutoffs: a candidate column this close to the span of the current
// support is treated as dependent; a subcarrier scale this small makes the
// W-block coefficient unidentifiable at that subcarrier
inline constexpr double kDependentColumnTol = 1e-10;
inline constexpr double kScaleFloor = 1e-14;

inline int argmax_lowest_index(const Eigen::VectorXd& score, const std::vector<char>& banned) {
    int best = -1;
    double best_val = 0.0; // a column must correlate to be selectable at all
    for (int i = 0; i < score.size(); ++i) {
        if (banned[i]) continue;
        if (score(i) > best_val) { // strict: ties resolve to the lowest index
            best_val = score(i);
            best = i;
        }
    }
    return best;
}

} // namespace detail

/// Distributed greedy pursuit over a common support: each pass picks the
/// column with the largest correlation magnitude summed across subcarriers,
/// each correlation normalized by its sensing-column norm. Without that
/// normalization the direct and cascaded blocks, whose effective column gains
/// differ by the link budget, cannot compete in one argmax. Every subcarrier
/// is then refit by least squares on the selected columns.
/// Stops when the mean residual power per measurement drops to epsilon.
/// Columns numerically dependent on the current support are skipped and
/// banned instead of destabilizing the solve. If the support reaches
/// min(N_P, columns) with the criterion unmet, the best-so-far estimate is
/// returned with converged = false.
inline SparseEstimate domp(const std::vector<Eigen::VectorXcd>& y, const StructuredSensing& op,
                           double epsilon) {
    if (epsilon <= 0.0) throw ConfigError("domp requires epsilon > 0");
    const int K = int(y.size());
    if (K == 0 || K != op.g.size()) throw DimensionError("observation count must match g");
    const int num_meas = int(y[0].size());
    const int g1 = int(op.U.cols());
    const int g2 = int(op.W.cols());
    const int total = g1 + g2;
    const int cap = std::min(num_meas, total);

    Eigen::MatrixXcd Y(num_meas, K);
    for (int k = 0; k < K; ++k) {
        if (y[k].size() != num_meas) throw DimensionError("ragged observation set");
        Y.col(k) = y[k];
    }
    const Eigen::VectorXd g_abs = op.g.cwiseAbs();
    const double g_max = g_abs.maxCoeff();

    SparseEstimate est;
    est.coeffs.assign(K, Eigen::VectorXcd::Zero(total));

    // shared thin QR of the unscaled selected columns [U W]_I
    Eigen::MatrixXcd Q(num_meas, cap);
    Eigen::MatrixXcd Rfac = Eigen::MatrixXcd::Zero(cap, cap);
    Eigen::MatrixXcd Qty = Eigen::MatrixXcd::Zero(cap, K);
    Eigen::MatrixXcd Resid = Y;
    std::vector<char> banned(total, 0);

    // per-subcarrier normalization makes g(k) cancel inside the W block;
    // zero columns are unselectable from the start
    Eigen::VectorXd u_norms = op.U.colwise().norm();
    Eigen::VectorXd w_norms = op.W.colwise().norm();
    for (int i = 0; i < g1; ++i)
        if (u_norms(i) <= 0.0) {
            banned[i] = 1;
            u_norms(i) = 1.0;
        }
    for (int i = 0; i < g2; ++i)
        if (w_norms(i) <= 0.0) {
            banned[g1 + i] = 1;
            w_norms(i) = 1.0;
        }

    auto mean_power = [&](const Eigen::MatrixXcd& r) {
        return r.squaredNorm() / (double(K) * double(num_meas));
    };
    double res = mean_power(Resid);

    while (res > epsilon && int(est.support.size()) < cap) {
        // sum_k |[B_k^H r_k]_i| / ||[B_k]_i||
        Eigen::VectorXd score(total);
        score.head(g1) =
            (op.U.adjoint() * Resid).cwiseAbs().rowwise().sum().cwiseQuotient(u_norms);
        score.tail(g2) =
            (op.W.adjoint() * Resid).cwiseAbs().rowwise().sum().cwiseQuotient(w_norms);

        bool added = false;
        while (!added) {
            const int pick = detail::argmax_lowest_index(score, banned);
            if (pick < 0) break;
            const Eigen::VectorXcd col = pick < g1 ? op.U.col(pick) : op.W.col(pick - g1);
            Eigen::VectorXcd v = col;
            const int s = int(est.support.size());
            Eigen::VectorXcd proj = Eigen::VectorXcd::Zero(cap);
            for (int pass = 0; pass < 2; ++pass) { // MGS with one reorthogonalization
                for (int j = 0; j < s; ++j) {
                    const cxd r = Q.col(j).dot(v);
                    v -= r * Q.col(j);
                    proj(j) += r;
                }
            }
            const double vn = v.norm();
            if (vn <= detail::kDependentColumnTol * col.norm()) {
                banned[pick] = 1; // numerically inside the current span
                continue;
            }
            Rfac.col(s).head(s) = proj.head(s);
            Rfac(s, s) = vn;
            Q.col(s) = v / vn;
            Qty.row(s) = Q.col(s).adjoint() * Y;
            est.support.push_back(pick);
            banned[pick] = 1;
            added = true;
        }
        if (!added) break; // every remaining column is dependent

        const int s = int(est.support.size());
        Resid = Y - Q.leftCols(s) * Qty.topRows(s);
        res = mean_power(Resid);
        est.residual_trace.push_back(res);
    }

    // back-substitute once for the coefficients, then undo the g(k) scaling
    const int s = int(est.support.size());
    if (s > 0) {
        const Eigen::MatrixXcd Z = Rfac.topLeftCorner(s, s)
                                       .triangularView<Eigen::Upper>()
                                       .solve(Qty.topRows(s));
        for (int k = 0; k < K; ++k) {
            for (int j = 0; j < s; ++j) {
                const int idx = est.support[j];
                if (idx < g1) {
                    est.coeffs[k](idx) = Z(j, k);
                } else if (g_abs(k) > detail::kScaleFloor * g_max) {
                    est.coeffs[k](idx) = Z(j, k) / op.g(k);
                }
            }
        }
    }
    est.iterations = s;
    est.final_residual = res;
    est.converged = res <= epsilon;
    return est;
}

/// Same algorithm on explicit per-subcarrier matrices. Used where the
/// operator has no [U, g(k) W] structure, and as the reference the structured
/// path is tested against.
inline SparseEstimate domp(const std::vector<Eigen::VectorXcd>& y,
                           const std::vector<Eigen::MatrixXcd>& B, double epsilon) {
    if (epsilon <= 0.0) throw ConfigError("domp requires epsilon > 0");
    const int K = int(y.size());
    if (K == 0 || int(B.size()) != K) throw DimensionError("need one sensing matrix per y_k");
    const int num_meas = int(y[0].size());
    const int total = int(B[0].cols());
    const int cap = std::min(num_meas, total);
    for (int k = 0; k < K; ++k)
        if (B[k].rows() != num_meas || B[k].cols() != total || y[k].size() != num_meas)
            throw DimensionError("sensing matrices must share shape");

    SparseEstimate est;
    est.coeffs.assign(K, Eigen::VectorXcd::Zero(total));
    std::vector<Eigen::VectorXcd> resid = y;
    std::vector<char> banned(total, 0);

    auto mean_power = [&]() {
        double acc = 0.0;
        for (const auto& r : resid) acc += r.squaredNorm();
        return acc / (double(K) * double(num_meas));
    };
    double res = mean_power();
    std::vector<Eigen::MatrixXcd> selected(K, Eigen::MatrixXcd(num_meas, 0));
    std::vector<Eigen::VectorXd> col_norms(K);
    for (int k = 0; k < K; ++k) col_norms[k] = B[k].colwise().norm();

    while (res > epsilon && int(est.support.size()) < cap) {
        Eigen::VectorXd score = Eigen::VectorXd::Zero(total);
        for (int k = 0; k < K; ++k) {
            const Eigen::VectorXd corr = (B[k].adjoint() * resid[k]).cwiseAbs();
            for (int i = 0; i < total; ++i)
                if (col_norms[k](i) > 0.0) score(i) += corr(i) / col_norms[k](i);
        }

        bool added = false;
        while (!added) {
            const int pick = detail::argmax_lowest_index(score, banned);
            if (pick < 0) break;
            const int s = int(est.support.size());
            // rank check on one representative subcarrier's selected columns
            Eigen::MatrixXcd trial(num_meas, s + 1);
            trial.leftCols(s) = selected[0];
            trial.col(s) = B[0].col(pick);
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(trial);
            cod.setThreshold(detail::kDependentColumnTol);
            if (int(cod.rank()) < s + 1) {
                banned[pick] = 1;
                continue;
            }
            for (int k = 0; k < K; ++k) {
                selected[k].conservativeResize(Eigen::NoChange, s + 1);
                selected[k].col(s) = B[k].col(pick);
            }
            est.support.push_back(pick);
            banned[pick] = 1;
            added = true;
        }
        if (!added) break;

        for (int k = 0; k < K; ++k) {
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(selected[k]);
            cod.setThreshold(detail::kDependentColumnTol);
            const Eigen::VectorXcd z = cod.solve(y[k]);
            resid[k] = y[k] - selected[k] * z;
            for (int j = 0; j < int(est.support.size()); ++j)
                est.coeffs[k](est.support[j]) = z(j);
        }
        res = mean_power();
        est.residual_trace.push_back(res);
    }
    est.iterations = int(est.support.size());
    est.final_residual = res;
    est.converged = res <= epsilon;
    return est;
}

/// Direct least-squares solve of one subcarrier's linear model, no sparsity.
/// Throws when the R-diagonal conditioning estimate exceeds cond_limit.
inline Eigen::VectorXcd ls_baseline(const Eigen::MatrixXcd& Phi, const Eigen::VectorXcd& y,
                                    double cond_limit = 1e12) {
    if (Phi.rows() < Phi.cols()) throw DimensionError("ls_baseline needs a square or tall system");
    if (Phi.rows() != y.size()) throw DimensionError("observation length mismatch");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(Phi);
    const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
    const double dmin = diag.minCoeff();
    const double cond = dmin > 0.0 ? diag.maxCoeff() / dmin : std::numeric_limits<double>::infinity();
    if (!(cond <= cond_limit))
        throw SingularMatrixError("linear system too ill-conditioned for LS", cond);
    return qr.solve(y);
}

/// Batched LS for the structured operator Phi_k = [S, g(k) T]: one
/// factorization of [S T] serves every subcarrier, with the W-block solution
/// rescaled by 1/g(k) afterwards.
class LsFactorSolver {
  public:
    LsFactorSolver(const Eigen::MatrixXcd& S, const Eigen::MatrixXcd& T,
                   const Eigen::VectorXcd& g, double cond_limit = 1e12)
        : m_(int(S.cols())), n_(int(T.cols())), g_(g) {
        if (S.rows() != T.rows()) throw DimensionError("S and T must share the slot count");
        const int rows = int(S.rows());
        if (rows < m_ + n_) throw DimensionError("factored LS needs a square or tall system");
        Eigen::MatrixXcd st(rows, m_ + n_);
        st.leftCols(m_) = S;
        st.rightCols(n_) = T;
        // The baseline system is square by construction; LU is several times
        // faster than pivoted QR at these sizes. The pivot-diagonal ratio is a
        // proxy for the condition number, adequate as a singularity guard.
        square_ = rows == m_ + n_;
        Eigen::VectorXd diag;
        if (square_) {
            lu_.compute(st);
            diag = lu_.matrixLU().diagonal().cwiseAbs();
        } else {
            qr_.compute(st);
            diag = qr_.matrixR().diagonal().cwiseAbs();
        }
        const Eigen::VectorXd g_abs = g.cwiseAbs();
        g_max_ = g_abs.maxCoeff();
        const double g_min = g_abs.minCoeff();
        const double scale_spread =
            std::max(1.0, g_max_) / std::min(1.0, g_min > 0.0 ? g_min : 0.0);
        const double dmin = diag.minCoeff();
        const double cond = dmin > 0.0 ? diag.maxCoeff() / dmin * scale_spread
                                       : std::numeric_limits<double>::infinity();
        if (!(cond <= cond_limit))
            throw SingularMatrixError("factored LS system too ill-conditioned", cond);
    }

    /// Solution [h_d; h_r] of subcarrier k.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& y_k, int k) const {
        Eigen::VectorXcd z;
        if (square_)
            z = lu_.solve(y_k);
        else
            z = qr_.solve(y_k);
        if (std::abs(g_(k)) > detail::kScaleFloor * g_max_)
            z.tail(n_) /= g_(k);
        else
            z.tail(n_).setZero();
        return z;
    }

  private:
    int m_, n_;
    Eigen::VectorXcd g_;
    double g_max_;
    bool square_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr_;
};

/// Normalized error over all subcarriers, in dB. Exact matches report the
/// floor instead of -inf; values below the floor are clamped to it.
inline double nmse_db(const std::vector<Eigen::RowVectorXcd>& est,
                      const std::vector<Eigen::RowVectorXcd>& truth, double floor_db = -200.0) {
    if (est.size() != truth.size()) throw DimensionError("nmse: subcarrier count mismatch");
    double err = 0.0, ref = 0.0;
    for (size_t k = 0; k < est.size(); ++k) {
        if (est[k].size() != truth[k].size()) throw DimensionError("nmse: row length mismatch");
        err += (est[k] - truth[k]).squaredNorm();
        ref += truth[k].squaredNorm();
    }
    if (ref == 0.0) throw MetricError("nmse undefined for identically zero truth");
    if (err == 0.0) return floor_db;
    return std::max(floor_db, linear_to_db(err / ref));
}

} // namespace irsce
