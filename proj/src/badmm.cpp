#include "evbranch/badmm.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evbranch {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream os;
        os << what << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows()
           << "x" << b.cols();
        throw std::invalid_argument(os.str());
    }
}

void zero_strict_upper(Matrix& m) {
    const auto n = m.rows();
    for (Eigen::Index j = 1; j < m.cols(); ++j) {
        m.col(j).head(std::min(j, n)).setZero();
    }
}

double clamped_log(double v, double floor) { return std::log(std::max(v, floor)); }

}  // namespace

const char* to_string(Regularizer reg) noexcept {
    switch (reg) {
        case Regularizer::nuclear: return "nuclear";
        case Regularizer::group_l12: return "group";
    }
    return "unknown";
}

Regularizer parse_regularizer(const std::string& name) {
    if (name == "nuclear") return Regularizer::nuclear;
    if (name == "group" || name == "l12" || name == "group_l12") return Regularizer::group_l12;
    throw std::invalid_argument("unknown regularizer '" + name + "' (expected nuclear or group)");
}

void BadmmConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("badmm: lambda must be a finite nonnegative number");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("badmm: alpha must lie in [0, 1]");
    }
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw std::invalid_argument("badmm: rho must be positive");
    }
    if (max_iters == 0) {
        throw std::invalid_argument("badmm: max_iters must be positive");
    }
    if (!(tol >= 0.0)) {
        throw std::invalid_argument("badmm: tol must be nonnegative");
    }
    if (!(floor > 0.0)) {
        throw std::invalid_argument("badmm: floor must be positive");
    }
}

double soft_threshold(double a, double tau) {
    const double shrunk = std::abs(a) - tau;
    if (!(shrunk > 0.0)) {
        return 0.0;
    }
    return a < 0.0 ? -shrunk : shrunk;
}

TransitionMatrix b_update(const TransitionMatrix& B0, const Matrix& X1, const Matrix& X2,
                          const Matrix& Z1, const Matrix& Z2, double rho, double floor,
                          Exec exec) {
    const Matrix& prior = B0.entries();
    check_same_shape(prior, X1, "b_update X1");
    check_same_shape(prior, X2, "b_update X2");
    check_same_shape(prior, Z1, "b_update Z1");
    check_same_shape(prior, Z2, "b_update Z2");

    const auto n = prior.rows();
    const double scale = 1.0 / (1.0 + 2.0 * rho);
    Matrix out = Matrix::Zero(n, n);
    for_each_index(static_cast<std::size_t>(n), exec, [&](std::size_t row) {
        const auto i = static_cast<Eigen::Index>(row);
        Eigen::RowVectorXd logits(i + 1);
        for (Eigen::Index j = 0; j <= i; ++j) {
            logits(j) = scale * (clamped_log(prior(i, j), floor) +
                                 rho * (clamped_log(X1(i, j), floor) - Z1(i, j) +
                                        clamped_log(X2(i, j), floor) - Z2(i, j)));
        }
        const double peak = logits.maxCoeff();
        const Eigen::RowVectorXd weights = (logits.array() - peak).exp().matrix();
        out.row(i).head(i + 1) = weights / weights.sum();
    });
    return TransitionMatrix(std::move(out));
}

Matrix x1_update(const TransitionMatrix& B, const Matrix& Z1, double lambda, double alpha,
                 double rho) {
    check_same_shape(B.entries(), Z1, "x1_update");
    const double tau = lambda * alpha / rho;
    Matrix out = (B.entries() + Z1).unaryExpr([tau](double v) { return soft_threshold(v, tau); });
    zero_strict_upper(out);
    return out;
}

Matrix singular_value_threshold(const Matrix& M, double tau) {
    if (M.size() == 0) {
        return M;
    }
    Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        std::ostringstream os;
        os << "SVD failed to converge on a " << M.rows() << "x" << M.cols()
           << " matrix (Frobenius norm " << M.norm() << ", finite=" << M.allFinite() << ")";
        throw SolverError(os.str());
    }
    const Vector shrunk =
        svd.singularValues().unaryExpr([tau](double s) { return std::max(s - tau, 0.0); });
    Matrix out = svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
    if (!out.allFinite()) {
        throw SolverError("SVD reconstruction produced non-finite values");
    }
    return out;
}

Matrix x2_update_nuclear(const TransitionMatrix& B, const Matrix& Z2, double lambda, double alpha,
                         double rho) {
    check_same_shape(B.entries(), Z2, "x2_update_nuclear");
    Matrix out = singular_value_threshold(B.entries() + Z2, lambda * (1.0 - alpha) / rho);
    zero_strict_upper(out);
    return out;
}

Matrix x2_update_group(const TransitionMatrix& B, const Matrix& Z2, double lambda, double alpha,
                       double rho) {
    check_same_shape(B.entries(), Z2, "x2_update_group");
    const double sparse_tau = lambda * alpha / rho;
    const double group_tau = lambda * (1.0 - alpha) / rho;
    Matrix out =
        (B.entries() + Z2).unaryExpr([sparse_tau](double v) { return soft_threshold(v, sparse_tau); });
    zero_strict_upper(out);
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const double norm = out.col(j).norm();
        const double shrink = norm > 0.0 ? std::max(1.0 - group_tau / norm, 0.0) : 0.0;
        out.col(j) *= shrink;
    }
    return out;
}

Matrix dual_update(const Matrix& Z, const TransitionMatrix& B, const Matrix& X) {
    check_same_shape(Z, B.entries(), "dual_update");
    check_same_shape(Z, X, "dual_update");
    Matrix out = Z + (B.entries() - X);
    zero_strict_upper(out);
    return out;
}

double nuclear_norm(const Matrix& M) {
    if (M.size() == 0) {
        return 0.0;
    }
    Eigen::BDCSVD<Matrix> svd(M);
    return svd.singularValues().sum();
}

double l12_norm(const Matrix& M) { return M.colwise().norm().sum(); }

double kl_divergence(const TransitionMatrix& B, const TransitionMatrix& B0, double floor) {
    check_same_shape(B.entries(), B0.entries(), "kl_divergence");
    const auto n = static_cast<Eigen::Index>(B.size());
    double kl = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double b = B.entries()(i, j);
            if (b > 0.0) {
                kl += b * (std::log(b) - clamped_log(B0.entries()(i, j), floor));
            }
        }
    }
    return kl;
}

double objective(const TransitionMatrix& B, const TransitionMatrix& B0, const BadmmConfig& cfg) {
    const double structure = cfg.regularizer == Regularizer::nuclear ? nuclear_norm(B.entries())
                                                                     : l12_norm(B.entries());
    return kl_divergence(B, B0, cfg.floor) +
           cfg.lambda * (cfg.alpha * B.entries().cwiseAbs().sum() + (1.0 - cfg.alpha) * structure);
}

BadmmState structure_matrix(const TransitionMatrix& B0, const BadmmConfig& cfg, Exec exec) {
    cfg.validate();
    const auto n = static_cast<Eigen::Index>(B0.size());
    BadmmState state{B0,
                     B0.entries(),
                     B0.entries(),
                     Matrix::Zero(n, n),
                     Matrix::Zero(n, n),
                     {},
                     objective(B0, B0, cfg),
                     {},
                     {},
                     0};

    for (std::size_t k = 0; k < cfg.max_iters; ++k) {
        state.B = b_update(B0, state.X1, state.X2, state.Z1, state.Z2, cfg.rho, cfg.floor, exec);
        state.X1 = x1_update(state.B, state.Z1, cfg.lambda, cfg.alpha, cfg.rho);
        state.X2 = cfg.regularizer == Regularizer::nuclear
                       ? x2_update_nuclear(state.B, state.Z2, cfg.lambda, cfg.alpha, cfg.rho)
                       : x2_update_group(state.B, state.Z2, cfg.lambda, cfg.alpha, cfg.rho);
        state.Z1 = dual_update(state.Z1, state.B, state.X1);
        state.Z2 = dual_update(state.Z2, state.B, state.X2);

        state.primal_residuals = {(state.B.entries() - state.X1).norm(),
                                  (state.B.entries() - state.X2).norm()};
        state.objective = objective(state.B, B0, cfg);
        state.residual_history.push_back(state.primal_residuals);
        state.objective_history.push_back(state.objective);
        ++state.iterations;

        if (std::max(state.primal_residuals.x1, state.primal_residuals.x2) < cfg.tol) {
            break;
        }
    }
    return state;
}

}  // namespace evbranch
