#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evbranch/core.hpp"

namespace evbranch {

enum class Regularizer { nuclear, group_l12 };

const char* to_string(Regularizer reg) noexcept;
Regularizer parse_regularizer(const std::string& name);

struct BadmmConfig {
    double lambda = 1.0;
    double alpha = 0.5;
    double rho = 1.0;
    Regularizer regularizer = Regularizer::nuclear;
    std::size_t max_iters = 2;
    double tol = 1e-6;
    double floor = 1e-12;

    void validate() const;
};

/// The SVD inside the nuclear-norm prox did not converge.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Residuals {
    double x1 = 0.0;  // ||B - X1||_F
    double x2 = 0.0;  // ||B - X2||_F
};

struct BadmmState {
    TransitionMatrix B;
    Matrix X1;
    Matrix X2;
    Matrix Z1;
    Matrix Z2;
    Residuals primal_residuals;
    double objective = 0.0;
    std::vector<Residuals> residual_history;
    std::vector<double> objective_history;
    std::size_t iterations = 0;
};

/// sign(a) * max(|a| - tau, 0).
double soft_threshold(double a, double tau);

/// KL-anchored row-softmax step:
/// B = rowsoftmax((log B0 + rho * sum_i (log X_i - Z_i)) / (1 + 2 rho)) over each row's
/// lower-triangular support. B0 and X_i entries are clamped to [floor, inf) before the log.
TransitionMatrix b_update(const TransitionMatrix& B0, const Matrix& X1, const Matrix& X2,
                          const Matrix& Z1, const Matrix& Z2, double rho, double floor,
                          Exec exec = Exec::serial);

/// Elementwise soft-threshold of B + Z1 at lambda * alpha / rho.
Matrix x1_update(const TransitionMatrix& B, const Matrix& Z1, double lambda, double alpha,
                 double rho);

/// Singular value thresholding of B + Z2 at lambda * (1 - alpha) / rho; the strict
/// upper triangle of the reconstruction is reset to zero.
Matrix x2_update_nuclear(const TransitionMatrix& B, const Matrix& Z2, double lambda, double alpha,
                         double rho);

/// Sparse group-lasso prox, column by column: soft-threshold at lambda * alpha / rho,
/// then shrink the column norm by lambda * (1 - alpha) / rho.
Matrix x2_update_group(const TransitionMatrix& B, const Matrix& Z2, double lambda, double alpha,
                       double rho);

/// Z + (B - X).
Matrix dual_update(const Matrix& Z, const TransitionMatrix& B, const Matrix& X);

/// Singular value soft-thresholding of an arbitrary matrix.
Matrix singular_value_threshold(const Matrix& M, double tau);

double nuclear_norm(const Matrix& M);
/// Sum of column Euclidean norms.
double l12_norm(const Matrix& M);

/// KL(B || B0) over the lower-triangular support (0 log 0 = 0, B0 clamped at floor).
double kl_divergence(const TransitionMatrix& B, const TransitionMatrix& B0, double floor);

/// KL(B || B0) + lambda * (alpha ||B||_1 + (1 - alpha) R(B)).
double objective(const TransitionMatrix& B, const TransitionMatrix& B0, const BadmmConfig& cfg);

/// Bregman ADMM from B = X1 = X2 = B0, Z1 = Z2 = 0. Runs at most max_iters
/// iterations of B, X, Z updates and stops early once both primal residuals
/// drop below tol.
BadmmState structure_matrix(const TransitionMatrix& B0, const BadmmConfig& cfg,
                            Exec exec = Exec::serial);

}  // namespace evbranch
