#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "evbranch/badmm.hpp"
#include "evbranch/core.hpp"
#include "evbranch/simulator.hpp"

namespace evbranch {

constexpr double kRankThreshold = 1e-6;

struct MetricsReport {
    double ell = 0.0;
    double acc = 0.0;
    /// Accuracy among events of each true type; 0 for types that never occur.
    std::vector<double> per_type_acc;
    std::vector<std::size_t> per_type_count;
    std::size_t n_events = 0;
};

struct BranchReport {
    double parent_accuracy = 0.0;
    double immigrant_f1 = 0.0;
    std::size_t n_events = 0;
    std::optional<std::size_t> support_size;
    std::optional<std::size_t> numerical_rank;
};

struct StructureStats {
    std::size_t support_size = 0;
    std::size_t numerical_rank = 0;
};

/// Log-likelihood per event over the dataset.
double ell(const HawkesParams& params, std::span<const EventSequence> dataset,
           Exec exec = Exec::parallel);

/// Predicts each event's type as the argmax intensity at its own timestamp given
/// strictly earlier history (ties to the lowest index). Also fills ell.
MetricsReport next_type_accuracy(const HawkesParams& params,
                                 std::span<const EventSequence> dataset,
                                 Exec exec = Exec::parallel);

/// Row-argmax parents: -1 when the diagonal wins. Ties go to the diagonal, then
/// to the lowest column.
std::vector<long> decode_parents(const TransitionMatrix& matrix);

BranchReport parent_recovery(const TransitionMatrix& matrix, const BranchLabels& labels);

/// Pools parent_recovery over many sequences (event-weighted).
BranchReport parent_recovery(std::span<const TransitionMatrix> matrices,
                             std::span<const BranchLabels> labels);

/// Accuracy of guessing each event's cause uniformly among its n + 1 candidates.
double chance_parent_accuracy(std::span<const BranchLabels> labels);

/// Scores (1^T B S)_k, sorted by descending score with ties by type index.
std::vector<std::pair<std::size_t, double>> influence_ranking(const TransitionMatrix& B,
                                                              std::span<const std::size_t> type_of,
                                                              std::size_t num_types = 0);

struct SinkhornResult {
    Matrix matrix;
    std::size_t iterations = 0;
    /// Largest |row sum - 1| of the returned matrix.
    double max_row_deviation = 0.0;
    /// False when masking broke row normalization (deviation above 1e-9).
    bool row_stochastic = false;
};

/// Alternating row/column normalization of a nonnegative square matrix until
/// max row and column deviation drops below tol or iters rounds run. No masking.
SinkhornResult sinkhorn_scale(const Matrix& M, std::size_t iters, double tol);

/// sinkhorn_scale, then zero the strict upper triangle. The result is returned
/// raw; row_stochastic reports whether rows still sum to one.
SinkhornResult sinkhorn_baseline(const Matrix& B0, std::size_t iters, double tol);

std::size_t numerical_rank(const Matrix& M, double threshold = kRankThreshold);

/// support_size = nonzeros of X1, numerical_rank = singular values of B above 1e-6.
StructureStats structure_stats(const BadmmState& state);

}  // namespace evbranch
