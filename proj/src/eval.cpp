#include "evbranch/eval.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evbranch {

namespace {

struct TypeTally {
    std::vector<std::size_t> correct;
    std::vector<std::size_t> total;
};

TypeTally tally_predictions(const HawkesParams& params, const EventSequence& seq) {
    check_types(params, seq);
    const auto C = static_cast<Eigen::Index>(params.num_types());
    const double beta = params.kernel().beta();
    TypeTally tally{std::vector<std::size_t>(params.num_types(), 0),
                    std::vector<std::size_t>(params.num_types(), 0)};
    Vector excitation = Vector::Zero(C);
    double prev_t = 0.0;
    for (const auto& e : seq.events()) {
        excitation *= std::exp(-beta * (e.t - prev_t));
        const Vector lambda = params.mu() + params.infectivity() * excitation;
        Eigen::Index predicted = 0;
        for (Eigen::Index c = 1; c < C; ++c) {
            if (lambda(c) > lambda(predicted)) {
                predicted = c;
            }
        }
        ++tally.total[e.c];
        if (static_cast<std::size_t>(predicted) == e.c) {
            ++tally.correct[e.c];
        }
        excitation(static_cast<Eigen::Index>(e.c)) += beta;
        prev_t = e.t;
    }
    return tally;
}

double row_deviation(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    return (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

double col_deviation(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    return (m.colwise().sum().array() - 1.0).abs().maxCoeff();
}

}  // namespace

double ell(const HawkesParams& params, std::span<const EventSequence> dataset, Exec exec) {
    std::size_t n = 0;
    for (const auto& seq : dataset) {
        n += seq.size();
    }
    if (n == 0) {
        throw std::invalid_argument("ell: dataset contains no events");
    }
    return log_likelihood(params, dataset, exec) / static_cast<double>(n);
}

MetricsReport next_type_accuracy(const HawkesParams& params,
                                 std::span<const EventSequence> dataset, Exec exec) {
    std::vector<TypeTally> tallies(dataset.size());
    for_each_index(dataset.size(), exec,
                   [&](std::size_t i) { tallies[i] = tally_predictions(params, dataset[i]); });

    const std::size_t C = params.num_types();
    std::vector<std::size_t> correct(C, 0);
    MetricsReport report;
    report.per_type_count.assign(C, 0);
    for (const auto& t : tallies) {
        for (std::size_t c = 0; c < C; ++c) {
            correct[c] += t.correct[c];
            report.per_type_count[c] += t.total[c];
        }
    }
    std::size_t all_correct = 0;
    report.per_type_acc.assign(C, 0.0);
    for (std::size_t c = 0; c < C; ++c) {
        all_correct += correct[c];
        report.n_events += report.per_type_count[c];
        if (report.per_type_count[c] > 0) {
            report.per_type_acc[c] = static_cast<double>(correct[c]) /
                                     static_cast<double>(report.per_type_count[c]);
        }
    }
    report.acc = report.n_events > 0
                     ? static_cast<double>(all_correct) / static_cast<double>(report.n_events)
                     : 0.0;
    report.ell = ell(params, dataset, exec);
    return report;
}

std::vector<long> decode_parents(const TransitionMatrix& matrix) {
    const auto N = static_cast<Eigen::Index>(matrix.size());
    const Matrix& m = matrix.entries();
    std::vector<long> parents(matrix.size(), -1);
    for (Eigen::Index n = 0; n < N; ++n) {
        double best = m(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (m(n, j) > best) {
                best = m(n, j);
                parents[static_cast<std::size_t>(n)] = static_cast<long>(j);
            }
        }
    }
    return parents;
}

BranchReport parent_recovery(std::span<const TransitionMatrix> matrices,
                             std::span<const BranchLabels> labels) {
    if (matrices.size() != labels.size()) {
        throw std::invalid_argument("parent_recovery: number of matrices and label sets differ");
    }
    std::size_t correct = 0;
    std::size_t n = 0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t s = 0; s < matrices.size(); ++s) {
        if (matrices[s].size() != labels[s].parent.size()) {
            throw std::invalid_argument("parent_recovery: matrix is " +
                                        std::to_string(matrices[s].size()) + "x" +
                                        std::to_string(matrices[s].size()) + " but labels have " +
                                        std::to_string(labels[s].parent.size()) + " entries");
        }
        const auto predicted = decode_parents(matrices[s]);
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            const long truth = labels[s].parent[i];
            correct += predicted[i] == truth ? 1 : 0;
            const bool pred_imm = predicted[i] < 0;
            const bool true_imm = truth < 0;
            tp += (pred_imm && true_imm) ? 1 : 0;
            fp += (pred_imm && !true_imm) ? 1 : 0;
            fn += (!pred_imm && true_imm) ? 1 : 0;
        }
        n += predicted.size();
    }
    BranchReport report;
    report.n_events = n;
    report.parent_accuracy = n > 0 ? static_cast<double>(correct) / static_cast<double>(n) : 0.0;
    // No immigrants predicted and none present counts as perfect agreement.
    const std::size_t denom = 2 * tp + fp + fn;
    report.immigrant_f1 = denom > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 1.0;
    return report;
}

BranchReport parent_recovery(const TransitionMatrix& matrix, const BranchLabels& labels) {
    return parent_recovery(std::span<const TransitionMatrix>(&matrix, 1),
                           std::span<const BranchLabels>(&labels, 1));
}

double chance_parent_accuracy(std::span<const BranchLabels> labels) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& l : labels) {
        for (std::size_t i = 0; i < l.parent.size(); ++i) {
            sum += 1.0 / static_cast<double>(i + 1);
        }
        n += l.parent.size();
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

std::vector<std::pair<std::size_t, double>> influence_ranking(const TransitionMatrix& B,
                                                              std::span<const std::size_t> type_of,
                                                              std::size_t num_types) {
    if (type_of.size() != B.size()) {
        throw std::invalid_argument("influence_ranking: type assignment has " +
                                    std::to_string(type_of.size()) + " entries for a " +
                                    std::to_string(B.size()) + "-event matrix");
    }
    std::size_t C = num_types;
    for (const std::size_t c : type_of) {
        C = std::max(C, c + 1);
    }
    // 1^T B is the vector of column sums; S folds columns by type.
    const Eigen::RowVectorXd column_mass = B.entries().colwise().sum();
    std::vector<std::pair<std::size_t, double>> scores(C);
    for (std::size_t k = 0; k < C; ++k) {
        scores[k] = {k, 0.0};
    }
    for (std::size_t j = 0; j < type_of.size(); ++j) {
        scores[type_of[j]].second += column_mass(static_cast<Eigen::Index>(j));
    }
    std::stable_sort(scores.begin(), scores.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return scores;
}

SinkhornResult sinkhorn_scale(const Matrix& M, std::size_t iters, double tol) {
    if (M.rows() != M.cols()) {
        throw std::invalid_argument("sinkhorn: matrix must be square");
    }
    if (!M.allFinite() || (M.array() < 0.0).any()) {
        throw std::invalid_argument("sinkhorn: entries must be finite and nonnegative");
    }
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        if (!(M.row(i).sum() > 0.0)) {
            throw std::invalid_argument("sinkhorn: row " + std::to_string(i) + " has empty support");
        }
        if (!(M.col(i).sum() > 0.0)) {
            throw std::invalid_argument("sinkhorn: column " + std::to_string(i) +
                                        " has empty support");
        }
    }
    SinkhornResult out{M, 0, 0.0, false};
    Matrix& X = out.matrix;
    while (out.iterations < iters &&
           !(std::max(row_deviation(X), col_deviation(X)) < tol)) {
        X = X.array().colwise() / X.rowwise().sum().array();
        X = X.array().rowwise() / X.colwise().sum().array();
        ++out.iterations;
    }
    out.max_row_deviation = row_deviation(X);
    out.row_stochastic = out.max_row_deviation <= TransitionMatrix::kRowSumTolerance;
    return out;
}

SinkhornResult sinkhorn_baseline(const Matrix& B0, std::size_t iters, double tol) {
    SinkhornResult out = sinkhorn_scale(B0, iters, tol);
    out.matrix.triangularView<Eigen::StrictlyUpper>().setZero();
    out.max_row_deviation = row_deviation(out.matrix);
    out.row_stochastic = out.max_row_deviation <= TransitionMatrix::kRowSumTolerance;
    return out;
}

std::size_t numerical_rank(const Matrix& M, double threshold) {
    if (M.size() == 0) {
        return 0;
    }
    Eigen::BDCSVD<Matrix> svd(M);
    const Vector& s = svd.singularValues();
    return static_cast<std::size_t>((s.array() > threshold).count());
}

StructureStats structure_stats(const BadmmState& state) {
    return {static_cast<std::size_t>((state.X1.array().abs() > 0.0).count()),
            numerical_rank(state.B.entries())};
}

}  // namespace evbranch
