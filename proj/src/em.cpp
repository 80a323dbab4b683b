#include "evbranch/em.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace evbranch {

namespace {

// Sufficient statistics of one sequence for the closed-form M-step.
struct MStats {
    Vector mu_num;  // sum of diagonal responsibilities per type
    Matrix a_num;   // a_num(c, c') = sum of r(n, n') with c_n = c, c_n' = c'
    Vector a_den;   // a_den(c') = sum over type-c' events of kernel mass left before T
    Vector count;
    double horizon = 0.0;

    static MStats zero(Eigen::Index C) {
        return {Vector::Zero(C), Matrix::Zero(C, C), Vector::Zero(C), Vector::Zero(C), 0.0};
    }
    friend MStats operator+(const MStats& a, const MStats& b) {
        return {a.mu_num + b.mu_num, a.a_num + b.a_num, a.a_den + b.a_den, a.count + b.count,
                a.horizon + b.horizon};
    }
};

MStats sequence_stats(const TransitionMatrix& R, const EventSequence& seq, Eigen::Index C,
                      const ExpKernel& kernel) {
    MStats s = MStats::zero(C);
    s.horizon = seq.horizon();
    const auto N = static_cast<Eigen::Index>(seq.size());
    for (Eigen::Index n = 0; n < N; ++n) {
        const auto c = static_cast<Eigen::Index>(seq[static_cast<std::size_t>(n)].c);
        s.mu_num(c) += R(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        for (Eigen::Index m = 0; m < n; ++m) {
            const auto cp = static_cast<Eigen::Index>(seq[static_cast<std::size_t>(m)].c);
            s.a_num(c, cp) += R.entries()(n, m);
        }
        s.a_den(c) += kernel.integral(seq.horizon() - seq[static_cast<std::size_t>(n)].t);
        s.count(c) += 1.0;
    }
    return s;
}

void check_aligned(std::span<const TransitionMatrix> responsibilities,
                   std::span<const EventSequence> dataset) {
    if (responsibilities.size() != dataset.size()) {
        throw std::invalid_argument("responsibilities and dataset differ in length");
    }
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (responsibilities[i].size() != dataset[i].size()) {
            throw std::invalid_argument("responsibility matrix " + std::to_string(i) +
                                        " does not match the size of sequence '" +
                                        dataset[i].id() + "'");
        }
    }
}

}  // namespace

void EmConfig::validate() const {
    if (max_em_iters == 0) {
        throw std::invalid_argument("em: max_em_iters must be at least 1");
    }
    if (!(loglik_tol >= 0.0)) {
        throw std::invalid_argument("em: loglik_tol must be nonnegative");
    }
    if (!(param_floor > 0.0)) {
        throw std::invalid_argument("em: param_floor must be positive");
    }
    if (badmm) {
        badmm->validate();
    }
}

TransitionMatrix e_step(const HawkesParams& params, const EventSequence& seq) {
    check_types(params, seq);
    const auto N = static_cast<Eigen::Index>(seq.size());
    const Matrix& A = params.infectivity();
    Matrix R = Matrix::Zero(N, N);
    for (Eigen::Index n = 0; n < N; ++n) {
        const Event& e = seq[static_cast<std::size_t>(n)];
        const auto c = static_cast<Eigen::Index>(e.c);
        R(n, n) = params.mu()(c);
        for (Eigen::Index m = 0; m < n; ++m) {
            const Event& prev = seq[static_cast<std::size_t>(m)];
            R(n, m) = A(c, static_cast<Eigen::Index>(prev.c)) * params.kernel().eval(e.t - prev.t);
        }
        const double lambda = R.row(n).head(n + 1).sum();
        if (!(lambda > 0.0)) {
            throw ZeroIntensityError(seq.id(), static_cast<std::size_t>(n));
        }
        R.row(n).head(n + 1) /= lambda;
    }
    return TransitionMatrix(std::move(R));
}

std::vector<TransitionMatrix> e_step(const HawkesParams& params,
                                     std::span<const EventSequence> dataset, Exec exec) {
    std::vector<TransitionMatrix> out(dataset.size());
    for_each_index(dataset.size(), exec, [&](std::size_t i) { out[i] = e_step(params, dataset[i]); });
    return out;
}

double q_function(const HawkesParams& params, std::span<const TransitionMatrix> responsibilities,
                  std::span<const EventSequence> dataset) {
    check_aligned(responsibilities, dataset);
    const Matrix& A = params.infectivity();
    const Vector offspring = A.colwise().sum().transpose();
    auto entropy_term = [](double r, double numerator) {
        if (r == 0.0) {
            return 0.0;
        }
        return r * std::log(numerator / r);
    };
    double q = 0.0;
    for (std::size_t s = 0; s < dataset.size(); ++s) {
        const EventSequence& seq = dataset[s];
        check_types(params, seq);
        const Matrix& R = responsibilities[s].entries();
        const auto N = static_cast<Eigen::Index>(seq.size());
        for (Eigen::Index n = 0; n < N; ++n) {
            const Event& e = seq[static_cast<std::size_t>(n)];
            const auto c = static_cast<Eigen::Index>(e.c);
            q += entropy_term(R(n, n), params.mu()(c));
            for (Eigen::Index m = 0; m < n; ++m) {
                const Event& prev = seq[static_cast<std::size_t>(m)];
                q += entropy_term(R(n, m), A(c, static_cast<Eigen::Index>(prev.c)) *
                                               params.kernel().eval(e.t - prev.t));
            }
        }
        q -= seq.horizon() * params.mu().sum();
        for (const auto& e : seq.events()) {
            q -= offspring(static_cast<Eigen::Index>(e.c)) *
                 params.kernel().integral(seq.horizon() - e.t);
        }
    }
    return q;
}

double q_function(const HawkesParams& params, const HawkesParams& params_prev,
                  std::span<const EventSequence> dataset) {
    const auto R = e_step(params_prev, dataset, Exec::serial);
    return q_function(params, R, dataset);
}

MStepResult m_step(std::span<const TransitionMatrix> responsibilities,
                   std::span<const EventSequence> dataset, std::size_t num_types,
                   const ExpKernel& kernel, double floor, Exec exec) {
    check_aligned(responsibilities, dataset);
    const auto C = static_cast<Eigen::Index>(num_types);
    std::vector<MStats> per_seq(dataset.size());
    for_each_index(dataset.size(), exec, [&](std::size_t i) {
        for (const auto& e : dataset[i].events()) {
            if (e.c >= num_types) {
                throw std::out_of_range("m_step: event type out of range in sequence '" +
                                        dataset[i].id() + "'");
            }
        }
        per_seq[i] = sequence_stats(responsibilities[i], dataset[i], C, kernel);
    });
    const MStats total = pairwise_reduce(std::span<const MStats>(per_seq), MStats::zero(C),
                                         [](const MStats& a, const MStats& b) { return a + b; });

    Vector mu = Vector::Constant(C, floor);
    Matrix A = Matrix::Constant(C, C, floor);
    std::vector<std::size_t> unobserved;
    for (Eigen::Index c = 0; c < C; ++c) {
        if (total.count(c) == 0.0) {
            unobserved.push_back(static_cast<std::size_t>(c));
        }
        if (total.horizon > 0.0) {
            mu(c) = std::max(total.mu_num(c) / total.horizon, floor);
        }
        for (Eigen::Index cp = 0; cp < C; ++cp) {
            if (total.a_den(cp) > 0.0) {
                A(c, cp) = std::max(total.a_num(c, cp) / total.a_den(cp), floor);
            }
        }
    }
    for (const std::size_t c : unobserved) {
        const auto i = static_cast<Eigen::Index>(c);
        mu(i) = floor;
        A.row(i).setConstant(floor);
        A.col(i).setConstant(floor);
    }
    return {HawkesParams(std::move(mu), std::move(A), kernel), std::move(unobserved)};
}

HawkesParams initial_params(std::span<const EventSequence> dataset, std::size_t num_types,
                            const ExpKernel& kernel, double floor) {
    const auto C = static_cast<Eigen::Index>(num_types);
    Vector counts = Vector::Zero(C);
    double total_horizon = 0.0;
    for (const auto& seq : dataset) {
        total_horizon += seq.horizon();
        for (const auto& e : seq.events()) {
            if (e.c >= num_types) {
                throw std::out_of_range("event type out of range in sequence '" + seq.id() + "'");
            }
            counts(static_cast<Eigen::Index>(e.c)) += 1.0;
        }
    }
    Vector mu = (counts / total_horizon).cwiseMax(floor);
    Matrix A = Matrix::Constant(C, C, 0.5 / static_cast<double>(C));
    return HawkesParams(std::move(mu), std::move(A), kernel);
}

FitResult fit(std::span<const EventSequence> dataset, std::size_t num_types,
              const ExpKernel& kernel, const EmConfig& cfg, Exec exec) {
    cfg.validate();
    if (dataset.empty()) {
        throw std::invalid_argument("fit: dataset is empty");
    }
    if (num_types == 0) {
        throw std::invalid_argument("fit: num_types must be positive");
    }

    FitResult result{initial_params(dataset, num_types, kernel, cfg.param_floor), {}, {}, 0, {}};
    result.loglik_history.push_back(log_likelihood(result.params, dataset, exec));

    for (std::size_t it = 0; it < cfg.max_em_iters; ++it) {
        auto R = e_step(result.params, dataset, exec);
        if (cfg.badmm) {
            for_each_index(R.size(), exec, [&](std::size_t i) {
                R[i] = structure_matrix(R[i], *cfg.badmm, Exec::serial).B;
            });
        }
        auto m = m_step(R, dataset, num_types, kernel, cfg.param_floor, exec);
        result.params = std::move(m.params);
        result.responsibilities = std::move(R);
        ++result.iterations_run;

        if (it == 0) {
            for (const std::size_t c : m.unobserved_types) {
                result.warnings.push_back("type " + std::to_string(c) +
                                          " never observed; parameters held at floor");
            }
        }

        const double prev = result.loglik_history.back();
        const double current = log_likelihood(result.params, dataset, exec);
        result.loglik_history.push_back(current);
        const double scale = std::max(std::abs(prev), std::numeric_limits<double>::min());
        if (std::abs(current - prev) / scale < cfg.loglik_tol) {
            break;
        }
    }
    return result;
}

}  // namespace evbranch
