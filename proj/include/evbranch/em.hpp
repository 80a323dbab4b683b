#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evbranch/badmm.hpp"
#include "evbranch/core.hpp"

namespace evbranch {

struct EmConfig {
    std::size_t max_em_iters = 100;
    /// Stop once |L_k - L_{k-1}| / |L_{k-1}| falls below this.
    double loglik_tol = 1e-5;
    /// When set, every responsibility matrix is structured by BADMM before the M-step.
    std::optional<BadmmConfig> badmm;
    double param_floor = 1e-10;

    void validate() const;
};

struct MStepResult {
    HawkesParams params;
    /// Types with no events in the dataset; their mu and A rows/columns sit at the floor.
    std::vector<std::size_t> unobserved_types;
};

struct FitResult {
    HawkesParams params;
    /// Responsibilities from the final E-step (structured when BADMM is on).
    std::vector<TransitionMatrix> responsibilities;
    /// Log-likelihood at the initial parameters, then after every iteration.
    std::vector<double> loglik_history;
    std::size_t iterations_run = 0;
    std::vector<std::string> warnings;
};

/// Posterior over causes for every event: background on the diagonal, parents below it.
TransitionMatrix e_step(const HawkesParams& params, const EventSequence& seq);

std::vector<TransitionMatrix> e_step(const HawkesParams& params,
                                     std::span<const EventSequence> dataset,
                                     Exec exec = Exec::parallel);

/// Jensen lower bound Q(params, params_prev) with responsibilities computed under params_prev.
double q_function(const HawkesParams& params, const HawkesParams& params_prev,
                  std::span<const EventSequence> dataset);

/// Same bound with the responsibilities supplied directly.
double q_function(const HawkesParams& params, std::span<const TransitionMatrix> responsibilities,
                  std::span<const EventSequence> dataset);

/// Closed-form maximizer of Q for the exponential kernel, pooled over sequences.
MStepResult m_step(std::span<const TransitionMatrix> responsibilities,
                   std::span<const EventSequence> dataset, std::size_t num_types,
                   const ExpKernel& kernel, double floor, Exec exec = Exec::parallel);

/// mu_c = count_c / sum T, A uniform with every entry 0.5 / C (branching ratio 0.5).
HawkesParams initial_params(std::span<const EventSequence> dataset, std::size_t num_types,
                            const ExpKernel& kernel, double floor);

FitResult fit(std::span<const EventSequence> dataset, std::size_t num_types,
              const ExpKernel& kernel, const EmConfig& cfg, Exec exec = Exec::parallel);

}  // namespace evbranch
