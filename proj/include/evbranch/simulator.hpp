#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evbranch/core.hpp"

namespace evbranch {

/// parent[n] is the index of the event that triggered event n, or -1 for an immigrant.
struct BranchLabels {
    std::string id;
    std::vector<long> parent;

    friend bool operator==(const BranchLabels&, const BranchLabels&) = default;
};

struct SimConfig {
    double horizon = 100.0;
    std::uint64_t seed = 0;
    std::size_t max_events = 100'000;

    void validate() const;
};

/// Branching ratio is >= 1; simulation would not terminate in expectation.
class UnstableParamsError : public std::domain_error {
public:
    explicit UnstableParamsError(double radius);
    double radius() const noexcept { return radius_; }

private:
    double radius_;
};

/// More than max_events were generated. Carries the events produced so far.
class TruncationError : public std::runtime_error {
public:
    TruncationError(std::size_t max_events, EventSequence partial);
    const EventSequence& partial() const noexcept { return partial_; }

private:
    EventSequence partial_;
};

/// Spectral radius of the infectivity matrix (the branching ratio, since the
/// kernel has unit mass). Power iteration on A + I, relative tolerance 1e-8,
/// at most 10,000 iterations.
double spectral_stability(const HawkesParams& params);

/// Ogata thinning with the bound recomputed after every candidate.
EventSequence simulate_thinning(const HawkesParams& params, const SimConfig& cfg,
                                const std::string& id = "seq0");

struct BranchingSample {
    EventSequence sequence;
    BranchLabels labels;
};

/// Cluster (immigrant + offspring) simulation with ground-truth parents.
BranchingSample simulate_branching(const HawkesParams& params, const SimConfig& cfg,
                                   const std::string& id = "seq0");

enum class SimMethod { branching, thinning };

struct SimulatedDataset {
    Dataset sequences;
    /// Empty unless generated by the branching simulator.
    std::vector<BranchLabels> labels;
};

/// Sequence i uses seed stream_seed(cfg.seed, i) and id "seq<i>".
SimulatedDataset simulate_dataset(const HawkesParams& params, const SimConfig& cfg,
                                  std::size_t count, SimMethod method = SimMethod::branching,
                                  Exec exec = Exec::parallel);

}  // namespace evbranch
