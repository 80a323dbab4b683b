#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "evbranch/exec.hpp"

namespace evbranch {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when an argument lies outside an operation's domain (negative lag, t <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An observed event has zero conditional intensity, so the log-likelihood is -inf.
class ZeroIntensityError : public std::runtime_error {
public:
    ZeroIntensityError(std::string sequence_id, std::size_t event_index);

    const std::string& sequence_id() const noexcept { return sequence_id_; }
    std::size_t event_index() const noexcept { return event_index_; }

private:
    std::string sequence_id_;
    std::size_t event_index_;
};

enum class Invariant {
    square,
    finite,
    nonnegative,
    lower_triangular,
    row_sum,
};

const char* to_string(Invariant inv) noexcept;

/// A matrix handed to TransitionMatrix violated one of its invariants.
class InvariantError : public std::invalid_argument {
public:
    InvariantError(Invariant which, const std::string& detail);

    Invariant which() const noexcept { return which_; }

private:
    Invariant which_;
};

struct Event {
    double t = 0.0;
    std::size_t c = 0;

    friend bool operator==(const Event&, const Event&) = default;
};

/// Typed events on [0, horizon], strictly increasing in time.
class EventSequence {
public:
    EventSequence(std::string id, double horizon, std::vector<Event> events);

    const std::string& id() const noexcept { return id_; }
    double horizon() const noexcept { return horizon_; }
    const std::vector<Event>& events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    const Event& operator[](std::size_t i) const { return events_[i]; }

    /// Smallest C for which every event type is valid (0 for an empty sequence).
    std::size_t min_num_types() const noexcept;

    friend bool operator==(const EventSequence&, const EventSequence&) = default;

private:
    std::string id_;
    double horizon_;
    std::vector<Event> events_;
};

using Dataset = std::vector<EventSequence>;

/// Normalized exponential decay kernel kappa(t) = beta * exp(-beta * t).
class ExpKernel {
public:
    explicit ExpKernel(double beta = 1.0);

    double beta() const noexcept { return beta_; }
    double eval(double dt) const;
    /// Integral of kappa over [0, x].
    double integral(double x) const;

    friend bool operator==(const ExpKernel&, const ExpKernel&) = default;

private:
    double beta_;
};

double kernel_eval(const ExpKernel& kernel, double dt);
double kernel_integral(const ExpKernel& kernel, double x);

/// Exogenous rates mu, infectivity A (a(c, c') = impact of type c' on type c), and kernel.
class HawkesParams {
public:
    HawkesParams(Vector mu, Matrix infectivity, ExpKernel kernel = ExpKernel{});

    std::size_t num_types() const noexcept { return static_cast<std::size_t>(mu_.size()); }
    const Vector& mu() const noexcept { return mu_; }
    const Matrix& infectivity() const noexcept { return infectivity_; }
    const ExpKernel& kernel() const noexcept { return kernel_; }

private:
    Vector mu_;
    Matrix infectivity_;
    ExpKernel kernel_;
};

/// Square, lower-triangular (diagonal included), nonnegative, row-stochastic matrix.
///
/// Rows whose sum is off by at most kRenormalizeTolerance are rescaled on
/// construction; anything further off is rejected.
class TransitionMatrix {
public:
    static constexpr double kRowSumTolerance = 1e-9;
    static constexpr double kRenormalizeTolerance = 1e-6;

    TransitionMatrix() = default;
    explicit TransitionMatrix(Matrix entries);

    static TransitionMatrix identity(std::size_t n);

    std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Matrix& entries() const noexcept { return entries_; }
    double operator()(std::size_t row, std::size_t col) const { return entries_(row, col); }

private:
    Matrix entries_;
};

/// mu_c + sum over t_n < t of a(c, c_n) kappa(t - t_n).
double intensity(const HawkesParams& params, const EventSequence& seq, std::size_t c, double t);

/// lambda_{c_n}(t_n) for every event, using strictly earlier history. O(N C).
std::vector<double> event_intensities(const HawkesParams& params, const EventSequence& seq);

/// Sum of log intensities at the events minus the closed-form compensator.
double log_likelihood(const HawkesParams& params, const EventSequence& seq);

/// Sum of per-sequence log-likelihoods (pairwise reduction, thread-count independent).
double log_likelihood(const HawkesParams& params, std::span<const EventSequence> dataset,
                      Exec exec = Exec::parallel);

/// Throws std::out_of_range unless every event type is below params.num_types().
void check_types(const HawkesParams& params, const EventSequence& seq);

}  // namespace evbranch
