#include "evbranch/core.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evbranch {

int max_threads() noexcept { return omp_get_max_threads(); }

void set_threads(int n) noexcept {
    if (n > 0) {
        omp_set_num_threads(n);
    }
}

ZeroIntensityError::ZeroIntensityError(std::string sequence_id, std::size_t event_index)
    : std::runtime_error("zero intensity at event " + std::to_string(event_index) +
                         " of sequence '" + sequence_id + "': log-likelihood is -inf"),
      sequence_id_(std::move(sequence_id)),
      event_index_(event_index) {}

const char* to_string(Invariant inv) noexcept {
    switch (inv) {
        case Invariant::square: return "square";
        case Invariant::finite: return "finite";
        case Invariant::nonnegative: return "nonnegative";
        case Invariant::lower_triangular: return "lower_triangular";
        case Invariant::row_sum: return "row_sum";
    }
    return "unknown";
}

InvariantError::InvariantError(Invariant which, const std::string& detail)
    : std::invalid_argument(std::string("transition matrix violates ") + to_string(which) +
                            ": " + detail),
      which_(which) {}

EventSequence::EventSequence(std::string id, double horizon, std::vector<Event> events)
    : id_(std::move(id)), horizon_(horizon), events_(std::move(events)) {
    if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
        throw std::invalid_argument("sequence '" + id_ + "': horizon must be positive and finite");
    }
    for (std::size_t i = 0; i < events_.size(); ++i) {
        const double t = events_[i].t;
        if (!(t >= 0.0) || t > horizon_) {
            std::ostringstream os;
            os << "sequence '" << id_ << "': event " << i << " at t=" << t << " outside [0, "
               << horizon_ << "]";
            throw std::invalid_argument(os.str());
        }
        if (i > 0 && !(t > events_[i - 1].t)) {
            std::ostringstream os;
            os << "sequence '" << id_ << "': timestamps not strictly increasing at event " << i;
            throw std::invalid_argument(os.str());
        }
    }
}

std::size_t EventSequence::min_num_types() const noexcept {
    std::size_t c = 0;
    for (const auto& e : events_) {
        c = std::max(c, e.c + 1);
    }
    return c;
}

ExpKernel::ExpKernel(double beta) : beta_(beta) {
    if (!(beta_ > 0.0) || !std::isfinite(beta_)) {
        throw std::invalid_argument("kernel decay rate beta must be positive and finite");
    }
}

double ExpKernel::eval(double dt) const {
    if (!(dt >= 0.0)) {
        throw DomainError("kernel_eval: negative time lag");
    }
    return beta_ * std::exp(-beta_ * dt);
}

double ExpKernel::integral(double x) const {
    if (!(x >= 0.0)) {
        throw DomainError("kernel_integral: negative upper limit");
    }
    return -std::expm1(-beta_ * x);
}

double kernel_eval(const ExpKernel& kernel, double dt) { return kernel.eval(dt); }

double kernel_integral(const ExpKernel& kernel, double x) { return kernel.integral(x); }

HawkesParams::HawkesParams(Vector mu, Matrix infectivity, ExpKernel kernel)
    : mu_(std::move(mu)), infectivity_(std::move(infectivity)), kernel_(kernel) {
    const auto c = mu_.size();
    if (infectivity_.rows() != c || infectivity_.cols() != c) {
        throw std::invalid_argument("infectivity matrix must be C x C with C = len(mu)");
    }
    if (!mu_.allFinite() || !infectivity_.allFinite()) {
        throw std::invalid_argument("Hawkes parameters must be finite");
    }
    if ((mu_.array() < 0.0).any() || (infectivity_.array() < 0.0).any()) {
        throw std::invalid_argument("Hawkes parameters must be nonnegative");
    }
}

TransitionMatrix::TransitionMatrix(Matrix entries) : entries_(std::move(entries)) {
    const auto n = entries_.rows();
    if (entries_.cols() != n) {
        throw InvariantError(Invariant::square, std::to_string(entries_.rows()) + "x" +
                                                    std::to_string(entries_.cols()));
    }
    if (!entries_.allFinite()) {
        throw InvariantError(Invariant::finite, "non-finite entry");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = entries_(i, j);
            if (v < 0.0) {
                throw InvariantError(Invariant::nonnegative, "entry (" + std::to_string(i) +
                                                                 ", " + std::to_string(j) + ")");
            }
            if (j > i && v != 0.0) {
                throw InvariantError(Invariant::lower_triangular,
                                     "nonzero entry (" + std::to_string(i) + ", " +
                                         std::to_string(j) + ") above the diagonal");
            }
        }
        const double sum = entries_.row(i).sum();
        const double dev = std::abs(sum - 1.0);
        if (dev > kRenormalizeTolerance) {
            std::ostringstream os;
            os << "row " << i << " sums to " << sum;
            throw InvariantError(Invariant::row_sum, os.str());
        }
        if (dev > kRowSumTolerance) {
            entries_.row(i) /= sum;
        }
    }
}

TransitionMatrix TransitionMatrix::identity(std::size_t n) {
    const auto m = static_cast<Eigen::Index>(n);
    return TransitionMatrix(Matrix::Identity(m, m));
}

void check_types(const HawkesParams& params, const EventSequence& seq) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i].c >= params.num_types()) {
            throw std::out_of_range("sequence '" + seq.id() + "': event " + std::to_string(i) +
                                    " has type " + std::to_string(seq[i].c) +
                                    " >= C = " + std::to_string(params.num_types()));
        }
    }
}

double intensity(const HawkesParams& params, const EventSequence& seq, std::size_t c, double t) {
    if (c >= params.num_types()) {
        throw std::out_of_range("intensity: type index " + std::to_string(c) + " >= C");
    }
    if (!(t > 0.0)) {
        throw DomainError("intensity: query time must be positive");
    }
    double endogenous = 0.0;
    for (const auto& e : seq.events()) {
        if (!(e.t < t)) {
            break;
        }
        endogenous += params.infectivity()(static_cast<Eigen::Index>(c),
                                           static_cast<Eigen::Index>(e.c)) *
                      params.kernel().eval(t - e.t);
    }
    return params.mu()(static_cast<Eigen::Index>(c)) + endogenous;
}

std::vector<double> event_intensities(const HawkesParams& params, const EventSequence& seq) {
    check_types(params, seq);
    const auto C = static_cast<Eigen::Index>(params.num_types());
    const double beta = params.kernel().beta();
    // excitation(c') = sum over earlier events of type c' of kappa(t - t_n)
    Vector excitation = Vector::Zero(C);
    std::vector<double> out;
    out.reserve(seq.size());
    double prev_t = 0.0;
    for (const auto& e : seq.events()) {
        excitation *= std::exp(-beta * (e.t - prev_t));
        const auto c = static_cast<Eigen::Index>(e.c);
        out.push_back(params.mu()(c) + params.infectivity().row(c).dot(excitation));
        excitation(c) += beta;
        prev_t = e.t;
    }
    return out;
}

double log_likelihood(const HawkesParams& params, const EventSequence& seq) {
    const auto lambdas = event_intensities(params, seq);
    double log_term = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0)) {
            throw ZeroIntensityError(seq.id(), i);
        }
        log_term += std::log(lambdas[i]);
    }
    const double T = seq.horizon();
    // Column sums of A: total offspring mass per parent type.
    const Vector offspring = params.infectivity().colwise().sum().transpose();
    double compensator = T * params.mu().sum();
    for (const auto& e : seq.events()) {
        compensator += offspring(static_cast<Eigen::Index>(e.c)) *
                       params.kernel().integral(T - e.t);
    }
    return log_term - compensator;
}

double log_likelihood(const HawkesParams& params, std::span<const EventSequence> dataset,
                      Exec exec) {
    std::vector<double> per_seq(dataset.size());
    for_each_index(dataset.size(), exec,
                   [&](std::size_t i) { per_seq[i] = log_likelihood(params, dataset[i]); });
    return pairwise_sum(per_seq);
}

}  // namespace evbranch
