#include "evbranch/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "evbranch/rng.hpp"

namespace evbranch {

namespace {

constexpr int kPowerIterations = 10'000;
constexpr double kPowerTolerance = 1e-8;

void check_stable(const HawkesParams& params) {
    const double radius = spectral_stability(params);
    if (!(radius < 1.0)) {
        throw UnstableParamsError(radius);
    }
}

// Forces strictly increasing timestamps; a tie moves the later event by one ulp.
void separate_ties(std::vector<Event>& events) {
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (!(events[i].t > events[i - 1].t)) {
            events[i].t = std::nextafter(events[i - 1].t, std::numeric_limits<double>::infinity());
        }
    }
}

}  // namespace

void SimConfig::validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("simulation horizon must be positive and finite");
    }
    if (max_events == 0) {
        throw std::invalid_argument("max_events must be positive");
    }
}

UnstableParamsError::UnstableParamsError(double radius)
    : std::domain_error([radius] {
          std::ostringstream os;
          os << "branching ratio " << radius << " >= 1: process is not stationary";
          return os.str();
      }()),
      radius_(radius) {}

TruncationError::TruncationError(std::size_t max_events, EventSequence partial)
    : std::runtime_error("simulation exceeded max_events = " + std::to_string(max_events)),
      partial_(std::move(partial)) {}

double spectral_stability(const HawkesParams& params) {
    const auto C = static_cast<Eigen::Index>(params.num_types());
    if (C == 0) {
        return 0.0;
    }
    // Shifting by I makes the Perron root strictly dominant in modulus, so
    // periodic matrices such as [[0, 1], [1, 0]] still converge.
    const Matrix shifted = params.infectivity() + Matrix::Identity(C, C);
    Vector x = Vector::Constant(C, 1.0 / std::sqrt(static_cast<double>(C)));
    double estimate = 1.0;
    for (int k = 0; k < kPowerIterations; ++k) {
        const Vector y = shifted * x;
        const double next = y.norm();
        x = y / next;
        const double radius = next - 1.0;
        const bool converged =
            std::abs(next - estimate) <= kPowerTolerance * std::max(radius, 1e-12);
        estimate = next;
        if (converged && k > 0) {
            break;
        }
    }
    return std::max(estimate - 1.0, 0.0);
}

EventSequence simulate_thinning(const HawkesParams& params, const SimConfig& cfg,
                                const std::string& id) {
    cfg.validate();
    check_stable(params);

    const auto C = static_cast<Eigen::Index>(params.num_types());
    const double beta = params.kernel().beta();
    const Vector& mu = params.mu();
    const Matrix& A = params.infectivity();

    Rng rng(cfg.seed);
    Vector excitation = Vector::Zero(C);
    std::vector<Event> events;
    double t = 0.0;

    while (true) {
        // Intensity just after t bounds the intensity until the next event.
        const double bound = mu.sum() + (A * excitation).sum();
        if (!(bound > 0.0)) {
            break;
        }
        const double candidate = t + rng.exponential(bound);
        if (candidate > cfg.horizon) {
            break;
        }
        excitation *= std::exp(-beta * (candidate - t));
        t = candidate;
        const Vector lambda = mu + A * excitation;
        const double total = lambda.sum();
        if (!(rng.uniform() * bound < total)) {
            continue;
        }
        const double pick = rng.uniform() * total;
        Eigen::Index type = C - 1;
        double cumulative = 0.0;
        for (Eigen::Index c = 0; c < C; ++c) {
            cumulative += lambda(c);
            if (pick < cumulative) {
                type = c;
                break;
            }
        }
        while (type > 0 && !(lambda(type) > 0.0)) {
            --type;
        }
        if (events.size() == cfg.max_events) {
            throw TruncationError(cfg.max_events, EventSequence(id, cfg.horizon, events));
        }
        if (!events.empty() && !(t > events.back().t)) {
            t = std::nextafter(events.back().t, std::numeric_limits<double>::infinity());
        }
        events.push_back({t, static_cast<std::size_t>(type)});
        excitation(type) += beta;
    }
    return EventSequence(id, cfg.horizon, std::move(events));
}

BranchingSample simulate_branching(const HawkesParams& params, const SimConfig& cfg,
                                   const std::string& id) {
    cfg.validate();
    check_stable(params);

    struct Node {
        double t;
        std::size_t c;
        long parent;  // index into generation order
    };

    const auto C = params.num_types();
    const double beta = params.kernel().beta();
    const double T = cfg.horizon;
    Rng rng(cfg.seed);
    std::vector<Node> nodes;

    auto to_sequence = [&](std::vector<Node> raw) {
        std::stable_sort(raw.begin(), raw.end(),
                         [](const Node& a, const Node& b) { return a.t < b.t; });
        std::vector<Event> events;
        events.reserve(raw.size());
        for (const auto& n : raw) {
            events.push_back({n.t, n.c});
        }
        separate_ties(events);
        return EventSequence(id, T, std::move(events));
    };
    auto push = [&](Node n) {
        if (nodes.size() == cfg.max_events) {
            throw TruncationError(cfg.max_events, to_sequence(nodes));
        }
        nodes.push_back(n);
    };

    // Immigrants: homogeneous Poisson(mu_c) on [0, T], one type at a time.
    for (std::size_t c = 0; c < C; ++c) {
        const double rate = params.mu()(static_cast<Eigen::Index>(c));
        if (!(rate > 0.0)) {
            continue;
        }
        double t = rng.exponential(rate);
        while (t <= T) {
            push({t, c, -1});
            t += rng.exponential(rate);
        }
    }

    // Offspring of type c from a type-c' parent: Poisson process with rate
    // a(c, c') kappa(s). Unit-rate arrivals u in cumulative-intensity space map
    // back through the inverse of a(c, c') (1 - exp(-beta s)).
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node parent = nodes[i];
        const double remaining = T - parent.t;
        for (std::size_t c = 0; c < C; ++c) {
            const double a = params.infectivity()(static_cast<Eigen::Index>(c),
                                                  static_cast<Eigen::Index>(parent.c));
            if (!(a > 0.0)) {
                continue;
            }
            const double mass = a * -std::expm1(-beta * remaining);
            double u = rng.exponential(1.0);
            while (u < mass) {
                const double lag = -std::log1p(-u / a) / beta;
                push({std::min(parent.t + lag, T), c, static_cast<long>(i)});
                u += rng.exponential(1.0);
            }
        }
    }

    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return nodes[a].t < nodes[b].t; });
    std::vector<long> rank(nodes.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        rank[order[k]] = static_cast<long>(k);
    }

    std::vector<Event> events;
    BranchLabels labels{id, {}};
    events.reserve(nodes.size());
    labels.parent.reserve(nodes.size());
    for (const std::size_t idx : order) {
        const Node& n = nodes[idx];
        events.push_back({n.t, n.c});
        labels.parent.push_back(n.parent < 0 ? -1 : rank[static_cast<std::size_t>(n.parent)]);
    }
    separate_ties(events);
    return {EventSequence(id, T, std::move(events)), std::move(labels)};
}

SimulatedDataset simulate_dataset(const HawkesParams& params, const SimConfig& cfg,
                                  std::size_t count, SimMethod method, Exec exec) {
    cfg.validate();
    check_stable(params);
    std::vector<std::optional<EventSequence>> seqs(count);
    std::vector<BranchLabels> labels(method == SimMethod::branching ? count : 0);
    for_each_index(count, exec, [&](std::size_t i) {
        SimConfig local = cfg;
        local.seed = stream_seed(cfg.seed, i);
        const std::string id = "seq" + std::to_string(i);
        if (method == SimMethod::branching) {
            auto sample = simulate_branching(params, local, id);
            seqs[i] = std::move(sample.sequence);
            labels[i] = std::move(sample.labels);
        } else {
            seqs[i] = simulate_thinning(params, local, id);
        }
    });
    SimulatedDataset out;
    out.sequences.reserve(count);
    for (auto& s : seqs) {
        out.sequences.push_back(std::move(*s));
    }
    out.labels = std::move(labels);
    return out;
}

}  // namespace evbranch
