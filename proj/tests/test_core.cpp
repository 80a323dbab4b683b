#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "evbranch/core.hpp"
#include "oracles.hpp"

using namespace evbranch;

namespace {

HawkesParams one_type(double mu, double a, double beta = 1.0) {
    return HawkesParams(Vector::Constant(1, mu), Matrix::Constant(1, 1, a), ExpKernel(beta));
}

}  // namespace

TEST(Kernel, EvalMatchesClosedForm) {
    EXPECT_DOUBLE_EQ(kernel_eval(ExpKernel(1.0), 0.0), 1.0);
    EXPECT_NEAR(kernel_eval(ExpKernel(1.0), 1.0), 0.36787944, 1e-8);
    EXPECT_NEAR(kernel_eval(ExpKernel(2.0), 0.5), 0.73575888, 1e-8);
}

TEST(Kernel, EvalIsNonincreasing) {
    const ExpKernel k(1.7);
    double prev = k.eval(0.0);
    for (double dt = 0.01; dt < 10.0; dt += 0.01) {
        const double v = k.eval(dt);
        EXPECT_LE(v, prev);
        prev = v;
    }
}

TEST(Kernel, IntegralMatchesClosedForm) {
    const ExpKernel k(1.0);
    EXPECT_DOUBLE_EQ(kernel_integral(k, 0.0), 0.0);
    EXPECT_NEAR(kernel_integral(k, 1e6), 1.0, 1e-12);
    EXPECT_NEAR(kernel_integral(k, std::numeric_limits<double>::infinity()), 1.0, 1e-12);
    EXPECT_NEAR(kernel_integral(k, 1.0), 0.63212056, 1e-8);
}

TEST(Kernel, NegativeArgumentsAreDomainErrors) {
    const ExpKernel k(1.0);
    EXPECT_THROW(k.eval(-1e-9), DomainError);
    EXPECT_THROW(k.integral(-1.0), DomainError);
    EXPECT_THROW(ExpKernel(0.0), std::invalid_argument);
    EXPECT_THROW(ExpKernel(-2.0), std::invalid_argument);
}

TEST(EventSequence, RejectsInvalidInput) {
    EXPECT_THROW(EventSequence("s", 0.0, {}), std::invalid_argument);
    EXPECT_THROW(EventSequence("s", 1.0, {{0.5, 0}, {0.5, 1}}), std::invalid_argument);
    EXPECT_THROW(EventSequence("s", 1.0, {{0.6, 0}, {0.5, 1}}), std::invalid_argument);
    EXPECT_THROW(EventSequence("s", 1.0, {{1.5, 0}}), std::invalid_argument);
    EXPECT_THROW(EventSequence("s", 1.0, {{-0.1, 0}}), std::invalid_argument);
    EXPECT_NO_THROW(EventSequence("s", 1.0, {{0.0, 0}, {1.0, 2}}));
    EXPECT_EQ(EventSequence("s", 1.0, {{0.0, 0}, {1.0, 2}}).min_num_types(), 3u);
}

TEST(HawkesParams, RejectsNegativeOrMismatched) {
    EXPECT_THROW(HawkesParams(Vector::Constant(2, 1.0), Matrix::Zero(3, 3)), std::invalid_argument);
    EXPECT_THROW(HawkesParams(Vector::Constant(1, -1.0), Matrix::Zero(1, 1)), std::invalid_argument);
    EXPECT_THROW(HawkesParams(Vector::Constant(1, 1.0), Matrix::Constant(1, 1, -0.1)),
                 std::invalid_argument);
}

TEST(Intensity, Examples) {
    const EventSequence empty("e", 5.0, {});
    EXPECT_DOUBLE_EQ(intensity(one_type(0.5, 1.0), empty, 0, 3.0), 0.5);

    const EventSequence one("o", 5.0, {{0.0, 0}});
    EXPECT_NEAR(intensity(one_type(0.5, 1.0), one, 0, 1.0), 0.86787944, 1e-8);

    const EventSequence two("t", 5.0, {{0.1, 0}, {0.2, 0}});
    EXPECT_DOUBLE_EQ(intensity(one_type(0.5, 0.0), two, 0, 1.0), 0.5);
}

TEST(Intensity, OnlyStrictlyEarlierEventsContribute) {
    const EventSequence one("o", 5.0, {{1.0, 0}});
    EXPECT_DOUBLE_EQ(intensity(one_type(0.5, 1.0), one, 0, 1.0), 0.5);
}

TEST(Intensity, Errors) {
    const EventSequence s("s", 1.0, {});
    EXPECT_THROW(intensity(one_type(1.0, 0.0), s, 1, 0.5), std::out_of_range);
    EXPECT_THROW(intensity(one_type(1.0, 0.0), s, 0, 0.0), DomainError);
}

TEST(Intensity, NeverBelowBackgroundRate) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Vector mu = Vector::NullaryExpr(3, [&] { return U(rng); });
        Matrix A = Matrix::NullaryExpr(3, 3, [&] { return U(rng); });
        const HawkesParams p(mu, A, ExpKernel(0.5 + U(rng)));
        std::vector<Event> ev;
        double t = 0.0;
        for (int i = 0; i < 20; ++i) {
            t += 0.01 + U(rng);
            ev.push_back({t, static_cast<std::size_t>(rng() % 3)});
        }
        const EventSequence s("r", t + 1.0, ev);
        for (double q = 0.05; q < t + 1.0; q += 0.37) {
            for (std::size_t c = 0; c < 3; ++c) {
                EXPECT_GE(intensity(p, s, c, q), mu(static_cast<Eigen::Index>(c)));
            }
        }
    }
}

TEST(LogLikelihood, PoissonExamples) {
    EXPECT_NEAR(log_likelihood(one_type(1.0, 0.0), EventSequence("p", 1.0, {{0.5, 0}})), -1.0, 1e-15);
    EXPECT_NEAR(log_likelihood(one_type(1.0, 0.0), EventSequence("p", 2.0, {})), -2.0, 1e-15);
}

TEST(LogLikelihood, MatchesTrapezoidQuadrature) {
    const HawkesParams p = one_type(0.5, 0.8, 1.3);
    const EventSequence s("q", 2.0, {{0.3, 0}, {1.1, 0}});
    const double oracle = oracle::quadrature_log_likelihood(p, s, 1'000'000);
    EXPECT_NEAR(log_likelihood(p, s), oracle, 1e-6);
}

TEST(LogLikelihood, MultiTypeMatchesQuadrature) {
    Matrix A(2, 2);
    A << 0.2, 0.4, 0.1, 0.3;
    const HawkesParams p((Vector(2) << 0.4, 0.7).finished(), A, ExpKernel(2.0));
    const EventSequence s("q", 3.0, {{0.2, 1}, {0.9, 0}, {1.0, 1}, {2.4, 0}});
    EXPECT_NEAR(log_likelihood(p, s), oracle::quadrature_log_likelihood(p, s, 1'000'000), 1e-6);
}

TEST(LogLikelihood, ZeroIntensityIsReportedNotSilent) {
    const HawkesParams p = one_type(0.0, 1.0);
    const EventSequence s("z", 1.0, {{0.2, 0}, {0.5, 0}});
    try {
        log_likelihood(p, s);
        FAIL() << "expected ZeroIntensityError";
    } catch (const ZeroIntensityError& e) {
        EXPECT_EQ(e.event_index(), 0u);
        EXPECT_EQ(e.sequence_id(), "z");
    }
}

TEST(LogLikelihood, ExtendingHorizonWithoutEventsDecreases) {
    Matrix A(2, 2);
    A << 0.2, 0.4, 0.1, 0.3;
    const Vector mu = (Vector(2) << 0.4, 0.7).finished();
    const HawkesParams p(mu, A, ExpKernel(1.0));
    const std::vector<Event> ev{{0.2, 1}, {0.9, 0}, {1.4, 1}};
    const double base = log_likelihood(p, EventSequence("a", 2.0, ev));
    for (const double dT : {0.1, 1.0, 5.0}) {
        const double extended = log_likelihood(p, EventSequence("a", 2.0 + dT, ev));
        EXPECT_LT(extended, base);
        // Decrease is at least sum(mu) * dT; the rest is compensator growth.
        EXPECT_LE(extended, base - mu.sum() * dT + 1e-12);
    }
}

TEST(TransitionMatrix, AcceptsValidAndRenormalizesNoise) {
    Matrix m(3, 3);
    m << 1, 0, 0, 0.25, 0.75, 0, 0.2, 0.3, 0.5 + 5e-7;
    const TransitionMatrix t(m);
    EXPECT_NEAR(t.entries().row(2).sum(), 1.0, 1e-15);
    EXPECT_EQ(TransitionMatrix::identity(4).size(), 4u);
    EXPECT_EQ(TransitionMatrix(Matrix(0, 0)).size(), 0u);
}

TEST(TransitionMatrix, RejectsEachInvariant) {
    auto which = [](const Matrix& m) {
        try {
            TransitionMatrix t(m);
        } catch (const InvariantError& e) {
            return e.which();
        }
        ADD_FAILURE() << "matrix accepted";
        return Invariant::finite;
    };
    EXPECT_EQ(which(Matrix::Identity(2, 3)), Invariant::square);
    Matrix upper = Matrix::Identity(2, 2);
    upper(0, 1) = 0.1;
    upper(0, 0) = 0.9;
    EXPECT_EQ(which(upper), Invariant::lower_triangular);
    Matrix neg(2, 2);
    neg << 1, 0, -0.5, 1.5;
    EXPECT_EQ(which(neg), Invariant::nonnegative);
    Matrix sum(2, 2);
    sum << 1, 0, 0.5, 0.6;
    EXPECT_EQ(which(sum), Invariant::row_sum);
    Matrix nan = Matrix::Identity(2, 2);
    nan(1, 0) = std::nan("");
    EXPECT_EQ(which(nan), Invariant::finite);
}

TEST(TransitionMatrix, RandomViolationsAreAllRejected) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = static_cast<Eigen::Index>(2 + rng() % 6);
        Matrix m = oracle::random_stochastic_lower(rng, n);
        const auto i = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n));
        switch (trial % 3) {
            case 0: {  // put mass above the diagonal
                const Eigen::Index row = std::min<Eigen::Index>(i, n - 2);
                m(row, row + 1) = 0.01 + U(rng);
                break;
            }
            case 1: {  // break a row sum beyond the renormalization window
                const double delta = 1e-5 + 0.5 * U(rng);
                m.row(i) *= U(rng) < 0.5 ? 1.0 - delta : 1.0 + delta;
                break;
            }
            default:  // negative entry with row sum kept at 1
                if (i == 0) {
                    m(1, 0) = -0.5;
                    m(1, 1) = 1.5;
                } else {
                    m(i, 0) -= 1.0;
                    m(i, i) += 1.0;
                }
        }
        EXPECT_THROW(TransitionMatrix{m}, InvariantError) << "trial " << trial;
    }
}

TEST(DatasetLogLikelihood, SerialAndParallelAgreeExactly) {
    const HawkesParams p = one_type(0.5, 0.5);
    Dataset d;
    for (int i = 0; i < 17; ++i) {
        d.emplace_back("s" + std::to_string(i), 10.0,
                       std::vector<Event>{{0.1 * i + 0.05, 0}, {5.0, 0}, {9.0 - 0.1 * i, 0}});
    }
    EXPECT_EQ(log_likelihood(p, d, Exec::serial), log_likelihood(p, d, Exec::parallel));
}
