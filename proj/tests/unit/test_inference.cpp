#include "core/errors.hpp"
#include "core/random.hpp"
#include "inference/estimators.hpp"
#include "inference/fps.hpp"
#include "inference/posterior.hpp"
#include "sim/simulate.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

using namespace moran;

namespace {

std::shared_ptr<const RGrid> default_grid()
{
    static const auto grid = RGrid::make({});
    return grid;
}

SelectionEvent birth(std::int64_t a, std::int64_t b, Type winner)
{
    SelectionEvent e;
    e.kind = EventKind::Birth;
    e.pool = {a, b};
    e.winner = winner;
    e.pre_state = {a, b};
    e.post_state = e.pre_state.with_added(winner, 1);
    return e;
}

enum class Move { Up, Down, Stay };

SelectionEvent moran_move(std::int64_t a, std::int64_t b, Move m)
{
    SelectionEvent e;
    e.kind = EventKind::MoranComposite;
    e.pool = {a, b};
    e.pre_state = {a, b};
    e.winner = m == Move::Down ? Type::B : Type::A;
    e.post_state = m == Move::Up ? PopulationState{a + 1, b - 1} : m == Move::Down ? PopulationState{a - 1, b + 1}
                                                                                  : PopulationState{a, b};
    e.stayed = m == Move::Stay;
    return e;
}

double max_abs_diff(std::span<const double> x, std::span<const double> y)
{
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

EventLog sample_log(ProcessKind::Tag tag, PopulationState init, double r, std::uint64_t seed)
{
    return run_trajectory(WellMixedModel{ProcessKind{tag}, std::nullopt}, init, r, seed, 1000000);
}

// Normalized density from per-point log values by plain trapezoid; -inf maps to 0.
std::vector<double> normalize(std::span<const double> r, std::vector<double> log_values)
{
    const double top = *std::max_element(log_values.begin(), log_values.end());
    std::vector<double> d(log_values.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = std::exp(log_values[i] - top);
    double mass = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i)
        mass += 0.5 * (r[i] - r[i - 1]) * (d[i] + d[i - 1]);
    for (double& v : d)
        v /= mass;
    return d;
}

} // namespace

TEST_CASE("accumulate tallies")
{
    auto p = accumulate(std::vector{birth(1, 1, Type::B)});
    CHECK(p.at({2, 1}) == FpsCounts{0, 1, 0});
    CHECK(p.entries().size() == 1);

    p = accumulate(std::vector{moran_move(1, 2, Move::Up), moran_move(1, 2, Move::Stay), moran_move(1, 2, Move::Down)});
    CHECK(p.at({3, 1}) == FpsCounts{1, 1, 1});
    CHECK(p.entries().size() == 1);

    SelectionEvent death;
    death.kind = EventKind::Death;
    death.pool = {2, 2};
    CHECK(accumulate(std::vector{death, birth(3, 0, Type::A)}).empty());
    CHECK(accumulate(std::span<const SelectionEvent>{}).empty());

    FpsParameterSet bad;
    CHECK_THROWS_AS(bad.add_alpha({4, 0}), DomainError);
    CHECK_THROWS_AS(bad.add_alpha({4, 4}), DomainError);
    CHECK_THROWS_AS(bad.add({4, 1}, {-1, 0, 0}), DomainError);
}

TEST_CASE("FPS log density")
{
    FpsParameterSet empty;
    CHECK(fps_log_density(empty, 0.3) == fps_log_density(empty, 7.0));

    FpsParameterSet one;
    one.add_beta({2, 1});
    for (double r : {0.1, 0.5, 2.0, 9.0})
        CHECK(fps_log_density(one, r) - fps_log_density(one, 1.0) ==
              doctest::Approx(std::log(r) - std::log(1 + r) + std::log(2.0)).epsilon(1e-13));
    CHECK(fps_log_density_at_zero(one) == -std::numeric_limits<double>::infinity());
    FpsParameterSet only_alpha;
    only_alpha.add_alpha({5, 2}, 3.0);
    CHECK(std::isfinite(fps_log_density_at_zero(only_alpha)));
    CHECK_THROWS_AS(fps_log_density(one, 0.0), DomainError);

    SUBCASE("derivative matches finite differences")
    {
        FpsParameterSet p;
        p.add({7, 3}, {2, 3, 4});
        p.add({5, 1}, {1, 0.5, 0});
        for (double r : {0.2, 1.0, 3.5}) {
            const double h = 1e-6;
            const double fd = (fps_log_density(p, r + h) - fps_log_density(p, r - h)) / (2 * h);
            CHECK(fps_log_density_derivative(p, r) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("grid layout")
{
    const auto g = default_grid();
    CHECK(g->size() == 4001);
    CHECK(g->r().front() == 0.0);
    CHECK(g->r().back() == doctest::Approx(20.0).epsilon(1e-15));
    for (std::size_t i = 1; i < g->size(); ++i)
        CHECK(g->r()[i] > g->r()[i - 1]);
    CHECK(std::find(g->r().begin(), g->r().end(), 2.0) != g->r().end());
    CHECK(g->cell_width_at(1.0) < g->cell_width_at(15.0));
}

TEST_CASE("posterior without evidence is the prior")
{
    const auto g = default_grid();
    const auto r = g->r();
    for (auto [k, theta] : {std::pair{2.0, 2.0}, {1.0, 1.0}, {3.0, 0.5}, {1.5, 4.0}}) {
        const auto post = posterior(PriorSpec::gamma(k, theta), {}, g);
        std::vector<double> logp(r.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            logp[i] = r[i] == 0.0 ? (k > 1 ? -INFINITY : 0.0) : (k - 1) * std::log(r[i]) - r[i] / theta;
        const auto expected = normalize(r, logp);
        CHECK(max_abs_diff(post.density(), expected) < 1e-12);
        CHECK(trapezoid(r, post.density()) == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("truncated gamma mean")
    {
        const auto post = posterior(PriorSpec::gamma(2, 2), {}, g);
        const double R = 20.0;
        const double truncated_mean = 4.0 * boost::math::gamma_p(3.0, R / 2) / boost::math::gamma_p(2.0, R / 2);
        CHECK(posterior_mean(post) == doctest::Approx(truncated_mean).epsilon(1e-4));
        CHECK(std::abs(posterior_mean(post) - 4.0) < 0.1);
    }
}

TEST_CASE("summary of a symmetric density")
{
    const auto g = RGrid::make({2001, 10.0, 10.0});
    std::vector<double> logd(g->size());
    for (std::size_t i = 0; i < g->size(); ++i)
        logd[i] = -0.5 * std::pow((g->r()[i] - 5.0) / 0.7, 2);
    const PosteriorGrid post(g, logd);
    const auto s = summarize(post, 0.9);
    CHECK(s.mean == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(s.median == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(s.mode == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(s.variance == doctest::Approx(0.49).epsilon(1e-4));
    CHECK(5.0 - s.ci_lo == doctest::Approx(s.ci_hi - 5.0).epsilon(1e-6));
    CHECK(s.ci_hi - s.ci_lo == doctest::Approx(2 * 1.6448536 * 0.7).epsilon(1e-4));
    CHECK(gaussian_fit_residual(post) < 1e-4);
    CHECK_THROWS_AS(summarize(post, 1.0), DomainError);
}

TEST_CASE("degenerate posteriors raise numerical errors")
{
    const auto g = RGrid::make({101, 5.0, 5.0});
    CHECK_THROWS_AS(PosteriorGrid(g, std::vector<double>(101, -INFINITY)), NumericalError);
    std::vector<double> with_nan(101, 0.0);
    with_nan[7] = NAN;
    CHECK_THROWS_AS(PosteriorGrid(g, with_nan), NumericalError);
    CHECK_THROWS_AS(PriorSpec::gamma(0, 2).validate(), DomainError);
    CHECK_THROWS_AS(PriorSpec::gamma(2, -1).validate(), DomainError);
}

TEST_CASE("FPS prior with all-ones counts at N = 30")
{
    const auto g = default_grid();
    const auto post = posterior(PriorSpec::fps_prior(FpsParameterSet::uniform_counts(30)), {}, g);
    CHECK(std::abs(posterior_mode(post) - 1.0) <= g->cell_width_at(1.0));
    CHECK(std::abs(posterior_mean(post) - 1.16) <= 0.02);
    CHECK_FALSE(post.truncation_only_proper);

    FpsParameterSet thin;
    thin.add({4, 1}, {0.5, 0.5, 0});
    CHECK(posterior(PriorSpec::fps_prior(thin), {}, g).truncation_only_proper);
}

TEST_CASE("conjugate form equals direct multiplication of event probabilities")
{
    const auto g = default_grid();
    const auto r = g->r();
    std::vector<SelectionEvent> atoms;
    for (std::int64_t a : {1, 2})
        for (Move m : {Move::Up, Move::Down, Move::Stay})
            atoms.push_back(moran_move(a, 3 - a, m));
    for (auto [a, b] : {std::pair{1, 2}, {2, 1}, {1, 1}})
        for (Type w : {Type::A, Type::B})
            atoms.push_back(birth(a, b, w));

    // Per-event probability at r, written out from the process definitions.
    auto event_prob = [](const SelectionEvent& e, double x) {
        const double a = static_cast<double>(e.pool.a), b = static_cast<double>(e.pool.b), n = a + b;
        const double pa = a / (a + x * b), pb = x * b / (a + x * b);
        if (e.kind == EventKind::Birth)
            return e.winner == Type::A ? pa : pb;
        const double up = pa * (b / n), down = pb * (a / n);
        return e.stayed ? 1.0 - up - down : e.winner == Type::A ? up : down;
    };

    std::size_t checked = 0;
    double worst = 0.0;
    for (const auto& prior : {PriorSpec::gamma(2, 2), PriorSpec::uniform()}) {
        std::vector<std::size_t> pick;
        // Every sequence of 1..4 atoms of one family (composite or birth).
        for (std::size_t family = 0; family < 2; ++family) {
            const std::size_t base = family == 0 ? 0 : 6;
            for (std::size_t len = 1; len <= 4; ++len) {
                std::size_t total = 1;
                for (std::size_t i = 0; i < len; ++i)
                    total *= 6;
                for (std::size_t code = 0; code < total; ++code) {
                    std::vector<SelectionEvent> events;
                    std::size_t c = code;
                    for (std::size_t i = 0; i < len; ++i, c /= 6)
                        events.push_back(atoms[base + c % 6]);

                    const auto post = posterior(prior, accumulate(events), g);
                    std::vector<double> logp(r.size());
                    for (std::size_t i = 0; i < r.size(); ++i) {
                        double lp = prior.tag == PriorSpec::Tag::Gamma
                                        ? (r[i] == 0.0 ? -INFINITY : std::log(r[i]) - r[i] / 2.0)
                                        : 0.0;
                        for (const auto& e : events)
                            lp += std::log(event_prob(e, r[i]));
                        logp[i] = lp;
                    }
                    worst = std::max(worst, max_abs_diff(post.density(), normalize(r, logp)));
                    ++checked;
                }
            }
        }
    }
    CHECK(checked == 2 * 2 * (6 + 36 + 216 + 1296));
    CHECK(worst < 1e-10);
}

TEST_CASE("conjugacy: FPS prior equals added parameters")
{
    const auto g = default_grid();
    FpsParameterSet p0 = FpsParameterSet::uniform_counts(30);
    p0.add({10, 4}, {2.5, 0.5, 0});
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto log = sample_log(ProcessKind::Tag::SeparatedBirthDeath, {15, 15}, 1.3, seed);
        const auto params = accumulate(log.events);
        const auto lhs = posterior(PriorSpec::fps_prior(p0), params, g);
        const auto rhs = posterior(PriorSpec::uniform(), p0 + params, g);
        CHECK(max_abs_diff(lhs.density(), rhs.density()) < 1e-10);
        CHECK(map_estimate(params, PriorSpec::fps_prior(p0), g) == doctest::Approx(map_estimate(p0 + params, PriorSpec::uniform(), g)).epsilon(1e-9));
    }
}

TEST_CASE("order, batch and death invariance")
{
    const auto g = default_grid();
    std::mt19937_64 shuffle_rng(5);
    for (auto tag : {ProcessKind::Tag::Moran, ProcessKind::Tag::SeparatedBirthDeath, ProcessKind::Tag::SeparatedDeathBirth}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const auto log1 = sample_log(tag, {8, 12}, 1.6, seed);
            const auto log2 = sample_log(tag, {12, 8}, 1.6, seed + 100);
            const auto p1 = accumulate(log1.events);
            const auto base = posterior(PriorSpec::gamma(), p1, g);

            auto shuffled = log1.events;
            std::shuffle(shuffled.begin(), shuffled.end(), shuffle_rng);
            CHECK(accumulate(shuffled) == p1);
            CHECK(max_abs_diff(posterior(PriorSpec::gamma(), accumulate(shuffled), g).density(), base.density()) < 1e-12);

            auto joined = log1.events;
            joined.insert(joined.end(), log2.events.begin(), log2.events.end());
            CHECK(accumulate(joined) == p1 + accumulate(log2.events));
            CHECK(p1 + accumulate(log2.events) == accumulate(log2.events) + p1);

            std::vector<SelectionEvent> no_deaths;
            std::copy_if(log1.events.begin(), log1.events.end(), std::back_inserter(no_deaths),
                         [](const SelectionEvent& e) { return e.kind != EventKind::Death; });
            CHECK(accumulate(no_deaths) == p1);
            CHECK(max_abs_diff(posterior(PriorSpec::gamma(), accumulate(no_deaths), g).density(), base.density()) == 0.0);
        }
    }
}

TEST_CASE("grid refinement stability")
{
    const auto coarse = default_grid();
    const auto fine = RGrid::make({8001, 20.0, 2.0});
    struct Case {
        ProcessKind::Tag tag;
        PopulationState init;
        double r;
    };
    for (const auto& c : {Case{ProcessKind::Tag::Moran, {24, 16}, 1.5}, Case{ProcessKind::Tag::Moran, {10, 10}, 1.0},
                          Case{ProcessKind::Tag::SeparatedBirthDeath, {18, 12}, 1.5}})
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto params = accumulate(sample_log(c.tag, c.init, c.r, seed).events);
            const auto a = posterior(PriorSpec::gamma(), params, coarse);
            const auto b = posterior(PriorSpec::gamma(), params, fine);
            CHECK(std::abs(posterior_mean(a) - posterior_mean(b)) < 1e-4);
            CHECK(std::abs(posterior_mode(a) - posterior_mode(b)) < 1e-4);
        }
}

TEST_CASE("MAP estimates")
{
    const auto g = default_grid();
    SUBCASE("single index closed form")
    {
        FpsParameterSet p;
        p.add({4, 1}, {1, 1, 0});
        CHECK(std::abs(map_estimate(p, PriorSpec::uniform(), g) - 1.0 / 3.0) < 1e-6);
    }
    SUBCASE("symmetric index")
    {
        FpsParameterSet p;
        p.add({6, 3}, {4, 4, 0});
        CHECK(std::abs(map_estimate(p, PriorSpec::uniform(), g) - 1.0) < 1e-6);
    }
    SUBCASE("stationarity identity a beta_a = alpha_a (N - a)")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.2, 5.0);
        for (int trial = 0; trial < 20; ++trial) {
            const std::int64_t N = 3 + trial % 17;
            FpsParameterSet p;
            for (std::int64_t a = 1; a < N; ++a) {
                if (a % 3 == 2 && trial % 2)
                    continue;
                const double alpha = u(rng) * static_cast<double>(a);
                p.add({N, a}, {alpha, alpha * static_cast<double>(N - a) / static_cast<double>(a), 0});
            }
            CHECK(std::abs(map_estimate(p, PriorSpec::uniform(), g) - 1.0) < 1e-6);
        }
    }
    SUBCASE("one-sided evidence is a boundary maximizer")
    {
        FpsParameterSet only_a, only_b;
        only_a.add_alpha({5, 2}, 3);
        only_b.add_beta({5, 2}, 3);
        CHECK_THROWS_AS(map_estimate(only_a, PriorSpec::uniform(), g), NumericalError);
        CHECK_THROWS_AS(map_estimate(only_b, PriorSpec::uniform(), g), NumericalError);
        // An informative prior moves the maximizer inside.
        CHECK(map_estimate(only_a, PriorSpec::gamma(), g) > 0.0);
    }
    SUBCASE("agreement with the grid argmax")
    {
        for (auto tag : {ProcessKind::Tag::Moran, ProcessKind::Tag::SeparatedBirthDeath})
            for (std::uint64_t seed = 0; seed < 15; ++seed) {
                const auto params = accumulate(sample_log(tag, {6, 9}, 0.5 + 0.2 * static_cast<double>(seed), seed).events);
                for (const auto& prior : {PriorSpec::gamma(), PriorSpec::uniform()}) {
                    const auto post = posterior(prior, params, g);
                    const auto ld = post.log_density();
                    const auto i = static_cast<std::size_t>(std::max_element(ld.begin(), ld.end()) - ld.begin());
                    if (i == 0 || i + 1 == g->size())
                        continue;
                    const double m = map_estimate(post, params, prior);
                    CHECK(std::abs(m - g->r()[i]) <= g->cell_width_at(g->r()[i]) * (1 + 1e-9));
                }
            }
    }
}

TEST_CASE("properness at the grid ends")
{
    const auto wide = RGrid::make({4001, 400.0, 2.0});
    FpsParameterSet p;
    p.add({6, 2}, {2, 1, 0});
    const auto post = posterior(PriorSpec::uniform(), p, wide);
    const auto d = post.density();
    const double peak = *std::max_element(d.begin(), d.end());
    CHECK(d.front() == 0.0);
    CHECK(d.back() < 1e-3 * peak);

    FpsParameterSet only_a;
    only_a.add_alpha({6, 2}, 2);
    CHECK(posterior(PriorSpec::uniform(), only_a, wide).density().front() > 0.0);
}

TEST_CASE("counting estimators")
{
    FpsParameterSet p;
    p.add({10, 3}, {6, 2, 0});
    p.add({10, 5}, {4, 3, 0});
    auto c = counting_estimate(p);
    CHECK(c.status == RatioEstimate::Status::Value);
    CHECK(c.value == doctest::Approx(0.5));

    FpsParameterSet only_b;
    only_b.add_beta({4, 1}, 3);
    CHECK(counting_estimate(only_b).status == RatioEstimate::Status::Infinite);
    FpsParameterSet only_a;
    only_a.add_alpha({4, 1}, 3);
    CHECK(counting_estimate(only_a).status == RatioEstimate::Status::Zero);
    CHECK(counting_estimate(FpsParameterSet{}).status == RatioEstimate::Status::Undefined);
    CHECK_FALSE(counting_estimate(FpsParameterSet{}).usable());

    FpsParameterSet even;
    even.add({7, 2}, {3, 3, 0});
    CHECK(counting_estimate(even).value == 1.0);
    CHECK(counting_estimate(only_b, 1.0).value == doctest::Approx(4.0));

    CHECK(inverse_counting_estimate(std::vector{birth(2, 2, Type::A), birth(2, 2, Type::B)}).value == 1.0);
    CHECK(inverse_counting_estimate(std::vector{birth(1, 3, Type::B), birth(3, 1, Type::A)}).value ==
          doctest::Approx(1.0));
    std::vector<SelectionEvent> skewed(9, birth(1, 9, Type::B));
    skewed.push_back(birth(1, 9, Type::A));
    CHECK(inverse_counting_estimate(skewed).value == doctest::Approx(1.0));
    CHECK(counting_estimate(accumulate(skewed)).value == doctest::Approx(9.0));
    CHECK(inverse_counting_estimate(std::vector{birth(2, 2, Type::B)}).status == RatioEstimate::Status::Infinite);
    CHECK(inverse_counting_estimate(std::vector<SelectionEvent>{}).status == RatioEstimate::Status::Undefined);
    CHECK(inverse_counting_estimate(std::vector{moran_move(2, 3, Move::Up), moran_move(2, 3, Move::Down),
                                                moran_move(2, 3, Move::Stay)})
              .value == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("incremental traces")
{
    const auto g = default_grid();
    const auto log = sample_log(ProcessKind::Tag::SeparatedBirthDeath, {6, 6}, 1.5, 21);
    for (Estimator est : {Estimator::Mean, Estimator::Median, Estimator::Mode}) {
        const auto trace = incremental_trace(PriorSpec::gamma(), log.events, est, g);
        REQUIRE(trace.size() == log.events.size());
        CHECK(trace.back() == estimate(posterior(PriorSpec::gamma(), accumulate(log.events), g), est));
        // The death event after the first birth leaves the running value alone.
        CHECK(trace[1] == doctest::Approx(trace[0]).epsilon(1e-12));
        const auto prior_value = estimate(posterior(PriorSpec::gamma(), {}, g), est);
        std::vector<SelectionEvent> uninformative(3);
        uninformative[0].kind = uninformative[1].kind = uninformative[2].kind = EventKind::Death;
        for (double v : incremental_trace(PriorSpec::gamma(), uninformative, est, g))
            CHECK(v == doctest::Approx(prior_value).epsilon(1e-12));

        auto reversed = log.events;
        std::reverse(reversed.begin(), reversed.end());
        CHECK(incremental_trace(PriorSpec::gamma(), reversed, est, g).back() == doctest::Approx(trace.back()).epsilon(1e-12));
    }
}

TEST_CASE("estimates approach the true value with more evidence")
{
    const auto g = default_grid();
    FpsParameterSet prior_counts;
    prior_counts.add({60, 1}, {5, 5, 0});
    const auto prior = PriorSpec::fps_prior(prior_counts);
    double early = 0.0, late = 0.0;
    const int runs = 20;
    for (int seed = 0; seed < runs; ++seed) {
        const auto log = sample_log(ProcessKind::Tag::SeparatedBirthDeath, {48, 12}, 4.0, static_cast<std::uint64_t>(seed));
        const auto n = log.events.size();
        const std::span<const SelectionEvent> head(log.events.data(), n / 20);
        early += std::abs(posterior_mode(posterior(prior, accumulate(head), g)) - 4.0);
        const double final_mode = posterior_mode(posterior(prior, accumulate(log.events), g));
        late += std::abs(final_mode - 4.0);
        CHECK(final_mode > 2.0);
        CHECK(final_mode < 8.0);
    }
    CHECK(late < early);
}
