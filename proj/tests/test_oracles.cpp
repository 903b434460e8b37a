#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "resetopt/analytics.hpp"
#include "resetopt/ladder.hpp"
#include "resetopt/lattice.hpp"
#include "resetopt/monte_carlo.hpp"
#include "resetopt/parity.hpp"

using namespace resetopt;

namespace {
const ModelParams figure_params{0.03, 0.04, 0.4, 1.0, 1.0};
}

TEST_CASE("lattice reproduces the closed-form European put") {
    const ModelParams& p = figure_params;
    const double lat = lattice_multi_reset(0, p, LatticeSpec{});
    CHECK(std::abs(lat - european_put(0.0, p.strike, p.strike, p)) < 1e-4 * p.strike);
}

TEST_CASE("lattice levels are nondecreasing in the number of rights") {
    const std::vector<double> lat = lattice_multi_reset_levels(3, figure_params, LatticeSpec{});
    for (std::size_t j = 1; j < lat.size(); ++j) CHECK(lat[j] >= lat[j - 1] - 1e-12);
}

TEST_CASE("lattice degenerate volatility: values collapse with the put") {
    // the reset right keeps O(1) value *relative* to the put at any vol;
    // only the absolute values vanish as vol -> 0
    ModelParams p{0.03, 0.03, 1e-8, 1.0, 1.0};
    const std::vector<double> lat = lattice_multi_reset_levels(1, p, LatticeSpec{});
    CHECK(lat[0] < 1e-7 * p.strike);
    CHECK(lat[1] >= lat[0] - 1e-12);
    CHECK(std::abs(lat[1] - lat[0]) < 1e-7 * p.strike);
}

TEST_CASE("lattice spec validation and truncation guard") {
    CHECK_THROWS_AS(lattice_multi_reset(1, figure_params, LatticeSpec{1, 1000, 6.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(lattice_multi_reset(1, figure_params, LatticeSpec{500, 1000, 4.0}),
                    std::invalid_argument);
    // huge drift escapes a minimal halfwidth
    ModelParams fast{0.5, 0.0, 0.1, 1.0, 1.0};
    CHECK_THROWS_AS(lattice_multi_reset(1, fast, LatticeSpec{500, 1000, 5.0}),
                    std::runtime_error);
}

TEST_CASE("mc_european degenerate and closed-form checks") {
    ModelParams p = figure_params;
    McSpec spec{200000, 365, 42};

    ModelParams still = p;
    still.vol = 1e-8;
    const McEstimate det = mc_european(still, 0.0, 1.0, 1.0, spec);
    const double expect =
        std::exp(-still.rate) *
        std::max(1.0 - 1.0 * std::exp(still.rate - still.dividend), 0.0);
    CHECK(std::abs(det.mean - expect) < 1e-6);

    const McEstimate est = mc_european(p, 0.0, 1.0, 1.0, spec);
    CHECK(std::abs(est.mean - european_put(0.0, 1.0, 1.0, p)) < 3.0 * est.std_error);
    CHECK(est.std_error > 0.0);
    CHECK(est.paths == spec.paths);

    CHECK(mc_european(p, 0.0, 1.0, 0.0, spec).mean == 0.0);
}

TEST_CASE("mc reproducibility: identical specs give bit-identical estimates") {
    const ModelParams& p = figure_params;
    TimeGrid grid(100, 1.0);
    LadderSolution sol = solve_ladder(1, p, grid);
    McSpec spec{20000, 365, 7};
    const McStrategyResult a = mc_strategy_run(1, sol, 0.0, 1.0, spec);
    const McStrategyResult b = mc_strategy_run(1, sol, 0.0, 1.0, spec);
    CHECK(a.reset_put.mean == b.reset_put.mean);
    CHECK(a.reset_put.std_error == b.reset_put.std_error);
    CHECK(a.shout_call.mean == b.shout_call.mean);
    McSpec other = spec;
    other.rng_seed = 8;
    CHECK(mc_strategy_run(1, sol, 0.0, 1.0, other).reset_put.mean != a.reset_put.mean);
}

TEST_CASE("mc strategy with no rights or infinite boundaries is European") {
    const ModelParams& p = figure_params;
    TimeGrid grid(100, 1.0);
    LadderSolution sol = solve_ladder(1, p, grid);
    McSpec spec{100000, 365, 11};

    const McEstimate none = mc_strategy_price(0, sol, 0.0, 1.0, spec);
    const double closed = european_put(0.0, 1.0, 1.0, p);
    CHECK(std::abs(none.mean - closed) < 3.0 * none.std_error);

    LadderSolution inf_sol = sol;
    std::fill(inf_sol.levels[0].b.values.begin(), inf_sol.levels[0].b.values.end() - 1,
              kInfiniteBoundary);
    const McEstimate blocked = mc_strategy_run(1, inf_sol, 0.0, 1.0, spec).reset_put;
    CHECK(std::abs(blocked.mean - closed) < 3.0 * blocked.std_error);
}

TEST_CASE("mc strategy estimate never beats the value function") {
    const ModelParams& p = figure_params;
    TimeGrid grid(200, 1.0);
    LadderSolution sol = solve_ladder(2, p, grid);
    McSpec spec{100000, 365, 3};
    for (std::size_t j : {1u, 2u}) {
        const McEstimate est = mc_strategy_price(j, sol, 0.0, 1.0, spec);
        CHECK(est.mean <= price(j, 0.0, 1.0, sol) + 3.0 * est.std_error);
    }
}

TEST_CASE("pathwise shout-call parity on simulated reset times") {
    const ModelParams& p = figure_params;
    TimeGrid grid(200, 1.0);
    LadderSolution sol = solve_ladder(2, p, grid);
    McSpec spec{100000, 365, 17};
    const McStrategyResult res = mc_strategy_run(2, sol, 0.0, 1.0, spec);
    const double c = parity_constant(1.0, p);
    CHECK(std::abs(res.parity_diff.mean - c) < 3.0 * res.parity_diff.std_error);
}
