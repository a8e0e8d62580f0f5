#include <doctest.h>

#include "segp/evaluation.hpp"
#include "segp/interpreter.hpp"
#include "support.hpp"

using namespace segp;

namespace {

LinearScaling fit(std::vector<double> const& y, std::vector<double> const& o) { return linear_scaling_coeffs(y, o); }

double mse(std::vector<double> const& y, std::vector<double> const& o, double a, double b)
{
    long double acc = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        long double const r = y[i] - (a + b * o[i]);
        acc += r * r;
    }
    return static_cast<double>(acc / y.size());
}

} // namespace

TEST_SUITE("evaluation")
{
    TEST_CASE("linear scaling coefficients")
    {
        auto s = fit({ 3, 1, 4 }, { 3, 1, 4 });
        CHECK(s.b == doctest::Approx(1.0));
        CHECK(s.a == doctest::Approx(0.0));

        s = fit({ 1, 2, 3 }, { 5, 5, 5 });
        CHECK(s.b == 0.0);
        CHECK(s.a == 2.0);

        std::vector<double> y { 0, 1, 2, 3 };
        std::vector<double> o { 1, 3, 5, 7 };
        s = fit(y, o);
        CHECK(s.b == doctest::Approx(0.5));
        CHECK(s.a == doctest::Approx(-0.5));
        for (std::size_t i = 0; i < y.size(); ++i) { CHECK(s.apply(o[i]) == doctest::Approx(y[i])); }

        // Constant up to rounding of the mean is still constant.
        s = fit({ 1, 2, 3 }, { 0.1, 0.1, 0.1 });
        CHECK(s.b == 0.0);
        CHECK(s.a == 2.0);
    }

    TEST_CASE("scaling is the least-squares optimum and never hurts")
    {
        Random rng(12);
        for (int rep = 0; rep < 50; ++rep) {
            auto const n = 2 + uniform_index(rng, 60);
            std::vector<double> y(n);
            std::vector<double> o(n);
            for (std::size_t i = 0; i < n; ++i) {
                y[i] = uniform_real(rng, -10, 10);
                o[i] = uniform_real(rng, -3, 3) + 0.5 * y[i];
            }
            auto const s = fit(y, o);
            double const best = mse(y, o, s.a, s.b);
            CHECK(best <= mse(y, o, 0.0, 1.0) * (1 + 1e-12));
            for (int k = 0; k < 1000 / 50; ++k) {
                double const da = uniform_real(rng, -1, 1);
                double const db = uniform_real(rng, -1, 1);
                CHECK(best <= mse(y, o, s.a + da, s.b + db) * (1 + 1e-12));
            }
        }
    }

    TEST_CASE("round and clamp")
    {
        CHECK(round_and_clamp(0.49) == 0);
        CHECK(round_and_clamp(0.5) == 1);
        CHECK(round_and_clamp(-3.2) == 0);
        CHECK(round_and_clamp(7.0) == 1);
    }

    TEST_CASE("hand-traced sample loss")
    {
        Eigen::MatrixXd x(3, 1);
        x << 1, 1, 1;
        Dataset train("t", x, Eigen::Vector3d(1, 2, 3), Task::Regression);
        BootstrapPlan plan(1, 3, { 0, 0, 2 });
        auto r = evaluate_individual(parse_tree("(x0)"), train, plan, false);
        CHECK(r.individual.fitness[0] == doctest::Approx(4.0 / 3.0));
        CHECK(r.individual.scaling[0].a == 0.0);
        CHECK(r.individual.scaling[0].b == 1.0);
        CHECK(r.node_evals == 3);
    }

    TEST_CASE("identity sample equals the full-set fitness")
    {
        Random rng(2);
        auto ds = test::random_dataset(40, 3, Task::Regression, rng);
        auto plan = BootstrapPlan::identity(40);
        for (int i = 0; i < 20; ++i) {
            auto r = evaluate_individual(test::random_tree(3, 50, rng), ds, plan, true);
            CHECK(r.individual.fitness[0] == r.individual.full_train_fitness);
        }
    }

    TEST_CASE("classification loss is the misclassified fraction")
    {
        Random rng(5);
        auto ds = test::random_dataset(60, 2, Task::Classification, rng);
        auto plan = sample_bootstrap(60, 3, rng);
        auto tree = parse_tree("(- (x0) (* (c:0.5) (x1)))");
        for (bool scaling : { false, true }) {
            auto r = evaluate_individual(tree, ds, plan, scaling).individual;
            auto out = test::reference_outputs(tree, ds.features());
            for (std::size_t j = 0; j < 3; ++j) {
                int wrong = 0;
                for (auto k : plan.row(j)) {
                    wrong += round_and_clamp(r.scaling[j].apply(out[k])) != static_cast<int>(ds.labels()[k]);
                }
                CHECK(r.fitness[j] == doctest::Approx(wrong / 60.0));
                CHECK(r.fitness[j] >= 0.0);
                CHECK(r.fitness[j] <= 1.0);
            }
        }
    }

    TEST_CASE("fast evaluation matches an independent oracle")
    {
        // Oracle: recursive per-row evaluation, gathering per sample, and
        // coefficients in extended precision.
        Random rng(21);
        for (int rep = 0; rep < 100; ++rep) {
            auto const d = 1 + uniform_index(rng, 4);
            auto const n = 2 + uniform_index(rng, 120);
            auto const beta = 1 + uniform_index(rng, 8);
            auto ds = test::random_dataset(n, d, Task::Regression, rng);
            auto plan = sample_bootstrap(n, beta, rng);
            auto tree = test::random_tree(d, 40, rng);
            auto fast = evaluate_individual(tree, ds, plan, true).individual;
            auto out = test::reference_outputs(tree, ds.features());
            for (std::size_t j = 0; j < beta; ++j) {
                std::vector<double> y;
                std::vector<double> o;
                for (auto k : plan.row(j)) {
                    y.push_back(ds.labels()[k]);
                    o.push_back(out[k]);
                }
                long double ym = 0;
                long double om = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    ym += y[k];
                    om += o[k];
                }
                ym /= n;
                om /= n;
                long double cov = 0;
                long double var = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    cov += (y[k] - ym) * (o[k] - om);
                    var += (o[k] - om) * (o[k] - om);
                }
                // Skip near-degenerate outputs where the slope is ill-conditioned.
                if (var <= 1e-12L * n * (1 + om * om)) { continue; }
                double const b = static_cast<double>(cov / var);
                double const a = static_cast<double>(ym - b * om);
                CHECK(test::rel_close(fast.scaling[j].b, b, 1e-6));
                // Near-exact fits leave only rounding residue, so the loss is
                // compared against the target scale as well.
                double const want = mse(y, o, a, b);
                double const floor = 1e-12 * static_cast<double>(1 + ym * ym);
                CHECK((test::rel_close(fast.fitness[j], want, 1e-6) || std::fabs(fast.fitness[j] - want) <= floor));
            }
        }
    }

    TEST_CASE("fast and naive paths agree and count nodes as claimed")
    {
        Random rng(31);
        for (int rep = 0; rep < 100; ++rep) {
            auto const d = 1 + uniform_index(rng, 5);
            auto const n = 1 + uniform_index(rng, 200);
            auto const beta = 1 + uniform_index(rng, 16);
            auto const task = rep % 3 == 0 ? Task::Classification : Task::Regression;
            auto ds = test::random_dataset(n, d, task, rng);
            auto plan = sample_bootstrap(n, beta, rng);
            auto tree = test::random_tree(d, 120, rng);
            bool const scaling = rep % 4 != 0;
            auto fast = evaluate_individual(tree, ds, plan, scaling);
            auto naive = evaluate_naive(tree, ds, plan, scaling);
            CHECK(fast.node_evals == tree.size() * n);
            CHECK(naive.node_evals == beta * tree.size() * n);
            for (std::size_t j = 0; j < beta; ++j) {
                CHECK(test::rel_close(fast.individual.fitness[j], naive.individual.fitness[j], 1e-9));
                CHECK(test::rel_close(fast.individual.scaling[j].a, naive.individual.scaling[j].a, 1e-9));
                CHECK(test::rel_close(fast.individual.scaling[j].b, naive.individual.scaling[j].b, 1e-9));
            }
            CHECK(test::rel_close(fast.individual.full_train_fitness, naive.individual.full_train_fitness, 1e-9));
        }
    }

    TEST_CASE("identical plan rows give identical losses")
    {
        Random rng(3);
        auto ds = test::random_dataset(30, 2, Task::Regression, rng);
        auto one = sample_bootstrap(30, 1, rng);
        std::vector<std::uint32_t> twice(one.row(0).begin(), one.row(0).end());
        twice.insert(twice.end(), one.row(0).begin(), one.row(0).end());
        BootstrapPlan plan(2, 30, twice);
        auto r = evaluate_naive(parse_tree("(* (x0) (x1))"), ds, plan, true);
        CHECK(r.individual.fitness[0] == r.individual.fitness[1]);
    }

    TEST_CASE("population evaluation preserves order")
    {
        Random rng(4);
        auto ds = test::random_dataset(25, 2, Task::Regression, rng);
        auto plan = sample_bootstrap(25, 3, rng);
        CHECK(evaluate_population({}, ds, plan, true).empty());
        auto t1 = parse_tree("(x0)");
        auto t2 = parse_tree("(plog (x1))");
        auto same = evaluate_population({ t1, t1 }, ds, plan, true);
        CHECK(same[0].fitness == same[1].fitness);
        auto fwd = evaluate_population({ t1, t2 }, ds, plan, true);
        auto rev = evaluate_population({ t2, t1 }, ds, plan, true);
        CHECK(fwd[0].fitness == rev[1].fitness);
        CHECK(fwd[1].fitness == rev[0].fitness);
        CHECK(fwd[0].tree == t1);
    }

    TEST_CASE("losses stay finite under saturation")
    {
        Random rng(6);
        auto ds = test::random_dataset(20, 1, Task::Regression, rng);
        auto plan = sample_bootstrap(20, 2, rng);
        auto r = evaluate_individual(parse_tree("(* (c:1e300) (* (c:1e300) (x0)))"), ds, plan, false).individual;
        for (auto f : r.fitness) {
            CHECK(std::isfinite(f));
            CHECK(f >= 0.0);
        }
    }
}
