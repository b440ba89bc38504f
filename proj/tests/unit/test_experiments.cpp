#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hilbert_ot/baselines.hpp"
#include "hilbert_ot/error.hpp"
#include "hilbert_ot/experiments.hpp"
#include "hilbert_ot/synthetic.hpp"

using namespace hilbert_ot;

TEST_CASE("generators") {
    SUBCASE("gaussian mean") {
        const auto cloud = generate({Gaussian{Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()}, 10000, 1});
        const Eigen::RowVectorXd mean = cloud.points().colwise().mean();
        CHECK(mean.cwiseAbs().maxCoeff() <= 3.0 / std::sqrt(10000.0));
    }
    SUBCASE("fragmented hypercube leaves the axes") {
        const auto cloud = generate({FragmentedHypercube{2, 2}, 2000, 2});
        CHECK(cloud.points().cwiseAbs().minCoeff() > 1.0);
        CHECK(cloud.points().cwiseAbs().maxCoeff() < 3.0);
        const auto partial = generate({FragmentedHypercube{5, 2}, 500, 2});
        CHECK(partial.points().rightCols(3).cwiseAbs().maxCoeff() <= 1.0);
    }
    SUBCASE("offset mixture noise floor") {
        const auto x = generate({GmmOffset{0.0}, 500, 3});
        const auto y = generate({GmmOffset{0.0}, 500, 4});
        CHECK(exact_wasserstein(x, y).value < 0.5);
    }
    SUBCASE("determinism and shapes") {
        const SyntheticTarget target{UniformCube{3, -2.0, 2.0}, 50, 9};
        CHECK(generate(target).points() == generate(target).points());
        CHECK(generate(target).points().cwiseAbs().maxCoeff() <= 2.0);
        CHECK(generate({Gauss25{}, 10, 1}).dim() == 2);
        CHECK(family_name(SwissRoll{}) == "swissroll");
        CHECK_THROWS_AS(generate({FragmentedHypercube{2, 3}, 10, 1}), InvalidInput);
        CHECK_THROWS_AS(generate({Gaussian{Eigen::Vector2d::Zero(), -Eigen::Matrix2d::Identity()}, 10, 1}),
                        InvalidInput);
    }
}

TEST_CASE("rank correlation and slope") {
    const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 100}, c{5, 4, 3, 2, 1}, ties{1, 1, 2, 2, 3};
    CHECK(spearman(a, b) == doctest::Approx(1.0));
    CHECK(spearman(a, c) == doctest::Approx(-1.0));
    CHECK(spearman(a, ties) == doctest::Approx(0.9486832980505138));
    const std::vector<double> x{1, 2, 4, 8}, y{1, 0.5, 0.25, 0.125};
    CHECK(loglog_slope(x, y) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(spearman(a, x), InvalidInput);
}

TEST_CASE("aggregates are recomputable from raw rows") {
    std::vector<ExperimentRow> rows{{"raw", "n", 1, 0, "m", 1.0}, {"raw", "n", 1, 1, "m", 3.0},
                                    {"raw", "n", 2, 0, "m", 5.0}, {"raw", "n", 1, 0, "z", 7.0}};
    append_aggregates(rows);
    const ExperimentResult view{"t", rows, {}};
    CHECK(view.find("mean", "m", 1) == 2.0);
    CHECK(view.find("std", "m", 1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(view.find("mean", "m", 2) == 5.0);
    CHECK(view.find("std", "m", 2) == 0.0);
    CHECK(view.find("mean", "z") == 7.0);
}

TEST_CASE("fig1_offset row contract and CSV output") {
    const auto dir = std::filesystem::temp_directory_path() / "hilbert_ot_exp";
    std::filesystem::remove_all(dir);
    ExperimentSpec spec;
    spec.name = "fig1_offset";
    spec.replications = 1;
    spec.seed = 5;
    spec.overrides = {{"alphas", "0,0.5,1.0"}, {"n", "60"}};
    spec.out_dir = dir;
    spec.gnuplot_script = true;
    const auto result = run_experiment(spec);
    for (const char* metric : {"exact_w2", "hcp", "sw"}) {
        std::size_t raw = 0, mean = 0, sd = 0;
        for (const auto& r : result.rows) {
            if (r.metric != metric) continue;
            raw += r.row_type == "raw";
            mean += r.row_type == "mean";
            sd += r.row_type == "std";
        }
        CHECK(raw == 3);
        CHECK(mean == 3);
        CHECK(sd == 3);
    }
    REQUIRE(std::filesystem::exists(dir / "fig1_offset.csv"));
    CHECK(std::filesystem::exists(dir / "fig1_offset.gp"));
    std::ifstream in(dir / "fig1_offset.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == kExperimentCsvHeader);

    spec.threads = 1;
    spec.out_dir.clear();
    spec.gnuplot_script = false;
    const auto serial = run_experiment(spec);
    spec.threads = 8;
    const auto parallel = run_experiment(spec);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) CHECK(serial.rows[i].value == parallel.rows[i].value);
}

TEST_CASE("experiment spec validation") {
    CHECK(experiment_names().size() == 7);
    ExperimentSpec spec;
    spec.name = "nope";
    CHECK_THROWS_AS(run_experiment(spec), ParameterError);
    spec.name = "rate_curve";
    spec.overrides = {{"bogus", "1"}};
    CHECK_THROWS_AS(run_experiment(spec), ParameterError);
    spec.overrides = {{"sizes", "16,x"}};
    CHECK_THROWS_AS(run_experiment(spec), ParameterError);
    spec.overrides = {{"sizes", "16,32"}, {"reference", "64"}};
    spec.replications = 2;
    spec.out_dir = "/proc/forbidden_dir";
    CHECK_THROWS_AS(run_experiment(spec), IoError);
}
