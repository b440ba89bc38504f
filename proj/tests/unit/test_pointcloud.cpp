#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "hilbert_ot/error.hpp"
#include "hilbert_ot/pointcloud.hpp"

using namespace hilbert_ot;
namespace fs = std::filesystem;

namespace {

fs::path write_file(const std::string& name, const std::string& body) {
    const fs::path path = fs::temp_directory_path() / ("hilbert_ot_pc_" + name);
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST_CASE("cloud construction and weight validation") {
    PointMatrix pts(3, 2);
    pts << 0, 0, 1, 0, 0, 1;
    const WeightedPointCloud uniform(pts);
    CHECK(uniform.uniform());
    CHECK(uniform.size() == 3);
    CHECK(uniform.dim() == 2);
    CHECK(uniform.weights().sum() == doctest::Approx(1.0));
    CHECK(uniform.point(1)[0] == 1.0);

    Eigen::VectorXd w(3);
    w << 0.5, 0.25, 0.25;
    CHECK_FALSE(WeightedPointCloud(pts, w).uniform());
    w << 0.5, 0.25, 0.3;
    CHECK_THROWS_AS(WeightedPointCloud(pts, w), InvalidInput);
    w << 1.5, -0.25, -0.25;
    CHECK_THROWS_AS(WeightedPointCloud(pts, w), InvalidInput);
    CHECK_THROWS_AS(WeightedPointCloud(pts, Eigen::VectorXd::Constant(2, 0.5)), InvalidInput);
    pts(1, 1) = std::nan("");
    CHECK_THROWS_AS(WeightedPointCloud{pts}, InvalidInput);
    CHECK_THROWS_AS(WeightedPointCloud{PointMatrix(0, 2)}, InvalidInput);
}

TEST_CASE("bounding boxes") {
    PointMatrix two(2, 2);
    two << 0, 0, 1, 2;
    const auto box = bounding_box(two);
    CHECK(box.lower == Eigen::Vector2d(0, 0));
    CHECK(box.upper == Eigen::Vector2d(1, 2));

    PointMatrix one(1, 2);
    one << 3, 3;
    const auto point_box = bounding_box(one);
    CHECK(point_box.lower == point_box.upper);
    CHECK(point_box.lower == Eigen::Vector2d(3, 3));

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointMatrix many(100, 2);
    for (Eigen::Index i = 0; i < many.size(); ++i) many.data()[i] = u(rng);
    const auto sample_box = bounding_box(many);
    CHECK((sample_box.lower.array() >= 0.0).all());
    CHECK((sample_box.upper.array() <= 1.0).all());
    for (Eigen::Index i = 0; i < many.rows(); ++i)
        CHECK(sample_box.contains(std::span<const double>(many.data() + 2 * i, 2)));

    const auto merged = BoundingBox::merge(box, point_box);
    CHECK(merged.upper == Eigen::Vector2d(3, 3));
    const auto grown = box.inflated(0.5);
    CHECK(grown.lower(1) == doctest::Approx(-1.0));
    CHECK(grown.upper(0) == doctest::Approx(1.5));
    CHECK(point_box.inflated(0.5).lower(0) == doctest::Approx(2.5));
}

TEST_CASE("quantization") {
    const auto unit = BoundingBox::unit_cube(2);
    const std::vector<double> lower{0.0, 0.0}, upper{1.0, 1.0}, inner{0.3, 0.7};
    for (unsigned k : {1u, 4u, 20u, 63u}) {
        CHECK(quantize(lower, unit, k).coords == std::vector<std::uint64_t>{0, 0});
        const std::uint64_t top = (std::uint64_t{1} << k) - 1;
        CHECK(quantize(upper, unit, k).coords == std::vector<std::uint64_t>{top, top});
    }
    CHECK(quantize(inner, unit, 2).coords == std::vector<std::uint64_t>{1, 2});

    BoundingBox flat{Eigen::Vector2d(0, 5), Eigen::Vector2d(1, 5)};
    const std::vector<double> on_flat{0.5, 5.0};
    CHECK(quantize(on_flat, flat, 3).coords == std::vector<std::uint64_t>{4, 0});

    const std::vector<double> outside{1.5, 0.5};
    CHECK_THROWS_AS(quantize(outside, unit, 3), InvalidInput);
    std::vector<std::uint64_t> cell(2);
    quantize_into(outside, unit, 3, cell);
    CHECK(cell == std::vector<std::uint64_t>{7, 4});
}

TEST_CASE("default order rule") {
    CHECK(default_order(1, 1, 2) == 2);
    CHECK(default_order(4, 3, 2) == 2);
    CHECK(default_order(1000, 10, 2) == 10);
    CHECK(default_order(1024, 1024, 3) == 10);
    CHECK(default_order(1025, 8, 3) == 11);
    CHECK(default_order(1'000'000, 1'000'000, 1) <= 63);
    CHECK(default_order(1 << 20, 1 << 20, 30) == 4);
    CHECK(default_order(100, 100, 2) * 2 <= 128);
}

TEST_CASE("CSV reading") {
    SUBCASE("plain numeric rows") {
        const auto cloud = read_point_cloud_csv(write_file("plain.csv", "0,1\n2,3\n\n4,5\n"));
        CHECK(cloud.size() == 3);
        CHECK(cloud.points()(2, 1) == 5.0);
        CHECK(cloud.uniform());
    }
    SUBCASE("header with weight column") {
        const auto cloud = read_point_cloud_csv(write_file("weighted.csv", "x,y,weight\n0,0,0.25\n1,1,0.75\n"));
        CHECK(cloud.dim() == 2);
        CHECK(cloud.weights()(1) == doctest::Approx(0.75));
    }
    SUBCASE("weights selected by flag") {
        const auto cloud = read_point_cloud_csv(write_file("flag.csv", "0,0.5\n1,0.5\n"), true);
        CHECK(cloud.dim() == 1);
        CHECK(cloud.weights()(0) == doctest::Approx(0.5));
    }
    SUBCASE("errors carry the location") {
        try {
            (void)read_point_cloud_csv(write_file("ragged.csv", "0,1\n2\n"));
            FAIL("expected InvalidInput");
        } catch (const InvalidInput& e) {
            CHECK(std::string(e.what()).find("ragged.csv:2") != std::string::npos);
        }
        CHECK_THROWS_AS(read_point_cloud_csv(write_file("text.csv", "0,1\n2,abc\n")), InvalidInput);
        CHECK_THROWS_AS(read_point_cloud_csv(write_file("empty.csv", "x,y\n")), InvalidInput);
        CHECK_THROWS_AS(read_point_cloud_csv(write_file("badw.csv", "x,weight\n0,0.2\n1,0.2\n")), InvalidInput);
        CHECK_THROWS_AS(read_point_cloud_csv("/nonexistent/dir/cloud.csv"), IoError);
    }
    SUBCASE("write then read round trip") {
        PointMatrix pts(2, 3);
        pts << 0.1, 0.2, 0.3, -1e-300, 1e300, 3.0 / 7.0;
        Eigen::VectorXd w(2);
        w << 0.4, 0.6;
        const fs::path path = fs::temp_directory_path() / "hilbert_ot_pc_roundtrip.csv";
        write_point_cloud_csv(path, pts, &w);
        const auto back = read_point_cloud_csv(path, true);
        CHECK(back.points() == pts);
        CHECK(back.weights()(1) == doctest::Approx(0.6));
        CHECK_THROWS_AS(write_point_cloud_csv("/nonexistent/dir/out.csv", pts), IoError);
    }
}
