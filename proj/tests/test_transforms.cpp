#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "msgl/rng.hpp"
#include "msgl/transforms.hpp"

using msgl::AugmentPolicy;
using msgl::SampleGeometry;
using msgl::Tensor;

TEST_CASE("identity rotation leaves points and images unchanged") {
    CHECK(msgl::rotate_point({1.0, 0.0}, 1) == std::array<double, 2>{1.0, 0.0});
    std::vector<double> img = {1, 2, 3, 4};
    CHECK(msgl::rotate_image(img, 2, 1, 1) == img);
}

TEST_CASE("quarter turn conventions") {
    // (1,0) -> (0,1) counterclockwise.
    auto p = msgl::rotate_point({1.0, 0.0}, 2);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 1.0);

    // [[a,b],[c,d]] -> [[b,d],[a,c]] for one quarter turn.
    std::vector<double> img = {1, 2, 3, 4};  // a b / c d
    std::vector<double> got = msgl::rotate_image(img, 2, 1, 2);
    CHECK(got == std::vector<double>{2, 4, 1, 3});
}

TEST_CASE("four quarter turns are the identity") {
    std::vector<double> img = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<double> cur = img;
    for (int i = 0; i < 4; ++i) cur = msgl::rotate_image(cur, 3, 1, 2);
    CHECK(cur == img);
}

TEST_CASE("two half turns are the identity on points") {
    std::array<double, 2> p = {0.3, -1.7};
    auto q = msgl::rotate_point(msgl::rotate_point(p, 3), 3);
    CHECK(q[0] == Catch::Approx(p[0]).margin(1e-15));
    CHECK(q[1] == Catch::Approx(p[1]).margin(1e-15));
}

TEST_CASE("rotation composition matches the group law") {
    msgl::Rng rng(41);
    for (int j = 1; j <= 4; ++j) {
        for (int k = 1; k <= 4; ++k) {
            const int jk = msgl::compose_rotations(j, k);
            // points
            std::array<double, 2> p = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
            auto two = msgl::rotate_point(msgl::rotate_point(p, j), k);
            auto one = msgl::rotate_point(p, jk);
            CHECK(two[0] == Catch::Approx(one[0]).margin(1e-15));
            CHECK(two[1] == Catch::Approx(one[1]).margin(1e-15));
            // images
            std::vector<double> img(9);
            for (double& v : img) v = rng.uniform(0, 1);
            CHECK(msgl::rotate_image(msgl::rotate_image(img, 3, 1, j), 3, 1, k) ==
                  msgl::rotate_image(img, 3, 1, jk));
        }
    }
}

TEST_CASE("rotation inverse really inverts") {
    for (int k = 1; k <= 4; ++k) {
        CHECK(msgl::compose_rotations(k, msgl::inverse_rotation(k)) == 1);
    }
}

TEST_CASE("rotation preserves the pixel sum") {
    msgl::Rng rng(42);
    std::vector<double> img(16);
    for (double& v : img) v = rng.uniform(0, 1);
    double sum = 0.0;
    for (double v : img) sum += v;
    for (int k = 1; k <= 4; ++k) {
        double rsum = 0.0;
        for (double v : msgl::rotate_image(img, 4, 1, k)) rsum += v;
        CHECK(rsum == Catch::Approx(sum).margin(1e-12));
    }
}

TEST_CASE("non-square images are rejected") {
    std::vector<double> img(6);
    CHECK_THROWS_AS(msgl::rotate_image(img, 2, 1, 2), msgl::ShapeError);
}

TEST_CASE("all_k augmentation replicates each sample once per rotation") {
    Tensor batch({3, 2}, {1, 0, 0, 2, -1, 1});
    auto aug = msgl::augment_batch(batch, SampleGeometry::point2d(), AugmentPolicy::AllK, 1);
    REQUIRE(aug.inputs.rows() == 12);
    REQUIRE(aug.labels.size() == 12);
    std::map<int, int> counts;
    for (int k : aug.labels) counts[k]++;
    for (int k = 1; k <= 4; ++k) CHECK(counts[k] == 3);
}

TEST_CASE("random_one augmentation is deterministic in the seed") {
    Tensor batch({8, 2});
    msgl::Rng rng(5);
    for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = rng.uniform(-1, 1);
    auto a = msgl::augment_batch(batch, SampleGeometry::point2d(), AugmentPolicy::RandomOne, 99);
    auto b = msgl::augment_batch(batch, SampleGeometry::point2d(), AugmentPolicy::RandomOne, 99);
    CHECK(a.labels == b.labels);
    CHECK(a.inputs == b.inputs);
    auto c = msgl::augment_batch(batch, SampleGeometry::point2d(), AugmentPolicy::RandomOne, 100);
    CHECK_FALSE(a.labels == c.labels);
}

TEST_CASE("random_one label frequencies stay within the binomial band") {
    const std::size_t n = 10000;
    Tensor batch({n, 2});
    auto aug = msgl::augment_batch(batch, SampleGeometry::point2d(), AugmentPolicy::RandomOne, 7);
    std::map<int, int> counts;
    for (int k : aug.labels) counts[k]++;
    // 3 sigma of binomial(n, 1/4): sigma = sqrt(n * 1/4 * 3/4) ~= 37.5
    const double expected = n / 4.0;
    const double band = 3.0 * std::sqrt(n * 0.25 * 0.75);
    for (int k = 1; k <= 4; ++k) {
        CHECK(std::fabs(counts[k] - expected) <= band);
    }
}

TEST_CASE("inverse rotations decode an augmented batch exactly") {
    msgl::Rng rng(6);
    Tensor batch({5, 9});
    for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = rng.uniform(0, 1);
    SampleGeometry geom = SampleGeometry::image(3, 1);
    auto aug = msgl::augment_batch(batch, geom, AugmentPolicy::RandomOne, 3);
    std::vector<int> inverse(aug.labels.size());
    for (std::size_t i = 0; i < aug.labels.size(); ++i) {
        inverse[i] = msgl::inverse_rotation(aug.labels[i]);
    }
    Tensor decoded = msgl::apply_rotations(aug.inputs, inverse, geom);
    CHECK(decoded == batch);
}

TEST_CASE("empty batches are rejected") {
    CHECK_THROWS_AS(
        msgl::augment_batch(Tensor(), SampleGeometry::point2d(), AugmentPolicy::RandomOne, 1),
        msgl::ContractError);
}
