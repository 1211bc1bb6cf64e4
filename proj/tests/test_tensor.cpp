#include <catch2/catch_amalgamated.hpp>

#include "msgl/tensor.hpp"

using msgl::Tensor;

TEST_CASE("tensor shape bookkeeping") {
    Tensor t({2, 3});
    CHECK(t.size() == 6);
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 3);
    t.at(1, 2) = 5.0;
    CHECK(t[5] == 5.0);
}

TEST_CASE("value count must match shape") {
    CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), msgl::ShapeError);
    CHECK_THROWS_AS(Tensor({0, 2}), msgl::ShapeError);
}

TEST_CASE("grad buffer lifecycle") {
    Tensor t({2, 2});
    CHECK_FALSE(t.has_grad());
    CHECK_THROWS_AS(t.grad(), msgl::ContractError);
    t.ensure_grad();
    REQUIRE(t.has_grad());
    CHECK(t.grad().size() == t.size());
    t.grad()[0] = 1.0;
    t.zero_grad();
    CHECK(t.grad()[0] == 0.0);
}

TEST_CASE("finiteness probe") {
    Tensor t({1, 2}, {1.0, 2.0});
    CHECK(t.all_finite());
    t[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(t.all_finite());
}
