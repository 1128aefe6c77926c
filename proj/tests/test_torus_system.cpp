#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "toruslab/catalog.hpp"
#include "toruslab/errors.hpp"
#include "toruslab/random.hpp"
#include "toruslab/torus_system.hpp"

#include <cmath>
#include <numbers>

using namespace toruslab;

namespace {

IntMatrix mat2(int a, int b, int c, int d) {
    IntMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

std::vector<TorusSystem> test_systems() {
    auto systems = catalog_systems();
    for (std::uint64_t s = 0; s < 10; ++s) systems.push_back(random_conservative_system(s));
    return systems;
}

}  // namespace

TEST_CASE("eval_map examples") {
    const TorusSystem id(mat2(1, 0, 0, 1), {});
    const auto y = id.eval_map(TorusPoint({0.3, 0.7}));
    CHECK(y[0] == doctest::Approx(0.3));
    CHECK(y[1] == doctest::Approx(0.7));

    const TorusSystem cat(mat2(2, 1, 1, 1), {});
    const auto z = cat.eval_map(TorusPoint({0.5, 0.5}));
    CHECK(z[0] == doctest::Approx(0.5));
    CHECK(torus_max_coordinate_distance(z, TorusPoint({0.5, 0.0})) < 1e-15);

    const TorusSystem pert(mat2(2, 1, 1, 1), {ShearFactor{1, {1, 0}, 0.1, 0.0}});
    const auto w = pert.eval_map(TorusPoint({0.25, 0.0}));
    CHECK(torus_max_coordinate_distance(w, TorusPoint({0.5, 0.25})) < 1e-15);

    CHECK_THROWS_AS(cat.eval_map(TorusPoint({0.1, 0.2, 0.3})), InputError);
}

TEST_CASE("eval_inverse examples") {
    const TorusSystem cat(mat2(2, 1, 1, 1), {});
    const auto x = cat.eval_inverse(TorusPoint({0.5, 0.0}));
    CHECK(torus_max_coordinate_distance(x, TorusPoint({0.5, 0.5})) < 1e-15);

    const TorusSystem shear_only(mat2(1, 0, 0, 1), {ShearFactor{1, {1, 0}, 0.1, 0.0}});
    const auto y = shear_only.eval_inverse(TorusPoint({0.25, 0.1}));
    CHECK(torus_max_coordinate_distance(y, TorusPoint({0.25, 0.0})) < 1e-15);
}

TEST_CASE("construction-time validation") {
    CHECK_THROWS_AS(TorusSystem(mat2(2, 0, 0, 1), {}), ValidationError);
    CHECK_THROWS_AS(TorusSystem(mat2(1, 0, 0, 1), {ShearFactor{0, {1, 0}, 0.1, 0.0}}), ValidationError);
    CHECK_THROWS_AS(TorusSystem(mat2(1, 0, 0, 1), {ShearFactor{2, {1, 0}, 0.1, 0.0}}), ValidationError);
    CHECK_THROWS_AS(TorusSystem(mat2(1, 0, 0, 1), {ShearFactor{1, {1, 0, 0}, 0.1, 0.0}}), ValidationError);
    CHECK_NOTHROW(TorusSystem(mat2(0, 1, 1, 0), {}));
}

TEST_CASE("Jacobian of linear systems is the matrix") {
    const TorusSystem cat(mat2(2, 1, 1, 1), {});
    SplitRng rng(1, 1);
    for (int i = 0; i < 10; ++i) {
        const auto x = rng.point(2);
        CHECK((cat.jacobian(x) - cat.matrix().cast<double>()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((cat.jacobian(x, Direction::backward) - cat.inverse_matrix().cast<double>()).cwiseAbs().maxCoeff() ==
              0.0);
    }
}

TEST_CASE("volume preservation: det Jacobian = det A on 1000 random points") {
    for (const auto& sys : test_systems()) {
        SplitRng rng(99, 7);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const auto x = rng.point(sys.dim());
            worst = std::max(worst, std::abs(sys.jacobian(x).determinant() - static_cast<double>(sys.determinant())));
            worst = std::max(worst, std::abs(sys.jacobian(x, Direction::backward).determinant() -
                                             static_cast<double>(sys.determinant())));
        }
        INFO(sys.name());
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("bijectivity: eval_inverse(eval_map(x)) = x on 1000 random points") {
    for (const auto& sys : test_systems()) {
        SplitRng rng(5, 3);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const auto x = rng.point(sys.dim());
            worst = std::max(worst, torus_max_coordinate_distance(sys.eval_inverse(sys.eval_map(x)), x));
            worst = std::max(worst, torus_max_coordinate_distance(sys.eval_map(sys.eval_inverse(x)), x));
        }
        INFO(sys.name());
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("advance agrees with eval_map / eval_inverse") {
    for (const auto& sys : test_systems()) {
        SplitRng rng(8, 8);
        for (int i = 0; i < 50; ++i) {
            const auto x = rng.point(sys.dim());
            CHECK(torus_max_coordinate_distance(sys.advance(x).next, sys.eval_map(x)) == 0.0);
            CHECK(torus_max_coordinate_distance(sys.advance(x, Direction::backward).next, sys.eval_inverse(x)) == 0.0);
        }
    }
}

TEST_CASE("inverse function theorem: D_{f^-1 x} f ^-1 = D_x f^-1") {
    for (const auto& sys : test_systems()) {
        SplitRng rng(12, 4);
        for (int i = 0; i < 100; ++i) {
            const auto x = rng.point(sys.dim());
            const Matrix fwd = sys.jacobian(sys.eval_inverse(x), Direction::forward);
            const Matrix bwd = sys.jacobian(x, Direction::backward);
            CHECK((fwd.inverse() - bwd).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("Jacobian matches central finite differences of the lift") {
    for (const auto& sys : test_systems()) {
        SplitRng rng(3, 3);
        for (int i = 0; i < 20; ++i) {
            const auto x = rng.point(sys.dim());
            const Vector xv = x.as_vector();
            const double h = 1e-6;
            Matrix fd(sys.dim(), sys.dim());
            for (int j = 0; j < sys.dim(); ++j) {
                Vector e = Vector::Zero(sys.dim());
                e(j) = h;
                fd.col(j) = (sys.eval_lift(xv + e) - sys.eval_lift(xv - e)) / (2 * h);
            }
            CHECK((fd - sys.jacobian(x)).cwiseAbs().maxCoeff() < 1e-7);
        }
    }
}

TEST_CASE("homotopy class: F(x + e_i) - F(x) = A e_i and F agrees with f mod 1") {
    for (const auto& sys : test_systems()) {
        SplitRng rng(21, 2);
        for (int t = 0; t < 50; ++t) {
            const auto x = rng.point(sys.dim());
            const Vector xv = x.as_vector();
            const Vector fx = sys.eval_lift(xv);
            for (int i = 0; i < sys.dim(); ++i) {
                Vector shifted = xv;
                shifted(i) += 1.0;
                const Vector diff = sys.eval_lift(shifted) - fx;
                const Vector expected = sys.matrix().col(i).cast<double>();
                CHECK((diff - expected).cwiseAbs().maxCoeff() < 1e-12);
            }
            std::vector<double> reduced(fx.data(), fx.data() + fx.size());
            CHECK(torus_max_coordinate_distance(TorusPoint(reduced), sys.eval_map(x)) < 1e-12);
        }
    }
}

TEST_CASE("torus distance wraps around") {
    CHECK(torus_distance(TorusPoint({0.01, 0.5}), TorusPoint({0.99, 0.5})) == doctest::Approx(0.02));
    CHECK(TorusPoint({-0.25, 1.5})[0] == doctest::Approx(0.75));
    CHECK(TorusPoint({-0.25, 1.5})[1] == doctest::Approx(0.5));
    CHECK(wrap_unit(-1e-18) < 1.0);
}

TEST_CASE("system-spec JSON") {
    const auto sys = system_from_json_text(
        R"({"dim": 2, "matrix": [[2,1],[1,1]], "shears": [{"axis": 1, "frequency": [1,0], "amplitude": 0.05, "phase": 0.0}]})");
    CHECK(sys.dim() == 2);
    REQUIRE(sys.shears().size() == 1);
    CHECK(sys.shears()[0].amplitude == 0.05);

    const auto again = system_from_json(nlohmann::json::parse(sys.to_json().dump()));
    CHECK((again.matrix() - sys.matrix()).cwiseAbs().maxCoeff() == 0);

    CHECK_THROWS_WITH_AS(system_from_json_text(R"({"dim": 2, "matrix": [[2,0],[0,1]]})"),
                         doctest::Contains("matrix not in GL(n,Z)"), ValidationError);
    CHECK_THROWS_WITH_AS(
        system_from_json_text(R"({"dim": 2, "matrix": [[1,0],[0,1]], "shears": [{"axis": 0, "frequency": [1,0], "amplitude": 0.1}]})"),
        doctest::Contains("frequency[axis]"), ValidationError);
    CHECK_THROWS_WITH_AS(system_from_json_text(R"({"dim": 2, "matrix": [[1,0],[0,1.5]]})"),
                         doctest::Contains("matrix[1][1]"), ValidationError);
    CHECK_THROWS_WITH_AS(system_from_json_text("{\"dim\": 2,\n \"matrix\": [[1,0],[0,1]\n"),
                         doctest::Contains("line 3"), InputError);
    CHECK_THROWS_WITH_AS(system_from_json_text(R"({"matrix": [[1]]})"), doctest::Contains("'dim'"), ValidationError);
}
