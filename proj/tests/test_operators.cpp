#include <doctest.h>

#include "splitkit/operators.hpp"
#include "test_support.hpp"

using namespace splitkit;
using namespace testsupport;

TEST_CASE("prox_norm_distance closed-form cases") {
    Vec xi{0.5, -1.0};
    CHECK(prox_norm_distance(xi, 0.7, xi) == xi);

    Vec p = prox_norm_distance({0.0, 0.0}, 1.0, {2.0, 0.0});
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(0.0));

    CHECK_THROWS_AS(prox_norm_distance(xi, 0.0, xi), std::domain_error);
}

TEST_CASE("prox_norm_distance satisfies the subgradient characterization") {
    // (v - p)/tau must lie in the subdifferential of ||. - xi|| at p.
    auto rng = make_rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 1 + trial % 5;
        Vec xi = random_vec(rng, dim, -2.0, 2.0);
        Vec v = random_vec(rng, dim, -3.0, 3.0);
        std::uniform_real_distribution<double> taud(0.05, 2.0);
        const double tau = taud(rng);
        Vec p = prox_norm_distance(xi, tau, v);
        Vec sub = v;
        axpy(-1.0, p, sub);
        for (auto& s : sub) s /= tau;
        Vec rel = p;
        axpy(-1.0, xi, rel);
        const double r = norm(rel);
        if (r > 1e-12) {
            for (int k = 0; k < dim; ++k) CHECK(sub[k] == doctest::Approx(rel[k] / r).epsilon(1e-8));
        } else {
            CHECK(norm(sub) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("prox_norm_distance is firmly nonexpansive on samples") {
    auto rng = make_rng(12);
    Vec xi = random_vec(rng, 3);
    for (int trial = 0; trial < 100; ++trial) {
        Vec u = random_vec(rng, 3, -4.0, 4.0);
        Vec v = random_vec(rng, 3, -4.0, 4.0);
        Vec ju = prox_norm_distance(xi, 0.8, u);
        Vec jv = prox_norm_distance(xi, 0.8, v);
        Vec dj = ju;
        axpy(-1.0, jv, dj);
        Vec duv = u;
        axpy(-1.0, v, duv);
        CHECK(dot(dj, dj) <= dot(dj, duv) + 1e-9);
    }
}

TEST_CASE("simplex_project basics") {
    Vec inside{0.25, 0.5, 0.25};
    Vec pi = simplex_project(inside);
    for (int k = 0; k < 3; ++k) CHECK(pi[k] == doctest::Approx(inside[k]).epsilon(1e-14));

    Vec dominant = simplex_project({10.0, 0.0});
    CHECK(dominant[0] == doctest::Approx(1.0));
    CHECK(dominant[1] == doctest::Approx(0.0));
}

TEST_CASE("simplex_project matches the KKT enumeration oracle") {
    auto rng = make_rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        Vec v = random_vec(rng, 4, -2.0, 2.0);
        Vec got = simplex_project(v);
        Vec want = simplex_kkt_oracle(v);
        for (int k = 0; k < 4; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-10));
        double s = 0.0;
        for (double x : got) {
            CHECK(x >= 0.0);
            s += x;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("simplex_project is idempotent and 1-Lipschitz on samples") {
    auto rng = make_rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        Vec a = random_vec(rng, 5, -2.0, 2.0);
        Vec b = random_vec(rng, 5, -2.0, 2.0);
        Vec pa = simplex_project(a);
        Vec ppa = simplex_project(pa);
        Vec d = pa;
        axpy(-1.0, ppa, d);
        CHECK(norm(d) < 1e-12);
        Vec pb = simplex_project(b);
        Vec dp = pa;
        axpy(-1.0, pb, dp);
        Vec dab = a;
        axpy(-1.0, b, dab);
        CHECK(norm(dp) <= norm(dab) + 1e-12);
    }
}

TEST_CASE("huber gradient component") {
    SUBCASE("flat region gives zero") {
        Vec g = huber_grad_component({1.0, 0.0}, 0.0, 1.0, 2.0, {0.5, 7.0});
        CHECK(norm(g) == 0.0);
    }
    SUBCASE("quadratic region") {
        Vec g = huber_grad_component({1.0, 0.0}, 0.0, 1.0, 2.0, {1.5, 0.0});
        CHECK(g[0] == doctest::Approx(0.5));
        CHECK(g[1] == doctest::Approx(0.0));
    }
    SUBCASE("d1 > d2 is a domain error") {
        CHECK_THROWS_AS(huber_grad_component({1.0}, 0.0, 2.0, 1.0, {0.0}), std::domain_error);
    }
}

TEST_CASE("huber derivative matches finite differences away from kinks") {
    auto rng = make_rng(15);
    const double d1 = 0.8, d2 = 1.7;
    std::uniform_real_distribution<double> zd(-3.0, 3.0);
    int tested = 0;
    while (tested < 200) {
        const double z = zd(rng);
        if (std::abs(std::abs(z) - d1) < 1e-3 || std::abs(std::abs(z) - d2) < 1e-3) continue;
        const double fd = central_diff([&](double t) { return huber_value(t, d1, d2); }, z, 1e-5);
        CHECK(huber_deriv(z, d1, d2) == doctest::Approx(fd).epsilon(1e-5));
        ++tested;
    }
}

TEST_CASE("huber component gradient matches finite differences of the composite") {
    auto rng = make_rng(16);
    const double d1 = 1.0, d2 = 2.0;
    int tested = 0;
    while (tested < 100) {
        Vec psi = random_vec(rng, 3, -2.0, 2.0);
        const double y = random_vec(rng, 1, 0.0, 1.0)[0];
        Vec x = random_vec(rng, 3, -2.0, 2.0);
        const double z = dot(psi, x) - y;
        if (std::abs(std::abs(z) - d1) < 1e-3 || std::abs(std::abs(z) - d2) < 1e-3) continue;
        Vec g = huber_grad_component(psi, y, d1, d2, x);
        for (int k = 0; k < 3; ++k) {
            const double fd = central_diff(
                [&](double t) {
                    Vec xt = x;
                    xt[k] = t;
                    return huber_value(dot(psi, xt) - y, d1, d2);
                },
                x[k], 1e-5);
            CHECK(g[k] == doctest::Approx(fd).epsilon(1e-4));
        }
        ++tested;
    }
}

TEST_CASE("huber component sigma is 1 over the squared row norm") {
    HuberComponent comp({3.0, 4.0}, 0.2, 1.0, 2.0);
    CHECK(comp.sigma() == doctest::Approx(1.0 / 25.0));
}

TEST_CASE("linear_monotone") {
    SUBCASE("zero map") {
        auto op = linear_monotone(Matrix(2, 2));
        CHECK(op.lip == 0.0);
        CHECK(norm(op.apply({1.0, 2.0})) == 0.0);
    }
    SUBCASE("skew matrix is monotone with zero inner products") {
        Matrix skew = Matrix::from_rows({{0.0, 1.0}, {-1.0, 0.0}});
        auto op = linear_monotone(skew);
        Vec out = op.apply({1.0, 0.0});
        CHECK(out[0] == doctest::Approx(0.0));
        CHECK(out[1] == doctest::Approx(-1.0));
        auto rng = make_rng(17);
        for (int t = 0; t < 50; ++t) {
            Vec x = random_vec(rng, 2), y = random_vec(rng, 2);
            Vec cd = op.apply(x);
            axpy(-1.0, op.apply(y), cd);
            Vec xy = x;
            axpy(-1.0, y, xy);
            CHECK(std::abs(dot(cd, xy)) < 1e-12);
        }
    }
    SUBCASE("indefinite symmetric part is rejected") {
        Matrix bad = Matrix::from_rows({{-1.0, 0.0}, {0.0, 1.0}});
        CHECK_THROWS_AS(linear_monotone(bad), std::domain_error);
    }
    SUBCASE("sampled Lipschitz constant stays below the reported bound") {
        auto rng = make_rng(18);
        Matrix B = random_matrix(rng, 3, 3);
        Matrix psd = B.transposed() * B;
        auto op = linear_monotone(psd);
        for (int t = 0; t < 100; ++t) {
            Vec x = random_vec(rng, 3), y = random_vec(rng, 3);
            Vec cd = op.apply(x);
            axpy(-1.0, op.apply(y), cd);
            Vec xy = x;
            axpy(-1.0, y, xy);
            CHECK(norm(cd) <= op.lip * norm(xy) + 1e-9);
        }
    }
}

TEST_CASE("oracle validation catches misdeclared constants") {
    OperatorTriple ops;
    ops.dim = 2;
    ResolventOracle a;
    a.name = "prox";
    a.resolve = [](double tau, const Vec& v) { return prox_norm_distance({0.0, 0.0}, tau, v); };
    ops.A.push_back(a);

    SUBCASE("well-declared oracles pass") {
        CocoerciveOracle b;
        b.name = "lin";
        Matrix S = Matrix::from_rows({{2.0, 0.0}, {0.0, 1.0}});
        b.sigma = 0.5;  // 1/lambda_max
        b.apply = [S](const Vec& x) { return S.apply(x); };
        ops.B.push_back(b);
        ops.C.push_back(linear_monotone(Matrix::from_rows({{0.0, 2.0}, {-2.0, 0.0}})));
        CHECK_NOTHROW(validate_oracles(ops, 1));
    }
    SUBCASE("overstated cocoercivity constant is rejected") {
        CocoerciveOracle b;
        b.name = "liar";
        Matrix S = Matrix::from_rows({{2.0, 0.0}, {0.0, 1.0}});
        b.sigma = 5.0;  // true constant is 0.5
        b.apply = [S](const Vec& x) { return S.apply(x); };
        ops.B.push_back(b);
        CHECK_THROWS_AS(validate_oracles(ops, 1), std::domain_error);
    }
    SUBCASE("non-monotone forward oracle is rejected") {
        LipschitzMonotoneOracle c;
        c.name = "antitone";
        c.lip = 1.0;
        c.apply = [](const Vec& x) { return scaled(x, -1.0); };
        ops.C.push_back(c);
        CHECK_THROWS_AS(validate_oracles(ops, 1), std::domain_error);
    }
    SUBCASE("an expansive fake resolvent is rejected") {
        ResolventOracle bad;
        bad.name = "expansive";
        bad.resolve = [](double, const Vec& v) { return scaled(v, 2.0); };
        ops.A.push_back(bad);
        CHECK_THROWS_AS(validate_oracles(ops, 1), std::domain_error);
    }
}

TEST_CASE("stacked oracles satisfy the block cocoercivity and Lipschitz bounds") {
    auto rng = make_rng(19);
    const int dim = 3;

    std::vector<CocoerciveOracle> B;
    for (int j = 0; j < 4; ++j) {
        Vec psi = random_vec(rng, dim, -2.0, 2.0);
        HuberComponent comp(psi, 0.3, 0.5, 1.5);
        CocoerciveOracle b;
        b.sigma = comp.sigma();
        b.apply = [comp](const Vec& x) { return comp(x); };
        B.push_back(b);
    }
    std::vector<LipschitzMonotoneOracle> C;
    for (int j = 0; j < 3; ++j) {
        Matrix F = random_matrix(rng, dim, dim);
        C.push_back(linear_monotone(F.transposed() * F));
    }

    Vec sigma;
    for (const auto& b : B) sigma.push_back(b.sigma);
    Vec lip2;
    for (const auto& c : C) lip2.push_back(c.lip * c.lip);

    for (int trial = 0; trial < 1000; ++trial) {
        BlockVector x = random_blocks(rng, 4, dim, -3.0, 3.0);
        BlockVector y = random_blocks(rng, 4, dim, -3.0, 3.0);
        BlockVector bx = apply_stacked(B, x);
        BlockVector by = apply_stacked(B, y);
        BlockVector bd = bx;
        bd -= by;
        BlockVector xy = x;
        xy -= y;
        double inner = 0.0;
        for (std::size_t i = 0; i < bd.data().size(); ++i) inner += bd.data()[i] * xy.data()[i];
        CHECK(inner >= weighted_norm_sq(bd, sigma) - 1e-9);

        BlockVector cx = random_blocks(rng, 3, dim, -3.0, 3.0);
        BlockVector cy = random_blocks(rng, 3, dim, -3.0, 3.0);
        BlockVector cd = apply_stacked(C, cx);
        cd -= apply_stacked(C, cy);
        BlockVector cxy = cx;
        cxy -= cy;
        CHECK(cd.norm() <= std::sqrt(weighted_norm_sq(cxy, lip2)) + 1e-9);
    }
}
