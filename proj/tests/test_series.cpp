#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "xnf/homological.hpp"

using namespace xnf;
using namespace xnf_test;

namespace {

TruncationOrders wide() { return {16, 24, 48, 24}; }

Series h0_series(const ContextPtr<double>& ctx, const TruncationOrders& trunc) {
    // H0 = omega_r r + omega_I . I + omega_J . pq around the basepoint
    std::vector<std::pair<TermKey, QuasiPoly<double>>> entries;
    const auto& f = ctx->freq;
    TermKey zero = key_of(std::vector<int>(ctx->n, 0), std::vector<int>(ctx->m, 0),
                          std::vector<int>(ctx->m, 0));
    QuasiPoly<double> lin = mono(ctx, f.omega_r, 1);
    for (int i = 0; i < ctx->n; ++i) {
        std::vector<int> b(ctx->n, 0);
        b[i] = 1;
        lin += mono(ctx, f.omega_I[i], 0, b);
    }
    entries.emplace_back(zero, lin);
    for (int i = 0; i < ctx->m; ++i) {
        TermKey kj = zero;
        kj.h[i] = 1;
        kj.j[i] = 1;
        entries.emplace_back(kj, mono(ctx, f.omega_J[i]));
    }
    return build_series(ctx, entries, trunc);
}

}  // namespace

TEST_CASE("build_series basics") {
    auto ctx = simple_context(1, 1);
    SECTION("constant series") {
        Series one = build_series<double>(ctx, {{key_of({0}, {0}, {0}), mono(ctx, 1.0)}}, wide());
        REQUIRE(one.terms().size() == 1);
        std::mt19937_64 rng(7);
        auto pt = random_cpoint(rng, 1, 1);
        REQUIRE(std::abs(evaluate(one, pt) - CD(1.0)) < 1e-15);
    }
    SECTION("duplicate keys merge by addition") {
        Series s = build_series<double>(ctx, {{key_of({1}, {0}, {0}), mono(ctx, 2.0)},
                                              {key_of({1}, {0}, {0}), mono(ctx, 3.0)}},
                                        wide());
        REQUIRE(s.terms().size() == 1);
        REQUIRE(s.coeff(key_of({1}, {0}, {0}))->terms()[0].c == CD(5.0));
    }
    SECTION("key beyond truncation is rejected, naming the key") {
        TruncationOrders t{2, 2, 4, 4};
        REQUIRE_THROWS_MATCHES(
            build_series<double>(ctx, {{key_of({3}, {0}, {0}), mono(ctx, 1.0)}}, t),
            TruncationError, Catch::Matchers::MessageMatches(
                                 Catch::Matchers::ContainsSubstring("k=[3]")));
    }
    SECTION("dimension mismatch rejected") {
        REQUIRE_THROWS_AS(
            build_series<double>(ctx, {{key_of({1, 2}, {0}, {0}), mono(ctx, 1.0)}}, wide()),
            DimensionError);
    }
}

TEST_CASE("linear_combine") {
    auto ctx = simple_context(1, 1);
    Series f = build_series<double>(
        ctx, {{key_of({1}, {1}, {0}), mono(ctx, CD(0.5, -1.0), 1, {1}, 2)}}, wide());
    SECTION("f - f = 0") {
        Series z = linear_combine<double>({1.0, -1.0}, {f, f});
        REQUIRE(z.is_zero());
    }
    SECTION("2 p1q1 + 3 p1q1 = 5 p1q1") {
        Series pq = build_series<double>(ctx, {{key_of({0}, {1}, {1}), mono(ctx, 1.0)}}, wide());
        Series s = linear_combine<double>({2.0, 3.0}, {pq, pq});
        REQUIRE(s.terms().size() == 1);
        REQUIRE(s.coeff(key_of({0}, {1}, {1}))->terms()[0].c == CD(5.0));
    }
    SECTION("i e^{i phi} + x e^{i phi}: one key, coefficient i + x") {
        Series e1 = build_series<double>(ctx, {{key_of({1}, {0}, {0}), mono(ctx, 1.0)}}, wide());
        Series xe1 =
            build_series<double>(ctx, {{key_of({1}, {0}, {0}), mono(ctx, 1.0, 0, {0}, 1)}}, wide());
        Series s = linear_combine<double>({CD(0, 1), CD(1, 0)}, {e1, xe1});
        REQUIRE(s.terms().size() == 1);
        const auto& terms = s.coeff(key_of({1}, {0}, {0}))->terms();
        REQUIRE(terms.size() == 2);
        REQUIRE(terms[0].c == CD(0, 1));  // constant term i
        REQUIRE(terms[1].c == CD(1, 0));  // x term
        REQUIRE(terms[1].e == 1);
    }
    SECTION("basepoint/context mismatch is an error") {
        auto ctx2 = simple_context(1, 1, 2.0);
        Series g = build_series<double>(ctx2, {{key_of({0}, {0}, {0}), mono(ctx2, 1.0)}}, wide());
        REQUIRE_THROWS_AS(add(f, g), DimensionError);
    }
}

TEST_CASE("multiply") {
    auto ctx = simple_context(1, 1);
    SECTION("e^{i phi} * e^{-i phi} = 1") {
        Series a = build_series<double>(ctx, {{key_of({1}, {0}, {0}), mono(ctx, 1.0)}}, wide());
        Series b = build_series<double>(ctx, {{key_of({-1}, {0}, {0}), mono(ctx, 1.0)}}, wide());
        Series p = multiply(a, b, wide());
        REQUIRE(p.terms().size() == 1);
        REQUIRE(p.coeff(key_of({0}, {0}, {0}))->terms()[0].c == CD(1.0));
    }
    SECTION("p1 * q1 -> key h=j=e1") {
        Series a = build_series<double>(ctx, {{key_of({0}, {1}, {0}), mono(ctx, 1.0)}}, wide());
        Series b = build_series<double>(ctx, {{key_of({0}, {0}, {1}), mono(ctx, 1.0)}}, wide());
        Series p = multiply(a, b, wide());
        REQUIRE(p.coeff(key_of({0}, {1}, {1})) != nullptr);
    }
    SECTION("(x e^{alpha x}) (x e^{beta x}) = x^2 e^{(alpha+beta) x}") {
        ExpKey alpha = alpha_key(ctx, {1}, {0});
        ExpKey beta = alpha_key(ctx, {0}, {1});
        Series a =
            build_series<double>(ctx, {{key_of({0}, {0}, {0}), mono(ctx, 1.0, 0, {0}, 1, alpha)}},
                                 wide());
        Series b =
            build_series<double>(ctx, {{key_of({0}, {0}, {0}), mono(ctx, 1.0, 0, {0}, 1, beta)}},
                                 wide());
        Series p = multiply(a, b, wide());
        const auto& t = p.coeff(key_of({0}, {0}, {0}))->terms()[0];
        REQUIRE(t.e == 2);
        REQUIRE(t.alpha == alpha + beta);
    }
    SECTION("evaluate compatibility at random points") {
        InstanceGen<double> gen(11);
        CorpusOptions opt;
        for (int it = 0; it < 20; ++it) {
            Series a = gen.series(opt, ctx, wide());
            Series b = gen.series(opt, ctx, wide());
            Series p = multiply(a, b, wide());
            auto pt = random_cpoint(gen.rng(), 1, 1, 0.4);
            CD lhs = evaluate(p, pt);
            CD rhs = evaluate(a, pt) * evaluate(b, pt);
            REQUIRE(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(rhs)));
        }
    }
}

TEST_CASE("partial derivatives") {
    auto ctx = simple_context(1, 1);
    SECTION("d/dphi e^{i phi} = i e^{i phi}") {
        Series s = build_series<double>(ctx, {{key_of({1}, {0}, {0}), mono(ctx, 1.0)}}, wide());
        Series d = partial_derivative(s, {Coord::phi, 0});
        REQUIRE(d.coeff(key_of({1}, {0}, {0}))->terms()[0].c == CD(0, 1));
    }
    SECTION("d/dp (p^2 q) = 2 p q") {
        Series s = build_series<double>(ctx, {{key_of({0}, {2}, {1}), mono(ctx, 1.0)}}, wide());
        Series d = partial_derivative(s, {Coord::p, 0});
        REQUIRE(d.coeff(key_of({0}, {1}, {1}))->terms()[0].c == CD(2.0));
    }
    SECTION("d/dx (x e^{alpha x}) = (1 + alpha x) e^{alpha x}") {
        ExpKey alpha = alpha_key(ctx, {1}, {0});  // value omega_J/omega_r = 0.2
        Series s = build_series<double>(
            ctx, {{key_of({0}, {0}, {0}), mono(ctx, 1.0, 0, {0}, 1, alpha)}}, wide());
        Series d = partial_derivative(s, {Coord::x, 0});
        const auto& terms = d.coeff(key_of({0}, {0}, {0}))->terms();
        REQUIRE(terms.size() == 2);
        REQUIRE(terms[0].e == 0);
        REQUIRE(terms[0].c == CD(1.0));
        REQUIRE(terms[1].e == 1);
        REQUIRE(std::abs(terms[1].c - CD(0.2)) < 1e-15);
    }
}

TEST_CASE("poisson bracket") {
    auto ctx = simple_context(1, 1, 1.0, {0.3}, {0.2});
    Series H0 = h0_series(ctx, wide());
    InstanceGen<double> gen(23);
    CorpusOptions opt;

    SECTION("{f, f} = 0") {
        for (int it = 0; it < 10; ++it) {
            Series f = gen.series(opt, ctx, wide());
            REQUIRE(coeff_sup(poisson_bracket(f, f, wide())) < 1e-12 * (1 + coeff_sup(f)));
        }
    }
    SECTION("x-free series in N commutes with H0 = omega_r r") {
        auto ctxr = simple_context(1, 1, 1.0, {0.0}, {0.0});
        Series H0r = h0_series(ctxr, wide());
        Series f = build_series<double>(
            ctxr, {{key_of({0}, {1}, {1}), mono(ctxr, 2.5, 1, {1}, 0)}}, wide());
        REQUIRE(poisson_bracket(f, H0r, wide()).is_zero());
    }
    SECTION("{e^{i phi}, H0} = -lambda e^{i phi} per the diagonal action") {
        Series s = build_series<double>(ctx, {{key_of({1}, {0}, {0}), mono(ctx, 1.0)}}, wide());
        Series br = poisson_bracket(s, H0, wide());
        Eigenvalue<double> ev = eigenvalue(key_of({1}, {0}, {0}), *ctx);
        REQUIRE(br.terms().size() == 1);
        CD got = br.coeff(key_of({1}, {0}, {0}))->terms()[0].c;
        REQUIRE(std::abs(got - (-ev.lambda)) < 1e-15);
        REQUIRE(std::abs(ev.lambda - CD(0, 0.3)) < 1e-15);
    }
    SECTION("antisymmetry and Jacobi below the truncation frontier") {
        CorpusOptions small;
        small.max_k = 2;
        small.max_pq = 2;
        small.max_e = 2;
        small.max_ab = 2;
        small.keys = 2;
        for (int it = 0; it < 12; ++it) {
            Series a = gen.series(small, ctx, wide());
            Series b = gen.series(small, ctx, wide());
            Series c = gen.series(small, ctx, wide());
            Series ab = poisson_bracket(a, b, wide());
            Series ba = poisson_bracket(b, a, wide());
            REQUIRE(coeff_sup(add(ab, ba)) < 1e-10 * (1 + coeff_sup(ab)));

            Series jac = add(poisson_bracket(a, poisson_bracket(b, c, wide()), wide()),
                             add(poisson_bracket(b, poisson_bracket(c, a, wide()), wide()),
                                 poisson_bracket(c, poisson_bracket(a, b, wide()), wide())));
            double scale = 1 + coeff_sup(poisson_bracket(a, poisson_bracket(b, c, wide()), wide()));
            REQUIRE(coeff_sup(jac) < 1e-10 * scale);
        }
    }
    SECTION("Leibniz rule below the frontier") {
        CorpusOptions small;
        small.max_k = 2;
        small.max_pq = 2;
        small.max_e = 2;
        small.max_ab = 1;
        small.keys = 2;
        for (int it = 0; it < 12; ++it) {
            Series a = gen.series(small, ctx, wide());
            Series b = gen.series(small, ctx, wide());
            Series c = gen.series(small, ctx, wide());
            Series lhs = poisson_bracket(a, multiply(b, c, wide()), wide());
            Series rhs = add(multiply(poisson_bracket(a, b, wide()), c, wide()),
                             multiply(b, poisson_bracket(a, c, wide()), wide()));
            REQUIRE(coeff_sup(subtract(lhs, rhs)) < 1e-10 * (1 + coeff_sup(lhs)));
        }
    }
    SECTION("bilinearity") {
        Series a = gen.series(opt, ctx, wide());
        Series b = gen.series(opt, ctx, wide());
        Series c = gen.series(opt, ctx, wide());
        Series lhs = poisson_bracket(linear_combine<double>({CD(2, 1), CD(0, -3)}, {a, b}), c,
                                     wide());
        Series rhs = linear_combine<double>(
            {CD(2, 1), CD(0, -3)}, {poisson_bracket(a, c, wide()), poisson_bracket(b, c, wide())});
        REQUIRE(coeff_sup(subtract(lhs, rhs)) < 1e-10 * (1 + coeff_sup(lhs)));
    }
    SECTION("Z and N are invariant under {., H0}") {
        CorpusOptions zopt;
        zopt.zero_average = true;
        for (int it = 0; it < 8; ++it) {
            Series z = gen.series(zopt, ctx, wide());
            Series bz = poisson_bracket(z, H0, wide());
            for (const auto& [key, q] : bz.terms()) REQUIRE(!key.is_average());
            Series navg = project_average(gen.series(opt, ctx, wide())).first;
            Series bn = poisson_bracket(navg, H0, wide());
            for (const auto& [key, q] : bn.terms()) REQUIRE(key.is_average());
        }
    }
}

TEST_CASE("project_average") {
    auto ctx = simple_context(1, 1);
    SECTION("worked example") {
        Series s = build_series<double>(ctx, {{key_of({0}, {0}, {0}), mono(ctx, 5.0)},
                                              {key_of({1}, {0}, {0}), mono(ctx, 1.0)},
                                              {key_of({0}, {1}, {1}), mono(ctx, 1.0)},
                                              {key_of({0}, {1}, {0}), mono(ctx, 1.0)}},
                                        wide());
        auto [avg, osc] = project_average(s);
        REQUIRE(avg.terms().size() == 2);
        REQUIRE(avg.coeff(key_of({0}, {0}, {0})) != nullptr);
        REQUIRE(avg.coeff(key_of({0}, {1}, {1})) != nullptr);
        REQUIRE(osc.terms().size() == 2);
        REQUIRE(osc.coeff(key_of({1}, {0}, {0})) != nullptr);
        REQUIRE(osc.coeff(key_of({0}, {1}, {0})) != nullptr);
        REQUIRE(diff_sup(add(avg, osc), s) == 0.0);
    }
    SECTION("idempotence and exact splitting on random series") {
        InstanceGen<double> gen(5);
        CorpusOptions opt;
        for (int it = 0; it < 20; ++it) {
            Series s = gen.series(opt, ctx, wide());
            auto [avg, osc] = project_average(s);
            auto [avg2, osc2] = project_average(avg);
            REQUIRE(diff_sup(avg2, avg) == 0.0);
            REQUIRE(osc2.is_zero());
            REQUIRE(diff_sup(add(avg, osc), s) == 0.0);
        }
    }
    SECTION("p^2 q (m=1) is pure oscillation") {
        Series s = build_series<double>(ctx, {{key_of({0}, {2}, {1}), mono(ctx, 1.0)}}, wide());
        auto [avg, osc] = project_average(s);
        REQUIRE(avg.is_zero());
        REQUIRE(diff_sup(osc, s) == 0.0);
    }
}

TEST_CASE("evaluate") {
    auto ctx = simple_context(1, 1);
    std::mt19937_64 rng(3);
    SECTION("constant") {
        Series one = build_series<double>(ctx, {{key_of({0}, {0}, {0}), mono(ctx, 1.0)}}, wide());
        REQUIRE(evaluate(one, random_cpoint(rng, 1, 1)) == CD(1.0));
    }
    SECTION("e^{i phi} at phi = 0") {
        Series s = build_series<double>(ctx, {{key_of({1}, {0}, {0}), mono(ctx, 1.0)}}, wide());
        auto pt = random_cpoint(rng, 1, 1);
        pt.phi[0] = 0;
        REQUIRE(std::abs(evaluate(s, pt) - CD(1.0)) < 1e-15);
    }
    SECTION("x e^{alpha x} at x=1, alpha=0") {
        Series s = build_series<double>(
            ctx, {{key_of({0}, {0}, {0}), mono(ctx, 1.0, 0, {0}, 1)}}, wide());
        auto pt = random_cpoint(rng, 1, 1);
        pt.x = 1.0;
        REQUIRE(std::abs(evaluate(s, pt) - CD(1.0)) < 1e-15);
    }
}

TEST_CASE("realness bookkeeping") {
    auto ctx = simple_context(1, 1);
    InstanceGen<double> gen(17);
    CorpusOptions opt;
    opt.realness = true;
    std::mt19937_64 rng(29);
    for (int it = 0; it < 10; ++it) {
        Series s = gen.series(opt, ctx, wide());
        REQUIRE(s.realness());
        auto pt = random_cpoint(rng, 1, 1, 0.5, /*realpt=*/true);
        REQUIRE(std::abs(evaluate(s, pt).imag()) < 1e-12 * (1 + std::abs(evaluate(s, pt))));
        Series p = multiply(s, s, wide());
        REQUIRE(p.realness());
        REQUIRE(std::abs(evaluate(p, pt).imag()) < 1e-10 * (1 + std::abs(evaluate(p, pt))));
    }
}

TEST_CASE("canonical text is stable and sorted") {
    auto ctx = simple_context(1, 1);
    Series s = build_series<double>(ctx, {{key_of({1}, {0}, {0}), mono(ctx, CD(0.5, 1))},
                                          {key_of({-1}, {0}, {0}), mono(ctx, CD(0.5, -1))}},
                                    wide());
    std::string a = canonical_text(s);
    std::string b = canonical_text(s);
    REQUIRE(a == b);
    REQUIRE(a.find("k=[-1]") < a.find("k=[1]"));
}
