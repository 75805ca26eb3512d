#include <gtest/gtest.h>

#include <cmath>

#include "netmoment/error.hpp"
#include "netmoment/graphon.hpp"
#include "netmoment/motif.hpp"

using namespace netmoment;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorKind::Io;
}

// Midpoint rule on an m x m grid; the oscillation of the smooth graphon is
// damped by its prefactor, so a fine grid is accurate to ~1e-6.
double quadrature(const Graphon& g, int m) {
    double s = 0.0;
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) s += g((a + 0.5) / m, (b + 0.5) / m);
    }
    return s / (static_cast<double>(m) * m);
}

}  // namespace

TEST(Graphon, LatentSampleDeterministicAndUniform) {
    EXPECT_EQ(sample_latent(3, 11).positions, sample_latent(3, 11).positions);
    const auto x = sample_latent(10000, 5);
    double mean = 0.0;
    for (double v : x.positions) mean += v;
    mean /= 10000.0;
    EXPECT_NEAR(mean, 0.5, 0.02);
    EXPECT_EQ(kind_of([] { sample_latent(1, 0); }), ErrorKind::InvalidSize);
}

TEST(Graphon, ProbabilityMatrixConstantAndRho) {
    const auto x = sample_latent(6, 1);
    const auto one = Graphon::constant(1.0);
    auto w = probability_matrix(one, x, 1.0);
    auto w3 = probability_matrix(one, x, 0.3);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            EXPECT_EQ(w(i, j), i == j ? 0.0 : 1.0);
            EXPECT_EQ(w3(i, j), i == j ? 0.0 : 0.3);
        }
    }
    EXPECT_EQ(kind_of([&] { probability_matrix(one, x, 0.0); }), ErrorKind::Parameter);
    EXPECT_EQ(kind_of([&] { probability_matrix(one, x, 1.5); }), ErrorKind::Parameter);
}

TEST(Graphon, BlockModelCrossBlockProbability) {
    const auto g = default_block_model();
    LatentSample x{{0.25, 0.75}, 0};
    const auto w = probability_matrix(g, x, 1.0);
    EXPECT_DOUBLE_EQ(w(0, 1), 0.2);
    EXPECT_DOUBLE_EQ(g(0.1, 0.2), 0.6);
    EXPECT_DOUBLE_EQ(g(0.9, 0.6), 0.2);
}

TEST(Graphon, BlockModelValidation) {
    EXPECT_EQ(kind_of([] { Graphon::block_model({0.5, 0.6}, {{0.1, 0.1}, {0.1, 0.1}}); }), ErrorKind::Parameter);
    EXPECT_EQ(kind_of([] { Graphon::block_model({0.5, 0.5}, {{0.1, 0.2}, {0.3, 0.1}}); }), ErrorKind::Parameter);
    EXPECT_EQ(kind_of([] { Graphon::block_model({0.5, 0.5}, {{0.1, 1.2}, {1.2, 0.1}}); }), ErrorKind::Parameter);
    EXPECT_EQ(kind_of([] { Graphon::block_model({1.0}, {{0.1, 0.2}}); }), ErrorKind::DimensionMismatch);
}

TEST(Graphon, CustomValidation) {
    EXPECT_EQ(kind_of([] { Graphon::custom([](double u, double) { return u; }); }), ErrorKind::Parameter);
    EXPECT_EQ(kind_of([] { Graphon::custom([](double, double) { return 1.5; }); }), ErrorKind::Parameter);
    EXPECT_NO_THROW(Graphon::custom([](double u, double v) { return u * v; }));
}

TEST(Graphon, SmoothAndNonSmoothValues) {
    const auto s = Graphon::smooth();
    EXPECT_DOUBLE_EQ(s(0.0, 0.0), 0.15);
    EXPECT_NEAR(s(1.0, 1.0), 2.0 / 3.0 * std::cos(0.5) + 0.15, 1e-15);
    const auto ns = Graphon::nonsmooth();
    // literal reading: 0.1 / (d^2)^{-1} = 0.1 d^2
    const double d2 = 0.25 * 0.25 + 0.1 * 0.1;
    EXPECT_NEAR(ns(0.75, 0.6), 0.5 * std::cos(0.1 * d2 + 0.01) * std::pow(0.75, 2.0 / 3.0) + 0.4, 1e-14);
    const auto rec = Graphon::nonsmooth_reciprocal();
    EXPECT_NEAR(rec(0.75, 0.6), 0.5 * std::cos(0.1 / d2 + 0.01) * std::pow(0.75, 2.0 / 3.0) + 0.4, 1e-14);
    for (double u = 0.0; u <= 1.0; u += 0.05) {
        for (double v = 0.0; v <= 1.0; v += 0.05) {
            for (const auto* g : {&s, &ns, &rec}) {
                const double f = (*g)(u, v);
                EXPECT_GE(f, 0.0);
                EXPECT_LE(f, 1.0);
                EXPECT_DOUBLE_EQ(f, (*g)(v, u));
            }
        }
    }
}

TEST(Graphon, SampledAdjacencyIsSymmetricHollowBinary) {
    for (const auto& g : {default_block_model(), Graphon::smooth(), Graphon::nonsmooth()}) {
        for (double rho : {1.0, 0.3}) {
            const auto x = sample_latent(40, 3);
            const auto a = sample_adjacency(probability_matrix(g, x, rho), 4);
            for (std::size_t i = 0; i < 40; ++i) {
                EXPECT_FALSE(a.has_edge(i, i));
                for (std::size_t j = 0; j < 40; ++j) EXPECT_EQ(a.has_edge(i, j), a.has_edge(j, i));
            }
        }
    }
}

TEST(Graphon, SampleAdjacencyExtremes) {
    const auto x = sample_latent(30, 2);
    const auto full = sample_adjacency(probability_matrix(Graphon::constant(1.0), x, 1.0), 1);
    EXPECT_EQ(full.edge_count(), 30u * 29u / 2u);
    const auto empty = sample_adjacency(probability_matrix(Graphon::constant(0.0), x, 1.0), 1);
    EXPECT_EQ(empty.edge_count(), 0u);
    const auto half = sample_adjacency(probability_matrix(Graphon::constant(0.5), sample_latent(200, 3), 1.0), 9);
    const double pairs = 200.0 * 199.0 / 2.0;
    EXPECT_NEAR(static_cast<double>(half.edge_count()), 0.5 * pairs, 4.0 * std::sqrt(pairs * 0.25));
}

TEST(Graphon, SampleNetworkDeterministic) {
    const auto g = default_block_model();
    EXPECT_EQ(sample_network(g, 1.0, 30, 17), sample_network(g, 1.0, 30, 17));
    EXPECT_FALSE(sample_network(g, 1.0, 30, 17) == sample_network(g, 1.0, 30, 18));
}

TEST(Population, BlockModelEdgeExact) {
    const auto e = population_moment(default_block_model(), 1.0, motifs::edge(), ExactBlockModel{});
    EXPECT_NEAR(e.value, 0.3, 1e-15);
    EXPECT_EQ(e.standard_error, 0.0);
    const auto sparse = population_moment(default_block_model(), 0.5, motifs::edge(), ExactBlockModel{});
    EXPECT_NEAR(sparse.value, 0.15, 1e-15);
}

TEST(Population, BlockModelTriangleExact) {
    // 1/8 * (0.6^3 + 3 * 0.6*0.2*0.2 + 3 * 0.2^3 + 0.2^3)
    const double expected = (0.216 + 3 * 0.024 + 4 * 0.008) / 8.0;
    const auto e = population_moment(default_block_model(), 1.0, motifs::triangle(), ExactBlockModel{});
    EXPECT_NEAR(e.value, expected, 1e-15);
}

TEST(Population, ConstantGraphonTriangle) {
    const auto e = population_moment(Graphon::constant(0.4), 1.0, motifs::triangle(), MonteCarlo{10000, 1});
    EXPECT_NEAR(e.value, 0.064, 1e-15);
}

TEST(Population, MethodKindMismatch) {
    EXPECT_EQ(kind_of([] { population_moment(Graphon::smooth(), 1.0, motifs::edge(), ExactBlockModel{}); }),
              ErrorKind::Parameter);
    EXPECT_EQ(kind_of([] { population_moment(Graphon::smooth(), 1.0, motifs::edge(), MonteCarlo{100, 1}); }),
              ErrorKind::Parameter);
}

TEST(Population, SmoothEdgeMatchesQuadrature) {
    const auto g = Graphon::smooth();
    const auto e = population_moment(g, 1.0, motifs::edge(), MonteCarlo{1000000, 3});
    EXPECT_NEAR(e.value, quadrature(g, 2000), 3.0 * e.standard_error);
}

TEST(Population, MonteCarloAgreesWithExactForBlockModel) {
    const auto g = default_block_model();
    for (const auto& m : {motifs::edge(), motifs::triangle(), motifs::vshape(), motifs::threestar()}) {
        const auto exact = population_moment(g, 0.8, m, ExactBlockModel{});
        const auto mc = population_moment(g, 0.8, m, MonteCarlo{200000, 5});
        EXPECT_NEAR(mc.value, exact.value, 4.0 * mc.standard_error) << m.name();
    }
}

TEST(Population, StandardErrorScalesAsInverseRootDraws) {
    const auto g = Graphon::smooth();
    const auto a = population_moment(g, 1.0, motifs::triangle(), MonteCarlo{50000, 7});
    const auto b = population_moment(g, 1.0, motifs::triangle(), MonteCarlo{200000, 7});
    EXPECT_NEAR(a.standard_error / b.standard_error, 2.0, 0.1);
}

TEST(PopulationCoefficients, BlockModelEdgeClosedForm) {
    // g1 = +-0.1 by block, g2 = +-0.1 -> xi1 = 0.1, E[g1^3] = 0, E[g1 g1 g2] = 0.001
    const auto c = population_edgeworth_coefficients(default_block_model(), 1.0, motifs::edge(), ExactBlockModel{});
    EXPECT_NEAR(c.xi1, 0.1, 1e-15);
    EXPECT_NEAR(c.e_g1_cubed, 0.0, 1e-17);
    EXPECT_NEAR(c.e_g1g1g2, 0.001, 1e-15);
    EXPECT_NEAR(c.mu, 0.3, 1e-15);
}

TEST(PopulationCoefficients, ConstantGraphonIsDegenerate) {
    EXPECT_EQ(kind_of([] {
                  population_edgeworth_coefficients(Graphon::constant(0.3), 1.0, motifs::edge(),
                                                    MonteCarlo{10000, 1, 50});
              }),
              ErrorKind::Degeneracy);
}

TEST(PopulationCoefficients, MonteCarloMeanOfG1IsZero) {
    for (const auto& g : {Graphon::smooth(), default_block_model()}) {
        const auto c = population_edgeworth_coefficients(g, 1.0, motifs::triangle(), MonteCarlo{10000, 2, 200});
        EXPECT_NEAR(c.mean_g1, 0.0, 3.0 * c.mean_g1_se) << g.name();
    }
}

TEST(PopulationCoefficients, MonteCarloCloseToExact) {
    const auto g = default_block_model();
    const auto exact = population_edgeworth_coefficients(g, 1.0, motifs::triangle(), ExactBlockModel{});
    const auto mc = population_edgeworth_coefficients(g, 1.0, motifs::triangle(), MonteCarlo{10000, 4, 2000});
    EXPECT_NEAR(mc.xi1, exact.xi1, 0.1 * exact.xi1);
    EXPECT_NEAR(mc.mu, exact.mu, 0.002);
}

TEST(RhoSpec, ParsesSymbolicRates) {
    EXPECT_DOUBLE_EQ(RhoSpec::parse("n^-1").resolve(80), 0.0125);
    EXPECT_DOUBLE_EQ(RhoSpec::parse("n^-1/2").resolve(100), 0.1);
    EXPECT_NEAR(RhoSpec::parse("n^-1/4").resolve(16), 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(RhoSpec::parse("1").resolve(80), 1.0);
    EXPECT_DOUBLE_EQ(RhoSpec::parse("0.25").resolve(80), 0.25);
    EXPECT_EQ(RhoSpec::parse("0.25").text(), "0.25");
    EXPECT_THROW(RhoSpec::parse("n^2"), Error);
    EXPECT_THROW(RhoSpec::parse("1.5"), Error);
    EXPECT_THROW(RhoSpec::parse("0"), Error);
}
