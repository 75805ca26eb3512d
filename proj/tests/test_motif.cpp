#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "netmoment/error.hpp"
#include "netmoment/motif.hpp"
#include "netmoment/rng.hpp"

using namespace netmoment;

namespace {

SmallMatrix from_edges(std::size_t r, std::initializer_list<std::pair<int, int>> edges) {
    SmallMatrix m(r, std::vector<int>(r, 0));
    for (auto [a, b] : edges) m[a][b] = m[b][a] = 1;
    return m;
}

SmallMatrix random_pattern(std::size_t r, RandomStream& rs, double p = 0.5) {
    SmallMatrix m(r, std::vector<int>(r, 0));
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = a + 1; b < r; ++b) m[a][b] = m[b][a] = rs.bernoulli(p) ? 1 : 0;
    }
    return m;
}

// sub >= R_pi entrywise for some permutation, by plain enumeration.
int contains_oracle(const SmallMatrix& sub, const Motif& motif) {
    const std::size_t r = motif.nodes();
    std::vector<std::size_t> pi(r);
    std::iota(pi.begin(), pi.end(), std::size_t{0});
    const auto m = motif.adjacency();
    do {
        bool ok = true;
        for (std::size_t a = 0; a < r && ok; ++a) {
            for (std::size_t b = 0; b < r; ++b) {
                if (m[a][b] && !sub[pi[a]][pi[b]]) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) return 1;
    } while (std::next_permutation(pi.begin(), pi.end()));
    return 0;
}

std::vector<Motif> test_motifs() {
    return {motifs::edge(),
            motifs::triangle(),
            motifs::vshape(),
            motifs::threestar(),
            motif_from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, "square"),
            motif_from_edges(4, {{0, 1}, {1, 2}, {2, 3}}, "path4"),
            motif_from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}, "pentagon"),
            motif_from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}}, "kite")};
}

}  // namespace

TEST(Motif, BuiltinShapes) {
    EXPECT_EQ(motifs::edge().nodes(), 2u);
    EXPECT_EQ(motifs::edge().edges(), 1u);
    EXPECT_EQ(motifs::triangle().edges(), 3u);
    EXPECT_EQ(motifs::vshape().edges(), 2u);
    EXPECT_EQ(motifs::threestar().nodes(), 4u);
    EXPECT_EQ(motifs::threestar().edges(), 3u);
    EXPECT_EQ(motifs::triangle().shape_class(), ShapeClass::Cyclic);
    EXPECT_EQ(motifs::threestar().shape_class(), ShapeClass::Acyclic);
    EXPECT_EQ(motifs::vshape().shape_class(), ShapeClass::Acyclic);
    EXPECT_EQ(motifs::edge().shape_class(), ShapeClass::Acyclic);
    for (const char* name : {"edge", "triangle", "vshape", "threestar"}) EXPECT_EQ(builtin_motif(name).name(), name);
    EXPECT_THROW(builtin_motif("square"), Error);
}

TEST(Motif, MakeMotifErrors) {
    try {
        make_motif(from_edges(4, {{0, 1}, {2, 3}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotConnected);
    }
    try {
        make_motif({{0, 1}, {0, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidMatrix);
    }
    try {
        make_motif({{1, 1}, {1, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidMatrix);
    }
    try {
        make_motif(SmallMatrix(6, std::vector<int>(6, 1)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SizeCap);
    }
}

TEST(Motif, ContainsExamples) {
    const auto tri = from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
    const auto path = from_edges(3, {{0, 1}, {1, 2}});
    EXPECT_EQ(contains(tri, motifs::vshape()), 1);
    EXPECT_EQ(contains(path, motifs::triangle()), 0);
    EXPECT_EQ(contains(path, motifs::vshape()), 1);
    try {
        contains(tri, motifs::threestar());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(Motif, ContainsMatchesPermutationOracleOnAllPatterns) {
    for (const auto& m : test_motifs()) {
        const std::size_t r = m.nodes();
        const std::size_t k = pair_count(r);
        for (std::uint32_t pattern = 0; pattern < (1u << k); ++pattern) {
            SmallMatrix sub(r, std::vector<int>(r, 0));
            for (std::size_t a = 0; a < r; ++a) {
                for (std::size_t b = a + 1; b < r; ++b) {
                    if ((pattern >> pair_bit(a, b, r)) & 1u) sub[a][b] = sub[b][a] = 1;
                }
            }
            ASSERT_EQ(contains(sub, m), contains_oracle(sub, m)) << m.name() << " pattern " << pattern;
        }
    }
}

TEST(Motif, ContainsPermutationInvariantAndMonotone) {
    RandomStream rs(3, "motif-props");
    for (int t = 0; t < 2000; ++t) {
        const auto motifs = test_motifs();
        const auto& m = motifs[rs.below(motifs.size())];
        const std::size_t r = m.nodes();
        const auto sub = random_pattern(r, rs);
        std::vector<std::size_t> perm(r);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rs);
        SmallMatrix psub(r, std::vector<int>(r, 0));
        for (std::size_t a = 0; a < r; ++a) {
            for (std::size_t b = 0; b < r; ++b) psub[perm[a]][perm[b]] = sub[a][b];
        }
        EXPECT_EQ(contains(sub, m), contains(psub, m));
        auto bigger = sub;
        const std::size_t a = rs.below(r);
        std::size_t b = rs.below(r - 1);
        if (b >= a) ++b;
        bigger[a][b] = bigger[b][a] = 1;
        EXPECT_GE(contains(bigger, m), contains(sub, m));
    }
}

TEST(Motif, VshapeIffTwoEdges) {
    for (std::uint32_t pattern = 0; pattern < 8; ++pattern) {
        SmallMatrix sub(3, std::vector<int>(3, 0));
        int edges = 0;
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = a + 1; b < 3; ++b) {
                if ((pattern >> pair_bit(a, b, 3)) & 1u) {
                    sub[a][b] = sub[b][a] = 1;
                    ++edges;
                }
            }
        }
        EXPECT_EQ(contains(sub, motifs::vshape()), edges >= 2 ? 1 : 0);
    }
}

TEST(Motif, ConditionalExpectationExamples) {
    const std::vector<std::vector<double>> w{{0, 0.3, 0.5}, {0.3, 0, 0.7}, {0.5, 0.7, 0}};
    EXPECT_NEAR(conditional_expectation_h(w, motifs::triangle()), 0.3 * 0.5 * 0.7, 1e-15);
    const std::vector<std::vector<double>> half{{0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}};
    EXPECT_NEAR(conditional_expectation_h(half, motifs::vshape()), 0.5, 1e-15);
    const std::vector<std::vector<double>> bad{{0, 1.2, 0.5}, {1.2, 0, 0.5}, {0.5, 0.5, 0}};
    EXPECT_THROW(conditional_expectation_h(bad, motifs::triangle()), Error);
}

TEST(Motif, ConditionalExpectationBinaryEqualsContains) {
    RandomStream rs(5, "ce-binary");
    for (int t = 0; t < 1000; ++t) {
        const auto motifs = test_motifs();
        const auto& m = motifs[rs.below(motifs.size())];
        const auto sub = random_pattern(m.nodes(), rs);
        std::vector<std::vector<double>> w(m.nodes(), std::vector<double>(m.nodes()));
        for (std::size_t a = 0; a < m.nodes(); ++a) {
            for (std::size_t b = 0; b < m.nodes(); ++b) w[a][b] = sub[a][b];
        }
        EXPECT_EQ(conditional_expectation_h(w, m), static_cast<double>(contains(sub, m)));
    }
}

TEST(Motif, ConditionalExpectationMultilinearAndMonotone) {
    RandomStream rs(6, "ce-linear");
    for (int t = 0; t < 1000; ++t) {
        const auto motifs = test_motifs();
        const auto& m = motifs[rs.below(motifs.size())];
        const std::size_t r = m.nodes();
        std::vector<std::vector<double>> w(r, std::vector<double>(r, 0.0));
        for (std::size_t a = 0; a < r; ++a) {
            for (std::size_t b = a + 1; b < r; ++b) w[a][b] = w[b][a] = rs.uniform();
        }
        const std::size_t a = rs.below(r);
        std::size_t b = rs.below(r - 1);
        if (b >= a) ++b;
        auto at = [&](double v) {
            auto c = w;
            c[a][b] = c[b][a] = v;
            return conditional_expectation_h(c, m);
        };
        const double lo = at(0.0);
        const double hi = at(1.0);
        const double mid = rs.uniform();
        EXPECT_NEAR(at(mid), (1.0 - mid) * lo + mid * hi, 1e-12);
        EXPECT_GE(hi, lo - 1e-15);
    }
}
