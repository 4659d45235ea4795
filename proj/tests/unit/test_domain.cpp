#include <doctest.h>

#include <cmath>

#include "groupcast/domain.hpp"
#include "groupcast/errors.hpp"
#include "helpers.hpp"

using namespace groupcast;
using groupcast::testing::random_series;
using groupcast::testing::random_sociogram;

namespace {

// Straightforward sliding enumerator: advance by the stride while a full window fits.
std::vector<std::pair<double, double>> sliding(double duration, double window, double stride) {
    std::vector<std::pair<double, double>> out;
    for (int k = 0;; ++k) {
        const double start = k * stride;
        if (start + window > duration + 1e-9) break;
        out.emplace_back(start, start + window);
    }
    return out;
}

}  // namespace

TEST_SUITE("domain") {
    TEST_CASE("window counts for the standard lengths") {
        CHECK(make_window_index(288.0).size() == 17);
        CHECK(make_window_index(96.0).size() == 5);
        CHECK(make_window_index(32.0).size() == 1);
        CHECK(make_window_index(47.9).size() == 1);
        CHECK(make_window_index(48.0).size() == 2);
        CHECK_THROWS_AS(make_window_index(31.9), EmptySession);
        CHECK_THROWS_AS(make_window_index(100.0, 0.0, 16.0), ContractError);
    }

    TEST_CASE("window index matches the sliding enumerator on random durations") {
        Rng rng(11);
        for (int trial = 0; trial < 1000; ++trial) {
            const double duration = 32.0 + unit_uniform(rng) * 3000.0;
            const auto got = make_window_index(duration);
            const auto want = sliding(duration, 32.0, 16.0);
            REQUIRE(got.size() == want.size());
            for (std::size_t k = 0; k < got.size(); ++k) {
                CHECK(got[k].index == static_cast<int>(k));
                CHECK(got[k].start_s == want[k].first);
                CHECK(got[k].end_s == want[k].second);
            }
        }
    }

    TEST_CASE("participant labels") {
        CHECK(participant_label(0) == "P1");
        CHECK(participant_index("P12") == 11);
        CHECK_FALSE(participant_index("P0"));
        CHECK_FALSE(participant_index("Q1"));
        CHECK_FALSE(participant_index("P"));
        CHECK_FALSE(participant_index("P1x"));
    }

    TEST_CASE("edge enumeration") {
        int directed = 0, undirected = 0;
        for_each_edge(5, true, [&](int i, int j) {
            CHECK(i != j);
            ++directed;
        });
        for_each_edge(5, false, [&](int i, int j) {
            CHECK(i < j);
            ++undirected;
        });
        CHECK(directed == edge_count(5, true));
        CHECK(undirected == edge_count(5, false));
        CHECK(directed == 20);
        CHECK(undirected == 10);
    }

    TEST_CASE("undirected sociograms stay symmetric") {
        Sociogram g(Modality::Proximity, 4, {});
        g.set_weight(0, 2, 0.25);
        CHECK(g.weight(2, 0) == 0.25);
        Sociogram d(Modality::Conversation, 4, {});
        d.set_weight(0, 2, 0.25);
        CHECK(d.weight(2, 0) == 0.0);
        CHECK_THROWS_AS(g.set_weight(1, 1, 0.5), ContractError);
        CHECK_THROWS_AS(g.set_weight(0, 1, 1.5), ContractError);
        CHECK_THROWS_AS(g.set_weight(0, 4, 0.5), ContractError);
    }

    TEST_CASE("binarize keeps edges above tau") {
        Sociogram g(Modality::Conversation, 3, {});
        g.set_weight(0, 1, 0.5);
        g.set_weight(1, 2, 0.1);
        const auto b = binarize(g, 0.2);
        CHECK(b.weight(0, 1) == 1.0);
        CHECK(b.weight(1, 2) == 0.0);
        CHECK(binarize(g).weight(1, 2) == 1.0);
    }

    TEST_CASE("weights from binary series equal active-second fractions") {
        Rng rng(3);
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 2 + static_cast<int>(uniform_below(rng, 4));
            const int T = 1 + static_cast<int>(uniform_below(rng, 40));
            BinarySeries s({0, 0.0, static_cast<double>(T)}, n, T);
            // Raw writes so undirected entries may be one-sided.
            for (Modality m : kModalities)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        if (i != j)
                            for (int t = 0; t < T; ++t) s.set_raw(m, i, j, t, bernoulli(rng, 0.3));
            const auto w = weighted_from_binary_series(s);
            for (Modality m : kModalities)
                for_each_edge(n, is_directed(m), [&](int i, int j) {
                    int on = 0;
                    for (int t = 0; t < T; ++t)
                        on += (s.active(m, i, j, t) || (!is_directed(m) && s.active(m, j, i, t))) ? 1 : 0;
                    CHECK(w.get(m).weight(i, j) == doctest::Approx(static_cast<double>(on) / T).epsilon(1e-15));
                });
        }
    }

    TEST_CASE("symmetrize is an OR over both directions") {
        BinarySeries s({}, 3, 2);
        s.set_raw(Modality::Proximity, 0, 1, 0, true);
        s.set_raw(Modality::Proximity, 2, 1, 1, true);
        s.set_raw(Modality::Conversation, 0, 1, 0, true);
        s.symmetrize();
        CHECK(s.active(Modality::Proximity, 1, 0, 0));
        CHECK(s.active(Modality::Proximity, 1, 2, 1));
        CHECK_FALSE(s.active(Modality::Conversation, 1, 0, 0));
    }

    TEST_CASE("json round trips") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const auto g = random_sociogram(rng, kModalities[static_cast<std::size_t>(trial % 3)], 4, {3, 48.0, 80.0});
            CHECK(sociogram_from_json(to_json(g)) == g);
            const auto s = random_series(rng, 3, 8);
            CHECK(binary_series_from_json(to_json(s)) == s);
        }
        const Window w{7, 112.0, 144.0};
        CHECK(window_from_json(to_json(w)) == w);
        CHECK_THROWS_AS(sociogram_from_json(nlohmann::json::parse(R"({"modality":"gossip"})")), SchemaError);
    }

    TEST_CASE("modality names") {
        for (Modality m : kModalities) CHECK(modality_from_name(modality_name(m)) == m);
        CHECK(modality_key(Modality::SharedAttention) == 'S');
        CHECK_THROWS_AS(modality_from_name("touch"), SchemaError);
    }
}
