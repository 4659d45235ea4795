#include <doctest.h>

#include <fstream>

#include "groupcast/errors.hpp"
#include "groupcast/ingest.hpp"
#include "groupcast/synth.hpp"
#include "helpers.hpp"

using namespace groupcast;
using groupcast::testing::TempDir;

namespace {

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
    std::ofstream out(p);
    for (const auto& l : lines) out << l << "\n";
}

// Minimal valid two-person session: the caller overrides one file.
void minimal_session(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_lines(dir / "gaze.jsonl", {R"({"t":0.5,"pid":"P1","origin":[0,0,0],"dir":[1,0,0]})",
                                     R"({"t":0.5,"pid":"P2","origin":[1,0,0],"dir":[-1,0,0]})"});
    write_lines(dir / "speech.jsonl", {R"({"pid":"P1","start":0,"end":10})"});
    write_lines(dir / "position.jsonl",
                {R"({"t":0.5,"pid":"P1","pos":[0,0,0]})", R"({"t":40,"pid":"P2","pos":[1,0,0]})"});
}

const Window kW{0, 0.0, 32.0};

GazeSample gaze_at(double t, int p, std::optional<std::string> target) {
    return {t, p, {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, std::move(target)};
}

}  // namespace

TEST_SUITE("ingest") {
    TEST_CASE("write and parse round-trip a synthetic session") {
        TempDir tmp("ingest_rt");
        auto p = groupcast::testing::small_params(3, 96.0);
        const auto s = generate_synthetic_session(p);
        write_session(s.streams, tmp.path() / "G01");
        const auto back = parse_session(tmp.path() / "G01");
        CHECK(back.group_id == s.streams.group_id);
        CHECK(back.participants == s.streams.participants);
        CHECK(back.duration_s == s.streams.duration_s);
        REQUIRE(back.gaze.size() == s.streams.gaze.size());
        REQUIRE(back.speech.size() == s.streams.speech.size());
        REQUIRE(back.positions.size() == s.streams.positions.size());
        REQUIRE(back.events.size() == s.streams.events.size());
        for (std::size_t k = 0; k < back.gaze.size(); ++k) {
            CHECK(back.gaze[k].t == s.streams.gaze[k].t);
            CHECK(back.gaze[k].direction == s.streams.gaze[k].direction);
            CHECK(back.gaze[k].target == s.streams.gaze[k].target);
        }
        const auto tl = build_timeline(back);
        REQUIRE(tl.window_count() == s.timeline.window_count());
        for (int w = 0; w < tl.window_count(); ++w) {
            CHECK(tl.windows[static_cast<std::size_t>(w)].truth == s.timeline.windows[static_cast<std::size_t>(w)].truth);
            CHECK(tl.windows[static_cast<std::size_t>(w)].truth_series ==
                  s.timeline.windows[static_cast<std::size_t>(w)].truth_series);
        }

        // Byte-deterministic output.
        write_session(back, tmp.path() / "again");
        for (const char* f : {"gaze.jsonl", "speech.jsonl", "position.jsonl", "events.jsonl", "session.json"}) {
            std::ifstream a(tmp.path() / "G01" / f), b(tmp.path() / "again" / f);
            const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
            CHECK(sa == sb);
        }
    }

    TEST_CASE("malformed lines report file and line") {
        TempDir tmp("ingest_bad");
        minimal_session(tmp.path());
        write_lines(tmp.path() / "gaze.jsonl", {R"({"t":0.5,"pid":"P1","origin":[0,0,0],"dir":[1,0,0]})",
                                                R"({"t":0.7,"pid":"P2","origin":[0,0,0]})"});
        try {
            parse_session(tmp.path());
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.file() == "gaze.jsonl");
            CHECK(e.line() == 2);
        }
        write_lines(tmp.path() / "gaze.jsonl", {R"({"t":0.5,"pid":"P1","origin":[0,0,0],"dir":[2,0,0]})"});
        CHECK_THROWS_AS(parse_session(tmp.path()), ParseError);
        write_lines(tmp.path() / "gaze.jsonl", {"not json"});
        CHECK_THROWS_AS(parse_session(tmp.path()), ParseError);
    }

    TEST_CASE("timestamp regression within a participant is an ordering error") {
        TempDir tmp("ingest_order");
        minimal_session(tmp.path());
        write_lines(tmp.path() / "position.jsonl",
                    {R"({"t":2,"pid":"P1","pos":[0,0,0]})", R"({"t":1,"pid":"P2","pos":[0,0,0]})",
                     R"({"t":1,"pid":"P1","pos":[0,0,0]})"});
        CHECK_THROWS_AS(parse_session(tmp.path()), OrderingError);
    }

    TEST_CASE("participants outside the roster are schema errors") {
        TempDir tmp("ingest_roster");
        minimal_session(tmp.path());
        write_lines(tmp.path() / "session.json", {R"({"group":"G9","participants":["P1","P2"]})"});
        CHECK(parse_session(tmp.path()).group_id == "G9");
        write_lines(tmp.path() / "speech.jsonl", {R"({"pid":"P3","start":0,"end":1})"});
        CHECK_THROWS_AS(parse_session(tmp.path()), SchemaError);
    }

    TEST_CASE("overlapping speech of one speaker is rejected") {
        TempDir tmp("ingest_overlap");
        minimal_session(tmp.path());
        write_lines(tmp.path() / "speech.jsonl",
                    {R"({"pid":"P1","start":0,"end":5})", R"({"pid":"P1","start":4,"end":6})"});
        CHECK_THROWS_AS(parse_session(tmp.path()), ParseError);
    }

    TEST_CASE("missing directory or stream is an io error") {
        CHECK_THROWS_AS(parse_session("/nonexistent/groupcast"), IoError);
        TempDir tmp("ingest_missing");
        minimal_session(tmp.path());
        std::filesystem::remove(tmp.path() / "speech.jsonl");
        CHECK_THROWS_AS(parse_session(tmp.path()), IoError);
    }

    TEST_CASE("conversation weight follows gaze-addressed speaking time") {
        const std::vector<SpeechSegment> speech{{0, 0.0, 16.0}};
        std::vector<GazeSample> gaze;
        for (int k = 0; k < 32; ++k) gaze.push_back(gaze_at(k + 0.5, 0, "P2"));
        const auto g = build_conversation_sociogram(kW, 3, speech, gaze);
        CHECK(g.weight(0, 1) == doctest::Approx(0.5));
        CHECK(g.weight(0, 2) == 0.0);
        CHECK(g.weight(1, 0) == 0.0);

        // Unaddressed speech is split evenly over the listeners.
        const auto u = build_conversation_sociogram(kW, 3, speech, {});
        CHECK(u.weight(0, 1) == doctest::Approx(0.25));
        CHECK(u.weight(0, 2) == doctest::Approx(0.25));
    }

    TEST_CASE("a second counts as speaking only with enough coverage") {
        const std::vector<SpeechSegment> speech{{0, 0.0, 0.4}, {0, 1.0, 1.6}};
        const auto g = build_conversation_sociogram(kW, 2, speech, {});
        CHECK(g.weight(0, 1) == doctest::Approx(1.0 / 32.0));
    }

    TEST_CASE("proximity uses the threshold and interpolated positions") {
        std::vector<PositionSample> pos;
        for (int k = 0; k < 32; ++k) {
            pos.push_back({k + 0.5, 0, {0.0, 0.0, 0.0}});
            pos.push_back({k + 0.5, 1, {k < 16 ? 0.4 : 0.5, 0.0, 0.0}});
        }
        const auto g = build_proximity_sociogram(kW, 2, pos);
        CHECK(g.weight(0, 1) == doctest::Approx(0.5));
        CHECK(g.weight(1, 0) == g.weight(0, 1));

        // A 10 s gap between samples is not bridged.
        std::vector<PositionSample> sparse{{0.0, 0, {0, 0, 0}}, {0.0, 1, {0.1, 0, 0}},  {10.0, 0, {0, 0, 0}},
                                           {10.0, 1, {0.1, 0, 0}}, {10.5, 0, {0, 0, 0}}, {10.5, 1, {0.1, 0, 0}}};
        const auto s = build_proximity_sociogram(kW, 2, sparse);
        // Second 10 (t=10.5) is sampled and second 11 (t=11.5) is held from it;
        // t=0.5 lies inside the 10 s gap, so it is inactive like the rest.
        CHECK(s.weight(0, 1) == doctest::Approx(2.0 / 32.0));
        CHECK_THROWS_AS(build_proximity_sociogram(kW, 2, pos, 0.0), ContractError);
    }

    TEST_CASE("labelled shared attention compares majority targets") {
        std::vector<GazeSample> gaze;
        for (int k = 0; k < 32; ++k) {
            gaze.push_back(gaze_at(k + 0.25, 0, "img_1"));
            gaze.push_back(gaze_at(k + 0.25, 1, k < 10 ? "img_1" : "img_2"));
            gaze.push_back(gaze_at(k + 0.25, 2, std::nullopt));
        }
        const auto g = build_attention_sociogram(kW, 3, gaze);
        CHECK(g.weight(0, 1) == doctest::Approx(10.0 / 32.0));
        CHECK(g.weight(0, 2) == 0.0);
    }

    TEST_CASE("unlabelled shared attention falls back to converging gaze rays") {
        std::vector<GazeSample> gaze;
        for (int k = 0; k < 32; ++k) {
            // Both look at (1, 1, 0) for the first 8 s, then away from each other.
            const bool together = k < 8;
            gaze.push_back({k + 0.5, 0, {0, 0, 0}, {M_SQRT1_2, M_SQRT1_2, 0}, std::nullopt});
            gaze.push_back({k + 0.5, 1, {2, 0, 0}, {together ? -M_SQRT1_2 : M_SQRT1_2, M_SQRT1_2, 0}, std::nullopt});
        }
        const auto g = build_attention_sociogram(kW, 2, gaze);
        CHECK(g.weight(0, 1) == doctest::Approx(8.0 / 32.0));
    }

    TEST_CASE("ray closest approach") {
        CHECK(*ray_closest_distance({0, 0, 0}, {1, 0, 0}, {1, -1, 0}, {0, 1, 0}) == doctest::Approx(0.0));
        CHECK(*ray_closest_distance({0, 0, 0}, {1, 0, 0}, {1, -1, 1}, {0, 1, 0}) == doctest::Approx(1.0));
        CHECK_FALSE(ray_closest_distance({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 0, 0}));
        CHECK_FALSE(ray_closest_distance({0, 0, 0}, {-1, 0, 0}, {1, -1, 0}, {0, 1, 0}));
    }

    TEST_CASE("timeline windows and events") {
        const auto s = generate_synthetic_session(groupcast::testing::small_params(9, 96.0));
        REQUIRE(s.timeline.window_count() == 5);
        for (const auto& w : s.timeline.windows) {
            for (const auto& e : w.events) {
                CHECK(e.t >= w.window().start_s);
                CHECK(e.t < w.window().end_s);
            }
            // Directed addressing: the truth graph is the count graph of its own bits.
            CHECK(weighted_from_binary_series(w.truth_series) == w.truth);
        }
        CHECK(s.timeline.features.size() == 4);
        const auto cut = s.timeline.truncated(2);
        CHECK(cut.window_count() == 3);
    }
}
