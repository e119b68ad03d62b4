#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "parlab/abelian.hpp"
#include "parlab/gallery.hpp"
#include "parlab/json_io.hpp"

using namespace parlab;

TEST_CASE("rational strings") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("1") == 1);
    CHECK(parse_rational("-2/6") == Rational(-1, 3));
    CHECK(rational_to_string(Rational(5, 8)) == "5/8");
    CHECK_THROWS_AS(parse_rational("0.5"), input_error);
    CHECK_THROWS_AS(parse_rational("x"), input_error);
    CHECK_THROWS_AS(parse_rational("1/0"), input_error);
}

TEST_CASE("game json round trip") {
    for (const Game& g : {make_ghz(), make_anticorr(), make_rectangle(2, 3), make_random_3cnf(6, 3, 42)}) {
        json j = game_to_json(g);
        Game back = game_from_json(j);
        CHECK(back.players == g.players);
        CHECK(back.question_labels == g.question_labels);
        CHECK(back.answer_labels == g.answer_labels);
        CHECK(back.query == g.query);
        CHECK(back.predicate == g.predicate);
        // serialization is deterministic
        CHECK(game_to_json(back).dump() == j.dump());
    }
}

TEST_CASE("game json validation") {
    json j = game_to_json(make_ghz());
    j["distribution"][0]["p"] = "1/8";  // mass now 7/8
    CHECK_THROWS_AS(game_from_json(j), input_error);

    json j2 = game_to_json(make_ghz());
    j2["distribution"][0]["q"][0] = "7";
    CHECK_THROWS_AS(game_from_json(j2), input_error);

    json j3 = game_to_json(make_ghz());
    j3.erase("distribution");
    CHECK_THROWS_AS(game_from_json(j3), input_error);

    // omitted predicate rows lose
    json j4 = game_to_json(make_ghz());
    j4["predicate"] = json::array();
    Game g4 = game_from_json(j4);
    for (auto p : g4.predicate) CHECK(p == 0);
}

TEST_CASE("event json round trip") {
    Game rep = repeat_game(make_ghz(), 2);
    ProductEvent e = ProductEvent::full(rep);
    e.member[0][1] = 0;
    e.member[2][3] = 0;
    json j = event_to_json(rep, e);
    ProductEvent back = event_from_json(rep, j);
    CHECK(back.arity == e.arity);
    CHECK(back.member == e.member);

    json wrong = j;
    wrong["arity"] = 3;
    CHECK_THROWS_AS(event_from_json(rep, wrong), input_error);
}

TEST_CASE("witness and grr serialization") {
    auto s = SupportSet::from_tuples({2, 2, 2}, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
    auto w = universal_embedding(s);
    json j = witness_to_json(w);
    CHECK(j["trivial"] == false);
    CHECK(j["group"]["torsion"].size() == 1);
    CHECK(j["group"]["torsion"][0] == "2");

    auto grr = plain_random_restriction_grr(ProbabilitySpace::uniform(2), 2, Rational(1, 2));
    json gj = grr_to_json(grr);
    CHECK(gj["epsilon"] == "0");
    Rational total = 0;
    for (const auto& atom : gj["atoms"]) total += parse_rational(atom["weight"].get<std::string>());
    CHECK(total == 1);
}

TEST_CASE("random 3cnf gallery games") {
    SECTION("single clause over two variables has value 1") {
        Game g = make_random_3cnf(1, 2, 5);
        CHECK(validate_game(g).ok());
        CHECK(value(g).first == 1);
    }

    SECTION("support equals the sampled variable triples") {
        Game g = make_random_3cnf(50, 3, 7);
        auto clauses = sample_3cnf(50, 3, 7);
        auto s = game_support(g);
        std::set<std::vector<int>> expect;
        for (const auto& c : clauses) expect.insert({c.var[0], c.var[1], c.var[2]});
        std::set<std::vector<int>> got(s.tuples.begin(), s.tuples.end());
        CHECK(got == expect);
        // pairwise projections are exactly the sampled edges
        auto proj = pairwise_projection(s, 0, 1);
        std::set<std::pair<int, int>> edges;
        for (const auto& c : clauses) edges.insert({c.var[0], c.var[1]});
        CHECK(proj.edges == edges);
    }

    SECTION("gallery games validate") {
        CHECK(validate_game(make_ghz()).ok());
        CHECK(validate_game(make_anticorr()).ok());
        CHECK(validate_game(make_rectangle(3, 2)).ok());
        CHECK(validate_game(make_random_3cnf(10, 4, 1)).ok());
    }
}

TEST_CASE("classification implication lattice") {
    std::mt19937_64 g = testutil::rng(271);
    auto check_game = [](const SupportSet& s) {
        auto r = classify(s);
        bool trivial = universal_embedding(s).trivial;
        auto marginal = check_marginal_condition(s);
        if (r.connected) CHECK(r.coordinatewise_connected);
        if (r.coordinatewise_connected) CHECK(trivial);
        if (trivial) {
            CHECK(r.pairwise_connected);
            CHECK(marginal.holds);
        }
    };
    check_game(game_support(make_ghz()));
    check_game(game_support(make_rectangle(3, 2)));
    check_game(game_support(make_anticorr()));
    for (int trial = 0; trial < 60; ++trial)
        check_game(testutil::random_support(g, {2, 2, 2}, 0.4).trimmed());
}
