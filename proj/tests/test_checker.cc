#include <doctest.h>

#include <generators.hh>

#include <pbforge/checker.hh>
#include <pbforge/errors.hh>
#include <pbforge/opb.hh>
#include <pbforge/oracle.hh>

#include <fstream>

using namespace pbforge;
using namespace pbforge::testing;

namespace
{
    auto x(Variable v) -> Literal { return Literal::positive(v); }
    auto nx(Variable v) -> Literal { return Literal::negative(v); }

    auto wrap(const std::string & body) -> std::string
    {
        return "pseudo-Boolean proof version 3.0\n" + body + "end pseudo-Boolean proof\n";
    }

    auto run(const std::string & opb, const std::string & body, CheckOptions options = {}) -> Verdict
    {
        return check(parse_opb(opb), parse_proof(wrap(body)), options);
    }

    auto fixture(const std::string & name, CheckOptions options = {}) -> Verdict
    {
        auto dir = std::string{PBFORGE_FIXTURES} + "/";
        auto f = read_opb_file(dir + name + ".opb");
        std::ifstream in{dir + name + ".pbp"};
        ProofReader reader{in};
        return check(f, reader, options);
    }

    auto parse_proof_or_empty(const std::string & text) -> Proof
    {
        try {
            return parse_proof(text);
        }
        catch (const ParseError &) {
            return Proof{};
        }
    }

    const std::string clash = "+1 x1 >= 1 ;\n+1 ~x1 >= 1 ;\n";
}

TEST_CASE("fixtures verify, with and without strict hints")
{
    for (auto name : {"unit_clash", "pol_chain", "pbc", "php32_red", "paley13"}) {
        INFO(name);
        auto v = fixture(name);
        CHECK(v.status == VerdictStatus::VerifiedUnsat);
        CHECK(v.detail.starts_with("contradiction derived"));
        CHECK(fixture(name, CheckOptions{true}).status == VerdictStatus::VerifiedUnsat);
    }
}

TEST_CASE("fixture statistics")
{
    auto v = fixture("pol_chain");
    CHECK(v.stats.rules["pol"] == 3);
    CHECK(v.stats.pol_operators["+"] == 2);
    CHECK(v.stats.pol_operators["d"] == 1);
    CHECK(v.stats.pol_operators["w"] == 1);
    CHECK(v.stats.pol_operators["s"] == 1);
    CHECK(v.stats.pol_operators["*"] == 2);
    CHECK(fixture("pbc").stats.subproofs == 2);
    CHECK(fixture("php32_red").stats.rules["red"] == 1);
}

TEST_CASE("pol handler")
{
    auto f = parse_opb("+1 x1 +1 x2 >= 1 ;\n+1 x1 +1 ~x2 >= 1 ;\n");
    Checker c{f};
    c.load_formula(2);
    std::vector<RpnToken> sum{RpnId{1}, RpnId{2}, RpnAdd{}, RpnDivide{2}};
    CHECK(c.eval_pol(sum) == Constraint{{{1, x(1)}}, 1});
    auto id = c.apply_pol(sum);
    CHECK(id == 3u);
    CHECK(*c.db().get(3) == Constraint{{{1, x(1)}}, 1});

    std::vector<RpnToken> underflow{RpnId{1}, RpnAdd{}};
    CHECK_THROWS_AS(c.eval_pol(underflow), RuleViolation);
    std::vector<RpnToken> leftover{RpnId{1}, RpnId{2}};
    CHECK_THROWS_AS(c.eval_pol(leftover), RuleViolation);
    std::vector<RpnToken> missing{RpnId{9}};
    CHECK_THROWS_AS(c.eval_pol(missing), RuleViolation);
    std::vector<RpnToken> axiom{nx(4)};
    CHECK(c.eval_pol(axiom) == literal_axiom(nx(4)));
}

TEST_CASE("load_formula checks the count")
{
    auto f = parse_opb(clash);
    Checker c{f};
    CHECK_THROWS_AS(c.load_formula(3), RuleViolation);
    Checker d{f};
    d.load_formula();
    CHECK(d.db().live_count() == 2);
    CHECK_THROWS_AS(d.load_formula(), RuleViolation);
}

TEST_CASE("rup handler")
{
    auto f = parse_opb("+1 x1 +1 x2 >= 1 ;\n+1 ~x1 >= 1 ;\n+1 ~x2 +1 x3 >= 1 ;\n");
    Checker c{f, CheckOptions{true}};
    c.load_formula();
    std::vector<ConstraintId> hints{2, 1};
    CHECK(c.check_rup(Constraint{{{1, x(2)}}, 1}, hints) == 4u);
    std::vector<ConstraintId> no_hints;
    CHECK_THROWS_AS(c.check_rup(Constraint{{{1, x(3)}}, 1}, no_hints), RuleViolation);
    std::vector<ConstraintId> bad{17};
    CHECK_THROWS_AS(c.check_rup(Constraint{{{1, x(3)}}, 1}, bad), RuleViolation);

    Checker loose{f};
    loose.load_formula();
    loose.check_rup(Constraint{{{1, x(3)}}, 1}, no_hints, false);
    CHECK(loose.stats().rup_fallbacks == 1);
    CHECK_THROWS_AS(loose.check_rup(Constraint{{{1, nx(3)}}, 1}, no_hints, false), RuleViolation);
}

TEST_CASE("pbc handler")
{
    auto v = run(clash, "f 2 ;\npbc >= 1 ; begin\n  pol 1 2 + ;\nend\nconclusion UNSAT ;\n");
    CHECK(v.status == VerdictStatus::VerifiedUnsat);

    auto f = parse_opb("+1 x1 +1 x2 >= 1 ;\n");
    Checker c{f};
    c.load_formula();
    auto before = c.db().live_count();
    Subproof empty;
    CHECK_THROWS_AS(c.check_pbc(Constraint{{{1, x(1)}}, 1}, empty), RuleViolation);
    CHECK(c.db().live_count() == before);

    // the negated target alone may already be contradictory
    CHECK(c.check_pbc(Constraint{{}, 0}, empty) > 0u);

    auto bad = run(clash, "f 2 ;\npbc +1 x3 >= 1 ; begin\n  pol 1 ;\nend\n");
    CHECK(bad.status == VerdictStatus::Rejected);
    CHECK(bad.failing_line == 3u);
}

TEST_CASE("derived constraints inside a subproof vanish afterwards")
{
    auto v = run(clash, "f 2 ;\npbc >= 0 ; begin\n  pol 1 2 + ;\nend\nconclusion UNSAT : 4 ;\n");
    CHECK(v.status == VerdictStatus::Rejected);
}

TEST_CASE("red handler")
{
    auto f = parse_opb("+1 x1 +1 x2 >= 1 ;\n");
    SUBCASE("symmetric witness needs no goals")
    {
        Checker c{f};
        c.load_formula();
        Red red;
        red.target = Constraint{{{1, x(1)}}, 1};
        red.witness.insert(1, true);
        CHECK(c.check_red(red) == 2u);
    }
    SUBCASE("witness that falsifies an existing constraint is rejected")
    {
        Checker c{f};
        c.load_formula();
        Red red;
        red.target = Constraint{{{1, x(3)}}, 1};
        red.witness.insert(1, false);
        red.witness.insert(2, false);
        red.witness.insert(3, true);
        CHECK_THROWS_AS(c.check_red(red), RuleViolation);
    }
    SUBCASE("unknown and duplicate goals")
    {
        auto v = run("+1 x1 +1 x2 >= 1 ;\n", "f 1 ;\nred +1 x3 >= 1 ; x3 -> 1 ; begin\n  goal 1\n  end\nend\n");
        CHECK(v.status == VerdictStatus::Rejected);
        CHECK(v.failing_line == 4u);
        auto dup = run("+1 x1 +1 x2 >= 1 ;\n", "f 1 ;\nred +1 x3 >= 1 ; x3 -> 1 ; begin\n  goal #new\n  end\n  goal #new\n  end\nend\n");
        CHECK(dup.status == VerdictStatus::Rejected);
    }
    SUBCASE("a goal whose subproof does not close")
    {
        auto v = run("+1 x1 +1 x2 >= 1 ;\n", "f 1 ;\nred +1 x1 >= 1 ; x1 -> 0 x2 -> 0 ; begin\n  goal 1\n  end\nend\n");
        CHECK(v.status == VerdictStatus::Rejected);
        CHECK(v.failing_line == 4u);
    }
}

TEST_CASE("red mutation on the pigeonhole fixture is rejected")
{
    auto dir = std::string{PBFORGE_FIXTURES} + "/";
    auto f = read_opb_file(dir + "php32_red.opb");
    std::ifstream in{dir + "php32_red.pbp"};
    std::string text{std::istreambuf_iterator<char>{in}, {}};
    auto pos = text.find("x1 -> x3");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 8, "x1 -> x4");
    auto v = check(f, parse_proof(text));
    CHECK(v.status == VerdictStatus::Rejected);
}

TEST_CASE("solutions")
{
    auto f = parse_opb("+1 x1 +1 x2 >= 1 ;\n+1 ~x1 >= 1 ;\n");
    Checker c{f};
    c.load_formula();
    std::vector<Literal> good{nx(1), x(2)}, both{x(1), nx(1)}, violating{x(1), x(2)}, partial{nx(1)};
    CHECK_NOTHROW(c.check_solution(good, false));
    CHECK_THROWS_AS(c.check_solution(both, false), RuleViolation);
    CHECK_THROWS_AS(c.check_solution(violating, false), RuleViolation);
    CHECK_THROWS_AS(c.check_solution(partial, false), RuleViolation);
    CHECK_NOTHROW(c.check_solution(partial, true));

    CHECK(run("+1 x1 +1 x2 >= 1 ;\n", "f 1 ;\nsol x1 ;\nconclusion SAT ;\n").status == VerdictStatus::VerifiedSat);
    CHECK(run("+1 x1 +1 x2 >= 1 ;\n", "f 1 ;\nconclusion SAT : x2 ;\n").status == VerdictStatus::VerifiedSat);
    CHECK(run("+1 x1 +1 x2 >= 1 ;\n", "f 1 ;\nconclusion SAT ;\n").status == VerdictStatus::Rejected);
    CHECK(run("+1 x1 +1 x2 >= 1 ;\n", "f 1 ;\nconclusion SAT : ~x1 ~x2 ;\n").status == VerdictStatus::Rejected);
}

TEST_CASE("deletion and weakening")
{
    auto v = run(clash, "f 2 ;\ndel id 2 ;\npol 1 2 + ;\nconclusion UNSAT ;\n");
    CHECK(v.status == VerdictStatus::Rejected);
    CHECK(v.failing_line == 4u);
    CHECK(run(clash, "f 2 ;\ndel id 2 ;\ndel id 2 ;\n").failing_line == 4u);

    auto f = parse_opb("+3 x1 +5 x2 >= 4 ;\n");
    Checker c{f};
    c.load_formula();
    auto id = c.apply_weaken(1, 2);
    CHECK(*c.db().get(id) == Constraint{{{3, x(1)}}, 0});
    CHECK(c.stats().constraints_created == 2);
}

TEST_CASE("conclusions")
{
    CHECK(run(clash, "f 2 ;\npol 1 2 + ;\nconclusion UNSAT : 3 ;\n").status == VerdictStatus::VerifiedUnsat);
    CHECK(run(clash, "f 2 ;\npol 1 2 + ;\nconclusion UNSAT : 1 ;\n").status == VerdictStatus::Rejected);
    CHECK(run(clash, "f 2 ;\nconclusion UNSAT ;\n").status == VerdictStatus::Rejected);
    CHECK(run(clash, "f 2 ;\npol 1 2 + ;\n").detail == "proof has no conclusion");
    auto bounds = run(clash, "f 2 ;\nconclusion BOUNDS 1 1 ;\n");
    CHECK(bounds.status == VerdictStatus::Rejected);
    CHECK(bounds.detail.find("unsupported") != std::string::npos);
    CHECK(run(clash, "f 2 ;\npol 1 2 + ;\nconclusion UNSAT ;\npol 1 2 + ;\n").failing_line == 5u);
    CHECK(run(clash, "f 2 ;\npol 1 2 + ;\nconclusion UNSAT ;\nconclusion UNSAT ;\n").status == VerdictStatus::Rejected);
    CHECK(run(clash, "f 2 ;\npbc >= 1 ; begin\n  conclusion UNSAT ;\nend\n").status == VerdictStatus::Rejected);
}

TEST_CASE("malformed proof text becomes a rejection with parse_error set")
{
    auto f = parse_opb(clash);
    ProofReader reader{std::string{"pseudo-Boolean proof version 3.0\nf 2 ;\npol 1 2 x ;\nend pseudo-Boolean proof\n"}};
    auto v = check(f, reader);
    CHECK(v.status == VerdictStatus::Rejected);
    CHECK(v.parse_error);
    CHECK(v.failing_line == 3u);
}

TEST_CASE("verdicts agree with the brute-force oracle")
{
    Rng rng{31337};
    int unsat = 0, sat = 0;
    for (int i = 0; i < 300; ++i) {
        auto f = random_formula(rng, 2 + i % 9, 3 + i % 14);
        auto truth = brute_force_sat(f);
        REQUIRE(truth.status != OracleStatus::TooLarge);
        auto proof = dpll_proof(f, &rng);
        CHECK(proof.unsat == (truth.status == OracleStatus::Unsat));
        auto v = check(f, parse_proof(proof.text), CheckOptions{true});
        INFO(proof.text << "\n" << v.detail);
        CHECK(v.status == (truth.status == OracleStatus::Unsat ? VerdictStatus::VerifiedUnsat : VerdictStatus::VerifiedSat));
        (truth.status == OracleStatus::Unsat ? unsat : sat)++;
    }
    CHECK(unsat > 20);
    CHECK(sat > 20);
}

TEST_CASE("no mutation of a proof for a satisfiable formula claims UNSAT")
{
    Rng rng{4242};
    std::size_t tried = 0;
    for (int i = 0; i < 60; ++i) {
        auto f = random_formula(rng, 3 + i % 5, 4 + i % 6);
        if (brute_force_sat(f).status != OracleStatus::Sat)
            continue;
        auto text = random_pol_proof(rng, f, 6);
        for (const auto & site : mutation_sites(text)) {
            auto mutated = apply_mutation(text, site);
            ++tried;
            CHECK(check(f, parse_proof_or_empty(mutated)).status != VerdictStatus::VerifiedUnsat);
        }
    }
    CHECK(tried > 50);
}
