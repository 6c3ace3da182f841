#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "chasekit/equivalence.hpp"
#include "chasekit/reformulate.hpp"
#include "chasekit/text_io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace chasekit;

namespace {

bool hasIsomorphic(const std::vector<Query>& qs, const Query& q) {
    for (const Query& x : qs)
        if (oracle::isomorphic(x, q)) return true;
    return false;
}

} // namespace

TEST_CASE("set C&B on the motivating example") {
    Document motivating = fixture::load("motivating.cqd");
    ReformulationSet r = candbSet(motivating.queries.at("Q4"), motivating.dependencies, motivating.schema);
    CHECK(oracle::isomorphic(r.universalPlan, motivating.queries.at("Q1")));
    CHECK(hasIsomorphic(r.outputs, motivating.queries.at("Q4")));
    for (const Query& o : r.outputs)
        CHECK(equivSetUnderSigma(o, motivating.queries.at("Q4"), motivating.dependencies, motivating.schema).equivalent);
    CHECK(r.candidates.size() >= r.outputs.size());
}

TEST_CASE("bag C&B") {
    Document motivating = fixture::load("motivating.cqd");
    ReformulationSet r = candbBag(motivating.queries.at("Q4"), motivating.dependencies, motivating.schema);
    CHECK(oracle::isomorphic(r.universalPlan, motivating.queries.at("Q3")));
    REQUIRE_FALSE(r.outputs.empty());
    bool single = false;
    for (const Query& o : r.outputs) {
        CHECK(equivBagUnderSigma(o, motivating.queries.at("Q4"), motivating.dependencies, motivating.schema).equivalent);
        if (o.body.size() == 1 && o.body[0].relation == "p") single = true;
    }
    CHECK(single);
    ReformulationSet r3 = candbBag(motivating.queries.at("Q3"), motivating.dependencies, motivating.schema);
    CHECK(hasIsomorphic(r3.outputs, motivating.queries.at("Q4")));

    Document dup_subgoals = fixture::load("dup_subgoals.cqd");
    ReformulationSet r7 = candbBag(dup_subgoals.queries.at("Q7"), {}, dup_subgoals.schema);
    REQUIRE(r7.outputs.size() == 1);
    CHECK(oracle::isomorphic(r7.outputs[0], dup_subgoals.queries.at("Q7")));
}

TEST_CASE("bag-set C&B") {
    Document motivating = fixture::load("motivating.cqd");
    ReformulationSet r = candbBagSet(motivating.queries.at("Q4"), motivating.dependencies, motivating.schema);
    for (const Query& o : r.outputs)
        CHECK(equivBagSetUnderSigma(o, motivating.queries.at("Q4"), motivating.dependencies, motivating.schema).equivalent);
    ReformulationSet r2 = candbBagSet(motivating.queries.at("Q2"), motivating.dependencies, motivating.schema);
    CHECK(hasIsomorphic(r2.outputs, motivating.queries.at("Q4")));

    Document dup_subgoals = fixture::load("dup_subgoals.cqd");
    ReformulationSet r7 = candbBagSet(dup_subgoals.queries.at("Q7"), {}, dup_subgoals.schema);
    REQUIRE(r7.outputs.size() == 1);
    CHECK(oracle::isomorphic(r7.outputs[0], dup_subgoals.queries.at("Q8")));
}

TEST_CASE("set C&B without dependencies is minimization") {
    std::mt19937 rng(3);
    oracle::RandomSchema rs{{{"a", 2}, {"b", 2}}, {false, false}};
    Schema s;
    for (const auto& [n, a] : rs.relations) s.addRelation(n, a);
    for (int i = 0; i < 40; ++i) {
        Query q = oracle::randomQuery(rng, rs, 5, 4);
        ReformulationSet r = candbSet(q, {}, s);
        REQUIRE(r.outputs.size() == 1);
        CHECK(oracle::isomorphic(r.outputs[0], oracle::core(q)));
    }
}

TEST_CASE("aggregate C&B") {
    Document agg = fixture::load("aggregates.cqd");
    AggregateReformulationSet m = candbAggregate(agg.aggregates.at("MaxQ4"), agg.dependencies, agg.schema);
    CHECK(m.coreSemantics == Semantics::Set);
    ReformulationSet set = candbSet(agg.aggregates.at("MaxQ4").core, agg.dependencies, agg.schema);
    REQUIRE(m.outputs.size() == set.outputs.size());
    for (std::size_t i = 0; i < m.outputs.size(); ++i) {
        CHECK(m.outputs[i].fn == AggFn::Max);
        CHECK(oracle::isomorphic(m.outputs[i].core, set.outputs[i]));
    }
    AggregateReformulationSet s = candbAggregate(agg.aggregates.at("SumQ4"), agg.dependencies, agg.schema);
    CHECK(s.coreSemantics == Semantics::BagSet);
    for (const AggregateQuery& o : s.outputs)
        CHECK(equivAggregateUnderSigma(o, agg.aggregates.at("SumQ4"), agg.dependencies, agg.schema).equivalent);

    Schema sch = parseSchema("relation p/2");
    AggregateQuery c = parseAggregateQuery("C(X, count(*)) :- p(X,Y), p(X,Y).", sch);
    AggregateReformulationSet cr = candbAggregate(c, {}, sch);
    REQUIRE(cr.outputs.size() == 1);
    CHECK(cr.outputs[0].core.body.size() == 1);
    CHECK_FALSE(cr.outputs[0].aggArg.has_value());
}

TEST_CASE("sigma-minimality") {
    Document motivating = fixture::load("motivating.cqd");
    const auto& q = motivating.queries;
    CHECK(isSigmaMinimal(q.at("Q4"), motivating.dependencies, motivating.schema, Semantics::Set));
    CHECK_FALSE(isSigmaMinimal(q.at("Q1"), motivating.dependencies, motivating.schema, Semantics::Set));
    CHECK_FALSE(isSigmaMinimal(q.at("Q3"), motivating.dependencies, motivating.schema, Semantics::Bag));
    CHECK(isSigmaMinimal(q.at("Q3"), {}, motivating.schema, Semantics::Bag));
}

TEST_CASE("parallel C&B matches the serial run") {
    Document motivating = fixture::load("motivating.cqd");
    ReformulationOptions par;
    par.jobs = 4;
    for (Semantics sem : {Semantics::Set, Semantics::Bag, Semantics::BagSet}) {
        auto a = candb(sem, motivating.queries.at("Q1"), motivating.dependencies, motivating.schema);
        auto b = candb(sem, motivating.queries.at("Q1"), motivating.dependencies, motivating.schema, {}, par);
        CHECK(a.outputs == b.outputs);
    }
}

TEST_CASE("plan size bound") {
    Document motivating = fixture::load("motivating.cqd");
    ReformulationOptions tiny;
    tiny.maxPlanAtoms = 2;
    CHECK_THROWS_AS(candbSet(motivating.queries.at("Q4"), motivating.dependencies, motivating.schema, {}, tiny), ResourceBound);
}
