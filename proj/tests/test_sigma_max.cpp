#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "chasekit/evaluator.hpp"
#include "chasekit/sigma_max.hpp"
#include "chasekit/text_io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace chasekit;

namespace {

bool contains(const std::vector<std::string>& xs, const std::string& x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

std::vector<std::string> removedIds(const SigmaMaxReport& r) {
    std::vector<std::string> out;
    for (const auto& [id, reason] : r.removed) out.push_back(id);
    return out;
}

// independent check: the dependencies that hold on the canonical database
std::vector<std::string> satisfiedIds(const Query& q, const std::vector<Dependency>& deps, const Schema& s) {
    BagDatabase d = canonicalDatabase(q);
    std::vector<std::string> out;
    for (const Dependency& dep : deps)
        if (satisfies(d, dep, s)) out.push_back(dep.id);
    return out;
}

} // namespace

TEST_CASE("bag semantics drops sigma3 and sigma4") {
    Document motivating = fixture::load("motivating.cqd");
    SigmaMaxReport r = maxBagSigmaSubset(motivating.queries.at("Q4"), motivating.dependencies, motivating.schema);
    CHECK(r.kept == std::vector<std::string>{"sigma1", "sigma2", "sigma7", "sigma8"});
    CHECK(removedIds(r) == std::vector<std::string>{"sigma3", "sigma4"});
    CHECK(r.removed[0].second == RemovalReason::NotSetValued);
    CHECK(r.removed[1].second == RemovalReason::NotAssignmentFixing);
    CHECK(oracle::isomorphic(r.chaseResult, motivating.queries.at("Q3")));
    CHECK(satisfies(canonicalDatabase(r.chaseResult), r.keptDependencies, motivating.schema));
    CHECK(satisfiedIds(r.chaseResult, motivating.dependencies, motivating.schema) == r.kept);
}

TEST_CASE("bag-set semantics keeps sigma3") {
    Document motivating = fixture::load("motivating.cqd");
    SigmaMaxReport r = maxBagSetSigmaSubset(motivating.queries.at("Q4"), motivating.dependencies, motivating.schema);
    CHECK(r.kept == std::vector<std::string>{"sigma1", "sigma2", "sigma3", "sigma7", "sigma8"});
    CHECK(removedIds(r) == std::vector<std::string>{"sigma4"});
    CHECK(oracle::isomorphic(r.chaseResult, motivating.queries.at("Q2")));
    CHECK(satisfiedIds(r.chaseResult, motivating.dependencies, motivating.schema) == r.kept);
}

TEST_CASE("proper chain") {
    Document motivating = fixture::load("motivating.cqd");
    auto b = maxBagSigmaSubset(motivating.queries.at("Q4"), motivating.dependencies, motivating.schema).kept;
    auto bs = maxBagSetSigmaSubset(motivating.queries.at("Q4"), motivating.dependencies, motivating.schema).kept;
    for (const auto& id : b) CHECK(contains(bs, id));
    CHECK(b.size() < bs.size());
    CHECK(bs.size() < motivating.dependencies.size());
}

TEST_CASE("a query that already has u keeps sigma4") {
    Document motivating = fixture::load("motivating.cqd");
    Query q = parseQuery("Q(X) :- p(X,Y), u(X,Z).", motivating.schema);
    SigmaMaxReport r = maxBagSigmaSubset(q, motivating.dependencies, motivating.schema);
    CHECK(contains(r.kept, "sigma4"));
    CHECK(satisfies(canonicalDatabase(r.chaseResult), r.keptDependencies, motivating.schema));
}

TEST_CASE("no dependencies") {
    Document motivating = fixture::load("motivating.cqd");
    SigmaMaxReport r = maxBagSigmaSubset(motivating.queries.at("Q4"), {}, motivating.schema);
    CHECK(r.kept.empty());
    CHECK(r.removed.empty());
    CHECK(maxBagSetSigmaSubset(motivating.queries.at("Q4"), {}, motivating.schema).kept.empty());
    CHECK_THROWS_AS(maxSigmaSubset(Semantics::Set, motivating.queries.at("Q4"), {}, motivating.schema), ValidationError);
}

TEST_CASE("report formats") {
    Document motivating = fixture::load("motivating.cqd");
    SigmaMaxReport r = maxBagSigmaSubset(motivating.queries.at("Q4"), motivating.dependencies, motivating.schema);
    std::string m = printSigmaMaxMachine(r);
    CHECK(m.find("keep sigma1\n") != std::string::npos);
    CHECK(m.find("drop sigma3 not-set-valued\n") != std::string::npos);
    CHECK(m.find("drop sigma4 not-assignment-fixing\n") != std::string::npos);
    CHECK_FALSE(printSigmaMaxText(r).empty());
    CHECK(removalReasonName(RemovalReason::UnsoundTgd) == "unsound-tgd");
}
