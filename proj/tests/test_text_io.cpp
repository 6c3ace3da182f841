#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "chasekit/text_io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace chasekit;

namespace {

const char* kSchema = R"(
  relation p/2
  relation r/1
  relation s/2 set
  relation t/3 set
  relation u/2
  key s(1)
  key t(1,2)
)";

Term V(const char* n) { return Term::var(n); }
Term I(long long v) { return Term::integer(v); }

} // namespace

TEST_CASE("schema of the motivating example") {
    Schema s = parseSchema(kSchema);
    CHECK(s.order == std::vector<std::string>{"p", "r", "s", "t", "u"});
    CHECK(s.at("t").arity == 3);
    CHECK(s.isSetEnforced("s"));
    CHECK(s.isSetEnforced("t"));
    CHECK_FALSE(s.isSetEnforced("r"));
    CHECK_FALSE(s.isSetEnforced("u"));
    CHECK(s.fds.size() == 2);
}

TEST_CASE("schema errors carry positions") {
    CHECK_THROWS_AS(parseSchema("relation a/0;"), ParseError);
    try {
        parseSchema("relation s/2\nkey s(3);");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.span().line == 2);
    }
    CHECK_THROWS_AS(parseSchema("relation p/2 relation p/3"), ParseError);
}

TEST_CASE("parse a query") {
    Schema s = parseSchema(kSchema);
    Query q = parseQuery("Q4(X) :- p(X,Y).", s);
    CHECK(q.head.relation == "Q4");
    CHECK(q.head.args == std::vector<Term>{V("X")});
    REQUIRE(q.body.size() == 1);
    CHECK(q.body[0] == Atom{"p", {V("X"), V("Y")}});
    Query c = parseQuery("Q(X) :- p(X, 3), r(\"a b\").", s);
    CHECK(c.body[0].args[1] == I(3));
    CHECK(c.body[1].args[0] == Term::string("a b"));
}

TEST_CASE("query errors") {
    Schema s = parseSchema(kSchema);
    CHECK_THROWS(parseQuery("Q(X) :- .", s));
    CHECK_THROWS(parseQuery("Q(Z) :- p(X,Y).", s));
    CHECK_THROWS(parseQuery("Q(X) :- p(X).", s));
    CHECK_THROWS(parseQuery("Q(X) :- nope(X).", s));
    try {
        parseQuery("Q(X) :- p(X,Y) p(X,Y).", s);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.span().column > 1);
    }
}

TEST_CASE("parse dependencies") {
    Schema s = parseSchema(kSchema);
    Dependency d = parseDependency("sigma2: p(X,Y) -> exists W : t(X,Y,W).", s);
    CHECK(d.id == "sigma2");
    CHECK(d.isTgd());
    CHECK(d.existentials == std::vector<Term>{V("W")});
    CHECK(d.conclusion[0] == Atom{"t", {V("X"), V("Y"), V("W")}});
    Dependency e = parseDependency("t(X,Y,W1) & t(X,Y,W2) -> W1 = W2.", s);
    CHECK(e.isEgd());
    CHECK(e.id == "d1");
    CHECK(e.left == V("W1"));
    CHECK(e.right == V("W2"));
    CHECK_THROWS(parseDependency("p(X,Y) -> u(X,Z).", s));
    CHECK_THROWS(parseDependency("p(X,Y) -> X = Z.", s));
    auto all = parseDependencies("a: p(X,Y) -> r(X). b: s(X,Y) & s(X,Z) -> Y = Z.", s);
    CHECK(all.size() == 2);
}

TEST_CASE("parse databases") {
    Schema s = parseSchema(kSchema);
    BagDatabase d = parseDatabase("P {(1,2);} U {(1,5);(1,6);}", s);
    CHECK(d.multiplicity("p", {I(1), I(2)}) == 1);
    CHECK(d.multiplicity("u", {I(1), I(5)}) == 1);
    CHECK(d.multiplicity("u", {I(1), I(6)}) == 1);
    CHECK(d.distinctTuples() == 3);
    BagDatabase e = parseDatabase("r { }", s);
    CHECK(e.totalTuples() == 0);
    BagDatabase dup = parseDatabase("S {(1,3);(1,3);}", s);
    CHECK(dup.multiplicity("s", {I(1), I(3)}) == 2);
    BagDatabase star = parseDatabase("r { (1) * 5 }", s);
    CHECK(star.multiplicity("r", {I(1)}) == 5);
    CHECK_THROWS(parseDatabase("p { (1) }", s));
}

TEST_CASE("printing round-trips") {
    Schema s = parseSchema(kSchema);
    Query q = parseQuery("Q4(X) :- p(X,Y).", s);
    CHECK(printQuery(q) == "Q4(X) :- p(X,Y).");
    CHECK(parseQuery(printQuery(q), s) == q);

    Dependency d = parseDependency("sigma4: p(X,Y) -> exists Z,W : u(X,Z) & t(X,Y,W).", s);
    std::string text = printDependency(d);
    CHECK(text.find("exists Z,W") != std::string::npos);
    CHECK(parseDependency(text, s) == d);

    BagDatabase db;
    db.add("s", {I(1), I(3)}, 2);
    std::string dbText = printDatabase(db, &s);
    CHECK(dbText == "s { (1,3); (1,3); }\n");
    CHECK(parseDatabase(dbText, s) == db);

    Schema back = parseSchema(printSchema(s));
    CHECK(back == s);
}

TEST_CASE("fresh variables print as parseable names") {
    Schema s = parseSchema(kSchema);
    Query q{{"Q", {V("X")}}, {{"p", {V("X"), freshVariable("Y")}}, {"r", {V("X")}}}};
    std::string text = printQuery(q);
    CHECK(text.find("_v") == std::string::npos);
    CHECK(oracle::isomorphic(parseQuery(text, s), q));
}

TEST_CASE("aggregate queries") {
    Schema s = parseSchema(kSchema);
    AggregateQuery a = parseAggregateQuery("S(X, sum(Y)) :- p(X,Y).", s);
    CHECK(a.fn == AggFn::Sum);
    CHECK(a.grouping == std::vector<Term>{V("X")});
    CHECK(a.aggArg == V("Y"));
    CHECK(parseAggregateQuery(printAggregateQuery(a), s) == a);
    AggregateQuery c = parseAggregateQuery("C(X, count(*)) :- p(X,Y).", s);
    CHECK_FALSE(c.aggArg.has_value());
    CHECK_THROWS(parseAggregateQuery("S(Y, sum(Y)) :- p(X,Y).", s));
}

TEST_CASE("documents load every section") {
    Document doc = fixture::load("motivating.cqd");
    CHECK(doc.dependencies.size() == 6);
    CHECK(doc.queries.size() == 4);
    CHECK(doc.databases.count("D") == 1);
    CHECK(doc.queryOrder == std::vector<std::string>{"Q1", "Q2", "Q3", "Q4"});
    Document agg = fixture::load("aggregates.cqd");
    CHECK(agg.aggregates.size() == 5);
    CHECK_THROWS_AS(loadDocument(fixture::dataPath("missing.cqd")), Error);
}

TEST_CASE("error formatting") {
    try {
        parseDocument("schema { relation p/2 }\nquery Q { Q(X) :- p(X). }");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        std::string msg = formatError(e, "f.cqd");
        CHECK(msg.rfind("f.cqd:2:", 0) == 0);
    }
}
