#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace chasekit {

enum class Semantics { Set, Bag, BagSet };

std::string_view semanticsName(Semantics s); // "S", "B", "BS"
std::optional<Semantics> semanticsFromName(std::string_view s);

// Variables are named; constants are integers or strings and compare by value.
struct Term {
    enum class Kind : std::uint8_t { Variable, Integer, String };

    Kind kind = Kind::Variable;
    std::string text;     // variable name, or string constant contents
    long long number = 0; // integer constants only

    static Term var(std::string name);
    static Term integer(long long v);
    static Term string(std::string s);

    bool isVariable() const { return kind == Kind::Variable; }
    bool isConstant() const { return kind != Kind::Variable; }
    // internally generated variable (reserved `_v` prefix)
    bool isFresh() const;

    auto operator<=>(const Term&) const = default;
    bool operator==(const Term&) const = default;
};

struct Atom {
    std::string relation;
    std::vector<Term> args;

    auto operator<=>(const Atom&) const = default;
    bool operator==(const Atom&) const = default;
};

// head.relation is the answer predicate; it never names a stored relation
struct Query {
    Atom head;
    std::vector<Atom> body;

    auto operator<=>(const Query&) const = default;
    bool operator==(const Query&) const = default;
};

enum class AggFn { Sum, Count, Max, Min };

std::string_view aggFnName(AggFn f);
std::optional<AggFn> aggFnFromName(std::string_view s);

// Q(S, fn(Y)) :- body. The core is the plain query with head S (+ Y).
// count(*) and count(Y) share this representation; aggArg is empty for the former.
struct AggregateQuery {
    std::vector<Term> grouping;
    AggFn fn = AggFn::Count;
    std::optional<Term> aggArg;
    Query core;

    bool operator==(const AggregateQuery&) const = default;
};

struct Dependency {
    enum class Kind { Tgd, Egd };

    std::string id;
    Kind kind = Kind::Tgd;
    std::vector<Atom> premise;
    std::vector<Atom> conclusion;  // tgd
    std::vector<Term> existentials; // tgd
    Term left, right;               // egd
    std::string origin;             // id of the dependency this was split from, if any

    bool isTgd() const { return kind == Kind::Tgd; }
    bool isEgd() const { return kind == Kind::Egd; }
    const std::string& originId() const { return origin.empty() ? id : origin; }
    bool isFull() const { return isTgd() && existentials.empty(); }

    bool operator==(const Dependency&) const = default;
};

struct RelationInfo {
    int arity = 0;
    bool setEnforced = false;
    std::optional<int> tupleIdPosition; // 1-based

    bool operator==(const RelationInfo&) const = default;
};

// determinant -> dependent, positions 1-based
struct FunctionalDependency {
    std::string relation;
    std::vector<int> determinant;
    int dependent = 0;

    bool operator==(const FunctionalDependency&) const = default;
};

struct Schema {
    std::vector<std::string> order; // declaration order
    std::map<std::string, RelationInfo> relations;
    std::vector<FunctionalDependency> fds;

    // throws ValidationError on duplicates or bad positions
    void addRelation(const std::string& name, int arity, bool setEnforced = false,
                     std::optional<int> tupleId = std::nullopt);
    void addFd(FunctionalDependency fd);
    void addKey(const std::string& rel, const std::vector<int>& positions);

    const RelationInfo* find(std::string_view name) const;
    const RelationInfo& at(std::string_view name) const; // throws UnknownRelation
    bool isSetEnforced(std::string_view name) const;

    bool operator==(const Schema&) const = default;
};

using Tuple = std::vector<Term>;

struct BagDatabase {
    std::map<std::string, std::map<Tuple, long long>> relations;

    void add(const std::string& rel, Tuple t, long long mult = 1);
    long long multiplicity(const std::string& rel, const Tuple& t) const;
    bool isSetValued() const;
    bool isSetValued(const std::string& rel) const;
    long long totalTuples() const; // counts duplicates
    std::size_t distinctTuples() const;
    std::set<Term> constants() const;
    const std::map<Tuple, long long>* find(const std::string& rel) const;

    bool operator==(const BagDatabase&) const = default;
};

using Substitution = std::map<Term, Term>;

Term freshVariable(std::string_view hint = {});

Term substitute(const Substitution& s, const Term& t);
Atom substitute(const Substitution& s, const Atom& a);
std::vector<Atom> substitute(const Substitution& s, const std::vector<Atom>& atoms);
Query substitute(const Substitution& s, const Query& q);

// variables in order of first occurrence
std::vector<Term> variablesOf(const std::vector<Atom>& atoms);
std::vector<Term> variablesOf(const Atom& a);
std::vector<Term> variablesOf(const Query& q); // body first, then head extras

Query canonicalRepresentation(const Query& q);
Query dedupSetEnforced(const Query& q, const Schema& s);

bool isSafe(const Query& q);

// Structural checks against the schema. Throw ValidationError.
void validateQuery(const Query& q, const Schema& s);
void validateDependency(const Dependency& d, const Schema& s);
void validateAggregate(const AggregateQuery& a, const Schema& s);
void validateDatabase(const BagDatabase& d, const Schema& s);

// Builds the core query from grouping and aggregated argument.
AggregateQuery makeAggregate(std::string name, std::vector<Term> grouping, AggFn fn,
                             std::optional<Term> aggArg, std::vector<Atom> body);

} // namespace chasekit
