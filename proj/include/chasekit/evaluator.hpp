#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chasekit/model.hpp"

namespace chasekit {

using AnswerSet = std::set<Tuple>;
using AnswerBag = std::map<Tuple, long long>; // multiplicities >= 1

// Visits every assignment of the variables of `atoms` that maps each atom onto a stored
// tuple (core-sets only). `values[i]` is the value of variablesOf(atoms)[i]; `weight` is
// the product of the multiplicities of the matched tuples. Return false to stop.
using AssignmentVisitor = std::function<bool(const std::vector<Term>& values, long long weight)>;
void forEachAssignment(const std::vector<Atom>& atoms, const BagDatabase& d, const AssignmentVisitor& visit,
                       const Substitution& anchor = {});

AnswerSet evalSet(const Query& q, const BagDatabase& d);
AnswerBag evalBagSet(const Query& q, const BagDatabase& d); // throws NonSetDatabase
AnswerBag evalBag(const Query& q, const BagDatabase& d);

// Set-enforced relations must be duplicate free; then every dependency must hold.
bool satisfies(const BagDatabase& d, const Dependency& dep, const Schema& s);
bool satisfies(const BagDatabase& d, const std::vector<Dependency>& deps, const Schema& s);

// One fresh integer per body variable (first occurrence order, skipping integers the
// query already uses). `freeze` receives the variable -> constant map.
BagDatabase canonicalDatabase(const Query& q, Substitution* freeze = nullptr);

struct EnumerationLimits {
    std::uint64_t cap = 20'000'000;   // ResourceBound above this estimate
    int maxTuples = -1;               // distinct tuples per database, -1 = unbounded
    std::vector<std::string> relations; // restrict to these; empty = whole schema
};

double estimateDatabaseCount(const Schema& s, int domainSize, int maxMult, const EnumerationLimits& lim = {});

// Every database over constants 1..domainSize with multiplicities <= maxMult (1 on
// set-enforced relations) that satisfies `requiredSat`. Returns the number visited.
std::uint64_t enumerateDatabases(const Schema& s, int domainSize, int maxMult,
                                 const std::vector<Dependency>& requiredSat,
                                 const std::function<bool(const BagDatabase&)>& visit,
                                 const EnumerationLimits& lim = {});

// group -> aggregated value, as tuples (grouping values..., value)
std::set<Tuple> evalAggregate(const AggregateQuery& a, const BagDatabase& d);

std::string printAnswerBag(const AnswerBag& b);
std::string printAnswerSet(const std::set<Tuple>& s);

} // namespace chasekit
