#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chasekit/chase.hpp"
#include "chasekit/evaluator.hpp"

namespace chasekit {

struct EquivVerdict {
    bool equivalent = false;
    std::string semantics;                        // "S", "B", "BS" or "AGG"
    std::optional<std::pair<Query, Query>> chaseResults;
    std::optional<BagDatabase> counterexample;    // attached by the caller after a search
    std::string answerDiff;                       // rendered answers on the counterexample
};

EquivVerdict equivSetUnderSigma(const Query& q1, const Query& q2, const std::vector<Dependency>& deps,
                                const Schema& s, ChaseBudget budget = {});
EquivVerdict equivBagUnderSigma(const Query& q1, const Query& q2, const std::vector<Dependency>& deps,
                                const Schema& s, ChaseBudget budget = {});
EquivVerdict equivBagSetUnderSigma(const Query& q1, const Query& q2, const std::vector<Dependency>& deps,
                                   const Schema& s, ChaseBudget budget = {});
EquivVerdict equivUnderSigma(Semantics sem, const Query& q1, const Query& q2, const std::vector<Dependency>& deps,
                             const Schema& s, ChaseBudget budget = {});
// same engine, so the assignment-fixing memo is shared across calls
EquivVerdict equivUnderSigma(Semantics sem, const Query& q1, const Query& q2, ChaseEngine& engine);

// Throws IncompatibleAggregates when functions or head shapes differ.
void checkCompatible(const AggregateQuery& a1, const AggregateQuery& a2);
EquivVerdict equivAggregateUnderSigma(const AggregateQuery& a1, const AggregateQuery& a2,
                                      const std::vector<Dependency>& deps, const Schema& s, ChaseBudget budget = {});

// answers differ on d under sem (bag-set needs a set-valued d)
bool answersDiffer(const Query& q1, const Query& q2, Semantics sem, const BagDatabase& d);
std::string renderAnswers(const Query& q1, const Query& q2, Semantics sem, const BagDatabase& d);
bool aggregateAnswersDiffer(const AggregateQuery& a1, const AggregateQuery& a2, const BagDatabase& d);

struct SearchBounds {
    int domainSize = 3;
    int maxMult = 2;              // used under bag semantics only
    std::uint64_t cap = 2'000'000; // exhaustive phase stops before exceeding this many candidates
    bool seeds = true;
};

struct SearchResult {
    std::optional<BagDatabase> witness;
    bool complete = false; // every database within the bounds was examined
    std::uint64_t examined = 0;
};

// Seeds from canonical databases of chase results and test queries, then all databases
// by increasing tuple count. Set and bag-set semantics use set-valued databases.
SearchResult searchCounterexample(const Query& q1, const Query& q2, Semantics sem,
                                  const std::vector<Dependency>& deps, const Schema& s, const SearchBounds& b = {},
                                  ChaseBudget budget = {});
SearchResult searchAggregateCounterexample(const AggregateQuery& a1, const AggregateQuery& a2,
                                           const std::vector<Dependency>& deps, const Schema& s,
                                           const SearchBounds& b = {}, ChaseBudget budget = {});

struct BagCounterexample {
    BagDatabase db;
    std::string relation; // the replicated relation
    long long mStar = 0;
    long long n1 = 0, n2 = 0, n3 = 0, n4 = 0;
    bool swapped = false; // q2 is the side with more atoms over `relation`
};

// Bag-set equivalent queries whose atom counts differ on a relation that is not set
// enforced. Throws HypothesesNotMet otherwise.
BagCounterexample buildBagCounterexample(const Query& q1, const Query& q2, const Schema& s);

std::string printVerdictMachine(const EquivVerdict& v, const std::string& witnessFile = {});

} // namespace chasekit
