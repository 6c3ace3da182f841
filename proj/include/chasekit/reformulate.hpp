#pragma once

#include <cstddef>
#include <vector>

#include "chasekit/chase.hpp"

namespace chasekit {

struct ReformulationOptions {
    unsigned jobs = 1;
    std::size_t maxPlanAtoms = 16; // ResourceBound above this
};

struct ReformulationSet {
    Query input;
    Semantics semantics = Semantics::Set;
    Query universalPlan;
    std::vector<Query> candidates; // every accepted backchase subset, before the minimality filter
    std::vector<Query> outputs;    // minimal, one per isomorphism class, by size then text
};

ReformulationSet candb(Semantics sem, const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                       ChaseBudget budget = {}, const ReformulationOptions& opt = {});
ReformulationSet candbSet(const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                          ChaseBudget budget = {}, const ReformulationOptions& opt = {});
ReformulationSet candbBag(const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                          ChaseBudget budget = {}, const ReformulationOptions& opt = {});
ReformulationSet candbBagSet(const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                             ChaseBudget budget = {}, const ReformulationOptions& opt = {});

struct AggregateReformulationSet {
    AggregateQuery input;
    Semantics coreSemantics = Semantics::Set; // Set for max/min, BagSet for sum/count
    ReformulationSet core;
    std::vector<AggregateQuery> outputs;
};

AggregateReformulationSet candbAggregate(const AggregateQuery& a, const std::vector<Dependency>& deps,
                                         const Schema& s, ChaseBudget budget = {},
                                         const ReformulationOptions& opt = {});

// No variable merge followed by an atom drop stays equivalent under the dependencies.
bool isSigmaMinimal(const Query& q, const std::vector<Dependency>& deps, const Schema& s, Semantics sem,
                    ChaseBudget budget = {});
bool isSigmaMinimal(const Query& q, Semantics sem, ChaseEngine& engine);

} // namespace chasekit
