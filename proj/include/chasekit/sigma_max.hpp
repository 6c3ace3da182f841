#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chasekit/chase.hpp"

namespace chasekit {

enum class RemovalReason { UnsoundTgd, NotSetValued, NotAssignmentFixing };

std::string_view removalReasonName(RemovalReason r);

struct SigmaMaxReport {
    Semantics semantics = Semantics::Bag;
    std::vector<std::string> kept;                              // original ids, input order
    std::vector<std::pair<std::string, RemovalReason>> removed; // original ids, input order
    std::vector<std::pair<std::string, RemovalReason>> removedParts; // regularized ids
    Query chaseResult;
    // the kept dependencies, not regularized
    std::vector<Dependency> keptDependencies;
};

SigmaMaxReport maxBagSigmaSubset(const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                                 ChaseBudget budget = {});
SigmaMaxReport maxBagSetSigmaSubset(const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                                    ChaseBudget budget = {});
// sem must be Bag or BagSet
SigmaMaxReport maxSigmaSubset(Semantics sem, const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                              ChaseBudget budget = {});

// `keep <id>` / `drop <id> <reason>` lines
std::string printSigmaMaxMachine(const SigmaMaxReport& r);
std::string printSigmaMaxText(const SigmaMaxReport& r);

} // namespace chasekit
