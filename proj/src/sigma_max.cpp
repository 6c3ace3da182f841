#include "chasekit/sigma_max.hpp"

#include <map>
#include <optional>

#include "chasekit/text_io.hpp"

namespace chasekit {

std::string_view removalReasonName(RemovalReason r) {
    switch (r) {
    case RemovalReason::UnsoundTgd: return "unsound-tgd";
    case RemovalReason::NotSetValued: return "not-set-valued";
    case RemovalReason::NotAssignmentFixing: return "not-assignment-fixing";
    }
    return "?";
}

SigmaMaxReport maxSigmaSubset(Semantics sem, const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                              ChaseBudget budget) {
    if (sem == Semantics::Set) throw ValidationError("the maximal subset is defined for bag and bag-set semantics");
    ChaseEngine engine(s, deps, budget);
    ChaseOutcome o = engine.soundChase(sem, q);
    SigmaMaxReport r;
    r.semantics = sem;
    r.chaseResult = o.result;

    // a dependency is dropped when any of its regularized parts is
    std::map<std::string, std::optional<RemovalReason>> byOrigin;
    for (const Dependency& part : o.dependencies) {
        if (o.ledger.at(part.id) != DependencyState::UnsoundlyApplicable) continue;
        RemovalReason why = o.unsoundReason.at(part.id) == UnsoundReason::NotSetValued
                                ? RemovalReason::NotSetValued
                                : RemovalReason::NotAssignmentFixing;
        r.removedParts.emplace_back(part.id, why);
        auto [it, fresh] = byOrigin.emplace(part.originId(), why);
        if (!fresh && it->second != why) it->second = RemovalReason::UnsoundTgd;
    }
    for (const Dependency& d : deps) {
        auto it = byOrigin.find(d.id);
        if (it == byOrigin.end()) {
            r.kept.push_back(d.id);
            r.keptDependencies.push_back(d);
        } else {
            r.removed.emplace_back(d.id, *it->second);
        }
    }
    return r;
}

SigmaMaxReport maxBagSigmaSubset(const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                                 ChaseBudget budget) {
    return maxSigmaSubset(Semantics::Bag, q, deps, s, budget);
}

SigmaMaxReport maxBagSetSigmaSubset(const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                                    ChaseBudget budget) {
    return maxSigmaSubset(Semantics::BagSet, q, deps, s, budget);
}

std::string printSigmaMaxMachine(const SigmaMaxReport& r) {
    std::string out;
    for (const std::string& id : r.kept) out += "keep " + id + "\n";
    for (const auto& [id, why] : r.removed) out += "drop " + id + " " + std::string(removalReasonName(why)) + "\n";
    return out;
}

std::string printSigmaMaxText(const SigmaMaxReport& r) {
    std::string out = "semantics: " + std::string(semanticsName(r.semantics)) + "\n";
    out += "chase result: " + printQuery(r.chaseResult) + "\n";
    out += "kept:";
    for (const std::string& id : r.kept) out += " " + id;
    out += "\nremoved:";
    if (r.removed.empty()) out += " (none)";
    out += "\n";
    for (const auto& [id, why] : r.removed) {
        out += "  " + id + " (" + std::string(removalReasonName(why));
        bool first = true;
        for (const auto& [part, pw] : r.removedParts) {
            if (part.rfind(id + ".", 0) != 0) continue;
            out += first ? "; parts " : ", ";
            out += part;
            first = false;
        }
        out += ")\n";
    }
    return out;
}

} // namespace chasekit
