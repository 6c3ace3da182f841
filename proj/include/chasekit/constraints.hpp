#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chasekit/model.hpp"

namespace chasekit {

using Position = std::pair<std::string, int>; // (relation, 1-based attribute)

struct DependencyGraph {
    struct Edge {
        Position from, to;
        bool special = false;
        std::string dependencyId;
    };
    std::vector<Position> nodes;
    std::vector<Edge> edges;
};

std::set<int> fdClosure(const Schema& s, const std::string& rel, std::set<int> attrs);
bool isSuperkey(const Schema& s, const std::string& rel, const std::set<int>& attrs);
std::vector<std::set<int>> keys(const Schema& s, const std::string& rel); // minimal superkeys, by size then lexicographic

// t(X1..Xk,U) & t(X1..Xk,W) -> U = W, with the tuple id at its declared position
Dependency setEnforcingEgd(const Schema& s, const std::string& rel);

// egds equivalent to the schema's declared fds, ids "fd:<rel>:<n>"
std::vector<Dependency> fdEgds(const Schema& s);

DependencyGraph dependencyGraph(const std::vector<Dependency>& deps, const Schema& s);
bool isWeaklyAcyclic(const std::vector<Dependency>& deps, const Schema& s);
// special edges that lie on some cycle; empty iff weakly acyclic
std::vector<DependencyGraph::Edge> cyclicSpecialEdges(const std::vector<Dependency>& deps, const Schema& s);

std::vector<Dependency> regularize(const Dependency& d);
std::vector<Dependency> regularizeSet(const std::vector<Dependency>& deps);

// same premise, conclusion and equated terms up to variable renaming
bool sameDependencyShape(const Dependency& a, const Dependency& b);

} // namespace chasekit
