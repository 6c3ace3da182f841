#include "chasekit/constraints.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "chasekit/errors.hpp"
#include "chasekit/mappings.hpp"

namespace chasekit {

std::set<int> fdClosure(const Schema& s, const std::string& rel, std::set<int> attrs) {
    s.at(rel);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const FunctionalDependency& fd : s.fds) {
            if (fd.relation != rel || attrs.count(fd.dependent)) continue;
            if (std::all_of(fd.determinant.begin(), fd.determinant.end(), [&](int p) { return attrs.count(p) > 0; })) {
                attrs.insert(fd.dependent);
                changed = true;
            }
        }
    }
    return attrs;
}

bool isSuperkey(const Schema& s, const std::string& rel, const std::set<int>& attrs) {
    int arity = s.at(rel).arity;
    std::set<int> c = fdClosure(s, rel, attrs);
    for (int p = 1; p <= arity; ++p)
        if (!c.count(p)) return false;
    return true;
}

std::vector<std::set<int>> keys(const Schema& s, const std::string& rel) {
    int arity = s.at(rel).arity;
    std::vector<std::set<int>> supers;
    for (unsigned mask = 1; mask < (1u << arity); ++mask) {
        std::set<int> a;
        for (int p = 0; p < arity; ++p)
            if (mask & (1u << p)) a.insert(p + 1);
        if (isSuperkey(s, rel, a)) supers.push_back(a);
    }
    std::vector<std::set<int>> out;
    for (const auto& k : supers) {
        bool minimal = std::none_of(supers.begin(), supers.end(), [&](const std::set<int>& o) {
            return o.size() < k.size() && std::includes(k.begin(), k.end(), o.begin(), o.end());
        });
        if (minimal) out.push_back(k);
    }
    std::sort(out.begin(), out.end(), [](const std::set<int>& a, const std::set<int>& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return out;
}

Dependency setEnforcingEgd(const Schema& s, const std::string& rel) {
    const RelationInfo& r = s.at(rel);
    if (!r.tupleIdPosition) throw NoTupleId(rel);
    int tid = *r.tupleIdPosition;
    Dependency d;
    d.id = "tid:" + rel;
    d.kind = Dependency::Kind::Egd;
    Atom a{rel, {}}, b{rel, {}};
    static const char* names[] = {"X", "Y", "Z", "A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K"};
    int k = 0;
    for (int p = 1; p <= r.arity; ++p) {
        if (p == tid) {
            a.args.push_back(Term::var("U"));
            b.args.push_back(Term::var("W"));
        } else {
            std::string n = k < 14 ? names[k] : "X" + std::to_string(k);
            ++k;
            a.args.push_back(Term::var(n));
            b.args.push_back(Term::var(n));
        }
    }
    d.premise = {a, b};
    d.left = Term::var("U");
    d.right = Term::var("W");
    return d;
}

std::vector<Dependency> fdEgds(const Schema& s) {
    std::vector<Dependency> out;
    std::map<std::string, int> counter;
    for (const FunctionalDependency& fd : s.fds) {
        int arity = s.at(fd.relation).arity;
        Atom a{fd.relation, {}}, b{fd.relation, {}};
        for (int p = 1; p <= arity; ++p) {
            bool shared = std::find(fd.determinant.begin(), fd.determinant.end(), p) != fd.determinant.end();
            a.args.push_back(Term::var("A" + std::to_string(p)));
            b.args.push_back(Term::var((shared ? "A" : "B") + std::to_string(p)));
        }
        Dependency d;
        d.id = "fd:" + fd.relation + ":" + std::to_string(++counter[fd.relation]);
        d.kind = Dependency::Kind::Egd;
        d.premise = {a, b};
        d.left = Term::var("A" + std::to_string(fd.dependent));
        d.right = Term::var("B" + std::to_string(fd.dependent));
        out.push_back(std::move(d));
    }
    return out;
}

DependencyGraph dependencyGraph(const std::vector<Dependency>& deps, const Schema& s) {
    DependencyGraph g;
    for (const std::string& r : s.order)
        for (int p = 1; p <= s.at(r).arity; ++p) g.nodes.emplace_back(r, p);
    for (const Dependency& d : deps) {
        if (!d.isTgd()) continue;
        std::set<Term> ex(d.existentials.begin(), d.existentials.end());
        std::vector<Position> existentialPositions;
        for (const Atom& c : d.conclusion)
            for (std::size_t p = 0; p < c.args.size(); ++p)
                if (ex.count(c.args[p])) existentialPositions.emplace_back(c.relation, static_cast<int>(p) + 1);
        for (const Atom& a : d.premise) {
            for (std::size_t p = 0; p < a.args.size(); ++p) {
                const Term& x = a.args[p];
                if (!x.isVariable()) continue;
                Position from{a.relation, static_cast<int>(p) + 1};
                bool propagated = false;
                for (const Atom& c : d.conclusion)
                    for (std::size_t q = 0; q < c.args.size(); ++q)
                        if (c.args[q] == x) {
                            propagated = true;
                            g.edges.push_back({from, {c.relation, static_cast<int>(q) + 1}, false, d.id});
                        }
                if (!propagated) continue;
                for (const Position& to : existentialPositions) g.edges.push_back({from, to, true, d.id});
            }
        }
    }
    return g;
}

std::vector<DependencyGraph::Edge> cyclicSpecialEdges(const std::vector<Dependency>& deps, const Schema& s) {
    DependencyGraph g = dependencyGraph(deps, s);
    std::map<Position, std::vector<Position>> adj;
    for (const auto& e : g.edges) adj[e.from].push_back(e.to);
    auto reaches = [&](const Position& from, const Position& target) {
        std::set<Position> seen{from};
        std::vector<Position> stack{from};
        while (!stack.empty()) {
            Position p = stack.back();
            stack.pop_back();
            if (p == target) return true;
            for (const Position& n : adj[p])
                if (seen.insert(n).second) stack.push_back(n);
        }
        return false;
    };
    // a special edge u->v lies on a cycle iff v reaches u
    std::vector<DependencyGraph::Edge> out;
    for (const auto& e : g.edges)
        if (e.special && reaches(e.to, e.from)) out.push_back(e);
    return out;
}

bool isWeaklyAcyclic(const std::vector<Dependency>& deps, const Schema& s) { return cyclicSpecialEdges(deps, s).empty(); }

std::vector<Dependency> regularize(const Dependency& d) {
    if (!d.isTgd() || d.conclusion.size() <= 1) return {d};
    std::size_t n = d.conclusion.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::set<Term> ex(d.existentials.begin(), d.existentials.end());
    std::map<Term, std::size_t> firstSeen;
    for (std::size_t i = 0; i < n; ++i)
        for (const Term& t : d.conclusion[i].args) {
            if (!ex.count(t)) continue;
            auto [it, fresh] = firstSeen.emplace(t, i);
            if (!fresh) parent[find(i)] = find(it->second);
        }
    std::vector<std::size_t> roots;
    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = find(i);
        if (!members.count(r)) roots.push_back(r);
        members[r].push_back(i);
    }
    if (roots.size() == 1) return {d};
    std::vector<Dependency> out;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        Dependency part;
        part.id = d.id + "." + std::to_string(k + 1);
        part.origin = d.originId();
        part.kind = Dependency::Kind::Tgd;
        part.premise = d.premise;
        std::set<Term> used;
        for (std::size_t i : members[roots[k]]) {
            part.conclusion.push_back(d.conclusion[i]);
            for (const Term& t : d.conclusion[i].args) used.insert(t);
        }
        for (const Term& z : d.existentials)
            if (used.count(z)) part.existentials.push_back(z);
        out.push_back(std::move(part));
    }
    return out;
}

std::vector<Dependency> regularizeSet(const std::vector<Dependency>& deps) {
    std::vector<Dependency> out;
    for (const Dependency& d : deps)
        for (Dependency& r : regularize(d)) out.push_back(std::move(r));
    return out;
}

bool sameDependencyShape(const Dependency& a, const Dependency& b) {
    if (a.kind != b.kind || a.premise.size() != b.premise.size()) return false;
    // encode as queries and test isomorphism with the equated terms / conclusion in the head
    auto asQuery = [](const Dependency& d) {
        Query q;
        q.head.relation = "_dep";
        q.body = d.premise;
        if (d.isEgd()) {
            q.head.args = {d.left, d.right};
        } else {
            for (const Atom& c : d.conclusion) {
                Atom marked = c;
                marked.relation = "_concl_" + c.relation;
                q.body.push_back(marked);
            }
        }
        return q;
    };
    Query qa = asQuery(a), qb = asQuery(b);
    if (qa.head.args.size() != qb.head.args.size()) return false;
    if (isomorphic(qa, qb)) return true;
    if (a.isEgd()) {
        std::swap(qb.head.args[0], qb.head.args[1]);
        return isomorphic(qa, qb);
    }
    return false;
}

} // namespace chasekit
