#pragma once

// Reference implementations used only by the tests. They share no code with the
// library beyond the data model, and favour obviousness over speed.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "chasekit/model.hpp"

namespace oracle {

using chasekit::Atom;
using chasekit::BagDatabase;
using chasekit::Query;
using chasekit::Term;
using chasekit::Tuple;

using Bag = std::map<Tuple, long long>;

inline std::vector<Term> vars(const Query& q) {
    std::vector<Term> out;
    auto add = [&](const Term& t) {
        if (t.isVariable() && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    };
    for (const Atom& a : q.body)
        for (const Term& t : a.args) add(t);
    for (const Term& t : q.head.args) add(t);
    return out;
}

inline std::vector<Term> activeDomain(const BagDatabase& d, const Query& q) {
    std::set<Term> dom;
    for (const auto& [rel, tuples] : d.relations)
        for (const auto& [t, m] : tuples)
            if (m > 0) dom.insert(t.begin(), t.end());
    for (const Atom& a : q.body)
        for (const Term& t : a.args)
            if (t.isConstant()) dom.insert(t);
    return {dom.begin(), dom.end()};
}

inline long long mult(const BagDatabase& d, const std::string& rel, const Tuple& t) {
    auto r = d.relations.find(rel);
    if (r == d.relations.end()) return 0;
    auto it = r->second.find(t);
    return it == r->second.end() ? 0 : it->second;
}

// Every total assignment of the query variables over the active domain; the weight of an
// assignment is the product of the multiplicities of the body atoms (each occurrence counts).
inline void assignments(const Query& q, const BagDatabase& d,
                        const std::function<void(const std::map<Term, Term>&, long long)>& visit) {
    std::vector<Term> vs = vars(q);
    std::vector<Term> dom = activeDomain(d, q);
    if (dom.empty() && !vs.empty()) return;
    std::vector<std::size_t> idx(vs.size(), 0);
    for (;;) {
        std::map<Term, Term> a;
        for (std::size_t i = 0; i < vs.size(); ++i) a[vs[i]] = dom[idx[i]];
        long long w = 1;
        for (const Atom& at : q.body) {
            Tuple t;
            for (const Term& x : at.args) t.push_back(x.isVariable() ? a[x] : x);
            w *= mult(d, at.relation, t);
            if (w == 0) break;
        }
        if (w > 0) visit(a, w);
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == dom.size()) idx[i++] = 0;
        if (i == idx.size()) break;
    }
}

inline Tuple headOf(const Query& q, const std::map<Term, Term>& a) {
    Tuple t;
    for (const Term& x : q.head.args) t.push_back(x.isVariable() ? a.at(x) : x);
    return t;
}

inline Bag evalBag(const Query& q, const BagDatabase& d) {
    Bag out;
    assignments(q, d, [&](const std::map<Term, Term>& a, long long w) { out[headOf(q, a)] += w; });
    return out;
}

inline Bag evalBagSet(const Query& q, const BagDatabase& d) {
    Bag out;
    assignments(q, d, [&](const std::map<Term, Term>& a, long long) { out[headOf(q, a)] += 1; });
    return out;
}

inline std::set<Tuple> evalSet(const Query& q, const BagDatabase& d) {
    std::set<Tuple> out;
    assignments(q, d, [&](const std::map<Term, Term>& a, long long) { out.insert(headOf(q, a)); });
    return out;
}

// Is there a map of the variables of `src` onto terms of `dst` that sends every src atom
// into dst and agrees with `fixed`? Backtracking over all candidate images per variable.
inline bool homomorphismExists(const std::vector<Atom>& src, const std::vector<Atom>& dst,
                               const std::map<Term, Term>& fixed = {}) {
    std::vector<Term> vs;
    for (const Atom& a : src)
        for (const Term& t : a.args)
            if (t.isVariable() && !fixed.count(t) && std::find(vs.begin(), vs.end(), t) == vs.end()) vs.push_back(t);
    std::set<Term> targetSet;
    for (const Atom& a : dst) targetSet.insert(a.args.begin(), a.args.end());
    std::set<Atom> dstSet(dst.begin(), dst.end());
    std::map<Term, Term> m = fixed;
    auto bad = [&]() {
        for (const Atom& a : src) {
            Atom img{a.relation, {}};
            bool complete = true;
            for (const Term& t : a.args) {
                if (t.isConstant()) img.args.push_back(t);
                else if (m.count(t)) img.args.push_back(m[t]);
                else complete = false;
            }
            if (complete && !dstSet.count(img)) return true;
        }
        return false;
    };
    std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
        if (bad()) return false;
        if (i == vs.size()) return true;
        for (const Term& t : targetSet) {
            m[vs[i]] = t;
            if (go(i + 1)) return true;
        }
        m.erase(vs[i]);
        return false;
    };
    return go(0);
}

// Query-level containment mapping from `from` onto `to` (head to head).
inline bool containment(const Query& from, const Query& to) {
    if (from.head.args.size() != to.head.args.size()) return false;
    std::map<Term, Term> fixed;
    for (std::size_t i = 0; i < from.head.args.size(); ++i) {
        const Term& a = from.head.args[i];
        const Term& b = to.head.args[i];
        if (a.isConstant()) {
            if (a != b) return false;
            continue;
        }
        auto [it, fresh] = fixed.emplace(a, b);
        if (!fresh && it->second != b) return false;
    }
    return homomorphismExists(from.body, to.body, fixed);
}

// Bijection of variables making bodies equal as multisets and heads equal. Plain
// backtracking; an atom is checked as soon as all of its variables are assigned.
inline bool isomorphic(const Query& a, const Query& b) {
    if (a.body.size() != b.body.size() || a.head.args.size() != b.head.args.size()) return false;
    std::vector<Term> va = vars(a), vb = vars(b);
    if (va.size() != vb.size()) return false;
    std::multiset<Atom> bodyB(b.body.begin(), b.body.end());
    std::map<Term, Term> m;
    std::set<Term> used;
    auto img = [&](const Atom& x) {
        Atom y{x.relation, {}};
        for (const Term& t : x.args) y.args.push_back(t.isVariable() ? m.at(t) : t);
        return y;
    };
    auto ready = [&](const Atom& x) {
        return std::all_of(x.args.begin(), x.args.end(), [&](const Term& t) { return t.isConstant() || m.count(t); });
    };
    std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
        for (const Atom& x : a.body)
            if (ready(x) && !bodyB.count(img(x))) return false;
        if (i == va.size()) {
            if (img(a.head).args != b.head.args) return false;
            std::multiset<Atom> bodyA;
            for (const Atom& x : a.body) bodyA.insert(img(x));
            return bodyA == bodyB;
        }
        for (const Term& t : vb) {
            if (used.count(t)) continue;
            m[va[i]] = t;
            used.insert(t);
            if (go(i + 1)) return true;
            used.erase(t);
            m.erase(va[i]);
        }
        return false;
    };
    return go(0);
}

inline Query dedup(const Query& q) {
    Query out = q;
    out.body.clear();
    std::set<Atom> seen;
    for (const Atom& a : q.body)
        if (seen.insert(a).second) out.body.push_back(a);
    return out;
}

// Smallest sub-body onto which q retracts, by trying subsets in increasing size.
inline Query core(const Query& q) {
    Query d = dedup(q);
    std::size_t n = d.body.size();
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<bool> pick(n, false);
        std::fill(pick.end() - static_cast<long>(k), pick.end(), true);
        do {
            Query sub = d;
            sub.body.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (pick[i]) sub.body.push_back(d.body[i]);
            std::set<Term> bodyTerms;
            for (const Atom& a : sub.body) bodyTerms.insert(a.args.begin(), a.args.end());
            bool safe = std::all_of(sub.head.args.begin(), sub.head.args.end(),
                                    [&](const Term& t) { return t.isConstant() || bodyTerms.count(t); });
            if (safe && containment(d, sub)) return sub;
        } while (std::next_permutation(pick.begin(), pick.end()));
    }
    return d;
}

// ---- random instances ----

struct RandomSchema {
    std::vector<std::pair<std::string, int>> relations; // name, arity
    std::vector<bool> setEnforced;
};

inline Term v(int i) { return Term::var("V" + std::to_string(i)); }

inline Atom randomAtom(std::mt19937& rng, const RandomSchema& s, int varPool) {
    std::uniform_int_distribution<std::size_t> rel(0, s.relations.size() - 1);
    std::uniform_int_distribution<int> var(0, varPool - 1);
    const auto& [name, arity] = s.relations[rel(rng)];
    Atom a{name, {}};
    for (int i = 0; i < arity; ++i) a.args.push_back(v(var(rng)));
    return a;
}

inline Query randomQuery(std::mt19937& rng, const RandomSchema& s, int maxAtoms, int varPool) {
    std::uniform_int_distribution<int> n(1, maxAtoms);
    Query q;
    q.head.relation = "Q";
    int k = n(rng);
    for (int i = 0; i < k; ++i) q.body.push_back(randomAtom(rng, s, varPool));
    std::vector<Term> vs = vars(q);
    std::shuffle(vs.begin(), vs.end(), rng);
    std::uniform_int_distribution<std::size_t> h(0, std::min<std::size_t>(2, vs.size()));
    q.head.args.assign(vs.begin(), vs.begin() + static_cast<long>(h(rng)));
    return q;
}

} // namespace oracle

#include "chasekit/constraints.hpp"

namespace oracle {

struct Instance {
    chasekit::Schema schema;
    std::vector<chasekit::Dependency> deps;
    Query query;
};

// At most 3 relations of arity <= 3, at most 4 dependencies, a query of at most 4 atoms.
// Redraws until the dependencies are weakly acyclic.
inline Instance randomInstance(std::mt19937& rng) {
    using chasekit::Dependency;
    std::uniform_int_distribution<int> nrel(1, 3), ar(1, 3), coin(0, 1), ndep(1, 4), two(1, 2);
    for (;;) {
        Instance in;
        RandomSchema rs;
        int k = nrel(rng);
        for (int i = 0; i < k; ++i) {
            std::string name = std::string(1, static_cast<char>('a' + i));
            int a = ar(rng);
            bool set = coin(rng) == 1;
            rs.relations.emplace_back(name, a);
            rs.setEnforced.push_back(set);
            in.schema.addRelation(name, a, set);
        }
        int nd = ndep(rng);
        for (int i = 0; i < nd; ++i) {
            Dependency d;
            d.id = "d" + std::to_string(i + 1);
            int np = two(rng);
            for (int j = 0; j < np; ++j) d.premise.push_back(randomAtom(rng, rs, 3));
            std::vector<Term> pv;
            for (const Atom& a : d.premise)
                for (const Term& t : a.args)
                    if (std::find(pv.begin(), pv.end(), t) == pv.end()) pv.push_back(t);
            if (coin(rng) == 0 && pv.size() >= 2) {
                d.kind = Dependency::Kind::Egd;
                std::shuffle(pv.begin(), pv.end(), rng);
                d.left = pv[0];
                d.right = pv[1];
            } else {
                d.kind = Dependency::Kind::Tgd;
                int nc = two(rng);
                std::uniform_int_distribution<int> pick(0, static_cast<int>(pv.size()) + 1);
                for (int j = 0; j < nc; ++j) {
                    Atom c = randomAtom(rng, rs, 1);
                    for (Term& t : c.args) {
                        int p = pick(rng);
                        t = p < static_cast<int>(pv.size()) ? pv[static_cast<std::size_t>(p)]
                                                            : Term::var("E" + std::to_string(p - pv.size()));
                    }
                    d.conclusion.push_back(c);
                }
                for (const Atom& c : d.conclusion)
                    for (const Term& t : c.args)
                        if (std::find(pv.begin(), pv.end(), t) == pv.end() &&
                            std::find(d.existentials.begin(), d.existentials.end(), t) == d.existentials.end())
                            d.existentials.push_back(t);
            }
            in.deps.push_back(std::move(d));
        }
        if (!chasekit::isWeaklyAcyclic(in.deps, in.schema)) continue;
        in.query = randomQuery(rng, rs, 4, 4);
        return in;
    }
}

// Every database over constants 1..domain with at most `maxTuples` distinct tuples and
// multiplicities up to maxMult (1 on set-enforced relations).
inline void smallDatabases(const chasekit::Schema& s, int domain, int maxMult, int maxTuples,
                           const std::function<void(const BagDatabase&)>& visit) {
    struct Slot {
        std::string rel;
        Tuple t;
        int maxM;
    };
    std::vector<Slot> slots;
    for (const std::string& r : s.order) {
        int a = s.at(r).arity;
        std::vector<int> idx(static_cast<std::size_t>(a), 1);
        for (;;) {
            Tuple t;
            for (int x : idx) t.push_back(Term::integer(x));
            slots.push_back({r, t, s.isSetEnforced(r) ? 1 : maxMult});
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] > domain) idx[i++] = 1;
            if (i == idx.size()) break;
        }
    }
    BagDatabase d;
    std::function<void(std::size_t, int)> rec = [&](std::size_t from, int left) {
        visit(d);
        if (left == 0) return;
        for (std::size_t i = from; i < slots.size(); ++i) {
            for (int m = 1; m <= slots[i].maxM; ++m) {
                d.relations[slots[i].rel][slots[i].t] = m;
                rec(i + 1, left - 1);
            }
            d.relations[slots[i].rel].erase(slots[i].t);
            if (d.relations[slots[i].rel].empty()) d.relations.erase(slots[i].rel);
        }
    };
    rec(0, maxTuples);
}

} // namespace oracle
