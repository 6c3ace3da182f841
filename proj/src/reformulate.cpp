#include "chasekit/reformulate.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include "chasekit/equivalence.hpp"
#include "chasekit/mappings.hpp"
#include "chasekit/text_io.hpp"

namespace chasekit {

namespace {

bool sameUnder(Semantics sem, const Query& a, const Query& b, const Schema& s) {
    switch (sem) {
    case Semantics::Set: return setEquivalent(a, b);
    case Semantics::Bag: return bagEquivalentWithSetRelations(a, b, s);
    case Semantics::BagSet: return bagSetEquivalent(a, b);
    }
    return false;
}

Query withBody(const Query& q, const std::vector<Atom>& body) {
    Query out;
    out.head = q.head;
    out.body = body;
    return out;
}

// set partitions of {0..n-1} as restricted growth strings
bool nextPartition(std::vector<int>& a, std::vector<int>& maxPrefix) {
    int n = static_cast<int>(a.size());
    for (int i = n - 1; i > 0; --i) {
        if (a[i] <= maxPrefix[i - 1]) {
            ++a[i];
            int m = std::max(maxPrefix[i - 1], a[i]);
            maxPrefix[i] = m;
            for (int j = i + 1; j < n; ++j) {
                a[j] = 0;
                maxPrefix[j] = m;
            }
            return true;
        }
    }
    return false;
}

// every nonempty proper subset of `body` (by mask) that keeps the head safe
template <class Visit>
bool forEachDrop(const Query& q, bool singleDrops, Visit visit) {
    std::size_t n = q.body.size();
    if (n < 2) return false;
    if (singleDrops) {
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Atom> body = q.body;
            body.erase(body.begin() + static_cast<std::ptrdiff_t>(i));
            Query c = withBody(q, body);
            if (isSafe(c) && visit(c)) return true;
        }
        return false;
    }
    if (n > 20) throw ResourceBound("too many atoms to enumerate drops: " + std::to_string(n));
    for (unsigned long mask = 1; mask + 1 < (1ul << n); ++mask) {
        std::vector<Atom> body;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1ul << i)) body.push_back(q.body[i]);
        Query c = withBody(q, body);
        if (isSafe(c) && visit(c)) return true;
    }
    return false;
}

} // namespace

bool isSigmaMinimal(const Query& q, Semantics sem, ChaseEngine& engine) {
    std::vector<Term> vars = variablesOf(q);
    Query target = engine.chaseSet(q).result;
    auto equivalentToQ = [&](const Query& c) { return equivUnderSigma(sem, c, q, engine).equivalent; };
    std::set<std::string> tried;
    // S1 ranges over q with variables merged, one merge per set partition; identity first
    auto attempt = [&](const Substitution& merge) {
        Query s1 = substitute(merge, q);
        if (sem == Semantics::Set) s1 = canonicalRepresentation(s1);
        if (!tried.insert(printQuery(s1, PrintOptions{false})).second) return false;
        if (!containmentMapping(s1, target) || !equivalentToQ(s1)) return false;
        return forEachDrop(s1, sem == Semantics::Set, equivalentToQ);
    };
    if (attempt({})) return false;
    std::vector<int> rgs(vars.size(), 0), rgsMax(vars.size(), 0);
    if (vars.empty()) return true;
    do {
        Substitution merge;
        std::vector<Term> rep(vars.size());
        std::vector<bool> named(vars.size(), false);
        for (std::size_t i = 0; i < vars.size(); ++i) {
            std::size_t b = static_cast<std::size_t>(rgs[i]);
            if (!named[b]) {
                rep[b] = vars[i];
                named[b] = true;
            } else {
                merge[vars[i]] = rep[b];
            }
        }
        if (!merge.empty() && attempt(merge)) return false;
    } while (nextPartition(rgs, rgsMax));
    return true;
}

bool isSigmaMinimal(const Query& q, const std::vector<Dependency>& deps, const Schema& s, Semantics sem,
                    ChaseBudget budget) {
    ChaseEngine engine(s, deps, budget);
    return isSigmaMinimal(q, sem, engine);
}

ReformulationSet candb(Semantics sem, const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                       ChaseBudget budget, const ReformulationOptions& opt) {
    ReformulationSet out;
    out.input = q;
    out.semantics = sem;
    {
        ChaseEngine engine(s, deps, budget);
        out.universalPlan = engine.soundChase(sem, q).result;
    }
    const Query& plan = out.universalPlan;
    std::size_t n = plan.body.size();
    if (n > opt.maxPlanAtoms)
        throw ResourceBound("universal plan has " + std::to_string(n) + " atoms (limit " +
                            std::to_string(opt.maxPlanAtoms) + ")");
    unsigned jobs = std::max(1u, opt.jobs);
    std::vector<std::unique_ptr<ChaseEngine>> engines;
    for (unsigned j = 0; j < jobs; ++j) engines.push_back(std::make_unique<ChaseEngine>(s, deps, budget));

    std::vector<unsigned long> accepted;
    for (std::size_t k = 1; k <= n; ++k) {
        // subsets of size k that contain no accepted subset
        std::vector<unsigned long> level;
        for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
            if (static_cast<std::size_t>(__builtin_popcountl(mask)) != k) continue;
            bool covered = std::any_of(accepted.begin(), accepted.end(),
                                       [&](unsigned long a) { return (mask & a) == a; });
            if (!covered) level.push_back(mask);
        }
        std::vector<char> ok(level.size(), 0);
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failureLock;
        auto work = [&](unsigned j) {
            for (std::size_t i = next++; i < level.size(); i = next++) {
                try {
                    std::vector<Atom> body;
                    for (std::size_t b = 0; b < n; ++b)
                        if (level[i] & (1ul << b)) body.push_back(plan.body[b]);
                    Query cand = withBody(plan, body);
                    if (!isSafe(cand)) continue;
                    Query chased = engines[j]->soundChase(sem, cand).result;
                    ok[i] = sameUnder(sem, chased, plan, s);
                } catch (...) {
                    std::lock_guard<std::mutex> g(failureLock);
                    if (!failure) failure = std::current_exception();
                    next = level.size();
                }
            }
        };
        if (jobs == 1 || level.size() < 2) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j);
            for (auto& t : pool) t.join();
        }
        if (failure) std::rethrow_exception(failure);
        for (std::size_t i = 0; i < level.size(); ++i) {
            if (!ok[i]) continue;
            accepted.push_back(level[i]);
            std::vector<Atom> body;
            for (std::size_t b = 0; b < n; ++b)
                if (level[i] & (1ul << b)) body.push_back(plan.body[b]);
            out.candidates.push_back(withBody(plan, body));
        }
    }

    for (const Query& c : out.candidates) {
        if (!isSigmaMinimal(c, sem, *engines[0])) continue;
        bool dup = std::any_of(out.outputs.begin(), out.outputs.end(), [&](const Query& o) { return isomorphic(o, c); });
        if (!dup) out.outputs.push_back(c);
    }
    auto order = [](const Query& a, const Query& b) {
        if (a.body.size() != b.body.size()) return a.body.size() < b.body.size();
        return printQuery(a) < printQuery(b);
    };
    std::stable_sort(out.outputs.begin(), out.outputs.end(), order);
    std::stable_sort(out.candidates.begin(), out.candidates.end(), order);
    return out;
}

ReformulationSet candbSet(const Query& q, const std::vector<Dependency>& deps, const Schema& s, ChaseBudget budget,
                          const ReformulationOptions& opt) {
    return candb(Semantics::Set, q, deps, s, budget, opt);
}

ReformulationSet candbBag(const Query& q, const std::vector<Dependency>& deps, const Schema& s, ChaseBudget budget,
                          const ReformulationOptions& opt) {
    return candb(Semantics::Bag, q, deps, s, budget, opt);
}

ReformulationSet candbBagSet(const Query& q, const std::vector<Dependency>& deps, const Schema& s,
                             ChaseBudget budget, const ReformulationOptions& opt) {
    return candb(Semantics::BagSet, q, deps, s, budget, opt);
}

AggregateReformulationSet candbAggregate(const AggregateQuery& a, const std::vector<Dependency>& deps,
                                         const Schema& s, ChaseBudget budget, const ReformulationOptions& opt) {
    AggregateReformulationSet out;
    out.input = a;
    out.coreSemantics = a.fn == AggFn::Max || a.fn == AggFn::Min ? Semantics::Set : Semantics::BagSet;
    out.core = candb(out.coreSemantics, a.core, deps, s, budget, opt);
    std::size_t g = a.grouping.size();
    for (const Query& c : out.core.outputs) {
        AggregateQuery r;
        r.fn = a.fn;
        r.core = c;
        r.grouping.assign(c.head.args.begin(), c.head.args.begin() + static_cast<std::ptrdiff_t>(g));
        if (a.aggArg) r.aggArg = c.head.args[g];
        out.outputs.push_back(std::move(r));
    }
    return out;
}

} // namespace chasekit
