#include "chasekit/mappings.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "chasekit/errors.hpp"

namespace chasekit {

namespace {

class HomSearch {
public:
    HomSearch(const std::vector<Atom>& src, const std::vector<Atom>& dst, const Substitution& anchor)
        : src_(src), dst_(dst), anchor_(anchor) {
        vars_ = variablesOf(src);
        for (std::size_t i = 0; i < vars_.size(); ++i) index_[vars_[i]] = static_cast<int>(i);
        value_.assign(vars_.size(), nullptr);
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            auto it = anchor.find(vars_[i]);
            if (it != anchor.end()) value_[i] = &it->second;
        }
        for (std::size_t j = 0; j < dst.size(); ++j) byRel_[dst[j].relation].push_back(j);
        image_.assign(src.size(), 0);
    }

    void run(const std::function<bool(const Homomorphism&)>& visit) {
        visit_ = &visit;
        stop_ = false;
        step(0);
    }

private:
    void step(std::size_t i) {
        if (i == src_.size()) {
            Homomorphism h;
            h.map = anchor_;
            for (std::size_t k = 0; k < vars_.size(); ++k) h.map[vars_[k]] = *value_[k];
            h.atomImage = image_;
            if (!(*visit_)(h)) stop_ = true;
            return;
        }
        const Atom& a = src_[i];
        auto it = byRel_.find(a.relation);
        if (it == byRel_.end()) return;
        std::vector<int> newly;
        for (std::size_t j : it->second) {
            const Atom& b = dst_[j];
            if (b.args.size() != a.args.size()) continue;
            newly.clear();
            bool ok = true;
            for (std::size_t p = 0; p < a.args.size() && ok; ++p) {
                const Term& s = a.args[p];
                if (!s.isVariable()) {
                    ok = s == b.args[p];
                    continue;
                }
                int v = index_.at(s);
                if (value_[v]) {
                    ok = *value_[v] == b.args[p];
                } else {
                    value_[v] = &b.args[p];
                    newly.push_back(v);
                }
            }
            if (ok) {
                image_[i] = j;
                step(i + 1);
            }
            for (int v : newly) value_[v] = nullptr;
            if (stop_) return;
        }
    }

    const std::vector<Atom>& src_;
    const std::vector<Atom>& dst_;
    const Substitution& anchor_;
    std::vector<Term> vars_;
    std::map<Term, int> index_;
    std::vector<const Term*> value_;
    std::unordered_map<std::string, std::vector<std::size_t>> byRel_;
    std::vector<std::size_t> image_;
    const std::function<bool(const Homomorphism&)>* visit_ = nullptr;
    bool stop_ = false;
};

} // namespace

void forEachHomomorphism(const std::vector<Atom>& src, const std::vector<Atom>& dst, const Substitution& anchor,
                         const std::function<bool(const Homomorphism&)>& visit) {
    HomSearch s(src, dst, anchor);
    s.run(visit);
}

std::vector<Homomorphism> findHomomorphisms(const std::vector<Atom>& src, const std::vector<Atom>& dst,
                                            const Substitution& anchor) {
    std::vector<Homomorphism> out;
    forEachHomomorphism(src, dst, anchor, [&](const Homomorphism& h) {
        out.push_back(h);
        return true;
    });
    return out;
}

std::optional<Homomorphism> findHomomorphism(const std::vector<Atom>& src, const std::vector<Atom>& dst,
                                             const Substitution& anchor) {
    std::optional<Homomorphism> out;
    forEachHomomorphism(src, dst, anchor, [&](const Homomorphism& h) {
        out = h;
        return false;
    });
    return out;
}

std::optional<Homomorphism> containmentMapping(const Query& from, const Query& to) {
    if (from.head.args.size() != to.head.args.size())
        throw HeadArityMismatch(from.head.args.size(), to.head.args.size());
    // the head fixes part of the mapping up front
    Substitution anchor;
    for (std::size_t i = 0; i < from.head.args.size(); ++i) {
        const Term& a = from.head.args[i];
        const Term& b = to.head.args[i];
        if (!a.isVariable()) {
            if (a != b) return std::nullopt;
            continue;
        }
        auto [it, fresh] = anchor.emplace(a, b);
        if (!fresh && it->second != b) return std::nullopt;
    }
    return findHomomorphism(from.body, to.body, anchor);
}

bool setEquivalent(const Query& q1, const Query& q2) {
    return containmentMapping(q1, q2).has_value() && containmentMapping(q2, q1).has_value();
}

namespace {

using Signature = std::vector<std::pair<std::string, int>>;

std::map<Term, Signature> signatures(const Query& q) {
    std::map<Term, Signature> out;
    auto note = [&](const Atom& a, bool head) {
        for (std::size_t p = 0; p < a.args.size(); ++p)
            if (a.args[p].isVariable())
                out[a.args[p]].emplace_back(head ? std::string() : a.relation, static_cast<int>(p) + (head ? 1000 : 0));
    };
    for (const Atom& a : q.body) note(a, false);
    note(q.head, true);
    for (auto& [_, s] : out) std::sort(s.begin(), s.end());
    return out;
}

class IsoSearch {
public:
    IsoSearch(const Query& a, const Query& b) : a_(a), b_(b), sigA_(signatures(a)), sigB_(signatures(b)) {
        used_.assign(b.body.size(), false);
        // rarest relation first
        std::map<std::string, int> freq;
        for (const Atom& x : b.body) ++freq[x.relation];
        order_.resize(a.body.size());
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) {
            return freq[a.body[x].relation] < freq[a.body[y].relation];
        });
    }

    bool run() {
        for (std::size_t i = 0; i < a_.head.args.size(); ++i)
            if (!bind(a_.head.args[i], b_.head.args[i])) return false;
        return step(0);
    }

private:
    bool bind(const Term& x, const Term& y) {
        if (x.isVariable() != y.isVariable()) return false;
        if (!x.isVariable()) return x == y;
        auto f = fwd_.find(x);
        auto g = bwd_.find(y);
        if (f != fwd_.end() || g != bwd_.end())
            return f != fwd_.end() && g != bwd_.end() && f->second == y && g->second == x;
        if (sigA_[x] != sigB_[y]) return false;
        fwd_[x] = y;
        bwd_[y] = x;
        trail_.push_back(x);
        return true;
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            Term x = trail_.back();
            trail_.pop_back();
            bwd_.erase(fwd_[x]);
            fwd_.erase(x);
        }
    }

    bool step(std::size_t k) {
        if (k == order_.size()) return true;
        const Atom& x = a_.body[order_[k]];
        for (std::size_t j = 0; j < b_.body.size(); ++j) {
            if (used_[j]) continue;
            const Atom& y = b_.body[j];
            if (y.relation != x.relation || y.args.size() != x.args.size()) continue;
            // identical unused atoms are interchangeable; try only the first
            bool dupe = false;
            for (std::size_t e = 0; e < j && !dupe; ++e) dupe = !used_[e] && b_.body[e] == y;
            if (dupe) continue;
            std::size_t mark = trail_.size();
            bool ok = true;
            for (std::size_t p = 0; p < x.args.size() && ok; ++p) ok = bind(x.args[p], y.args[p]);
            if (ok) {
                used_[j] = true;
                if (step(k + 1)) return true;
                used_[j] = false;
            }
            undo(mark);
        }
        return false;
    }

    const Query& a_;
    const Query& b_;
    std::map<Term, Signature> sigA_, sigB_;
    std::map<Term, Term> fwd_, bwd_;
    std::vector<Term> trail_;
    std::vector<bool> used_;
    std::vector<std::size_t> order_;
};

} // namespace

bool isomorphic(const Query& q1, const Query& q2) {
    if (q1.head.args.size() != q2.head.args.size())
        throw HeadArityMismatch(q1.head.args.size(), q2.head.args.size());
    if (q1.body.size() != q2.body.size()) return false;
    std::map<std::string, int> rel;
    for (const Atom& a : q1.body) ++rel[a.relation];
    for (const Atom& a : q2.body) --rel[a.relation];
    for (const auto& [_, c] : rel)
        if (c) return false;
    if (variablesOf(q1).size() != variablesOf(q2).size()) return false;
    return IsoSearch(q1, q2).run();
}

bool bagEquivalent(const Query& q1, const Query& q2) { return isomorphic(q1, q2); }

bool bagSetEquivalent(const Query& q1, const Query& q2) {
    return isomorphic(canonicalRepresentation(q1), canonicalRepresentation(q2));
}

bool bagEquivalentWithSetRelations(const Query& q1, const Query& q2, const Schema& s) {
    return isomorphic(dedupSetEnforced(q1, s), dedupSetEnforced(q2, s));
}

Query minimizeQuery(const Query& q) {
    Query cur = canonicalRepresentation(q);
    for (std::size_t i = cur.body.size(); i-- > 0;) {
        if (i >= cur.body.size()) continue;
        Query smaller = cur;
        smaller.body.erase(smaller.body.begin() + static_cast<std::ptrdiff_t>(i));
        auto h = containmentMapping(cur, smaller);
        if (!h) continue;
        // the image may drop more than one atom
        Query image = canonicalRepresentation(substitute(h->map, cur));
        cur = image;
        i = cur.body.size();
    }
    return cur;
}

} // namespace chasekit
