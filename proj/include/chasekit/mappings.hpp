#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "chasekit/model.hpp"

namespace chasekit {

struct Homomorphism {
    Substitution map;                  // variables of the source (and any anchor entries)
    std::vector<std::size_t> atomImage; // source atom i -> target atom atomImage[i]

    Term apply(const Term& t) const { return substitute(map, t); }
    Atom apply(const Atom& a) const { return substitute(map, a); }
};

// All homomorphisms from `src` into `dst` extending `anchor`, in lexicographic order of
// atomImage. The visitor returns false to stop early.
void forEachHomomorphism(const std::vector<Atom>& src, const std::vector<Atom>& dst, const Substitution& anchor,
                         const std::function<bool(const Homomorphism&)>& visit);
std::vector<Homomorphism> findHomomorphisms(const std::vector<Atom>& src, const std::vector<Atom>& dst,
                                            const Substitution& anchor = {});
std::optional<Homomorphism> findHomomorphism(const std::vector<Atom>& src, const std::vector<Atom>& dst,
                                             const Substitution& anchor = {});

// Containment mapping from `from` to `to`: body homomorphism sending head to head.
// Its existence means to ⊑ from under set semantics. Throws HeadArityMismatch.
std::optional<Homomorphism> containmentMapping(const Query& from, const Query& to);

bool setEquivalent(const Query& q1, const Query& q2);
bool isomorphic(const Query& q1, const Query& q2);
bool bagEquivalent(const Query& q1, const Query& q2);
bool bagSetEquivalent(const Query& q1, const Query& q2);
bool bagEquivalentWithSetRelations(const Query& q1, const Query& q2, const Schema& s);

// Core under set semantics: a minimal retract of the body that keeps the head.
Query minimizeQuery(const Query& q);

} // namespace chasekit
