#ifndef OPENMAP_CAD_HPP
#define OPENMAP_CAD_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "openmap/algnum.hpp"
#include "openmap/formula.hpp"
#include "openmap/polynomial.hpp"

namespace openmap {

struct QeLimits {
    std::size_t max_vars = 4;
    unsigned max_degree = 4;
    // internal blowup guards for the projection cascade
    std::size_t max_family = 192;
    unsigned max_internal_degree = 48;
};

namespace caddetail {

inline Polynomial normalize_poly(const Polynomial& p) {
    if (p.is_zero() || p.is_constant()) return Polynomial(p.arity());
    Polynomial sf = squarefree_part(p);
    Rat lc = sf.leading_coeff();
    if (!lc.is_zero() && lc != Rat(1)) sf = sf.scaled(Rat(1) / lc);
    return sf;
}

inline void add_normalized(std::set<Polynomial>& fam, const Polynomial& p) {
    Polynomial q = normalize_poly(p);
    if (!q.is_zero() && !q.is_constant()) fam.insert(q);
}

// Reducta chain of f in `var`: f, f - lt(f), ... down to degree 1.
inline std::vector<Polynomial> reducta(const Polynomial& f, std::size_t var) {
    std::vector<Polynomial> out;
    Polynomial cur = f;
    while (cur.degree(var) >= 1) {
        out.push_back(cur);
        unsigned d = cur.degree(var);
        std::vector<Polynomial> cs = cur.univar_coeffs(var);
        cs[d] = Polynomial(f.arity());
        cur = Polynomial::from_univar(cs, var);
    }
    return out;
}

enum class ProjectionKind { mccallum, collins };

// Raised when a family polynomial vanishes identically over a cell while the
// run uses the reduced projection; the caller reruns with the full one.
struct NullificationDetected {};

// Projection of the family into the variables below `var`. The reduced
// (McCallum-style) operator takes coefficients, discriminants and pairwise
// resultants; the full Collins operator adds psc chains over reducta and is
// used as the fallback when nullification is observed during lifting.
inline std::set<Polynomial> project(const std::vector<Polynomial>& fam, std::size_t var,
                                    const QeLimits& limits, ProjectionKind kind) {
    std::set<Polynomial> out;
    auto guard = [&]() {
        if (out.size() > limits.max_family)
            throw LimitsExceeded("qe: projection family too large");
    };
    auto add_psc_chain = [&](const Polynomial& r, const Polynomial& s, bool only_head) {
        if (r.degree(var) < 1 || s.degree(var) < 1) return;
        unsigned bound = std::min(r.degree(var), s.degree(var));
        for (unsigned j = 0; j < bound; ++j) {
            Polynomial t = psc(r, s, var, j);
            if (t.total_degree() > limits.max_internal_degree)
                throw LimitsExceeded("qe: projection degree blowup");
            if (!t.is_zero()) {
                add_normalized(out, t);
                // the reduced operator keeps only the first nonvanishing
                // entry of each chain
                if (only_head) break;
            }
        }
        guard();
    };
    for (const auto& f : fam) {
        for (const auto& c : f.univar_coeffs(var)) add_normalized(out, c);
        if (kind == ProjectionKind::mccallum) {
            add_psc_chain(f, f.derivative(var), true);
        } else {
            for (const auto& r : reducta(f, var)) add_psc_chain(r, r.derivative(var), false);
        }
        guard();
    }
    for (std::size_t a = 0; a < fam.size(); ++a)
        for (std::size_t b = a + 1; b < fam.size(); ++b) {
            if (kind == ProjectionKind::mccallum) {
                add_psc_chain(fam[a], fam[b], true);
            } else {
                for (const auto& r : reducta(fam[a], var))
                    for (const auto& s : reducta(fam[b], var)) add_psc_chain(r, s, false);
            }
            guard();
        }
    return out;
}

// Pairwise-coprime refinement: splitting family members along common factors
// keeps the root sets identical while the degrees drop sharply.
inline std::set<Polynomial> gcd_free_basis(const std::set<Polynomial>& fam,
                                           const QeLimits& limits) {
    std::vector<Polynomial> basis(fam.begin(), fam.end());
    for (int rounds = 0; rounds < 256; ++rounds) {
        bool changed = false;
        for (std::size_t i = 0; i < basis.size() && !changed; ++i)
            for (std::size_t j = i + 1; j < basis.size() && !changed; ++j) {
                if (basis[i] == basis[j]) {
                    basis.erase(basis.begin() + static_cast<long>(j));
                    changed = true;
                    break;
                }
                Polynomial g = poly_gcd(basis[i], basis[j]);
                if (g.is_constant()) continue;
                auto qi = Polynomial::divide_exact(basis[i], g);
                auto qj = Polynomial::divide_exact(basis[j], g);
                if (!qi || !qj) throw Error("gcd_free_basis: inexact split");
                std::vector<Polynomial> next;
                for (std::size_t t = 0; t < basis.size(); ++t)
                    if (t != i && t != j) next.push_back(basis[t]);
                for (Polynomial piece : {g, *qi, *qj}) {
                    Polynomial np = normalize_poly(piece);
                    if (!np.is_zero() && !np.is_constant()) next.push_back(std::move(np));
                }
                basis = std::move(next);
                changed = true;
            }
        if (!changed) break;
    }
    std::set<Polynomial> out(basis.begin(), basis.end());
    if (out.size() > limits.max_family) throw LimitsExceeded("qe: basis too large");
    return out;
}

// Evaluates a polynomial (variables 0..coords.size()-1 only) at a tower point.
template <class K>
K eval_poly_tower(const Polynomial& p, const std::vector<K>& coords) {
    K acc = FieldOps<K>::from_rat(Rat(0));
    for (const auto& [e, c] : p.terms()) {
        K t = FieldOps<K>::from_rat(c);
        for (std::size_t i = 0; i < p.arity(); ++i) {
            if (e[i] == 0) continue;
            if (i >= coords.size()) throw Error("cad: polynomial reads an unlifted variable");
            t = t * field_pow(coords[i], e[i]);
        }
        acc = acc + t;
    }
    return acc;
}

// Three-valued partial evaluation: atoms whose variables are all fixed get
// exact signs, the rest stay unknown (Collins-Hong style pruning).
template <class K>
std::optional<bool> eval_matrix_partial(const SAFormula& f, const std::vector<K>& coords) {
    switch (f.kind()) {
        case SAFormula::Kind::True: return true;
        case SAFormula::Kind::False: return false;
        case SAFormula::Kind::Leaf: {
            const Polynomial& p = f.leaf().poly;
            for (std::size_t v = coords.size(); v < p.arity(); ++v)
                if (p.uses(v)) return std::nullopt;
            int s = FieldOps<K>::sign(eval_poly_tower(p, coords));
            switch (f.leaf().rel) {
                case Rel::GT: return s > 0;
                case Rel::GE: return s >= 0;
                case Rel::EQ: return s == 0;
            }
            return std::nullopt;
        }
        case SAFormula::Kind::And: {
            bool unknown = false;
            for (const auto& c : f.children()) {
                auto r = eval_matrix_partial(c, coords);
                if (r && !*r) return false;
                if (!r) unknown = true;
            }
            if (unknown) return std::nullopt;
            return true;
        }
        case SAFormula::Kind::Or: {
            bool unknown = false;
            for (const auto& c : f.children()) {
                auto r = eval_matrix_partial(c, coords);
                if (r && *r) return true;
                if (!r) unknown = true;
            }
            if (unknown) return std::nullopt;
            return false;
        }
        case SAFormula::Kind::Not: {
            auto r = eval_matrix_partial(f.children()[0], coords);
            if (!r) return std::nullopt;
            return !*r;
        }
    }
    return std::nullopt;
}

template <class K>
bool eval_matrix_tower(const SAFormula& f, const std::vector<K>& coords) {
    switch (f.kind()) {
        case SAFormula::Kind::True: return true;
        case SAFormula::Kind::False: return false;
        case SAFormula::Kind::Leaf: {
            int s = FieldOps<K>::sign(eval_poly_tower(f.leaf().poly, coords));
            switch (f.leaf().rel) {
                case Rel::GT: return s > 0;
                case Rel::GE: return s >= 0;
                case Rel::EQ: return s == 0;
            }
            return false;
        }
        case SAFormula::Kind::And:
            for (const auto& c : f.children())
                if (!eval_matrix_tower(c, coords)) return false;
            return true;
        case SAFormula::Kind::Or:
            for (const auto& c : f.children())
                if (eval_matrix_tower(c, coords)) return true;
            return false;
        case SAFormula::Kind::Not: return !eval_matrix_tower(f.children()[0], coords);
    }
    return false;
}

struct CellRecord {
    std::vector<int> signs; // signs of the free-level families, concatenated
    bool truth = false;
};

struct CadRun {
    std::size_t n_levels = 0;
    std::size_t free_count = 0;
    std::vector<std::vector<Polynomial>> fam; // fam[i]: polys in vars 0..i
    SAFormula matrix;                         // remapped, arity n_levels
    std::vector<Quant> quants;                // levels free_count..n_levels-1
    ProjectionKind projection = ProjectionKind::mccallum;
    std::vector<CellRecord> cells;
};

constexpr int kMaxLift = 4;

// Sample points of the decomposition of the line induced by the roots of the
// level family over the current cell, in ascending order.
template <class K>
void refine_rootloc(RootLoc<K>& r) {
    if (r.exact) return;
    Rat mid = (r.lo + r.hi) / Rat(2);
    int sm = FieldOps<K>::sign(r.poly.eval(mid));
    if (sm == 0) {
        r.exact = mid;
        return;
    }
    int slo = FieldOps<K>::sign(r.poly.eval(r.lo));
    if (sm == slo) r.lo = mid;
    else r.hi = mid;
}

// Exact order comparison of two isolated roots (possibly of different
// polynomials): refine until the intervals separate, testing along the way
// whether a shared gcd root makes them equal.
template <class K>
int compare_rootlocs(RootLoc<K>& a, RootLoc<K>& b) {
    auto left = [](const RootLoc<K>& r) { return r.exact ? *r.exact : r.lo; };
    auto right = [](const RootLoc<K>& r) { return r.exact ? *r.exact : r.hi; };
    if (a.exact && b.exact) {
        if (*a.exact == *b.exact) return 0;
        return *a.exact < *b.exact ? -1 : 1;
    }
    std::optional<std::vector<UPoly<K>>> gchain;
    for (int guard = 0; guard < 4000; ++guard) {
        if (right(a) < left(b)) return -1;
        if (right(b) < left(a)) return 1;
        if (a.exact) {
            if (FieldOps<K>::is_zero(b.poly.eval(*a.exact)) && b.lo < *a.exact &&
                *a.exact < b.hi)
                return 0;
        } else if (b.exact) {
            if (FieldOps<K>::is_zero(a.poly.eval(*b.exact)) && a.lo < *b.exact &&
                *b.exact < a.hi)
                return 0;
        } else if (guard % 4 == 3) {
            if (!gchain) {
                UPoly<K> g = upoly_gcd_monic(a.poly, b.poly);
                gchain = (g.degree() >= 1) ? sturm_chain(g) : std::vector<UPoly<K>>{};
            }
            if (!gchain->empty()) {
                Rat lo = max(left(a), left(b)), hi = min(right(a), right(b));
                if (lo < hi && count_roots_halfopen(*gchain, lo, hi) > 0) return 0;
            }
        }
        refine_rootloc(a);
        refine_rootloc(b);
    }
    throw Error("cad: root comparison failed to separate");
}

// Union of the root sets of the level polynomials, each isolated against its
// own (small) squarefree polynomial, merged with exact comparisons.
template <class K>
std::vector<RootLoc<K>> merge_level_roots(const std::vector<UPoly<K>>& polys) {
    std::vector<RootLoc<K>> all;
    for (const auto& p : polys) {
        UPoly<K> sf = squarefree_part(p).monic();
        for (auto& r : isolate_roots(sf)) all.push_back(std::move(r));
    }
    std::vector<RootLoc<K>> out;
    for (auto& r : all) {
        bool placed = false;
        for (std::size_t i = 0; i < out.size() && !placed; ++i) {
            int c = compare_rootlocs(r, out[i]);
            if (c == 0) {
                // keep the cheaper defining polynomial
                if (!out[i].exact && (r.exact || r.poly.degree() < out[i].poly.degree()))
                    out[i] = r;
                placed = true;
            } else if (c < 0) {
                out.insert(out.begin() + static_cast<long>(i), r);
                placed = true;
            }
        }
        if (!placed) out.push_back(r);
    }
    return out;
}

template <class K>
std::vector<AlgElem<K>> level_samples(const std::vector<UPoly<K>>& polys) {
    using E = AlgElem<K>;
    if (polys.empty()) return {E::constant(FieldOps<K>::from_rat(Rat(0)))};
    std::vector<RootLoc<K>> roots = merge_level_roots(polys);
    if (roots.empty()) return {E::constant(FieldOps<K>::from_rat(Rat(0)))};
    auto left_of = [&](const RootLoc<K>& r) { return r.exact ? *r.exact : r.lo; };
    auto right_of = [&](const RootLoc<K>& r) { return r.exact ? *r.exact : r.hi; };
    // refine until consecutive roots are separated by a genuine rational gap
    for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
        int guard = 0;
        while (!(right_of(roots[i]) < left_of(roots[i + 1]))) {
            refine_rootloc(roots[i]);
            refine_rootloc(roots[i + 1]);
            if (++guard > 4000) throw Error("cad: failed to separate adjacent roots");
        }
    }
    std::vector<E> out;
    out.push_back(E::constant(FieldOps<K>::from_rat(left_of(roots[0]) - Rat(1))));
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const auto& r = roots[i];
        if (r.exact) {
            out.push_back(E::constant(FieldOps<K>::from_rat(*r.exact)));
        } else {
            auto ctx = std::make_shared<ExtCtx<K>>(r.poly.monic(), r.lo, r.hi);
            out.push_back(E::generator(ctx));
        }
        if (i + 1 < roots.size()) {
            Rat mid = (right_of(r) + left_of(roots[i + 1])) / Rat(2);
            out.push_back(E::constant(FieldOps<K>::from_rat(mid)));
        }
    }
    out.push_back(E::constant(FieldOps<K>::from_rat(right_of(roots.back()) + Rat(1))));
    return out;
}

template <class K, int Depth>
bool lift(CadRun& run, const std::vector<K>& coords, std::vector<int>& signvec) {
    std::size_t i = coords.size();
    bool result = false;
    if (i == run.n_levels) {
        result = eval_matrix_tower(run.matrix, coords);
    } else if (std::optional<bool> decided =
                   (i >= run.free_count && i > 0)
                       ? eval_matrix_partial(run.matrix, coords)
                       : std::nullopt) {
        result = *decided; // fixed coordinates already decide the matrix
    } else {
        if constexpr (Depth >= kMaxLift) {
            throw LimitsExceeded("qe: lifting deeper than the variable limit");
        } else {
            using K2 = AlgElem<K>;
            // instantiate the level family over this cell
            std::vector<UPoly<K>> polys;
            for (const auto& p : run.fam[i]) {
                std::vector<Polynomial> cs = p.univar_coeffs(i);
                std::vector<K> ks;
                ks.reserve(cs.size());
                for (const auto& c : cs) ks.push_back(eval_poly_tower(c, coords));
                UPoly<K> up{std::move(ks)};
                if (up.is_zero() && run.projection == ProjectionKind::mccallum && i > 0)
                    throw NullificationDetected{}; // reduced projection unsafe here
                if (!up.is_zero() && up.degree() > 0) polys.push_back(std::move(up));
            }
            std::vector<K2> samples = level_samples<K>(polys);
            // embed the existing coordinates once
            std::vector<K2> base;
            base.reserve(i + 1);
            for (const auto& c : coords) base.push_back(K2::constant(c));
            base.push_back(K2::constant(FieldOps<K>::from_rat(Rat(0))));
            bool is_free = i < run.free_count;
            Quant q = is_free ? Quant::Exists : run.quants[i - run.free_count];
            bool acc = (q == Quant::ForAll);
            for (const auto& s : samples) {
                base.back() = s;
                std::size_t mark = signvec.size();
                if (is_free) {
                    for (const auto& p : run.fam[i])
                        signvec.push_back(FieldOps<K2>::sign(eval_poly_tower(p, base)));
                }
                bool t = lift<K2, Depth + 1>(run, base, signvec);
                signvec.resize(mark);
                if (!is_free) {
                    acc = (q == Quant::ForAll) ? (acc && t) : (acc || t);
                    // fixed traversal order, so stopping at a decisive child
                    // keeps the result deterministic
                    if (acc != (q == Quant::ForAll)) break;
                }
            }
            result = acc;
        }
    }
    if (i == run.free_count) run.cells.push_back(CellRecord{signvec, result});
    return result;
}

} // namespace caddetail

// Tarski-style quantifier elimination by cylindrical algebraic decomposition
// with exact algebraic sample points. Output variables are the free variables
// of the input, renumbered densely in ascending order of their original
// indices. Throws LimitsExceeded on inputs past the configured limits or when
// the sign-vector solution formula cannot separate cells.
inline SAFormula qe_eliminate_with(const SAFormula& phi, const QeLimits& limits,
                                   caddetail::ProjectionKind projection) {
    std::size_t n = phi.arity();
    if (n == 0) return phi;
    if (n > limits.max_vars) throw LimitsExceeded("qe: too many variables");
    std::vector<bool> bound(n, false);
    for (const auto& [q, v] : phi.prefix()) {
        (void)q;
        if (v >= n || bound[v]) throw Error("qe: malformed prefix");
        bound[v] = true;
    }
    // level order: free variables ascending, then the prefix (outermost
    // first); the innermost quantifier sits at the deepest level
    std::vector<std::size_t> level_of(n);
    std::vector<std::size_t> var_at;
    for (std::size_t v = 0; v < n; ++v)
        if (!bound[v]) var_at.push_back(v);
    std::size_t free_count = var_at.size();
    std::vector<Quant> quants;
    for (const auto& [q, v] : phi.prefix()) {
        var_at.push_back(v);
        quants.push_back(q);
    }
    for (std::size_t lvl = 0; lvl < n; ++lvl) level_of[var_at[lvl]] = lvl;

    SAFormula matrix = phi.substitute(std::vector<std::optional<Rat>>(n), n, level_of);
    std::vector<Atom> atoms;
    matrix.collect_atoms(atoms);
    for (const auto& a : atoms)
        if (a.poly.total_degree() > limits.max_degree)
            throw LimitsExceeded("qe: atom degree past the limit");

    caddetail::CadRun run;
    run.n_levels = n;
    run.free_count = free_count;
    run.matrix = matrix;
    run.quants = quants;
    run.projection = projection;
    run.fam.resize(n);
    std::set<Polynomial> level_set;
    for (const auto& a : atoms) caddetail::add_normalized(level_set, a.poly);
    level_set = caddetail::gcd_free_basis(level_set, limits);
    for (std::size_t lvl = n; lvl-- > 0;) {
        std::vector<Polynomial> here, project_in;
        std::set<Polynomial> below;
        for (const auto& p : level_set) {
            bool uses_higher = false;
            for (std::size_t v = lvl + 1; v < n; ++v) uses_higher = uses_higher || p.uses(v);
            if (uses_higher) throw Error("qe: family leaked an upper variable");
            if (p.uses(lvl)) {
                here.push_back(p);
                project_in.push_back(p);
            } else {
                below.insert(p); // pass through to the lower level
            }
        }
        run.fam[lvl] = here;
        if (lvl > 0) {
            std::set<Polynomial> projected =
                caddetail::project(project_in, lvl, limits, projection);
            for (const auto& p : projected) below.insert(p);
            level_set = caddetail::gcd_free_basis(below, limits);
        }
    }

    std::vector<int> signvec;
    std::vector<Rat> none;
    caddetail::lift<Rat, 0>(run, std::vector<Rat>{}, signvec);

    if (free_count == 0) {
        bool truth = !run.cells.empty() && run.cells[0].truth;
        return SAFormula::constant(0, truth);
    }

    // solution formula from sign vectors; refuse on collisions
    std::map<std::vector<int>, bool> seen;
    for (const auto& cell : run.cells) {
        auto it = seen.find(cell.signs);
        if (it != seen.end() && it->second != cell.truth)
            throw LimitsExceeded("qe: sign vectors cannot separate cells");
        seen[cell.signs] = cell.truth;
    }
    bool any_true = false, any_false = false;
    for (const auto& [sv, t] : seen) {
        (void)sv;
        (t ? any_true : any_false) = true;
    }
    if (!any_true) return SAFormula::constant(free_count, false);
    if (!any_false) return SAFormula::constant(free_count, true);

    std::vector<std::size_t> out_map(n, 0);
    for (std::size_t lvl = 0; lvl < free_count; ++lvl) out_map[lvl] = lvl;
    std::vector<SAFormula> cells_dnf;
    std::set<std::vector<int>> emitted;
    for (const auto& cell : run.cells) {
        if (!cell.truth || emitted.count(cell.signs)) continue;
        emitted.insert(cell.signs);
        std::vector<SAFormula> conj;
        std::size_t pos = 0;
        for (std::size_t lvl = 0; lvl < free_count; ++lvl)
            for (const auto& p : run.fam[lvl]) {
                int s = cell.signs[pos++];
                Polynomial q = p.remap_vars(free_count, out_map);
                if (s > 0) conj.push_back(SAFormula::atom(Atom{q, Rel::GT}));
                else if (s < 0) conj.push_back(SAFormula::atom(Atom{-q, Rel::GT}));
                else conj.push_back(SAFormula::atom(Atom{q, Rel::EQ}));
            }
        if (conj.empty()) return SAFormula::constant(free_count, true);
        cells_dnf.push_back(SAFormula::make_and(std::move(conj)));
    }
    if (cells_dnf.empty()) return SAFormula::constant(free_count, false);
    return SAFormula::make_or(std::move(cells_dnf));
}

// Reduced projection first; rerun with the full Collins operator when a
// nullified polynomial shows the reduced one cannot be trusted.
inline SAFormula qe_eliminate(const SAFormula& phi, const QeLimits& limits = QeLimits()) {
    try {
        return qe_eliminate_with(phi, limits, caddetail::ProjectionKind::mccallum);
    } catch (const caddetail::NullificationDetected&) {
        return qe_eliminate_with(phi, limits, caddetail::ProjectionKind::collins);
    }
}

// Truth of a sentence (every variable quantified).
inline bool decide_sentence(const SAFormula& phi, const QeLimits& limits = QeLimits()) {
    SAFormula out = qe_eliminate(phi, limits);
    if (out.kind() == SAFormula::Kind::True) return true;
    if (out.kind() == SAFormula::Kind::False) return false;
    throw Error("decide_sentence: formula has free variables");
}

} // namespace openmap

#endif
