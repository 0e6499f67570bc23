#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace reebext {

/// Demigenus and orientability of a compact surface once all of its boundary
/// circles are capped with discs.  o == 0 means orientable, o == 1 means
/// non-orientable.  Not every pair is realizable; see lambda_valid().
struct SurfaceClass {
    int g = 0;
    int o = 0;

    auto operator<=>(const SurfaceClass&) const = default;
    bool operator==(const SurfaceClass&) const = default;
};

/// The realizable (demigenus, orientability) pairs: (0,0), (odd, 1), and
/// (even >= 2, 0 or 1).  Odd demigenus forces non-orientability, demigenus
/// zero forces orientability.
constexpr bool lambda_valid(int g, int o) noexcept {
    if (g < 0 || (o != 0 && o != 1)) return false;
    if (g == 0) return o == 0;
    if (g % 2 != 0) return o == 1;
    return true;
}

constexpr bool lambda_valid(SurfaceClass c) noexcept { return lambda_valid(c.g, c.o); }

/// Boundary connected sum: demigenus adds, and one non-orientable summand
/// makes the whole result non-orientable.
constexpr SurfaceClass join(SurfaceClass a, SurfaceClass b) noexcept {
    return SurfaceClass{a.g + b.g, a.o | b.o};
}

/// All unordered pairs (c1, c2) with join(c1, c2) == c, listed with
/// c1 <= c2 and ordered by (c1.g, c1.o, c2.o).  Exact inverse of join():
/// demigenus splits additively; an orientable surface only splits into
/// orientable parts, a non-orientable one needs at least one
/// non-orientable part.
inline std::vector<std::pair<SurfaceClass, SurfaceClass>> split_options(SurfaceClass c) {
    std::vector<std::pair<SurfaceClass, SurfaceClass>> out;
    for (int g1 = 0; 2 * g1 <= c.g; ++g1) {
        const int g2 = c.g - g1;
        for (int o1 = 0; o1 <= 1; ++o1) {
            for (int o2 = 0; o2 <= 1; ++o2) {
                const SurfaceClass c1{g1, o1};
                const SurfaceClass c2{g2, o2};
                if (!lambda_valid(c1) || !lambda_valid(c2)) continue;
                if ((o1 | o2) != c.o) continue;
                if (c2 < c1) continue;  // keep one representative per unordered pair
                out.emplace_back(c1, c2);
            }
        }
    }
    return out;
}

/// Attaching a handle or a pair of crosscaps: demigenus grows by two and the
/// surface either keeps its orientability or turns non-orientable.
inline std::vector<SurfaceClass> genus_add_options(SurfaceClass c) {
    std::vector<SurfaceClass> out;
    for (int o : {c.o, 1}) {
        const SurfaceClass cand{c.g + 2, o};
        if (lambda_valid(cand) && (out.empty() || out.back() != cand)) out.push_back(cand);
    }
    return out;
}

/// Inverse of genus_add_options: demigenus drops by two, orientability may be
/// recovered or kept.  Requires demigenus >= 2.
inline std::vector<SurfaceClass> genus_remove_options(SurfaceClass c) {
    if (c.g < 2) throw std::invalid_argument("genus_remove_options: demigenus must be >= 2");
    std::vector<SurfaceClass> out;
    for (int o : {0, c.o}) {
        const SurfaceClass cand{c.g - 2, o};
        if (lambda_valid(cand) && (out.empty() || out.back() != cand)) out.push_back(cand);
    }
    return out;
}

/// Attaching a single crosscap: demigenus grows by one, always non-orientable.
constexpr SurfaceClass crosscap_add(SurfaceClass c) noexcept { return SurfaceClass{c.g + 1, 1}; }

/// Removing a single crosscap from a non-orientable surface.  The remainder
/// keeps whatever orientability the label set permits at demigenus g - 1.
inline std::vector<SurfaceClass> crosscap_remove_options(SurfaceClass c) {
    if (c.o != 1) throw std::invalid_argument("crosscap_remove_options: surface must be non-orientable");
    std::vector<SurfaceClass> out;
    for (int o : {0, 1}) {
        const SurfaceClass cand{c.g - 1, o};
        if (lambda_valid(cand)) out.push_back(cand);
    }
    return out;
}

/// A level-surface component before capping: b boundary circles plus the
/// class of the capped surface.  Live components always have b >= 1.
struct BoundedClass {
    int b = 1;
    SurfaceClass cls;

    bool operator==(const BoundedClass&) const = default;
};

enum class SurfaceKind { Orientable, OddNonorientable, EvenNonorientable };

/// Capped classification: orientable surfaces are spheres with h handles,
/// non-orientable ones are odd (one crosscap) or even (two crosscaps)
/// with h additional handles.
struct ClassDescriptor {
    SurfaceKind kind = SurfaceKind::Orientable;
    int handles = 0;

    bool operator==(const ClassDescriptor&) const = default;
};

inline ClassDescriptor classify(SurfaceClass c) {
    if (!lambda_valid(c)) throw std::invalid_argument("classify: class outside the label set");
    if (c.o == 0) return {SurfaceKind::Orientable, c.g / 2};
    if (c.g % 2 != 0) return {SurfaceKind::OddNonorientable, (c.g - 1) / 2};
    return {SurfaceKind::EvenNonorientable, (c.g - 2) / 2};
}

inline ClassDescriptor classify(const BoundedClass& b) { return classify(b.cls); }

/// Human-readable name, mostly for reports and DOT labels.
inline std::string describe(const BoundedClass& b) {
    const ClassDescriptor d = classify(b.cls);
    std::string base;
    switch (d.kind) {
        case SurfaceKind::Orientable:
            base = d.handles == 0 ? "sphere" : "orientable genus-" + std::to_string(d.handles) + " surface";
            break;
        case SurfaceKind::OddNonorientable:
            base = d.handles == 0 ? "projective plane"
                                  : "projective plane with " + std::to_string(d.handles) + " handle(s)";
            break;
        case SurfaceKind::EvenNonorientable:
            base = d.handles == 0 ? "Klein bottle"
                                  : "Klein bottle with " + std::to_string(d.handles) + " handle(s)";
            break;
    }
    if (b.b > 0) base += " minus " + std::to_string(b.b) + " open disc(s)";
    return base;
}

}  // namespace reebext
